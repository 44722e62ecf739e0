//! Shared numerical tolerances.

/// Relative tolerance for geometric identities (involutions, word relations).
pub const GEOMETRIC: f64 = 1e-10;

/// Residual tolerance for sphere and similarity fitting.
pub const FIT: f64 = 1e-9;

/// Points this close to a peripheral sphere belong to the Schottky set.
pub const BOUNDARY: f64 = 1e-12;

/// A target sphere this close to a mirror's center maps to a hyperplane.
pub const THROUGH_CENTER: f64 = 1e-12;

/// Hyperplane normals must have unit length to this tolerance.
pub const UNIT_NORMAL: f64 = 1e-12;

/// Closed removed balls must be separated by more than this gap.
pub const DISJOINT_GAP: f64 = 1e-12;

/// A linear map is conformal when its dilatation is at most `1 + CONFORMAL`.
pub const CONFORMAL: f64 = 1e-9;

/// Default unfolding depth budget.
pub const DEFAULT_MAX_DEPTH: usize = 20;

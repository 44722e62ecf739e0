//! Inversive geometry over `R^n ∪ {∞}`.
//!
//! Möbius maps are represented as words of reflections in spheres and are
//! evaluated pointwise. Hyperplanes are spheres through `∞`, so the family
//! of spheres is closed under every reflection. The point at infinity is an
//! explicit variant of [`ExtendedPoint`]; formulas use their exact limits
//! instead of large-number surrogates.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;
use thiserror::Error;

use crate::sampling::unit_directions;
use crate::tolerance;

/// Column vector of ambient coordinates.
pub type Vector = DVector<f64>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("sphere radius must be positive and finite, got {0}")]
    BadRadius(f64),
    #[error("hyperplane normal must have unit length, |n| = {0}")]
    BadNormal(f64),
    #[error("coordinates must be finite")]
    NonFinite,
    #[error("matrix must be square and non-empty, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
}

/// A point of `R^n ∪ {∞}`.
#[derive(Debug, Clone, PartialEq)]
pub enum ExtendedPoint {
    Finite(Vector),
    Infinity,
}

impl ExtendedPoint {
    pub fn from_slice(coords: &[f64]) -> Self {
        ExtendedPoint::Finite(Vector::from_column_slice(coords))
    }

    /// Builds a finite point, rejecting NaN and infinite coordinates.
    pub fn try_finite(coords: Vector) -> Result<Self, GeometryError> {
        if coords.iter().all(|c| c.is_finite()) {
            Ok(ExtendedPoint::Finite(coords))
        } else {
            Err(GeometryError::NonFinite)
        }
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, ExtendedPoint::Infinity)
    }

    pub fn as_finite(&self) -> Option<&Vector> {
        match self {
            ExtendedPoint::Finite(v) => Some(v),
            ExtendedPoint::Infinity => None,
        }
    }

    pub fn into_finite(self) -> Option<Vector> {
        match self {
            ExtendedPoint::Finite(v) => Some(v),
            ExtendedPoint::Infinity => None,
        }
    }

    /// Dimension of a finite point; `None` for `∞`, which lives in every
    /// dimension.
    pub fn dim(&self) -> Option<usize> {
        self.as_finite().map(|v| v.len())
    }
}

impl From<Vector> for ExtendedPoint {
    fn from(v: Vector) -> Self {
        ExtendedPoint::Finite(v)
    }
}

/// A round sphere, or a hyperplane `{x : normal·x = offset}` viewed as a
/// sphere through `∞`.
#[derive(Debug, Clone, PartialEq)]
pub enum Sphere {
    Round { center: Vector, radius: f64 },
    Plane { normal: Vector, offset: f64 },
}

impl Sphere {
    pub fn round(center: Vector, radius: f64) -> Result<Self, GeometryError> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(GeometryError::BadRadius(radius));
        }
        if !center.iter().all(|c| c.is_finite()) {
            return Err(GeometryError::NonFinite);
        }
        Ok(Sphere::Round { center, radius })
    }

    pub fn plane(normal: Vector, offset: f64) -> Result<Self, GeometryError> {
        let len = normal.norm();
        if !((len - 1.0).abs() <= tolerance::UNIT_NORMAL) {
            return Err(GeometryError::BadNormal(len));
        }
        if !offset.is_finite() {
            return Err(GeometryError::NonFinite);
        }
        Ok(Sphere::Plane { normal, offset })
    }

    /// Hyperplane through `point` with the (not necessarily unit) normal.
    pub fn plane_through(point: &Vector, normal: &Vector) -> Result<Self, GeometryError> {
        let len = normal.norm();
        if !(len.is_finite() && len > 0.0) {
            return Err(GeometryError::BadNormal(len));
        }
        let unit = normal / len;
        let offset = unit.dot(point);
        Sphere::plane(unit, offset)
    }

    pub fn dim(&self) -> usize {
        match self {
            Sphere::Round { center, .. } => center.len(),
            Sphere::Plane { normal, .. } => normal.len(),
        }
    }

    pub fn is_round(&self) -> bool {
        matches!(self, Sphere::Round { .. })
    }

    pub fn center(&self) -> Option<&Vector> {
        match self {
            Sphere::Round { center, .. } => Some(center),
            Sphere::Plane { .. } => None,
        }
    }

    pub fn radius(&self) -> Option<f64> {
        match self {
            Sphere::Round { radius, .. } => Some(*radius),
            Sphere::Plane { .. } => None,
        }
    }

    fn check_dim(&self, x: &Vector) -> Result<(), GeometryError> {
        if x.len() != self.dim() {
            return Err(GeometryError::DimensionMismatch {
                expected: self.dim(),
                found: x.len(),
            });
        }
        Ok(())
    }

    /// Reflection (inversion) of `x` in this sphere.
    pub fn invert(&self, x: &ExtendedPoint) -> Result<ExtendedPoint, GeometryError> {
        match (self, x) {
            (Sphere::Round { center, .. }, ExtendedPoint::Infinity) => {
                Ok(ExtendedPoint::Finite(center.clone()))
            }
            (Sphere::Plane { .. }, ExtendedPoint::Infinity) => Ok(ExtendedPoint::Infinity),
            (Sphere::Round { center, radius }, ExtendedPoint::Finite(p)) => {
                self.check_dim(p)?;
                let d = p - center;
                let dist2 = d.norm_squared();
                if dist2 == 0.0 {
                    return Ok(ExtendedPoint::Infinity);
                }
                let image = center + d * (radius * radius / dist2);
                if image.iter().all(|c| c.is_finite()) {
                    Ok(ExtendedPoint::Finite(image))
                } else {
                    Ok(ExtendedPoint::Infinity)
                }
            }
            (Sphere::Plane { normal, offset }, ExtendedPoint::Finite(p)) => {
                self.check_dim(p)?;
                let s = normal.dot(p) - offset;
                Ok(ExtendedPoint::Finite(p - normal * (2.0 * s)))
            }
        }
    }

    /// Reflection of a finite point that is known not to hit the center.
    pub fn invert_vector(&self, p: &Vector) -> Result<ExtendedPoint, GeometryError> {
        self.invert(&ExtendedPoint::Finite(p.clone()))
    }

    /// Signed offset of `x` from the sphere: `|x − c| − ρ` for round spheres,
    /// `normal·x − offset` for planes. Zero on the sphere.
    pub fn signed_offset(&self, x: &Vector) -> f64 {
        match self {
            Sphere::Round { center, radius } => (x - center).norm() - radius,
            Sphere::Plane { normal, offset } => normal.dot(x) - offset,
        }
    }

    /// Image of `target` under reflection in this sphere.
    pub fn image_of(&self, target: &Sphere) -> Result<Sphere, GeometryError> {
        if target.dim() != self.dim() {
            return Err(GeometryError::DimensionMismatch {
                expected: self.dim(),
                found: target.dim(),
            });
        }
        match (self, target) {
            (
                Sphere::Round { center: c, radius: rho },
                Sphere::Round { center: a, radius: r },
            ) => {
                let d = a - c;
                let dist = d.norm();
                let rho2 = rho * rho;
                if (dist - r).abs() <= tolerance::THROUGH_CENTER * r.max(1.0) {
                    // target passes through the mirror center
                    let n = &d / dist;
                    let offset = n.dot(c) + rho2 / (2.0 * dist);
                    return Sphere::plane(n, offset);
                }
                let denom = dist * dist - r * r;
                let center = c + d * (rho2 / denom);
                Sphere::round(center, rho2 * r / denom.abs())
            }
            (Sphere::Round { center: c, radius: rho }, Sphere::Plane { normal, offset }) => {
                let delta = offset - normal.dot(c);
                if delta.abs() <= tolerance::THROUGH_CENTER * rho.max(1.0) {
                    return Ok(target.clone());
                }
                let rho2 = rho * rho;
                let center = c + normal * (rho2 / (2.0 * delta));
                Sphere::round(center, rho2 / (2.0 * delta.abs()))
            }
            (Sphere::Plane { .. }, Sphere::Round { center, radius }) => {
                let image = self.invert_vector(center)?;
                let center = image.into_finite().expect("plane reflection of a finite point");
                Sphere::round(center, *radius)
            }
            (Sphere::Plane { normal: m, .. }, Sphere::Plane { normal, offset }) => {
                let foot = normal * *offset;
                let foot_image = self
                    .invert_vector(&foot)?
                    .into_finite()
                    .expect("plane reflection of a finite point");
                let n = normal - m * (2.0 * m.dot(normal));
                let n = &n / n.norm();
                let offset = n.dot(&foot_image);
                Sphere::plane(n, offset)
            }
        }
    }

    /// `m` points on a round sphere, spread along [`unit_directions`].
    /// Hyperplanes yield points on a unit disk around the foot of the normal.
    pub fn sample_points(&self, m: usize) -> Vec<Vector> {
        match self {
            Sphere::Round { center, radius } => unit_directions(self.dim(), m)
                .into_iter()
                .map(|w| center + w * *radius)
                .collect(),
            Sphere::Plane { normal, offset } => {
                let n = self.dim();
                let foot = normal * *offset;
                let dirs = unit_directions(n, m);
                dirs.into_iter()
                    .map(|w| {
                        let tangent = &w - normal * normal.dot(&w);
                        &foot + tangent
                    })
                    .collect()
            }
        }
    }
}

/// Which open region of a sphere a [`Ball`] designates. For a hyperplane
/// `{normal·x = offset}`, `Interior` is the half-space `normal·x < offset`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Interior,
    Exterior,
}

/// Open ball of `R^n ∪ {∞}`: one side of a sphere.
#[derive(Debug, Clone, PartialEq)]
pub struct Ball {
    pub sphere: Sphere,
    pub side: Side,
}

impl Ball {
    pub fn new(sphere: Sphere, side: Side) -> Self {
        Ball { sphere, side }
    }

    /// Bounded open ball `B(center, radius)`.
    pub fn interior(center: Vector, radius: f64) -> Result<Self, GeometryError> {
        Ok(Ball::new(Sphere::round(center, radius)?, Side::Interior))
    }

    pub fn dim(&self) -> usize {
        self.sphere.dim()
    }

    /// Center and radius when the ball is a bounded round ball.
    pub fn bounded(&self) -> Option<(&Vector, f64)> {
        match (&self.sphere, self.side) {
            (Sphere::Round { center, radius }, Side::Interior) => Some((center, *radius)),
            _ => None,
        }
    }

    /// Open-ball membership. Points within the boundary tolerance of the
    /// sphere are outside.
    pub fn contains(&self, x: &ExtendedPoint) -> bool {
        match x {
            ExtendedPoint::Infinity => {
                matches!((&self.sphere, self.side), (Sphere::Round { .. }, Side::Exterior))
            }
            ExtendedPoint::Finite(p) => self.contains_vector(p),
        }
    }

    pub fn contains_vector(&self, p: &Vector) -> bool {
        let s = self.sphere.signed_offset(p);
        match self.side {
            Side::Interior => s < -tolerance::BOUNDARY,
            Side::Exterior => s > tolerance::BOUNDARY,
        }
    }

    /// A point strictly inside the ball that differs from `avoid`.
    fn witness(&self, avoid: Option<&Vector>) -> ExtendedPoint {
        let n = self.dim();
        let mut e1 = Vector::zeros(n);
        e1[0] = 1.0;
        let candidates: Vec<ExtendedPoint> = match (&self.sphere, self.side) {
            (Sphere::Round { center, radius }, Side::Interior) => vec![
                ExtendedPoint::Finite(center.clone()),
                ExtendedPoint::Finite(center + &e1 * (0.5 * radius)),
            ],
            (Sphere::Round { center, radius }, Side::Exterior) => vec![
                ExtendedPoint::Infinity,
                ExtendedPoint::Finite(center + &e1 * (2.0 * radius)),
                ExtendedPoint::Finite(center + &e1 * (3.0 * radius)),
            ],
            (Sphere::Plane { normal, offset }, side) => {
                let sign = if side == Side::Interior { -1.0 } else { 1.0 };
                vec![
                    ExtendedPoint::Finite(normal * (offset + sign)),
                    ExtendedPoint::Finite(normal * (offset + 2.0 * sign)),
                ]
            }
        };
        candidates
            .into_iter()
            .find(|c| match (c, avoid) {
                (ExtendedPoint::Finite(p), Some(a)) => p != a,
                _ => true,
            })
            .expect("at least one witness differs from the avoided point")
    }

    /// Image of the ball under reflection in `mirror`.
    pub fn image_under(&self, mirror: &Sphere) -> Result<Ball, GeometryError> {
        let sphere = mirror.image_of(&self.sphere)?;
        let witness = self.witness(mirror.center());
        let image = mirror.invert(&witness)?;
        let side = match (&sphere, &image) {
            (Sphere::Round { .. }, ExtendedPoint::Infinity) => Side::Exterior,
            (Sphere::Round { center, radius }, ExtendedPoint::Finite(p)) => {
                if (p - center).norm() < *radius {
                    Side::Interior
                } else {
                    Side::Exterior
                }
            }
            (Sphere::Plane { normal, offset }, ExtendedPoint::Finite(p)) => {
                if normal.dot(p) < *offset {
                    Side::Interior
                } else {
                    Side::Exterior
                }
            }
            (Sphere::Plane { .. }, ExtendedPoint::Infinity) => {
                unreachable!("witness never maps onto a sphere through infinity")
            }
        };
        Ok(Ball { sphere, side })
    }
}

/// Reflection of `x` in `s`.
pub fn invert(s: &Sphere, x: &ExtendedPoint) -> Result<ExtendedPoint, GeometryError> {
    s.invert(x)
}

/// Image of `target` under reflection in `mirror`.
pub fn image_of_sphere(mirror: &Sphere, target: &Sphere) -> Result<Sphere, GeometryError> {
    mirror.image_of(target)
}

/// Chordal distance on `R^n ∪ {∞}`:
/// `2|x − y| / (√(1+|x|²) √(1+|y|²))`, with its exact limit at `∞`.
pub fn chordal_distance(x: &ExtendedPoint, y: &ExtendedPoint) -> f64 {
    match (x, y) {
        (ExtendedPoint::Infinity, ExtendedPoint::Infinity) => 0.0,
        (ExtendedPoint::Finite(p), ExtendedPoint::Infinity)
        | (ExtendedPoint::Infinity, ExtendedPoint::Finite(p)) => 2.0 / (1.0 + p.norm_squared()).sqrt(),
        (ExtendedPoint::Finite(p), ExtendedPoint::Finite(q)) => {
            2.0 * (p - q).norm()
                / ((1.0 + p.norm_squared()).sqrt() * (1.0 + q.norm_squared()).sqrt())
        }
    }
}

/// Evaluates `γ_{i₁} ∘ … ∘ γ_{i_k}(x)`: the last mirror acts first.
pub fn apply_word<'a, I>(mirrors: I, x: &ExtendedPoint) -> Result<ExtendedPoint, GeometryError>
where
    I: IntoIterator<Item = &'a Sphere>,
    I::IntoIter: DoubleEndedIterator,
{
    let mut y = x.clone();
    for s in mirrors.into_iter().rev() {
        y = s.invert(&y)?;
    }
    Ok(y)
}

/// Image of a ball under the Möbius map `γ_{i₁} ∘ … ∘ γ_{i_k}`.
pub fn apply_word_to_ball<'a, I>(mirrors: I, ball: &Ball) -> Result<Ball, GeometryError>
where
    I: IntoIterator<Item = &'a Sphere>,
    I::IntoIter: DoubleEndedIterator,
{
    let mut b = ball.clone();
    for s in mirrors.into_iter().rev() {
        b = b.image_under(s)?;
    }
    Ok(b)
}

/// Singular values and dilatation of a square linear map.
#[derive(Debug, Clone, Serialize)]
pub struct LinearMapSummary {
    #[serde(skip)]
    pub matrix: DMatrix<f64>,
    /// Sorted in decreasing order.
    pub singular_values: Vec<f64>,
    /// `σ_1 / σ_n`, or `None` when the map is degenerate.
    pub dilatation: Option<f64>,
    pub degenerate: bool,
    pub conformal: bool,
    /// The factor `λ` of `λT` when the map is conformal.
    pub scale: Option<f64>,
}

/// `K_L = max_{|x|=1}|Lx| / min_{|y|=1}|Ly|` from the singular values.
pub fn linear_dilatation(matrix: &DMatrix<f64>) -> Result<LinearMapSummary, GeometryError> {
    let (rows, cols) = matrix.shape();
    if rows != cols || rows == 0 {
        return Err(GeometryError::NotSquare { rows, cols });
    }
    if !matrix.iter().all(|v| v.is_finite()) {
        return Err(GeometryError::NonFinite);
    }
    let mut sv: Vec<f64> = matrix.clone().svd(false, false).singular_values.iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    let top = sv[0];
    let bottom = *sv.last().unwrap();
    let degenerate = top == 0.0 || bottom <= top * 1e-15;
    let dilatation = if degenerate { None } else { Some(top / bottom) };
    let conformal = dilatation.is_some_and(|k| k <= 1.0 + tolerance::CONFORMAL);
    Ok(LinearMapSummary {
        matrix: matrix.clone(),
        singular_values: sv,
        dilatation,
        degenerate,
        conformal,
        scale: conformal.then_some(top),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn v(xs: &[f64]) -> Vector {
        Vector::from_column_slice(xs)
    }

    fn p(xs: &[f64]) -> ExtendedPoint {
        ExtendedPoint::from_slice(xs)
    }

    #[test]
    fn invert_unit_circle() {
        let s = Sphere::round(v(&[0.0, 0.0]), 1.0).unwrap();
        assert_eq!(s.invert(&p(&[2.0, 0.0])).unwrap(), p(&[0.5, 0.0]));
    }

    #[test]
    fn invert_offset_sphere() {
        let s = Sphere::round(v(&[1.0, 0.0]), 2.0).unwrap();
        assert_eq!(s.invert(&p(&[2.0, 0.0])).unwrap(), p(&[5.0, 0.0]));
    }

    #[test]
    fn center_and_infinity_swap() {
        let s = Sphere::round(v(&[1.0, -2.0]), 0.5).unwrap();
        assert!(s.invert(&p(&[1.0, -2.0])).unwrap().is_infinity());
        assert_eq!(s.invert(&ExtendedPoint::Infinity).unwrap(), p(&[1.0, -2.0]));
    }

    #[test]
    fn plane_fixes_infinity() {
        let s = Sphere::plane(v(&[1.0, 0.0]), 2.0).unwrap();
        assert!(s.invert(&ExtendedPoint::Infinity).unwrap().is_infinity());
        assert_eq!(s.invert(&p(&[0.0, 1.0])).unwrap(), p(&[4.0, 1.0]));
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let s = Sphere::round(v(&[0.0, 0.0]), 1.0).unwrap();
        assert!(matches!(
            s.invert(&p(&[1.0, 2.0, 3.0])),
            Err(GeometryError::DimensionMismatch { expected: 2, found: 3 })
        ));
    }

    #[test]
    fn bad_spheres_rejected() {
        assert!(Sphere::round(v(&[0.0]), 0.0).is_err());
        assert!(Sphere::round(v(&[0.0]), -1.0).is_err());
        assert!(Sphere::plane(v(&[1.0, 1.0]), 0.0).is_err());
    }

    #[test]
    fn image_of_disjoint_circle() {
        let mirror = Sphere::round(v(&[0.0, 0.0]), 1.0).unwrap();
        let target = Sphere::round(v(&[3.0, 0.0]), 1.0).unwrap();
        let img = mirror.image_of(&target).unwrap();
        assert_relative_eq!(img.center().unwrap()[0], 0.375, epsilon = 1e-15);
        assert_relative_eq!(img.center().unwrap()[1], 0.0);
        assert_relative_eq!(img.radius().unwrap(), 0.125, epsilon = 1e-15);
    }

    #[test]
    fn mirror_fixes_itself() {
        let s = Sphere::round(v(&[0.3, -0.7]), 1.3).unwrap();
        let img = s.image_of(&s).unwrap();
        assert_relative_eq!(img.radius().unwrap(), 1.3, epsilon = 1e-12);
        assert_relative_eq!((img.center().unwrap() - v(&[0.3, -0.7])).norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn image_of_plane_is_circle_through_center() {
        let mirror = Sphere::round(v(&[0.0, 0.0]), 1.0).unwrap();
        let plane = Sphere::plane(v(&[1.0, 0.0]), 2.0).unwrap();
        let img = mirror.image_of(&plane).unwrap();
        assert_relative_eq!(img.radius().unwrap(), 0.25);
        assert_relative_eq!(img.center().unwrap()[0], 0.25);
    }

    #[test]
    fn sphere_through_center_maps_to_plane() {
        let mirror = Sphere::round(v(&[0.0, 0.0]), 2.0).unwrap();
        let target = Sphere::round(v(&[1.0, 0.0]), 1.0).unwrap();
        match mirror.image_of(&target).unwrap() {
            Sphere::Plane { normal, offset } => {
                assert_relative_eq!(normal[0], 1.0);
                // (2,0) maps to (2,0): the plane is x = 2
                assert_relative_eq!(offset, 2.0);
            }
            other => panic!("expected plane, got {other:?}"),
        }
    }

    #[test]
    fn chordal_examples() {
        assert_eq!(chordal_distance(&p(&[0.0, 0.0]), &ExtendedPoint::Infinity), 2.0);
        assert_eq!(chordal_distance(&p(&[0.4, 0.1]), &p(&[0.4, 0.1])), 0.0);
        assert_relative_eq!(
            chordal_distance(&p(&[0.0, 0.0]), &p(&[1.0, 0.0])),
            2f64.sqrt(),
            epsilon = 1e-15
        );
    }

    #[test]
    fn empty_word_is_identity() {
        let x = p(&[0.2, 0.9]);
        assert_eq!(apply_word(&[] as &[Sphere], &x).unwrap(), x);
    }

    #[test]
    fn word_matches_sequential_inversion() {
        let s1 = Sphere::round(v(&[0.0, 0.0]), 0.2).unwrap();
        let s2 = Sphere::round(v(&[1.0, 0.0]), 0.2).unwrap();
        let x = p(&[0.4, 0.3]);
        let expected = s1.invert(&s2.invert(&x).unwrap()).unwrap();
        assert_eq!(apply_word([&s1, &s2], &x).unwrap(), expected);
    }

    #[test]
    fn ball_image_sides() {
        let mirror = Sphere::round(v(&[0.0, 0.0]), 1.0).unwrap();
        let outside = Ball::interior(v(&[3.0, 0.0]), 1.0).unwrap();
        assert_eq!(outside.image_under(&mirror).unwrap().side, Side::Interior);
        // a ball containing the mirror center maps to an exterior ball
        let around = Ball::interior(v(&[0.1, 0.0]), 0.5).unwrap();
        assert_eq!(around.image_under(&mirror).unwrap().side, Side::Exterior);
    }

    #[test]
    fn boundary_points_are_outside_open_ball() {
        let b = Ball::interior(v(&[0.0, 0.0]), 1.0).unwrap();
        assert!(!b.contains(&p(&[1.0, 0.0])));
        assert!(!b.contains(&p(&[1.0 - 1e-13, 0.0])));
        assert!(b.contains(&p(&[1.0 - 1e-9, 0.0])));
        assert!(!b.contains(&ExtendedPoint::Infinity));
    }

    #[test]
    fn dilatation_examples() {
        let d = linear_dilatation(&DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 1.0])).unwrap();
        assert_relative_eq!(d.dilatation.unwrap(), 2.0, epsilon = 1e-15);
        assert!(!d.conformal);

        let t = std::f64::consts::PI / 6.0;
        let rot = DMatrix::from_row_slice(2, 2, &[t.cos(), -t.sin(), t.sin(), t.cos()]) * 0.7;
        let d = linear_dilatation(&rot).unwrap();
        assert!(d.conformal);
        assert_relative_eq!(d.scale.unwrap(), 0.7, epsilon = 1e-12);

        let shear = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 0.0, 1.0]);
        let d = linear_dilatation(&shear).unwrap();
        // eigenvalues of MᵀM = [[1,1],[1,2]] are (3 ± √5)/2
        let lmax = (3.0 + 5f64.sqrt()) / 2.0;
        let lmin = (3.0 - 5f64.sqrt()) / 2.0;
        assert_relative_eq!(d.dilatation.unwrap(), (lmax / lmin).sqrt(), epsilon = 1e-12);
        assert_relative_eq!(d.dilatation.unwrap(), (3.0 + 5f64.sqrt()) / 2.0, epsilon = 1e-12);
    }

    #[test]
    fn degenerate_linear_map() {
        let d = linear_dilatation(&DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0])).unwrap();
        assert!(d.degenerate);
        assert!(d.dilatation.is_none());
        assert!(linear_dilatation(&DMatrix::zeros(2, 3)).is_err());
    }
}

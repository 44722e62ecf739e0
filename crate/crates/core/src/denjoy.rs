//! Denjoy-type constructions on the circle and the torus.
//!
//! - [`DenjoyCircle`]: a piecewise-affine circle homeomorphism obtained by
//!   blowing up the orbit `{kα}`, `|k| ≤ N`, of an irrational rotation into
//!   intervals, together with the collapse map `h` satisfying `h∘f = R_α∘h`.
//! - [`RoundDomainScene`]: disjoint round disks at the orbit points of a
//!   minimal translation of `T^n`, the candidate wandering domains.
//! - [`isometry_forcing_check`] and [`volume_obstruction`]: the two halves of
//!   the obstruction. A map permuting the domains conformally would have to
//!   carry every disk onto the next by one similarity, hence keep radii
//!   fixed, and infinitely many equal disks do not fit in finite volume.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::moebius::{Ball, Vector};
use crate::schottky::{SchottkyError, SchottkySet};
use crate::tolerance;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DenjoyError {
    #[error("{value} looks rational: |{q}·x − {p}| is below 1e-9")]
    Rational { value: f64, p: i64, q: u64 },
    #[error("inserted lengths must be non-negative and sum below 1, total {total}")]
    BadLengths { total: f64 },
    #[error("radius rule gives total volume {total} ≥ fundamental volume 1")]
    VolumeExceeded { total: f64 },
    #[error("radii must be positive and finite")]
    BadRadius,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("construction failed: {0}")]
    Construction(String),
    #[error(transparent)]
    Schottky(#[from] SchottkyError),
}

/// Largest denominator tested by the irrationality surrogate.
pub const MAX_DENOMINATOR: u64 = 1_000_000;

/// `|q x − p|` below this marks `x` as rational.
const RATIONAL_RESIDUAL: f64 = 1e-9;

/// A convergent `p/q` of `x` with `q ≤ 10^6` and `|q x − p| < 1e−9`, if one
/// exists.
pub fn rational_approximation(x: f64) -> Option<(i64, u64)> {
    let (mut h1, mut h2) = (1i64, 0i64);
    let (mut k1, mut k2) = (0u64, 1u64);
    let mut rest = x;
    loop {
        let a = rest.floor();
        if a.abs() > 1e15 {
            return None;
        }
        let h = a as i64 * h1 + h2;
        let k = a as u64 * k1 + k2;
        if k > MAX_DENOMINATOR {
            return None;
        }
        if (k as f64 * x - h as f64).abs() < RATIONAL_RESIDUAL {
            return Some((h, k));
        }
        let frac = rest - a;
        if frac <= 0.0 {
            return Some((h, k));
        }
        rest = 1.0 / frac;
        (h2, h1) = (h1, h);
        (k2, k1) = (k1, k);
    }
}

/// Irrationality surrogate: no convergent with denominator `≤ 10^6` matches.
pub fn is_irrational_surrogate(x: f64) -> bool {
    x.is_finite() && rational_approximation(x).is_none()
}

/// Quotient chart `ψ: R^n → T^n = R^n / Z^n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TorusChart {
    pub dim: usize,
}

impl TorusChart {
    pub fn new(dim: usize) -> Self {
        TorusChart { dim }
    }

    /// Representative in `[0, 1)^n`.
    pub fn project(&self, x: &[f64]) -> Vec<f64> {
        x.iter().map(|c| wrap_unit(*c)).collect()
    }

    /// Shortest displacement from `a` to `b` on the torus.
    pub fn displacement(&self, a: &[f64], b: &[f64]) -> Vec<f64> {
        a.iter()
            .zip(b)
            .map(|(x, y)| {
                let d = (y - x).rem_euclid(1.0);
                if d > 0.5 {
                    d - 1.0
                } else {
                    d
                }
            })
            .collect()
    }

    pub fn distance(&self, a: &[f64], b: &[f64]) -> f64 {
        self.displacement(a, b).iter().map(|d| d * d).sum::<f64>().sqrt()
    }
}

fn wrap_unit(x: f64) -> f64 {
    let r = x.rem_euclid(1.0);
    // rem_euclid can round up to exactly 1.0 for tiny negative inputs
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

/// A point of `R^n` split into an integer cell and a position in `[0, 1)^n`.
/// Integer translations only touch the cell, so `ψ` is exactly invariant.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Lift {
    pub cell: Vec<i64>,
    pub frac: Vec<f64>,
}

impl Lift {
    pub fn new(cell: Vec<i64>, frac: Vec<f64>) -> Self {
        assert_eq!(cell.len(), frac.len());
        let mut lift = Lift { cell, frac: vec![0.0; 0] };
        let mut fr = Vec::with_capacity(frac.len());
        for (c, f) in lift.cell.iter_mut().zip(frac) {
            let fl = f.floor();
            *c += fl as i64;
            fr.push(wrap_unit(f - fl));
        }
        lift.frac = fr;
        lift
    }

    pub fn from_real(x: &[f64]) -> Self {
        Lift::new(vec![0; x.len()], x.to_vec())
    }

    pub fn translate(&self, m: &[i64]) -> Lift {
        Lift { cell: self.cell.iter().zip(m).map(|(c, d)| c + d).collect(), frac: self.frac.clone() }
    }

    /// `ψ` of the lift.
    pub fn project(&self) -> &[f64] {
        &self.frac
    }

    pub fn to_real(&self) -> Vec<f64> {
        self.cell.iter().zip(&self.frac).map(|(c, f)| *c as f64 + f).collect()
    }
}

/// Torus translation by `ρ` that passes the minimality surrogate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MinimalTranslation {
    rho: Vec<f64>,
}

impl MinimalTranslation {
    /// Checks every coordinate and every pairwise coordinate ratio against
    /// rational approximations with denominators up to `10^6`.
    pub fn new(rho: Vec<f64>) -> Result<Self, DenjoyError> {
        for &r in &rho {
            if let Some((p, q)) = rational_approximation(r) {
                return Err(DenjoyError::Rational { value: r, p, q });
            }
        }
        for i in 0..rho.len() {
            for j in i + 1..rho.len() {
                let ratio = rho[i] / rho[j];
                if let Some((p, q)) = rational_approximation(ratio) {
                    return Err(DenjoyError::Rational { value: ratio, p, q });
                }
            }
        }
        Ok(MinimalTranslation { rho: rho.iter().map(|r| wrap_unit(*r)).collect() })
    }

    pub fn vector(&self) -> &[f64] {
        &self.rho
    }

    pub fn dim(&self) -> usize {
        self.rho.len()
    }
}

/// Lengths `ℓ_k`, `k ∈ [−N, N]`, of the intervals inserted at `{kα}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case", deny_unknown_fields)]
pub enum WeightRule {
    /// `ℓ_k = scale · 2^{−|k|}`.
    Geometric { scale: f64 },
    /// `ℓ_k = scale · (|k| + 2)^{−2}`.
    InverseSquare { scale: f64 },
    /// No insertion: `f` is the rotation itself.
    Zero,
    /// Explicit lengths indexed by `k + N`.
    Explicit { lengths: Vec<f64> },
}

impl WeightRule {
    pub fn lengths(&self, n: usize) -> Result<Vec<f64>, DenjoyError> {
        let ks = -(n as i64)..=n as i64;
        let lengths: Vec<f64> = match self {
            WeightRule::Geometric { scale } => ks.map(|k| scale * 0.5f64.powi(k.unsigned_abs() as i32)).collect(),
            WeightRule::InverseSquare { scale } => {
                ks.map(|k| scale / ((k.unsigned_abs() + 2) as f64).powi(2)).collect()
            }
            WeightRule::Zero => vec![0.0; 2 * n + 1],
            WeightRule::Explicit { lengths } => {
                if lengths.len() != 2 * n + 1 {
                    return Err(DenjoyError::Dimension(format!(
                        "expected {} lengths, got {}",
                        2 * n + 1,
                        lengths.len()
                    )));
                }
                lengths.clone()
            }
        };
        let total: f64 = lengths.iter().sum();
        let all_zero = lengths.iter().all(|&l| l == 0.0);
        let all_positive = lengths.iter().all(|&l| l > 0.0 && l.is_finite());
        if !(all_zero || all_positive) || !(total < 1.0) {
            return Err(DenjoyError::BadLengths { total });
        }
        Ok(lengths)
    }
}

/// Arc `[start, start + length)` of the circle `R/Z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Arc {
    pub start: f64,
    pub length: f64,
}

impl Arc {
    pub fn contains(&self, y: f64) -> bool {
        (y - self.start).rem_euclid(1.0) < self.length
    }

    /// Whether the open arcs overlap.
    pub fn overlaps(&self, other: &Arc) -> bool {
        let ahead = (other.start - self.start).rem_euclid(1.0);
        let behind = (self.start - other.start).rem_euclid(1.0);
        (ahead < self.length && other.length > 0.0) || (behind < other.length && self.length > 0.0)
    }
}

/// Distance on `R/Z`.
pub fn circle_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(1.0);
    d.min(1.0 - d)
}

/// A Denjoy-type circle homeomorphism with its semiconjugacy to `R_α`.
///
/// The circle is re-parametrised so that the base point `θ` sits at
/// `Φ(θ) = (1 − L)θ + Σ_{θ_j < θ} ℓ_j`, with `θ_j = {jα}` and `L = Σ ℓ_j`.
/// `f` maps `I_k` affinely onto `I_{k+1}` for `k < N` and follows `R_α`
/// across the gaps. `I_N` has no successor; it is mapped affinely into the
/// gap at `Φ({(N+1)α})`, and the gap containing `Φ({(−N−1)α})` is stretched
/// over `I_{−N}`. Those arcs are the truncation artifacts.
#[derive(Debug, Clone, Serialize)]
pub struct DenjoyCircle {
    pub alpha: f64,
    pub n: usize,
    /// `ℓ_k` indexed by `k + N`.
    pub lengths: Vec<f64>,
    /// `1 − L`: the share of the circle left to the base rotation.
    pub normalization: f64,
    /// `I_k` indexed by `k + N`.
    pub intervals: Vec<Arc>,
    /// Sorted domain breakpoints in `[0, 1)`.
    pub breakpoints: Vec<f64>,
    /// Monotone lifted images of the breakpoints, with the closing value
    /// `images[0] + 1` appended.
    pub images: Vec<f64>,
    pub artifacts: Vec<Arc>,
    /// Orbit angles `{kα}` indexed by `k + N`.
    thetas: Vec<f64>,
    /// Indices `k + N` sorted by angle.
    order: Vec<usize>,
}

impl DenjoyCircle {
    pub fn build(alpha: f64, weights: &WeightRule, n: usize) -> Result<Self, DenjoyError> {
        if let Some((p, q)) = rational_approximation(alpha) {
            return Err(DenjoyError::Rational { value: alpha, p, q });
        }
        let alpha = wrap_unit(alpha);
        let lengths = weights.lengths(n)?;
        let total: f64 = lengths.iter().sum();
        let norm = 1.0 - total;
        let count = 2 * n + 1;
        let thetas: Vec<f64> = (0..count).map(|i| wrap_unit((i as i64 - n as i64) as f64 * alpha)).collect();
        let mut order: Vec<usize> = (0..count).collect();
        order.sort_by(|&a, &b| thetas[a].total_cmp(&thetas[b]));

        let mut circle = DenjoyCircle {
            alpha,
            n,
            lengths,
            normalization: norm,
            intervals: Vec::new(),
            breakpoints: Vec::new(),
            images: Vec::new(),
            artifacts: Vec::new(),
            thetas,
            order,
        };
        if total == 0.0 {
            return Ok(circle);
        }

        let mut starts = vec![0.0; count];
        let mut before = 0.0;
        for &i in &circle.order {
            starts[i] = norm * circle.thetas[i] + before;
            before += circle.lengths[i];
        }
        circle.intervals = (0..count).map(|i| Arc { start: starts[i], length: circle.lengths[i] }).collect();

        // slot for the image of I_N
        let landing = circle.position(wrap_unit((n as f64 + 1.0) * alpha));
        let clearance = circle
            .intervals
            .iter()
            .flat_map(|a| [a.start, a.start + a.length])
            .map(|e| circle_distance(e, landing))
            .fold(f64::INFINITY, f64::min);
        let patch = circle.lengths[2 * n].min(clearance);

        let mut domain = Vec::with_capacity(2 * count);
        let mut target = Vec::with_capacity(2 * count);
        for &i in &circle.order {
            let iv = circle.intervals[i];
            domain.push(iv.start);
            domain.push(iv.start + iv.length);
            if i + 1 < count {
                let next = circle.intervals[i + 1];
                target.push(next.start);
                target.push(next.start + next.length);
            } else {
                target.push(landing - patch / 2.0);
                target.push(landing + patch / 2.0);
            }
        }
        let mut images = Vec::with_capacity(target.len() + 1);
        for t in target {
            let mut t = t;
            if let Some(&prev) = images.last() {
                while t < prev {
                    t += 1.0;
                }
            }
            images.push(t);
        }
        images.push(images[0] + 1.0);
        for w in images.windows(2) {
            if !(w[1] > w[0]) {
                return Err(DenjoyError::Construction("breakpoint images are not increasing".into()));
            }
        }
        for w in domain.windows(2) {
            if !(w[1] > w[0]) {
                return Err(DenjoyError::Construction("inserted intervals overlap".into()));
            }
        }
        circle.breakpoints = domain;
        circle.images = images;

        // truncation artifacts: I_N, its two neighbouring gaps, and the gap
        // stretched over I_{-N}
        let last = circle.intervals[2 * n];
        let mut artifacts = vec![last];
        let stray = circle.position(wrap_unit(-(n as f64 + 1.0) * alpha));
        let gaps = circle.gaps();
        for g in &gaps {
            let touches_last = circle_distance(g.start + g.length, last.start) < 1e-15
                || circle_distance(g.start, last.start + last.length) < 1e-15;
            if touches_last || g.contains(stray) {
                artifacts.push(*g);
            }
        }
        circle.artifacts = artifacts;
        Ok(circle)
    }

    /// `Φ(θ)` for a base angle that is not an inserted orbit point.
    fn position(&self, theta: f64) -> f64 {
        let before: f64 = self
            .thetas
            .iter()
            .zip(&self.lengths)
            .filter(|(t, _)| **t < theta)
            .map(|(_, l)| l)
            .sum();
        self.normalization * theta + before
    }

    /// Complementary gaps between consecutive intervals, in circle order.
    pub fn gaps(&self) -> Vec<Arc> {
        let m = self.order.len();
        (0..m)
            .map(|s| {
                let a = self.intervals[self.order[s]];
                let b = self.intervals[self.order[(s + 1) % m]];
                let start = a.start + a.length;
                Arc { start, length: (b.start - start).rem_euclid(1.0) }
            })
            .collect()
    }

    pub fn is_rotation(&self) -> bool {
        self.breakpoints.is_empty()
    }

    /// `I_k` for `k ∈ [−N, N]`.
    pub fn interval(&self, k: i64) -> Arc {
        self.intervals[(k + self.n as i64) as usize]
    }

    /// The homeomorphism `f`.
    pub fn apply(&self, y: f64) -> f64 {
        if self.is_rotation() {
            return wrap_unit(y + self.alpha);
        }
        let d0 = self.breakpoints[0];
        let y = if y < d0 { y + 1.0 } else { y };
        let seg = self.breakpoints.partition_point(|&d| d <= y).saturating_sub(1);
        let (d_lo, d_hi) = (
            self.breakpoints[seg],
            if seg + 1 < self.breakpoints.len() { self.breakpoints[seg + 1] } else { d0 + 1.0 },
        );
        let (t_lo, t_hi) = (self.images[seg], self.images[seg + 1]);
        wrap_unit(t_lo + (y - d_lo) * (t_hi - t_lo) / (d_hi - d_lo))
    }

    /// The collapse map `h`: constant `{kα}` on `I_k`, affine with slope
    /// `1/(1 − L)` elsewhere.
    pub fn collapse(&self, y: f64) -> f64 {
        if self.is_rotation() {
            return y;
        }
        let y = wrap_unit(y);
        let mut before = 0.0;
        for &i in &self.order {
            let iv = self.intervals[i];
            if y < iv.start {
                break;
            }
            if y <= iv.start + iv.length {
                return self.thetas[i];
            }
            before += iv.length;
        }
        wrap_unit((y - before) / self.normalization)
    }

    /// `R_α`.
    pub fn rotate(&self, theta: f64) -> f64 {
        wrap_unit(theta + self.alpha)
    }

    pub fn in_artifact(&self, y: f64) -> bool {
        self.artifacts.iter().any(|a| a.contains(y))
    }

    /// Replaces the image of breakpoint `index` by `image + shift`. Used as
    /// a negative control for the semiconjugacy check.
    pub fn with_corrupted_breakpoint(&self, index: usize, shift: f64) -> Result<Self, DenjoyError> {
        let mut out = self.clone();
        out.images[index] += shift;
        if index == 0 {
            let last = out.images.len() - 1;
            out.images[last] += shift;
        }
        if out.images.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(DenjoyError::Construction("corruption breaks monotonicity".into()));
        }
        Ok(out)
    }

    /// Whether `f^m(I_0)` avoids `I_0` for `1 ≤ m ≤ max_m`; returns the first
    /// return time otherwise.
    pub fn wandering_check(&self, max_m: usize) -> Result<(), usize> {
        if self.is_rotation() {
            return Ok(());
        }
        let home = self.interval(0);
        let (mut a, mut b) = (home.start, home.start + home.length);
        for m in 1..=max_m {
            a = self.apply(a);
            b = self.apply(b);
            let arc = Arc { start: a, length: (b - a).rem_euclid(1.0) };
            if arc.overlaps(&home) {
                return Err(m);
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DefectReport {
    pub grid: usize,
    /// `max circle-distance(h(f(y)), h(y) + α)` off the truncation artifacts.
    pub max_defect: f64,
    /// The same maximum including artifact arcs.
    pub max_defect_all: f64,
    pub artifact_samples: usize,
}

/// Semiconjugacy defect of `dc` on the grid `y_i = i / grid`.
pub fn semiconjugacy_defect(dc: &DenjoyCircle, grid: usize) -> DefectReport {
    let mut report = DefectReport { grid, max_defect: 0.0, max_defect_all: 0.0, artifact_samples: 0 };
    for i in 0..grid {
        let y = i as f64 / grid as f64;
        let d = circle_distance(dc.collapse(dc.apply(y)), dc.rotate(dc.collapse(y)));
        report.max_defect_all = report.max_defect_all.max(d);
        if dc.in_artifact(y) {
            report.artifact_samples += 1;
        } else {
            report.max_defect = report.max_defect.max(d);
        }
    }
    report
}

/// Disk radii `r_k`, `k ∈ [−N, N]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case", deny_unknown_fields)]
pub enum RadiusRule {
    /// `r_k = radius`.
    Constant { radius: f64 },
    /// `r_k = scale / (k + N + 1)`, decreasing along the orbit.
    Harmonic { scale: f64 },
    /// `r_k = base · ratio^{k + N}`.
    Geometric { base: f64, ratio: f64 },
    /// Explicit radii indexed by `k + N`.
    Explicit { radii: Vec<f64> },
}

impl RadiusRule {
    pub fn radii(&self, n: usize) -> Result<Vec<f64>, DenjoyError> {
        let ks = -(n as i64)..=n as i64;
        let radii: Vec<f64> = match self {
            RadiusRule::Constant { radius } => vec![*radius; 2 * n + 1],
            RadiusRule::Harmonic { scale } => ks.map(|k| scale / ((k + n as i64) as f64 + 1.0)).collect(),
            RadiusRule::Geometric { base, ratio } => ks.map(|k| base * ratio.powi((k + n as i64) as i32)).collect(),
            RadiusRule::Explicit { radii } => {
                if radii.len() != 2 * n + 1 {
                    return Err(DenjoyError::Dimension(format!("expected {} radii, got {}", 2 * n + 1, radii.len())));
                }
                radii.clone()
            }
        };
        if radii.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
            return Err(DenjoyError::BadRadius);
        }
        Ok(radii)
    }
}

/// Volume `ω_n` of the unit ball in `R^n`.
pub fn unit_ball_volume(n: usize) -> f64 {
    match n {
        0 => 1.0,
        1 => 2.0,
        _ => 2.0 * PI / n as f64 * unit_ball_volume(n - 2),
    }
}

/// Minimum gap between closed disks after shrinking.
pub const SCENE_GAP: f64 = 1e-6;

/// Factor applied to both radii of an intersecting pair.
pub const SHRINK_FACTOR: f64 = 0.9;

const MAX_SWEEPS: usize = 100_000;

/// Round disks at the orbit points `ψ(p₀ + kρ)`, `k ∈ [−N, N]`.
#[derive(Debug, Clone, Serialize)]
pub struct RoundDomainScene {
    pub rho: Vec<f64>,
    pub base: Lift,
    pub n: usize,
    /// Lifted centers `p₀ + kρ`, indexed by `k + N`.
    pub centers: Vec<Lift>,
    pub radii: Vec<f64>,
    pub shrink_count: usize,
    pub total_volume: f64,
    pub min_gap: f64,
}

/// Places the disks and shrinks intersecting pairs by 0.9 in sweeps over
/// `k = −N…N` until all closed disks are `1e−6` apart on the torus.
pub fn build_round_scene(
    translation: &MinimalTranslation,
    base: &Lift,
    n: usize,
    rule: &RadiusRule,
) -> Result<RoundDomainScene, DenjoyError> {
    let dim = translation.dim();
    if base.frac.len() != dim {
        return Err(DenjoyError::Dimension(format!("base point has {} coordinates, expected {dim}", base.frac.len())));
    }
    let mut radii = rule.radii(n)?;
    let omega = unit_ball_volume(dim);
    let total: f64 = radii.iter().map(|r| omega * r.powi(dim as i32)).sum();
    if total >= 1.0 {
        return Err(DenjoyError::VolumeExceeded { total });
    }
    let rho = translation.vector();
    let centers: Vec<Lift> = (-(n as i64)..=n as i64)
        .map(|k| {
            let frac: Vec<f64> = base.frac.iter().zip(rho).map(|(f, r)| f + k as f64 * r).collect();
            Lift::new(base.cell.clone(), frac)
        })
        .collect();
    let chart = TorusChart::new(dim);
    let count = centers.len();
    let mut shrink_count = 0;
    for sweep in 0.. {
        if sweep == MAX_SWEEPS {
            return Err(DenjoyError::Construction("shrinking did not terminate".into()));
        }
        let mut changed = false;
        for j in 0..count {
            if 2.0 * radii[j] + SCENE_GAP > 1.0 {
                radii[j] *= SHRINK_FACTOR;
                shrink_count += 1;
                changed = true;
            }
            for k in j + 1..count {
                let d = chart.distance(centers[j].project(), centers[k].project());
                if d < radii[j] + radii[k] + SCENE_GAP {
                    radii[j] *= SHRINK_FACTOR;
                    radii[k] *= SHRINK_FACTOR;
                    shrink_count += 1;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    let mut min_gap = f64::INFINITY;
    for j in 0..count {
        for k in j + 1..count {
            let d = chart.distance(centers[j].project(), centers[k].project());
            min_gap = min_gap.min(d - radii[j] - radii[k]);
        }
    }
    let total_volume = radii.iter().map(|r| omega * r.powi(dim as i32)).sum();
    Ok(RoundDomainScene {
        rho: rho.to_vec(),
        base: base.clone(),
        n,
        centers,
        radii,
        shrink_count,
        total_volume,
        min_gap,
    })
}

impl RoundDomainScene {
    pub fn dim(&self) -> usize {
        self.rho.len()
    }

    /// Centers `p₀ + kρ` relative to the base cell.
    pub fn local_centers(&self) -> Vec<Vector> {
        self.centers
            .iter()
            .map(|c| {
                Vector::from_iterator(
                    self.dim(),
                    c.cell.iter().zip(&self.base.cell).zip(&c.frac).map(|((a, b), f)| (a - b) as f64 + f),
                )
            })
            .collect()
    }

    /// Orbit data `(center_k, r_k)` in orbit order.
    pub fn orbit_data(&self) -> OrbitData {
        OrbitData { centers: self.local_centers(), radii: self.radii.clone() }
    }

    /// Disks `D_k` and `D_m` for `m ≠ k` never meet (closed disks).
    pub fn is_wandering(&self) -> bool {
        self.min_gap >= SCENE_GAP * 0.5
    }

    /// Finite piece of the lift `R^n ∖ Λ̃`: every disk translated by the
    /// integer vectors in `[−copies, copies]^n`.
    pub fn lifted_set(&self, copies: i64) -> Result<SchottkySet, DenjoyError> {
        let dim = self.dim();
        let mut balls = Vec::new();
        let side = (2 * copies + 1) as usize;
        let total = side.pow(dim as u32);
        for (c, r) in self.centers.iter().zip(&self.radii) {
            for code in 0..total {
                let mut rest = code;
                let shift: Vec<f64> = (0..dim)
                    .map(|_| {
                        let s = (rest % side) as i64 - copies;
                        rest /= side;
                        s as f64
                    })
                    .collect();
                let center = Vector::from_iterator(dim, c.frac.iter().zip(&shift).map(|(f, s)| f + s));
                balls.push(Ball::interior(center, *r).map_err(SchottkyError::from)?);
            }
        }
        Ok(SchottkySet::new(dim, balls)?)
    }
}

/// Consecutive orbit disks `(c_k, r_k)`; the fit maps disk `k` to `k + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrbitData {
    pub centers: Vec<Vector>,
    pub radii: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ObstructionVerdict {
    /// One isometry carries every disk to the next.
    IsometryFits,
    /// A non-isometric similarity fits: radii follow exact geometric decay.
    SimilarityFits,
    /// No similarity fits the data, so no conformal map permutes the disks.
    TheoremWitness,
}

#[derive(Debug, Clone, Serialize)]
pub struct SimilarityFit {
    pub lambda: f64,
    #[serde(serialize_with = "serialize_matrix")]
    pub rotation: DMatrix<f64>,
    pub translation: Vec<f64>,
    /// Largest per-pair error `√(|λT c_k + a − c_{k+1}|² + (λ r_k − r_{k+1})²)`.
    pub residual: f64,
    pub rms: f64,
    pub verdict: ObstructionVerdict,
}

fn serialize_matrix<S: serde::Serializer>(m: &DMatrix<f64>, s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(m.nrows()))?;
    for r in 0..m.nrows() {
        let row: Vec<f64> = m.row(r).iter().copied().collect();
        seq.serialize_element(&row)?;
    }
    seq.end()
}

/// Residual at or below which a similarity fit counts as exact.
pub const SIMILARITY_FIT_TOLERANCE: f64 = tolerance::FIT;

/// Least-squares similarity `x ↦ λTx + a` (T orthogonal, reflections
/// allowed) with `r ↦ λr`, sending every disk to its successor.
pub fn isometry_forcing_check(data: &OrbitData) -> Result<SimilarityFit, DenjoyError> {
    let count = data.centers.len();
    if count != data.radii.len() {
        return Err(DenjoyError::Dimension("centers and radii differ in length".into()));
    }
    if count < 3 {
        return Err(DenjoyError::InsufficientData(format!("{count} disks; at least 3 are needed")));
    }
    let dim = data.centers[0].len();
    let pairs = count - 1;
    let xs = &data.centers[..pairs];
    let ys = &data.centers[1..];
    let x_mean = xs.iter().fold(Vector::zeros(dim), |a, x| a + x) / pairs as f64;
    let y_mean = ys.iter().fold(Vector::zeros(dim), |a, y| a + y) / pairs as f64;
    let mut cov = DMatrix::<f64>::zeros(dim, dim);
    let mut x_var = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        let dx = x - &x_mean;
        let dy = y - &y_mean;
        cov += &dy * dx.transpose();
        x_var += dx.norm_squared();
    }
    let svd = cov.svd(true, true);
    let u = svd.u.expect("requested U");
    let v_t = svd.v_t.expect("requested Vᵀ");
    let s = &svd.singular_values;
    let mut d = DMatrix::<f64>::identity(dim, dim);
    let smax = s.max();
    let rank_deficient = s.iter().any(|&x| x <= smax * 1e-12);
    if rank_deficient && (&u * &v_t).determinant() < 0.0 {
        // the null direction is free: prefer a proper rotation
        let weakest = s.imin();
        d[(weakest, weakest)] = -1.0;
    }
    let rotation = &u * &d * &v_t;
    let trace: f64 = (0..dim).map(|i| s[i] * d[(i, i)]).sum();
    let radius_cross: f64 = data.radii.windows(2).map(|w| w[0] * w[1]).sum();
    let radius_sq: f64 = data.radii[..pairs].iter().map(|r| r * r).sum();
    let lambda = ((trace + radius_cross) / (x_var + radius_sq)).max(0.0);
    let translation = &y_mean - &rotation * &x_mean * lambda;
    let mut residual = 0.0f64;
    let mut ss = 0.0;
    for k in 0..pairs {
        let e_c = (&rotation * &xs[k] * lambda + &translation - &ys[k]).norm_squared();
        let e_r = (lambda * data.radii[k] - data.radii[k + 1]).powi(2);
        residual = residual.max((e_c + e_r).sqrt());
        ss += e_c + e_r;
    }
    let verdict = if residual <= SIMILARITY_FIT_TOLERANCE {
        if (lambda - 1.0).abs() <= SIMILARITY_FIT_TOLERANCE {
            ObstructionVerdict::IsometryFits
        } else {
            ObstructionVerdict::SimilarityFits
        }
    } else {
        ObstructionVerdict::TheoremWitness
    };
    Ok(SimilarityFit {
        lambda,
        rotation,
        translation: translation.iter().copied().collect(),
        residual,
        rms: (ss / pairs as f64).sqrt(),
        verdict,
    })
}

/// Runs [`isometry_forcing_check`] on a scene; requires `N ≥ 2`.
pub fn scene_isometry_check(scene: &RoundDomainScene) -> Result<SimilarityFit, DenjoyError> {
    if scene.n < 2 {
        return Err(DenjoyError::InsufficientData(format!("orbit length N = {} < 2", scene.n)));
    }
    isometry_forcing_check(&scene.orbit_data())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum VolumeVerdict {
    Consistent,
    Contradiction,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VolumeReport {
    pub dim: usize,
    pub radius: f64,
    pub volume: f64,
    pub unit_ball_volume: f64,
    /// `floor(V / (ω_n rⁿ))`; `None` when unbounded (`r = 0`).
    pub n_max: Option<u64>,
    pub demanded: Option<u64>,
    pub verdict: Option<VolumeVerdict>,
}

/// Largest number of disjoint radius-`r` balls that fit in volume `V`,
/// and whether `demanded` of them would exceed it.
pub fn volume_obstruction(dim: usize, radius: f64, volume: f64, demanded: Option<u64>) -> VolumeReport {
    let omega = unit_ball_volume(dim);
    let ball = omega * radius.powi(dim as i32);
    let n_max = if ball > 0.0 {
        let q = (volume / ball).floor();
        (q < u64::MAX as f64).then_some(q as u64)
    } else {
        None
    };
    let verdict = demanded.map(|d| match n_max {
        Some(m) if d > m => VolumeVerdict::Contradiction,
        _ => VolumeVerdict::Consistent,
    });
    VolumeReport { dim, radius, volume, unit_ball_volume: omega, n_max, demanded, verdict }
}

/// Grid resolution per axis of the star-discrepancy estimate.
pub const DISCREPANCY_GRID: usize = 64;

/// Star-discrepancy estimate of `{kρ mod 1}`, `k = 1..=K`, over anchored
/// boxes `[0, b)` and `[0, b]` with corners on a `64^n` grid.
pub fn discrepancy(rho: &[f64], count: usize) -> f64 {
    assert!(count >= 1, "need at least one point");
    let dim = rho.len();
    let side = DISCREPANCY_GRID + 1;
    let cells = side.pow(dim as u32);
    let mut open = vec![0u64; cells];
    let mut closed = vec![0u64; cells];
    let g = DISCREPANCY_GRID as f64;
    for k in 1..=count {
        let mut oi = 0;
        let mut ci = 0;
        for r in rho {
            let x = wrap_unit(k as f64 * r) * g;
            // [0, j/g) holds x iff floor(x)+1 <= j; [0, j/g] iff ceil(x) <= j
            let o = (x.floor() as usize + 1).min(DISCREPANCY_GRID);
            let c = (x.ceil() as usize).min(DISCREPANCY_GRID);
            oi = oi * side + o;
            ci = ci * side + c;
        }
        open[oi] += 1;
        closed[ci] += 1;
    }
    prefix_sums(&mut open, dim, side);
    prefix_sums(&mut closed, dim, side);
    let mut worst = 0.0f64;
    for idx in 0..cells {
        let mut rest = idx;
        let mut vol = 1.0;
        for _ in 0..dim {
            vol *= (rest % side) as f64 / g;
            rest /= side;
        }
        let kf = count as f64;
        worst = worst.max((open[idx] as f64 / kf - vol).abs());
        worst = worst.max((closed[idx] as f64 / kf - vol).abs());
    }
    worst
}

fn prefix_sums(data: &mut [u64], dim: usize, side: usize) {
    let mut stride = 1;
    for _ in 0..dim {
        for idx in 0..data.len() {
            if (idx / stride) % side != 0 {
                data[idx] += data[idx - stride];
            }
        }
        stride *= side;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn golden() -> f64 {
        (5f64.sqrt() - 1.0) / 2.0
    }

    #[test]
    fn rationals_are_detected() {
        assert_eq!(rational_approximation(0.5), Some((1, 2)));
        assert_eq!(rational_approximation(355.0 / 113.0), Some((355, 113)));
        assert!(rational_approximation(golden()).is_none());
        assert!(is_irrational_surrogate(2f64.sqrt() - 1.0));
        assert!(MinimalTranslation::new(vec![golden(), 2.0 * golden()]).is_err());
        assert!(MinimalTranslation::new(vec![golden(), 2f64.sqrt() - 1.0]).is_ok());
    }

    #[test]
    fn slope_on_first_interval() {
        let dc = DenjoyCircle::build(golden(), &WeightRule::Geometric { scale: 0.25 }, 20).unwrap();
        let i0 = dc.interval(0);
        let i1 = dc.interval(1);
        assert_eq!(i0.start, 0.0);
        let a = dc.apply(i0.start + 0.25 * i0.length);
        let b = dc.apply(i0.start + 0.75 * i0.length);
        assert_relative_eq!((b - a) / (0.5 * i0.length), 0.5, epsilon = 1e-9);
        assert_relative_eq!(dc.apply(i0.start), i1.start, epsilon = 1e-15);
    }

    #[test]
    fn zero_insertion_is_rotation() {
        let dc = DenjoyCircle::build(golden(), &WeightRule::Zero, 20).unwrap();
        assert!(dc.is_rotation());
        assert_eq!(semiconjugacy_defect(&dc, 10_000).max_defect_all, 0.0);
        assert_eq!(dc.collapse(0.3), 0.3);
    }

    #[test]
    fn wandering_interval() {
        let dc = DenjoyCircle::build(golden(), &WeightRule::Geometric { scale: 0.25 }, 20).unwrap();
        assert_eq!(dc.wandering_check(40), Ok(()));
    }

    #[test]
    fn overfull_weights_rejected() {
        let err = DenjoyCircle::build(golden(), &WeightRule::Geometric { scale: 0.5 }, 20).unwrap_err();
        assert!(matches!(err, DenjoyError::BadLengths { .. }));
        assert!(DenjoyCircle::build(0.5, &WeightRule::Zero, 3).is_err());
    }

    #[test]
    fn lift_translation_is_exact() {
        let l = Lift::from_real(&[0.1, -2.7]);
        let t = l.translate(&[1 << 20, -(1 << 20)]);
        assert_eq!(t.project(), l.project());
        assert_eq!(TorusChart::new(2).project(&[0.25 + 1048576.0]), vec![0.25]);
    }

    #[test]
    fn torus_distance_wraps() {
        let c = TorusChart::new(2);
        assert_relative_eq!(c.distance(&[0.05, 0.5], &[0.95, 0.5]), 0.1, epsilon = 1e-15);
    }

    #[test]
    fn unit_ball_volumes() {
        assert_relative_eq!(unit_ball_volume(2), PI, epsilon = 1e-15);
        assert_relative_eq!(unit_ball_volume(3), 4.0 / 3.0 * PI, epsilon = 1e-15);
        assert_relative_eq!(unit_ball_volume(4), PI * PI / 2.0, epsilon = 1e-14);
    }

    #[test]
    fn volume_examples() {
        assert_eq!(volume_obstruction(2, 0.05, 1.0, None).n_max, Some(127));
        assert_eq!(volume_obstruction(3, 0.1, 1.0, None).n_max, Some(238));
        assert_eq!(volume_obstruction(2, 0.05, 1.0, Some(128)).verdict, Some(VolumeVerdict::Contradiction));
        assert_eq!(volume_obstruction(2, 0.05, 1.0, Some(127)).verdict, Some(VolumeVerdict::Consistent));
        assert_eq!(volume_obstruction(2, 0.0, 1.0, Some(1 << 40)).n_max, None);
    }

    #[test]
    fn rational_rotation_discrepancy_plateaus() {
        let d = discrepancy(&[0.5], 1000);
        assert!((d - 0.5).abs() < 0.02, "{d}");
    }

    #[test]
    fn golden_discrepancy_bound() {
        let k = 10_000;
        let d = discrepancy(&[golden()], k);
        assert!(d > 0.0 && d <= 10.0 * (k as f64).ln() / k as f64, "{d}");
    }

    #[test]
    fn on_grid_points_count_in_closed_boxes() {
        let d = discrepancy(&[1.0 / 64.0], 64);
        assert!(d > 0.0);
    }
}

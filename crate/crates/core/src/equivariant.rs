//! Equivariant extension of a map between two Schottky sets.
//!
//! A point `x` is unfolded into the source set, `x = γ_{j₁}∘…∘γ_{j_k}(y)`,
//! and mapped to `γ′_{j₁}∘…∘γ′_{j_k}(f(y))`, where `γ′_j` reflects in the
//! target sphere paired with ball `j`. This is the doubling rule
//! `f = γ′_i ∘ f ∘ γ_i^{-1}` applied along the whole word. When the
//! reflection budget runs out inside a ball, a base extension of that
//! ball's boundary map fills the ball.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::moebius::{apply_word, chordal_distance, ExtendedPoint, GeometryError, Sphere, Vector};
use crate::qc::{local_dilatation, DilatationProfile, PointMap};
use crate::sampling::{radical_inverse, unit_directions};
use crate::schottky::{SchottkyError, SchottkySet, UnfoldStatus};
use crate::tolerance;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExtensionError {
    #[error(transparent)]
    Schottky(#[from] SchottkyError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("invalid correspondence: {0}")]
    Correspondence(String),
    #[error("map is undefined at {0}")]
    Undefined(String),
}

/// Default resolution of circle direction tables.
pub const DEFAULT_TABLE_RESOLUTION: usize = 1024;

/// A homeomorphism of the unit sphere `S^{n-1}` stored as samples.
#[derive(Debug, Clone, PartialEq)]
pub enum DirectionTable {
    /// `target_angles[k]` is the image angle of `2πk/N`; lookups interpolate
    /// angles linearly, which is spherical-linear interpolation on the circle.
    Circle { target_angles: Vec<f64> },
    /// Scattered samples, interpolated from the three nearest sources with
    /// inverse-angle weights and renormalised.
    Scattered { sources: Vec<Vector>, targets: Vec<Vector> },
}

fn wrap_angle(a: f64) -> f64 {
    let t = (a + PI).rem_euclid(2.0 * PI) - PI;
    if t == -PI {
        PI
    } else {
        t
    }
}

impl DirectionTable {
    /// Tabulates a direction map `ω ↦ f(ω)` with `resolution` samples.
    pub fn from_fn(n: usize, resolution: usize, f: impl Fn(&Vector) -> Vector) -> Self {
        if n == 2 {
            let target_angles = (0..resolution)
                .map(|k| {
                    let t = 2.0 * PI * k as f64 / resolution as f64;
                    let w = f(&Vector::from_vec(vec![t.cos(), t.sin()]));
                    w[1].atan2(w[0])
                })
                .collect();
            DirectionTable::Circle { target_angles }
        } else {
            let sources = unit_directions(n, resolution);
            let targets = sources
                .iter()
                .map(|w| {
                    let t = f(w);
                    let len = t.norm();
                    t / len
                })
                .collect();
            DirectionTable::Scattered { sources, targets }
        }
    }

    pub fn lookup(&self, omega: &Vector) -> Vector {
        match self {
            DirectionTable::Circle { target_angles } => {
                let m = target_angles.len();
                let theta = omega[1].atan2(omega[0]).rem_euclid(2.0 * PI);
                let s = theta / (2.0 * PI) * m as f64;
                let k = (s.floor() as usize).min(m - 1);
                let frac = s - k as f64;
                let a = target_angles[k];
                let b = target_angles[(k + 1) % m];
                let phi = a + frac * wrap_angle(b - a);
                Vector::from_vec(vec![phi.cos(), phi.sin()])
            }
            DirectionTable::Scattered { sources, targets } => {
                let mut best: Vec<(f64, usize)> = sources
                    .iter()
                    .enumerate()
                    .map(|(k, s)| (s.dot(omega).clamp(-1.0, 1.0).acos(), k))
                    .collect();
                best.sort_by(|a, b| a.0.total_cmp(&b.0));
                if best[0].0 < 1e-12 {
                    return targets[best[0].1].clone();
                }
                let mut acc = Vector::zeros(omega.len());
                for &(angle, k) in best.iter().take(3) {
                    acc += &targets[k] / angle;
                }
                let len = acc.norm();
                acc / len
            }
        }
    }
}

/// Homeomorphism `∂B_i → ∂B′_{i′}`.
#[derive(Debug, Clone, PartialEq)]
pub enum BoundaryMap {
    /// A global Möbius map `γ_{s₁}∘…∘γ_{s_k}` restricted to the sphere.
    Moebius(Vec<Sphere>),
    /// Direction remapping between the two spheres, about their centers.
    Table(DirectionTable),
}

fn finite(p: ExtendedPoint, what: &str) -> Result<Vector, ExtensionError> {
    p.into_finite().ok_or_else(|| ExtensionError::Undefined(format!("{what}: image is infinity")))
}

impl BoundaryMap {
    /// Image of `x ∈ ∂B` where `B = (c, ρ)` and the target sphere is `(c′, ρ′)`.
    pub fn eval(
        &self,
        source: (&Vector, f64),
        target: (&Vector, f64),
        x: &Vector,
    ) -> Result<Vector, ExtensionError> {
        match self {
            BoundaryMap::Moebius(word) => finite(apply_word(word, &ExtendedPoint::Finite(x.clone()))?, "boundary map"),
            BoundaryMap::Table(table) => {
                let d = x - source.0;
                let len = d.norm();
                if len == 0.0 {
                    return Err(ExtensionError::Undefined("boundary map at the sphere center".into()));
                }
                Ok(target.0 + table.lookup(&(d / len)) * target.1)
            }
        }
    }
}

/// A user-supplied point map.
pub type PointFn = dyn Fn(&ExtendedPoint) -> Option<ExtendedPoint> + Send + Sync;

/// The given map `f` on the source Schottky set.
#[derive(Clone)]
pub enum LambdaMap {
    Identity,
    Moebius(Vec<Sphere>),
    Affine { matrix: DMatrix<f64>, offset: Vector },
    Custom(Arc<PointFn>),
}

impl fmt::Debug for LambdaMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LambdaMap::Identity => write!(f, "Identity"),
            LambdaMap::Moebius(w) => f.debug_tuple("Moebius").field(w).finish(),
            LambdaMap::Affine { matrix, offset } => {
                f.debug_struct("Affine").field("matrix", matrix).field("offset", offset).finish()
            }
            LambdaMap::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

impl LambdaMap {
    pub fn eval(&self, x: &ExtendedPoint) -> Option<ExtendedPoint> {
        match self {
            LambdaMap::Identity => Some(x.clone()),
            LambdaMap::Moebius(word) => apply_word(word, x).ok(),
            LambdaMap::Affine { matrix, offset } => match x {
                ExtendedPoint::Infinity => Some(ExtendedPoint::Infinity),
                ExtendedPoint::Finite(p) => {
                    if p.len() != matrix.ncols() {
                        return None;
                    }
                    Some(ExtendedPoint::Finite(matrix * p + offset))
                }
            },
            LambdaMap::Custom(f) => f(x),
        }
    }
}

/// Removed-ball pairing `i ↦ i′` and boundary maps `b_i: ∂B_i → ∂B′_{i′}`.
#[derive(Debug, Clone)]
pub struct BoundaryCorrespondence {
    source: SchottkySet,
    target: SchottkySet,
    pairing: Vec<usize>,
    maps: Vec<BoundaryMap>,
}

/// Samples per sphere used to check that boundary maps land on their
/// target spheres.
const CORRESPONDENCE_SAMPLES: usize = 64;

impl BoundaryCorrespondence {
    pub fn new(
        source: SchottkySet,
        target: SchottkySet,
        pairing: Vec<usize>,
        maps: Vec<BoundaryMap>,
    ) -> Result<Self, ExtensionError> {
        let m = source.len();
        if target.len() != m || pairing.len() != m || maps.len() != m {
            return Err(ExtensionError::Correspondence(format!(
                "sizes differ: source {m}, target {}, pairing {}, maps {}",
                target.len(),
                pairing.len(),
                maps.len()
            )));
        }
        if source.dim() != target.dim() {
            return Err(ExtensionError::Correspondence("source and target dimensions differ".into()));
        }
        let mut seen = vec![false; m];
        for &j in &pairing {
            if j >= m || std::mem::replace(&mut seen[j], true) {
                return Err(ExtensionError::Correspondence(format!("pairing {pairing:?} is not a bijection")));
            }
        }
        let corr = BoundaryCorrespondence { source, target, pairing, maps };
        for i in 0..m {
            let (c2, r2) = corr.target_ball(i);
            for q in corr.source.mirrors()[i].sample_points(CORRESPONDENCE_SAMPLES) {
                let img = corr.boundary(i, &q)?;
                let err = ((&img - c2).norm() - r2).abs() / r2;
                if err > tolerance::FIT {
                    return Err(ExtensionError::Correspondence(format!(
                        "boundary map {i} leaves the paired sphere {} (relative error {err:e})",
                        corr.pairing[i]
                    )));
                }
            }
        }
        Ok(corr)
    }

    /// The correspondence induced by a global Möbius map `g` with
    /// `g(B_i)` bounded for every `i`: the target set is `{g(B_i)}` with the
    /// identity pairing.
    pub fn from_moebius(source: SchottkySet, g: &[Sphere]) -> Result<Self, ExtensionError> {
        let balls = source
            .balls()
            .iter()
            .map(|b| crate::moebius::apply_word_to_ball(g, b))
            .collect::<Result<Vec<_>, _>>()?;
        let target = SchottkySet::new(source.dim(), balls)?;
        let m = source.len();
        BoundaryCorrespondence::new(source, target, (0..m).collect(), vec![BoundaryMap::Moebius(g.to_vec()); m])
    }

    /// Identity correspondence of a set with itself.
    pub fn identity(set: SchottkySet) -> Self {
        let m = set.len();
        BoundaryCorrespondence {
            source: set.clone(),
            target: set,
            pairing: (0..m).collect(),
            maps: vec![BoundaryMap::Moebius(Vec::new()); m],
        }
    }

    pub fn source(&self) -> &SchottkySet {
        &self.source
    }

    pub fn target(&self) -> &SchottkySet {
        &self.target
    }

    pub fn pairing(&self) -> &[usize] {
        &self.pairing
    }

    pub fn maps(&self) -> &[BoundaryMap] {
        &self.maps
    }

    fn source_ball(&self, i: usize) -> (&Vector, f64) {
        (self.source.center(i), self.source.radius(i))
    }

    fn target_ball(&self, i: usize) -> (&Vector, f64) {
        let j = self.pairing[i];
        (self.target.center(j), self.target.radius(j))
    }

    /// `b_i(x)` for `x ∈ ∂B_i`.
    pub fn boundary(&self, i: usize, x: &Vector) -> Result<Vector, ExtensionError> {
        self.maps[i].eval(self.source_ball(i), self.target_ball(i), x)
    }

    /// Target mirror `γ′_{i′}` paired with source ball `i`.
    pub fn target_mirror(&self, i: usize) -> &Sphere {
        &self.target.mirrors()[self.pairing[i]]
    }
}

/// Extension of `b_j` to the interior of `B_j` by coning: with
/// `x = c + tρω`, the image is `c′ + tρ′ dir(b_j(c + ρω) − c′)`.
pub fn base_radial_extend(
    corr: &BoundaryCorrespondence,
    j: usize,
    x: &Vector,
) -> Result<Vector, ExtensionError> {
    let (c, rho) = corr.source_ball(j);
    let (c2, rho2) = corr.target_ball(j);
    let d = x - c;
    let dist = d.norm();
    if dist == 0.0 {
        return Ok(c2.clone());
    }
    let t = dist / rho;
    let omega = d / dist;
    let b = corr.boundary(j, &(c + &omega * rho))? - c2;
    let len = b.norm();
    if len == 0.0 {
        return Err(ExtensionError::Undefined("boundary map hits the target center".into()));
    }
    Ok(c2 + b * (t * rho2 / len))
}

/// How the extension fills a ball when the reflection budget runs out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaseStrategy {
    /// Use the Möbius boundary map itself inside the ball when available.
    #[default]
    MoebiusIfAvailable,
    /// Always use [`base_radial_extend`].
    Radial,
}

#[derive(Debug, Clone)]
pub struct EquivariantMap {
    pub correspondence: BoundaryCorrespondence,
    pub lambda_map: LambdaMap,
    pub base_strategy: BaseStrategy,
    pub max_depth: usize,
}

/// A value of the extension with its classification.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub value: ExtendedPoint,
    pub word_len: usize,
    pub status: UnfoldStatus,
}

impl EquivariantMap {
    pub fn new(correspondence: BoundaryCorrespondence, lambda_map: LambdaMap) -> Self {
        EquivariantMap {
            correspondence,
            lambda_map,
            base_strategy: BaseStrategy::default(),
            max_depth: tolerance::DEFAULT_MAX_DEPTH,
        }
    }

    pub fn with_strategy(mut self, strategy: BaseStrategy) -> Self {
        self.base_strategy = strategy;
        self
    }

    pub fn with_max_depth(mut self, depth: usize) -> Self {
        self.max_depth = depth;
        self
    }

    /// Extension of a global Möbius map `g` restricted to `source`.
    pub fn from_moebius(source: SchottkySet, g: &[Sphere]) -> Result<Self, ExtensionError> {
        let corr = BoundaryCorrespondence::from_moebius(source, g)?;
        Ok(EquivariantMap::new(corr, LambdaMap::Moebius(g.to_vec())))
    }

    pub fn identity(set: SchottkySet) -> Self {
        EquivariantMap::new(BoundaryCorrespondence::identity(set), LambdaMap::Identity)
    }

    pub fn evaluate(&self, x: &ExtendedPoint) -> Result<ExtendedPoint, ExtensionError> {
        self.evaluate_detailed(x).map(|e| e.value)
    }

    pub fn evaluate_detailed(&self, x: &ExtendedPoint) -> Result<Evaluation, ExtensionError> {
        let corr = &self.correspondence;
        let unfolding = corr.source.unfold(x, self.max_depth)?;
        let inner = match unfolding.status {
            UnfoldStatus::LandedInComplement => self.lambda_map.eval(&unfolding.terminal).ok_or_else(|| {
                ExtensionError::Undefined(format!("{:?} (terminal of {:?})", unfolding.terminal, x))
            })?,
            UnfoldStatus::DepthCapped { ball } => {
                let z = unfolding.terminal.as_finite().expect("capped terminal is inside a bounded ball");
                match (&corr.maps[ball], self.base_strategy) {
                    (BoundaryMap::Moebius(g), BaseStrategy::MoebiusIfAvailable) => {
                        apply_word(g, &unfolding.terminal)?
                    }
                    _ => ExtendedPoint::Finite(base_radial_extend(corr, ball, z)?),
                }
            }
        };
        let mut value = inner;
        for &j in unfolding.word.letters().iter().rev() {
            value = corr.target_mirror(j).invert(&value)?;
        }
        Ok(Evaluation { value, word_len: unfolding.word.len(), status: unfolding.status })
    }

    /// `max |f(γ_i x) − γ′_{i′} f(x)|` in the chordal metric.
    pub fn check_equivariance(&self, i: usize, samples: &[Vector]) -> Result<EquivarianceCheck, ExtensionError> {
        let gamma = self.correspondence.source.mirror(i)?.clone();
        let gamma2 = self.correspondence.target_mirror(i).clone();
        let results: Vec<Result<f64, ExtensionError>> = samples
            .par_iter()
            .map(|x| {
                let x = ExtendedPoint::Finite(x.clone());
                let lhs = self.evaluate(&gamma.invert(&x)?)?;
                let rhs = gamma2.invert(&self.evaluate(&x)?)?;
                Ok(chordal_distance(&lhs, &rhs))
            })
            .collect();
        let mut check = EquivarianceCheck { generator: i, max_residual: 0.0, worst_sample: None, evaluated: 0, failures: 0 };
        for (k, r) in results.into_iter().enumerate() {
            match r {
                Ok(res) => {
                    check.evaluated += 1;
                    if res > check.max_residual || check.worst_sample.is_none() {
                        check.max_residual = res;
                        check.worst_sample = Some(k);
                    }
                }
                Err(_) => check.failures += 1,
            }
        }
        Ok(check)
    }

    /// Local dilatation of the extension over a grid; see [`SurveyReport`].
    pub fn dilatation_survey(&self, grid: &SurveyGrid, radii: &[f64], directions: &[Vector]) -> SurveyReport {
        let points = grid.points();
        let rows: Vec<SurveyPoint> = points
            .par_iter()
            .map(|p| {
                let x = ExtendedPoint::Finite(p.clone());
                match self.evaluate_detailed(&x) {
                    Ok(ev) => {
                        let profile = local_dilatation(self, p, radii, directions);
                        SurveyPoint {
                            point: p.iter().copied().collect(),
                            word_len: Some(ev.word_len),
                            capped: matches!(ev.status, UnfoldStatus::DepthCapped { .. }),
                            value: ev.value.as_finite().map(|v| v.iter().copied().collect()),
                            profile: Some(profile),
                            error: None,
                        }
                    }
                    Err(e) => SurveyPoint {
                        point: p.iter().copied().collect(),
                        word_len: None,
                        capped: false,
                        value: None,
                        profile: None,
                        error: Some(e.to_string()),
                    },
                }
            })
            .collect();
        let mut hs: Vec<f64> = rows
            .iter()
            .filter_map(|r| r.profile.as_ref().and_then(|p| p.k_estimate))
            .filter(|h| h.is_finite())
            .collect();
        hs.sort_by(f64::total_cmp);
        let median_h = if hs.is_empty() {
            None
        } else if hs.len() % 2 == 1 {
            Some(hs[hs.len() / 2])
        } else {
            Some(0.5 * (hs[hs.len() / 2 - 1] + hs[hs.len() / 2]))
        };
        SurveyReport {
            max_h: hs.last().copied(),
            min_h: hs.first().copied(),
            median_h,
            failures: rows.iter().filter(|r| r.error.is_some() || r.profile.as_ref().is_some_and(|p| !p.gaps.is_empty())).count(),
            points: rows,
        }
    }
}

impl PointMap for EquivariantMap {
    fn map(&self, x: &Vector) -> Option<Vector> {
        self.evaluate(&ExtendedPoint::Finite(x.clone())).ok()?.into_finite()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquivarianceCheck {
    pub generator: usize,
    pub max_residual: f64,
    pub worst_sample: Option<usize>,
    pub evaluated: usize,
    pub failures: usize,
}

/// Axis-aligned box sampled at cell centers, `resolution` cells per axis.
/// Points are ordered with the first coordinate varying slowest.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SurveyGrid {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub resolution: usize,
}

impl SurveyGrid {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>, resolution: usize) -> Self {
        assert_eq!(lower.len(), upper.len());
        SurveyGrid { lower, upper, resolution }
    }

    /// Square grid around all removed balls, padded by `margin` times the
    /// box size.
    pub fn around(set: &SchottkySet, margin: f64, resolution: usize) -> Self {
        let n = set.dim();
        let mut lo = vec![f64::INFINITY; n];
        let mut hi = vec![f64::NEG_INFINITY; n];
        for i in 0..set.len() {
            let (c, r) = (set.center(i), set.radius(i));
            for k in 0..n {
                lo[k] = lo[k].min(c[k] - r);
                hi[k] = hi[k].max(c[k] + r);
            }
        }
        for k in 0..n {
            let pad = margin * (hi[k] - lo[k]);
            lo[k] -= pad;
            hi[k] += pad;
        }
        SurveyGrid::new(lo, hi, resolution)
    }

    pub fn points(&self) -> Vec<Vector> {
        let n = self.lower.len();
        let total = self.resolution.pow(n as u32);
        (0..total)
            .map(|mut code| {
                let mut idx = vec![0; n];
                for k in (0..n).rev() {
                    idx[k] = code % self.resolution;
                    code /= self.resolution;
                }
                Vector::from_iterator(
                    n,
                    (0..n).map(|k| {
                        let step = (self.upper[k] - self.lower[k]) / self.resolution as f64;
                        self.lower[k] + (idx[k] as f64 + 0.5) * step
                    }),
                )
            })
            .collect()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SurveyPoint {
    pub point: Vec<f64>,
    pub word_len: Option<usize>,
    pub capped: bool,
    pub value: Option<Vec<f64>>,
    pub profile: Option<DilatationProfile>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SurveyReport {
    pub points: Vec<SurveyPoint>,
    /// Statistics of `H` at the smallest radius.
    pub max_h: Option<f64>,
    pub min_h: Option<f64>,
    pub median_h: Option<f64>,
    pub failures: usize,
}

/// Deterministic equivariance samples: `per_sphere` points on every
/// peripheral sphere plus `interior` Halton points in the padded bounding
/// box of the removed balls.
pub fn equivariance_samples(set: &SchottkySet, per_sphere: usize, interior: usize) -> Vec<Vector> {
    let mut out = Vec::new();
    for s in set.mirrors() {
        out.extend(s.sample_points(per_sphere));
    }
    let grid = SurveyGrid::around(set, 0.25, 1);
    let n = set.dim();
    const BASES: [u64; 6] = [2, 3, 5, 7, 11, 13];
    for k in 1..=interior as u64 {
        out.push(Vector::from_iterator(
            n,
            (0..n).map(|d| grid.lower[d] + (grid.upper[d] - grid.lower[d]) * radical_inverse(k, BASES[d % BASES.len()])),
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn standard_scene() -> SchottkySet {
        SchottkySet::from_disks(&[(vec![0.0, 0.0], 0.2), (vec![1.0, 0.0], 0.2), (vec![0.0, 1.0], 0.2)]).unwrap()
    }

    fn far_inversion() -> Vec<Sphere> {
        vec![Sphere::round(Vector::from_vec(vec![4.0, 3.0]), 2.5).unwrap()]
    }

    #[test]
    fn point_in_set_maps_directly() {
        let em = EquivariantMap::from_moebius(standard_scene(), &far_inversion()).unwrap();
        let x = ExtendedPoint::from_slice(&[0.5, 0.5]);
        let ev = em.evaluate_detailed(&x).unwrap();
        assert_eq!(ev.word_len, 0);
        assert_eq!(ev.value, apply_word(&far_inversion(), &x).unwrap());
    }

    #[test]
    fn single_reflection_rule() {
        let set = standard_scene();
        let em = EquivariantMap::from_moebius(set.clone(), &far_inversion()).unwrap();
        let y = ExtendedPoint::from_slice(&[0.4, 0.45]);
        let x = set.mirrors()[1].invert(&y).unwrap();
        let fy = em.lambda_map.eval(&y).unwrap();
        let expected = em.correspondence.target_mirror(1).invert(&fy).unwrap();
        assert!(chordal_distance(&em.evaluate(&x).unwrap(), &expected) < 1e-15);
    }

    #[test]
    fn radial_extension_examples() {
        let set = standard_scene();
        let corr = BoundaryCorrespondence::from_moebius(set.clone(), &far_inversion()).unwrap();
        let (c2, _) = corr.target_ball(0);
        assert_eq!(&base_radial_extend(&corr, 0, set.center(0)).unwrap(), c2);
        for q in set.mirrors()[0].sample_points(32) {
            let inner = set.center(0) + (&q - set.center(0)) * (1.0 - 1e-6);
            let a = base_radial_extend(&corr, 0, &inner).unwrap();
            let b = corr.boundary(0, &q).unwrap();
            assert!((a - b).norm() < 1e-5);
        }
    }

    #[test]
    fn radial_extension_reproduces_similarities() {
        let set = standard_scene();
        let lambda = 1.7;
        let t = 0.4f64;
        let rot = DMatrix::from_row_slice(2, 2, &[t.cos(), -t.sin(), t.sin(), t.cos()]) * lambda;
        let shift = Vector::from_vec(vec![0.3, -2.0]);
        let sim = |x: &Vector| &rot * x + &shift;
        let target = SchottkySet::from_disks(
            &(0..3).map(|i| (sim(set.center(i)).iter().copied().collect(), lambda * set.radius(i))).collect::<Vec<_>>(),
        )
        .unwrap();
        let maps = (0..3)
            .map(|_| BoundaryMap::Table(DirectionTable::from_fn(2, 4096, |w| &rot * w)))
            .collect();
        let corr = BoundaryCorrespondence::new(set.clone(), target, vec![0, 1, 2], maps).unwrap();
        for k in 0..20 {
            let a = k as f64 * 0.3;
            let x = set.center(2) + Vector::from_vec(vec![a.cos(), a.sin()]) * (0.01 * k as f64);
            let got = base_radial_extend(&corr, 2, &x).unwrap();
            assert!((got - sim(&x)).norm() < 1e-9);
        }
    }

    #[test]
    fn mismatched_boundary_maps_are_rejected() {
        let set = standard_scene();
        let err = BoundaryCorrespondence::new(
            set.clone(),
            set.clone(),
            vec![1, 2, 0],
            vec![BoundaryMap::Moebius(Vec::new()); 3],
        )
        .unwrap_err();
        assert!(matches!(err, ExtensionError::Correspondence(_)));
        assert!(BoundaryCorrespondence::new(set.clone(), set, vec![0, 0, 1], vec![BoundaryMap::Moebius(Vec::new()); 3]).is_err());
    }

    #[test]
    fn identity_map_is_identity() {
        let em = EquivariantMap::identity(standard_scene());
        for x in equivariance_samples(em.correspondence.source(), 8, 64) {
            let y = em.map(&x).unwrap();
            assert!((y - &x).norm() < 1e-12);
        }
        for i in 0..3 {
            let c = em.check_equivariance(i, &equivariance_samples(em.correspondence.source(), 8, 64)).unwrap();
            assert!(c.max_residual < 1e-12);
        }
    }

    #[test]
    fn lambda_undefined_is_reported() {
        let corr = BoundaryCorrespondence::identity(standard_scene());
        let em = EquivariantMap::new(corr, LambdaMap::Custom(Arc::new(|_| None)));
        let err = em.evaluate(&ExtendedPoint::from_slice(&[0.5, 0.5])).unwrap_err();
        assert!(matches!(err, ExtensionError::Undefined(_)));
    }

    #[test]
    fn survey_grid_layout() {
        let g = SurveyGrid::new(vec![0.0, 0.0], vec![1.0, 2.0], 2);
        let pts = g.points();
        assert_eq!(pts.len(), 4);
        assert_eq!(pts[0].as_slice(), &[0.25, 0.5]);
        assert_eq!(pts[1].as_slice(), &[0.25, 1.5]);
        assert_eq!(pts[2].as_slice(), &[0.75, 0.5]);
    }

    #[test]
    fn circle_table_interpolates_rotation() {
        let t = DirectionTable::from_fn(2, 1024, |w| Vector::from_vec(vec![-w[1], w[0]]));
        let a: f64 = 1.234;
        let out = t.lookup(&Vector::from_vec(vec![a.cos(), a.sin()]));
        let b = a + PI / 2.0;
        assert!((out - Vector::from_vec(vec![b.cos(), b.sin()])).norm() < 1e-12);
    }

    #[test]
    fn scattered_table_hits_samples_exactly() {
        let t = DirectionTable::from_fn(3, 256, |w| -w);
        if let DirectionTable::Scattered { sources, .. } = &t {
            let out = t.lookup(&sources[17]);
            assert!((out + &sources[17]).norm() < 1e-12);
        } else {
            panic!("expected scattered table");
        }
    }
}

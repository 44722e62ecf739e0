//! Numerical quasiconformality diagnostics.
//!
//! Everything here works on a [`PointMap`]: a partial map `R^n → R^n`.
//! Failed evaluations are recorded in the reports rather than aborting.

use nalgebra::DMatrix;
use serde::Serialize;
use thiserror::Error;

use crate::moebius::{linear_dilatation, ExtendedPoint, LinearMapSummary, Vector};
use crate::schottky::SchottkySet;
use crate::tolerance;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QcError {
    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("map could not be evaluated at {0:?}")]
    Evaluation(Vec<f64>),
}

/// Partial map on `R^n`. `None` marks a point where the map is undefined
/// or leaves finite space.
pub trait PointMap: Sync {
    fn map(&self, x: &Vector) -> Option<Vector>;
}

impl<F> PointMap for F
where
    F: Fn(&Vector) -> Option<Vector> + Sync,
{
    fn map(&self, x: &Vector) -> Option<Vector> {
        self(x)
    }
}

/// Stretch of `f` on the sphere `|q − p| = r`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProfileEntry {
    pub radius: f64,
    /// `L(p, r)`: largest distance `|f(q) − f(p)|`.
    pub max_stretch: f64,
    /// `l(p, r)`: smallest distance `|f(q) − f(p)|`.
    pub min_stretch: f64,
    /// `H(p, r) = L / l`.
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProfileGap {
    pub radius: Option<f64>,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DilatationProfile {
    pub point: Vec<f64>,
    /// One entry per radius, decreasing radii.
    pub entries: Vec<ProfileEntry>,
    /// `H` at the smallest radius: the estimate of `K_f(p)`.
    pub k_estimate: Option<f64>,
    /// Least-squares slope of `H` against `log10 r` over the last three
    /// radii. Near zero when the estimate has settled.
    pub trend: Option<f64>,
    pub gaps: Vec<ProfileGap>,
}

/// Samples `L(p, r)` and `l(p, r)` over `directions` for each radius.
pub fn local_dilatation<M: PointMap + ?Sized>(
    f: &M,
    p: &Vector,
    radii: &[f64],
    directions: &[Vector],
) -> DilatationProfile {
    let mut radii = radii.to_vec();
    radii.sort_by(|a, b| b.total_cmp(a));
    let mut profile = DilatationProfile {
        point: p.iter().copied().collect(),
        entries: Vec::new(),
        k_estimate: None,
        trend: None,
        gaps: Vec::new(),
    };
    let Some(fp) = f.map(p) else {
        profile.gaps.push(ProfileGap { radius: None, reason: "map undefined at center".into() });
        return profile;
    };
    'radii: for &r in &radii {
        let mut big = 0.0f64;
        let mut small = f64::INFINITY;
        for w in directions {
            let q = p + w * r;
            match f.map(&q) {
                Some(fq) => {
                    let d = (fq - &fp).norm();
                    big = big.max(d);
                    small = small.min(d);
                }
                None => {
                    profile.gaps.push(ProfileGap {
                        radius: Some(r),
                        reason: format!("map undefined at {:?}", q.as_slice()),
                    });
                    continue 'radii;
                }
            }
        }
        let ratio = if small > 0.0 { big / small } else { f64::INFINITY };
        profile.entries.push(ProfileEntry { radius: r, max_stretch: big, min_stretch: small, ratio });
    }
    profile.k_estimate = profile.entries.last().map(|e| e.ratio);
    let tail: Vec<&ProfileEntry> = profile.entries.iter().rev().take(3).collect();
    if tail.len() >= 2 && tail.iter().all(|e| e.ratio.is_finite()) {
        let xs: Vec<f64> = tail.iter().map(|e| e.radius.log10()).collect();
        let ys: Vec<f64> = tail.iter().map(|e| e.ratio).collect();
        profile.trend = least_squares_slope(&xs, &ys);
    }
    profile
}

/// Slope of the least-squares line through `(xs, ys)`.
pub fn least_squares_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let n = xs.len() as f64;
    if xs.len() < 2 {
        return None;
    }
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Which distance sits in the denominator of the argument `t` of the
/// distortion function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TripleConvention {
    /// `t = d(x, x′) / d(x, x″)`, pairing with the image ratio.
    #[default]
    Standard,
    /// `t = d(x, x′) / d(x′, x″)`.
    AsPrinted,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnvelopeBucket {
    pub t_low: f64,
    pub t_high: f64,
    pub max_ratio: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuasisymmetryScatter {
    /// `(t, ratio)` per usable triple.
    pub samples: Vec<(f64, f64)>,
    pub skipped: usize,
    /// Max ratio over 64 log-spaced `t` buckets; empty buckets are omitted.
    pub envelope: Vec<EnvelopeBucket>,
}

pub const ENVELOPE_BUCKETS: usize = 64;

/// Samples the quasisymmetry ratio
/// `|f(x) − f(x′)| / |f(x) − f(x″)|` against `t`.
pub fn quasisymmetry_samples<M: PointMap + ?Sized>(
    f: &M,
    triples: &[(Vector, Vector, Vector)],
    convention: TripleConvention,
) -> QuasisymmetryScatter {
    let mut samples = Vec::with_capacity(triples.len());
    let mut skipped = 0;
    for (x, x1, x2) in triples {
        let denom = match convention {
            TripleConvention::Standard => (x - x2).norm(),
            TripleConvention::AsPrinted => (x1 - x2).norm(),
        };
        let (Some(fx), Some(fx1), Some(fx2)) = (f.map(x), f.map(x1), f.map(x2)) else {
            skipped += 1;
            continue;
        };
        let image_denom = (&fx - &fx2).norm();
        if denom == 0.0 || image_denom == 0.0 {
            skipped += 1;
            continue;
        }
        let t = (x - x1).norm() / denom;
        if t == 0.0 {
            skipped += 1;
            continue;
        }
        samples.push((t, (&fx - &fx1).norm() / image_denom));
    }
    let envelope = envelope(&samples);
    QuasisymmetryScatter { samples, skipped, envelope }
}

fn envelope(samples: &[(f64, f64)]) -> Vec<EnvelopeBucket> {
    if samples.is_empty() {
        return Vec::new();
    }
    let lo = samples.iter().map(|s| s.0).fold(f64::INFINITY, f64::min).ln();
    let hi = samples.iter().map(|s| s.0).fold(0.0, f64::max).ln();
    let width = ((hi - lo) / ENVELOPE_BUCKETS as f64).max(f64::MIN_POSITIVE);
    let mut buckets: Vec<Option<(f64, usize)>> = vec![None; ENVELOPE_BUCKETS];
    for &(t, ratio) in samples {
        let k = (((t.ln() - lo) / width) as usize).min(ENVELOPE_BUCKETS - 1);
        let slot = buckets[k].get_or_insert((ratio, 0));
        slot.0 = slot.0.max(ratio);
        slot.1 += 1;
    }
    buckets
        .into_iter()
        .enumerate()
        .filter_map(|(k, b)| {
            b.map(|(max_ratio, count)| EnvelopeBucket {
                t_low: (lo + width * k as f64).exp(),
                t_high: (lo + width * (k + 1) as f64).exp(),
                max_ratio,
                count,
            })
        })
        .collect()
}

/// `x ↦ (f(p + r x) − f(p)) / r`.
pub struct RescaledMap<'a, M: ?Sized> {
    f: &'a M,
    p: Vector,
    r: f64,
    fp: Option<Vector>,
}

pub fn rescaled_map<'a, M: PointMap + ?Sized>(f: &'a M, p: &Vector, r: f64) -> RescaledMap<'a, M> {
    assert!(r > 0.0, "rescaling radius must be positive");
    let fp = f.map(p);
    RescaledMap { f, p: p.clone(), r, fp }
}

impl<M: PointMap + ?Sized> PointMap for RescaledMap<'_, M> {
    fn map(&self, x: &Vector) -> Option<Vector> {
        let fp = self.fp.as_ref()?;
        let q = &self.p + x * self.r;
        self.f.map(&q).map(|fq| (fq - fp) / self.r)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoundnessReport {
    pub center: Vec<f64>,
    pub radius: f64,
    /// `max |dist(sample, center) − radius| / radius`.
    pub residual: f64,
    pub degenerate: bool,
}

/// Least-squares sphere fit: algebraic fit on the `|x|²` expansion, then
/// Gauss–Newton refinement of the geometric residuals.
pub fn roundness(points: &[Vector]) -> Result<RoundnessReport, QcError> {
    let n = points.first().map_or(0, |p| p.len());
    if n == 0 || points.len() < n + 2 {
        return Err(QcError::TooFewPoints { needed: n.max(1) + 2, got: points.len() });
    }
    let count = points.len() as f64;
    let centroid = points.iter().fold(Vector::zeros(n), |acc, p| acc + p) / count;
    let scale = (points.iter().map(|p| (p - &centroid).norm_squared()).sum::<f64>() / count).sqrt();
    let degenerate_report = |center: &Vector, radius: f64| RoundnessReport {
        center: center.iter().copied().collect(),
        radius,
        residual: f64::INFINITY,
        degenerate: true,
    };
    if !(scale > 0.0 && scale.is_finite()) {
        return Ok(degenerate_report(&centroid, 0.0));
    }
    let local: Vec<Vector> = points.iter().map(|p| (p - &centroid) / scale).collect();

    let mut a = DMatrix::zeros(local.len(), n + 1);
    let mut b = Vector::zeros(local.len());
    for (row, y) in local.iter().enumerate() {
        for k in 0..n {
            a[(row, k)] = 2.0 * y[k];
        }
        a[(row, n)] = 1.0;
        b[row] = y.norm_squared();
    }
    let svd = a.svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if smin <= smax * 1e-12 {
        return Ok(degenerate_report(&centroid, f64::INFINITY));
    }
    let sol = svd.solve(&b, 0.0).map_err(|e| QcError::Precondition(e.to_string()))?;
    let mut c = sol.rows(0, n).into_owned();
    let r2 = sol[n] + c.norm_squared();
    if r2 <= 0.0 {
        return Ok(degenerate_report(&centroid, 0.0));
    }
    let mut r = r2.sqrt();

    // Gauss-Newton on e_i = |y_i - c| - r
    for _ in 0..20 {
        let mut jac = DMatrix::zeros(local.len(), n + 1);
        let mut res = Vector::zeros(local.len());
        for (row, y) in local.iter().enumerate() {
            let d = y - &c;
            let dist = d.norm();
            res[row] = dist - r;
            if dist > 0.0 {
                for k in 0..n {
                    jac[(row, k)] = -d[k] / dist;
                }
            }
            jac[(row, n)] = -1.0;
        }
        let Ok(step) = jac.svd(true, true).solve(&(-res), 1e-14) else { break };
        c += step.rows(0, n);
        r += step[n];
        if step.norm() <= 1e-15 * (1.0 + r) {
            break;
        }
    }

    let center = &centroid + &c * scale;
    let radius = r * scale;
    let residual = points
        .iter()
        .map(|p| ((p - &center).norm() - radius).abs() / radius)
        .fold(0.0, f64::max);
    let degenerate = !(1e-12..=1e12).contains(&radius);
    Ok(RoundnessReport { center: center.iter().copied().collect(), radius, residual, degenerate })
}

/// Default finite-difference step.
pub const DEFAULT_FD_STEP: f64 = 1e-5;

#[derive(Debug, Clone, Serialize)]
pub struct JacobianEstimate {
    #[serde(skip)]
    pub matrix: DMatrix<f64>,
    pub step: f64,
    pub summary: LinearMapSummary,
    /// Largest entry change when the step is halved.
    pub richardson_delta: f64,
}

fn central_difference<M: PointMap + ?Sized>(f: &M, p: &Vector, h: f64) -> Result<DMatrix<f64>, QcError> {
    let n = p.len();
    let mut out: Option<DMatrix<f64>> = None;
    for j in 0..n {
        let mut e = Vector::zeros(n);
        e[j] = h;
        let plus = f.map(&(p + &e)).ok_or_else(|| QcError::Evaluation((p + &e).iter().copied().collect()))?;
        let minus = f.map(&(p - &e)).ok_or_else(|| QcError::Evaluation((p - &e).iter().copied().collect()))?;
        let col = (plus - minus) / (2.0 * h);
        let m = out.get_or_insert_with(|| DMatrix::zeros(col.len(), n));
        m.set_column(j, &col);
    }
    out.ok_or(QcError::Precondition("empty point".into()))
}

/// Central-difference Jacobian at `p` with step `h`.
pub fn jacobian<M: PointMap + ?Sized>(f: &M, p: &Vector, h: f64) -> Result<JacobianEstimate, QcError> {
    let matrix = central_difference(f, p, h)?;
    let half = central_difference(f, p, h / 2.0)?;
    let richardson_delta = (&matrix - &half).amax();
    let summary = linear_dilatation(&matrix).map_err(|e| QcError::Precondition(e.to_string()))?;
    Ok(JacobianEstimate { matrix, step: h, summary, richardson_delta })
}

/// Observed convergence order of the central-difference Jacobian from steps
/// `h`, `h/2`, `h/4`: `log2(|J_h − J_{h/2}| / |J_{h/2} − J_{h/4}|)`.
pub fn jacobian_convergence_order<M: PointMap + ?Sized>(f: &M, p: &Vector, h: f64) -> Result<f64, QcError> {
    let j1 = central_difference(f, p, h)?;
    let j2 = central_difference(f, p, h / 2.0)?;
    let j4 = central_difference(f, p, h / 4.0)?;
    Ok(((&j1 - &j2).norm() / (&j2 - &j4).norm()).log2())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING-KEBAB-CASE")]
pub enum ConformalityVerdict {
    Conformal,
    NonConformal,
    Degenerate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NestedBallEntry {
    pub center: Vec<f64>,
    pub radius: f64,
    pub residual: f64,
    pub degenerate: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct NestedBallReport {
    pub point: Vec<f64>,
    pub entries: Vec<NestedBallEntry>,
    pub jacobian: LinearMapSummary,
    pub verdict: ConformalityVerdict,
    /// Least-squares slope of `log10(residual)` against `log10(radius)`.
    pub trend: Option<f64>,
}

pub const NESTED_RESIDUAL_THRESHOLD: f64 = 1e-3;
pub const NESTED_DILATATION_THRESHOLD: f64 = 1.01;

/// Tests whether `f` carries the nested balls around `p` to round balls,
/// after rescaling each image by the ball radius, and whether the
/// derivative at `p` is conformal.
pub fn nested_ball_conformality_test<M: PointMap + ?Sized>(
    f: &M,
    p: &Vector,
    balls: &[(Vector, f64)],
    directions: &[Vector],
) -> Result<NestedBallReport, QcError> {
    for (k, (c, r)) in balls.iter().enumerate() {
        if (p - c).norm() >= *r {
            return Err(QcError::Precondition(format!("ball {k} does not contain the point")));
        }
        if k > 0 && *r >= balls[k - 1].1 {
            return Err(QcError::Precondition("ball radii must be strictly decreasing".into()));
        }
    }
    let fp = f.map(p).ok_or_else(|| QcError::Evaluation(p.iter().copied().collect()))?;
    let mut entries = Vec::with_capacity(balls.len());
    for (c, r) in balls {
        let mut image = Vec::with_capacity(directions.len());
        for w in directions {
            let q = c + w * *r;
            let fq = f.map(&q).ok_or_else(|| QcError::Evaluation(q.iter().copied().collect()))?;
            image.push((fq - &fp) / *r);
        }
        let fit = roundness(&image)?;
        entries.push(NestedBallEntry {
            center: c.iter().copied().collect(),
            radius: *r,
            residual: fit.residual,
            degenerate: fit.degenerate,
        });
    }
    let smallest = balls.last().map_or(DEFAULT_FD_STEP, |b| b.1);
    let jac = jacobian(f, p, DEFAULT_FD_STEP.min(smallest / 10.0))?;
    let last = entries.last();
    let verdict = if jac.summary.degenerate || last.is_some_and(|e| e.degenerate) {
        ConformalityVerdict::Degenerate
    } else if last.is_some_and(|e| e.residual <= NESTED_RESIDUAL_THRESHOLD)
        && jac.summary.dilatation.is_some_and(|k| k <= NESTED_DILATATION_THRESHOLD)
    {
        ConformalityVerdict::Conformal
    } else {
        ConformalityVerdict::NonConformal
    };
    let finite: Vec<&NestedBallEntry> =
        entries.iter().filter(|e| e.residual.is_finite() && e.residual > 0.0).collect();
    let trend = least_squares_slope(
        &finite.iter().map(|e| e.radius.log10()).collect::<Vec<_>>(),
        &finite.iter().map(|e| e.residual.log10()).collect::<Vec<_>>(),
    );
    Ok(NestedBallReport { point: p.iter().copied().collect(), entries, jacobian: jac.summary, verdict, trend })
}

/// Balls `B(p, 2^{-k})` for `k = first..=last`.
pub fn dyadic_balls(p: &Vector, first: u32, last: u32) -> Vec<(Vector, f64)> {
    (first..=last).map(|k| (p.clone(), 0.5f64.powi(k as i32))).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModulusRow {
    pub scale: f64,
    /// `max_q |f(q+x) − f(q) − D_q f(x)| / |x|` over `|x| = scale`.
    pub modulus: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModulusTable {
    pub rows: Vec<ModulusRow>,
    /// Log-log slope of modulus against scale.
    pub slope: Option<f64>,
    pub failures: usize,
}

/// Uniform differentiability modulus over `base_points` at each scale,
/// with `D_q f` from central differences of step `h`.
pub fn uniform_differentiability_modulus<M: PointMap + ?Sized>(
    f: &M,
    base_points: &[Vector],
    scales: &[f64],
    directions: &[Vector],
    h: f64,
) -> ModulusTable {
    let mut failures = 0;
    let mut derivs = Vec::with_capacity(base_points.len());
    for q in base_points {
        match (central_difference(f, q, h), f.map(q)) {
            (Ok(d), Some(fq)) => derivs.push((q, fq, d)),
            _ => failures += 1,
        }
    }
    let mut rows = Vec::with_capacity(scales.len());
    for &s in scales {
        let mut worst = 0.0f64;
        for (q, fq, d) in &derivs {
            for w in directions {
                let x = w * s;
                match f.map(&(*q + &x)) {
                    Some(v) => {
                        let rem = v - fq - d * &x;
                        worst = worst.max(rem.norm() / s);
                    }
                    None => failures += 1,
                }
            }
        }
        rows.push(ModulusRow { scale: s, modulus: worst });
    }
    let usable: Vec<&ModulusRow> = rows.iter().filter(|r| r.modulus > 0.0).collect();
    let slope = if usable.len() == rows.len() {
        least_squares_slope(
            &usable.iter().map(|r| r.scale.ln()).collect::<Vec<_>>(),
            &usable.iter().map(|r| r.modulus.ln()).collect::<Vec<_>>(),
        )
    } else {
        None
    };
    ModulusTable { rows, slope, failures }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityRow {
    pub radius: f64,
    pub samples: usize,
    pub inside: usize,
    /// Share of the sphere samples that lie in the Schottky set.
    pub fraction: f64,
}

/// Fraction of points of `∂B(p, r)` in the Schottky set, per radius.
/// Membership is decided by unfolding with the given depth budget: a point
/// belongs to the set when it needs no reflection.
pub fn density_rescaling_probe(
    set: &SchottkySet,
    p: &Vector,
    radii: &[f64],
    directions: &[Vector],
    depth: usize,
) -> Vec<DensityRow> {
    radii
        .iter()
        .map(|&r| {
            let inside = directions
                .iter()
                .filter(|w| {
                    let x = ExtendedPoint::Finite(p + *w * r);
                    set.unfold(&x, depth).is_ok_and(|u| u.landed() && u.word.is_empty())
                })
                .count();
            DensityRow {
                radius: r,
                samples: directions.len(),
                inside,
                fraction: inside as f64 / directions.len().max(1) as f64,
            }
        })
        .collect()
}

/// True when a profile is consistent with `H ≥ 1` and `L ≥ l`.
pub fn profile_is_consistent(profile: &DilatationProfile) -> bool {
    profile
        .entries
        .iter()
        .all(|e| e.ratio >= 1.0 - tolerance::CONFORMAL && e.max_stretch >= e.min_stretch)
}

//! Schottky sets and their reflection groups.
//!
//! A [`SchottkySet`] is the complement of at least three pairwise disjoint
//! open round balls. Its group is the free product of the reflections `γ_i`
//! in the peripheral spheres, so every element has a unique reduced word
//! ([`ReflectionWord`]). Ball indices are zero-based throughout.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::moebius::{Ball, ExtendedPoint, GeometryError, Sphere, Vector};
use crate::tolerance;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SchottkyError {
    #[error("invalid Schottky set: {0}")]
    Invalid(ValidationReport),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("ball index {index} out of range for {count} removed balls")]
    IndexOutOfRange { index: usize, count: usize },
    #[error("unfolding hit the center of ball {ball} after {steps} reflections; perturb the point by 1e-9")]
    CenterHit { ball: usize, steps: usize },
    #[error("word is not reduced: letters {0} repeat at position {1}")]
    NotReduced(usize, usize),
    #[error("internal geometry error: {0}")]
    Internal(String),
}

/// One reason a ball family fails to be a Schottky set.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    /// Fewer than three removed balls.
    TooFewBalls { count: usize },
    /// Closed balls `i` and `j` meet or touch (`gap ≤ 1e−12`).
    Overlap { i: usize, j: usize, gap: f64 },
    /// Ball is not a bounded round ball.
    NotBounded { index: usize },
    DimensionMismatch { index: usize, expected: usize, found: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::TooFewBalls { count } => {
                write!(f, "a Schottky set needs at least three removed balls, found {count}")
            }
            Violation::Overlap { i, j, gap } => {
                write!(f, "balls {i} and {j} are not disjoint (gap {gap:e})")
            }
            Violation::NotBounded { index } => {
                write!(f, "ball {index} is not a bounded round ball")
            }
            Violation::DimensionMismatch { index, expected, found } => {
                write!(f, "ball {index} has dimension {found}, expected {expected}")
            }
        }
    }
}

/// Gap between two removed balls: `|c_i − c_j| − r_i − r_j`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairMargin {
    pub i: usize,
    pub j: usize,
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub ball_count: usize,
    pub min_gap: Option<f64>,
    pub min_gap_pair: Option<(usize, usize)>,
    pub margins: Vec<PairMargin>,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "{} balls, valid", self.ball_count);
        }
        let msgs: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
        write!(f, "{}", msgs.join("; "))
    }
}

/// Checks the Schottky-set invariants of a ball family in dimension `dim`.
pub fn validate(dim: usize, balls: &[Ball]) -> ValidationReport {
    let mut violations = Vec::new();
    if balls.len() < 3 {
        violations.push(Violation::TooFewBalls { count: balls.len() });
    }
    let mut bounded = Vec::with_capacity(balls.len());
    for (index, b) in balls.iter().enumerate() {
        if b.dim() != dim {
            violations.push(Violation::DimensionMismatch { index, expected: dim, found: b.dim() });
            continue;
        }
        match b.bounded() {
            Some((c, r)) => bounded.push((index, c, r)),
            None => violations.push(Violation::NotBounded { index }),
        }
    }
    let mut margins = Vec::new();
    for (a, &(i, ci, ri)) in bounded.iter().enumerate() {
        for &(j, cj, rj) in &bounded[a + 1..] {
            let gap = (ci - cj).norm() - ri - rj;
            if gap <= tolerance::DISJOINT_GAP {
                violations.push(Violation::Overlap { i, j, gap });
            }
            margins.push(PairMargin { i, j, gap });
        }
    }
    let min = margins.iter().min_by(|a, b| a.gap.total_cmp(&b.gap));
    ValidationReport {
        ball_count: balls.len(),
        min_gap: min.map(|m| m.gap),
        min_gap_pair: min.map(|m| (m.i, m.j)),
        margins,
        violations,
    }
}

/// Complement of finitely many disjoint bounded open balls in `R^n ∪ {∞}`.
/// Always valid once constructed.
#[derive(Debug, Clone, PartialEq)]
pub struct SchottkySet {
    dim: usize,
    removed: Vec<Ball>,
    mirrors: Vec<Sphere>,
    label: Option<String>,
}

impl SchottkySet {
    pub fn new(dim: usize, removed: Vec<Ball>) -> Result<Self, SchottkyError> {
        let report = validate(dim, &removed);
        if !report.is_valid() {
            return Err(SchottkyError::Invalid(report));
        }
        let mirrors = removed.iter().map(|b| b.sphere.clone()).collect();
        Ok(SchottkySet { dim, removed, mirrors, label: None })
    }

    /// Builds a set from `(center, radius)` pairs.
    pub fn from_disks(disks: &[(Vec<f64>, f64)]) -> Result<Self, SchottkyError> {
        let dim = disks.first().map_or(0, |(c, _)| c.len());
        let balls = disks
            .iter()
            .map(|(c, r)| Ball::interior(Vector::from_column_slice(c), *r))
            .collect::<Result<Vec<_>, _>>()?;
        SchottkySet::new(dim, balls)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.removed.len()
    }

    pub fn is_empty(&self) -> bool {
        self.removed.is_empty()
    }

    pub fn balls(&self) -> &[Ball] {
        &self.removed
    }

    /// Peripheral spheres `∂B_i`, which are also the mirrors of `γ_i`.
    pub fn mirrors(&self) -> &[Sphere] {
        &self.mirrors
    }

    pub fn mirror(&self, i: usize) -> Result<&Sphere, SchottkyError> {
        self.mirrors
            .get(i)
            .ok_or(SchottkyError::IndexOutOfRange { index: i, count: self.len() })
    }

    pub fn center(&self, i: usize) -> &Vector {
        self.removed[i].bounded().expect("validated").0
    }

    pub fn radius(&self, i: usize) -> f64 {
        self.removed[i].bounded().expect("validated").1
    }

    pub fn report(&self) -> ValidationReport {
        validate(self.dim, &self.removed)
    }

    /// Index of the ball containing `x`, if any. Boundary points belong to
    /// the Schottky set.
    pub fn containing_ball(&self, x: &ExtendedPoint) -> Option<usize> {
        self.removed.iter().position(|b| b.contains(x))
    }

    pub fn contains(&self, x: &ExtendedPoint) -> bool {
        self.containing_ball(x).is_none()
    }

    /// Peripheral sphere of largest radius; ties go to the lowest index.
    pub fn largest_ball(&self) -> usize {
        let mut best = 0;
        for i in 1..self.len() {
            if self.radius(i) > self.radius(best) {
                best = i;
            }
        }
        best
    }

    /// Evaluates the group element `γ_word` at `x`.
    pub fn apply(&self, word: &ReflectionWord, x: &ExtendedPoint) -> Result<ExtendedPoint, SchottkyError> {
        let mut y = x.clone();
        for &i in word.letters().iter().rev() {
            y = self.mirror(i)?.invert(&y)?;
        }
        Ok(y)
    }

    /// Image of a ball under `γ_word`.
    pub fn apply_to_ball(&self, word: &ReflectionWord, ball: &Ball) -> Result<Ball, SchottkyError> {
        let mut b = ball.clone();
        for &i in word.letters().iter().rev() {
            b = b.image_under(self.mirror(i)?)?;
        }
        Ok(b)
    }

    /// Doubles the set across `∂B_i`: the removed balls become
    /// `{B_j : j ≠ i} ∪ {γ_i(B_j) : j ≠ i}`, in that order.
    pub fn double(&self, i: usize) -> Result<SchottkySet, SchottkyError> {
        let mirror = self.mirror(i)?.clone();
        let mut balls: Vec<Ball> = self
            .removed
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, b)| b.clone())
            .collect();
        for (j, b) in self.removed.iter().enumerate() {
            if j != i {
                balls.push(b.image_under(&mirror)?);
            }
        }
        SchottkySet::new(self.dim, balls).map_err(|e| {
            SchottkyError::Internal(format!("doubling across ball {i} produced an invalid set: {e}"))
        })
    }

    /// Unfolds `x` into the Schottky set; see [`Unfolding`].
    pub fn unfold(&self, x: &ExtendedPoint, max_depth: usize) -> Result<Unfolding, SchottkyError> {
        let mut letters = Vec::new();
        let mut current = x.clone();
        loop {
            let Some(j) = self.containing_ball(&current) else {
                return Ok(Unfolding {
                    word: ReflectionWord(letters),
                    terminal: current,
                    status: UnfoldStatus::LandedInComplement,
                });
            };
            if letters.len() == max_depth {
                return Ok(Unfolding {
                    word: ReflectionWord(letters),
                    terminal: current,
                    status: UnfoldStatus::DepthCapped { ball: j },
                });
            }
            let p = current.as_finite().expect("bounded balls never contain infinity");
            let (c, r) = self.removed[j].bounded().expect("validated");
            if (p - c).norm() <= r * f64::EPSILON {
                return Err(SchottkyError::CenterHit { ball: j, steps: letters.len() });
            }
            current = self.mirrors[j].invert(&current)?;
            letters.push(j);
        }
    }

    /// Orbit balls `γ_w(B_j)` for all reduced words `|w| ≤ depth` and
    /// sources `j ≠ last(w)`, ordered by depth, then word, then source.
    pub fn orbit_packing(&self, depth: usize) -> Result<OrbitPacking, SchottkyError> {
        let m = self.len();
        let mut layer: Vec<OrbitBall> = self
            .removed
            .iter()
            .enumerate()
            .map(|(j, b)| OrbitBall { word: ReflectionWord::empty(), source: j, ball: b.clone() })
            .collect();
        let mut balls = layer.clone();
        let mut max_radius = vec![max_radius_of(&layer)];
        for _ in 0..depth {
            let mut next = Vec::with_capacity(layer.len() * (m - 1));
            for i in 0..m {
                for parent in &layer {
                    let first = parent.word.first().unwrap_or(parent.source);
                    if first == i {
                        continue;
                    }
                    let ball = parent.ball.image_under(&self.mirrors[i])?;
                    let mut letters = Vec::with_capacity(parent.word.len() + 1);
                    letters.push(i);
                    letters.extend_from_slice(parent.word.letters());
                    next.push(OrbitBall { word: ReflectionWord(letters), source: parent.source, ball });
                }
            }
            max_radius.push(max_radius_of(&next));
            balls.extend(next.iter().cloned());
            layer = next;
        }
        Ok(OrbitPacking { balls, max_radius_by_depth: max_radius })
    }
}

fn max_radius_of(balls: &[OrbitBall]) -> f64 {
    balls.iter().filter_map(|b| b.radius()).fold(0.0, f64::max)
}

/// Reduced word in the generators: no two adjacent letters are equal.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize)]
#[serde(transparent)]
pub struct ReflectionWord(Vec<usize>);

impl ReflectionWord {
    pub fn empty() -> Self {
        ReflectionWord(Vec::new())
    }

    /// Accepts only reduced words.
    pub fn new(letters: Vec<usize>) -> Result<Self, SchottkyError> {
        if let Some(pos) = letters.windows(2).position(|w| w[0] == w[1]) {
            return Err(SchottkyError::NotReduced(letters[pos], pos));
        }
        Ok(ReflectionWord(letters))
    }

    /// Free reduction using `γ_i² = id`.
    pub fn reduce(letters: &[usize]) -> Self {
        let mut out: Vec<usize> = Vec::with_capacity(letters.len());
        for &l in letters {
            if out.last() == Some(&l) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        ReflectionWord(out)
    }

    pub fn letters(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn first(&self) -> Option<usize> {
        self.0.first().copied()
    }

    pub fn last(&self) -> Option<usize> {
        self.0.last().copied()
    }

    /// Product `self · other`, reduced.
    pub fn concat(&self, other: &ReflectionWord) -> ReflectionWord {
        let mut all = self.0.clone();
        all.extend_from_slice(&other.0);
        ReflectionWord::reduce(&all)
    }

    /// Group inverse: the reversed word.
    pub fn inverse(&self) -> ReflectionWord {
        ReflectionWord(self.0.iter().rev().copied().collect())
    }
}

impl fmt::Display for ReflectionWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.0.iter().map(|l| l.to_string()).collect();
        write!(f, "{}", s.join("."))
    }
}

/// Iterator over all reduced words on `m` letters of length `≤ max_len`,
/// by length and then lexicographically.
#[derive(Debug, Clone)]
pub struct WordEnumerator {
    m: usize,
    max_len: usize,
    current: Option<Vec<usize>>,
}

/// Enumerates reduced words; there are `m(m−1)^{k−1}` of length `k ≥ 1`.
pub fn enumerate_words(m: usize, max_len: usize) -> WordEnumerator {
    assert!(m >= 2, "at least two generators are required");
    WordEnumerator { m, max_len, current: Some(Vec::new()) }
}

fn smallest_reduced(len: usize) -> Vec<usize> {
    (0..len).map(|k| k % 2).collect()
}

impl WordEnumerator {
    fn successor(&self, w: &[usize]) -> Option<Vec<usize>> {
        let mut w = w.to_vec();
        let mut pos = w.len();
        while pos > 0 {
            pos -= 1;
            let prev = if pos == 0 { None } else { Some(w[pos - 1]) };
            let mut candidate = w[pos] + 1;
            if Some(candidate) == prev {
                candidate += 1;
            }
            if candidate < self.m {
                w[pos] = candidate;
                for k in pos + 1..w.len() {
                    w[k] = if w[k - 1] == 0 { 1 } else { 0 };
                }
                return Some(w);
            }
        }
        let len = w.len() + 1;
        (len <= self.max_len).then(|| smallest_reduced(len))
    }
}

impl Iterator for WordEnumerator {
    type Item = ReflectionWord;

    fn next(&mut self) -> Option<ReflectionWord> {
        let w = self.current.take()?;
        self.current = self.successor(&w);
        Some(ReflectionWord(w))
    }
}

/// Outcome of [`SchottkySet::unfold`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum UnfoldStatus {
    /// The terminal point lies in the Schottky set.
    LandedInComplement,
    /// The reflection budget ran out with the terminal inside `ball`.
    DepthCapped { ball: usize },
}

/// `x = γ_word(terminal)`: reflecting repeatedly in the containing removed
/// ball records the word `(j₁, …, j_k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Unfolding {
    pub word: ReflectionWord,
    pub terminal: ExtendedPoint,
    pub status: UnfoldStatus,
}

impl Unfolding {
    pub fn landed(&self) -> bool {
        self.status == UnfoldStatus::LandedInComplement
    }
}

/// The ball `γ_word(B_source)`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrbitBall {
    pub word: ReflectionWord,
    pub source: usize,
    pub ball: Ball,
}

impl OrbitBall {
    pub fn depth(&self) -> usize {
        self.word.len()
    }

    pub fn radius(&self) -> Option<f64> {
        self.ball.bounded().map(|(_, r)| r)
    }

    pub fn center(&self) -> Option<&Vector> {
        self.ball.bounded().map(|(c, _)| c)
    }

    /// The depth-`(d−1)` orbit ball this one nests inside: the last letter
    /// becomes the source.
    pub fn parent_key(&self) -> Option<(ReflectionWord, usize)> {
        let (&last, rest) = self.word.letters().split_last()?;
        Some((ReflectionWord(rest.to_vec()), last))
    }
}

#[derive(Debug, Clone)]
pub struct OrbitPacking {
    pub balls: Vec<OrbitBall>,
    /// Largest orbit-ball radius at each depth `0..=depth`.
    pub max_radius_by_depth: Vec<f64>,
}

impl OrbitPacking {
    pub fn at_depth(&self, d: usize) -> impl Iterator<Item = &OrbitBall> {
        self.balls.iter().filter(move |b| b.depth() == d)
    }
}

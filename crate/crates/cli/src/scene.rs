//! Scene files: a versioned JSON description of an experiment.
//!
//! ```json
//! {
//!   "version": 1,
//!   "dimension": 2,
//!   "label": "standard",
//!   "balls": [{"center": [0, 0], "radius": 0.2}, ...],
//!   "correspondence": {
//!     "map": {"kind": "moebius", "word": [{"center": [4, 3], "radius": 2.5}]},
//!     "pairing": [0, 1, 2],
//!     "boundary": {"kind": "moebius"},
//!     "base_strategy": "radial"
//!   },
//!   "experiment": {"depth": 3, "max_depth": 20, "grid": 32, "radii": [1e-3, 1e-4]}
//! }
//! ```
//!
//! Unknown fields are rejected everywhere.

use std::path::Path;

use nalgebra::DMatrix;
use serde::Deserialize;
use serde_json::Value;

use schottky_lab::denjoy::{RadiusRule, WeightRule};
use schottky_lab::equivariant::{BaseStrategy, BoundaryCorrespondence, BoundaryMap, DirectionTable, LambdaMap};
use schottky_lab::moebius::apply_word_to_ball;
use schottky_lab::schottky::{validate, ValidationReport};
use schottky_lab::{Ball, SchottkySet, Sphere, Vector};

use crate::canonical::content_hash;
use crate::CliError;

pub const SCENE_VERSION: u32 = 1;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneFile {
    pub version: u32,
    pub dimension: usize,
    #[serde(default)]
    pub label: Option<String>,
    #[serde(default)]
    pub balls: Vec<BallSpec>,
    #[serde(default)]
    pub correspondence: Option<CorrespondenceSpec>,
    #[serde(default)]
    pub denjoy: Option<DenjoySpec>,
    #[serde(default)]
    pub torus: Option<TorusSpec>,
    #[serde(default)]
    pub experiment: ExperimentSpec,
}

/// A round ball, or the round sphere bounding it.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BallSpec {
    pub center: Vec<f64>,
    pub radius: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MapSpec {
    Identity,
    /// Composition of reflections; the last sphere acts first.
    Moebius { word: Vec<BallSpec> },
    Affine { matrix: Vec<Vec<f64>>, offset: Vec<f64> },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BoundarySpec {
    /// The map's own Möbius word restricted to each sphere.
    Moebius,
    /// Direction table `ω ↦ Lω / |Lω|` about the paired centers.
    Directions {
        #[serde(default)]
        linear: Option<Vec<Vec<f64>>>,
        #[serde(default)]
        resolution: Option<usize>,
    },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorrespondenceSpec {
    pub map: MapSpec,
    #[serde(default)]
    pub target_balls: Option<Vec<BallSpec>>,
    #[serde(default)]
    pub pairing: Option<Vec<usize>>,
    #[serde(default)]
    pub boundary: Option<BoundarySpec>,
    #[serde(default)]
    pub base_strategy: Option<BaseStrategy>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DenjoySpec {
    pub alpha: f64,
    pub orbit: usize,
    pub weights: WeightRule,
    #[serde(default)]
    pub grid: Option<usize>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TorusSpec {
    pub rho: Vec<f64>,
    #[serde(default)]
    pub base: Option<Vec<f64>>,
    pub orbit: usize,
    pub radii: RadiusRule,
    #[serde(default)]
    pub discrepancy_points: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    /// Orbit packing depth.
    #[serde(default)]
    pub depth: Option<usize>,
    /// Reflection budget for unfolding.
    #[serde(default)]
    pub max_depth: Option<usize>,
    /// Survey grid cells per axis.
    #[serde(default)]
    pub grid: Option<usize>,
    /// Dilatation radii.
    #[serde(default)]
    pub radii: Option<Vec<f64>>,
    /// Point for the nested-ball conformality test.
    #[serde(default)]
    pub probe: Option<Vec<f64>>,
    /// Equivariance samples per peripheral sphere.
    #[serde(default)]
    pub samples_per_sphere: Option<usize>,
}

/// A parsed scene with its content hash.
#[derive(Debug, Clone)]
pub struct LoadedScene {
    pub file: SceneFile,
    pub hash: String,
}

impl LoadedScene {
    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read scene {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Validation(msg) => CliError::Validation(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let value: Value = serde_json::from_str(text).map_err(|e| CliError::Validation(format!("invalid JSON: {e}")))?;
        let file: SceneFile =
            serde_json::from_str(text).map_err(|e| CliError::Validation(format!("schema error: {e}")))?;
        if file.version != SCENE_VERSION {
            return Err(CliError::Validation(format!(
                "unsupported scene version {} (expected {SCENE_VERSION})",
                file.version
            )));
        }
        if file.dimension < 1 {
            return Err(CliError::Validation("dimension must be at least 1".into()));
        }
        Ok(LoadedScene { hash: content_hash(&value), file })
    }

    pub fn dim(&self) -> usize {
        self.file.dimension
    }

    pub fn label(&self) -> Option<&str> {
        self.file.label.as_deref()
    }

    fn balls_from(&self, specs: &[BallSpec], what: &str) -> Result<Vec<Ball>, CliError> {
        specs
            .iter()
            .enumerate()
            .map(|(k, b)| {
                if b.center.len() != self.dim() {
                    return Err(CliError::Validation(format!(
                        "{what}[{k}]: center has {} coordinates, dimension is {}",
                        b.center.len(),
                        self.dim()
                    )));
                }
                Ball::interior(Vector::from_column_slice(&b.center), b.radius)
                    .map_err(|e| CliError::Validation(format!("{what}[{k}]: {e}")))
            })
            .collect()
    }

    /// Validation report of the removed balls.
    pub fn report(&self) -> Result<ValidationReport, CliError> {
        Ok(validate(self.dim(), &self.balls_from(&self.file.balls, "balls")?))
    }

    pub fn schottky_set(&self) -> Result<SchottkySet, CliError> {
        let balls = self.balls_from(&self.file.balls, "balls")?;
        let set = SchottkySet::new(self.dim(), balls).map_err(|e| CliError::Validation(e.to_string()))?;
        Ok(match self.label() {
            Some(l) => set.with_label(l),
            None => set,
        })
    }

    fn spheres(&self, specs: &[BallSpec], what: &str) -> Result<Vec<Sphere>, CliError> {
        Ok(self.balls_from(specs, what)?.into_iter().map(|b| b.sphere).collect())
    }

    fn matrix(&self, rows: &[Vec<f64>], what: &str) -> Result<DMatrix<f64>, CliError> {
        let n = self.dim();
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(CliError::Validation(format!("{what} must be a {n}×{n} matrix")));
        }
        Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    /// The boundary correspondence, lambda map and base strategy.
    pub fn correspondence(&self) -> Result<(BoundaryCorrespondence, LambdaMap, BaseStrategy), CliError> {
        let spec = self
            .file
            .correspondence
            .as_ref()
            .ok_or_else(|| CliError::Validation("scene has no correspondence".into()))?;
        let source = self.schottky_set()?;
        let n = self.dim();
        let m = source.len();
        let (lambda, word, linear) = match &spec.map {
            MapSpec::Identity => (LambdaMap::Identity, Some(Vec::new()), DMatrix::identity(n, n)),
            MapSpec::Moebius { word } => {
                let w = self.spheres(word, "correspondence.map.word")?;
                (LambdaMap::Moebius(w.clone()), Some(w), DMatrix::identity(n, n))
            }
            MapSpec::Affine { matrix, offset } => {
                let a = self.matrix(matrix, "correspondence.map.matrix")?;
                if offset.len() != n {
                    return Err(CliError::Validation(format!("correspondence.map.offset must have {n} entries")));
                }
                (LambdaMap::Affine { matrix: a.clone(), offset: Vector::from_column_slice(offset) }, None, a)
            }
        };
        let target = match (&spec.target_balls, &spec.map) {
            (Some(t), _) => SchottkySet::new(n, self.balls_from(t, "correspondence.target_balls")?)
                .map_err(|e| CliError::Validation(format!("target set: {e}")))?,
            (None, MapSpec::Identity) => source.clone(),
            (None, MapSpec::Moebius { .. }) => {
                let w = word.as_ref().expect("Möbius map has a word");
                let balls = source
                    .balls()
                    .iter()
                    .map(|b| apply_word_to_ball(w, b))
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|e| CliError::Validation(format!("target set: {e}")))?;
                SchottkySet::new(n, balls).map_err(|e| CliError::Validation(format!("target set: {e}")))?
            }
            (None, MapSpec::Affine { .. }) => {
                return Err(CliError::Validation("an affine correspondence needs target_balls".into()))
            }
        };
        let pairing = spec.pairing.clone().unwrap_or_else(|| (0..m).collect());
        let boundary = match (&spec.boundary, &word) {
            (Some(BoundarySpec::Moebius), Some(w)) | (None, Some(w)) => BoundaryMap::Moebius(w.clone()),
            (Some(BoundarySpec::Moebius), None) => {
                return Err(CliError::Validation("Möbius boundary maps need a Möbius or identity map".into()))
            }
            (Some(BoundarySpec::Directions { linear: l, resolution }), _) => {
                let l = match l {
                    Some(rows) => self.matrix(rows, "correspondence.boundary.linear")?,
                    None => DMatrix::identity(n, n),
                };
                let res = resolution.unwrap_or(schottky_lab::equivariant::DEFAULT_TABLE_RESOLUTION);
                BoundaryMap::Table(DirectionTable::from_fn(n, res, |w| &l * w))
            }
            (None, None) => {
                let res = schottky_lab::equivariant::DEFAULT_TABLE_RESOLUTION;
                BoundaryMap::Table(DirectionTable::from_fn(n, res, |w| &linear * w))
            }
        };
        let corr = BoundaryCorrespondence::new(source, target, pairing, vec![boundary; m])
            .map_err(|e| CliError::Validation(e.to_string()))?;
        Ok((corr, lambda, spec.base_strategy.unwrap_or_default()))
    }
}

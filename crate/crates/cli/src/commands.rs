//! The subcommands, as library functions returning an [`Outcome`].

use serde_json::{json, Value};

use schottky_lab::denjoy::{
    build_round_scene, discrepancy, scene_isometry_check, semiconjugacy_defect, volume_obstruction, DenjoyCircle,
    DenjoyError, Lift, MinimalTranslation, RadiusRule, VolumeVerdict, WeightRule,
};
use schottky_lab::equivariant::{equivariance_samples, EquivariantMap, SurveyGrid, SurveyReport};
use schottky_lab::qc::{dyadic_balls, nested_ball_conformality_test};
use schottky_lab::sampling::{default_direction_count, unit_directions};
use schottky_lab::tolerance::DEFAULT_MAX_DEPTH;
use schottky_lab::Vector;

use crate::canonical::pretty;
use crate::render::{axis_columns, orbit_svg, Cell, Csv};
use crate::scene::{DenjoySpec, LoadedScene, TorusSpec};
use crate::{exit, Artifact, CliError, Format, Outcome, TOOL_VERSION};

/// Largest orbit depth accepted by `orbit`.
pub const MAX_ORBIT_DEPTH: usize = 24;
pub const DEFAULT_ORBIT_DEPTH: usize = 3;
pub const DEFAULT_GRID: usize = 32;
pub const DEFAULT_RADII: [f64; 2] = [1e-3, 1e-4];
pub const DEFAULT_SAMPLES_PER_SPHERE: usize = 50;
/// Interior equivariance samples added to the sphere samples.
pub const INTERIOR_SAMPLES: usize = 50;
/// Equivariance residual above which a scene is flagged NONEQUIVARIANT.
pub const EQUIVARIANCE_THRESHOLD: f64 = 1e-6;
/// Off-artifact semiconjugacy defect accepted for a Denjoy circle.
pub const DEFECT_THRESHOLD: f64 = 1e-9;
pub const DEFAULT_CIRCLE_GRID: usize = 10_000;
pub const DEFAULT_DISCREPANCY_POINTS: usize = 10_000;

fn header(command: &str, hash: &str) -> serde_json::Map<String, Value> {
    let mut m = serde_json::Map::new();
    m.insert("command".into(), json!(command));
    m.insert("scene_hash".into(), json!(hash));
    m.insert("tool_version".into(), json!(TOOL_VERSION));
    m
}

fn outcome(command: &str, hash: &str, exit_code: u8, artifacts: Vec<Artifact>, messages: Vec<String>) -> Outcome {
    Outcome { command: command.into(), scene_hash: hash.into(), exit_code, artifacts, messages }
}

fn json_artifact(map: serde_json::Map<String, Value>) -> Artifact {
    Artifact { format: Format::Json, content: pretty(&Value::Object(map)) }
}

fn value<T: serde::Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("report types serialize to JSON")
}

/// Schema, Schottky-set and descriptor checks. Exit 1 when anything fails.
pub fn validate(scene: &LoadedScene) -> Outcome {
    let mut report = header("validate", &scene.hash);
    let mut messages = Vec::new();
    let file = &scene.file;
    let check_balls = !file.balls.is_empty() || (file.denjoy.is_none() && file.torus.is_none());
    if check_balls {
        match scene.report() {
            Ok(r) => {
                messages.extend(r.violations.iter().map(|v| v.to_string()));
                report.insert("schottky".into(), value(&r));
            }
            Err(e) => {
                messages.push(e.to_string());
                report.insert("schottky".into(), json!({"error": e.to_string()}));
            }
        }
    }
    if file.correspondence.is_some() && messages.is_empty() {
        let status = match scene.correspondence() {
            Ok(_) => json!("ok"),
            Err(e) => {
                messages.push(format!("correspondence: {e}"));
                json!({"error": e.to_string()})
            }
        };
        report.insert("correspondence".into(), status);
    }
    if let Some(d) = &file.denjoy {
        let status = match DenjoyCircle::build(d.alpha, &d.weights, d.orbit) {
            Ok(_) => json!("ok"),
            Err(e) => {
                messages.push(format!("denjoy: {e}"));
                json!({"error": e.to_string()})
            }
        };
        report.insert("denjoy".into(), status);
    }
    if let Some(t) = &file.torus {
        let status = match torus_inputs(t) {
            Ok(_) => json!("ok"),
            Err(e) => {
                messages.push(format!("torus: {e}"));
                json!({"error": e.to_string()})
            }
        };
        report.insert("torus".into(), status);
    }
    let valid = messages.is_empty();
    report.insert("valid".into(), json!(valid));
    report.insert("messages".into(), json!(messages));
    let code = if valid { exit::SUCCESS } else { exit::VALIDATION };
    outcome("validate", &scene.hash, code, vec![json_artifact(report)], messages)
}

/// Orbit packing to `depth`: CSV of balls, JSON counts, SVG for `n = 2`.
pub fn orbit(scene: &LoadedScene, depth: Option<usize>) -> Result<Outcome, CliError> {
    let depth = depth.or(scene.file.experiment.depth).unwrap_or(DEFAULT_ORBIT_DEPTH);
    if depth > MAX_ORBIT_DEPTH {
        return Err(CliError::Usage(format!("depth {depth} exceeds the limit of {MAX_ORBIT_DEPTH}")));
    }
    let set = scene.schottky_set()?;
    let packing = set.orbit_packing(depth).map_err(|e| CliError::Runtime(e.to_string()))?;
    let n = set.dim();

    let mut cols = vec!["depth".to_string(), "word".into(), "source".into()];
    cols.extend(axis_columns("c", n));
    cols.push("radius".into());
    let mut csv = Csv::new(&scene.hash, &cols);
    for b in &packing.balls {
        let (c, r) = b.ball.bounded().ok_or_else(|| CliError::Runtime("unbounded orbit ball".into()))?;
        let mut row = vec![Cell::Int(b.depth() as i64), Cell::Text(b.word.to_string()), Cell::Int(b.source as i64)];
        row.extend(c.iter().map(|x| Cell::Float(*x)));
        row.push(Cell::Float(r));
        csv.row(&row);
    }

    let mut summary = header("orbit", &scene.hash);
    summary.insert("label".into(), json!(scene.label()));
    summary.insert("dimension".into(), json!(n));
    summary.insert("depth".into(), json!(depth));
    summary.insert("ball_count".into(), json!(packing.balls.len()));
    summary.insert("counts_by_depth".into(), json!((0..=depth).map(|d| packing.at_depth(d).count()).collect::<Vec<_>>()));
    summary.insert("max_radius_by_depth".into(), json!(packing.max_radius_by_depth));

    let mut artifacts = vec![json_artifact(summary), Artifact { format: Format::Csv, content: csv.finish() }];
    if n == 2 {
        artifacts.push(Artifact { format: Format::Svg, content: orbit_svg(&packing, &scene.hash, scene.label()) });
    }
    Ok(outcome("orbit", &scene.hash, exit::SUCCESS, artifacts, Vec::new()))
}

/// Survey settings shared by `extend` and `dilatation`.
#[derive(Debug, Clone, Default)]
pub struct SurveyParams {
    pub grid: Option<usize>,
    pub depth: Option<usize>,
    pub radii: Option<Vec<f64>>,
}

struct Survey {
    em: EquivariantMap,
    grid: SurveyGrid,
    radii: Vec<f64>,
    report: SurveyReport,
}

fn survey(scene: &LoadedScene, params: &SurveyParams) -> Result<Survey, CliError> {
    let exp = &scene.file.experiment;
    let resolution = params.grid.or(exp.grid).unwrap_or(DEFAULT_GRID);
    let depth = params.depth.or(exp.max_depth).unwrap_or(DEFAULT_MAX_DEPTH);
    let mut radii = params.radii.clone().or_else(|| exp.radii.clone()).unwrap_or_else(|| DEFAULT_RADII.to_vec());
    if resolution == 0 {
        return Err(CliError::Usage("grid must be positive".into()));
    }
    if radii.is_empty() || radii.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
        return Err(CliError::Usage(format!("radii must be positive, got {radii:?}")));
    }
    radii.sort_by(|a, b| b.total_cmp(a));
    radii.dedup();
    let (corr, lambda, strategy) = scene.correspondence()?;
    let em = EquivariantMap::new(corr, lambda).with_strategy(strategy).with_max_depth(depth);
    let grid = SurveyGrid::around(em.correspondence.source(), 0.1, resolution);
    let n = scene.dim();
    let report = em.dilatation_survey(&grid, &radii, &unit_directions(n, default_direction_count(n)));
    if !report.points.is_empty() && report.points.iter().all(|p| p.error.is_some()) {
        return Err(CliError::Runtime(format!(
            "every grid point failed to evaluate, first error: {}",
            report.points[0].error.as_deref().unwrap_or("")
        )));
    }
    Ok(Survey { em, grid, radii, report })
}

fn h_summary(report: &SurveyReport) -> Value {
    json!({
        "max_h": report.max_h,
        "min_h": report.min_h,
        "median_h": report.median_h,
        "failures": report.failures,
    })
}

fn survey_settings(s: &Survey) -> Value {
    json!({
        "grid": {"lower": s.grid.lower, "upper": s.grid.upper, "resolution": s.grid.resolution},
        "max_depth": s.em.max_depth,
        "radii": s.radii,
        "base_strategy": value(&s.em.base_strategy),
    })
}

/// Equivariant extension over a grid: values, equivariance per generator,
/// and local dilatation.
pub fn extend(scene: &LoadedScene, params: &SurveyParams) -> Result<Outcome, CliError> {
    let s = survey(scene, params)?;
    let source = s.em.correspondence.source();
    let n = source.dim();
    let per_sphere = scene.file.experiment.samples_per_sphere.unwrap_or(DEFAULT_SAMPLES_PER_SPHERE);
    let samples = equivariance_samples(source, per_sphere, INTERIOR_SAMPLES);
    let mut checks = Vec::new();
    let mut max_residual = 0.0f64;
    for i in 0..source.len() {
        let c = s.em.check_equivariance(i, &samples).map_err(|e| CliError::Runtime(e.to_string()))?;
        max_residual = max_residual.max(c.max_residual);
        checks.push(c);
    }
    let equivariant = max_residual <= EQUIVARIANCE_THRESHOLD;

    let mut cols = axis_columns("x", n);
    cols.extend(["word_len".to_string(), "status".into()]);
    cols.extend(axis_columns("f", n));
    cols.extend(s.radii.iter().map(|r| format!("H@{}", crate::canonical::format_float(*r))));
    cols.push("error".into());
    let mut csv = Csv::new(&scene.hash, &cols);
    let (mut landed, mut capped, mut errors) = (0usize, 0usize, 0usize);
    for p in &s.report.points {
        let mut row: Vec<Cell> = p.point.iter().map(|x| Cell::Float(*x)).collect();
        match p.word_len {
            Some(w) => {
                row.push(Cell::Int(w as i64));
                row.push(Cell::Text(if p.capped { "capped" } else { "landed" }.into()));
                if p.capped {
                    capped += 1;
                } else {
                    landed += 1;
                }
            }
            None => {
                errors += 1;
                row.push(Cell::Empty);
                row.push(Cell::Text("error".into()));
            }
        }
        match &p.value {
            Some(v) => row.extend(v.iter().map(|x| Cell::Float(*x))),
            None => row.extend((0..n).map(|_| Cell::Empty)),
        }
        for r in &s.radii {
            let h = p.profile.as_ref().and_then(|pr| pr.entries.iter().find(|e| e.radius == *r)).map(|e| e.ratio);
            row.push(h.map_or(Cell::Empty, Cell::Float));
        }
        row.push(p.error.clone().map_or(Cell::Empty, Cell::Text));
        csv.row(&row);
    }

    let mut summary = header("extend", &scene.hash);
    summary.insert("label".into(), json!(scene.label()));
    summary.insert("settings".into(), survey_settings(&s));
    summary.insert(
        "equivariance".into(),
        json!({
            "samples": samples.len(),
            "generators": value(&checks),
            "max_residual": max_residual,
            "threshold": EQUIVARIANCE_THRESHOLD,
            "verdict": if equivariant { "EQUIVARIANT" } else { "NONEQUIVARIANT" },
        }),
    );
    summary.insert("evaluation".into(), json!({"points": s.report.points.len(), "landed": landed, "depth_capped": capped, "errors": errors}));
    summary.insert("dilatation".into(), h_summary(&s.report));
    let mut messages = Vec::new();
    if !equivariant {
        messages.push(format!("NONEQUIVARIANT: max residual {max_residual:e} exceeds {EQUIVARIANCE_THRESHOLD:e}"));
    }
    let artifacts = vec![json_artifact(summary), Artifact { format: Format::Csv, content: csv.finish() }];
    Ok(outcome("extend", &scene.hash, exit::SUCCESS, artifacts, messages))
}

/// Dilatation profiles of the extension over a grid, plus a nested-ball
/// conformality test at the scene's probe point when one is given.
pub fn dilatation(scene: &LoadedScene, params: &SurveyParams) -> Result<Outcome, CliError> {
    let s = survey(scene, params)?;
    let n = scene.dim();
    let mut cols = axis_columns("x", n);
    cols.extend(["radius".to_string(), "L".into(), "l".into(), "H".into()]);
    let mut csv = Csv::new(&scene.hash, &cols);
    for p in &s.report.points {
        let Some(profile) = &p.profile else { continue };
        for e in &profile.entries {
            let mut row: Vec<Cell> = p.point.iter().map(|x| Cell::Float(*x)).collect();
            row.extend([Cell::Float(e.radius), Cell::Float(e.max_stretch), Cell::Float(e.min_stretch), Cell::Float(e.ratio)]);
            csv.row(&row);
        }
    }
    let mut summary = header("dilatation", &scene.hash);
    summary.insert("label".into(), json!(scene.label()));
    summary.insert("settings".into(), survey_settings(&s));
    summary.insert("points".into(), json!(s.report.points.len()));
    summary.insert("dilatation".into(), h_summary(&s.report));
    if let Some(probe) = &scene.file.experiment.probe {
        if probe.len() != n {
            return Err(CliError::Validation(format!("experiment.probe must have {n} coordinates")));
        }
        let p = Vector::from_column_slice(probe);
        let dirs = unit_directions(n, default_direction_count(n));
        let nested = match nested_ball_conformality_test(&s.em, &p, &dyadic_balls(&p, 4, 14), &dirs) {
            Ok(r) => value(&r),
            Err(e) => json!({"error": e.to_string()}),
        };
        summary.insert("nested_balls".into(), nested);
    }
    let artifacts = vec![json_artifact(summary), Artifact { format: Format::Csv, content: csv.finish() }];
    Ok(outcome("dilatation", &scene.hash, exit::SUCCESS, artifacts, Vec::new()))
}

fn denjoy_error(e: DenjoyError, echo: &str) -> CliError {
    match e {
        DenjoyError::Construction(_) | DenjoyError::Schottky(_) => CliError::Runtime(format!("{e} ({echo})")),
        _ => CliError::Validation(format!("{e} ({echo})")),
    }
}

/// Golden-mean rotation number.
pub fn golden() -> f64 {
    (5f64.sqrt() - 1.0) / 2.0
}

#[derive(Debug, Clone, Default)]
pub struct CircleParams {
    pub alpha: Option<f64>,
    pub orbit: Option<usize>,
    pub weights: Option<WeightRule>,
    pub grid: Option<usize>,
}

/// Denjoy circle: semiconjugacy defect and wandering check.
pub fn denjoy_circle(scene: Option<&LoadedScene>, params: &CircleParams) -> Result<Outcome, CliError> {
    let spec: Option<&DenjoySpec> = scene.and_then(|s| s.file.denjoy.as_ref());
    let alpha = params.alpha.or(spec.map(|s| s.alpha)).unwrap_or_else(golden);
    let orbit = params.orbit.or(spec.map(|s| s.orbit)).unwrap_or(20);
    let weights = params
        .weights
        .clone()
        .or_else(|| spec.map(|s| s.weights.clone()))
        .unwrap_or(WeightRule::Geometric { scale: 0.25 });
    let grid = params.grid.or(spec.and_then(|s| s.grid)).unwrap_or(DEFAULT_CIRCLE_GRID);
    if grid == 0 {
        return Err(CliError::Usage("grid must be positive".into()));
    }
    let hash = scene.map_or_else(|| "none".to_string(), |s| s.hash.clone());
    let echo = format!("alpha={alpha}, orbit={orbit}, weights={weights:?}");
    let dc = DenjoyCircle::build(alpha, &weights, orbit).map_err(|e| denjoy_error(e, &echo))?;
    let defect = semiconjugacy_defect(&dc, grid);
    let wandering = dc.wandering_check(2 * orbit);

    let mut csv = Csv::new(&hash, &["y", "f", "h", "defect", "artifact"].map(String::from));
    for i in 0..grid {
        let y = i as f64 / grid as f64;
        let fy = dc.apply(y);
        let d = schottky_lab::denjoy::circle_distance(dc.collapse(fy), dc.rotate(dc.collapse(y)));
        csv.row(&[Cell::Float(y), Cell::Float(fy), Cell::Float(dc.collapse(y)), Cell::Float(d), Cell::Int(dc.in_artifact(y) as i64)]);
    }

    let semiconjugate = defect.max_defect <= DEFECT_THRESHOLD;
    let mut summary = header("denjoy circle", &hash);
    summary.insert("alpha".into(), json!(alpha));
    summary.insert("orbit".into(), json!(orbit));
    summary.insert("weights".into(), value(&weights));
    summary.insert("normalization".into(), json!(dc.normalization));
    summary.insert("artifacts".into(), value(&dc.artifacts));
    summary.insert("defect".into(), value(&defect));
    summary.insert("defect_threshold".into(), json!(DEFECT_THRESHOLD));
    summary.insert(
        "wandering".into(),
        json!({
            "checked_up_to": 2 * orbit,
            "result": if wandering.is_ok() { "PASS" } else { "FAIL" },
            "first_return": wandering.err(),
        }),
    );
    summary.insert("verdict".into(), json!(if semiconjugate { "SEMICONJUGATE" } else { "DEFECT" }));
    let artifacts = vec![json_artifact(summary), Artifact { format: Format::Csv, content: csv.finish() }];
    Ok(outcome("denjoy circle", &hash, exit::SUCCESS, artifacts, Vec::new()))
}

#[derive(Debug, Clone, Default)]
pub struct TorusParams {
    pub rho: Option<Vec<f64>>,
    pub base: Option<Vec<f64>>,
    pub orbit: Option<usize>,
    pub radii: Option<RadiusRule>,
    pub discrepancy_points: Option<usize>,
}

fn torus_inputs(spec: &TorusSpec) -> Result<(MinimalTranslation, Vec<f64>), DenjoyError> {
    let t = MinimalTranslation::new(spec.rho.clone())?;
    let radii = spec.radii.radii(spec.orbit)?;
    Ok((t, radii))
}

/// Round torus scene: isometry-forcing fit, volume bound and orbit
/// discrepancy.
pub fn denjoy_torus(scene: Option<&LoadedScene>, params: &TorusParams) -> Result<Outcome, CliError> {
    let spec: Option<&TorusSpec> = scene.and_then(|s| s.file.torus.as_ref());
    let rho = params
        .rho
        .clone()
        .or_else(|| spec.map(|s| s.rho.clone()))
        .unwrap_or_else(|| vec![golden(), 2f64.sqrt() - 1.0]);
    let n = rho.len();
    if n == 0 {
        return Err(CliError::Usage("rho needs at least one coordinate".into()));
    }
    let base = params.base.clone().or_else(|| spec.and_then(|s| s.base.clone())).unwrap_or_else(|| vec![0.0; n]);
    if base.len() != n {
        return Err(CliError::Validation(format!("base point has {} coordinates, rho has {n}", base.len())));
    }
    let orbit = params.orbit.or(spec.map(|s| s.orbit)).unwrap_or(10);
    let rule = params
        .radii
        .clone()
        .or_else(|| spec.map(|s| s.radii.clone()))
        .unwrap_or(RadiusRule::Constant { radius: 0.01 });
    let points = params.discrepancy_points.or(spec.and_then(|s| s.discrepancy_points)).unwrap_or(DEFAULT_DISCREPANCY_POINTS);
    let hash = scene.map_or_else(|| "none".to_string(), |s| s.hash.clone());
    let echo = format!("rho={rho:?}, orbit={orbit}, radii={rule:?}");
    let inputs = TorusSpec { rho: rho.clone(), base: Some(base.clone()), orbit, radii: rule.clone(), discrepancy_points: None };
    let (translation, radii) = torus_inputs(&inputs).map_err(|e| denjoy_error(e, &echo))?;

    // an isometric permutation keeps every disk at the radius of D_0
    let r0 = radii[orbit];
    let demanded = 2 * orbit as u64 + 1;
    let volume = volume_obstruction(n, r0, 1.0, Some(demanded));
    let contradiction = volume.verdict == Some(VolumeVerdict::Contradiction);

    let mut summary = header("denjoy torus", &hash);
    summary.insert("rho".into(), json!(rho));
    summary.insert("base".into(), json!(base));
    summary.insert("orbit".into(), json!(orbit));
    summary.insert("radius_rule".into(), value(&rule));
    summary.insert("volume".into(), value(&volume));
    let mut csv = Csv::new(&hash, &{
        let mut c = vec!["k".to_string()];
        c.extend(axis_columns("c", n));
        c.push("radius".into());
        c
    });
    let equal_radii = matches!(rule, RadiusRule::Constant { .. });
    let verdict;
    if contradiction && equal_radii {
        summary.insert("scene".into(), Value::Null);
        summary.insert("fit".into(), Value::Null);
        verdict = "CONTRADICTION".to_string();
    } else {
        let scene_t = build_round_scene(&translation, &Lift::from_real(&base), orbit, &rule).map_err(|e| denjoy_error(e, &echo))?;
        for (k, (c, r)) in scene_t.local_centers().iter().zip(&scene_t.radii).enumerate() {
            let mut row = vec![Cell::Int(k as i64 - orbit as i64)];
            row.extend(c.iter().map(|x| Cell::Float(*x)));
            row.push(Cell::Float(*r));
            csv.row(&row);
        }
        summary.insert(
            "scene".into(),
            json!({
                "radii": scene_t.radii,
                "shrink_count": scene_t.shrink_count,
                "total_volume": scene_t.total_volume,
                "min_gap": scene_t.min_gap,
                "wandering": scene_t.is_wandering(),
            }),
        );
        match scene_isometry_check(&scene_t) {
            Ok(fit) => {
                verdict = if contradiction { "CONTRADICTION".to_string() } else { value(&fit.verdict).as_str().unwrap_or_default().to_string() };
                summary.insert("fit".into(), value(&fit));
            }
            Err(e) => {
                verdict = if contradiction { "CONTRADICTION".to_string() } else { "INSUFFICIENT_DATA".to_string() };
                summary.insert("fit".into(), json!({"error": e.to_string()}));
            }
        }
    }
    summary.insert("discrepancy".into(), json!({"points": points, "value": discrepancy(translation.vector(), points.max(1))}));
    summary.insert("verdict".into(), json!(verdict));
    let artifacts = vec![json_artifact(summary), Artifact { format: Format::Csv, content: csv.finish() }];
    Ok(outcome("denjoy torus", &hash, exit::SUCCESS, artifacts, Vec::new()))
}

/// Parses `geometric:SCALE`, `inverse-square:SCALE` or `zero`.
pub fn parse_weights(s: &str) -> Result<WeightRule, CliError> {
    let parts: Vec<&str> = s.split(':').collect();
    let num = |k: usize| -> Result<f64, CliError> {
        parts.get(k).and_then(|p| p.parse().ok()).ok_or_else(|| CliError::Usage(format!("bad weight rule {s:?}")))
    };
    match parts[0] {
        "zero" if parts.len() == 1 => Ok(WeightRule::Zero),
        "geometric" if parts.len() == 2 => Ok(WeightRule::Geometric { scale: num(1)? }),
        "inverse-square" if parts.len() == 2 => Ok(WeightRule::InverseSquare { scale: num(1)? }),
        _ => Err(CliError::Usage(format!("bad weight rule {s:?}; expected geometric:S, inverse-square:S or zero"))),
    }
}

/// Parses `constant:R`, `harmonic:S` or `geometric:BASE:RATIO`.
pub fn parse_radius_rule(s: &str) -> Result<RadiusRule, CliError> {
    let parts: Vec<&str> = s.split(':').collect();
    let num = |k: usize| -> Result<f64, CliError> {
        parts.get(k).and_then(|p| p.parse().ok()).ok_or_else(|| CliError::Usage(format!("bad radius rule {s:?}")))
    };
    match parts[0] {
        "constant" if parts.len() == 2 => Ok(RadiusRule::Constant { radius: num(1)? }),
        "harmonic" if parts.len() == 2 => Ok(RadiusRule::Harmonic { scale: num(1)? }),
        "geometric" if parts.len() == 3 => Ok(RadiusRule::Geometric { base: num(1)?, ratio: num(2)? }),
        _ => Err(CliError::Usage(format!("bad radius rule {s:?}; expected constant:R, harmonic:S or geometric:B:Q"))),
    }
}

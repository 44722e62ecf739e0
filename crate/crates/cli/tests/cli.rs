use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn scene(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenes").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_schottky-lab")).args(args).output().unwrap()
}

fn run_scene(cmd: &[&str], name: &str, extra: &[&str]) -> Output {
    let path = scene(name);
    let mut args: Vec<&str> = cmd.to_vec();
    args.push(path.to_str().unwrap());
    args.extend_from_slice(extra);
    run(&args)
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn validate_exit_codes() {
    assert_eq!(run_scene(&["validate"], "three_disks.json", &[]).status.code(), Some(0));

    let out = run_scene(&["validate"], "overlapping.json", &[]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("balls 0 and 1"), "{}", stderr(&out));
    assert_eq!(json(&out)["schottky"]["min_gap_pair"], serde_json::json!([0, 1]));

    let out = run_scene(&["validate"], "two_disks.json", &[]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("at least three"));
}

#[test]
fn unreadable_and_malformed_scenes() {
    assert_eq!(run(&["validate", "/nonexistent/scene.json"]).status.code(), Some(3));

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, "{\n  \"version\": 1,\n  \"dimension\": 2,\n  \"colour\": \"red\",\n  \"balls\": []\n}\n").unwrap();
    let out = run(&["validate", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = stderr(&out);
    assert!(err.contains("colour") && err.contains("line 4"), "{err}");
}

#[test]
fn usage_errors_exit_three() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(3));
    assert_eq!(run_scene(&["orbit"], "symmetric.json", &["--depth", "25"]).status.code(), Some(3));
    assert_eq!(run_scene(&["orbit"], "symmetric.json", &["--depth", "x"]).status.code(), Some(3));
    assert_eq!(run(&["denjoy", "circle", "--weights", "cubic:2"]).status.code(), Some(3));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn orbit_counts_and_svg() {
    let out = run_scene(&["orbit"], "symmetric.json", &["--depth", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let summary = json(&out);
    assert_eq!(summary["ball_count"], 45);
    assert_eq!(summary["counts_by_depth"], serde_json::json!([3, 6, 12, 24]));

    let svg = String::from_utf8(run_scene(&["orbit"], "symmetric.json", &["--format", "svg"]).stdout).unwrap();
    assert_eq!(svg.matches("<circle").count(), 45);
    assert!(svg.contains(summary["scene_hash"].as_str().unwrap()));

    let svg0 = String::from_utf8(run_scene(&["orbit"], "symmetric.json", &["--depth", "0", "--format", "svg"]).stdout).unwrap();
    assert_eq!(svg0.matches("<circle").count(), 3);
    assert!(svg0.contains("cx=\"1.0000000000000000e0\" cy=\"0.0000000000000000e0\" r=\"2.9999999999999999e-1\""));
}

#[test]
fn orbit_csv_rows_match_the_ball_count() {
    let out = run_scene(&["orbit"], "three_disks.json", &["--depth", "4", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# schottky-lab"));
    assert_eq!(lines.next().unwrap(), "depth,word,source,c0,c1,radius");
    assert_eq!(lines.count(), 3 + 6 + 12 + 24 + 48);
}

#[test]
fn out_directory_holds_artifacts_and_metadata() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_scene(&["orbit"], "symmetric.json", &["--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    for f in ["orbit.csv", "orbit.json", "orbit.svg", "run_metadata.json"] {
        assert!(dir.path().join(f).exists(), "{f} missing");
    }
    let meta: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("run_metadata.json")).unwrap()).unwrap();
    assert_eq!(meta["exit_code"], 0);
    assert!(meta["unix_time"].as_u64().unwrap() > 0);
    assert_eq!(meta["scene_hash"].as_str().unwrap().len(), 64);
}

#[test]
fn editing_a_scene_changes_its_hash() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(scene("three_disks.json")).unwrap();
    let reformatted = dir.path().join("a.json");
    let edited = dir.path().join("b.json");
    std::fs::write(&reformatted, text.replace("\n", " ").replace("0.2}", "2e-1}")).unwrap();
    std::fs::write(&edited, text.replacen("0.2}", "0.21}", 1)).unwrap();
    let hash = |p: &Path| json(&run(&["validate", p.to_str().unwrap()]))["scene_hash"].as_str().unwrap().to_string();
    let original = hash(&scene("three_disks.json"));
    assert_eq!(hash(&reformatted), original);
    assert_ne!(hash(&edited), original);
}

#[test]
fn extend_moebius_identity_and_mismatched() {
    let out = run_scene(&["extend"], "moebius.json", &[]);
    assert_eq!(out.status.code(), Some(0));
    let s = json(&out);
    assert!(s["equivariance"]["max_residual"].as_f64().unwrap() <= 1e-9);
    assert_eq!(s["equivariance"]["verdict"], "EQUIVARIANT");
    assert!(s["dilatation"]["max_h"].as_f64().unwrap() <= 1.0 + 1e-3);

    let s = json(&run_scene(&["extend"], "identity.json", &[]));
    // γ(γx) = x holds only up to rounding
    assert!(s["equivariance"]["max_residual"].as_f64().unwrap() <= 1e-14);
    assert!((s["dilatation"]["max_h"].as_f64().unwrap() - 1.0).abs() <= 1e-9);
    assert!((s["dilatation"]["min_h"].as_f64().unwrap() - 1.0).abs() <= 1e-9);

    let out = run_scene(&["extend"], "mismatched.json", &[]);
    assert_eq!(out.status.code(), Some(0));
    let s = json(&out);
    assert!(s["equivariance"]["max_residual"].as_f64().unwrap() >= 0.1);
    assert_eq!(s["equivariance"]["verdict"], "NONEQUIVARIANT");
    assert!(stderr(&out).contains("NONEQUIVARIANT"));
}

#[test]
fn extend_flags_override_the_scene() {
    let s = json(&run_scene(&["extend"], "identity.json", &["--grid", "5", "--radii", "0.01,0.001", "--depth", "3"]));
    assert_eq!(s["evaluation"]["points"], 25);
    assert_eq!(s["settings"]["max_depth"], 3);
    let csv = String::from_utf8(run_scene(&["extend"], "identity.json", &["--grid", "5", "--format", "csv"]).stdout).unwrap();
    assert_eq!(csv.lines().count(), 2 + 25);
}

#[test]
fn extend_requires_a_correspondence() {
    let out = run_scene(&["extend"], "three_disks.json", &[]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("no correspondence"));
}

#[test]
fn dilatation_of_stretched_data() {
    let s = json(&run_scene(&["dilatation"], "stretch.json", &[]));
    assert!((s["dilatation"]["median_h"].as_f64().unwrap() - 2.0).abs() <= 0.1);
    assert_eq!(s["nested_balls"]["verdict"], "NON-CONFORMAL");
}

#[test]
fn denjoy_circle_reports() {
    let s = json(&run_scene(&["denjoy", "circle"], "denjoy_circle.json", &[]));
    assert!(s["defect"]["max_defect"].as_f64().unwrap() <= 1e-9);
    assert_eq!(s["wandering"]["result"], "PASS");
    assert_eq!(s["verdict"], "SEMICONJUGATE");

    let s = json(&run(&["denjoy", "circle", "--weights", "zero", "--grid", "1000"]));
    assert_eq!(s["defect"]["max_defect_all"].as_f64().unwrap(), 0.0);

    let out = run(&["denjoy", "circle", "--alpha", "0.375"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("alpha=0.375"), "{}", stderr(&out));
}

#[test]
fn denjoy_torus_verdicts() {
    let s = json(&run_scene(&["denjoy", "torus"], "torus_decreasing.json", &[]));
    assert_eq!(s["verdict"], "THEOREM_WITNESS");
    assert!(s["fit"]["residual"].as_f64().unwrap() >= 1e-3);

    let s = json(&run(&["denjoy", "torus", "--radius-rule", "constant:0.01"]));
    assert_eq!(s["verdict"], "ISOMETRY_FITS");

    let s = json(&run(&["denjoy", "torus", "--radius-rule", "constant:0.05", "--orbit", "70"]));
    assert_eq!(s["verdict"], "CONTRADICTION");
    assert_eq!(s["volume"]["n_max"], 127);
    assert_eq!(s["volume"]["demanded"], 141);
}

#[test]
fn thread_count_does_not_change_output() {
    let path = scene("moebius.json");
    let with = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_schottky-lab"))
            .args(["extend", path.to_str().unwrap(), "--format", "csv", "--grid", "12"])
            .env("SCHOTTKY_LAB_THREADS", threads)
            .output()
            .unwrap()
    };
    let one = with("1");
    let four = with("4");
    assert!(one.status.success());
    assert_eq!(one.stdout, four.stdout);
    assert_eq!(with("zero").status.code(), Some(3));
}

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_mimo-lab");

fn mimo(args: &[&str]) -> Output {
    Command::new(BIN).args(args).env_remove("MIMO_LAB_OUT").output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn files_with_ext(dir: &Path, ext: &str) -> Vec<PathBuf> {
    let mut v: Vec<PathBuf> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == ext))
        .collect();
    v.sort();
    v
}

const SMALL: &[&str] = &["--n", "24", "--m", "12", "--k", "4", "--k-values", "2,4,6"];

fn run_small(experiment: &str, dir: &Path, extra: &[&str]) -> Output {
    let mut args = vec!["run", experiment, "--out", dir.to_str().unwrap()];
    args.extend_from_slice(SMALL);
    args.extend_from_slice(extra);
    mimo(&args)
}

#[test]
fn sparse_geometry_summary() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("g.csv");
    let o = mimo(&[
        "geometry", "--kind", "sparse", "--n", "200", "--d0", "2", "--alpha", "-0.03", "--out",
        csv.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("min_spacing_wl=1.53"), "{out}");
    assert!(out.contains("max_spacing_wl=2.24"), "{out}");
    let text = fs::read_to_string(csv).unwrap();
    assert!(text.starts_with("index,x_m,y_m\n"));
    assert_eq!(text.lines().count(), 201);
}

#[test]
fn linear_far_field() {
    let o = mimo(&["geometry", "--kind", "linear", "--n", "200", "--d", "0.5"]);
    assert!(o.status.success());
    let out = stdout(&o);
    let ff: f64 = out
        .split_whitespace()
        .find_map(|t| t.strip_prefix("far_field_m="))
        .unwrap()
        .parse()
        .unwrap();
    assert!((ff - 98.94).abs() < 0.01, "{ff}");
}

#[test]
fn inadmissible_alpha_exits_2() {
    let o = mimo(&["geometry", "--kind", "sparse", "--n", "200", "--d0", "2", "--alpha", "-0.2"]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("alpha") && err.contains("strictly increasing"), "{err}");
}

#[test]
fn unknown_experiment_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_small("cond-mop", dir.path(), &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("unknown experiment"));
}

#[test]
fn validate_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let write = |name: &str, text: &str| {
        let p = dir.path().join(name);
        fs::write(&p, text).unwrap();
        p
    };
    let ok = write("ok.json", "{}");
    let radii = write("radii.json", r#"{"scenario": {"r_min": 200, "r_max": 100}}"#);
    let unknown = write("unknown.json", r#"{"n_antenas": 64}"#);

    assert_eq!(mimo(&["validate", ok.to_str().unwrap()]).status.code(), Some(0));
    let o = mimo(&["validate", radii.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("r_min < r_max"), "{}", stderr(&o));
    let o = mimo(&["validate", unknown.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("n_antenas"));
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    fs::write(&cfg, r#"{"master_seed": 5, "snr_db": 10}"#).unwrap();
    let o = run_small(
        "zf-rate",
        dir.path(),
        &["--config", cfg.to_str().unwrap(), "--seed", "9", "--zf-geoms", "linear:0.5"],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let json = files_with_ext(dir.path(), "json")
        .into_iter()
        .find(|p| p.file_name().unwrap().to_str().unwrap().starts_with("zf-rate_"))
        .unwrap();
    assert!(json.to_str().unwrap().ends_with("_0000000000000009.json"));
    let meta = fs::read_to_string(&json).unwrap();
    assert!(meta.contains(r#""master_seed": 9"#), "{meta}");
    assert!(meta.contains(r#""snr_db": 10.0"#), "{meta}");
    assert!(!meta.contains("workers"));
}

#[test]
fn identical_outputs_across_runs_and_workers() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let extra = ["--seed", "42", "--zf-geoms", "linear:0.5,sparse:2:-0.03"];
    let o = run_small("zf-rate", a.path(), &[&extra[..], &["--workers", "1"]].concat());
    assert!(o.status.success(), "{}", stderr(&o));
    let o = run_small("zf-rate", b.path(), &[&extra[..], &["--workers", "3"]].concat());
    assert!(o.status.success(), "{}", stderr(&o));
    for ext in ["csv", "json"] {
        let fa = fs::read(&files_with_ext(a.path(), ext)[0]).unwrap();
        let fb = fs::read(&files_with_ext(b.path(), ext)[0]).unwrap();
        assert_eq!(fa, fb, "{ext} differs");
    }
}

#[test]
fn same_second_runs_do_not_overwrite() {
    let dir = tempfile::tempdir().unwrap();
    for _ in 0..2 {
        let o = run_small("corr-radial", dir.path(), &[]);
        assert!(o.status.success(), "{}", stderr(&o));
    }
    assert_eq!(files_with_ext(dir.path(), "csv").len(), 2);
}

#[test]
fn reproduce_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_small("cond-map", dir.path(), &["--d-values", "0.5,2", "--seed", "3"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let sidecar = files_with_ext(dir.path(), "json").remove(0);
    let out = tempfile::tempdir().unwrap();
    let o = mimo(&[
        "reproduce",
        sidecar.to_str().unwrap(),
        "--workers",
        "2",
        "--out",
        out.path().to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("identical"));
}

#[test]
fn alpha_sweep_writes_curve() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_small(
        "alpha-sweep",
        dir.path(),
        &["--d0", "2", "--alpha-range", "-0.1,0.2", "--alpha-points", "4"],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let curve = files_with_ext(dir.path(), "csv")
        .into_iter()
        .find(|p| p.to_str().unwrap().ends_with("_curve.csv"))
        .expect("curve file");
    let text = fs::read_to_string(curve).unwrap();
    assert!(text.starts_with("alpha,objective_db\n-0.1,"));
    assert_eq!(text.lines().count(), 5);
}

#[test]
fn output_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = vec!["run", "corr-radial"];
    args.extend_from_slice(SMALL);
    let o = Command::new(BIN).args(&args).env("MIMO_LAB_OUT", dir.path()).output().unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(files_with_ext(dir.path(), "csv").len(), 1);
}

#[test]
fn runtime_errors_name_the_cell() {
    let dir = tempfile::tempdir().unwrap();
    // An odd-sized array has an element at the origin, where these terminals sit.
    let cfg = dir.path().join("c.json");
    fs::write(&cfg, r#"{"scenario": {"r_min": 1e-9, "r_max": 2e-9}}"#).unwrap();
    let o = mimo(&[
        "run", "cond-map", "--out", dir.path().to_str().unwrap(), "--config",
        cfg.to_str().unwrap(), "--n", "25", "--m", "4", "--k", "2", "--k-values", "2", "--d-values", "0.5",
    ]);
    let err = stderr(&o);
    assert_eq!(o.status.code(), Some(1), "{err}");
    assert!(err.contains("d=0.5, k=2"), "{err}");
}

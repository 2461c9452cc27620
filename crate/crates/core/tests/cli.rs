use std::path::Path;

use clap::Parser;
use dunkl_lab::cli::{export_plot_data, run, Cli, RunConfigFile};
use dunkl_lab::trajectory::read_csv;
use dunkl_lab::Error;

fn invoke(args: &[&str]) -> (dunkl_lab::Result<bool>, String) {
    let cli = Cli::try_parse_from(std::iter::once("dunkl-lab").chain(args.iter().copied())).unwrap();
    let mut out = Vec::new();
    let r = run(&cli, &mut out);
    (r, String::from_utf8(out).unwrap())
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

fn radial_config(dir: &Path, out: &Path) -> String {
    write_config(
        dir,
        "radial.json",
        &format!(
            r#"{{"system": {{"type": "custom", "roots": [[1.0]]}}, "k": [0.3], "x0": [0.2],
               "sim": {{"T": 1.0, "dt": 1e-3, "paths": 200, "seed": 5}},
               "output": {{"path": {:?}, "format": "csv"}}}}"#,
            out.to_str().unwrap()
        ),
    )
}

#[test]
fn describe_b2_is_all_true() {
    let (r, text) = invoke(&["describe", "--system", "B", "--n", "2"]);
    assert!(r.unwrap());
    assert!(text.contains("|W| = 8"));
    assert_eq!(text.matches(": true").count(), 4);
    assert!(!text.contains(": false"));
}

#[test]
fn describe_a2_has_a_false_entry() {
    let (r, text) = invoke(&["describe", "--system", "A", "--n", "3", "--json"]);
    assert!(r.unwrap());
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["weyl_order"], 6);
    let inv: Vec<bool> = serde_json::from_value(v["invariance"].clone()).unwrap();
    assert!(inv[1..inv.len() - 1].contains(&false));
}

#[test]
fn simulate_radial_reports_wall_hits_and_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.csv");
    let cfg = radial_config(dir.path(), &out);
    let (r, text) = invoke(&["simulate-radial", "--config", &cfg]);
    assert!(r.unwrap());
    let summary: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert!(summary["hit_fraction"].as_f64().unwrap() > 0.0);
    let first = std::fs::read(&out).unwrap();
    assert!(String::from_utf8_lossy(&first).contains(",T0\n"));
    let (r, _) = invoke(&["--threads", "2", "simulate-radial", "--config", &cfg]);
    assert!(r.unwrap());
    assert_eq!(std::fs::read(&out).unwrap(), first);
    let summary_file = dir.path().join("r.csv.summary.json");
    assert!(summary_file.exists());
}

#[test]
fn simulate_dunkl_writes_jump_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("d.csv");
    let cfg = write_config(
        dir.path(),
        "d.json",
        &format!(
            r#"{{"system": {{"type": "B", "n": 2}}, "k": [1.0], "x0": [2.0, 1.0],
               "sim": {{"T": 1.0, "dt": 1e-3, "paths": 20, "seed": 3, "recording": {{"every": 50}}}},
               "output": {{"path": {:?}}}}}"#,
            out.to_str().unwrap()
        ),
    );
    for mode in ["shortcut", "general", "auto"] {
        let (r, _) = invoke(&["simulate-dunkl", "--config", &cfg, "--mode", mode]);
        assert!(r.unwrap());
        let rows = read_csv(std::fs::File::open(&out).map(std::io::BufReader::new).unwrap()).unwrap();
        assert!(rows.iter().any(|r| r.event.starts_with("jump:")));
    }
    let a2 = write_config(
        dir.path(),
        "a2.json",
        r#"{"system": {"type": "A", "n": 3}, "k": [1.0], "x0": [1.0, 0.0, -1.0],
            "sim": {"T": 0.1, "dt": 1e-3, "paths": 2, "seed": 3}}"#,
    );
    let (r, _) = invoke(&["simulate-dunkl", "--config", &a2, "--mode", "shortcut"]);
    assert!(matches!(r, Err(Error::InvalidPlan(_))));
    let (r, text) = invoke(&["simulate-dunkl", "--config", &a2]);
    assert!(r.unwrap());
    assert!(text.starts_with("path_id,t,x_1,x_2,x_3,event"));
}

#[test]
fn schema_errors_carry_pointers() {
    let base = r#"{"system": {"type": "B", "n": 2}, "k": [1.0], "x0": [2.0, 1.0],
                  "sim": {"T": 1.0, "dt": 1e-3, "paths": 10, "seed": 3}}"#;
    let err = |text: &str, sets: &[&str]| {
        let sets: Vec<String> = sets.iter().map(|s| s.to_string()).collect();
        match RunConfigFile::parse(text, &sets, None) {
            Err(Error::Config { pointer, .. }) => pointer,
            other => panic!("expected a config error, got {other:?}"),
        }
    };
    assert_eq!(err(base, &["sim.extra=1"]), "/sim/extra");
    assert_eq!(err(base, &["sim.paths=\"many\""]), "/sim/paths");
    assert_eq!(err(base, &["system.type=\"C\""]), "/system/type");
    assert_eq!(err(base, &["x0.1=\"y\""]), "/x0/1");
    assert_eq!(err(base, &["colour=1"]), "/colour");
    let ok = RunConfigFile::parse(base, &["sim.paths=25".into(), "k=[0.5,2]".into()], Some("77")).unwrap();
    assert_eq!(ok.sim.paths, 25);
    assert_eq!(ok.sim.seed, 77);
    assert_eq!(ok.k, vec![0.5, 2.0]);
    let overridden = RunConfigFile::parse(base, &["sim.seed=8".into()], Some("77")).unwrap();
    assert_eq!(overridden.sim.seed, 8);
    assert!(RunConfigFile::parse(base, &[], Some("x")).is_err());
    let resolved = ok.resolve(0).unwrap();
    assert_eq!(resolved.k.per_orbit(), &[0.5, 2.0]);
    let bad_x0 = RunConfigFile::parse(base, &["x0=[1,2,3]".into()], None).unwrap();
    assert!(matches!(bad_x0.resolve(0), Err(Error::Config { pointer, .. }) if pointer == "/x0"));
}

#[test]
fn verify_harmonic_passes() {
    let (r, text) = invoke(&["verify-harmonic", "--system", "B", "--n", "2", "--k", "0.75,1.25", "--points", "30"]);
    assert!(r.unwrap(), "{text}");
    assert!(text.contains("harmonic/delta"));
}

#[test]
fn export_plot_data_bins_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.csv");
    let cfg = radial_config(dir.path(), &out);
    invoke(&["simulate-radial", "--config", &cfg]).0.unwrap();
    let plot = dir.path().join("p.csv");
    let (r, _) = invoke(&["export-plot-data", "--in", out.to_str().unwrap(), "--out", plot.to_str().unwrap(), "--bins", "4"]);
    assert!(r.unwrap());
    let text = std::fs::read_to_string(&plot).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "t_lo,t_hi,count,mean_norm_sq,se_norm_sq,mean_x_1,jumps,wall_hits");
    assert_eq!(lines.len(), 5);
    let hits: usize = lines[1..].iter().map(|l| l.rsplit(',').next().unwrap().parse::<usize>().unwrap()).sum();
    assert!(hits > 0);
    assert!(export_plot_data(&[], 0, Vec::new()).is_err());
}

#[test]
fn verify_suite_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    let reports = dir.path().join("reports.json");
    let cfg = write_config(
        dir.path(),
        "suite.json",
        &format!(
            r#"{{"system": {{"type": "B", "n": 2}}, "k": [1.0], "x0": [2.0, 1.0],
               "sim": {{"T": 1.0, "dt": 1e-3, "paths": 1, "seed": 20240601}},
               "suite": {{"ks_paths": 2000, "moment_paths": 4000, "fold_paths": 4000,
                          "martingale_paths": 600, "wall_paths": 500, "rotation_trials": 10,
                          "harmonic_points": 20}},
               "output": {{"path": {:?}}}}}"#,
            reports.to_str().unwrap()
        ),
    );
    let (r, text) = invoke(&["verify-suite", "--config", &cfg]);
    assert!(text.contains("martingale/dunkl/linear"), "{text}");
    let v: Vec<serde_json::Value> = serde_json::from_str(&std::fs::read_to_string(&reports).unwrap()).unwrap();
    assert!(v.len() > 20);
    match r {
        Ok(passed) => {
            let all_checks = v
                .iter()
                .filter(|x| x["role"] == "check" && x["skipped"] == false)
                .all(|x| x["passed"] == true);
            assert_eq!(passed, all_checks);
        }
        Err(e) => assert!(matches!(e, Error::VacuousCheck(_)), "{e}"),
    }
}

#[test]
fn shipped_configs_resolve() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    let mut seen = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let text = std::fs::read_to_string(&path).unwrap();
        let cfg = RunConfigFile::parse(&text, &[], None).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        cfg.resolve(1).unwrap();
        seen += 1;
    }
    assert_eq!(seen, 4);
}

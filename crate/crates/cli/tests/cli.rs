use std::path::Path;
use std::process::{Command, Output};

fn idnls(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_idnls")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

const SPEC: &str = r#"{"quartets":[{"z_re":1.3,"z_im":-0.5,"C_re":1.0,"C_im":0.0}],"t":0.0,"n_min":-60,"n_max":60}"#;

#[test]
fn synth_scatter_predict_chain() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("q.json");
    let state = dir.path().join("s.csv");
    let data = dir.path().join("sd.json");
    std::fs::write(&spec, SPEC).unwrap();

    let o = idnls(&["synth", "--spec", path(&spec), "--out", path(&state)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));

    let o = idnls(&["scatter", "--state", path(&state), "--n", "256", "--out", path(&data)]);
    assert!(o.status.success());
    let out = stdout(&o);
    let row = out.lines().last().unwrap();
    let z_re: f64 = row.split(',').next().unwrap().parse().unwrap();
    assert!((z_re - 1.3).abs() < 1e-8);
    // 17 significant digits
    assert!(row.contains("e0"));
    assert_eq!(row.split(',').next().unwrap().split('e').next().unwrap().replace(['.', '-'], "").len(), 17);

    let o = idnls(&["predict", "--scattering", path(&data), "--n", "-3", "--t", "10"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let out = stdout(&o);
    assert!(out.starts_with("n,t,region,re_pred,im_pred,envelope,order"));
    assert!(out.lines().nth(1).unwrap().starts_with("-3,"));
}

#[test]
fn three_site_reports_and_sets_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("r.json");
    let o = idnls(&["appendix", "--x1", "0+4i", "--x2", "9", "--out", path(&report)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(v["status"], "ok");
    assert!(v["closed_form_max_err"].as_f64().unwrap() < 1e-12);
    assert_eq!(v["quartets"].as_array().unwrap().len(), 2);

    // both zeros real: equal velocities
    let o = idnls(&["appendix", "--x1", "4", "--x2", "9", "--out", path(&report)]);
    assert_eq!(o.status.code(), Some(2));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(v["status"], "VelocityCollision");
    assert!(v["closed_form_max_err"].as_f64().unwrap() < 1e-12);
    assert_eq!(v["eigenvalues"].as_array().unwrap().len(), 2);

    let o = idnls(&["appendix", "--x1", "4", "--x2", "4", "--out", path(&report)]);
    assert_eq!(o.status.code(), Some(2));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(v["status"], "DoubleZero");

    let o = idnls(&["appendix", "--x1", "0.5+0.8660254037844386i", "--x2", "4", "--out", path(&report)]);
    assert_eq!(o.status.code(), Some(2));

    let o = idnls(&["appendix", "--x1", "four", "--x2", "4", "--out", path(&report)]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn compare_and_fit() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let config = dir.path().join("c.json");
    std::fs::write(
        &config,
        format!(
            r#"{{"initial_data": {{"kind": "gaussian", "amplitude": 0.3, "width": 1.5, "n_min": -150, "n_max": 150}},
                "times": [10, 15, 20, 25, 30, 35], "rays": [0.5], "scattering_n": 256, "out_dir": {:?}}}"#,
            path(&out_dir)
        ),
    )
    .unwrap();
    let o = idnls(&["compare", "--config", path(&config)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let summary: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(summary["records"], 6);
    assert!(out_dir.join("comparison.csv").exists());

    let csv = out_dir.join("comparison.csv");
    let o = idnls(&["fit", "--csv", path(&csv), "--xcol", "t", "--ycol", "abs_err"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let out = stdout(&o);
    let exponent: f64 = out.lines().nth(1).unwrap().split(',').next().unwrap().parse().unwrap();
    assert!(exponent < 0.0);

    let o = idnls(&["fit", "--csv", path(&csv), "--xcol", "t", "--ycol", "nope"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn simulate_writes_snapshots() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("c.json");
    std::fs::write(
        &config,
        format!(
            r#"{{"initial_data": {{"kind": "gaussian", "amplitude": 0.3, "width": 1.5, "n_min": -40, "n_max": 40}},
                "times": [1, 2], "out_dir": {:?}}}"#,
            path(dir.path())
        ),
    )
    .unwrap();
    let o = idnls(&["simulate", "--config", path(&config)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(std::fs::read_dir(dir.path().join("snapshots")).unwrap().count(), 2);

    std::fs::write(&config, r#"{"times": [1]}"#).unwrap();
    assert_eq!(idnls(&["simulate", "--config", path(&config)]).status.code(), Some(1));
}

use idnls_core::scattering::QuartetRecord;
use idnls_core::{
    bright_soliton, fit_power_law, integrate, measure_phase_shift, run, track_peak, Complex64, EigenQuartet,
    ExperimentConfig, IntegratorConfig, LatticeState, PeakTracker, SolitonSpec,
};

fn small_config(dir: &std::path::Path) -> ExperimentConfig {
    let text = format!(
        r#"{{
            "initial_data": {{"kind": "bs_plus_noise",
                "quartet": {{"z_re": 1.3, "z_im": -0.5, "C_re": 1.0, "C_im": 0.0}},
                "noise_amp": 0.02, "n_min": -80, "n_max": 80}},
            "times": [5.0, 6.0, 7.0, 8.0, 9.0, 10.0],
            "rays": [0.0, 1.0],
            "scattering_n": 256,
            "seed": 3,
            "out_dir": {:?}
        }}"#,
        dir.to_str().unwrap()
    );
    ExperimentConfig::from_json(&text).unwrap()
}

#[test]
fn pipeline_writes_outputs_and_is_deterministic() {
    let d1 = tempfile::tempdir().unwrap();
    let d2 = tempfile::tempdir().unwrap();
    let a = run(&small_config(d1.path())).unwrap();
    let b = run(&small_config(d2.path())).unwrap();
    for f in ["comparison.csv", "summary.json", "scattering.json"] {
        let x = std::fs::read(d1.path().join(f)).unwrap();
        let y = std::fs::read(d2.path().join(f)).unwrap();
        assert_eq!(x, y, "{f}");
    }
    assert_eq!(a.records.len(), 12);
    assert_eq!(a.summary.quartets.len(), 1);
    assert_eq!(b.trajectory.snapshots.len(), 6);
    assert_eq!(std::fs::read_dir(d1.path().join("snapshots")).unwrap().count(), 6);
    let csv = std::fs::read_to_string(d1.path().join("comparison.csv")).unwrap();
    assert!(csv.starts_with("n,t,ray,region,"));
    assert_eq!(csv.lines().count(), 13);
}

#[test]
fn quartet_spec_initial_data() {
    let dir = tempfile::tempdir().unwrap();
    let q = EigenQuartet::new(Complex64::from_polar(1.5, 0.3), Complex64::new(0.7, 0.2)).unwrap();
    let spec = SolitonSpec::new(vec![q], -60, 60, 0.0);
    let path = dir.path().join("spec.json");
    spec.save_json(&path).unwrap();
    let text = format!(
        r#"{{"initial_data": {{"kind": "quartet_spec", "path": {:?}}}, "times": [6.0], "rays": [0.0],
            "scattering_n": 128, "out_dir": {:?}}}"#,
        path.to_str().unwrap(),
        dir.path().join("out").to_str().unwrap()
    );
    let out = run(&ExperimentConfig::from_json(&text).unwrap()).unwrap();
    let got = &out.scattering.quartets[0];
    assert!((got.z - q.z).norm() < 1e-8);
    assert!((got.norming - q.norming).norm() < 1e-8);
}

#[test]
fn record_round_trip() {
    let r = QuartetRecord {
        z_re: 1.2,
        z_im: 0.4,
        c_re: -0.3,
        c_im: 2.0,
    };
    let q = r.to_quartet().unwrap();
    let back = QuartetRecord::from(&q);
    assert!((back.z_re - 1.2).abs() < 1e-15 && (back.c_im - 2.0).abs() < 1e-15);
}

#[test]
fn tracker_follows_a_moving_soliton() {
    let z = Complex64::from_polar(1.35, -0.6);
    let q = EigenQuartet::new(z, Complex64::new(1.0, 0.0)).unwrap();
    let s = LatticeState::from_fn(-60, 60, 0.0, |n| bright_soliton(n, 0.0, z, q.norming).unwrap()).unwrap();
    let times: Vec<f64> = (1..=8).map(|k| k as f64).collect();
    let traj = integrate(
        &s,
        &IntegratorConfig {
            snapshot_times: times,
            ..Default::default()
        },
    )
    .unwrap();
    let mut tr = PeakTracker::new(track_peak(&s, 0.0).unwrap().center, Some(q.beta));
    for snap in &traj.snapshots {
        tr.observe(snap).unwrap();
    }
    let h = tr.history();
    let v = h.last().unwrap().velocity_fit.unwrap();
    assert!((v - q.tw).abs() < 1e-6, "{v} vs {}", q.tw);
    // a free soliton compared with itself has no shift
    let shift = measure_phase_shift(&h[..4], &h[4..], &q).unwrap();
    assert!(shift.center_shift.abs() < 1e-6 && shift.carrier_shift.abs() < 1e-5, "{shift:?}");
}

#[test]
fn power_law_of_noisy_samples() {
    let pts: Vec<(f64, f64)> = (0..20)
        .map(|k| {
            let t = 10.0 + 5.0 * k as f64;
            (t, 0.8 * t.powf(-0.5) * (1.0 + 0.01 * (k as f64).sin()))
        })
        .collect();
    let f = fit_power_law(&pts).unwrap();
    assert!((f.exponent + 0.5).abs() < 0.02);
    assert!(f.r_squared > 0.99);
}

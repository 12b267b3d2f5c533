use idnls_core::{
    bright_soliton, conserved_product, integrate, Complex64, Error, IntegratorConfig, LatticeState,
};
use proptest::prelude::*;

fn cfg(times: &[f64]) -> IntegratorConfig {
    IntegratorConfig {
        snapshot_times: times.to_vec(),
        ..Default::default()
    }
}

#[test]
fn soliton_is_carried_exactly() {
    let z = Complex64::from_polar(0.5f64.exp(), 2.0);
    let cc = Complex64::new(1.0, 0.0);
    let s = LatticeState::from_fn(-100, 100, 0.0, |n| bright_soliton(n, 0.0, z, cc).unwrap()).unwrap();
    let traj = integrate(&s, &cfg(&[2.5, 10.0])).unwrap();
    for snap in &traj.snapshots {
        let err = snap
            .indices()
            .map(|n| (snap.get(n) - bright_soliton(n, snap.time, z, cc).unwrap()).norm())
            .fold(0.0, f64::max);
        assert!(err <= 1e-6, "t={}: {err}", snap.time);
    }
    assert!(traj.max_drift() <= 1e-8);
}

#[test]
fn zero_state_stays_zero() {
    let s = LatticeState::zeros(-10, 10, 0.0).unwrap();
    let traj = integrate(&s, &cfg(&[1.0])).unwrap();
    assert!(traj.snapshots[0].amplitudes().iter().all(|x| *x == Complex64::new(0.0, 0.0)));
}

#[test]
fn reflection_commutes_with_evolution() {
    let s = LatticeState::from_fn(-40, 40, 0.0, |n| {
        let x = n as f64 - 2.0;
        Complex64::new(0.6, 0.2 * x) * (-x * x / 6.0).exp()
    })
    .unwrap();
    let a = integrate(&s, &cfg(&[3.0])).unwrap().snapshots.remove(0).reflected();
    let b = integrate(&s.reflected(), &cfg(&[3.0])).unwrap().snapshots.remove(0);
    assert!(a.max_abs_diff(&b) < 1e-13);
}

#[test]
fn mass_reaching_the_boundary_is_an_error() {
    let s = LatticeState::from_fn(-10, 10, 0.0, |n| Complex64::new(0.8 * (-((n * n) as f64) / 4.0).exp(), 0.0))
        .unwrap();
    assert!(matches!(integrate(&s, &cfg(&[20.0])), Err(Error::TailOverflow { .. })));
}

#[test]
fn snapshot_times_must_increase() {
    let s = LatticeState::zeros(-5, 5, 0.0).unwrap();
    assert!(matches!(integrate(&s, &cfg(&[2.0, 1.0])), Err(Error::InvalidConfig(_))));
}

#[test]
fn csv_round_trip_is_lossless() {
    let s = LatticeState::from_fn(-7, 9, 1.25, |n| Complex64::new((n as f64).sin() / 3.0, 1.0 / (n as f64 + 0.1)))
        .unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.csv");
    s.save_csv(&path).unwrap();
    let back = LatticeState::load_csv(&path).unwrap();
    assert_eq!(back.amplitudes(), s.amplitudes());
    assert_eq!(back.n_min(), s.n_min());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn product_is_conserved(seed_re in proptest::collection::vec(-0.5f64..0.5, 9), phase in 0.0f64..6.0) {
        let s = LatticeState::from_fn(-30, 30, 0.0, |n| {
            let k = (n + 4) as usize;
            if k < seed_re.len() {
                Complex64::from_polar(seed_re[k], phase * k as f64)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .unwrap();
        let before = conserved_product(&s);
        let traj = integrate(&s, &cfg(&[2.0])).unwrap();
        let after = conserved_product(&traj.snapshots[0]);
        prop_assert!(((after - before) / before).abs() < 1e-10);
    }
}

use idnls_core::asymptotics::p_factor;
use idnls_core::{
    blaschke_t, classify_region, predict, saddle_points, synthesize_reflectionless, Complex64, DecayOrder,
    DeltaFunction, EigenQuartet, Error, PredictorParams, RegionTag, ScatteringData, SolitonSpec,
};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// An odd reflection coefficient, `r(-tau) = -r(tau)`.
fn smooth_r(theta: f64) -> Complex64 {
    Complex64::from_polar(0.4 * (1.0 + 0.3 * (2.0 * theta).cos()), theta + 0.2 * (2.0 * theta).sin())
}

fn delta(xi: f64, r: impl Fn(f64) -> Complex64) -> DeltaFunction {
    DeltaFunction::new(saddle_points(xi).unwrap(), &ScatteringData::from_reflection(256, r))
}

#[test]
fn zero_reflection_gives_unit_delta() {
    let d = delta(0.7, |_| c(0.0, 0.0));
    for z in [c(0.0, 0.0), c(0.3, -0.2), c(2.0, 1.0)] {
        assert!((d.eval(z).unwrap() - 1.0).norm() < 1e-15);
    }
}

#[test]
fn constant_modulus_oracle_at_zero() {
    for cval in [0.1, 0.5, 2.0] {
        let d = delta(0.0, |th| Complex64::from_polar(f64::sqrt(cval), th));
        let got = d.at_zero().unwrap();
        assert!((got - (1.0 + cval).powf(-0.5)).abs() <= 1e-9, "c={cval}: {got}");
    }
}

#[test]
fn delta_zero_in_unit_interval() {
    for xi in [-1.9, -1.0, 0.0, 0.6, 1.5, 1.95] {
        let d0 = delta(xi, smooth_r).at_zero().unwrap();
        assert!(d0 > 0.0 && d0 <= 1.0, "xi={xi}: {d0}");
        assert!(d0 < 1.0);
    }
}

#[test]
fn delta_is_even() {
    let d = delta(0.4, smooth_r);
    for z in [c(0.3, 0.1), c(-0.5, 0.6), c(1.7, -0.4), c(0.0, 2.5)] {
        let (a, b) = (d.eval(z).unwrap(), d.eval(-z).unwrap());
        assert!((a - b).norm() <= 1e-10, "{z}");
    }
    let h = 1e-4;
    let slope = (d.eval(c(h, 0.0)).unwrap() - d.eval(c(-h, 0.0)).unwrap()) / (2.0 * h);
    assert!(slope.norm() < 1e-8);
}

#[test]
fn delta_reflection_symmetry() {
    let d = delta(-0.8, smooth_r);
    let d0 = d.at_zero().unwrap();
    for z in [c(0.3, 0.1), c(-0.5, 0.6), c(0.1, -0.8), c(0.7, 0.6)] {
        let lhs = d.eval(z.conj().inv()).unwrap();
        let rhs = d0 / d.eval(z).unwrap().conj();
        assert!((lhs - rhs).norm() <= 1e-10, "{z}: {lhs} vs {rhs}");
    }
}

#[test]
fn delta_jump_across_arcs() {
    let d = delta(0.9, smooth_r);
    for (a, b) in d.geometry().arcs() {
        let mid = 0.5 * (a + b);
        let tau = Complex64::from_polar(1.0, mid);
        let ratio = |h: f64| d.eval((1.0 + h) * tau).unwrap() / d.eval((1.0 - h) * tau).unwrap();
        let extrapolated = (10.0 * ratio(1e-5) - ratio(1e-4)) / 9.0;
        let target = 1.0 + smooth_r(mid).norm_sqr();
        assert!((extrapolated - target).norm() <= 1e-4, "{extrapolated} vs {target}");
    }
}

#[test]
fn evaluating_on_an_arc_is_rejected() {
    let d = delta(0.0, smooth_r);
    let (a, b) = d.geometry().arcs()[0];
    let z = Complex64::from_polar(1.0, 0.5 * (a + b));
    assert!(matches!(d.eval(z), Err(Error::ArcCollision { .. })));
}

#[test]
fn saddle_points_lie_on_the_circle() {
    for xi in [-1.5, 0.0, 1.2] {
        let g = saddle_points(xi).unwrap();
        for s in g.saddles {
            assert!((s.norm() - 1.0).abs() < 1e-15);
        }
        assert!((g.saddles[2] + g.saddles[0]).norm() < 1e-15);
    }
    assert!(matches!(saddle_points(2.0), Err(Error::OutOfRange(_))));
}

fn two_soliton_data() -> (Vec<EigenQuartet>, ScatteringData) {
    let qs = vec![
        EigenQuartet::new(Complex64::from_polar(1.6, -0.35), c(1.0, 0.0)).unwrap(),
        EigenQuartet::new(Complex64::from_polar(1.4, 0.5), c(0.5, 0.5)).unwrap(),
    ];
    let data = ScatteringData::from_reflection(256, |_| c(0.0, 0.0)).with_quartets(qs.clone());
    (qs, data)
}

#[test]
fn blaschke_factors() {
    let (qs, _) = two_soliton_data();
    let p = p_factor(&qs, &[0, 1]);
    assert!((p.norm() - 1.0).abs() < 1e-14);
    // |T| = 1 on the unit circle
    for k in 0..16 {
        let z = Complex64::from_polar(1.0, 0.3 + k as f64 * 0.4);
        assert!((blaschke_t(z, &qs, &[0, 1]).unwrap().norm() - 1.0).abs() < 1e-12);
    }
    assert!(matches!(blaschke_t(qs[1].z, &qs, &[1]), Err(Error::PoleHit { .. })));
}

#[test]
fn reflectionless_prediction_matches_exact_solution() {
    let (qs, data) = two_soliton_data();
    let params = PredictorParams::default();
    let t = 60.0;
    let exact = synthesize_reflectionless(&SolitonSpec::new(qs.clone(), -200, 200, t)).unwrap();
    for q in &data.quartets {
        let n0 = (q.tw * t).round() as i64;
        for n in n0 - 2..=n0 + 2 {
            let p = predict(n, t, &data, &params).unwrap();
            assert!(matches!(p.region, RegionTag::InteriorSoliton(_)), "{}", p.region);
            let f = p.factors.as_ref().unwrap();
            assert!((f.delta0 - 1.0).abs() < 1e-15 && (f.delta_zs - 1.0).norm() < 1e-15);
            let v = p.value.unwrap();
            assert!((v - exact.get(n)).norm() < 1e-8, "n={n}: {v} vs {}", exact.get(n));
        }
    }
}

#[test]
fn fastest_soliton_has_trivial_blaschke_factors() {
    let (_, data) = two_soliton_data();
    let fastest = data.quartets.len() - 1;
    let t = 30.0;
    let n = (data.quartets[fastest].tw * t).round() as i64;
    let p = predict(n, t, &data, &PredictorParams::default()).unwrap();
    let f = p.factors.unwrap();
    assert!(f.s_set.is_empty());
    assert!((f.t_zs - 1.0).norm() < 1e-15 && (f.p_s - 1.0).norm() < 1e-15);
    assert!((f.modified_c - data.quartets[fastest].norming).norm() < 1e-12);
}

#[test]
fn regions_away_from_solitons() {
    let data = ScatteringData::from_reflection(256, smooth_r);
    let params = PredictorParams::default();
    let t = 100.0;
    assert_eq!(classify_region(0, t, &data, &params).unwrap(), RegionTag::InteriorSolitonless);
    let far = predict(300, t, &data, &params).unwrap();
    assert_eq!(far.region, RegionTag::ExteriorSolitonless);
    assert_eq!(far.order, DecayOrder::Infinite);
    let mid = predict(-50, t, &data, &params).unwrap();
    assert_eq!(mid.order, DecayOrder::Power(-0.5));
    assert!(mid.envelope.unwrap() > 0.0);
}

//! Long-time asymptotics: stationary-phase geometry, the `delta` factor,
//! Blaschke products over faster solitons, region classification and the
//! resulting predictions for `R_n(t)`.

mod delta;

use std::f64::consts::{FRAC_PI_4, PI};
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scattering::{EigenQuartet, ScatteringData};
use crate::soliton::bright_soliton;

pub use delta::DeltaFunction;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PredictorParams {
    /// Velocity half-width around a soliton ray.
    pub d: f64,
    /// Interior band is `|n| <= (2 - v0) t`.
    #[serde(rename = "V0")]
    pub v0: f64,
    /// Edge band is `| |n| - 2t | <= m t^{1/3}`.
    #[serde(rename = "M")]
    pub m: f64,
    pub t_min: f64,
}

impl Default for PredictorParams {
    fn default() -> Self {
        Self {
            d: 0.05,
            v0: 0.2,
            m: 2.0,
            t_min: 5.0,
        }
    }
}

impl PredictorParams {
    pub fn validate(&self) -> Result<()> {
        let ok = self.d > 0.0 && self.v0 > 0.0 && self.v0 < 2.0 && self.m > 0.0 && self.t_min > 0.0;
        if !ok {
            return Err(Error::InvalidConfig(format!("bad predictor parameters {self:?}")));
        }
        Ok(())
    }
}

/// Saddle points of the phase on the unit circle for `xi = n/t` in `(-2, 2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseGeometry {
    pub xi: f64,
    pub a: Complex64,
    pub saddles: [Complex64; 4],
}

impl PhaseGeometry {
    /// Angular ranges of the arcs `S1 -> S2` and `S3 -> S4`, counterclockwise.
    pub fn arcs(&self) -> [(f64, f64); 2] {
        let gamma = -self.a.arg();
        [
            (-FRAC_PI_4 - gamma, -FRAC_PI_4 + gamma),
            (3.0 * FRAC_PI_4 - gamma, 3.0 * FRAC_PI_4 + gamma),
        ]
    }
}

/// `A = (sqrt(2 + xi) - i sqrt(2 - xi)) / 2`, `S1 = e^{-i pi/4} A`,
/// `S2 = e^{-i pi/4} conj(A)`, `S3 = -S1`, `S4 = -S2`.
pub fn saddle_points(xi: f64) -> Result<PhaseGeometry> {
    if !(xi.abs() < 2.0) {
        return Err(Error::OutOfRange(format!("saddle points need |n/t| < 2, got {xi}")));
    }
    let a = Complex64::new((2.0 + xi).sqrt(), -(2.0 - xi).sqrt()) / 2.0;
    let rot = Complex64::from_polar(1.0, -FRAC_PI_4);
    let s1 = rot * a;
    let s2 = rot * a.conj();
    Ok(PhaseGeometry {
        xi,
        a,
        saddles: [s1, s2, -s1, -s2],
    })
}

/// `Re phi(z_j) = alpha_j t (tw_j - n/t)`.
pub fn phase_re_at_eigenvalue(q: &EigenQuartet, n: i64, t: f64) -> f64 {
    q.alpha * t * (q.tw - n as f64 / t)
}

/// `delta(z)` for the geometry and reflection samples.
pub fn delta_eval(z: Complex64, geom: &PhaseGeometry, data: &ScatteringData) -> Result<Complex64> {
    DeltaFunction::new(*geom, data).eval(z)
}

/// Indices `k` with `tw_k > xi + d`.
pub fn faster_set(quartets: &[EigenQuartet], xi: f64, d: f64) -> Vec<usize> {
    (0..quartets.len()).filter(|&k| quartets[k].tw > xi + d).collect()
}

/// `T(z) = prod_{k in S} z_k^2 (z^2 - conj(z_k)^{-2}) / (z^2 - z_k^2)`, and 1
/// for empty `S`.
pub fn blaschke_t(z: Complex64, quartets: &[EigenQuartet], s_set: &[usize]) -> Result<Complex64> {
    let z2 = z * z;
    let mut t = Complex64::new(1.0, 0.0);
    for &k in s_set {
        let zk2 = quartets[k].z * quartets[k].z;
        let den = z2 - zk2;
        if den.norm() <= 1e-14 * zk2.norm() {
            return Err(Error::PoleHit { z });
        }
        t *= zk2 * (z2 - quartets[k].z.conj().powi(-2)) / den;
    }
    Ok(t)
}

/// `T(infinity) = prod_{k in S} z_k^2`.
pub fn t_infinity(quartets: &[EigenQuartet], s_set: &[usize]) -> Complex64 {
    s_set.iter().map(|&k| quartets[k].z * quartets[k].z).product()
}

/// `p_s = T(0) T(infinity) = prod_{k in S} z_k^2 conj(z_k)^{-2}`.
pub fn p_factor(quartets: &[EigenQuartet], s_set: &[usize]) -> Complex64 {
    s_set
        .iter()
        .map(|&k| {
            let z = quartets[k].z;
            (z * z) / (z.conj() * z.conj())
        })
        .product()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "soliton", rename_all = "snake_case")]
pub enum RegionTag {
    InteriorSoliton(usize),
    InteriorSolitonless,
    EdgeSoliton(usize),
    EdgeSolitonless,
    ExteriorSoliton(usize),
    ExteriorSolitonless,
}

impl RegionTag {
    pub fn soliton(&self) -> Option<usize> {
        match *self {
            RegionTag::InteriorSoliton(s) | RegionTag::EdgeSoliton(s) | RegionTag::ExteriorSoliton(s) => Some(s),
            _ => None,
        }
    }
}

impl fmt::Display for RegionTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RegionTag::InteriorSoliton(s) => write!(f, "interior_soliton:{s}"),
            RegionTag::InteriorSolitonless => f.write_str("interior_solitonless"),
            RegionTag::EdgeSoliton(s) => write!(f, "edge_soliton:{s}"),
            RegionTag::EdgeSolitonless => f.write_str("edge_solitonless"),
            RegionTag::ExteriorSoliton(s) => write!(f, "exterior_soliton:{s}"),
            RegionTag::ExteriorSolitonless => f.write_str("exterior_solitonless"),
        }
    }
}

fn nearest_soliton(quartets: &[EigenQuartet], target: f64, d: f64) -> Option<usize> {
    (0..quartets.len())
        .filter(|&k| (quartets[k].tw - target).abs() <= d)
        .min_by(|&i, &j| {
            (quartets[i].tw - target)
                .abs()
                .total_cmp(&(quartets[j].tw - target).abs())
        })
}

/// Region of `(n, t)`. Bands are symmetric under `n -> -n`; sites between the
/// interior and edge bands count as interior. Fails if a site lies in both
/// bands, which means `v0` and `m` are incompatible at this `t`.
pub fn classify_region(n: i64, t: f64, data: &ScatteringData, params: &PredictorParams) -> Result<RegionTag> {
    if !(t > 0.0) {
        return Err(Error::OutOfRange(format!("classification needs t > 0, got {t}")));
    }
    let abs_n = n.unsigned_abs() as f64;
    let xi = n as f64 / t;
    let sign = if n < 0 { -1.0 } else { 1.0 };
    let edge_width = params.m * t.cbrt();
    let interior = abs_n <= (2.0 - params.v0) * t;
    let edge = (abs_n - 2.0 * t).abs() <= edge_width;
    if interior && edge {
        return Err(Error::AmbiguousRegion { n, t });
    }
    let q = &data.quartets;
    Ok(if edge {
        match nearest_soliton(q, 2.0 * sign, params.d) {
            Some(s) => RegionTag::EdgeSoliton(s),
            None => RegionTag::EdgeSolitonless,
        }
    } else if abs_n > 2.0 * t + edge_width {
        match nearest_soliton(q, xi, params.d) {
            Some(s) => RegionTag::ExteriorSoliton(s),
            None => RegionTag::ExteriorSolitonless,
        }
    } else {
        match nearest_soliton(q, xi, params.d) {
            Some(s) => RegionTag::InteriorSoliton(s),
            None => RegionTag::InteriorSolitonless,
        }
    })
}

/// Correction data turning `C_s(0)` into the asymptotic norming constant.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseFactors {
    pub soliton: usize,
    pub s_set: Vec<usize>,
    pub delta0: f64,
    pub delta_zs: Complex64,
    pub t_zs: Complex64,
    pub p_s: Complex64,
    pub modified_c: Complex64,
}

/// Phase factors for soliton `s` seen from `(n, t)`. In the interior the
/// asymptotic norming constant is `delta(0) delta(z_s)^{-2} p_s T(z_s)^{-2} C_s(0)`;
/// at the edge and beyond the `delta` factors are absent.
pub fn phase_factors(
    s: usize,
    n: i64,
    t: f64,
    data: &ScatteringData,
    d: f64,
    region: RegionTag,
) -> Result<PhaseFactors> {
    if region.soliton() != Some(s) || s >= data.quartets.len() {
        return Err(Error::InvalidConfig(format!("region {region} does not carry soliton {s}")));
    }
    let q = &data.quartets;
    let xi = n as f64 / t;
    let s_set = faster_set(q, xi, d);
    let t_zs = blaschke_t(q[s].z, q, &s_set)?;
    let p_s = p_factor(q, &s_set);
    let c0 = q[s].norming_after(-data.base_time);
    let (delta0, delta_zs) = match region {
        RegionTag::InteriorSoliton(_) => {
            let f = DeltaFunction::new(saddle_points(xi)?, data);
            (f.at_zero()?, f.eval(q[s].z)?)
        }
        _ => (1.0, Complex64::new(1.0, 0.0)),
    };
    let modified_c = delta0 * p_s * c0 / (delta_zs * delta_zs * t_zs * t_zs);
    Ok(PhaseFactors {
        soliton: s,
        s_set,
        delta0,
        delta_zs,
        t_zs,
        p_s,
        modified_c,
    })
}

/// Error exponent attached to a prediction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DecayOrder {
    /// `O(t^{p})`.
    Power(f64),
    /// Faster than any power.
    Infinite,
}

impl fmt::Display for DecayOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DecayOrder::Power(p) => write!(f, "{p}"),
            DecayOrder::Infinite => f.write_str("inf"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub n: i64,
    pub t: f64,
    pub region: RegionTag,
    /// Predicted value where the leading term is explicit.
    pub value: Option<Complex64>,
    /// Predicted bound on `|R_n|` where only the size is known.
    pub envelope: Option<f64>,
    pub order: DecayOrder,
    pub factors: Option<PhaseFactors>,
}

/// Rough radiation size `K t^{-1/2}` with
/// `K = sum_{j=1,2} sqrt(nu_j / sqrt(4 - xi^2))`, `nu_j = log(1 + |r(S_j)|^2) / (2 pi)`.
/// Only the exponent is ever tested.
fn radiation_constant(xi: f64, data: &ScatteringData) -> Result<f64> {
    let geom = saddle_points(xi)?;
    let f = DeltaFunction::new(geom, data);
    let root = (4.0 - xi * xi).sqrt();
    Ok(geom.saddles[..2]
        .iter()
        .map(|s| (f.weight(s.arg()).max(0.0) / (2.0 * PI) / root).sqrt())
        .sum())
}

/// Leading-order prediction of `R_n(t)` from scattering data.
pub fn predict(n: i64, t: f64, data: &ScatteringData, params: &PredictorParams) -> Result<Prediction> {
    params.validate()?;
    if !(t >= params.t_min) {
        return Err(Error::OutOfRange(format!("t = {t} is below t_min = {}", params.t_min)));
    }
    let region = classify_region(n, t, data, params)?;
    let mut out = Prediction {
        n,
        t,
        region,
        value: None,
        envelope: None,
        order: DecayOrder::Power(-0.5),
        factors: None,
    };
    match region {
        RegionTag::InteriorSoliton(s) | RegionTag::EdgeSoliton(s) | RegionTag::ExteriorSoliton(s) => {
            let pf = phase_factors(s, n, t, data, params.d, region)?;
            out.value = Some(bright_soliton(n, t, data.quartets[s].z, pf.modified_c)?);
            out.order = match region {
                RegionTag::InteriorSoliton(_) => DecayOrder::Power(-0.5),
                RegionTag::EdgeSoliton(_) => DecayOrder::Power(-1.0 / 3.0),
                _ => DecayOrder::Infinite,
            };
            out.factors = Some(pf);
        }
        RegionTag::InteriorSolitonless => {
            out.envelope = Some(radiation_constant(n as f64 / t, data)? / t.sqrt());
        }
        RegionTag::EdgeSolitonless => out.order = DecayOrder::Power(-1.0 / 3.0),
        RegionTag::ExteriorSolitonless => {
            out.value = Some(Complex64::new(0.0, 0.0));
            out.envelope = Some(0.0);
            out.order = DecayOrder::Infinite;
        }
    }
    Ok(out)
}

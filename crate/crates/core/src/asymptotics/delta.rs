//! The scalar factor
//! `delta(z) = exp( -1/(2 pi i) * sum over arcs of  int log(1 + |r(tau)|^2) / (tau - z) dtau )`.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::PhaseGeometry;
use crate::error::{Error, Result};
use crate::numerics::{GaussLegendre, TrigInterpolant};
use crate::scattering::ScatteringData;

const COLLISION: f64 = 1e-8;
const TOL: f64 = 1e-10;
const MAX_DOUBLINGS: usize = 14;
/// Ratio between consecutive panel widths when grading toward a near point.
const GRADING: f64 = 0.25;

/// `delta` for one geometry and one set of reflection samples.
#[derive(Debug, Clone)]
pub struct DeltaFunction {
    geom: PhaseGeometry,
    /// `log(1 + |r|^2)` interpolated from the circle samples. This is smooth
    /// even when `r` itself carries a fast carrier from far-off support.
    weight: TrigInterpolant,
}

impl DeltaFunction {
    pub fn new(geom: PhaseGeometry, data: &ScatteringData) -> Self {
        let w: Vec<f64> = data.samples.iter().map(|s| s.r.norm_sqr().ln_1p()).collect();
        Self {
            geom,
            weight: TrigInterpolant::from_real(&w),
        }
    }

    pub fn geometry(&self) -> &PhaseGeometry {
        &self.geom
    }

    /// `log(1 + |r(e^{i theta})|^2)` from the interpolant.
    pub fn weight(&self, theta: f64) -> f64 {
        self.weight.eval_real(theta)
    }

    /// Nearest point of either arc to `z` as `(angle, distance)`.
    fn nearest(&self, z: Complex64) -> (f64, f64) {
        let mut best = (0.0, f64::INFINITY);
        for (a, b) in self.geom.arcs() {
            let mid = 0.5 * (a + b);
            let half = 0.5 * (b - a);
            let phi = wrap(z.arg() - mid).clamp(-half, half);
            let ang = mid + phi;
            let d = (z - Complex64::from_polar(1.0, ang)).norm();
            if d < best.1 {
                best = (ang, d);
            }
        }
        best
    }

    pub fn log_eval(&self, z: Complex64) -> Result<Complex64> {
        let (near_ang, dist) = self.nearest(z);
        if dist < COLLISION {
            return Err(Error::ArcCollision { z });
        }
        let integrand = |theta: f64| {
            let tau = Complex64::from_polar(1.0, theta);
            tau / (tau - z) * self.weight(theta)
        };
        let mut prev: Option<Complex64> = None;
        for level in 0..MAX_DOUBLINGS {
            let mut total = Complex64::new(0.0, 0.0);
            for (a, b) in self.geom.arcs() {
                for (p, q) in panels(a, b, near_ang, dist, level) {
                    total += GaussLegendre::sixteen().integrate(p, q, integrand);
                }
            }
            let value = -total / (2.0 * PI);
            if let Some(p) = prev {
                if (value - p).norm() < TOL {
                    return Ok(value);
                }
            }
            prev = Some(value);
        }
        Ok(prev.unwrap_or_default())
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        Ok(self.log_eval(z)?.exp())
    }

    /// `delta(0)`, real and in `(0, 1]`.
    pub fn at_zero(&self) -> Result<f64> {
        Ok(self.eval(Complex64::new(0.0, 0.0))?.re)
    }
}

fn wrap(x: f64) -> f64 {
    let y = (x + PI).rem_euclid(2.0 * PI) - PI;
    if y <= -PI {
        y + 2.0 * PI
    } else {
        y
    }
}

/// Panel breakpoints on `[a, b]`: geometrically graded toward `center` when
/// the evaluation point is close to the arc, then halved `level` times.
fn panels(a: f64, b: f64, center: f64, dist: f64, level: usize) -> Vec<(f64, f64)> {
    let len = b - a;
    let mut cuts = vec![a, b];
    if center >= a && center <= b && dist < 0.25 * len {
        let mut h = dist;
        cuts.push(center);
        while h < len {
            for x in [center - h, center + h] {
                if x > a && x < b {
                    cuts.push(x);
                }
            }
            h /= GRADING;
        }
    } else {
        for k in 1..4 {
            cuts.push(a + len * k as f64 / 4.0);
        }
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|x, y| (*x - *y).abs() < 1e-15);
    let mut out = Vec::new();
    let parts = 1usize << level;
    for w in cuts.windows(2) {
        let step = (w[1] - w[0]) / parts as f64;
        for k in 0..parts {
            out.push((w[0] + step * k as f64, w[0] + step * (k + 1) as f64));
        }
    }
    out
}

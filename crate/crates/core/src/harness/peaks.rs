use std::f64::consts::PI;

use serde::Serialize;

use super::fit::linear_fit;
use crate::error::{Error, Result};
use crate::lattice::LatticeState;

const SEARCH: i64 = 10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PeakMeasurement {
    pub t: f64,
    /// Lattice site of the largest `|R_n|`.
    pub site: i64,
    /// Sub-grid peak location.
    pub center: f64,
    pub amplitude: f64,
    /// `arg R` at `site`; the tracker removes the site-dependent carrier and
    /// unwraps across calls.
    pub carrier_phase: f64,
    /// Least-squares velocity over the tracked history, once there is one.
    pub velocity_fit: Option<f64>,
}

/// Sub-grid peak of `|R_n|` near `hint`.
///
/// The centre comes from fitting `A sech(k (n - c))` exactly through the three
/// sites around the discrete maximum; if the samples are not sech-like it
/// falls back to a parabola through `|R|^2`.
pub fn track_peak(snapshot: &LatticeState, hint: f64) -> Result<PeakMeasurement> {
    let h = hint.round() as i64;
    let lo = (h - SEARCH).max(snapshot.n_min() + 1);
    let hi = (h + SEARCH).min(snapshot.n_max() - 1);
    let no_peak = || Error::NoPeak { hint };
    if lo > hi {
        return Err(no_peak());
    }
    let k = (lo..=hi)
        .max_by(|&a, &b| snapshot.get(a).norm().total_cmp(&snapshot.get(b).norm()))
        .ok_or_else(no_peak)?;
    let (um, u0, up) = (snapshot.get(k - 1).norm(), snapshot.get(k).norm(), snapshot.get(k + 1).norm());
    if !(u0 > 1e-12) || u0 < um || u0 < up {
        return Err(no_peak());
    }
    let (offset, amplitude) = sech_vertex(um, u0, up).unwrap_or_else(|| parabola_vertex(um, u0, up));
    Ok(PeakMeasurement {
        t: snapshot.time,
        site: k,
        center: k as f64 + offset,
        amplitude,
        carrier_phase: snapshot.get(k).arg(),
        velocity_fit: None,
    })
}

fn sech_vertex(m: f64, z: f64, p: f64) -> Option<(f64, f64)> {
    if !(m > 0.0 && p > 0.0) {
        return None;
    }
    let (um, u0, up) = (1.0 / m, 1.0 / z, 1.0 / p);
    let ck = (up + um) / (2.0 * u0);
    if !(ck > 1.0) {
        return None;
    }
    let kappa = ck.acosh();
    let th = (up - um) / (2.0 * kappa.sinh() * u0);
    if !(th.abs() < 1.0) {
        return None;
    }
    // tanh(kappa (k - c)) = th
    let x = th.atanh();
    Some((-x / kappa, x.cosh() / u0))
}

fn parabola_vertex(m: f64, z: f64, p: f64) -> (f64, f64) {
    let (ym, y0, yp) = (m * m, z * z, p * p);
    let den = ym - 2.0 * y0 + yp;
    if den.abs() < 1e-300 {
        return (0.0, z);
    }
    let off = (0.5 * (ym - yp) / den).clamp(-0.5, 0.5);
    let peak = y0 - 0.25 * (ym - yp) * off;
    (off, peak.max(0.0).sqrt())
}

/// Follows one peak through a sequence of snapshots.
#[derive(Debug, Clone)]
pub struct PeakTracker {
    hint: f64,
    /// When set, `2 beta (site + 1)` is added to the raw phase so that the
    /// carrier of a soliton `exp(-i 2 beta (n + 1))` does not jump as the
    /// peak changes site.
    beta: Option<f64>,
    history: Vec<PeakMeasurement>,
}

impl PeakTracker {
    pub fn new(hint: f64, beta: Option<f64>) -> Self {
        Self {
            hint,
            beta,
            history: Vec::new(),
        }
    }

    pub fn history(&self) -> &[PeakMeasurement] {
        &self.history
    }

    pub fn into_history(self) -> Vec<PeakMeasurement> {
        self.history
    }

    /// Next expected position at time `t`.
    pub fn predict_center(&self, t: f64) -> f64 {
        match self.history.last() {
            Some(last) => last.center + last.velocity_fit.unwrap_or(0.0) * (t - last.t),
            None => self.hint,
        }
    }

    pub fn observe(&mut self, snapshot: &LatticeState) -> Result<PeakMeasurement> {
        let mut m = track_peak(snapshot, self.predict_center(snapshot.time))?;
        if let Some(beta) = self.beta {
            m.carrier_phase += 2.0 * beta * (m.site + 1) as f64;
        }
        if let Some(prev) = self.history.last() {
            let k = ((prev.carrier_phase - m.carrier_phase) / (2.0 * PI)).round();
            m.carrier_phase += 2.0 * PI * k;
        }
        self.history.push(m);
        if self.history.len() >= 2 {
            let pts: Vec<(f64, f64)> = self.history.iter().map(|p| (p.t, p.center)).collect();
            m.velocity_fit = linear_fit(&pts).ok().map(|f| f.slope);
            if let Some(last) = self.history.last_mut() {
                last.velocity_fit = m.velocity_fit;
            }
        }
        Ok(m)
    }
}

use std::f64::consts::PI;

use serde::Serialize;

use super::peaks::PeakMeasurement;
use crate::error::{Error, Result};
use crate::scattering::EigenQuartet;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

impl LinearFit {
    pub fn at(&self, x: f64) -> f64 {
        self.intercept + self.slope * x
    }
}

/// Ordinary least squares through `(x, y)` pairs.
pub fn linear_fit(points: &[(f64, f64)]) -> Result<LinearFit> {
    let n = points.len();
    if n < 2 {
        return Err(Error::DegenerateFit(format!("need at least 2 points, got {n}")));
    }
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n as f64;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n as f64;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - my).powi(2)).sum();
    if !(sxx > 0.0) {
        return Err(Error::DegenerateFit("all abscissae coincide".into()));
    }
    let slope = sxy / sxx;
    let r_squared = if syy > 0.0 { sxy * sxy / (sxx * syy) } else { 1.0 };
    Ok(LinearFit {
        slope,
        intercept: my - slope * mx,
        r_squared,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerLawFit {
    pub exponent: f64,
    pub prefactor: f64,
    pub r_squared: f64,
}

/// Fits `y = c t^p` by least squares in log-log coordinates.
pub fn fit_power_law(points: &[(f64, f64)]) -> Result<PowerLawFit> {
    if points.len() < 5 {
        return Err(Error::DegenerateFit(format!("need at least 5 points, got {}", points.len())));
    }
    if points.iter().any(|&(t, y)| !(t > 0.0 && y > 0.0)) {
        return Err(Error::DegenerateFit("power-law fit needs positive data".into()));
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(t, y)| (t.ln(), y.ln())).collect();
    let f = linear_fit(&logs)?;
    Ok(PowerLawFit {
        exponent: f.slope,
        prefactor: f.intercept.exp(),
        r_squared: f.r_squared,
    })
}

/// Shift of a soliton between two tracked series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhaseShift {
    pub center_shift: f64,
    /// In `(-pi, pi]`.
    pub carrier_shift: f64,
}

fn wrap(x: f64) -> f64 {
    let y = x.rem_euclid(2.0 * PI);
    if y > PI {
        y - 2.0 * PI
    } else {
        y
    }
}

/// Compares the series before and after an interaction. Each series is fitted
/// with the free soliton laws of `quartet` (centre slope `tw`, carrier slope
/// `2w`), so only the intercepts are estimated; the shift is their difference.
/// Carrier phases must already be corrected for the site-dependent factor
/// (see [`super::PeakTracker`]).
pub fn measure_phase_shift(
    pre: &[PeakMeasurement],
    post: &[PeakMeasurement],
    quartet: &EigenQuartet,
) -> Result<PhaseShift> {
    if pre.len() < 2 || post.len() < 2 {
        return Err(Error::DegenerateFit("each series needs at least 2 measurements".into()));
    }
    let w = (2.0 * quartet.alpha).cosh() * (2.0 * quartet.beta).cos() - 1.0;
    let mean = |s: &[PeakMeasurement], f: &dyn Fn(&PeakMeasurement) -> f64| {
        s.iter().map(f).sum::<f64>() / s.len() as f64
    };
    let c_pre = mean(pre, &|m| m.center - quartet.tw * m.t);
    let c_post = mean(post, &|m| m.center - quartet.tw * m.t);
    // unwrap each series around its first element before averaging
    let phase = |s: &[PeakMeasurement]| {
        let r = s[0].carrier_phase - 2.0 * w * s[0].t;
        mean(s, &|m| r + wrap(m.carrier_phase - 2.0 * w * m.t - r))
    };
    Ok(PhaseShift {
        center_shift: c_post - c_pre,
        carrier_shift: wrap(phase(post) - phase(pre)),
    })
}

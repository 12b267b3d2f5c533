//! Fixed inputs shared by the benchmarks.

use idnls_core::{bright_soliton, EigenQuartet, LatticeState, Result, ScatteringData};
use num_complex::Complex64;

/// Bright soliton with `z = exp(0.5 + 2i)`, `C = 1` on `[-half, half]`.
pub fn soliton_state(half: i64) -> Result<LatticeState> {
    let z = Complex64::from_polar(0.5f64.exp(), 2.0);
    LatticeState::from_fn(-half, half, 0.0, |n| {
        bright_soliton(n, 0.0, z, Complex64::new(1.0, 0.0)).unwrap_or_default()
    })
}

/// Two quartets with well separated velocities.
pub fn two_quartets() -> Result<Vec<EigenQuartet>> {
    Ok(vec![
        EigenQuartet::new(Complex64::from_polar(1.6, -0.35), Complex64::new(1.0, 0.0))?,
        EigenQuartet::new(Complex64::from_polar(1.4, 0.5), Complex64::new(0.5, 0.5))?,
    ])
}

/// Smooth synthetic reflection data `r(e^{it}) = 0.3 sin(t) e^{2it}`.
pub fn smooth_reflection(n: usize) -> ScatteringData {
    ScatteringData::from_reflection(n, |t| Complex64::from_polar(0.3 * t.sin(), 2.0 * t))
}

use std::path::PathBuf;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::LatticeState;
use crate::scattering::QuartetRecord;
use crate::soliton::{bright_soliton, synthesize_reflectionless, SolitonSpec};

fn default_noise_width() -> f64 {
    5.0
}

/// Where the initial lattice state comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialData {
    /// Reflectionless state synthesized from a quartet-spec file.
    QuartetSpec { path: PathBuf },
    /// Lattice-state CSV file.
    LatticeState { path: PathBuf },
    /// `amplitude exp(-(n-c)^2 / (2 width^2)) exp(i chirp (n-c)^2)`.
    Gaussian {
        amplitude: f64,
        width: f64,
        #[serde(default)]
        chirp: f64,
        #[serde(default)]
        center: f64,
        n_min: i64,
        n_max: i64,
    },
    /// Bright soliton at `t = 0` plus complex Gaussian noise under a Gaussian
    /// envelope of width `noise_width` centred on the soliton.
    BsPlusNoise {
        quartet: QuartetRecord,
        noise_amp: f64,
        #[serde(default = "default_noise_width")]
        noise_width: f64,
        /// Overrides the experiment seed when present.
        #[serde(default)]
        seed: Option<u64>,
        n_min: i64,
        n_max: i64,
    },
}

impl InitialData {
    pub fn build(&self, seed: u64) -> Result<LatticeState> {
        match self {
            InitialData::QuartetSpec { path } => synthesize_reflectionless(&SolitonSpec::load_json(path)?),
            InitialData::LatticeState { path } => LatticeState::load_csv(path),
            InitialData::Gaussian {
                amplitude,
                width,
                chirp,
                center,
                n_min,
                n_max,
            } => gaussian(*amplitude, *width, *chirp, *center, *n_min, *n_max),
            InitialData::BsPlusNoise {
                quartet,
                noise_amp,
                noise_width,
                seed: own,
                n_min,
                n_max,
            } => bs_plus_noise(quartet, *noise_amp, *noise_width, own.unwrap_or(seed), *n_min, *n_max),
        }
    }
}

pub fn gaussian(amplitude: f64, width: f64, chirp: f64, center: f64, n_min: i64, n_max: i64) -> Result<LatticeState> {
    if !(width > 0.0) || !amplitude.is_finite() {
        return Err(Error::InvalidConfig(format!(
            "gaussian needs width > 0 and finite amplitude, got {width}, {amplitude}"
        )));
    }
    LatticeState::from_fn(n_min, n_max, 0.0, |n| {
        let x = n as f64 - center;
        Complex64::from_polar(amplitude * (-x * x / (2.0 * width * width)).exp(), chirp * x * x)
    })
}

pub fn bs_plus_noise(
    quartet: &QuartetRecord,
    noise_amp: f64,
    noise_width: f64,
    seed: u64,
    n_min: i64,
    n_max: i64,
) -> Result<LatticeState> {
    let q = quartet.to_quartet()?;
    if !(noise_width > 0.0) || !(noise_amp >= 0.0) {
        return Err(Error::InvalidConfig("noise_amp must be >= 0 and noise_width > 0".into()));
    }
    let s2a = (2.0 * q.alpha).sinh();
    let center = (q.norming.norm().ln() - s2a.ln()) / (2.0 * q.alpha) - 1.0;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut amps = Vec::with_capacity((n_max - n_min + 1).max(0) as usize);
    for n in n_min..=n_max {
        let re: f64 = StandardNormal.sample(&mut rng);
        let im: f64 = StandardNormal.sample(&mut rng);
        let x = n as f64 - center;
        let env = (-x * x / (2.0 * noise_width * noise_width)).exp();
        amps.push(bright_soliton(n, 0.0, q.z, q.norming)? + noise_amp * env * Complex64::new(re, im));
    }
    LatticeState::new(n_min, amps, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_shape() {
        let s = gaussian(0.3, 1.5, 0.0, 0.0, -10, 10).unwrap();
        assert!((s.get(0).re - 0.3).abs() < 1e-15);
        assert!((s.get(3).norm() - 0.3 * (-2.0f64).exp()).abs() < 1e-15);
        assert!(gaussian(0.3, 0.0, 0.0, 0.0, -10, 10).is_err());
    }

    #[test]
    fn noise_is_seeded() {
        let q = QuartetRecord {
            z_re: 1.4,
            z_im: -0.4,
            c_re: 1.0,
            c_im: 0.0,
        };
        let a = bs_plus_noise(&q, 0.05, 5.0, 11, -30, 30).unwrap();
        let b = bs_plus_noise(&q, 0.05, 5.0, 11, -30, 30).unwrap();
        let c = bs_plus_noise(&q, 0.05, 5.0, 12, -30, 30).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        let clean = bs_plus_noise(&q, 0.0, 5.0, 11, -30, 30).unwrap();
        let qq = q.to_quartet().unwrap();
        assert_eq!(clean.get(4), bright_soliton(4, 0.0, qq.z, qq.norming).unwrap());
    }

    #[test]
    fn config_json_shape() {
        let g: InitialData = serde_json::from_str(
            r#"{"kind":"gaussian","amplitude":0.3,"width":1.5,"n_min":-5,"n_max":5}"#,
        )
        .unwrap();
        assert!(matches!(g, InitialData::Gaussian { chirp, .. } if chirp == 0.0));
    }
}

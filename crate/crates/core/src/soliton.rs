//! Closed-form bright soliton, reflectionless multi-soliton synthesis, and the
//! three-site potentials with prescribed `a(z)`.

use std::path::Path;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::LatticeState;
use crate::scattering::{EigenQuartet, QuartetRecord};

const COND_LIMIT: f64 = 1e12;
const PARITY_TOL: f64 = 1e-8;

fn log_parts(z: Complex64) -> Result<(f64, f64)> {
    if !(z.norm() > 1.0) {
        return Err(Error::OutOfRange(format!("|z| must exceed 1, got {}", z.norm())));
    }
    Ok((z.norm().ln(), z.arg()))
}

/// `-sinh(2 alpha) sin(2 beta) / alpha` for `z = exp(alpha + i beta)`.
pub fn tw_velocity(z: Complex64) -> f64 {
    let alpha = z.norm().ln();
    let beta = z.arg();
    -(2.0 * alpha).sinh() * (2.0 * beta).sin() / alpha
}

struct BsParts {
    value: Complex64,
    tanh_x: f64,
    w: f64,
    v: f64,
}

fn bs_parts(n: i64, t: f64, z: Complex64, c: Complex64) -> Result<BsParts> {
    if c.norm() == 0.0 {
        return Err(Error::ZeroNormingConstant);
    }
    let (alpha, beta) = log_parts(z)?;
    let s2a = (2.0 * alpha).sinh();
    let v = -s2a * (2.0 * beta).sin();
    let w = (2.0 * alpha).cosh() * (2.0 * beta).cos() - 1.0;
    let theta = c.norm().ln() - s2a.ln();
    let x = 2.0 * alpha * (n + 1) as f64 - 2.0 * v * t - theta;
    let carrier = Complex64::from_polar(1.0, -(2.0 * beta * (n + 1) as f64 - 2.0 * w * t));
    let value = c / c.norm() * carrier * (s2a / x.cosh());
    Ok(BsParts {
        value,
        tanh_x: x.tanh(),
        w,
        v,
    })
}

/// The bright soliton
/// `(C/|C|) exp(-i[2 beta (n+1) - 2 w t]) sinh(2 alpha) sech(2 alpha (n+1) - 2 v t - theta)`
/// with `v = -sinh 2a sin 2b`, `w = cosh 2a cos 2b - 1`, `theta = ln|C| - ln sinh 2a`.
pub fn bright_soliton(n: i64, t: f64, z: Complex64, c: Complex64) -> Result<Complex64> {
    Ok(bs_parts(n, t, z, c)?.value)
}

/// Exact time derivative of [`bright_soliton`]: `BS (2 i w + 2 v tanh X)`.
pub fn bright_soliton_dt(n: i64, t: f64, z: Complex64, c: Complex64) -> Result<Complex64> {
    let p = bs_parts(n, t, z, c)?;
    Ok(p.value * Complex64::new(2.0 * p.v * p.tanh_x, 2.0 * p.w))
}

/// Reflectionless data: quartets with norming constants at time zero, the
/// lattice window and the time at which to synthesize.
#[derive(Debug, Clone, PartialEq)]
pub struct SolitonSpec {
    pub quartets: Vec<EigenQuartet>,
    pub n_min: i64,
    pub n_max: i64,
    pub time: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct SpecFile {
    quartets: Vec<QuartetRecord>,
    t: f64,
    n_min: i64,
    n_max: i64,
}

impl SolitonSpec {
    pub fn new(quartets: Vec<EigenQuartet>, n_min: i64, n_max: i64, time: f64) -> Self {
        Self {
            quartets,
            n_min,
            n_max,
            time,
        }
    }

    pub fn at_time(&self, time: f64) -> Self {
        Self { time, ..self.clone() }
    }

    pub fn to_json(&self) -> Result<String> {
        let file = SpecFile {
            quartets: self.quartets.iter().map(QuartetRecord::from).collect(),
            t: self.time,
            n_min: self.n_min,
            n_max: self.n_max,
        };
        Ok(serde_json::to_string_pretty(&file)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: SpecFile = serde_json::from_str(text)?;
        let quartets = file
            .quartets
            .iter()
            .map(QuartetRecord::to_quartet)
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::new(quartets, file.n_min, file.n_max, file.t))
    }

    pub fn load_json(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn save_json(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }
}

/// Splits a factor `exp(k)` into `(s, g)` with `s` multiplying the unknown
/// and `g` the remaining row factor, so that `max(|s|, |g|) = 1`.
fn row_scale(k: Complex64) -> (Complex64, Complex64) {
    let one = Complex64::new(1.0, 0.0);
    if k.re <= 0.0 {
        (one, k.exp())
    } else {
        ((-k).exp(), one)
    }
}

struct SiteSystem {
    zs: Vec<Complex64>,
    ws: Vec<Complex64>,
    sa: Vec<Complex64>,
    ga: Vec<Complex64>,
    sb: Vec<Complex64>,
    gb: Vec<Complex64>,
}

impl SiteSystem {
    fn new(quartets: &[EigenQuartet], log_c: &[Complex64], n: i64) -> Self {
        let mut sys = SiteSystem {
            zs: Vec::new(),
            ws: Vec::new(),
            sa: Vec::new(),
            ga: Vec::new(),
            sb: Vec::new(),
            gb: Vec::new(),
        };
        for (q, lc) in quartets.iter().zip(log_c) {
            let lz = q.z.ln();
            // c_j = z^{-2n} C(t),  d_j = conj(z)^{-2n-2} conj(C(t))
            let kc = -2.0 * n as f64 * lz + lc;
            let kd = (-(2.0 * n as f64 + 2.0) * lz + lc).conj();
            let (s, g) = row_scale(kc);
            sys.sa.push(s);
            sys.ga.push(g);
            let (s, g) = row_scale(kd);
            sys.sb.push(s);
            sys.gb.push(g);
            sys.zs.push(q.z);
            sys.ws.push(q.inner_pole());
        }
        sys
    }

    /// Second-column system reduced by `A' = A`, `B' = -B`; unknowns `[A, B]`.
    fn reduced(&self) -> (DMatrix<Complex64>, DVector<Complex64>) {
        let j = self.zs.len();
        let mut m = DMatrix::zeros(2 * j, 2 * j);
        let mut rhs = DVector::zeros(2 * j);
        for a in 0..j {
            m[(a, a)] = self.sa[a];
            rhs[a] = self.ga[a];
            for k in 0..j {
                let (z, w) = (self.zs[a], self.ws[k]);
                m[(a, j + k)] = -self.ga[a] * 2.0 * w / (z * z - w * w);
            }
        }
        for k in 0..j {
            m[(j + k, j + k)] = self.sb[k];
            for l in 0..j {
                let (w, z) = (self.ws[k], self.zs[l]);
                m[(j + k, l)] = -self.gb[k] * 2.0 * w / (w * w - z * z);
            }
        }
        (m, rhs)
    }

    /// Full second-column system; unknowns `[A, A', B, B']` for the poles
    /// `z_j, -z_j, w_k, -w_k`.
    fn full(&self) -> (DMatrix<Complex64>, DVector<Complex64>) {
        let j = self.zs.len();
        let mut m = DMatrix::zeros(4 * j, 4 * j);
        let mut rhs = DVector::zeros(4 * j);
        for a in 0..j {
            for (row, sign) in [(a, 1.0), (j + a, -1.0)] {
                let z = sign * self.zs[a];
                m[(row, row)] = self.sa[a];
                rhs[row] = self.ga[a];
                for k in 0..j {
                    let w = self.ws[k];
                    m[(row, 2 * j + k)] = -self.ga[a] / (z - w);
                    m[(row, 3 * j + k)] = -self.ga[a] / (z + w);
                }
            }
        }
        for k in 0..j {
            for (row, sign) in [(2 * j + k, 1.0), (3 * j + k, -1.0)] {
                let w = sign * self.ws[k];
                m[(row, row)] = self.sb[k];
                for l in 0..j {
                    let z = self.zs[l];
                    m[(row, l)] = -self.gb[k] / (w - z);
                    m[(row, j + l)] = -self.gb[k] / (w + z);
                }
            }
        }
        (m, rhs)
    }
}

fn norm1(m: &DMatrix<Complex64>) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|x| x.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn solve_checked(m: DMatrix<Complex64>, rhs: &DVector<Complex64>) -> Result<DVector<Complex64>> {
    let mn = norm1(&m);
    let lu = m.lu();
    let inv = lu.try_inverse().ok_or(Error::SingularPoleSystem { condition: f64::INFINITY })?;
    let condition = mn * norm1(&inv);
    if !(condition <= COND_LIMIT) {
        return Err(Error::SingularPoleSystem { condition });
    }
    Ok(inv * rhs)
}

fn site_value(quartets: &[EigenQuartet], log_c: &[Complex64], n: i64) -> Result<Complex64> {
    let j = quartets.len();
    let sys = SiteSystem::new(quartets, log_c, n);
    let (m, rhs) = sys.reduced();
    let x = solve_checked(m, &rhs)?;

    let (m4, rhs4) = sys.full();
    let mut ext = DVector::zeros(4 * j);
    for a in 0..j {
        ext[a] = x[a];
        ext[j + a] = x[a];
        ext[2 * j + a] = x[j + a];
        ext[3 * j + a] = -x[j + a];
    }
    let resid = (&m4 * &ext - &rhs4).camax();
    let scale = norm1(&m4) * ext.camax() + rhs4.camax();
    let (a, a_mirror) = if resid > PARITY_TOL * scale {
        let y = solve_checked(m4, &rhs4)?;
        (y.rows(0, j).into_owned(), y.rows(j, j).into_owned())
    } else {
        (x.rows(0, j).into_owned(), x.rows(0, j).into_owned())
    };
    // R_n = -(d/dz) m_21 at z = 0
    Ok((0..j).map(|k| (a[k] + a_mirror[k]) / (quartets[k].z * quartets[k].z)).sum())
}

/// Exact reflectionless state for the given quartets, obtained by solving the
/// pole conditions of the reflectionless Riemann-Hilbert problem at each site.
pub fn synthesize_reflectionless(spec: &SolitonSpec) -> Result<LatticeState> {
    if spec.n_max < spec.n_min + 2 {
        return Err(Error::InvalidConfig("window must hold at least 3 sites".into()));
    }
    let mut seen: Vec<Complex64> = Vec::new();
    for q in &spec.quartets {
        if q.norming.norm() == 0.0 {
            return Err(Error::ZeroNormingConstant);
        }
        let z2 = q.z * q.z;
        if seen.iter().any(|s| (s - z2).norm() <= 1e-14 * z2.norm()) {
            return Err(Error::SingularPoleSystem { condition: f64::INFINITY });
        }
        seen.push(z2);
    }
    let log_c: Vec<Complex64> = spec
        .quartets
        .iter()
        .map(|q| q.norming.ln() + 2.0 * Complex64::i() * q.omega * spec.time)
        .collect();
    let amps = (spec.n_min..=spec.n_max)
        .into_par_iter()
        .map(|n| {
            if spec.quartets.is_empty() {
                Ok(Complex64::new(0.0, 0.0))
            } else {
                site_value(&spec.quartets, &log_c, n)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    LatticeState::new(spec.n_min, amps, spec.time)
}

/// Prescribed zeros `x1, x2` of `f(x) = x^2 - (R_0 + conj R_2) x - R_0 conj R_2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThreeSiteSpec {
    pub x1: Complex64,
    pub x2: Complex64,
    pub r0: Complex64,
    pub r2: Complex64,
}

impl ThreeSiteSpec {
    pub fn new(x1: Complex64, x2: Complex64) -> Result<Self> {
        if x1.norm() == 0.0 || x2.norm() == 0.0 {
            return Err(Error::OutOfRange("x1 and x2 must be nonzero".into()));
        }
        // R_0 and conj(R_2) are the roots of y^2 - (x1 + x2) y - x1 x2
        let s = x1 + x2;
        let disc = (s * s + 4.0 * x1 * x2).sqrt();
        let (y1, y2) = ((s + disc) / 2.0, (s - disc) / 2.0);
        let (r0, r2c) = if y1.norm() >= y2.norm() { (y1, y2) } else { (y2, y1) };
        Ok(Self {
            x1,
            x2,
            r0,
            r2: r2c.conj(),
        })
    }

    /// `a(z) = z^{-4} (z^4 - (x1 + x2) z^2 + x1 x2)`.
    pub fn closed_form_a(&self, z: Complex64) -> Complex64 {
        let z2 = z * z;
        (z2 * z2 - (self.x1 + self.x2) * z2 + self.x1 * self.x2) / (z2 * z2)
    }
}

/// A three-site state together with its spectral data in closed form.
#[derive(Debug, Clone, PartialEq)]
pub struct ThreeSite {
    pub spec: ThreeSiteSpec,
    /// Supported on `n = 0, 1, 2` with `R_1 = 1`.
    pub state: LatticeState,
}

impl ThreeSite {
    pub fn closed_form_a(&self, z: Complex64) -> Complex64 {
        self.spec.closed_form_a(z)
    }
}

pub fn build_three_site(x1: Complex64, x2: Complex64) -> Result<ThreeSite> {
    let spec = ThreeSiteSpec::new(x1, x2)?;
    let state = LatticeState::new(0, vec![spec.r0, Complex64::new(1.0, 0.0), spec.r2], 0.0)?;
    Ok(ThreeSite { spec, state })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn tw_examples() {
        assert_eq!(tw_velocity(c(2.0, 0.0)), 0.0);
        assert!(tw_velocity(c(0.0, 2.0)).abs() < 1e-15);
        let z = Complex64::from_polar(1f64.exp(), -std::f64::consts::FRAC_PI_4);
        assert!((tw_velocity(z) - 3.626860407847019).abs() < 1e-12);
        assert!((tw_velocity(-z) - tw_velocity(z)).abs() < 1e-12);
    }

    #[test]
    fn bs_peak_and_value() {
        let z = c(0.5f64.exp(), 0.0);
        // theta = -ln sinh 1, so sinh 1 sech(ln sinh 1) = 2 tanh^2 1
        let v = bright_soliton(-1, 0.0, z, c(1.0, 0.0)).unwrap();
        assert!((v - c(2.0 * 1f64.tanh().powi(2), 0.0)).norm() < 1e-14);
        let z = Complex64::from_polar(1.3, 0.4);
        let s2a = (2.0 * 1.3f64.ln()).sinh();
        // |C| = sinh 2a puts the peak at n = -1, t = 0
        let v = bright_soliton(-1, 0.0, z, c(s2a, 0.0)).unwrap();
        assert!((v.norm() - s2a).abs() < 1e-14);
    }

    #[test]
    fn bs_phase_modulus_split() {
        let z = Complex64::from_polar(1.4, 1.1);
        let cc = c(0.7, -0.3);
        let rot = Complex64::from_polar(1.0, 0.9);
        for n in -4..4 {
            let a = bright_soliton(n, 1.7, z, rot * cc).unwrap();
            let b = rot * bright_soliton(n, 1.7, z, cc).unwrap();
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn bs_errors() {
        assert!(matches!(bright_soliton(0, 0.0, c(2.0, 0.0), c(0.0, 0.0)), Err(Error::ZeroNormingConstant)));
        assert!(bright_soliton(0, 0.0, c(0.5, 0.0), c(1.0, 0.0)).is_err());
    }

    #[test]
    fn empty_spec_gives_zero_state() {
        let s = synthesize_reflectionless(&SolitonSpec::new(vec![], -5, 5, 3.0)).unwrap();
        assert!(s.amplitudes().iter().all(|x| x.norm() == 0.0));
        assert_eq!(s.time, 3.0);
    }

    #[test]
    fn one_quartet_reproduces_bs() {
        let z = Complex64::from_polar(0.5f64.exp(), 2.0);
        let cc = c(0.3, 1.2);
        let q = EigenQuartet::new(z, cc).unwrap();
        for t in [-7.0, 0.0, 4.5] {
            let s = synthesize_reflectionless(&SolitonSpec::new(vec![q], -40, 40, t)).unwrap();
            for n in -40..=40 {
                let want = bright_soliton(n, t, z, cc).unwrap();
                assert!((s.get(n) - want).norm() < 1e-12, "n={n} t={t}");
            }
        }
    }

    #[test]
    fn three_site_relations() {
        let ts = build_three_site(c(4.0, 0.0), c(9.0, 0.0)).unwrap();
        let sp = ts.spec;
        assert!((sp.r0 + sp.r2.conj() - 13.0).norm() < 1e-12);
        assert!((sp.r0 * sp.r2.conj() + 36.0).norm() < 1e-12);
        assert!(sp.r0.norm() >= sp.r2.norm());
        assert_eq!(ts.state.get(1), c(1.0, 0.0));
        assert!(ts.closed_form_a(c(2.0, 0.0)).norm() < 1e-15);
        assert!(build_three_site(c(0.0, 0.0), c(1.0, 0.0)).is_err());
    }

    #[test]
    fn spec_json_round_trip() {
        let q = EigenQuartet::new(c(1.2, 0.3), c(1.0, -1.0)).unwrap();
        let spec = SolitonSpec::new(vec![q], -10, 12, 2.5);
        let back = SolitonSpec::from_json(&spec.to_json().unwrap()).unwrap();
        assert_eq!(back, spec);
    }
}

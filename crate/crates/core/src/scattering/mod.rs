//! Forward scattering for the Ablowitz-Ladik spectral problem
//! `X_{n+1} = M_n X_n`, `M_n = [[z, -conj(R_n)], [R_n, 1/z]]`.
//!
//! For a windowed potential the Jost solutions are exact powers of `z` outside
//! the window, so `a(z)` and `b(z)` are read off after propagating through the
//! window once. `a` continues analytically to `|z| != 1` through the same
//! product, which is what the eigenvalue search relies on.

mod jost;
mod roots;

use std::f64::consts::PI;
use std::path::Path;

use nalgebra::Matrix2;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{AssumptionKind, Error, Result};
use crate::lattice::{conserved_product, LatticeState};
use crate::soliton::tw_velocity;

pub use jost::{JostKind, JostSolution};
pub use roots::{find_eigenvalues, find_eigenvalues_with};

/// Tunables for [`scatter_with`] and the eigenvalue search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScatterConfig {
    /// Width of the excluded band around the unit circle.
    pub eps0: f64,
    /// Outer radius of the eigenvalue search annulus.
    pub r_max: f64,
    /// Minimum admissible `|a|` on the sample grid.
    pub assumption_floor: f64,
    /// Half-width of the velocity intervals that must stay disjoint.
    pub d: f64,
}

impl Default for ScatterConfig {
    fn default() -> Self {
        Self {
            eps0: 1e-3,
            r_max: 8.0,
            assumption_floor: 1e-6,
            d: 0.05,
        }
    }
}

/// One quartet `{+-z, +-1/conj(z)}` of eigenvalues, stored through its
/// canonical representative `z = exp(alpha + i beta)` with `|z| > 1` and
/// `Re z > 0` (or `Re z = 0`, `Im z > 0`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenQuartet {
    pub z: Complex64,
    pub alpha: f64,
    pub beta: f64,
    /// Norming constant `C` for `+-z` at the owning data's base time.
    pub norming: Complex64,
    /// `(z - 1/z)^2 / 2`.
    pub omega: Complex64,
    pub tw: f64,
}

impl EigenQuartet {
    pub fn new(z: Complex64, norming: Complex64) -> Result<Self> {
        if !(z.norm() > 1.0) || !z.re.is_finite() || !z.im.is_finite() {
            return Err(Error::OutOfRange(format!("eigenvalue {z} must satisfy |z| > 1")));
        }
        let z = canonical(z);
        let alpha = z.norm().ln();
        let beta = z.arg();
        let w = z - z.inv();
        Ok(Self {
            z,
            alpha,
            beta,
            norming,
            omega: 0.5 * w * w,
            tw: tw_velocity(z),
        })
    }

    /// The pole `1/conj(z)` inside the unit disk.
    pub fn inner_pole(&self) -> Complex64 {
        self.z.conj().inv()
    }

    /// Norming constant of the inner pair, `conj(z)^{-2} conj(C)`.
    pub fn inner_norming(&self) -> Complex64 {
        self.z.conj().powi(-2) * self.norming.conj()
    }

    /// Norming constant after elapsed time `dt`: `C exp(2 i omega dt)`.
    pub fn norming_after(&self, dt: f64) -> Complex64 {
        self.norming * (2.0 * Complex64::i() * self.omega * dt).exp()
    }

    pub fn evolved(&self, dt: f64) -> Self {
        Self {
            norming: self.norming_after(dt),
            ..*self
        }
    }
}

/// Representative of `+-z` with `Re z > 0`, or `Re z = 0` and `Im z > 0`.
pub fn canonical(z: Complex64) -> Complex64 {
    let tiny = 1e-14 * z.norm();
    if z.re > tiny || (z.re.abs() <= tiny && z.im > 0.0) {
        z
    } else {
        -z
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatteringSample {
    pub theta: f64,
    pub a: Complex64,
    pub b: Complex64,
    pub r: Complex64,
}

impl ScatteringSample {
    pub fn new(theta: f64, a: Complex64, b: Complex64) -> Self {
        Self { theta, a, b, r: b / a }
    }

    pub fn z(&self) -> Complex64 {
        Complex64::from_polar(1.0, self.theta)
    }
}

/// Residuals of the identities every scattering data set should satisfy.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct ScatteringDiagnostics {
    /// `max | |a|^2 + |b|^2 - c_inf | / c_inf` over the grid.
    pub characterization: f64,
    /// `max |r(theta + pi) + r(theta)|`.
    pub parity: f64,
    pub min_abs_a: f64,
    /// `|a(z) - 1|` at `|z| = 1000`.
    pub large_z: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScatteringData {
    pub samples: Vec<ScatteringSample>,
    /// Sorted by increasing velocity.
    pub quartets: Vec<EigenQuartet>,
    pub c_inf: f64,
    pub base_time: f64,
    pub diagnostics: ScatteringDiagnostics,
}

impl ScatteringData {
    /// Reflection-only data with `a = 1`, `b = r`, mostly for tests of the
    /// asymptotic formulas.
    pub fn from_reflection(n: usize, r: impl Fn(f64) -> Complex64) -> Self {
        let samples: Vec<_> = crate::numerics::trig::grid(n)
            .map(|theta| ScatteringSample::new(theta, Complex64::new(1.0, 0.0), r(theta)))
            .collect();
        let c_inf = samples.iter().map(|s| 1.0 + s.r.norm_sqr()).fold(1.0, f64::max);
        Self {
            samples,
            quartets: Vec::new(),
            c_inf,
            base_time: 0.0,
            diagnostics: ScatteringDiagnostics::default(),
        }
    }

    pub fn n_samples(&self) -> usize {
        self.samples.len()
    }

    pub fn max_abs_r(&self) -> f64 {
        self.samples.iter().map(|s| s.r.norm()).fold(0.0, f64::max)
    }

    pub fn with_quartets(mut self, mut quartets: Vec<EigenQuartet>) -> Self {
        quartets.sort_by(|a, b| a.tw.total_cmp(&b.tw));
        self.quartets = quartets;
        self
    }

    fn to_file(&self) -> ScatteringFile {
        ScatteringFile {
            n_samples: self.samples.len(),
            base_time: self.base_time,
            c_inf: self.c_inf,
            samples: self
                .samples
                .iter()
                .map(|s| SampleRecord {
                    theta: s.theta,
                    a_re: s.a.re,
                    a_im: s.a.im,
                    b_re: s.b.re,
                    b_im: s.b.im,
                })
                .collect(),
            quartets: self.quartets.iter().map(QuartetRecord::from).collect(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_file())?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ScatteringFile = serde_json::from_str(text)?;
        if file.samples.len() != file.n_samples {
            return Err(Error::Parse(format!(
                "n_samples = {} but {} samples present",
                file.n_samples,
                file.samples.len()
            )));
        }
        let samples = file
            .samples
            .iter()
            .map(|s| {
                ScatteringSample::new(
                    s.theta,
                    Complex64::new(s.a_re, s.a_im),
                    Complex64::new(s.b_re, s.b_im),
                )
            })
            .collect();
        let quartets = file
            .quartets
            .iter()
            .map(QuartetRecord::to_quartet)
            .collect::<Result<Vec<_>>>()?;
        let mut data = Self {
            samples,
            quartets: Vec::new(),
            c_inf: file.c_inf,
            base_time: file.base_time,
            diagnostics: ScatteringDiagnostics::default(),
        }
        .with_quartets(quartets);
        data.diagnostics = grid_diagnostics(&data.samples, data.c_inf);
        Ok(data)
    }

    pub fn save_json(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load_json(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct ScatteringFile {
    n_samples: usize,
    base_time: f64,
    c_inf: f64,
    samples: Vec<SampleRecord>,
    quartets: Vec<QuartetRecord>,
}

#[derive(Debug, Serialize, Deserialize)]
struct SampleRecord {
    theta: f64,
    a_re: f64,
    a_im: f64,
    b_re: f64,
    b_im: f64,
}

/// `{z_re, z_im, C_re, C_im}` as stored in scattering and quartet-spec files.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuartetRecord {
    pub z_re: f64,
    pub z_im: f64,
    #[serde(rename = "C_re")]
    pub c_re: f64,
    #[serde(rename = "C_im")]
    pub c_im: f64,
}

impl QuartetRecord {
    pub fn to_quartet(&self) -> Result<EigenQuartet> {
        EigenQuartet::new(
            Complex64::new(self.z_re, self.z_im),
            Complex64::new(self.c_re, self.c_im),
        )
    }
}

impl From<&EigenQuartet> for QuartetRecord {
    fn from(q: &EigenQuartet) -> Self {
        Self {
            z_re: q.z.re,
            z_im: q.z.im,
            c_re: q.norming.re,
            c_im: q.norming.im,
        }
    }
}

/// `[[z, -conj(R)], [R, 1/z]]`; its determinant is `1 + |R|^2`.
pub fn transfer_matrix(z: Complex64, rn: Complex64) -> Result<Matrix2<Complex64>> {
    if z == Complex64::new(0.0, 0.0) {
        return Err(Error::ZeroSpectralParameter);
    }
    Ok(Matrix2::new(z, -rn.conj(), rn, z.inv()))
}

/// `z^{-N} phi_N` at `N = n_max + 1`, propagated with the rescaled matrices
/// `z^{-1} M_n` so that wide windows cannot overflow.
pub(crate) fn scaled_phi_right(z: Complex64, state: &LatticeState) -> [Complex64; 2] {
    let zi = z.inv();
    let zi2 = zi * zi;
    let mut p1 = Complex64::new(1.0, 0.0);
    let mut p2 = Complex64::new(0.0, 0.0);
    for r in state.amplitudes() {
        let n1 = p1 - r.conj() * zi * p2;
        let n2 = r * zi * p1 + zi2 * p2;
        p1 = n1;
        p2 = n2;
    }
    [p1, p2]
}

/// `a(z)` for any nonzero `z` (analytic continuation off the circle).
pub fn a_value(z: Complex64, state: &LatticeState) -> Result<Complex64> {
    if z == Complex64::new(0.0, 0.0) {
        return Err(Error::ZeroSpectralParameter);
    }
    Ok(scaled_phi_right(z, state)[0])
}

/// `z^{2N} * phi2` evaluated in log space.
fn b_from_scaled(z: Complex64, big_n: i64, phi2: Complex64) -> Complex64 {
    if phi2 == Complex64::new(0.0, 0.0) {
        return phi2;
    }
    if (z.norm() - 1.0).abs() < 1e-15 {
        return Complex64::from_polar(1.0, 2.0 * big_n as f64 * z.arg()) * phi2;
    }
    (2.0 * big_n as f64 * z.ln() + phi2.ln()).exp()
}

/// Scattering coefficients `(a, b)` from `phi_n = b psi_n + a psi*_n`.
pub fn compute_ab(z: Complex64, state: &LatticeState) -> Result<(Complex64, Complex64)> {
    if z == Complex64::new(0.0, 0.0) {
        return Err(Error::ZeroSpectralParameter);
    }
    let [p1, p2] = scaled_phi_right(z, state);
    Ok((p1, b_from_scaled(z, state.n_max() + 1, p2)))
}

/// `a'(z0)` by a 32-node trapezoidal Cauchy integral on `|z - z0| = 1e-3`.
pub fn a_derivative(z0: Complex64, state: &LatticeState) -> Complex64 {
    const RADIUS: f64 = 1e-3;
    const NODES: usize = 32;
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..NODES {
        let e = Complex64::from_polar(RADIUS, 2.0 * PI * k as f64 / NODES as f64);
        acc += scaled_phi_right(z0 + e, state)[0] / e;
    }
    acc / NODES as f64
}

/// `C = b_j / a'(z_j)` where `phi_n(z_j) = b_j psi_n(z_j)`.
pub fn norming_constant(z0: Complex64, state: &LatticeState) -> Result<Complex64> {
    let da = a_derivative(z0, state);
    if da.norm() < 1e-10 {
        return Err(Error::DegenerateEigenvalue {
            z: z0,
            derivative: da.norm(),
        });
    }
    Ok(b_at_eigenvalue(z0, state) / da)
}

/// `b` at a zero of `a`, as `phi_m / psi_m` at a site where both sweeps are
/// accurate.
///
/// Both solutions are propagated with per-step normalisation and a running
/// log scale, since `phi` decays like `b z^{-n}` to the right and the
/// rescaled recursion would lose `b` to cancellation.
fn b_at_eigenvalue(z: Complex64, state: &LatticeState) -> Complex64 {
    let zi = z.inv();
    let amps = state.amplitudes();
    let len = amps.len();
    let normalise = |v: [Complex64; 2]| {
        let s = v[0].norm().max(v[1].norm());
        ([v[0] / s, v[1] / s], s.ln())
    };

    // phi from the left: phi_{n_min} = z^{n_min} (1, 0)
    let mut phi = Vec::with_capacity(len + 1);
    let mut v = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
    let mut log_phi = state.n_min() as f64 * z.ln();
    phi.push((v, log_phi));
    for r in amps {
        let (w, ls) = normalise([z * v[0] - r.conj() * v[1], r * v[0] + zi * v[1]]);
        v = w;
        log_phi += ls;
        phi.push((v, log_phi));
    }

    // psi from the right: psi_{n_max+1} = z^{-(n_max+1)} (0, 1)
    let mut psi = vec![([Complex64::new(0.0, 0.0); 2], Complex64::new(0.0, 0.0)); len + 1];
    let mut v = [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)];
    let mut log_psi = -((state.n_max() + 1) as f64) * z.ln();
    psi[len] = (v, log_psi);
    for k in (0..len).rev() {
        let r = amps[k];
        let d = 1.0 + r.norm_sqr();
        let (w, ls) = normalise([(zi * v[0] + r.conj() * v[1]) / d, (z * v[1] - r * v[0]) / d]);
        v = w;
        log_psi += ls;
        psi[k] = (v, log_psi);
    }

    // an error injected at step k grows by |z| per step afterwards, so the
    // loss at m is how far the worst amplified injection exceeds the value
    let g = z.norm().ln();
    let mut loss = vec![0.0; len + 1];
    let mut worst = f64::NEG_INFINITY;
    for (k, (_, l)) in phi.iter().enumerate() {
        worst = (worst + g).max(l.re);
        loss[k] = worst - l.re;
    }
    let mut worst = f64::NEG_INFINITY;
    for (k, (_, l)) in psi.iter().enumerate().rev() {
        worst = (worst + g).max(l.re);
        loss[k] += worst - l.re;
    }
    let m = (0..=len).min_by(|&i, &j| loss[i].total_cmp(&loss[j])).unwrap_or(0);
    let ((u, lu), (w, lw)) = (phi[m], psi[m]);
    let ratio = (w[0].conj() * u[0] + w[1].conj() * u[1]) / (w[0].norm_sqr() + w[1].norm_sqr());
    ratio * (lu - lw).exp()
}

fn grid_diagnostics(samples: &[ScatteringSample], c_inf: f64) -> ScatteringDiagnostics {
    let n = samples.len();
    let characterization = samples
        .iter()
        .map(|s| (s.a.norm_sqr() + s.b.norm_sqr() - c_inf).abs() / c_inf)
        .fold(0.0, f64::max);
    let parity = if n.is_multiple_of(2) {
        (0..n / 2)
            .map(|k| (samples[k].r + samples[k + n / 2].r).norm())
            .fold(0.0, f64::max)
    } else {
        f64::NAN
    };
    let min_abs_a = samples.iter().map(|s| s.a.norm()).fold(f64::INFINITY, f64::min);
    ScatteringDiagnostics {
        characterization,
        parity,
        min_abs_a,
        large_z: 0.0,
    }
}

/// [`scatter_with`] using [`ScatterConfig::default`].
pub fn scatter(state: &LatticeState, n: usize) -> Result<ScatteringData> {
    scatter_with(state, n, &ScatterConfig::default())
}

/// Circle samples, conserved constant and identity residuals, without the
/// eigenvalue search or any assumption checks.
pub fn circle_data(state: &LatticeState, n: usize) -> Result<ScatteringData> {
    if n < 64 || !n.is_power_of_two() {
        return Err(Error::InvalidConfig(format!(
            "sample count must be a power of two >= 64, got {n}"
        )));
    }
    let samples: Vec<ScatteringSample> = (0..n)
        .into_par_iter()
        .map(|k| {
            let theta = 2.0 * PI * k as f64 / n as f64;
            let (a, b) = compute_ab(Complex64::from_polar(1.0, theta), state)?;
            Ok(ScatteringSample::new(theta, a, b))
        })
        .collect::<Result<_>>()?;
    let c_inf = conserved_product(state);
    let mut diagnostics = grid_diagnostics(&samples, c_inf);
    diagnostics.large_z = (a_value(Complex64::new(0.0, 1000.0), state)? - 1.0).norm();
    Ok(ScatteringData {
        samples,
        quartets: Vec::new(),
        c_inf,
        base_time: state.time,
        diagnostics,
    })
}

/// Full scattering data: `n` circle samples, eigenvalue quartets with their
/// norming constants, and the conserved constant. Fails if the generic
/// spectral assumptions do not hold.
pub fn scatter_with(state: &LatticeState, n: usize, cfg: &ScatterConfig) -> Result<ScatteringData> {
    let mut data = circle_data(state, n)?;
    if !(data.diagnostics.min_abs_a > cfg.assumption_floor) {
        return Err(Error::AssumptionViolated(AssumptionKind::ZeroOnCircle));
    }

    let roots = find_eigenvalues_with(state, cfg)?;
    let mut quartets = Vec::with_capacity(roots.len());
    for z in roots {
        let c = norming_constant(z, state).map_err(|e| match e {
            Error::DegenerateEigenvalue { .. } => Error::AssumptionViolated(AssumptionKind::DoubleZero),
            other => other,
        })?;
        quartets.push(EigenQuartet::new(z, c)?);
    }
    quartets.sort_by(|a, b| a.tw.total_cmp(&b.tw));
    if quartets.windows(2).any(|w| (w[1].tw - w[0].tw).abs() <= 2.0 * cfg.d) {
        return Err(Error::AssumptionViolated(AssumptionKind::VelocityCollision));
    }
    data.quartets = quartets;
    Ok(data)
}

/// Advances scattering data to time `t`: `r -> r exp(i dt (z - 1/z)^2)` on
/// the circle (with `a` fixed) and `C -> C exp(2 i omega dt)`.
pub fn evolve_scattering(data: &ScatteringData, t: f64) -> ScatteringData {
    let dt = t - data.base_time;
    let samples = data
        .samples
        .iter()
        .map(|s| {
            let z = s.z();
            let w = z - z.conj();
            let r = s.r * (Complex64::i() * dt * w * w).exp();
            ScatteringSample {
                theta: s.theta,
                a: s.a,
                b: r * s.a,
                r,
            }
        })
        .collect();
    ScatteringData {
        samples,
        quartets: data.quartets.iter().map(|q| q.evolved(dt)).collect(),
        c_inf: data.c_inf,
        base_time: t,
        diagnostics: data.diagnostics,
    }
}

//! Truncated lattice states and the RK4 integrator.

use std::fmt::Write as _;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// A finite window `R_{n_min} ..= R_{n_max}` of the lattice at time `time`.
///
/// Sites outside the window are treated as zero.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeState {
    n_min: i64,
    amplitudes: Vec<Complex64>,
    pub time: f64,
}

impl LatticeState {
    pub fn new(n_min: i64, amplitudes: Vec<Complex64>, time: f64) -> Result<Self> {
        if amplitudes.len() < 3 {
            return Err(Error::InvalidState(format!(
                "window length {} < 3",
                amplitudes.len()
            )));
        }
        if let Some(k) = amplitudes.iter().position(|r| !(r.re.is_finite() && r.im.is_finite())) {
            return Err(Error::InvalidState(format!(
                "non-finite amplitude at n={}",
                n_min + k as i64
            )));
        }
        if !time.is_finite() {
            return Err(Error::InvalidState("non-finite time".into()));
        }
        Ok(Self {
            n_min,
            amplitudes,
            time,
        })
    }

    pub fn zeros(n_min: i64, n_max: i64, time: f64) -> Result<Self> {
        if n_max < n_min {
            return Err(Error::InvalidState(format!("empty window [{n_min}, {n_max}]")));
        }
        Self::new(
            n_min,
            vec![Complex64::new(0.0, 0.0); (n_max - n_min + 1) as usize],
            time,
        )
    }

    /// Samples `f(n)` on `n_min ..= n_max`.
    pub fn from_fn(n_min: i64, n_max: i64, time: f64, f: impl Fn(i64) -> Complex64) -> Result<Self> {
        if n_max < n_min {
            return Err(Error::InvalidState(format!("empty window [{n_min}, {n_max}]")));
        }
        Self::new(n_min, (n_min..=n_max).map(f).collect(), time)
    }

    pub fn n_min(&self) -> i64 {
        self.n_min
    }

    pub fn n_max(&self) -> i64 {
        self.n_min + self.amplitudes.len() as i64 - 1
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// `R_n`, zero outside the window.
    pub fn get(&self, n: i64) -> Complex64 {
        let k = n - self.n_min;
        if k < 0 || k >= self.amplitudes.len() as i64 {
            Complex64::new(0.0, 0.0)
        } else {
            self.amplitudes[k as usize]
        }
    }

    pub fn indices(&self) -> impl Iterator<Item = i64> + '_ {
        self.n_min..=self.n_max()
    }

    /// Largest `|R_n|` over the outermost `guard` sites at either edge.
    pub fn edge_amplitude(&self, guard: usize) -> f64 {
        let g = guard.min(self.amplitudes.len());
        let left = self.amplitudes[..g].iter();
        let right = self.amplitudes[self.amplitudes.len() - g..].iter();
        left.chain(right).map(|r| r.norm()).fold(0.0, f64::max)
    }

    pub fn check_tail(&self, cfg: &IntegratorConfig) -> Result<()> {
        let edge = self.edge_amplitude(cfg.tail_guard);
        if edge > cfg.tail_tol || !edge.is_finite() {
            return Err(Error::TailOverflow {
                time: self.time,
                edge_amplitude: edge,
                tolerance: cfg.tail_tol,
            });
        }
        Ok(())
    }

    /// The mirrored state `R_n -> R_{-n}`.
    pub fn reflected(&self) -> Self {
        let mut amplitudes = self.amplitudes.clone();
        amplitudes.reverse();
        Self {
            n_min: -self.n_max(),
            amplitudes,
            time: self.time,
        }
    }

    /// Index of the site with the largest modulus.
    pub fn argmax(&self) -> i64 {
        let (k, _) = self
            .amplitudes
            .iter()
            .enumerate()
            .fold((0, f64::MIN), |best, (k, r)| {
                if r.norm() > best.1 {
                    (k, r.norm())
                } else {
                    best
                }
            });
        self.n_min + k as i64
    }

    pub fn max_abs_diff(&self, other: &LatticeState) -> f64 {
        let lo = self.n_min.min(other.n_min);
        let hi = self.n_max().max(other.n_max());
        (lo..=hi)
            .map(|n| (self.get(n) - other.get(n)).norm())
            .fold(0.0, f64::max)
    }

    /// CSV text: `# t=<t> n_min=<n_min>` followed by `n,re,im` rows.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::with_capacity(64 * self.len());
        writeln!(out, "# t={} n_min={}", fmt_real(self.time), self.n_min).unwrap();
        for (n, r) in self.indices().zip(&self.amplitudes) {
            writeln!(out, "{},{},{}", n, fmt_real(r.re), fmt_real(r.im)).unwrap();
        }
        out
    }

    pub fn write_csv(&self, mut w: impl Write) -> Result<()> {
        w.write_all(self.to_csv_string().as_bytes())?;
        Ok(())
    }

    pub fn save_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_csv_string())?;
        Ok(())
    }

    pub fn read_csv(r: impl Read) -> Result<Self> {
        let mut lines = BufReader::new(r).lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty lattice file".into()))??;
        let (time, n_min) = parse_header(&header)?;
        let mut amplitudes = Vec::new();
        for (k, line) in lines.enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let mut fields = line.split(',');
            let mut next = |what: &str| {
                fields
                    .next()
                    .map(str::trim)
                    .ok_or_else(|| Error::Parse(format!("row {}: missing {what}", k + 2)))
            };
            let n: i64 = next("n")?
                .parse()
                .map_err(|e| Error::Parse(format!("row {}: {e}", k + 2)))?;
            let re: f64 = next("re")?
                .parse()
                .map_err(|e| Error::Parse(format!("row {}: {e}", k + 2)))?;
            let im: f64 = next("im")?
                .parse()
                .map_err(|e| Error::Parse(format!("row {}: {e}", k + 2)))?;
            if n != n_min + amplitudes.len() as i64 {
                return Err(Error::Parse(format!(
                    "row {}: expected n={}, found {n}",
                    k + 2,
                    n_min + amplitudes.len() as i64
                )));
            }
            amplitudes.push(Complex64::new(re, im));
        }
        Self::new(n_min, amplitudes, time)
    }

    pub fn load_csv(path: impl AsRef<Path>) -> Result<Self> {
        Self::read_csv(std::fs::File::open(path)?)
    }
}

fn parse_header(header: &str) -> Result<(f64, i64)> {
    let body = header
        .trim()
        .strip_prefix('#')
        .ok_or_else(|| Error::Parse(format!("bad header {header:?}")))?;
    let mut time = None;
    let mut n_min = None;
    for tok in body.split_whitespace() {
        if let Some(v) = tok.strip_prefix("t=") {
            time = Some(v.parse::<f64>().map_err(|e| Error::Parse(format!("t: {e}")))?);
        } else if let Some(v) = tok.strip_prefix("n_min=") {
            n_min = Some(v.parse::<i64>().map_err(|e| Error::Parse(format!("n_min: {e}")))?);
        }
    }
    match (time, n_min) {
        (Some(t), Some(n)) => Ok((t, n)),
        _ => Err(Error::Parse(format!("bad header {header:?}"))),
    }
}

/// 17 significant digits.
pub fn fmt_real(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct IntegratorConfig {
    pub dt: f64,
    pub tail_tol: f64,
    pub tail_guard: usize,
    pub snapshot_times: Vec<f64>,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            tail_tol: 1e-10,
            tail_guard: 5,
            snapshot_times: Vec::new(),
        }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidConfig(format!("dt must be > 0, got {}", self.dt)));
        }
        if !(self.tail_tol > 0.0) {
            return Err(Error::InvalidConfig("tail_tol must be > 0".into()));
        }
        if self.tail_guard == 0 {
            return Err(Error::InvalidConfig("tail_guard must be >= 1".into()));
        }
        if self.snapshot_times.iter().any(|t| !(*t >= 0.0)) {
            return Err(Error::InvalidConfig("snapshot times must be nonnegative".into()));
        }
        if self.snapshot_times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidConfig("snapshot times must be increasing".into()));
        }
        Ok(())
    }
}

/// Writes `dR_n/dt` for every site of `r` into `out`, zero Dirichlet outside.
fn rhs_into(r: &[Complex64], out: &mut [Complex64]) {
    let len = r.len();
    let zero = Complex64::new(0.0, 0.0);
    for k in 0..len {
        let left = if k > 0 { r[k - 1] } else { zero };
        let right = if k + 1 < len { r[k + 1] } else { zero };
        let sum = left + right;
        let lin = sum - 2.0 * r[k];
        out[k] = I * (lin + r[k].norm_sqr() * sum);
    }
}

/// `dR_n/dt = i[(R_{n+1} - 2R_n + R_{n-1}) + |R_n|^2 (R_{n+1} + R_{n-1})]`.
pub fn rhs(state: &LatticeState) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); state.len()];
    rhs_into(&state.amplitudes, &mut out);
    out
}

/// Scratch buffers for repeated RK4 steps on one window.
struct Rk4 {
    k1: Vec<Complex64>,
    k2: Vec<Complex64>,
    k3: Vec<Complex64>,
    k4: Vec<Complex64>,
    scratch: Vec<Complex64>,
}

impl Rk4 {
    fn new(len: usize) -> Self {
        let z = vec![Complex64::new(0.0, 0.0); len];
        Self {
            k1: z.clone(),
            k2: z.clone(),
            k3: z.clone(),
            k4: z.clone(),
            scratch: z,
        }
    }

    fn advance(&mut self, r: &mut [Complex64], h: f64) {
        rhs_into(r, &mut self.k1);
        for ((s, x), k) in self.scratch.iter_mut().zip(r.iter()).zip(&self.k1) {
            *s = x + 0.5 * h * k;
        }
        rhs_into(&self.scratch, &mut self.k2);
        for ((s, x), k) in self.scratch.iter_mut().zip(r.iter()).zip(&self.k2) {
            *s = x + 0.5 * h * k;
        }
        rhs_into(&self.scratch, &mut self.k3);
        for ((s, x), k) in self.scratch.iter_mut().zip(r.iter()).zip(&self.k3) {
            *s = x + h * k;
        }
        rhs_into(&self.scratch, &mut self.k4);
        let w = h / 6.0;
        for (i, x) in r.iter_mut().enumerate() {
            *x += w * (self.k1[i] + 2.0 * self.k2[i] + 2.0 * self.k3[i] + self.k4[i]);
        }
    }
}

/// One classical RK4 step of size `cfg.dt`.
pub fn step(state: &LatticeState, cfg: &IntegratorConfig) -> Result<LatticeState> {
    cfg.validate()?;
    let mut next = state.clone();
    Rk4::new(state.len()).advance(&mut next.amplitudes, cfg.dt);
    next.time += cfg.dt;
    next.check_tail(cfg)?;
    Ok(next)
}

/// Snapshots produced by [`integrate`].
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub snapshots: Vec<LatticeState>,
    /// `|c(t_k) - c(0)| / c(0)` for the conserved product at each snapshot.
    pub product_drift: Vec<f64>,
}

impl Trajectory {
    pub fn max_drift(&self) -> f64 {
        self.product_drift.iter().copied().fold(0.0, f64::max)
    }

    pub fn at(&self, t: f64) -> Option<&LatticeState> {
        self.snapshots.iter().find(|s| (s.time - t).abs() < 1e-9)
    }
}

/// Integrates to each of `cfg.snapshot_times`, shortening the last sub-step
/// so every snapshot lands exactly on its requested time.
pub fn integrate(state: &LatticeState, cfg: &IntegratorConfig) -> Result<Trajectory> {
    cfg.validate()?;
    if let Some(first) = cfg.snapshot_times.first() {
        if *first < state.time - 1e-12 {
            return Err(Error::InvalidConfig(format!(
                "snapshot time {first} precedes state time {}",
                state.time
            )));
        }
    }
    let c0 = conserved_product(state);
    let mut current = state.clone();
    let mut rk = Rk4::new(state.len());
    let mut snapshots = Vec::with_capacity(cfg.snapshot_times.len());
    let mut product_drift = Vec::with_capacity(cfg.snapshot_times.len());
    let eps = 1e-12 * cfg.dt;

    for &target in &cfg.snapshot_times {
        let start = current.time;
        let span = target - start;
        let full = ((span - eps) / cfg.dt).floor().max(0.0) as u64;
        for k in 1..=full {
            rk.advance(&mut current.amplitudes, cfg.dt);
            current.time = start + k as f64 * cfg.dt;
            current.check_tail(cfg)?;
        }
        let rest = target - current.time;
        if rest > eps {
            rk.advance(&mut current.amplitudes, rest);
            current.check_tail(cfg)?;
        }
        current.time = target;
        product_drift.push((conserved_product(&current) - c0).abs() / c0);
        snapshots.push(current.clone());
    }
    Ok(Trajectory {
        snapshots,
        product_drift,
    })
}

/// `prod_n (1 + |R_n|^2)` over the window. Conserved by the flow.
pub fn conserved_product(state: &LatticeState) -> f64 {
    // Summing logs keeps wide windows from overflowing the plain product.
    state
        .amplitudes
        .iter()
        .map(|r| r.norm_sqr().ln_1p())
        .sum::<f64>()
        .exp()
}

/// Weighted norm `sum (1 + |n|)^p |R_n|`.
pub fn norm_l1p(state: &LatticeState, p: u32) -> f64 {
    state
        .indices()
        .zip(&state.amplitudes)
        .map(|(n, r)| (1.0 + n.unsigned_abs() as f64).powi(p as i32) * r.norm())
        .sum()
}

//! Experiment pipeline: build initial data, scatter, integrate, predict and
//! compare, then write everything to an output directory.

mod fit;
mod generators;
mod peaks;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::asymptotics::{predict, Prediction, PredictorParams};
use crate::error::{Error, Result};
use crate::lattice::{fmt_real, integrate, IntegratorConfig, LatticeState, Trajectory};
use crate::scattering::{scatter_with, ScatterConfig, ScatteringData};

pub use fit::{fit_power_law, linear_fit, measure_phase_shift, LinearFit, PhaseShift, PowerLawFit};
pub use generators::{bs_plus_noise, gaussian, InitialData};
pub use peaks::{track_peak, PeakMeasurement, PeakTracker};

fn default_scattering_n() -> usize {
    512
}

fn default_out_dir() -> PathBuf {
    PathBuf::from("out")
}

/// Full description of one experiment, mirrored by the JSON config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub initial_data: InitialData,
    #[serde(default)]
    pub integrator: IntegratorConfig,
    #[serde(default = "default_scattering_n")]
    pub scattering_n: usize,
    /// Rays `n/t` along which predictions are compared.
    #[serde(default)]
    pub rays: Vec<f64>,
    /// Snapshot and comparison times.
    pub times: Vec<f64>,
    #[serde(default)]
    pub params: PredictorParams,
    #[serde(default)]
    pub scatter: ScatterConfig,
    #[serde(default = "default_out_dir")]
    pub out_dir: PathBuf,
    #[serde(default)]
    pub seed: u64,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        self.integrator_config().validate()?;
        self.params.validate()?;
        if self.times.is_empty() {
            return Err(Error::InvalidConfig("times must not be empty".into()));
        }
        if self.rays.iter().any(|r| !r.is_finite()) {
            return Err(Error::InvalidConfig("rays must be finite".into()));
        }
        if self.scattering_n < 64 || !self.scattering_n.is_power_of_two() {
            return Err(Error::InvalidConfig("scattering_n must be a power of two >= 64".into()));
        }
        Ok(())
    }

    /// The integrator settings with `times` as snapshot times.
    pub fn integrator_config(&self) -> IntegratorConfig {
        IntegratorConfig {
            snapshot_times: self.times.clone(),
            ..self.integrator.clone()
        }
    }
}

/// One simulated-versus-predicted comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRecord {
    pub n: i64,
    pub t: f64,
    pub ray: f64,
    pub prediction: Prediction,
    pub sim: Complex64,
    /// `|sim - value|` where a value is predicted, otherwise `|sim|`.
    pub abs_err: f64,
    /// `abs_err / |value|`, or `|sim| / envelope` for envelope-only rows.
    pub rel_err: f64,
}

impl ComparisonRecord {
    pub fn new(ray: f64, prediction: Prediction, sim: Complex64) -> Self {
        let (abs_err, rel_err) = match (prediction.value, prediction.envelope) {
            (Some(v), _) => {
                let e = (sim - v).norm();
                (e, e / v.norm())
            }
            (None, Some(env)) => (sim.norm(), sim.norm() / env),
            (None, None) => (sim.norm(), f64::NAN),
        };
        Self {
            n: prediction.n,
            t: prediction.t,
            ray,
            prediction,
            sim,
            abs_err,
            rel_err,
        }
    }

    pub const CSV_HEADER: &'static str =
        "n,t,ray,region,sim_re,sim_im,pred_re,pred_im,envelope,order,abs_err,rel_err";

    pub fn csv_row(&self) -> String {
        let opt = |x: Option<f64>| x.map(fmt_real).unwrap_or_default();
        let p = &self.prediction;
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            self.n,
            fmt_real(self.t),
            fmt_real(self.ray),
            p.region,
            fmt_real(self.sim.re),
            fmt_real(self.sim.im),
            opt(p.value.map(|v| v.re)),
            opt(p.value.map(|v| v.im)),
            opt(p.envelope),
            p.order,
            fmt_real(self.abs_err),
            fmt_real(self.rel_err),
        )
    }
}

/// CSV rows `n,t,region,re_pred,im_pred,envelope,order`.
pub fn prediction_csv(predictions: &[Prediction]) -> String {
    let mut out = String::from("n,t,region,re_pred,im_pred,envelope,order\n");
    let opt = |x: Option<f64>| x.map(fmt_real).unwrap_or_default();
    for p in predictions {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            p.n,
            fmt_real(p.t),
            p.region,
            opt(p.value.map(|v| v.re)),
            opt(p.value.map(|v| v.im)),
            opt(p.envelope),
            p.order
        );
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct RayFit {
    pub ray: f64,
    pub region: String,
    pub fit: PowerLawFit,
}

#[derive(Debug, Clone, Serialize)]
pub struct RegionSummary {
    pub count: usize,
    pub max_abs_err: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct QuartetSummary {
    pub z_re: f64,
    pub z_im: f64,
    #[serde(rename = "C_re")]
    pub c_re: f64,
    #[serde(rename = "C_im")]
    pub c_im: f64,
    pub tw: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub n_min: i64,
    pub n_max: i64,
    pub c_inf: f64,
    pub quartets: Vec<QuartetSummary>,
    pub diagnostics: crate::scattering::ScatteringDiagnostics,
    pub max_product_drift: f64,
    pub records: usize,
    pub regions: BTreeMap<String, RegionSummary>,
    /// Power-law fits of `abs_err` against `t` per ray (single-region rays
    /// with at least five times).
    pub fits: Vec<RayFit>,
}

/// Everything [`run`] computed, besides what it wrote to disk.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub initial: LatticeState,
    pub scattering: ScatteringData,
    pub trajectory: Trajectory,
    pub records: Vec<ComparisonRecord>,
    pub summary: RunSummary,
}

fn snapshot_name(t: f64) -> String {
    format!("t_{t:013.6}.csv")
}

/// Builds the initial state and integrates it, writing `snapshots/` under
/// `out_dir`.
pub fn simulate(cfg: &ExperimentConfig) -> Result<(LatticeState, Trajectory)> {
    cfg.validate()?;
    let initial = cfg.initial_data.build(cfg.seed)?;
    let traj = integrate(&initial, &cfg.integrator_config())?;
    let dir = cfg.out_dir.join("snapshots");
    std::fs::create_dir_all(&dir)?;
    for s in &traj.snapshots {
        s.save_csv(dir.join(snapshot_name(s.time)))?;
    }
    Ok((initial, traj))
}

/// Predictions and comparisons for every `(ray, t)` pair.
pub fn compare_snapshots(
    snapshots: &[LatticeState],
    data: &ScatteringData,
    rays: &[f64],
    params: &PredictorParams,
) -> Result<Vec<ComparisonRecord>> {
    let jobs: Vec<(f64, &LatticeState)> = rays.iter().flat_map(|&r| snapshots.iter().map(move |s| (r, s))).collect();
    jobs.into_par_iter()
        .map(|(ray, s)| {
            let n = (ray * s.time).round() as i64;
            let p = predict(n, s.time, data, params)?;
            Ok(ComparisonRecord::new(ray, p, s.get(n)))
        })
        .collect()
}

/// The full pipeline: simulate, scatter the initial state, predict along
/// every ray at every time, compare, and write `snapshots/`,
/// `scattering.json`, `comparison.csv` and `summary.json` to `out_dir`.
pub fn run(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let (initial, trajectory) = simulate(cfg)?;
    let scattering = scatter_with(&initial, cfg.scattering_n, &cfg.scatter)?;
    scattering.save_json(cfg.out_dir.join("scattering.json"))?;
    let records = compare_snapshots(&trajectory.snapshots, &scattering, &cfg.rays, &cfg.params)?;

    let mut csv = String::from(ComparisonRecord::CSV_HEADER);
    csv.push('\n');
    for r in &records {
        csv.push_str(&r.csv_row());
        csv.push('\n');
    }
    std::fs::write(cfg.out_dir.join("comparison.csv"), csv)?;

    let mut regions: BTreeMap<String, RegionSummary> = BTreeMap::new();
    for r in &records {
        let kind = r.prediction.region.to_string();
        let e = regions.entry(kind).or_insert(RegionSummary {
            count: 0,
            max_abs_err: 0.0,
        });
        e.count += 1;
        e.max_abs_err = e.max_abs_err.max(r.abs_err);
    }
    let mut fits = Vec::new();
    for &ray in &cfg.rays {
        let rows: Vec<&ComparisonRecord> = records.iter().filter(|r| r.ray == ray).collect();
        let Some(first) = rows.first() else { continue };
        if rows.iter().any(|r| r.prediction.region != first.prediction.region) {
            continue;
        }
        let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.t, r.abs_err)).collect();
        if let Ok(fit) = fit_power_law(&pts) {
            fits.push(RayFit {
                ray,
                region: first.prediction.region.to_string(),
                fit,
            });
        }
    }
    let summary = RunSummary {
        n_min: initial.n_min(),
        n_max: initial.n_max(),
        c_inf: scattering.c_inf,
        quartets: scattering
            .quartets
            .iter()
            .map(|q| QuartetSummary {
                z_re: q.z.re,
                z_im: q.z.im,
                c_re: q.norming.re,
                c_im: q.norming.im,
                tw: q.tw,
            })
            .collect(),
        diagnostics: scattering.diagnostics,
        max_product_drift: trajectory.max_drift(),
        records: records.len(),
        regions,
        fits,
    };
    std::fs::write(cfg.out_dir.join("summary.json"), serde_json::to_string_pretty(&summary)?)?;
    Ok(RunOutput {
        initial,
        scattering,
        trajectory,
        records,
        summary,
    })
}

//! Numerical laboratory for the focusing Ablowitz-Ladik lattice
//!
//! ```text
//! i dR_n/dt + (R_{n+1} - 2R_n + R_{n-1}) + |R_n|^2 (R_{n+1} + R_{n-1}) = 0
//! ```
//!
//! The crate integrates truncated lattice states, computes their scattering
//! data (reflection coefficient on the unit circle, eigenvalue quartets and
//! norming constants), synthesizes exact reflectionless multi-soliton states,
//! and evaluates the long-time asymptotic predictions (soliton resolution with
//! collision- and radiation-induced phase shifts).

// `!(x > y)` is used on purpose so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod error;
pub mod harness;
pub mod lattice;
pub mod numerics;
pub mod scattering;
pub mod soliton;

pub use num_complex::Complex64;

pub use asymptotics::{
    blaschke_t, classify_region, delta_eval, phase_factors, phase_re_at_eigenvalue, predict,
    saddle_points, t_infinity, DecayOrder, DeltaFunction, PhaseFactors, PhaseGeometry,
    Prediction, PredictorParams, RegionTag,
};
pub use error::{AssumptionKind, Error, Result};
pub use harness::{
    fit_power_law, measure_phase_shift, run, track_peak, ComparisonRecord, ExperimentConfig,
    PeakMeasurement, PeakTracker, PowerLawFit,
};
pub use lattice::{conserved_product, integrate, norm_l1p, rhs, step, IntegratorConfig, LatticeState, Trajectory};
pub use scattering::{
    a_derivative, compute_ab, evolve_scattering, find_eigenvalues, norming_constant, scatter,
    scatter_with, transfer_matrix, EigenQuartet, JostKind, JostSolution, ScatterConfig,
    ScatteringData, ScatteringSample,
};
pub use soliton::{
    bright_soliton, bright_soliton_dt, build_three_site, synthesize_reflectionless, tw_velocity,
    SolitonSpec, ThreeSite, ThreeSiteSpec,
};

use std::fmt;

/// Which generic spectral assumption a potential failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AssumptionKind {
    /// `a(z)` vanishes on (or within `eps0` of) the unit circle.
    ZeroOnCircle,
    /// An eigenvalue is not simple.
    DoubleZero,
    /// Two quartets travel at velocities closer than `2d`.
    VelocityCollision,
}

impl fmt::Display for AssumptionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            AssumptionKind::ZeroOnCircle => "zero_on_circle",
            AssumptionKind::DoubleZero => "double_zero",
            AssumptionKind::VelocityCollision => "velocity_collision",
        };
        f.write_str(s)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid lattice state: {0}")]
    InvalidState(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("tail overflow at t={time}: edge amplitude {edge_amplitude:e} exceeds tolerance {tolerance:e}")]
    TailOverflow {
        time: f64,
        edge_amplitude: f64,
        tolerance: f64,
    },

    #[error("spectral parameter must be nonzero")]
    ZeroSpectralParameter,

    #[error("assumption violated: {0}")]
    AssumptionViolated(AssumptionKind),

    #[error("degenerate eigenvalue at {z}: |a'(z)| = {derivative:e}")]
    DegenerateEigenvalue {
        z: num_complex::Complex64,
        derivative: f64,
    },

    #[error("norming constant must be nonzero")]
    ZeroNormingConstant,

    #[error("pole-condition system is singular (condition number {condition:e})")]
    SingularPoleSystem { condition: f64 },

    #[error("value out of range: {0}")]
    OutOfRange(String),

    #[error("evaluation point {z} lies on a jump arc")]
    ArcCollision { z: num_complex::Complex64 },

    #[error("Blaschke product evaluated at a pole ({z})")]
    PoleHit { z: num_complex::Complex64 },

    #[error("interior and edge bands overlap at n={n}, t={t}")]
    AmbiguousRegion { n: i64, t: f64 },

    #[error("no local maximum of |R_n| near n={hint}")]
    NoPeak { hint: f64 },

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("root search failed: {0}")]
    RootSearch(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code: 1 for configuration/IO, 2 for assumption
    /// violations, 3 for numeric failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidConfig(_)
            | Error::InvalidState(_)
            | Error::Parse(_)
            | Error::Io(_)
            | Error::Json(_)
            | Error::AmbiguousRegion { .. }
            | Error::OutOfRange(_) => 1,
            Error::AssumptionViolated(_) | Error::DegenerateEigenvalue { .. } => 2,
            _ => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

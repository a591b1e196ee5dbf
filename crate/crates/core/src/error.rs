use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension zero: block specification is empty")]
    DimensionZero,

    #[error("invalid block ({sigma}, {m}): sigma must be positive and finite, m at least 1")]
    InvalidBlock { sigma: f64, m: usize },

    #[error("complex eigenvalues are not supported (re = {re}, im = {im})")]
    ComplexSpectrum { re: f64, im: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("implicit midpoint solve failed at t = {t}; try a step below {suggested_step}")]
    Integration { t: f64, suggested_step: f64 },

    #[error("loop is not closed (gap {gap:e})")]
    OpenLoop { gap: f64 },

    #[error("path sampling too coarse after refinement; refine path (increment {increment} rad at t = {t})")]
    RefinePath { t: f64, increment: f64 },

    #[error("degenerate: monodromy has eigenvalue 1")]
    Degenerate,

    #[error("index method unavailable: {0}")]
    IndexUnavailable(String),

    #[error("fixed point at {0:?} is not isolated at any admissible radius")]
    NotIsolated(Vec<f64>),

    #[error("precondition violated: {reason}; largest admissible epsilon is {max_epsilon}")]
    Precondition { reason: String, max_epsilon: f64 },

    #[error("homotopy support is unbounded or exceeds the ball of radius {ball_radius}")]
    UnboundedSupport { ball_radius: f64 },

    #[error("field is not a verified solution: residual {residual:e}")]
    UnverifiedField { residual: f64 },

    #[error("sieve cap {cap} reached; resume from prime floor {resume_from}")]
    SieveCap { cap: u64, resume_from: u64 },

    #[error("newton iteration did not converge (residual {residual:e})")]
    NoConvergence { residual: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

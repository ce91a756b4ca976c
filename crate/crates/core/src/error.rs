use thiserror::Error;

/// Errors raised by the numerical operations of this crate.
#[derive(Debug, Error)]
pub enum Error {
    /// A caller broke an operation precondition (wrong realness, missing axis, ...).
    #[error("contract violation: {0}")]
    Contract(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    /// The latent carrier cannot be represented on the requested time grid.
    #[error(
        "carrier pulsation {omega_c} exceeds the Nyquist limit {nyquist} of the time grid; \
         lower the light speed (omega_c = m c^2 / hbar) or use a time step below {max_step}"
    )]
    AboveNyquist {
        omega_c: f64,
        nyquist: f64,
        max_step: f64,
    },

    #[error("time step {dt} violates the stability bound ({reason}); use dt <= {suggested_dt}")]
    Stability {
        dt: f64,
        suggested_dt: f64,
        reason: String,
    },

    #[error("moment is undefined: {0}")]
    UndefinedMoment(String),

    #[error("moment order {order} exceeds the configured maximum {max}")]
    OrderTooHigh { order: usize, max: usize },

    /// Spectral and derivative routes disagree beyond tolerance.
    #[error("moment routes disagree at order {order}: relative gap {gap:e} > {tolerance:e}")]
    RouteDisagreement {
        order: usize,
        gap: f64,
        tolerance: f64,
    },

    #[error("ill-conditioned moment system: condition number {condition:e} > {limit:e}; reduce the support size or re-map the support")]
    Conditioning { condition: f64, limit: f64 },

    #[error("reconstruction failed: {0}")]
    Reconstruction(String),

    #[error("characteristic-function truncation bound {bound:e} exceeds {limit:e} at |s| = {s}; max usable |s| is {max_s}")]
    TailBound {
        s: f64,
        bound: f64,
        limit: f64,
        max_s: f64,
    },

    #[error("window is not beat-commensurate: {0}")]
    Window(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn contract<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Contract(msg.into()))
}

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("{quantity} = {value} lies outside {range}")]
    Domain {
        quantity: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("mode grid covers only {coverage:.6e} of the pulse spectrum (bandwidth {omega_b:.4e} rad/s < {required:.4e} rad/s)")]
    GridTooNarrow {
        coverage: f64,
        omega_b: f64,
        required: f64,
    },

    #[error("norm drifted by {drift:.3e}, beyond tolerance {tolerance:.1e}")]
    NormDrift { drift: f64, tolerance: f64 },

    #[error("step size {dt:.3e} s too large for fastest rate {rate:.3e} rad/s; need dt <= {required:.3e} s")]
    StepTooLarge { dt: f64, rate: f64, required: f64 },

    #[error("mode grid mismatch: {0}")]
    GridMismatch(String),

    #[error("every mode is below the reflection-extraction weight threshold")]
    AllModesMasked,

    #[error("matrix exponential failed: {0}")]
    Propagator(String),

    #[error("division by zero: {0}")]
    DivisionByZero(&'static str),

    #[error(
        "photon is not in the (|H> + |V>)/sqrt(2) polarization state (deviation {deviation:.3e})"
    )]
    PhotonNotDiagonal { deviation: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

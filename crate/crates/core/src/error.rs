use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    /// The Green's function is singular at zero separation.
    #[error("domain error: k'R = {0} must be strictly positive")]
    Domain(f64),

    #[error("invalid sweep: {0}")]
    InvalidSweep(String),

    #[error("non-finite value in column `{column}` at {axis} = {axis_value}")]
    NonFinite {
        column: String,
        axis: &'static str,
        axis_value: f64,
    },

    #[error("time step {dt} exceeds the stability limit {limit} (0.01/Gamma)")]
    StepTooLarge { dt: f64, limit: f64 },

    #[error("observation time t*gamma = {0} is below the asymptotic threshold 10")]
    ObservationTooShort(f64),

    #[error("quadrature did not converge: relative change {achieved:.3e} > {target:.3e} after node doubling")]
    NonConvergence { achieved: f64, target: f64 },

    #[error("unknown power case `{0}`")]
    UnknownCase(String),

    #[error("unknown output selector `{0}`")]
    UnknownOutput(String),
}

pub type Result<T> = std::result::Result<T, Error>;

//! Every source of randomness in the simulations.
//!
//! Streams are keyed by `(base_seed, stream_index)` so Monte Carlo samples
//! can be replayed individually and run on any number of workers.

mod bounded;
mod noise;
mod qwiener;
mod rng;

pub use bounded::{bridge_value, AlphaOfH, BetaBridge, BetaBridgeParams, RandomSymbolProcess};
pub use noise::{
    cauchy_modulated_value, draw_noise, laplace_from_uniform, switching_branch, NoiseModel,
    SwitchingLaw,
};
pub use qwiener::{
    qwiener_eigenvalue, qwiener_field_from_coefficients, qwiener_pointwise_variance,
    sample_qwiener_increment, QWienerSpec,
};
pub use rng::RngStream;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DriverError {
    #[error("time step must be positive, got {0}")]
    NonpositiveDt(f64),
    #[error("time {t} outside the bridge horizon [0, {horizon}]")]
    OutOfHorizon { t: f64, horizon: f64 },
    #[error("{modes} modes per axis exceed the Nyquist limit of a {nodes}-node axis")]
    NyquistViolation { modes: usize, nodes: usize },
    #[error("grid does not match the Q-Wiener domain")]
    GridMismatch,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub(crate) fn check_dt(dt: f64) -> Result<(), DriverError> {
    if dt > 0.0 && dt.is_finite() {
        Ok(())
    } else {
        Err(DriverError::NonpositiveDt(dt))
    }
}

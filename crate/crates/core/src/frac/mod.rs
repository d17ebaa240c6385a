//! Periodic grids, the discrete fractional Laplacian and its Fourier
//! multiplier oracle, plus regularity checks for random-symbol multipliers.
//!
//! Every operator here returns `-(-Δ)^{p/2} f` for a spectral exponent
//! `p ∈ (0, 2)`: the multiplier is `-|ξ|^p`.

mod grid;
mod multiplier;
mod operator;
mod spectral;

pub use grid::{wrap, Grid, GridField};
pub use multiplier::{
    alpha_resolvent_holder_check, multiplier_lipschitz_check, AlphaHolderReport, BetaPair,
    MultiplierReport,
};
pub use operator::{frac_constant, second_difference_laplacian, FracLapOperator};
pub use spectral::spectral_oracle;

use thiserror::Error;

use crate::levy::LevyError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FracError {
    #[error("spectral exponent {0} outside the admissible range")]
    ExponentOutOfRange(f64),
    #[error("field is defined on a different grid")]
    GridMismatch,
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("field length {got} does not match node count {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("field contains NaN or infinite values")]
    NonFinite,
    #[error("driver value out of range: {0}")]
    BetaOutOfRange(String),
    #[error("probe grid is empty")]
    EmptyGrid,
    #[error(transparent)]
    Symbol(#[from] LevyError),
}

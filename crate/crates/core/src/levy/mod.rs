//! Lévy symbols: continuous negative definite functions, their
//! Lévy–Khintchine quadruples and the generator examples used across the
//! test suites.
//!
//! Convention: the characteristic function of the process is
//! `E exp(i ξ·X_t) = exp(-t ψ(ξ))`, so every symbol has `Re ψ ≥ 0` and the
//! associated generator is `-ψ(D)`.

mod matrix;
mod quadruple;
mod symbol;

pub use matrix::{check_psd, check_symmetric, symmetric_eigenvalues};
pub use quadruple::{JumpLaw, LevyMeasureSpec, LevyQuadruple, RadialDensity};
pub use symbol::{
    characteristic_function, compose_symbols, eval_symbol, generator_symbol_table,
    growth_bound_constant, linear_probe_grid, BernsteinSpec, SymbolKind, SymbolSpec,
};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LevyError {
    #[error("dimension mismatch: symbol has d = {expected}, argument has length {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("unsupported Lévy measure: {0}")]
    UnsupportedMeasure(String),
    #[error("inner symbol is not real valued at probe point {0:?}")]
    NotRealValued(Vec<f64>),
    #[error("probe grid is empty")]
    EmptyGrid,
    #[error("time must be nonnegative, got {0}")]
    NegativeTime(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

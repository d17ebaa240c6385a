//! Stochastic multiscale simulation of acid-mediated tumour invasion.
//!
//! The crate is organised bottom-up:
//!
//! * [`levy`] evaluates Lévy symbols (continuous negative definite functions)
//!   and their Lévy–Khintchine quadruples.
//! * [`drivers`] owns every source of randomness: counter-based RNG streams,
//!   the micro-model noise laws, bounded driver processes and the truncated
//!   Q-Wiener field sampler.
//! * [`frac`] holds periodic grids, the discrete fractional Laplacian, its
//!   Fourier-multiplier oracle and multiplier regularity checks.
//! * [`micro_sim`] is the particle model, [`macro_sim`] the coupled stochastic
//!   fractional reaction–diffusion–taxis solver and [`ensemble`] the Monte
//!   Carlo harness on top of both.
//!
//! Numerical kernels are generic over [`Real`]; the `*64` aliases below are
//! the concrete double-precision types used by the simulations and the CLI.

pub mod drivers;
pub mod ensemble;
pub mod frac;
pub mod levy;
pub mod linsolve;
pub mod macro_sim;
pub mod micro_sim;
mod scalar;
pub mod special;

pub use scalar::Real;

pub type SymbolSpec64 = levy::SymbolSpec<f64>;
pub type LevyQuadruple64 = levy::LevyQuadruple<f64>;
pub type Grid64 = frac::Grid<f64>;
pub type GridField64 = frac::GridField<f64>;
pub type FracLapOperator64 = frac::FracLapOperator<f64>;
pub type QWienerSpec64 = drivers::QWienerSpec<f64>;

pub type SymbolSpec32 = levy::SymbolSpec<f32>;
pub type Grid32 = frac::Grid<f32>;
pub type GridField32 = frac::GridField<f32>;
pub type FracLapOperator32 = frac::FracLapOperator<f32>;

use crate::drivers::{AlphaOfH, QWienerSpec};
use crate::frac::Grid;

use super::MacroError;

/// Initial fields: Gaussian bumps for `H` and `C` centred in the box and
/// `N = 0.5 + 0.5 s` with `s` smoothed seeded noise.
#[derive(Debug, Clone, PartialEq)]
pub struct MacroInit {
    pub h_amplitude: f64,
    pub h_width: f64,
    pub c_amplitude: f64,
    pub c_width: f64,
    pub n_seed: u64,
    pub n_smoothing: usize,
}

impl Default for MacroInit {
    fn default() -> Self {
        Self {
            h_amplitude: 0.1,
            h_width: 0.2,
            c_amplitude: 1.0,
            c_width: 0.25,
            n_seed: 3,
            n_smoothing: 2,
        }
    }
}

/// Parameters of the macroscopic solver. Defaults are the reference
/// simulation parameters; `gamma_c` plays the role of `σ_C`.
#[derive(Debug, Clone, PartialEq)]
pub struct MacroConfig {
    pub nx: usize,
    pub ny: usize,
    pub hx: f64,
    pub hy: f64,
    pub tau: f64,
    pub steps: usize,
    pub gamma_1: f64,
    pub gamma_2: f64,
    pub gamma_3: f64,
    pub sigma_w: f64,
    pub sigma_h: f64,
    pub gamma_c: f64,
    pub gamma_g: f64,
    pub gamma_h: f64,
    pub gamma_f: f64,
    pub alpha: AlphaOfH,
    /// Q-Wiener modes per axis.
    pub modes: usize,
    pub solver_tol: f64,
    /// `None` means `10 · nodes`.
    pub max_iter: Option<usize>,
    /// Pair `g` with `ΔH`, `h` with `ΔN`, add both fluxes and let `N` grow,
    /// as the printed scheme does.
    pub scheme_literal: bool,
    /// Steps at which snapshots are kept.
    pub snapshots: Vec<usize>,
    pub init: MacroInit,
}

impl Default for MacroConfig {
    fn default() -> Self {
        Self {
            nx: 21,
            ny: 21,
            hx: 0.1,
            hy: 0.1,
            tau: 0.1,
            steps: 150,
            gamma_1: 0.005,
            gamma_2: 0.05,
            gamma_3: 0.015,
            sigma_w: 0.131,
            sigma_h: 0.0008,
            gamma_c: 0.00035,
            gamma_g: 0.0007,
            gamma_h: 0.0037,
            gamma_f: 0.0082,
            alpha: AlphaOfH {
                a: 1.0,
                a1: 0.6,
                a2: 0.9,
            },
            modes: 4,
            solver_tol: 1e-10,
            max_iter: None,
            scheme_literal: false,
            snapshots: vec![0, 50, 100, 150],
            init: MacroInit::default(),
        }
    }
}

impl MacroConfig {
    pub fn grid(&self) -> Result<Grid<f64>, MacroError> {
        Grid::new_2d(self.hx * self.nx as f64, self.hy * self.ny as f64, self.nx, self.ny)
            .map_err(|e| MacroError::ConfigInvalid(e.to_string()))
    }

    pub fn qwiener(&self) -> Result<QWienerSpec<f64>, MacroError> {
        Ok(QWienerSpec::for_grid(&self.grid()?, self.modes))
    }

    pub fn max_iterations(&self) -> usize {
        self.max_iter.unwrap_or(10 * self.nx * self.ny)
    }

    /// Copy with noise, reactions, taxis and advection switched off.
    pub fn diffusion_only(&self) -> Self {
        Self {
            gamma_1: 0.0,
            gamma_2: 0.0,
            gamma_3: 0.0,
            sigma_w: 0.0,
            gamma_g: 0.0,
            gamma_h: 0.0,
            gamma_f: 0.0,
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<(), MacroError> {
        let bad = |m: String| Err(MacroError::ConfigInvalid(m));
        let rates = [
            ("gamma_1", self.gamma_1),
            ("gamma_2", self.gamma_2),
            ("gamma_3", self.gamma_3),
            ("sigma_W", self.sigma_w),
            ("sigma_H", self.sigma_h),
            ("gamma_C", self.gamma_c),
            ("gamma_g", self.gamma_g),
            ("gamma_h", self.gamma_h),
            ("gamma_f", self.gamma_f),
        ];
        for (name, v) in rates {
            if !(v >= 0.0 && v.is_finite()) {
                return bad(format!("{name} must be a finite nonnegative rate, got {v}"));
            }
        }
        if !(self.tau > 0.0 && self.hx > 0.0 && self.hy > 0.0) {
            return bad(format!("tau, h_x1, h_x2 must be positive, got {}, {}, {}", self.tau, self.hx, self.hy));
        }
        if self.nx < 3 || self.ny < 3 {
            return bad(format!("grid needs at least 3 nodes per axis, got {}x{}", self.nx, self.ny));
        }
        let AlphaOfH { a, a1, a2 } = self.alpha;
        if !(a >= 0.0 && 0.5 < a1 && a1 < a2 && a2 < 1.0) {
            return bad(format!("alpha driver needs a >= 0 and 1/2 < a1 < a2 < 1, got ({a}, {a1}, {a2})"));
        }
        if self.modes == 0 || 2 * self.modes >= self.nx.min(self.ny) {
            return bad(format!("Q-Wiener modes {} violate 2K < min(N_x1, N_x2)", self.modes));
        }
        if !(self.solver_tol > 0.0) || self.max_iterations() == 0 {
            return bad("solver tolerance and iteration cap must be positive".into());
        }
        if let Some(&s) = self.snapshots.iter().find(|&&s| s > self.steps) {
            return bad(format!("snapshot step {s} beyond N = {}", self.steps));
        }
        let i = &self.init;
        if !(i.h_amplitude >= 0.0 && i.c_amplitude >= 0.0 && i.h_width > 0.0 && i.c_width > 0.0) {
            return bad("initial bumps need nonnegative amplitudes and positive widths".into());
        }
        Ok(())
    }
}

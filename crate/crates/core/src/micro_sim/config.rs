use crate::drivers::NoiseModel;
use crate::frac::Grid;

use super::MicroError;

/// Parameters of the particle model. Rates and thresholds are calibrated
/// so that the Gaussian baseline keeps roughly a third of the cells.
#[derive(Debug, Clone, PartialEq)]
pub struct MicroConfig {
    pub particles: usize,
    pub steps: usize,
    pub tau: f64,
    pub noise: NoiseModel,
    /// Multiplier `κ` of the noise increment.
    pub noise_scale: f64,
    /// `+1` moves cells up the tissue gradient, `-1` down.
    pub taxis_sign: f64,
    pub h1: f64,
    pub h2: f64,
    pub h3: f64,
    pub k_t: f64,
    pub k_b: f64,
    pub q0: f64,
    pub k_v: f64,
    pub gamma: f64,
    pub sigma_dep: f64,
    pub mx: usize,
    pub my: usize,
    /// Cells start on a square lattice covering `0.5 ± lattice_half_width`.
    pub lattice_half_width: f64,
    pub hi0: f64,
    pub he_amplitude: f64,
    pub he_width: f64,
    pub tissue_seed: u64,
    pub tissue_smoothing: usize,
}

impl Default for MicroConfig {
    fn default() -> Self {
        Self {
            particles: 2500,
            steps: 25,
            tau: 0.1,
            noise: NoiseModel::Gaussian,
            noise_scale: 0.2,
            taxis_sign: 1.0,
            h1: 0.05,
            h2: 0.26,
            h3: 14.0,
            k_t: 2.0,
            k_b: 0.2,
            q0: 0.4,
            k_v: 0.01,
            gamma: 0.1,
            sigma_dep: 0.03,
            mx: 50,
            my: 50,
            lattice_half_width: 0.1,
            hi0: 0.155,
            he_amplitude: 12.0,
            he_width: 0.13,
            tissue_seed: 7,
            tissue_smoothing: 4,
        }
    }
}

impl MicroConfig {
    pub fn grid(&self) -> Result<Grid<f64>, MicroError> {
        Grid::new_2d(1.0, 1.0, self.mx, self.my).map_err(|e| MicroError::ConfigInvalid(e.to_string()))
    }

    pub fn validate(&self) -> Result<(), MicroError> {
        let bad = |m: String| Err(MicroError::ConfigInvalid(m));
        if self.particles == 0 {
            return bad("particle count must be at least 1".into());
        }
        if !(self.tau > 0.0) {
            return bad(format!("time step {} must be positive", self.tau));
        }
        if !(self.h1 < self.h2) {
            return bad(format!("kill band h1 = {} must lie below h2 = {}", self.h1, self.h2));
        }
        let rates = [
            ("k_t", self.k_t),
            ("k_b", self.k_b),
            ("q0", self.q0),
            ("k_v", self.k_v),
            ("gamma", self.gamma),
            ("sigma_dep", self.sigma_dep),
            ("noise_scale", self.noise_scale),
            ("hi0", self.hi0),
            ("he_amplitude", self.he_amplitude),
        ];
        for (name, v) in rates {
            if !(v >= 0.0) || !v.is_finite() {
                return bad(format!("{name} = {v} must be a nonnegative number"));
            }
        }
        if !(self.he_width > 0.0) || !(0.0..0.5).contains(&self.lattice_half_width) {
            return bad("acid bump width must be positive and the lattice inside the box".into());
        }
        if self.mx < 3 || self.my < 3 {
            return bad("field grid needs at least 3 nodes per axis".into());
        }
        self.noise
            .validate()
            .map_err(|e| MicroError::ConfigInvalid(e.to_string()))
    }
}

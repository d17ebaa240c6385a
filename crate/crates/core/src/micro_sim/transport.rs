use rand::Rng;
use rand_distr::{Distribution, Exp};

use crate::drivers::RngStream;

use super::MicroError;

/// One-dimensional velocity-jump process on a periodic interval: cells move
/// at one of finitely many speeds and, at the events of a Poisson clock with
/// rate `rate`, switch to a cyclically adjacent velocity.
#[derive(Debug, Clone, PartialEq)]
pub struct VelocityJumpConfig {
    pub velocities: Vec<f64>,
    pub rate: f64,
    pub t_end: f64,
    pub particles: usize,
    /// Initial positions are uniform on `[x0.0, x0.1)`.
    pub x0: (f64, f64),
    pub length: f64,
}

impl Default for VelocityJumpConfig {
    fn default() -> Self {
        Self {
            velocities: vec![-1.0, -0.5, 0.5, 1.0],
            rate: 5.0,
            t_end: 0.5,
            particles: 50_000,
            x0: (0.4, 0.6),
            length: 1.0,
        }
    }
}

/// Final positions, simulated exactly event by event. The starting
/// velocity is uniform over the velocity set.
pub fn velocity_jump_positions(cfg: &VelocityJumpConfig, rng: &mut RngStream) -> Result<Vec<f64>, MicroError> {
    let nv = cfg.velocities.len();
    if nv == 0 || !(cfg.rate > 0.0) || !(cfg.t_end >= 0.0) || !(cfg.length > 0.0) || cfg.x0.1 < cfg.x0.0 {
        return Err(MicroError::ConfigInvalid(format!("{cfg:?}")));
    }
    let clock = Exp::new(cfg.rate).map_err(|e| MicroError::ConfigInvalid(e.to_string()))?;
    let mut out = Vec::with_capacity(cfg.particles);
    for _ in 0..cfg.particles {
        let mut x = cfg.x0.0 + (cfg.x0.1 - cfg.x0.0) * rng.random::<f64>();
        let mut k = rng.random_range(0..nv);
        let mut t = 0.0;
        loop {
            let wait = clock.sample(rng);
            let dt = wait.min(cfg.t_end - t);
            x += cfg.velocities[k] * dt;
            t += dt;
            if t >= cfg.t_end {
                break;
            }
            k = if rng.random::<bool>() { (k + 1) % nv } else { (k + nv - 1) % nv };
        }
        out.push(x.rem_euclid(cfg.length));
    }
    Ok(out)
}

//! Particle model of acid-mediated invasion.
//!
//! Each cell carries a position, a velocity and an intracellular proton
//! concentration `Hi`. Velocities follow `dV = s∇N dt + κ dL` with one of the
//! [`NoiseModel`](crate::drivers::NoiseModel) laws, positions are wrapped on
//! the periodic unit box, and the extracellular protons `He` and the tissue
//! density `N` change only around the cells through bilinear scatter.
//! Closures:
//!
//! * efflux `T(Hi, He) = k_T Hi / (1 + He)`
//! * buffering `S1(Hi) = k_B Hi`
//! * glycolytic production `Q(Hi) = q0 / (1 + Hi)`
//! * vascular sequestering `S2 = k_V He`
//!
//! A cell dies when `Hi < h1`, `Hi > h2` or `He(X) > h3`.

mod config;
mod fields;
mod transport;

pub use config::MicroConfig;
pub use fields::{bilinear_weights, deposit_fields, gaussian_smooth, histogram_of_positions};
pub use transport::{velocity_jump_positions, VelocityJumpConfig};

use thiserror::Error;

use crate::drivers::{draw_noise, DriverError, RngStream};
use crate::frac::{Grid, GridField};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MicroError {
    #[error("invalid micro configuration: {0}")]
    ConfigInvalid(String),
    #[error("no alive particles")]
    NoAliveParticles,
    #[error(transparent)]
    Driver(#[from] DriverError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Particle {
    pub x: [f64; 2],
    pub v: [f64; 2],
    pub hi: f64,
    pub alive: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MicroState {
    pub particles: Vec<Particle>,
    pub he: GridField<f64>,
    pub ntissue: GridField<f64>,
    pub t: f64,
    pub step: usize,
    /// Number of negative values reset to zero so far.
    pub clamp_events: usize,
}

impl MicroState {
    pub fn alive(&self) -> usize {
        self.particles.iter().filter(|p| p.alive).count()
    }

    pub fn grid(&self) -> &Grid<f64> {
        self.he.grid()
    }

    /// Normalised histogram of alive positions.
    pub fn density_histogram(&self, grid: &Grid<f64>) -> Result<GridField<f64>, MicroError> {
        density_histogram(self, grid)
    }
}

/// Initial state: cells on a centred square lattice at rest with uniform
/// `Hi`, a Gaussian acid bump and a smoothed random tissue in `[0.5, 1]`.
pub fn init_micro(cfg: &MicroConfig) -> Result<MicroState, MicroError> {
    cfg.validate()?;
    let grid = cfg.grid()?;
    let side = (cfg.particles as f64).sqrt().ceil() as usize;
    let (lo, hi) = (0.5 - cfg.lattice_half_width, 0.5 + cfg.lattice_half_width);
    let step = if side > 1 { (hi - lo) / (side - 1) as f64 } else { 0.0 };
    let centre = if side > 1 { lo } else { 0.5 };
    let particles = (0..cfg.particles)
        .map(|k| Particle {
            x: [centre + (k % side) as f64 * step, centre + (k / side) as f64 * step],
            v: [0.0, 0.0],
            hi: cfg.hi0,
            alive: true,
        })
        .collect();

    let w2 = 2.0 * cfg.he_width * cfg.he_width;
    let he = GridField::from_fn(grid, |x, y| {
        let (dx, dy) = (periodic_gap(x, 0.5, 1.0), periodic_gap(y, 0.5, 1.0));
        cfg.he_amplitude * (-(dx * dx + dy * dy) / w2).exp()
    });
    let ntissue = tissue_field(&grid, cfg.tissue_seed, cfg.tissue_smoothing);
    Ok(MicroState {
        particles,
        he,
        ntissue,
        t: 0.0,
        step: 0,
        clamp_events: 0,
    })
}

pub(crate) fn periodic_gap(a: f64, b: f64, l: f64) -> f64 {
    let d = (a - b).rem_euclid(l);
    d.min(l - d)
}

/// `0.5 + 0.5 · s`, where `s` is seeded uniform noise smoothed by repeated
/// 5-point averaging and rescaled to `[0, 1]`.
pub fn tissue_field(grid: &Grid<f64>, seed: u64, passes: usize) -> GridField<f64> {
    use rand::Rng;
    let mut rng = RngStream::new(seed, u64::MAX);
    let noise: Vec<f64> = (0..grid.nodes()).map(|_| rng.random::<f64>()).collect();
    let mut f = GridField::new(*grid, noise).expect("uniform draws are finite");
    for _ in 0..passes {
        let g = f.clone();
        for j in 0..grid.my() {
            for i in 0..grid.mx() {
                let (ii, jj) = (i as isize, j as isize);
                let v = (g.at(i, j)
                    + g.at_wrapped(ii - 1, jj)
                    + g.at_wrapped(ii + 1, jj)
                    + g.at_wrapped(ii, jj - 1)
                    + g.at_wrapped(ii, jj + 1))
                    / 5.0;
                f.values_mut()[grid.index(i, j)] = v;
            }
        }
    }
    let (lo, hi) = f
        .values()
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let span = hi - lo;
    f.map(|v| if span > 0.0 { 0.5 + 0.5 * (v - lo) / span } else { 0.75 })
}

fn gather(field: &GridField<f64>, x: [f64; 2]) -> f64 {
    bilinear_weights(field.grid(), x)
        .iter()
        .map(|&(idx, w)| w * field.values()[idx])
        .sum()
}

/// Centred-difference gradient of `N` interpolated bilinearly at `x`.
fn gather_gradient(n: &GridField<f64>, x: [f64; 2]) -> [f64; 2] {
    let g = n.grid();
    let (mx, _) = (g.mx(), g.my());
    let (ix, iy) = (0.5 / g.dx(), 0.5 / g.dy());
    let mut out = [0.0; 2];
    for (idx, w) in bilinear_weights(g, x) {
        let (i, j) = ((idx % mx) as isize, (idx / mx) as isize);
        out[0] += w * (n.at_wrapped(i + 1, j) - n.at_wrapped(i - 1, j)) * ix;
        out[1] += w * (n.at_wrapped(i, j + 1) - n.at_wrapped(i, j - 1)) * iy;
    }
    out
}

/// One explicit step. Phases: move every alive cell, gather `He` and update
/// `Hi`, scatter the `He` and `N` increments, clamp, then apply the kill sets.
pub fn micro_step(state: &mut MicroState, cfg: &MicroConfig, rng: &mut RngStream) -> Result<(), MicroError> {
    let tau = cfg.tau;
    let grid = *state.grid();
    let (lx, ly) = (grid.lx(), grid.ly());

    for p in state.particles.iter_mut().filter(|p| p.alive) {
        let grad = gather_gradient(&state.ntissue, p.x);
        for (k, g) in grad.iter().enumerate() {
            let noise = draw_noise(&cfg.noise, rng, tau)?;
            p.v[k] += cfg.taxis_sign * g * tau + cfg.noise_scale * noise;
        }
        p.x[0] = (p.x[0] + p.v[0] * tau).rem_euclid(lx);
        p.x[1] = (p.x[1] + p.v[1] * tau).rem_euclid(ly);
    }

    let mut d_he = vec![0.0; grid.nodes()];
    let mut n_loss = vec![0.0; grid.nodes()];
    for p in state.particles.iter_mut().filter(|p| p.alive) {
        let he = gather(&state.he, p.x);
        let efflux = cfg.k_t * p.hi / (1.0 + he);
        let dhi = -efflux - cfg.k_b * p.hi + cfg.q0 / (1.0 + p.hi);
        p.hi += tau * dhi;
        if p.hi < 0.0 {
            p.hi = 0.0;
            state.clamp_events += 1;
        }
        for (idx, w) in bilinear_weights(&grid, p.x) {
            d_he[idx] += w * tau * (efflux - cfg.k_v * state.he.values()[idx]);
            n_loss[idx] += w * tau * cfg.gamma * he;
        }
    }
    let he = state.he.values_mut();
    for (v, d) in he.iter_mut().zip(&d_he) {
        *v += d;
        if *v < 0.0 {
            *v = 0.0;
            state.clamp_events += 1;
        }
    }
    // dN/dt = -γ He N integrated exactly with He frozen over the step
    let n = state.ntissue.values_mut();
    for (v, loss) in n.iter_mut().zip(&n_loss) {
        *v *= (-loss).exp();
    }

    for p in state.particles.iter_mut().filter(|p| p.alive) {
        let he = gather(&state.he, p.x);
        if p.hi < cfg.h1 || p.hi > cfg.h2 || he > cfg.h3 {
            p.alive = false;
        }
    }
    state.t += tau;
    state.step += 1;
    Ok(())
}

/// `#alive / m0`.
pub fn survival_fraction(state: &MicroState, m0: usize) -> f64 {
    state.alive() as f64 / m0.max(1) as f64
}

pub fn density_histogram(state: &MicroState, grid: &Grid<f64>) -> Result<GridField<f64>, MicroError> {
    let xs: Vec<[f64; 2]> = state.particles.iter().filter(|p| p.alive).map(|p| p.x).collect();
    histogram_of_positions(&xs, grid).ok_or(MicroError::NoAliveParticles)
}

/// Result of a full micro run.
#[derive(Debug, Clone, PartialEq)]
pub struct MicroRun {
    pub state: MicroState,
    /// Alive count after each step, starting with the initial population.
    pub alive: Vec<usize>,
}

pub fn run_micro(cfg: &MicroConfig, rng: &mut RngStream) -> Result<MicroRun, MicroError> {
    let mut state = init_micro(cfg)?;
    let mut alive = Vec::with_capacity(cfg.steps + 1);
    alive.push(state.alive());
    for _ in 0..cfg.steps {
        micro_step(&mut state, cfg, rng)?;
        alive.push(state.alive());
    }
    Ok(MicroRun { state, alive })
}

//! Coupled stochastic fractional reaction–diffusion–taxis system for the
//! proton index `H`, cancer cells `C` and normal tissue `N`:
//!
//! ```text
//! dH = σ_H ΔH + γ1 H(1-H) + γ_f f ∇H·∇C + σ_W H dW,      f = C/(1+C)
//! dC = -σ_C (-Δ)^{α_t} C + γ2 C(1-C) + ∇·(g∇N) - ∇·(h∇H)
//! dN = -γ3 (C+H) N
//! ```
//!
//! with `g = γ_g N C/(1+(C+N)²)`, `h = γ_h H C/(1+(C+H)²)` and a scalar
//! exponent `α_t` driven by the spatial mean of `H`. One step updates `N`
//! explicitly, then `H` (implicit diffusion and advection), then `C`
//! (implicit fractional diffusion, explicit taxis and growth). Negative
//! values are reset to zero and counted.

mod config;

pub use config::{MacroConfig, MacroInit};

use thiserror::Error;

use crate::drivers::{sample_qwiener_increment, DriverError, RngStream};
use crate::frac::{FracError, FracLapOperator, Grid, GridField};
use crate::linsolve::{bicgstab, FnOperator, SolveError, SolveReport};
use crate::micro_sim::tissue_field;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MacroError {
    #[error("invalid macro configuration: {0}")]
    ConfigInvalid(String),
    #[error("{field} solve diverged at step {step}: {source}")]
    SolverDiverged {
        field: &'static str,
        step: usize,
        source: SolveError,
    },
    #[error("fractional exponent out of range: {0}")]
    ExponentOutOfRange(f64),
    #[error("invariant violated at step {step}: {invariant}")]
    InvariantViolated { invariant: String, step: usize },
    #[error(transparent)]
    Driver(#[from] DriverError),
    #[error(transparent)]
    Frac(#[from] FracError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct MacroState {
    pub h: GridField<f64>,
    pub c: GridField<f64>,
    pub n: GridField<f64>,
    pub t: f64,
    pub step: usize,
    /// Current `α_t`.
    pub alpha: f64,
}

impl MacroState {
    pub fn grid(&self) -> &Grid<f64> {
        self.h.grid()
    }

    /// The same state with every field rolled by `(si, sj)` cells.
    pub fn shifted(&self, si: isize, sj: isize) -> Self {
        Self {
            h: self.h.shifted(si, sj),
            c: self.c.shifted(si, sj),
            n: self.n.shifted(si, sj),
            ..self.clone()
        }
    }
}

/// Diagnostics of one accepted step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepReport {
    pub step: usize,
    pub alpha: f64,
    pub h_solve: SolveReport<f64>,
    pub c_solve: SolveReport<f64>,
    pub clamp_events: usize,
}

fn bump(grid: &Grid<f64>, amplitude: f64, width: f64) -> GridField<f64> {
    let (cx, cy) = (0.5 * grid.lx(), 0.5 * grid.ly());
    let w2 = 2.0 * width * width;
    GridField::from_fn(*grid, |x, y| {
        let dx = crate::micro_sim::periodic_gap(x, cx, grid.lx());
        let dy = crate::micro_sim::periodic_gap(y, cy, grid.ly());
        amplitude * (-(dx * dx + dy * dy) / w2).exp()
    })
}

pub fn init_macro(cfg: &MacroConfig) -> Result<MacroState, MacroError> {
    cfg.validate()?;
    let grid = cfg.grid()?;
    let i = &cfg.init;
    let h = bump(&grid, i.h_amplitude, i.h_width);
    let c = bump(&grid, i.c_amplitude, i.c_width);
    let n = tissue_field(&grid, i.n_seed, i.n_smoothing);
    let alpha = cfg.alpha.alpha(h.mean());
    Ok(MacroState {
        h,
        c,
        n,
        t: 0.0,
        step: 0,
        alpha,
    })
}

/// Periodic neighbour indices `[x-1, x+1, y-1, y+1]` of every node.
struct Stencil {
    nb: Vec<[usize; 4]>,
    /// `1/δx²`, `1/δy²`.
    inv2: [f64; 2],
}

impl Stencil {
    fn new(grid: &Grid<f64>) -> Self {
        let (mx, my) = (grid.mx(), grid.my());
        let mut nb = Vec::with_capacity(grid.nodes());
        for j in 0..my {
            for i in 0..mx {
                nb.push([
                    j * mx + (i + mx - 1) % mx,
                    j * mx + (i + 1) % mx,
                    ((j + my - 1) % my) * mx + i,
                    ((j + 1) % my) * mx + i,
                ]);
            }
        }
        Self {
            nb,
            inv2: [1.0 / (grid.dx() * grid.dx()), 1.0 / (grid.dy() * grid.dy())],
        }
    }

    fn laplacian(&self, u: &[f64], k: usize) -> f64 {
        let [xm, xp, ym, yp] = self.nb[k];
        self.inv2[0] * (u[xm] + u[xp] - 2.0 * u[k]) + self.inv2[1] * (u[ym] + u[yp] - 2.0 * u[k])
    }

    /// Centred `∇u·∇v` at node `k`.
    fn grad_dot(&self, u: &[f64], v: &[f64], k: usize) -> f64 {
        let [xm, xp, ym, yp] = self.nb[k];
        0.25 * (self.inv2[0] * (u[xp] - u[xm]) * (v[xp] - v[xm]) + self.inv2[1] * (u[yp] - u[ym]) * (v[yp] - v[ym]))
    }

    /// Conservative `∇·(a∇u)` with two-point averaged face coefficients.
    fn flux_div(&self, a: &[f64], u: &[f64], k: usize) -> f64 {
        let [xm, xp, ym, yp] = self.nb[k];
        let face = |nbr: usize| (a[nbr] + a[k]) * (u[nbr] - u[k]);
        0.5 * (self.inv2[0] * (face(xm) + face(xp)) + self.inv2[1] * (face(ym) + face(yp)))
    }
}

fn clamp(values: &mut [f64]) -> usize {
    let mut events = 0;
    for v in values.iter_mut().filter(|v| **v < 0.0) {
        *v = 0.0;
        events += 1;
    }
    events
}

/// `N^{n+1} = N - τγ3(C+H)N`, clamped at zero. Returns the field and the
/// number of clamped nodes.
pub fn step_n(state: &MacroState, cfg: &MacroConfig) -> (GridField<f64>, usize) {
    let sign = if cfg.scheme_literal { 1.0 } else { -1.0 };
    let mut out: Vec<f64> = state
        .n
        .values()
        .iter()
        .zip(state.c.values().iter().zip(state.h.values()))
        .map(|(&n, (&c, &h))| n + sign * cfg.tau * cfg.gamma_3 * (c + h) * n)
        .collect();
    let events = clamp(&mut out);
    (field(state.grid(), out), events)
}

fn field(grid: &Grid<f64>, values: Vec<f64>) -> GridField<f64> {
    GridField::new(*grid, values).unwrap_or_else(|e| panic!("macro update left the grid: {e}"))
}

fn checked(grid: &Grid<f64>, values: Vec<f64>, name: &str, step: usize) -> Result<GridField<f64>, MacroError> {
    GridField::new(*grid, values).map_err(|_| MacroError::InvariantViolated {
        invariant: format!("{name} finite"),
        step,
    })
}

/// Implicit proton-index update
/// `(I - τσ_H Δ - τγ_f f ∇(·)·∇C) H^{n+1} = H + τγ1 H(1-H) + σ_W H dW`.
pub fn step_h(
    state: &MacroState,
    cfg: &MacroConfig,
    rng: &mut RngStream,
) -> Result<(GridField<f64>, SolveReport<f64>, usize), MacroError> {
    let grid = *state.grid();
    let st = Stencil::new(&grid);
    let (h, c) = (state.h.values(), state.c.values());
    let dw = if cfg.sigma_w > 0.0 {
        Some(sample_qwiener_increment(&cfg.qwiener()?, &grid, cfg.tau, rng)?)
    } else {
        None
    };
    let rhs: Vec<f64> = (0..grid.nodes())
        .map(|k| {
            let noise = dw.as_ref().map_or(0.0, |w| cfg.sigma_w * h[k] * w.values()[k]);
            h[k] + cfg.tau * cfg.gamma_1 * h[k] * (1.0 - h[k]) + noise
        })
        .collect();
    let f: Vec<f64> = c.iter().map(|&c| c / (1.0 + c)).collect();
    let (diff, adv) = (cfg.tau * cfg.sigma_h, cfg.tau * cfg.gamma_f);
    let op = FnOperator::new(grid.nodes(), |x: &[f64], y: &mut [f64]| {
        for (k, yk) in y.iter_mut().enumerate() {
            *yk = x[k] - diff * st.laplacian(x, k) - adv * f[k] * st.grad_dot(x, c, k);
        }
    });
    let mut x = h.to_vec();
    let report = solve(&op, &rhs, &mut x, cfg, "H", state.step)?;
    let events = clamp(&mut x);
    Ok((checked(&grid, x, "H", state.step)?, report, events))
}

fn solve<A: crate::linsolve::LinearOperator<f64>>(
    op: &A,
    rhs: &[f64],
    x: &mut [f64],
    cfg: &MacroConfig,
    name: &'static str,
    step: usize,
) -> Result<SolveReport<f64>, MacroError> {
    let report =
        bicgstab(op, rhs, x, cfg.solver_tol, cfg.max_iterations()).map_err(|source| MacroError::SolverDiverged {
            field: name,
            step,
            source,
        })?;
    if !(report.residual <= cfg.solver_tol) {
        return Err(MacroError::SolverDiverged {
            field: name,
            step,
            source: SolveError::NotConverged {
                iterations: report.iterations,
                residual: report.residual,
            },
        });
    }
    Ok(report)
}

/// Implicit cancer-cell update with exponent `p = 2α`, `α` taken from the
/// mean of `h_next`:
/// `(I - τσ_C A_p) C^{n+1} = C + τγ2 C(1-C) + τ∇·(g∇N) - τ∇·(h∇H)`.
/// Returns the field, the solve report, clamp events and `α`.
pub fn step_c(
    state: &MacroState,
    n_next: &GridField<f64>,
    h_next: &GridField<f64>,
    cfg: &MacroConfig,
) -> Result<(GridField<f64>, SolveReport<f64>, usize, f64), MacroError> {
    let grid = *state.grid();
    let st = Stencil::new(&grid);
    let alpha = cfg.alpha.alpha(h_next.mean());
    let p = 2.0 * alpha;
    let frac = FracLapOperator::new(grid, p).map_err(|e| match e {
        FracError::ExponentOutOfRange(p) => MacroError::ExponentOutOfRange(p),
        e => MacroError::Frac(e),
    })?;

    let (c, n0, h0) = (state.c.values(), state.n.values(), state.h.values());
    let (n1, h1) = (n_next.values(), h_next.values());
    let g: Vec<f64> = (0..grid.nodes())
        .map(|k| cfg.gamma_g * n1[k] * c[k] / (1.0 + (c[k] + n0[k]).powi(2)))
        .collect();
    let hc: Vec<f64> = (0..grid.nodes())
        .map(|k| cfg.gamma_h * h1[k] * c[k] / (1.0 + (c[k] + h0[k]).powi(2)))
        .collect();
    let rhs: Vec<f64> = (0..grid.nodes())
        .map(|k| {
            let taxis = if cfg.scheme_literal {
                st.flux_div(&g, h0, k) + st.flux_div(&hc, n0, k)
            } else {
                st.flux_div(&g, n1, k) - st.flux_div(&hc, h1, k)
            };
            c[k] + cfg.tau * cfg.gamma_2 * c[k] * (1.0 - c[k]) + cfg.tau * taxis
        })
        .collect();

    let diff = cfg.tau * cfg.gamma_c;
    let op = FnOperator::new(grid.nodes(), |x: &[f64], y: &mut [f64]| {
        frac.apply_slice(x, y);
        for (yk, &xk) in y.iter_mut().zip(x) {
            *yk = xk - diff * *yk;
        }
    });
    let mut x = c.to_vec();
    let report = solve(&op, &rhs, &mut x, cfg, "C", state.step)?;
    let events = clamp(&mut x);
    Ok((checked(&grid, x, "C", state.step)?, report, events, alpha))
}

/// One full step `N → H → C`, with invariant checks.
pub fn macro_step(state: &mut MacroState, cfg: &MacroConfig, rng: &mut RngStream) -> Result<StepReport, MacroError> {
    let (n_next, n_events) = step_n(state, cfg);
    if !cfg.scheme_literal && n_next.values().iter().zip(state.n.values()).any(|(a, b)| a > b) {
        return Err(MacroError::InvariantViolated {
            invariant: "N nonincreasing".into(),
            step: state.step,
        });
    }
    let (h_next, h_solve, h_events) = step_h(state, cfg, rng)?;
    let (c_next, c_solve, c_events, alpha) = step_c(state, &n_next, &h_next, cfg)?;
    let (a1, a2) = (cfg.alpha.a1, cfg.alpha.a2);
    if !(a1..=a2).contains(&alpha) {
        return Err(MacroError::InvariantViolated {
            invariant: format!("alpha {alpha} inside [{a1}, {a2}]"),
            step: state.step,
        });
    }
    state.n = n_next;
    state.h = h_next;
    state.c = c_next;
    state.alpha = alpha;
    state.step += 1;
    state.t = state.step as f64 * cfg.tau;
    Ok(StepReport {
        step: state.step,
        alpha,
        h_solve,
        c_solve,
        clamp_events: n_events + h_events + c_events,
    })
}

/// Snapshots and per-step diagnostics of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct MacroRun {
    pub snapshots: Vec<MacroState>,
    pub reports: Vec<StepReport>,
    pub final_state: MacroState,
}

impl MacroRun {
    pub fn clamp_events(&self) -> usize {
        self.reports.iter().map(|r| r.clamp_events).sum()
    }
}

pub fn run_macro(cfg: &MacroConfig, rng: &mut RngStream) -> Result<MacroRun, MacroError> {
    run_macro_from(init_macro(cfg)?, cfg, rng)
}

/// Runs `cfg.steps` steps starting from `state`; snapshot steps are
/// counted from `state.step`.
pub fn run_macro_from(mut state: MacroState, cfg: &MacroConfig, rng: &mut RngStream) -> Result<MacroRun, MacroError> {
    cfg.validate()?;
    let start = state.step;
    let mut snapshots = Vec::new();
    let mut reports = Vec::with_capacity(cfg.steps);
    if cfg.snapshots.contains(&0) {
        snapshots.push(state.clone());
    }
    for k in 1..=cfg.steps {
        reports.push(macro_step(&mut state, cfg, rng)?);
        debug_assert_eq!(state.step, start + k);
        if cfg.snapshots.contains(&k) {
            snapshots.push(state.clone());
        }
    }
    Ok(MacroRun {
        snapshots,
        reports,
        final_state: state,
    })
}

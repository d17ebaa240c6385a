//! Monte Carlo ensembles over the micro and macro models.
//!
//! Sample `k` runs on `RngStream::new(base_seed, k)`. Samples are computed in
//! parallel chunks but always folded into the accumulators in sample order,
//! so the statistics do not depend on the worker count.

use rayon::prelude::*;
use thiserror::Error;

use crate::drivers::RngStream;
use crate::frac::{Grid, GridField};
use crate::macro_sim::{run_macro, MacroConfig, MacroError, MacroState};
use crate::micro_sim::{run_micro, survival_fraction, MicroConfig, MicroError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EnsembleError {
    #[error("invalid ensemble configuration: {0}")]
    ConfigInvalid(String),
    #[error("sample {sample} (seed {seed}, stream {sample}) failed: {source}")]
    Macro {
        sample: u64,
        seed: u64,
        source: MacroError,
    },
    #[error("sample {sample} (seed {seed}, stream {sample}) failed: {source}")]
    Micro {
        sample: u64,
        seed: u64,
        source: MicroError,
    },
}

/// Running `(count, mean, M2)` of a scalar.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Moments {
    pub count: u64,
    pub mean: f64,
    pub m2: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let d = x - self.mean;
        self.mean += d / self.count as f64;
        self.m2 += d * (x - self.mean);
    }

    /// Chan et al. pairwise combination.
    pub fn merge(self, other: Self) -> Self {
        if other.count == 0 {
            return self;
        }
        if self.count == 0 {
            return other;
        }
        let n = self.count + other.count;
        let d = other.mean - self.mean;
        let w = other.count as f64 / n as f64;
        Self {
            count: n,
            mean: self.mean + d * w,
            m2: self.m2 + other.m2 + d * d * self.count as f64 * w,
        }
    }

    /// Unbiased sample variance, 0 for fewer than two samples.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            self.m2 / (self.count - 1) as f64
        }
    }

    pub fn std_error(&self) -> f64 {
        if self.count == 0 {
            0.0
        } else {
            (self.variance() / self.count as f64).sqrt()
        }
    }
}

/// Left fold of [`Moments::merge`] over `(count, mean, M2)` triples.
pub fn welford_merge(partials: &[(u64, f64, f64)]) -> (u64, f64, f64) {
    let m = partials
        .iter()
        .map(|&(count, mean, m2)| Moments { count, mean, m2 })
        .fold(Moments::default(), Moments::merge);
    (m.count, m.mean, m.m2)
}

/// Pointwise Welford accumulator for grid fields.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldMoments {
    grid: Grid<f64>,
    count: u64,
    mean: Vec<f64>,
    m2: Vec<f64>,
}

impl FieldMoments {
    pub fn new(grid: Grid<f64>) -> Self {
        Self {
            grid,
            count: 0,
            mean: vec![0.0; grid.nodes()],
            m2: vec![0.0; grid.nodes()],
        }
    }

    pub fn push(&mut self, f: &GridField<f64>) {
        self.count += 1;
        let n = self.count as f64;
        for ((m, s), &x) in self.mean.iter_mut().zip(&mut self.m2).zip(f.values()) {
            let d = x - *m;
            *m += d / n;
            *s += d * (x - *m);
        }
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> GridField<f64> {
        GridField::new(self.grid, self.mean.clone()).expect("means of finite fields are finite")
    }

    /// Unbiased pointwise variance, zero for fewer than two samples.
    pub fn variance(&self) -> GridField<f64> {
        let denom = self.count.saturating_sub(1).max(1) as f64;
        let v = if self.count < 2 {
            vec![0.0; self.m2.len()]
        } else {
            self.m2.iter().map(|&s| (s / denom).max(0.0)).collect()
        };
        GridField::new(self.grid, v).expect("variances of finite fields are finite")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleConfig {
    pub samples: u64,
    pub base_seed: u64,
    /// Worker threads; 0 uses every available core.
    pub workers: usize,
    /// Sample ids whose full output is kept.
    pub export: Vec<u64>,
}

impl Default for EnsembleConfig {
    fn default() -> Self {
        Self {
            samples: 500,
            base_seed: 0,
            workers: 0,
            export: Vec::new(),
        }
    }
}

impl EnsembleConfig {
    pub fn validate(&self) -> Result<(), EnsembleError> {
        if self.samples == 0 {
            return Err(EnsembleError::ConfigInvalid("at least one sample is required".into()));
        }
        if let Some(&k) = self.export.iter().find(|&&k| k >= self.samples) {
            return Err(EnsembleError::ConfigInvalid(format!(
                "export id {k} outside 0..{}",
                self.samples
            )));
        }
        Ok(())
    }

    fn pool(&self) -> Result<rayon::ThreadPool, EnsembleError> {
        rayon::ThreadPoolBuilder::new()
            .num_threads(self.workers)
            .build()
            .map_err(|e| EnsembleError::ConfigInvalid(e.to_string()))
    }
}

/// Runs `run(id)` for every sample, folding results in id order.
fn fan_out<R: Send, E: Send>(
    ens: &EnsembleConfig,
    run: impl Fn(u64) -> Result<R, E> + Sync,
    mut fold: impl FnMut(u64, R),
) -> Result<(), EnsembleError>
where
    E: Into<EnsembleError>,
{
    ens.validate()?;
    let pool = ens.pool()?;
    let chunk = (pool.current_num_threads() as u64 * 4).max(1);
    let mut start = 0;
    while start < ens.samples {
        let end = (start + chunk).min(ens.samples);
        let results: Vec<Result<R, E>> = pool.install(|| (start..end).into_par_iter().map(&run).collect());
        for (id, r) in (start..end).zip(results) {
            fold(id, r.map_err(Into::into)?);
        }
        start = end;
    }
    Ok(())
}

/// Mean and variance fields of `H`, `C`, `N` at each snapshot step.
#[derive(Debug, Clone, PartialEq)]
pub struct MacroStats {
    pub snapshot_steps: Vec<usize>,
    pub h: Vec<FieldMoments>,
    pub c: Vec<FieldMoments>,
    pub n: Vec<FieldMoments>,
    pub alpha: Moments,
    pub clamp_events: usize,
    /// Largest solver residual over every step of every sample.
    pub max_residual: f64,
    pub exported: Vec<(u64, Vec<MacroState>)>,
}

struct Failed<E>(u64, u64, E);

impl From<Failed<MacroError>> for EnsembleError {
    fn from(Failed(sample, seed, source): Failed<MacroError>) -> Self {
        EnsembleError::Macro { sample, seed, source }
    }
}

impl From<Failed<MicroError>> for EnsembleError {
    fn from(Failed(sample, seed, source): Failed<MicroError>) -> Self {
        EnsembleError::Micro { sample, seed, source }
    }
}

pub fn run_macro_ensemble(cfg: &MacroConfig, ens: &EnsembleConfig) -> Result<MacroStats, EnsembleError> {
    let grid = cfg.grid().map_err(|e| EnsembleError::ConfigInvalid(e.to_string()))?;
    let mut steps = cfg.snapshots.clone();
    steps.sort_unstable();
    steps.dedup();
    let cfg = MacroConfig {
        snapshots: steps.clone(),
        ..cfg.clone()
    };
    let fresh = || vec![FieldMoments::new(grid); steps.len()];
    let mut stats = MacroStats {
        snapshot_steps: steps.clone(),
        h: fresh(),
        c: fresh(),
        n: fresh(),
        alpha: Moments::default(),
        clamp_events: 0,
        max_residual: 0.0,
        exported: Vec::new(),
    };
    let seed = ens.base_seed;
    fan_out(
        ens,
        |id| run_macro(&cfg, &mut RngStream::new(seed, id)).map_err(|e| Failed(id, seed, e)),
        |id, run| {
            for (k, s) in run.snapshots.iter().enumerate() {
                stats.h[k].push(&s.h);
                stats.c[k].push(&s.c);
                stats.n[k].push(&s.n);
            }
            stats.alpha.push(run.final_state.alpha);
            stats.clamp_events += run.clamp_events();
            for r in &run.reports {
                stats.max_residual = stats.max_residual.max(r.h_solve.residual).max(r.c_solve.residual);
            }
            if ens.export.contains(&id) {
                stats.exported.push((id, run.snapshots));
            }
        },
    )?;
    Ok(stats)
}

/// Survival fractions per sample and the mean alive curve.
#[derive(Debug, Clone, PartialEq)]
pub struct MicroStats {
    pub survival: Vec<f64>,
    pub moments: Moments,
    /// Mean alive fraction after each step.
    pub alive_curve: Vec<Moments>,
    pub clamp_events: usize,
    pub exported: Vec<(u64, Vec<usize>)>,
}

pub fn run_micro_ensemble(cfg: &MicroConfig, ens: &EnsembleConfig) -> Result<MicroStats, EnsembleError> {
    let mut stats = MicroStats {
        survival: Vec::with_capacity(ens.samples as usize),
        moments: Moments::default(),
        alive_curve: vec![Moments::default(); cfg.steps + 1],
        clamp_events: 0,
        exported: Vec::new(),
    };
    let seed = ens.base_seed;
    let m0 = cfg.particles;
    fan_out(
        ens,
        |id| run_micro(cfg, &mut RngStream::new(seed, id)).map_err(|e| Failed(id, seed, e)),
        |id, run| {
            let s = survival_fraction(&run.state, m0);
            stats.survival.push(s);
            stats.moments.push(s);
            for (m, &a) in stats.alive_curve.iter_mut().zip(&run.alive) {
                m.push(a as f64 / m0 as f64);
            }
            stats.clamp_events += run.state.clamp_events;
            if ens.export.contains(&id) {
                stats.exported.push((id, run.alive));
            }
        },
    )?;
    Ok(stats)
}

#[derive(Debug, Clone, PartialEq)]
pub enum EnsembleKind {
    Micro(MicroConfig),
    Macro(MacroConfig),
}

#[derive(Debug, Clone, PartialEq)]
pub enum EnsembleStats {
    Micro(MicroStats),
    Macro(MacroStats),
}

pub fn run_ensemble(kind: &EnsembleKind, ens: &EnsembleConfig) -> Result<EnsembleStats, EnsembleError> {
    match kind {
        EnsembleKind::Micro(cfg) => run_micro_ensemble(cfg, ens).map(EnsembleStats::Micro),
        EnsembleKind::Macro(cfg) => run_macro_ensemble(cfg, ens).map(EnsembleStats::Macro),
    }
}

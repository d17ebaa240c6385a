//! TOML run configuration. Keys of the `[macro]` section and the particle
//! counts of `[micro]` use the names of the simulation tables verbatim.

use std::path::Path;

use levyflow_core::drivers::{AlphaOfH, NoiseModel};
use levyflow_core::ensemble::EnsembleConfig;
use levyflow_core::levy::{compose_symbols, generator_symbol_table, BernsteinSpec, SymbolSpec};
use levyflow_core::macro_sim::{MacroConfig, MacroInit};
use levyflow_core::micro_sim::MicroConfig;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Config {
    pub seed: u64,
    /// 0 uses every core.
    pub workers: usize,
    pub symbol: SymbolSection,
    pub fracheck: FracheckSection,
    pub micro: MicroSection,
    #[serde(rename = "macro")]
    pub macro_model: MacroSection,
    pub ensemble: EnsembleSection,
    pub report: ReportSection,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            seed: 0,
            workers: 0,
            symbol: SymbolSection::default(),
            fracheck: FracheckSection::default(),
            micro: MicroSection::default(),
            macro_model: MacroSection::default(),
            ensemble: EnsembleSection::default(),
            report: ReportSection::default(),
        }
    }
}

impl Config {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text =
            std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Fully resolved configuration as TOML.
    pub fn echo(&self) -> String {
        toml::to_string(self).expect("configuration serialises")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SymbolSection {
    /// `quadratic`, `alpha_stable`, `poisson`, `subordinated`, or a name from
    /// the generator table (`bm_drift`, `compound_poisson`, `full_triple`).
    pub name: String,
    pub p: f64,
    pub scale: f64,
    pub lambda: f64,
    /// Bernstein exponent of `subordinated`.
    pub alpha: f64,
    pub radius: f64,
    /// Points per half-axis.
    pub points: usize,
}

impl Default for SymbolSection {
    fn default() -> Self {
        Self {
            name: "alpha_stable".into(),
            p: 1.5,
            scale: 1.0,
            lambda: 1.0,
            alpha: 0.5,
            radius: 10.0,
            points: 200,
        }
    }
}

impl SymbolSection {
    pub fn spec(&self) -> Result<SymbolSpec<f64>, CliError> {
        let bad = |e: levyflow_core::levy::LevyError| CliError::Config(format!("symbol {}: {e}", self.name));
        match self.name.as_str() {
            "quadratic" => SymbolSpec::identity_quadratic(1).map_err(bad),
            "alpha_stable" => SymbolSpec::stable(1, self.p, self.scale).map_err(bad),
            "poisson" => SymbolSpec::poisson(1, self.lambda).map_err(bad),
            "subordinated" => compose_symbols(
                BernsteinSpec::Power { alpha: self.alpha },
                SymbolSpec::identity_quadratic(1).map_err(bad)?,
            )
            .map_err(bad),
            other => generator_symbol_table()
                .into_iter()
                .find(|(n, _)| *n == other)
                .map(|(_, s)| s)
                .ok_or_else(|| CliError::Config(format!("unknown symbol name `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FracheckSection {
    pub p: Vec<f64>,
    pub length: f64,
    pub resolutions: Vec<usize>,
    pub mode: usize,
}

impl Default for FracheckSection {
    fn default() -> Self {
        Self {
            p: vec![0.5, 1.0, 1.5],
            length: 1.0,
            resolutions: vec![64, 128, 256],
            mode: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MicroSection {
    #[serde(rename = "M")]
    pub m: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub tau: f64,
    pub noise: String,
    pub noise_scale: f64,
    pub taxis_sign: f64,
    pub h1: f64,
    pub h2: f64,
    pub h3: f64,
    #[serde(rename = "k_T")]
    pub k_t: f64,
    #[serde(rename = "k_B")]
    pub k_b: f64,
    pub q0: f64,
    #[serde(rename = "k_V")]
    pub k_v: f64,
    pub gamma: f64,
    pub sigma_dep: f64,
    #[serde(rename = "N_x1")]
    pub nx: usize,
    #[serde(rename = "N_x2")]
    pub ny: usize,
    pub lattice_half_width: f64,
    #[serde(rename = "Hi0")]
    pub hi0: f64,
    #[serde(rename = "He_amplitude")]
    pub he_amplitude: f64,
    #[serde(rename = "He_width")]
    pub he_width: f64,
    pub tissue_seed: u64,
    pub tissue_smoothing: usize,
}

impl Default for MicroSection {
    fn default() -> Self {
        Self::from_core(&MicroConfig::default())
    }
}

impl MicroSection {
    fn from_core(c: &MicroConfig) -> Self {
        Self {
            m: c.particles,
            n: c.steps,
            tau: c.tau,
            noise: c.noise.name().into(),
            noise_scale: c.noise_scale,
            taxis_sign: c.taxis_sign,
            h1: c.h1,
            h2: c.h2,
            h3: c.h3,
            k_t: c.k_t,
            k_b: c.k_b,
            q0: c.q0,
            k_v: c.k_v,
            gamma: c.gamma,
            sigma_dep: c.sigma_dep,
            nx: c.mx,
            ny: c.my,
            lattice_half_width: c.lattice_half_width,
            hi0: c.hi0,
            he_amplitude: c.he_amplitude,
            he_width: c.he_width,
            tissue_seed: c.tissue_seed,
            tissue_smoothing: c.tissue_smoothing,
        }
    }

    pub fn to_core(&self) -> Result<MicroConfig, CliError> {
        let noise = NoiseModel::from_name(&self.noise)
            .ok_or_else(|| CliError::Config(format!("unknown noise law `{}`", self.noise)))?;
        let cfg = MicroConfig {
            particles: self.m,
            steps: self.n,
            tau: self.tau,
            noise,
            noise_scale: self.noise_scale,
            taxis_sign: self.taxis_sign,
            h1: self.h1,
            h2: self.h2,
            h3: self.h3,
            k_t: self.k_t,
            k_b: self.k_b,
            q0: self.q0,
            k_v: self.k_v,
            gamma: self.gamma,
            sigma_dep: self.sigma_dep,
            mx: self.nx,
            my: self.ny,
            lattice_half_width: self.lattice_half_width,
            hi0: self.hi0,
            he_amplitude: self.he_amplitude,
            he_width: self.he_width,
            tissue_seed: self.tissue_seed,
            tissue_smoothing: self.tissue_smoothing,
        };
        cfg.validate().map_err(|e| CliError::Config(e.to_string()))?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MacroSection {
    #[serde(rename = "N")]
    pub n: usize,
    pub tau: f64,
    pub h_x1: f64,
    pub h_x2: f64,
    #[serde(rename = "N_x1")]
    pub n_x1: usize,
    #[serde(rename = "N_x2")]
    pub n_x2: usize,
    pub gamma_1: f64,
    pub gamma_2: f64,
    pub gamma_3: f64,
    #[serde(rename = "sigma_W")]
    pub sigma_w: f64,
    #[serde(rename = "sigma_H")]
    pub sigma_h: f64,
    #[serde(rename = "gamma_C")]
    pub gamma_c: f64,
    pub gamma_g: f64,
    pub gamma_h: f64,
    pub gamma_f: f64,
    pub a: f64,
    pub a1: f64,
    pub a2: f64,
    /// Q-Wiener modes per axis.
    #[serde(rename = "K")]
    pub k: usize,
    pub solver_tol: f64,
    /// 0 means `10 · nodes`.
    pub max_iter: usize,
    pub scheme_literal: bool,
    pub snapshots: Vec<usize>,
    pub init: InitSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InitSection {
    pub h_amplitude: f64,
    pub h_width: f64,
    pub c_amplitude: f64,
    pub c_width: f64,
    pub n_seed: u64,
    pub n_smoothing: usize,
}

impl Default for InitSection {
    fn default() -> Self {
        let i = MacroInit::default();
        Self {
            h_amplitude: i.h_amplitude,
            h_width: i.h_width,
            c_amplitude: i.c_amplitude,
            c_width: i.c_width,
            n_seed: i.n_seed,
            n_smoothing: i.n_smoothing,
        }
    }
}

impl Default for MacroSection {
    fn default() -> Self {
        let c = MacroConfig::default();
        Self {
            n: c.steps,
            tau: c.tau,
            h_x1: c.hx,
            h_x2: c.hy,
            n_x1: c.nx,
            n_x2: c.ny,
            gamma_1: c.gamma_1,
            gamma_2: c.gamma_2,
            gamma_3: c.gamma_3,
            sigma_w: c.sigma_w,
            sigma_h: c.sigma_h,
            gamma_c: c.gamma_c,
            gamma_g: c.gamma_g,
            gamma_h: c.gamma_h,
            gamma_f: c.gamma_f,
            a: c.alpha.a,
            a1: c.alpha.a1,
            a2: c.alpha.a2,
            k: c.modes,
            solver_tol: c.solver_tol,
            max_iter: c.max_iter.unwrap_or(0),
            scheme_literal: c.scheme_literal,
            snapshots: c.snapshots,
            init: InitSection::default(),
        }
    }
}

impl MacroSection {
    pub fn to_core(&self) -> Result<MacroConfig, CliError> {
        let i = &self.init;
        let cfg = MacroConfig {
            nx: self.n_x1,
            ny: self.n_x2,
            hx: self.h_x1,
            hy: self.h_x2,
            tau: self.tau,
            steps: self.n,
            gamma_1: self.gamma_1,
            gamma_2: self.gamma_2,
            gamma_3: self.gamma_3,
            sigma_w: self.sigma_w,
            sigma_h: self.sigma_h,
            gamma_c: self.gamma_c,
            gamma_g: self.gamma_g,
            gamma_h: self.gamma_h,
            gamma_f: self.gamma_f,
            alpha: AlphaOfH {
                a: self.a,
                a1: self.a1,
                a2: self.a2,
            },
            modes: self.k,
            solver_tol: self.solver_tol,
            max_iter: (self.max_iter > 0).then_some(self.max_iter),
            scheme_literal: self.scheme_literal,
            snapshots: self.snapshots.clone(),
            init: MacroInit {
                h_amplitude: i.h_amplitude,
                h_width: i.h_width,
                c_amplitude: i.c_amplitude,
                c_width: i.c_width,
                n_seed: i.n_seed,
                n_smoothing: i.n_smoothing,
            },
        };
        cfg.validate().map_err(|e| CliError::Config(e.to_string()))?;
        Ok(cfg)
    }

    /// Caps the run at `steps`: later snapshots are dropped and the final
    /// step is always kept.
    pub fn truncate(&mut self, steps: usize) {
        self.n = steps;
        self.snapshots.retain(|&s| s <= steps);
        if !self.snapshots.contains(&steps) {
            self.snapshots.push(steps);
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EnsembleKindName {
    Macro,
    Micro,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EnsembleSection {
    pub kind: EnsembleKindName,
    /// Number of Monte Carlo samples.
    #[serde(rename = "M")]
    pub m: u64,
    pub export: Vec<u64>,
}

impl Default for EnsembleSection {
    fn default() -> Self {
        Self {
            kind: EnsembleKindName::Macro,
            m: 500,
            export: vec![0],
        }
    }
}

impl EnsembleSection {
    pub fn to_core(&self, seed: u64, workers: usize) -> EnsembleConfig {
        EnsembleConfig {
            samples: self.m,
            base_seed: seed,
            workers,
            export: self.export.iter().copied().filter(|&k| k < self.m).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ReportSection {
    /// Directory of `.lvf` snapshots; empty means `<out>/macro`.
    pub input: String,
    pub levels: Vec<f64>,
    /// Levels are fractions of each field's `[min, max]` when true.
    pub relative: bool,
}

impl Default for ReportSection {
    fn default() -> Self {
        Self {
            input: String::new(),
            levels: vec![0.25, 0.5, 0.75],
            relative: true,
        }
    }
}

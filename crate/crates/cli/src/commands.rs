use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use levyflow_core::drivers::RngStream;
use levyflow_core::ensemble::{run_macro_ensemble, run_micro_ensemble};
use levyflow_core::frac::{second_difference_laplacian, spectral_oracle, FracLapOperator, Grid, GridField};
use levyflow_core::levy::{eval_symbol, growth_bound_constant, linear_probe_grid};
use levyflow_core::macro_sim::run_macro;
use levyflow_core::micro_sim::{deposit_fields, run_micro, survival_fraction};
use rand::Rng;

use crate::config::{Config, EnsembleKindName};
use crate::output::{contour_segments, decode_lvf, encode_pgm, unix_now, Cell, Csv, OutDir, RunManifest};
use crate::CliError;

fn manifest(cfg: &Config, command: &str, started: f64) -> RunManifest {
    RunManifest {
        tool: "levyflow".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        command: command.into(),
        base_seed: cfg.seed,
        config: cfg.echo(),
        started_unix: started,
        finished_unix: started,
        outputs: Vec::new(),
    }
}

fn field_mass(f: &GridField<f64>) -> f64 {
    f.sum() * f.grid().cell_measure()
}

/// `ξ, Re ψ, Im ψ, |ψ| / (1 + |ξ|²)` along the real line.
pub fn cmd_symbol(cfg: &Config, out: &Path) -> Result<RunManifest, CliError> {
    let started = unix_now();
    let s = &cfg.symbol;
    let spec = s.spec()?;
    if spec.dim() != 1 {
        return Err(CliError::Config(format!("symbol {} is not one-dimensional", s.name)));
    }
    if !(s.radius > 0.0) || s.points == 0 {
        return Err(CliError::Config("symbol grid needs a positive radius and points".into()));
    }
    let grid = linear_probe_grid(1, s.radius, s.points);
    let constant = growth_bound_constant(&spec, &grid).map_err(|e| CliError::Eval(e.to_string()))?;
    let mut csv = Csv::new(&["xi", "re_psi", "im_psi", "ratio"]);
    for xi in &grid {
        let v = eval_symbol(&spec, xi).map_err(|e| CliError::Eval(e.to_string()))?;
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(CliError::Eval(format!("non-finite symbol value at {}", xi[0])));
        }
        let ratio = v.norm() / (1.0 + xi[0] * xi[0]);
        csv.row(&[Cell::Float(xi[0]), Cell::Float(v.re), Cell::Float(v.im), Cell::Float(ratio)]);
    }
    let mut dir = OutDir::create(out.join("symbol"))?;
    dir.write("symbol.csv", &csv.into_bytes())?;
    println!("symbol {}: growth constant {constant:.6e} on |xi| <= {}", s.name, s.radius);
    dir.finish(manifest(cfg, "symbol", started))
}

fn band_limited_field(grid: Grid<f64>, seed: u64) -> GridField<f64> {
    let mut rng = RngStream::new(seed, 0);
    let mut terms = Vec::new();
    for kx in 0..=3i32 {
        for ky in -3..=3i32 {
            if kx == 0 && ky <= 0 {
                continue;
            }
            terms.push((kx as f64, ky as f64, rng.random::<f64>() - 0.5, 2.0 * PI * rng.random::<f64>()));
        }
    }
    let (lx, ly) = (grid.lx(), grid.ly());
    GridField::from_fn(grid, |x, y| {
        terms
            .iter()
            .map(|&(a, b, c, ph)| c * (2.0 * PI * (a * x / lx + b * y / ly) + ph).cos())
            .sum()
    })
}

/// Relative max-norm error of the discrete operator on the mode
/// `cos(2π k x / L)` against the spectral oracle.
pub fn mode_error(length: f64, m: usize, p: f64, k: usize) -> Result<f64, CliError> {
    let fe = |e: levyflow_core::frac::FracError| CliError::Config(e.to_string());
    let grid = Grid::new_1d(length, m).map_err(fe)?;
    let f = GridField::from_fn(grid, |x, _| (2.0 * PI * k as f64 * x / length).cos());
    let a = FracLapOperator::new(grid, p).map_err(fe)?.apply(&f).map_err(fe)?;
    let b = spectral_oracle(&grid, p, &f).map_err(fe)?;
    Ok(a.lincomb(1.0, &b, -1.0).map_err(fe)?.max_abs() / b.max_abs())
}

/// Relative difference between the operator at `p = 1.999` and the
/// 5-point Laplacian on a seeded band-limited field.
pub fn near_two_difference(seed: u64) -> Result<f64, CliError> {
    let fe = |e: levyflow_core::frac::FracError| CliError::Config(e.to_string());
    let grid = Grid::new_2d(1.0, 1.0, 32, 32).map_err(fe)?;
    let f = band_limited_field(grid, seed);
    let a = FracLapOperator::new(grid, 1.999).map_err(fe)?.apply(&f).map_err(fe)?;
    let b = second_difference_laplacian(&f);
    Ok(a.lincomb(1.0, &b, -1.0).map_err(fe)?.max_abs() / b.max_abs())
}

pub fn cmd_fracheck(cfg: &Config, out: &Path) -> Result<RunManifest, CliError> {
    let started = unix_now();
    let fc = &cfg.fracheck;
    if fc.resolutions.len() < 2 || fc.p.is_empty() || fc.mode == 0 {
        return Err(CliError::Config("fracheck needs exponents, two resolutions and a mode >= 1".into()));
    }
    let mut table = Csv::new(&["p", "resolution", "mode", "rel_error"]);
    let mut failures = Vec::new();
    for &p in &fc.p {
        let mut last = f64::INFINITY;
        for &m in &fc.resolutions {
            if 2 * fc.mode >= m {
                return Err(CliError::Config(format!("mode {} not resolved on {m} nodes", fc.mode)));
            }
            let e = mode_error(fc.length, m, p, fc.mode)?;
            table.row(&[Cell::Float(p), Cell::Int(m as u64), Cell::Int(fc.mode as u64), Cell::Float(e)]);
            if !(e < last) {
                failures.push(format!("p = {p}: error {e:.3e} at {m} nodes does not decrease"));
            }
            last = e;
        }
    }

    let mut checks = Csv::new(&["check", "value", "tolerance", "pass"]);
    let grid = Grid::new_1d(fc.length, fc.resolutions[0]).map_err(|e| CliError::Config(e.to_string()))?;
    let zero = FracLapOperator::new(grid, fc.p[0])
        .and_then(|op| op.apply(&GridField::zeros(grid)))
        .map_err(|e| CliError::Config(e.to_string()))?
        .max_abs();
    let near_two = near_two_difference(cfg.seed)?;
    for (name, v, tol) in [("zero_field", zero, 0.0), ("near_two_vs_three_point", near_two, 0.02)] {
        let pass = v <= tol;
        if !pass {
            failures.push(format!("{name}: {v:.3e} above {tol}"));
        }
        checks.row(&[Cell::Text(name), Cell::Float(v), Cell::Float(tol), Cell::Text(if pass { "true" } else { "false" })]);
    }

    let mut dir = OutDir::create(out.join("fracheck"))?;
    dir.write("fracheck.csv", &table.into_bytes())?;
    dir.write("checks.csv", &checks.into_bytes())?;
    let m = dir.finish(manifest(cfg, "fracheck", started))?;
    if failures.is_empty() {
        println!("fracheck: errors decrease for every exponent");
        Ok(m)
    } else {
        Err(CliError::Convergence(failures.join("; ")))
    }
}

pub fn cmd_micro(cfg: &Config, out: &Path) -> Result<RunManifest, CliError> {
    let started = unix_now();
    let mc = cfg.micro.to_core()?;
    let run = run_micro(&mc, &mut RngStream::new(cfg.seed, 0))?;
    let mut csv = Csv::new(&["step", "t", "alive", "survival"]);
    for (k, &a) in run.alive.iter().enumerate() {
        csv.row(&[
            Cell::Int(k as u64),
            Cell::Float(k as f64 * mc.tau),
            Cell::Int(a as u64),
            Cell::Float(a as f64 / mc.particles as f64),
        ]);
    }
    let mut dir = OutDir::create(out.join("micro"))?;
    dir.write("survival.csv", &csv.into_bytes())?;
    dir.write_field("He", &run.state.he)?;
    dir.write_field("N", &run.state.ntissue)?;
    let (he, n) = deposit_fields(&run.state, &mc);
    dir.write_field("He_smoothed", &he)?;
    dir.write_field("N_smoothed", &n)?;
    println!(
        "micro ({}): survival {:.4} after {} steps, {} clamp events",
        mc.noise.name(),
        survival_fraction(&run.state, mc.particles),
        mc.steps,
        run.state.clamp_events
    );
    dir.finish(manifest(cfg, "micro", started))
}

pub fn cmd_macro(cfg: &Config, out: &Path) -> Result<RunManifest, CliError> {
    let started = unix_now();
    let mc = cfg.macro_model.to_core()?;
    let run = run_macro(&mc, &mut RngStream::new(cfg.seed, 0))?;
    let mut dir = OutDir::create(out.join("macro"))?;
    let mut snaps = Csv::new(&["step", "t", "alpha", "mass_H", "mass_C", "mass_N"]);
    for s in &run.snapshots {
        dir.write_field(&format!("H_{:04}", s.step), &s.h)?;
        dir.write_field(&format!("C_{:04}", s.step), &s.c)?;
        dir.write_field(&format!("N_{:04}", s.step), &s.n)?;
        snaps.row(&[
            Cell::Int(s.step as u64),
            Cell::Float(s.t),
            Cell::Float(s.alpha),
            Cell::Float(field_mass(&s.h)),
            Cell::Float(field_mass(&s.c)),
            Cell::Float(field_mass(&s.n)),
        ]);
    }
    let mut series = Csv::new(&[
        "step",
        "alpha",
        "h_iterations",
        "h_residual",
        "c_iterations",
        "c_residual",
        "clamp_events",
    ]);
    for r in &run.reports {
        series.row(&[
            Cell::Int(r.step as u64),
            Cell::Float(r.alpha),
            Cell::Int(r.h_solve.iterations as u64),
            Cell::Float(r.h_solve.residual),
            Cell::Int(r.c_solve.iterations as u64),
            Cell::Float(r.c_solve.residual),
            Cell::Int(r.clamp_events as u64),
        ]);
    }
    dir.write("snapshots.csv", &snaps.into_bytes())?;
    dir.write("timeseries.csv", &series.into_bytes())?;
    println!(
        "macro: {} steps, {} snapshots, {} clamp events",
        mc.steps,
        run.snapshots.len(),
        run.clamp_events()
    );
    dir.finish(manifest(cfg, "macro", started))
}

pub fn cmd_ensemble(cfg: &Config, out: &Path) -> Result<RunManifest, CliError> {
    let started = unix_now();
    let ens = cfg.ensemble.to_core(cfg.seed, cfg.workers);
    let mut dir = OutDir::create(out.join("ensemble"))?;
    match cfg.ensemble.kind {
        EnsembleKindName::Macro => {
            let mc = cfg.macro_model.to_core()?;
            let stats = run_macro_ensemble(&mc, &ens)?;
            let mut summary = Csv::new(&["step", "field", "mean_mass", "max_variance"]);
            for (k, &step) in stats.snapshot_steps.iter().enumerate() {
                for (name, fm) in [("H", &stats.h[k]), ("C", &stats.c[k]), ("N", &stats.n[k])] {
                    let (mean, var) = (fm.mean(), fm.variance());
                    dir.write_field(&format!("{name}_mean_{step:04}"), &mean)?;
                    dir.write_field(&format!("{name}_var_{step:04}"), &var)?;
                    summary.row(&[
                        Cell::Int(step as u64),
                        Cell::Text(name),
                        Cell::Float(field_mass(&mean)),
                        Cell::Float(var.max_abs()),
                    ]);
                }
            }
            for (id, snaps) in &stats.exported {
                for s in snaps {
                    dir.write_field(&format!("sample_{id:04}/H_{:04}", s.step), &s.h)?;
                    dir.write_field(&format!("sample_{id:04}/C_{:04}", s.step), &s.c)?;
                    dir.write_field(&format!("sample_{id:04}/N_{:04}", s.step), &s.n)?;
                }
            }
            let mut alpha = Csv::new(&["samples", "alpha_mean", "alpha_variance", "alpha_std_error", "clamp_events", "max_residual"]);
            alpha.row(&[
                Cell::Int(stats.alpha.count),
                Cell::Float(stats.alpha.mean),
                Cell::Float(stats.alpha.variance()),
                Cell::Float(stats.alpha.std_error()),
                Cell::Int(stats.clamp_events as u64),
                Cell::Float(stats.max_residual),
            ]);
            dir.write("summary.csv", &summary.into_bytes())?;
            dir.write("alpha.csv", &alpha.into_bytes())?;
            println!(
                "ensemble (macro): {} samples, final alpha {:.6} +- {:.2e}, {} clamp events",
                ens.samples,
                stats.alpha.mean,
                stats.alpha.std_error(),
                stats.clamp_events
            );
        }
        EnsembleKindName::Micro => {
            let mc = cfg.micro.to_core()?;
            let stats = run_micro_ensemble(&mc, &ens)?;
            let mut surv = Csv::new(&["sample", "survival"]);
            for (k, &s) in stats.survival.iter().enumerate() {
                surv.row(&[Cell::Int(k as u64), Cell::Float(s)]);
            }
            let mut curve = Csv::new(&["step", "mean", "variance", "std_error"]);
            for (k, m) in stats.alive_curve.iter().enumerate() {
                curve.row(&[Cell::Int(k as u64), Cell::Float(m.mean), Cell::Float(m.variance()), Cell::Float(m.std_error())]);
            }
            let mut summary = Csv::new(&["samples", "noise", "mean", "variance", "std_error", "clamp_events"]);
            summary.row(&[
                Cell::Int(stats.moments.count),
                Cell::Text(mc.noise.name()),
                Cell::Float(stats.moments.mean),
                Cell::Float(stats.moments.variance()),
                Cell::Float(stats.moments.std_error()),
                Cell::Int(stats.clamp_events as u64),
            ]);
            let mut exported = Csv::new(&["sample", "step", "alive"]);
            for (id, alive) in &stats.exported {
                for (k, &a) in alive.iter().enumerate() {
                    exported.row(&[Cell::Int(*id), Cell::Int(k as u64), Cell::Int(a as u64)]);
                }
            }
            dir.write("survival.csv", &surv.into_bytes())?;
            dir.write("alive_curve.csv", &curve.into_bytes())?;
            dir.write("summary.csv", &summary.into_bytes())?;
            dir.write("exported.csv", &exported.into_bytes())?;
            println!(
                "ensemble (micro, {}): mean survival {:.4} +- {:.4}",
                mc.noise.name(),
                stats.moments.mean,
                stats.moments.std_error()
            );
        }
    }
    dir.finish(manifest(cfg, "ensemble", started))
}

pub fn cmd_report(cfg: &Config, out: &Path) -> Result<RunManifest, CliError> {
    let started = unix_now();
    let input = if cfg.report.input.is_empty() {
        out.join("macro")
    } else {
        PathBuf::from(&cfg.report.input)
    };
    let entries = std::fs::read_dir(&input).map_err(|e| CliError::Input(format!("{}: {e}", input.display())))?;
    let mut files: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "lvf"))
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(CliError::Input(format!("no .lvf snapshots in {}", input.display())));
    }

    let mut dir = OutDir::create(out.join("report"))?;
    let mut contours = Csv::new(&["file", "level", "x0", "y0", "x1", "y1"]);
    for path in &files {
        let bytes = std::fs::read(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        let f = decode_lvf(&bytes)?;
        let stem = path.file_stem().unwrap_or_default().to_string_lossy().into_owned();
        dir.write(&format!("{stem}.pgm"), &encode_pgm(&f))?;
        let (lo, hi) = crate::output::value_range(&f);
        for &level in &cfg.report.levels {
            let value = if cfg.report.relative { lo + level * (hi - lo) } else { level };
            for s in contour_segments(&f, value) {
                contours.row(&[
                    Cell::Text(&stem),
                    Cell::Float(value),
                    Cell::Float(s[0]),
                    Cell::Float(s[1]),
                    Cell::Float(s[2]),
                    Cell::Float(s[3]),
                ]);
            }
        }
    }
    dir.write("contours.csv", &contours.into_bytes())?;
    println!("report: {} snapshots rendered", files.len());
    dir.finish(manifest(cfg, "report", started))
}

use levyflow_core::drivers::RngStream;
use levyflow_core::frac::GridField;
use levyflow_core::macro_sim::{init_macro, macro_step, run_macro, run_macro_from, step_c, step_h, MacroConfig, MacroState};

fn homogeneous(cfg: &MacroConfig, h: f64, c: f64, n: f64) -> MacroState {
    let g = cfg.grid().unwrap();
    MacroState {
        h: GridField::constant(g, h),
        c: GridField::constant(g, c),
        n: GridField::constant(g, n),
        t: 0.0,
        step: 0,
        alpha: cfg.alpha.alpha(h),
    }
}

fn spread(f: &GridField<f64>) -> f64 {
    let (lo, hi) = f
        .values()
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    hi - lo
}

#[test]
fn table_run_keeps_every_invariant() {
    let cfg = MacroConfig::default();
    let run = run_macro(&cfg, &mut RngStream::new(2024, 0)).unwrap();
    assert_eq!(run.reports.len(), 150);
    assert_eq!(run.clamp_events(), 0);
    assert_eq!(run.snapshots.len(), 4);
    for r in &run.reports {
        assert!(r.h_solve.residual <= 1e-10 && r.c_solve.residual <= 1e-10);
        assert!((0.6..=0.9).contains(&r.alpha));
    }
    for s in &run.snapshots {
        for f in [&s.h, &s.c, &s.n] {
            assert!(f.is_finite());
            assert!(f.values().iter().all(|&v| v >= 0.0));
        }
    }
    let pairs = run.snapshots.windows(2);
    for w in pairs {
        assert!(w[1].n.values().iter().zip(w[0].n.values()).all(|(a, b)| a <= b));
    }
}

#[test]
fn same_seed_same_run() {
    let cfg = MacroConfig {
        steps: 20,
        snapshots: vec![20],
        ..MacroConfig::default()
    };
    let a = run_macro(&cfg, &mut RngStream::new(5, 3)).unwrap();
    let b = run_macro(&cfg, &mut RngStream::new(5, 3)).unwrap();
    assert_eq!(a, b);
    let c = run_macro(&cfg, &mut RngStream::new(5, 4)).unwrap();
    assert_ne!(a.final_state.h, c.final_state.h);
}

#[test]
fn homogeneous_data_stays_homogeneous() {
    let cfg = MacroConfig {
        sigma_w: 0.0,
        steps: 30,
        snapshots: vec![30],
        ..MacroConfig::default()
    };
    let run = run_macro_from(homogeneous(&cfg, 0.2, 0.4, 0.9), &cfg, &mut RngStream::new(0, 0)).unwrap();
    let s = &run.final_state;
    for f in [&s.h, &s.c, &s.n] {
        assert!(spread(f) <= 1e-10, "spread {}", spread(f));
    }
    // pure ODE values after 30 explicit steps
    let (mut h, mut c, mut n) = (0.2f64, 0.4f64, 0.9f64);
    for _ in 0..30 {
        let n1 = n - 0.1 * 0.015 * (c + h) * n;
        let h1 = h + 0.1 * 0.005 * h * (1.0 - h);
        c += 0.1 * 0.05 * c * (1.0 - c);
        n = n1;
        h = h1;
    }
    assert!((s.h.values()[0] - h).abs() < 1e-10);
    assert!((s.c.values()[0] - c).abs() < 1e-10);
    assert!((s.n.values()[0] - n).abs() < 1e-10);
}

#[test]
fn translation_equivariance_without_noise() {
    let cfg = MacroConfig {
        sigma_w: 0.0,
        steps: 15,
        snapshots: vec![5, 15],
        ..MacroConfig::default()
    };
    let s0 = init_macro(&cfg).unwrap();
    let a = run_macro_from(s0.clone(), &cfg, &mut RngStream::new(0, 0)).unwrap();
    let b = run_macro_from(s0.shifted(1, 0), &cfg, &mut RngStream::new(0, 0)).unwrap();
    let c = run_macro_from(s0.shifted(0, -1), &cfg, &mut RngStream::new(0, 0)).unwrap();
    for ((sa, sb), sc) in a.snapshots.iter().zip(&b.snapshots).zip(&c.snapshots) {
        for (fa, fb, fc) in [(&sa.h, &sb.h, &sc.h), (&sa.c, &sb.c, &sc.c), (&sa.n, &sb.n, &sc.n)] {
            let db = fa.shifted(1, 0).lincomb(1.0, fb, -1.0).unwrap().max_abs();
            let dc = fa.shifted(0, -1).lincomb(1.0, fc, -1.0).unwrap().max_abs();
            assert!(db <= 1e-12 * fa.max_abs().max(1.0), "{db}");
            assert!(dc <= 1e-12 * fa.max_abs().max(1.0), "{dc}");
        }
    }
}

#[test]
fn diffusion_only_conserves_mass() {
    let cfg = MacroConfig::default().diffusion_only();
    let mut s = init_macro(&cfg).unwrap();
    let mut rng = RngStream::new(0, 0);
    for _ in 0..20 {
        let (mh, mc, mn) = (s.h.sum(), s.c.sum(), s.n.clone());
        macro_step(&mut s, &cfg, &mut rng).unwrap();
        assert!((s.h.sum() - mh).abs() <= 1e-8 * mh.abs());
        assert!((s.c.sum() - mc).abs() <= 1e-8 * mc.abs());
        assert_eq!(s.n, mn);
    }
}

#[test]
fn zero_rates_leave_fields_alone() {
    let cfg = MacroConfig {
        sigma_h: 0.0,
        gamma_c: 0.0,
        ..MacroConfig::default().diffusion_only()
    };
    let s = init_macro(&cfg).unwrap();
    let mut rng = RngStream::new(0, 0);
    let (h, _, _) = step_h(&s, &cfg, &mut rng).unwrap();
    let (c, _, _, _) = step_c(&s, &s.n, &h, &cfg).unwrap();
    assert!(h.lincomb(1.0, &s.h, -1.0).unwrap().max_abs() < 1e-14);
    assert!(c.lincomb(1.0, &s.c, -1.0).unwrap().max_abs() < 1e-14);
}

#[test]
fn haptotaxis_moves_cells_away_from_dense_tissue() {
    let cfg = MacroConfig {
        gamma_g: 0.5,
        gamma_c: 0.0,
        ..MacroConfig::default().diffusion_only()
    };
    let g = cfg.grid().unwrap();
    let mut s = homogeneous(&cfg, 0.0, 0.5, 0.0);
    s.n = GridField::from_fn(g, |x, _| 0.5 + 0.4 * (2.0 * std::f64::consts::PI * x / g.lx()).cos());
    let (c, _, _, _) = step_c(&s, &s.n, &s.h, &cfg).unwrap();
    // N peaks at x = 0 and bottoms out at x = L/2
    assert!(c.at(0, 3) < 0.5 && c.at(g.mx() / 2, 3) > 0.5);
    assert!((c.sum() - s.c.sum()).abs() < 1e-10);
}

#[test]
fn literal_scheme_lets_n_grow() {
    let cfg = MacroConfig {
        scheme_literal: true,
        steps: 5,
        snapshots: vec![5],
        ..MacroConfig::default()
    };
    let s0 = init_macro(&cfg).unwrap();
    let run = run_macro(&cfg, &mut RngStream::new(1, 0)).unwrap();
    assert!(run.final_state.n.sum() > s0.n.sum());
}

#[test]
fn bad_alpha_band_rejected() {
    let mut cfg = MacroConfig::default();
    cfg.alpha.a1 = 0.4;
    assert!(init_macro(&cfg).is_err());
    let cfg = MacroConfig {
        modes: 11,
        ..MacroConfig::default()
    };
    assert!(cfg.validate().is_err());
}

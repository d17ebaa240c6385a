#[path = "common/transport_fd.rs"]
mod transport_fd;

use levyflow_core::drivers::{draw_noise, NoiseModel, RngStream};
use levyflow_core::frac::{Grid, GridField};
use levyflow_core::micro_sim::{
    deposit_fields, gaussian_smooth, init_micro, micro_step, run_micro, survival_fraction, velocity_jump_positions,
    MicroConfig, MicroError, VelocityJumpConfig,
};
use proptest::prelude::*;
use rand::Rng;

fn immortal() -> MicroConfig {
    MicroConfig {
        h1: 0.0,
        h2: f64::INFINITY,
        h3: f64::INFINITY,
        ..MicroConfig::default()
    }
}

#[test]
fn euler_trajectory_by_hand() {
    let cfg = MicroConfig {
        particles: 1,
        noise_scale: 0.3,
        gamma: 0.0,
        ..immortal()
    };
    let mut state = init_micro(&cfg).unwrap();
    let grid = *state.grid();
    state.ntissue = GridField::constant(grid, 0.8);
    state.he = GridField::constant(grid, 2.0);
    let mut rng = RngStream::new(3, 1);
    let mut replay = rng.clone();

    let tau = cfg.tau;
    let (mut x, mut v) = ([0.5, 0.5], [0.0, 0.0]);
    let hi0 = cfg.hi0;
    for step in 0..3 {
        micro_step(&mut state, &cfg, &mut rng).unwrap();
        for k in 0..2 {
            v[k] += 0.3 * draw_noise(&NoiseModel::Gaussian, &mut replay, tau).unwrap();
            x[k] = (x[k] + v[k] * tau).rem_euclid(1.0);
        }
        let p = state.particles[0];
        for k in 0..2 {
            assert!((p.x[k] - x[k]).abs() < 1e-14, "step {step} axis {k}");
            assert!((p.v[k] - v[k]).abs() < 1e-14);
        }
        if step == 0 {
            // He = 2 everywhere before the first scatter
            let dhi = -cfg.k_t * hi0 / 3.0 - cfg.k_b * hi0 + cfg.q0 / (1.0 + hi0);
            assert!((p.hi - (hi0 + tau * dhi)).abs() < 1e-15);
        }
    }
}

#[test]
fn same_seed_same_run() {
    let cfg = MicroConfig {
        noise: NoiseModel::switching(),
        particles: 400,
        ..MicroConfig::default()
    };
    let a = run_micro(&cfg, &mut RngStream::new(21, 4)).unwrap();
    let b = run_micro(&cfg, &mut RngStream::new(21, 4)).unwrap();
    assert_eq!(a, b);
    let c = run_micro(&cfg, &mut RngStream::new(21, 5)).unwrap();
    assert_ne!(a.state.particles, c.state.particles);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]
    #[test]
    fn step_invariants(seed in 0u64..1000, law in 0usize..3) {
        let noise = [NoiseModel::Gaussian, NoiseModel::switching(), NoiseModel::cauchy_modulated()][law].clone();
        let cfg = MicroConfig { noise, particles: 225, ..MicroConfig::default() };
        let mut state = init_micro(&cfg).unwrap();
        let mut rng = RngStream::new(seed, 0);
        for _ in 0..cfg.steps {
            let (alive, n_before) = (state.alive(), state.ntissue.clone());
            micro_step(&mut state, &cfg, &mut rng).unwrap();
            prop_assert!(state.alive() <= alive);
            for (a, b) in state.ntissue.values().iter().zip(n_before.values()) {
                prop_assert!(*a <= *b && *a >= 0.0);
            }
            prop_assert!(state.he.values().iter().all(|&v| v >= 0.0));
            for p in &state.particles {
                prop_assert!(p.hi >= 0.0);
                prop_assert!((0.0..1.0).contains(&p.x[0]) && (0.0..1.0).contains(&p.x[1]));
            }
        }
    }
}

#[test]
fn deposition_examples() {
    let grid = Grid::new_2d(1.0, 1.0, 64, 64).unwrap();
    let flat = GridField::constant(grid, 1.7);
    assert!(gaussian_smooth(&flat, 0.05).lincomb(1.0, &flat, -1.0).unwrap().max_abs() < 1e-12);

    let f = GridField::from_fn(grid, |x, y| (6.0 * x).sin() * y);
    assert_eq!(gaussian_smooth(&f, 0.0), f);

    // unit mass at node (20, 30)
    let mut point = GridField::zeros(grid);
    point.values_mut()[grid.index(20, 30)] = 1.0;
    let s = 0.05;
    let bump = gaussian_smooth(&point, s);
    assert!((bump.sum() - 1.0).abs() < 1e-8);
    let (dx, dy) = (grid.dx(), grid.dy());
    for (i, j) in [(20, 30), (22, 30), (25, 27), (14, 35)] {
        let (a, b) = ((i as f64 - 20.0) * dx, (j as f64 - 30.0) * dy);
        let exact = (-(a * a + b * b) / (2.0 * s * s)).exp() * dx * dy / (2.0 * std::f64::consts::PI * s * s);
        assert!((bump.at(i, j) / exact - 1.0).abs() < 1e-3, "({i},{j})");
    }

    let mut state = init_micro(&MicroConfig::default()).unwrap();
    state.he = point.clone();
    let (he, n) = deposit_fields(&state, &MicroConfig::default());
    assert!((he.sum() - 1.0).abs() < 1e-8);
    assert!((n.sum() / state.ntissue.sum() - 1.0).abs() < 1e-8);
}

#[test]
fn histogram_examples() {
    let cfg = MicroConfig {
        particles: 16,
        ..MicroConfig::default()
    };
    let mut state = init_micro(&cfg).unwrap();
    let grid = Grid::new_2d(1.0, 1.0, 8, 8).unwrap();
    for p in &mut state.particles {
        p.x = [0.3, 0.8];
    }
    let h = state.density_histogram(&grid).unwrap();
    let k = grid.index(2, 6);
    assert_eq!(h.values()[k], 1.0);
    assert_eq!(h.sum(), 1.0);

    let m = 100_000;
    let mut rng = RngStream::new(12, 0);
    let state_u = {
        let mut s = init_micro(&MicroConfig { particles: m, ..cfg.clone() }).unwrap();
        for p in &mut s.particles {
            p.x = [rng.random(), rng.random()];
        }
        s
    };
    let grid = Grid::new_2d(1.0, 1.0, 10, 10).unwrap();
    let h = state_u.density_histogram(&grid).unwrap();
    let per_bin = m as f64 / 100.0;
    for &v in h.values() {
        assert!((v * 100.0 - 1.0).abs() <= 3.0 / per_bin.sqrt(), "{v}");
    }

    for p in &mut state.particles {
        p.alive = false;
    }
    assert_eq!(state.density_histogram(&grid), Err(MicroError::NoAliveParticles));
    assert_eq!(survival_fraction(&state, 16), 0.0);
}

#[test]
fn velocity_jump_matches_transport_equation() {
    let cfg = VelocityJumpConfig::default();
    let xs = velocity_jump_positions(&cfg, &mut RngStream::new(2024, 0)).unwrap();
    let fd = transport_fd::solve(
        &cfg.velocities,
        cfg.rate,
        cfg.x0,
        cfg.length,
        cfg.t_end,
        &transport_fd::TransportGrid { cells: 1000, dt: 0.002 },
    );
    assert!((fd.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    let d = transport_fd::l1(&transport_fd::histogram(&xs, cfg.length, 50), &transport_fd::rebin(&fd, 50));
    eprintln!("transport L1 {d:.4}");
    assert!(d <= 0.1, "L1 {d}");
}

#[test]
fn transport_without_jumps_is_a_shift() {
    let fd = transport_fd::solve(
        &[0.5],
        3.0,
        (0.1, 0.2),
        1.0,
        0.2,
        &transport_fd::TransportGrid { cells: 100, dt: 0.02 },
    );
    for (i, &m) in fd.iter().enumerate() {
        let expect = if (20..30).contains(&i) { 0.1 } else { 0.0 };
        assert!((m - expect).abs() < 1e-12, "{i}");
    }
}

#[test]
fn invalid_configs() {
    let bad = |cfg: MicroConfig| matches!(init_micro(&cfg), Err(MicroError::ConfigInvalid(_)));
    assert!(bad(MicroConfig { h1: 0.3, h2: 0.2, ..MicroConfig::default() }));
    assert!(bad(MicroConfig { tau: 0.0, ..MicroConfig::default() }));
    assert!(bad(MicroConfig { particles: 0, ..MicroConfig::default() }));
    let vj = VelocityJumpConfig { rate: 0.0, ..VelocityJumpConfig::default() };
    assert!(velocity_jump_positions(&vj, &mut RngStream::new(0, 0)).is_err());
}

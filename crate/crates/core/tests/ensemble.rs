use levyflow_core::drivers::RngStream;
use levyflow_core::ensemble::{
    run_ensemble, run_macro_ensemble, run_micro_ensemble, welford_merge, EnsembleConfig, EnsembleError, EnsembleKind,
    EnsembleStats, FieldMoments, Moments,
};
use levyflow_core::macro_sim::{run_macro, MacroConfig};
use levyflow_core::micro_sim::{run_micro, survival_fraction, MicroConfig};
use proptest::prelude::*;

fn brute(xs: &[f64]) -> (u64, f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    (xs.len() as u64, mean, xs.iter().map(|x| (x - mean).powi(2)).sum())
}

fn moments_of(xs: &[f64]) -> (u64, f64, f64) {
    let mut m = Moments::default();
    xs.iter().for_each(|&x| m.push(x));
    (m.count, m.mean, m.m2)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]
    #[test]
    fn merge_matches_concatenation(
        xs in prop::collection::vec(-50.0f64..50.0, 1000),
        cuts in prop::collection::vec(0usize..1000, 1..8),
    ) {
        let mut cuts = cuts;
        cuts.push(0);
        cuts.push(xs.len());
        cuts.sort_unstable();
        let parts: Vec<_> = cuts.windows(2).map(|w| moments_of(&xs[w[0]..w[1]])).collect();
        let merged = welford_merge(&parts);
        let exact = brute(&xs);
        prop_assert_eq!(merged.0, exact.0);
        prop_assert!((merged.1 - exact.1).abs() <= 1e-10 * exact.1.abs().max(1.0));
        prop_assert!((merged.2 - exact.2).abs() <= 1e-10 * exact.2);

        // regroup: ((a b) c ...) vs (a (b c ...))
        let right = welford_merge(&[parts[0], welford_merge(&parts[1..])]);
        prop_assert!((right.1 - merged.1).abs() <= 1e-10 * merged.1.abs().max(1.0));
        prop_assert!((right.2 - merged.2).abs() <= 1e-10 * merged.2);
    }
}

fn short_macro() -> MacroConfig {
    MacroConfig {
        steps: 30,
        snapshots: vec![0, 15, 30],
        ..MacroConfig::default()
    }
}

#[test]
fn single_sample_ensemble_is_the_run() {
    let cfg = short_macro();
    let ens = EnsembleConfig {
        samples: 1,
        base_seed: 77,
        workers: 2,
        export: vec![0],
    };
    let stats = run_macro_ensemble(&cfg, &ens).unwrap();
    let run = run_macro(&cfg, &mut RngStream::new(77, 0)).unwrap();
    for (k, s) in run.snapshots.iter().enumerate() {
        assert_eq!(stats.h[k].mean(), s.h);
        assert_eq!(stats.c[k].mean(), s.c);
        assert!(stats.h[k].variance().values().iter().all(|&v| v == 0.0));
    }
    assert_eq!(stats.exported[0].1, run.snapshots);
}

#[test]
fn noise_off_gives_zero_variance() {
    let cfg = MacroConfig {
        sigma_w: 0.0,
        ..short_macro()
    };
    let ens = EnsembleConfig {
        samples: 12,
        base_seed: 1,
        workers: 3,
        export: vec![],
    };
    let stats = run_macro_ensemble(&cfg, &ens).unwrap();
    for f in stats.h.iter().chain(&stats.c).chain(&stats.n) {
        assert!(f.variance().max_abs() <= 1e-12);
    }
}

#[test]
fn worker_count_does_not_change_statistics() {
    let cfg = short_macro();
    let at = |workers| {
        run_macro_ensemble(
            &cfg,
            &EnsembleConfig {
                samples: 20,
                base_seed: 9,
                workers,
                export: vec![3, 11],
            },
        )
        .unwrap()
    };
    let one = at(1);
    assert_eq!(one, at(2));
    assert_eq!(one, at(8));
}

#[test]
fn exported_means_match_streamed_means() {
    let cfg = short_macro();
    let ens = EnsembleConfig {
        samples: 6,
        base_seed: 4,
        workers: 0,
        export: (0..6).collect(),
    };
    let stats = run_macro_ensemble(&cfg, &ens).unwrap();
    let last = stats.snapshot_steps.len() - 1;
    let mut naive = vec![0.0; cfg.grid().unwrap().nodes()];
    for (_, snaps) in &stats.exported {
        for (a, &v) in naive.iter_mut().zip(snaps[last].h.values()) {
            *a += v / 6.0;
        }
    }
    let streamed = stats.h[last].mean();
    for (a, b) in naive.iter().zip(streamed.values()) {
        assert!((a - b).abs() <= 1e-12);
    }
}

#[test]
fn standard_error_shrinks_like_root_m() {
    let cfg = short_macro();
    let se = |samples| {
        let stats = run_macro_ensemble(
            &cfg,
            &EnsembleConfig {
                samples,
                base_seed: 31,
                workers: 0,
                export: vec![],
            },
        )
        .unwrap();
        let v: &FieldMoments = stats.h.last().unwrap();
        let var = v.variance();
        var.values().iter().map(|s| (s / samples as f64).sqrt()).sum::<f64>() / var.values().len() as f64
    };
    let ratio = se(50) / se(200);
    assert!((ratio / 2.0 - 1.0).abs() <= 0.2, "ratio {ratio}");
}

#[test]
fn micro_ensemble_is_self_consistent() {
    let cfg = MicroConfig {
        particles: 900,
        ..MicroConfig::default()
    };
    let ens = EnsembleConfig {
        samples: 100,
        base_seed: 5,
        workers: 0,
        export: vec![0],
    };
    let stats = run_micro_ensemble(&cfg, &ens).unwrap();
    let single = run_micro(&cfg, &mut RngStream::new(5, 0)).unwrap();
    assert_eq!(stats.survival[0], survival_fraction(&single.state, 900));
    assert_eq!(stats.exported[0].1, single.alive);
    let sd = stats.moments.variance().sqrt();
    assert!((stats.survival[0] - stats.moments.mean).abs() <= 2.0 * sd);
    assert!(stats.alive_curve.windows(2).all(|w| w[1].mean <= w[0].mean));
}

#[test]
fn failing_sample_reports_its_seed() {
    let cfg = MacroConfig {
        max_iter: Some(1),
        solver_tol: 1e-16,
        ..short_macro()
    };
    let ens = EnsembleConfig {
        samples: 4,
        base_seed: 123,
        workers: 2,
        export: vec![],
    };
    match run_ensemble(&EnsembleKind::Macro(cfg), &ens) {
        Err(EnsembleError::Macro { sample, seed, .. }) => assert_eq!((sample, seed), (0, 123)),
        other => panic!("expected a failed sample, got {other:?}"),
    }
}

#[test]
fn dispatch_by_kind() {
    let cfg = MicroConfig {
        particles: 50,
        steps: 3,
        ..MicroConfig::default()
    };
    let ens = EnsembleConfig {
        samples: 2,
        ..EnsembleConfig::default()
    };
    assert!(matches!(run_ensemble(&EnsembleKind::Micro(cfg), &ens).unwrap(), EnsembleStats::Micro(_)));
}

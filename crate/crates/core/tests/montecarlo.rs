use fdcran_core::montecarlo::{estimate_se, run_experiment, run_trial, simulate_many, TrialOutcome};
use fdcran_core::{ClusterSize, Clustering, DuplexMode, NetworkConfig, Sweep, SweepAxis};

fn desk(l: f64) -> NetworkConfig {
    NetworkConfig { cluster: ClusterSize::MeanRus(l), region_radius: 8.0, ..NetworkConfig::default() }
}

#[test]
fn worker_count_does_not_change_draws() {
    let cfg = desk(3.0);
    let one = simulate_many(&cfg, Clustering::UserCentric, 64, 5, Some(1)).unwrap();
    let three = simulate_many(&cfg, Clustering::UserCentric, 64, 5, Some(3)).unwrap();
    assert_eq!(one, three);
    assert!(simulate_many(&cfg, Clustering::UserCentric, 0, 5, None).is_err());
    assert!(simulate_many(&cfg, Clustering::UserCentric, 4, 5, Some(0)).is_err());
}

#[test]
fn experiment_is_reproducible_from_the_master_seed() {
    let sweep = Sweep { axis: SweepAxis::MeanRus, values: vec![1.0, 2.0] };
    let run = |seed| {
        run_experiment(
            &desk(2.0),
            &sweep,
            &[Clustering::Disjoint, Clustering::UserCentric],
            &[DuplexMode::fd(), DuplexMode::hd()],
            40,
            seed,
            Some(2),
        )
        .unwrap()
    };
    let a = run(9);
    assert_eq!(a.len(), 8);
    assert_eq!(a, run(9));
    assert_ne!(a, run(10));
    let empty = Sweep { axis: SweepAxis::MeanRus, values: vec![] };
    assert!(run_experiment(&desk(2.0), &empty, &[Clustering::Disjoint], &[DuplexMode::fd()], 10, 1, None).is_err());
}

#[test]
fn half_duplex_is_full_duplex_without_the_other_direction() {
    let cfg = desk(3.0);
    for seed in 0..50 {
        for clustering in [Clustering::Disjoint, Clustering::UserCentric] {
            let hd = run_trial(&cfg, clustering, DuplexMode::hd(), seed).unwrap();
            let dl_only =
                run_trial(&NetworkConfig { p_u: 0.0, ..cfg.clone() }, clustering, DuplexMode::fd(), seed).unwrap();
            let ul_only =
                run_trial(&NetworkConfig { p_d: 0.0, ..cfg.clone() }, clustering, DuplexMode::fd(), seed).unwrap();
            assert_eq!(hd.dl_sinr, dl_only.dl_sinr);
            assert_eq!(hd.ul_sinr, ul_only.ul_sinr);
        }
    }
}

#[test]
fn components_are_nonnegative_and_consistent() {
    let cfg = desk(2.0);
    for seed in 0..50 {
        let t = run_trial(&cfg, Clustering::Disjoint, DuplexMode::fd(), seed).unwrap();
        for c in [t.dl, t.ul] {
            assert!(c.signal >= 0.0 && c.ici >= 0.0 && c.cmi >= 0.0 && c.noise > 0.0);
        }
        assert_eq!(t.dl_sinr, t.dl.signal / (t.dl.ici + t.dl.cmi + t.dl.noise));
    }
}

#[test]
fn standard_error_shrinks_like_inverse_root_of_trials() {
    let cfg = desk(3.0);
    let draws = simulate_many(&cfg, Clustering::UserCentric, 4000, 77, None).unwrap();
    let se = |n: usize| {
        let outcomes: Vec<TrialOutcome> = draws[..n].iter().map(|d| d.outcome(DuplexMode::fd())).collect();
        estimate_se(&outcomes, f64::INFINITY, f64::INFINITY, DuplexMode::fd()).unwrap().dl_error
    };
    let (a, b, c) = (se(250), se(1000), se(4000));
    assert!((a / b / 2.0 - 1.0).abs() < 0.25, "{a} {b}");
    assert!((b / c / 2.0 - 1.0).abs() < 0.25, "{b} {c}");
}

#[test]
fn zero_fronthaul_gives_zero_se() {
    let draws = simulate_many(&desk(2.0), Clustering::Disjoint, 20, 3, None).unwrap();
    let outcomes: Vec<TrialOutcome> = draws.iter().map(|d| d.outcome(DuplexMode::hd())).collect();
    let se = estimate_se(&outcomes, 0.0, 0.0, DuplexMode::hd()).unwrap();
    assert_eq!((se.dl_se, se.ul_se), (0.0, 0.0));
    assert!(estimate_se(&[], 1.0, 1.0, DuplexMode::fd()).is_err());
}

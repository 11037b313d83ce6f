use std::time::{Duration, Instant};

use proptest::prelude::*;
use vivipar::cdcl::{NoHooks, SearchHooks};
use vivipar::harness::{
    brute_force, emit_csv_string, gen_random_3sat, implied, pigeonhole, read_csv, verify_model, RunRecord,
};
use vivipar::strategy::Strategy;
use vivipar::{
    parse_dimacs, run, Budget, Engine, EngineConfig, Formula, LcmMode, Lit, PortfolioConfig, SolveStatus, Stats, Var,
};

fn arb_formula() -> impl Strategy_<Value = Formula> {
    (1u32..12).prop_flat_map(|n| {
        let lit = (0..n, any::<bool>()).prop_map(|(v, p)| Var(v).lit(p));
        let clause = prop::collection::vec(lit, 1..5);
        prop::collection::vec(clause, 0..40).prop_map(move |cs| Formula::new(n, cs))
    })
}

use proptest::strategy::Strategy as Strategy_;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn dimacs_round_trip(f in arb_formula()) {
        let text = f.to_dimacs_string();
        prop_assert_eq!(parse_dimacs(text.as_bytes()).unwrap(), f);
    }

    #[test]
    fn oracle_invariant_under_renaming(f in arb_formula(), seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let n = f.num_vars();
        let mut perm: Vec<u32> = (0..n).collect();
        perm.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
        let renamed = Formula::new(
            n,
            f.clauses().iter().map(|c| c.lits().iter().map(|l| Var(perm[l.var().index()]).lit(l.is_positive())).collect()),
        );
        let a = brute_force(&f).unwrap();
        let b = brute_force(&renamed).unwrap();
        prop_assert_eq!(a.label(), b.label());
        if let SolveStatus::Sat(m) = b {
            prop_assert!(verify_model(&renamed, &m));
        }
    }

    #[test]
    fn engine_matches_oracle(f in arb_formula()) {
        let expected = brute_force(&f).unwrap();
        let got = Engine::new(&f, EngineConfig::default()).solve();
        prop_assert_eq!(got.label(), expected.label());
        if let SolveStatus::Sat(m) = got {
            prop_assert!(verify_model(&f, &m));
        }
    }

    #[test]
    fn csv_round_trip(
        rows in prop::collection::vec(
            ("[a-z0-9_.,\" -]{0,12}", 0usize..40, prop::option::of(0.0f64..1e4), any::<[u32; 4]>()),
            0..6,
        )
    ) {
        let records: Vec<RunRecord> = rows
            .into_iter()
            .map(|(name, workers, wall, v)| RunRecord {
                instance: name,
                mode: "lpcm".into(),
                workers,
                status: "UNKNOWN".into(),
                wall_seconds: wall,
                stats: Stats {
                    propagations_total: v[0] as u64 + v[1] as u64,
                    propagations_vivify: v[1] as u64,
                    vivify_attempts: v[2] as u64,
                    conflicts: v[3] as u64,
                    ..Stats::default()
                },
            })
            .collect();
        let back = read_csv(emit_csv_string(&records).as_bytes()).unwrap();
        prop_assert_eq!(back, records);
    }
}

#[test]
fn mode_none_matches_plain_engine() {
    for seed in 0..30 {
        let f = gen_random_3sat(60, 256, 900 + seed);
        let mut plain = Engine::new(&f, EngineConfig::default());
        let a = plain.search(&mut NoHooks, &Budget::unlimited());
        let mut wrapped = Engine::new(&f, EngineConfig::default());
        let mut strategy = Strategy::new(LcmMode::None, None);
        let b = wrapped.search(&mut strategy as &mut dyn SearchHooks, &Budget::unlimited());
        assert_eq!(a, b);
        assert_eq!(plain.stats(), wrapped.stats());

        let single = run(
            &f,
            &PortfolioConfig {
                deterministic: true,
                ..PortfolioConfig::with_workers(1)
            },
        )
        .unwrap();
        assert_eq!(single.status, a);
        assert_eq!(&single.workers[0].stats, plain.stats());
    }
}

#[test]
fn deterministic_runs_are_identical() {
    let f = gen_random_3sat(120, 511, 5);
    for mode in LcmMode::evaluated_modes() {
        let config = PortfolioConfig {
            num_workers: 4,
            lcm_mode: mode,
            seed: 11,
            deterministic: true,
            ..PortfolioConfig::default()
        };
        let a = run(&f, &config).unwrap();
        let b = run(&f, &config).unwrap();
        assert_eq!(a.status, b.status);
        assert_eq!(a.winner, b.winner);
        let stats = |r: &vivipar::PortfolioResult| r.workers.iter().map(|w| w.stats.clone()).collect::<Vec<_>>();
        assert_eq!(stats(&a), stats(&b), "{mode}");
    }
}

#[test]
fn workers_share_one_mode_and_consistent_stats() {
    let f = gen_random_3sat(150, 639, 21);
    for mode in LcmMode::evaluated_modes() {
        let r = run(
            &f,
            &PortfolioConfig {
                num_workers: 4,
                lcm_mode: mode,
                ..PortfolioConfig::default()
            },
        )
        .unwrap();
        assert_eq!(r.workers.len(), 4);
        assert!(r.workers.iter().all(|w| w.lcm_mode == mode));
        assert!(r.workers.iter().all(|w| w.stats.is_consistent()), "{mode}");
        let pct = r.total_stats().vivify_prop_pct();
        assert!((0.0..=100.0).contains(&pct));
        assert!(r.winner.is_some());
    }
}

#[test]
fn stop_propagates_to_all_workers() {
    let f = pigeonhole(11, 10);
    let start = Instant::now();
    let r = run(
        &f,
        &PortfolioConfig {
            num_workers: 4,
            time_limit: Some(Duration::from_millis(300)),
            ..PortfolioConfig::default()
        },
    )
    .unwrap();
    assert_eq!(r.status, SolveStatus::Unknown);
    assert_eq!(r.winner, None);
    assert!(start.elapsed() < Duration::from_secs(5));
}

#[test]
fn conflict_budget_gives_unknown() {
    let f = pigeonhole(9, 8);
    for deterministic in [false, true] {
        let r = run(
            &f,
            &PortfolioConfig {
                num_workers: 2,
                deterministic,
                max_conflicts: Some(700),
                ..PortfolioConfig::default()
            },
        )
        .unwrap();
        assert_eq!(r.status, SolveStatus::Unknown);
        assert!(r.workers.iter().all(|w| w.stats.conflicts <= 700));
    }
}

#[test]
fn portfolio_examples() {
    let unsat = Formula::from_dimacs_clauses(1, &[&[1], &[-1]]);
    let r = run(
        &unsat,
        &PortfolioConfig {
            deterministic: true,
            ..PortfolioConfig::with_workers(1)
        },
    )
    .unwrap();
    assert_eq!((r.status, r.winner), (SolveStatus::Unsat, Some(0)));

    let sat = gen_random_3sat(50, 150, 8);
    let r = run(&sat, &PortfolioConfig::with_workers(4)).unwrap();
    let SolveStatus::Sat(m) = r.status else {
        panic!("expected SAT");
    };
    assert!(verify_model(&sat, &m));
}

#[test]
fn lpcm_adoptions_are_sound() {
    // adopted clauses must follow from the formula
    let mut adopted = 0;
    for seed in 0..40 {
        let f = gen_random_3sat(25, 107, 4000 + seed);
        let config = PortfolioConfig {
            num_workers: 4,
            lcm_mode: LcmMode::Lpcm,
            deterministic: true,
            quantum: 4,
            seed,
            luby_unit: 4,
            base: EngineConfig {
                reduce_first: 3,
                reduce_increment: 1,
                record_replacements: true,
                restart: vivipar::cdcl::RestartPolicy::Dynamic { window: 4, k: 0.8 },
                ..EngineConfig::default()
            },
            ..PortfolioConfig::default()
        };
        let r = run(&f, &config).unwrap();
        for w in &r.workers {
            for rep in &w.replacements {
                assert!(implied(&f, &rep.replaced).unwrap(), "{:?}", rep);
                adopted += (rep.kind == vivipar::cdcl::ReplacementKind::Adopted) as usize;
            }
        }
    }
    assert!(adopted > 0, "scenario never adopted an improvement");
}

#[test]
fn verify_model_examples() {
    let f = Formula::from_dimacs_clauses(2, &[&[1, 2]]);
    assert!(verify_model(&f, &[true, false]));
    assert!(verify_model(&Formula::new(0, []), &[]));
    let g = Formula::from_dimacs_clauses(1, &[&[1], &[-1]]);
    assert!(!verify_model(&g, &[true]) && !verify_model(&g, &[false]));
    let _ = Lit::from_dimacs(1);
}

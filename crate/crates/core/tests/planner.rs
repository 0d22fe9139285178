mod common;

use common::{check_solution, exhaustive_optimal_length, micro_generalized};
use hfsc::compile::compile_flat;
use hfsc::domains::{generate, DomainKind, DomainSpec};
use hfsc::model::validate_plan;
use hfsc::planner::{solve, solve_default, Heuristic, Outcome, SearchConfig, Strategy};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn configs() -> Vec<SearchConfig> {
    let mut out = Vec::new();
    for strategy in [Strategy::GreedyBestFirst, Strategy::WeightedAStar { weight: 2 }, Strategy::WeightedAStar { weight: 1 }] {
        for heuristic in [Heuristic::Additive, Heuristic::GoalCount, Heuristic::Blind] {
            for preferred_operators in [false, true] {
                out.push(SearchConfig {
                    strategy,
                    heuristic,
                    max_expansions: 200_000,
                    max_seconds: 30.0,
                    preferred_operators,
                });
            }
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn breadth_first_is_optimal(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (_, gp) = micro_generalized(&mut rng, 7, 4, 1);
        let p = gp.instance(0);
        let oracle = exhaustive_optimal_length(&p, 1 << 12).expect("micro spaces are small");
        let got = solve(&p, &SearchConfig::breadth_first(1 << 20));
        match (oracle, &got.outcome) {
            (Some(len), Outcome::Plan(plan)) => {
                prop_assert_eq!(plan.len(), len);
                prop_assert!(validate_plan(&p, plan).is_solved());
            }
            (None, Outcome::Unsolvable) => {}
            (o, g) => prop_assert!(false, "oracle {:?}, search {:?}", o, g),
        }
    }

    #[test]
    fn every_configuration_returns_valid_plans(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (_, gp) = micro_generalized(&mut rng, 7, 4, 1);
        let p = gp.instance(0);
        let solvable = exhaustive_optimal_length(&p, 1 << 12).unwrap();
        for cfg in configs() {
            let got = solve(&p, &cfg);
            match (&got.outcome, solvable) {
                (Outcome::Plan(plan), Some(best)) => {
                    prop_assert!(validate_plan(&p, plan).is_solved());
                    prop_assert!(plan.len() >= best);
                }
                (Outcome::Unsolvable, None) => {}
                (o, s) => prop_assert!(false, "{:?}: {:?} vs optimal {:?}", cfg, o, s),
            }
        }
    }
}

#[test]
fn weighted_astar_with_unit_weight_matches_optimal() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let cfg = SearchConfig {
        strategy: Strategy::WeightedAStar { weight: 1 },
        heuristic: Heuristic::Blind,
        preferred_operators: false,
        ..Default::default()
    };
    for _ in 0..30 {
        let (_, gp) = micro_generalized(&mut rng, 7, 4, 1);
        let p = gp.instance(0);
        let best = exhaustive_optimal_length(&p, 1 << 12).unwrap();
        assert_eq!(solve(&p, &cfg).outcome.plan().map(|x| x.len()), best);
    }
}

#[test]
fn compiled_list_solutions_check_out() {
    let g = generate(&DomainSpec::training(DomainKind::List)).unwrap();
    let cp = compile_flat(&g.gp, 2).unwrap();
    let got = solve_default(&cp.problem, 1_000_000, 60.0);
    let plan = got.outcome.plan().expect("list is solvable with two states");
    check_solution(&cp, plan).unwrap();
}

#[test]
fn one_state_list_is_unsolvable() {
    let g = generate(&DomainSpec::training(DomainKind::List)).unwrap();
    let cp = compile_flat(&g.gp, 1).unwrap();
    assert_eq!(solve_default(&cp.problem, 1_000_000, 60.0).outcome, Outcome::Unsolvable);
}

#[test]
fn expansion_budget_is_reported() {
    let g = generate(&DomainSpec::training(DomainKind::Blocks)).unwrap();
    let cp = compile_flat(&g.gp, 3).unwrap();
    let got = solve(&cp.problem, &SearchConfig::breadth_first(50));
    assert_eq!(got.outcome, Outcome::Exhausted);
    assert!(got.stats.expanded <= 50);
}

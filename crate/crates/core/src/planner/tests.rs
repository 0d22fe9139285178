use super::*;
use crate::pddl::{ground, parse_domain, parse_problem};

fn chain(k: usize, extra_goal: &str) -> Problem {
    let mut preds = String::new();
    let mut actions = String::new();
    for i in 1..=k {
        preds.push_str(&format!(" (f{i})"));
        if i < k {
            actions.push_str(&format!(
                "(:action step{i} :parameters () :precondition (and (f{i})) :effect (and (f{})))\n",
                i + 1
            ));
        }
    }
    let d = parse_domain(&format!(
        "(define (domain chain) (:predicates{preds} (lonely))\n{actions})"
    ))
    .unwrap();
    let p = parse_problem(&format!(
        "(define (problem c) (:domain chain) (:init (f1)) (:goal (and (f{k}) {extra_goal})))"
    ))
    .unwrap();
    ground(&d, &p).unwrap()
}

#[test]
fn goal_in_init_gives_empty_plan() {
    let p = chain(1, "");
    for cfg in [SearchConfig::default(), SearchConfig::breadth_first(10)] {
        assert_eq!(solve(&p, &cfg).outcome, Outcome::Plan(Plan::default()));
    }
    assert_eq!(relaxed_heuristic(&p.init, &p), 0);
}

#[test]
fn chain_heuristic_is_length() {
    for k in 2..8 {
        let p = chain(k, "");
        assert_eq!(relaxed_heuristic(&p.init, &p), (k - 1) as u64);
        let r = solve(&p, &SearchConfig::default());
        let plan = r.outcome.plan().unwrap();
        assert_eq!(plan.len(), k - 1);
        assert!(p.validate(plan).is_solved());
    }
}

#[test]
fn unreachable_goal() {
    let mut p = chain(3, "");
    let lonely = p.fluents.id(&crate::model::Atom::nullary("lonely")).unwrap();
    p.goal = p.goal.union(&crate::model::LiteralSet::new([lonely], []).unwrap()).unwrap();
    assert_eq!(relaxed_heuristic(&p.init, &p), INFINITE);
    assert_eq!(solve(&p, &SearchConfig::breadth_first(1000)).outcome, Outcome::Unsolvable);
    assert_eq!(solve(&p, &SearchConfig::default()).outcome, Outcome::Unsolvable);
}

#[test]
fn expansion_budget() {
    let p = chain(30, "");
    let r = solve(&p, &SearchConfig::breadth_first(3));
    assert_eq!(r.outcome, Outcome::Exhausted);
    assert_eq!(r.stats.expanded, 3);
}

#[test]
fn negative_goals_are_counted() {
    let d = parse_domain(
        "(define (domain n) (:requirements :negative-preconditions) (:predicates (a) (b))
          (:action clear-a :parameters () :precondition (and (b)) :effect (and (not (a))))
          (:action set-b :parameters () :effect (and (b))))",
    )
    .unwrap();
    let p = parse_problem("(define (problem q) (:domain n) (:init (a)) (:goal (and (not (a)))))").unwrap();
    let p = ground(&d, &p).unwrap();
    assert_eq!(relaxed_heuristic(&p.init, &p), 2);
    assert_eq!(goal_count(&p, &p.init), 1);
    for strategy in [Strategy::GreedyBestFirst, Strategy::WeightedAStar { weight: 2 }] {
        let r = solve(&p, &SearchConfig { strategy, ..Default::default() });
        assert_eq!(r.outcome.plan().unwrap().len(), 2);
    }
}

mod common;

use std::collections::HashSet;

use common::{expected_sizes, micro_domain, micro_generalized, reference_apply};
use hfsc::compile::{compile_flat, compile_hier, SynthesisParams};
use hfsc::domains::{generate, generate_trees, tree, DomainKind, DomainSpec, Tree};
use hfsc::fsc::{execute, step, Controller, Hierarchy, Instruction, Limits, StackFrame, StepEvent, Verdict};
use hfsc::model::{FluentId, Problem, State};
use hfsc::pddl::{emit_generalized, ground_generalized, isomorphic, parse_domain, parse_problem};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_state(rng: &mut ChaCha8Rng, len: usize) -> State {
    State::from_true(len, (0..len).filter(|_| rng.gen_bool(0.5)).map(|i| FluentId(i as u32)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn apply_matches_reference(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (_, gp) = micro_generalized(&mut rng, 8, 4, 1);
        let p = gp.instance(0);
        for a in p.actions.iter() {
            for _ in 0..4 {
                let s = random_state(&mut rng, p.fluents.len());
                let applicable = a.pre.literals().all(|l| s.get(l.fluent) == l.positive);
                prop_assert_eq!(a.applicable(&s), applicable);
                let expected = if applicable { reference_apply(&s, a) } else { None };
                prop_assert_eq!(a.apply(&s, p.effect_mode).ok(), expected);
            }
        }
    }

    #[test]
    fn domain_text_round_trips(seed in any::<u64>(), nf in 2usize..8, na in 1usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let text = micro_domain(&mut rng, nf, na);
        let d = parse_domain(&text).unwrap();
        prop_assert_eq!(parse_domain(&d.to_pddl()).unwrap(), d);
    }

    #[test]
    fn ground_emission_is_isomorphic(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (_, gp) = micro_generalized(&mut rng, 8, 4, 3);
        let (d, ps) = emit_generalized(&gp, "g").unwrap();
        let d = parse_domain(&d).unwrap();
        let ps: Vec<_> = ps.iter().map(|t| parse_problem(t).unwrap()).collect();
        let again = ground_generalized(&d, &ps).unwrap();
        for t in 0..gp.len() {
            prop_assert!(isomorphic(&gp.instance(t), &again.instance(t)));
        }
    }

    #[test]
    fn compiled_sizes_follow_formula(
        seed in any::<u64>(),
        n in 1usize..4,
        m in 1usize..4,
        stack in 0usize..3,
        hier in any::<bool>(),
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (_, gp) = micro_generalized(&mut rng, 6, 3, 3);
        let (m, stack) = if hier { (m, stack) } else { (1, 0) };
        let cp = if hier {
            compile_hier(&gp, &SynthesisParams::hierarchical(n, m, stack)).unwrap()
        } else {
            compile_flat(&gp, n).unwrap()
        };
        let expected = expected_sizes(gp.fluents.len(), gp.actions.len(), gp.len(), n, m, stack, hier);
        prop_assert_eq!((cp.problem.fluents.len(), cp.problem.actions.len()), expected);
    }

    #[test]
    fn calls_restore_caller_bindings(seed in any::<u64>(), len in 1usize..30) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = Tree::random(len, &mut rng);
        let g = generate_trees(std::slice::from_ref(&t)).unwrap();
        let p = g.problem(0);
        let h = tree::dfs_hierarchy();
        let b = h.bind(&p).unwrap();
        let space = p.assignments.clone().unwrap();
        let assignment = |s: &State| space.fluents().filter(|&f| s.get(f)).collect::<Vec<_>>();
        let mut frames = vec![StackFrame::new(0)];
        let mut s = p.init.clone();
        let mut saved = Vec::new();
        for _ in 0..100_000 {
            if frames.len() == 1 && frames[0].state == b.terminal {
                break;
            }
            let before = assignment(&s);
            match step(&b, &p, &mut frames, &mut s, t.depth() + 1).unwrap() {
                StepEvent::Call { .. } => saved.push(before),
                StepEvent::Return { .. } => {
                    let expected = saved.pop().unwrap();
                    prop_assert_eq!(assignment(&s), expected);
                }
                StepEvent::Primitive { .. } => {}
            }
        }
        prop_assert!(saved.is_empty());
        prop_assert!(p.goal_satisfied(&s));
    }

    #[test]
    fn single_controller_matches_flat_interpreter(seed in any::<u64>(), n in 1usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (_, gp) = micro_generalized(&mut rng, 6, 3, 1);
        let p = gp.instance(0);
        prop_assume!(!p.actions.is_empty());
        let h = random_flat_controller(&mut rng, &p, n);
        let got = execute(&h, &p, Limits::default()).unwrap();
        let (verdict, state) = flat_interpreter(&h, &p);
        prop_assert_eq!(got.verdict, verdict);
        if let Some(s) = state {
            prop_assert_eq!(got.final_state(), &s);
        }
    }
}

fn random_flat_controller(rng: &mut ChaCha8Rng, p: &Problem, n: usize) -> Hierarchy {
    let mut c = Controller::new("c", vec![]);
    for q in 0..n {
        let f = p.fluents.name(FluentId(rng.gen_range(0..p.fluents.len()) as u32)).clone();
        for b in [false, true] {
            if rng.gen_bool(0.9) {
                let a = p.actions[rng.gen_range(0..p.actions.len())].name.clone();
                c.set(q, f.clone(), b, rng.gen_range(0..=n), Instruction::Action(a));
            }
        }
        c.gamma.insert(q, f);
    }
    Hierarchy::new(n + 1, vec![c])
}

/// Straight-line execution of a single controller over `(state, world)` pairs.
fn flat_interpreter(h: &Hierarchy, p: &Problem) -> (Verdict, Option<State>) {
    let c = &h.controllers[0];
    let term = h.num_states - 1;
    let mut q = 0;
    let mut s = p.init.clone();
    let mut seen = HashSet::new();
    seen.insert((q, s.clone()));
    loop {
        if q == term {
            let v = if p.goal_satisfied(&s) { Verdict::Solved } else { Verdict::GoalUnsatisfied };
            return (v, Some(s));
        }
        let f = p.fluents.id(&c.gamma[&q]).unwrap();
        let b = s.get(f);
        let Some(t) = c.transitions.get(&(q, b)) else { return (Verdict::UndefinedTransition, None) };
        let Instruction::Action(name) = &t.instruction else { unreachable!() };
        let a = p.action(p.action_id(name).unwrap());
        if !a.pre.literals().all(|l| s.get(l.fluent) == l.positive) {
            return (Verdict::InapplicableAction, None);
        }
        let Some(next) = reference_apply(&s, a) else { return (Verdict::InapplicableAction, None) };
        s = next;
        q = t.next;
        if !seen.insert((q, s.clone())) {
            return (Verdict::RevisitedConfiguration, None);
        }
    }
}

#[test]
fn generator_outputs_round_trip() {
    for kind in DomainKind::ALL {
        let g = generate(&DomainSpec::held_out(kind, 4, 3)).unwrap();
        let d = parse_domain(&g.domain_text).unwrap();
        assert_eq!(parse_domain(&d.to_pddl()).unwrap(), d, "{kind}");
        for text in &g.problem_texts {
            let p = parse_problem(text).unwrap();
            assert_eq!(parse_problem(&p.to_pddl()).unwrap(), p, "{kind}");
        }
    }
}

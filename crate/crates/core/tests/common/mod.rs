//! Shared generators and independent oracles for the integration tests.

#![allow(dead_code)]

use std::collections::{HashSet, VecDeque};
use std::fmt::Write as _;
use std::sync::atomic::{AtomicUsize, Ordering};

use hfsc::compile::CompiledProblem;
use hfsc::decode::{check_phase_order, check_program_once};
use hfsc::model::{ActionId, GeneralizedProblem, GroundAction, Plan, Problem, State};
use hfsc::pddl::{ground_generalized, parse_domain, parse_problem};
use rand::seq::SliceRandom;
use rand::Rng;

/// Plans checked through [`check_solution`] during this test binary's run.
pub static CHECKED_PLANS: AtomicUsize = AtomicUsize::new(0);

/// Validates a plan for a compiled problem and checks the program-once and phase-order
/// invariants. Every solution plan in the integration tests goes through here.
pub fn check_solution(cp: &CompiledProblem, plan: &Plan) -> Result<(), String> {
    if !hfsc::model::validate_plan(&cp.problem, plan).is_solved() {
        return Err("plan does not validate".into());
    }
    check_program_once(cp, plan).map_err(|e| format!("program-once: {e}"))?;
    check_phase_order(&cp.key, plan).map_err(|e| format!("phase order: {e}"))?;
    CHECKED_PLANS.fetch_add(1, Ordering::Relaxed);
    Ok(())
}

/// Literal text for fluent `p<k>` with the given polarity.
fn lit(k: usize, positive: bool) -> String {
    if positive {
        format!("(p{k})")
    } else {
        format!("(not (p{k}))")
    }
}

fn random_literals<R: Rng>(rng: &mut R, nf: usize, max: usize) -> Vec<(usize, bool)> {
    let mut ks: Vec<usize> = (0..nf).collect();
    ks.shuffle(rng);
    let count = rng.gen_range(0..=max.min(nf));
    ks.into_iter().take(count).map(|k| (k, rng.gen_bool(0.6))).collect()
}

fn conj(lits: &[(usize, bool)]) -> String {
    let parts: Vec<String> = lits.iter().map(|&(k, b)| lit(k, b)).collect();
    format!("(and {})", parts.join(" "))
}

/// A random micro domain over 0-ary fluents `p0..`. Each fluent is touched by at most
/// one conditional effect per action, so effects never conflict.
pub fn micro_domain<R: Rng>(rng: &mut R, nf: usize, na: usize) -> String {
    let mut out = format!(
        "(define (domain micro)\n  (:requirements :negative-preconditions :conditional-effects)\n  (:predicates{})\n",
        (0..nf).map(|k| format!(" (p{k})")).collect::<String>()
    );
    for a in 0..na {
        let pre = random_literals(rng, nf, 2);
        let mut touched: Vec<usize> = (0..nf).filter(|_| rng.gen_bool(0.4)).collect();
        if touched.is_empty() {
            touched.push(rng.gen_range(0..nf));
        }
        touched.shuffle(rng);
        let groups = rng.gen_range(1..=touched.len().min(3));
        let mut effects = Vec::new();
        for g in 0..groups {
            let eff: Vec<(usize, bool)> =
                touched.iter().enumerate().filter(|(i, _)| i % groups == g).map(|(_, &k)| (k, rng.gen_bool(0.5))).collect();
            let cond = if g == 0 && rng.gen_bool(0.5) { Vec::new() } else { random_literals(rng, nf, 2) };
            if cond.is_empty() {
                effects.push(eff.iter().map(|&(k, b)| lit(k, b)).collect::<Vec<_>>().join(" "));
            } else {
                effects.push(format!("(when {} {})", conj(&cond), conj(&eff)));
            }
        }
        let _ = write!(out, "  (:action a{a}\n    :parameters ()");
        if !pre.is_empty() {
            let _ = write!(out, "\n    :precondition {}", conj(&pre));
        }
        let _ = writeln!(out, "\n    :effect (and {}))", effects.join(" "));
    }
    out.push_str(")\n");
    out
}

fn micro_problem_text(init: &[bool], goal: &[(usize, bool)]) -> String {
    let init: String = init.iter().enumerate().filter(|(_, &b)| b).map(|(k, _)| format!(" (p{k})")).collect();
    format!("(define (problem m) (:domain micro) (:init{init}) (:goal {}))", conj(goal))
}

/// A random generalized problem with at most `max_f` fluents, `max_a` actions and
/// `max_t` instances. Goals come from short random walks, so every instance is
/// solvable on its own.
pub fn micro_generalized<R: Rng>(rng: &mut R, max_f: usize, max_a: usize, max_t: usize) -> (String, GeneralizedProblem) {
    loop {
        let nf = rng.gen_range(2..=max_f);
        let na = rng.gen_range(1..=max_a);
        let nt = rng.gen_range(1..=max_t);
        let domain = micro_domain(rng, nf, na);
        let d = parse_domain(&domain).expect("generated domain parses");
        let inits: Vec<Vec<bool>> = (0..nt).map(|_| (0..nf).map(|_| rng.gen_bool(0.4)).collect()).collect();
        let probe: Vec<_> = inits.iter().map(|i| parse_problem(&micro_problem_text(i, &[])).unwrap()).collect();
        let gp = ground_generalized(&d, &probe).expect("goal-free problems ground");
        let mut goals = Vec::new();
        for t in 0..nt {
            let p = gp.instance(t);
            let mut s = p.init.clone();
            for _ in 0..rng.gen_range(1..=4) {
                let ok: Vec<&GroundAction> = p.actions.iter().filter(|a| a.applicable(&s)).collect();
                let Some(a) = ok.choose(rng) else { break };
                if let Ok(next) = a.apply(&s, p.effect_mode) {
                    s = next;
                }
            }
            let mut ks: Vec<usize> = (0..nf).collect();
            ks.shuffle(rng);
            let goal: Vec<(usize, bool)> = ks
                .into_iter()
                .take(rng.gen_range(1..=2))
                .map(|k| {
                    let f = p.fluents.id(&format!("(p{k})").parse().unwrap()).unwrap();
                    (k, s.get(f))
                })
                .collect();
            goals.push(goal);
        }
        let ps: Vec<_> =
            inits.iter().zip(&goals).map(|(i, g)| parse_problem(&micro_problem_text(i, g)).unwrap()).collect();
        if let Ok(gp) = ground_generalized(&d, &ps) {
            return (domain, gp);
        }
    }
}

/// Breadth-first search over explicit states, independent of the planner module.
/// Returns the optimal plan length, or `None` when the goal is unreachable.
pub fn exhaustive_optimal_length(p: &Problem, max_states: usize) -> Option<Option<usize>> {
    let mut seen: HashSet<Vec<bool>> = HashSet::new();
    let key = |s: &State| (0..s.len()).map(|i| s.get(hfsc::model::FluentId(i as u32))).collect::<Vec<bool>>();
    let mut queue = VecDeque::new();
    seen.insert(key(&p.init));
    queue.push_back((p.init.clone(), 0usize));
    while let Some((s, d)) = queue.pop_front() {
        if p.goal.literals().all(|l| s.get(l.fluent) == l.positive) {
            return Some(Some(d));
        }
        for a in p.actions.iter() {
            if !a.pre.literals().all(|l| s.get(l.fluent) == l.positive) {
                continue;
            }
            let Some(next) = reference_apply(&s, a) else { continue };
            if seen.insert(key(&next)) {
                if seen.len() > max_states {
                    return None;
                }
                queue.push_back((next, d + 1));
            }
        }
    }
    Some(None)
}

/// Reference successor function: collect triggered adds and deletes, reject a fluent
/// that is both added and deleted, then apply. Ignores the precondition.
pub fn reference_apply(s: &State, a: &GroundAction) -> Option<State> {
    let mut add = HashSet::new();
    let mut del = HashSet::new();
    for ce in &a.effects {
        if ce.condition.literals().all(|l| s.get(l.fluent) == l.positive) {
            for l in ce.effect.literals() {
                if l.positive {
                    add.insert(l.fluent);
                } else {
                    del.insert(l.fluent);
                }
            }
        }
    }
    if add.intersection(&del).next().is_some() {
        return None;
    }
    let mut next = s.clone();
    for f in del {
        next.set(f, false);
    }
    for f in add {
        next.set(f, true);
    }
    Some(next)
}

/// Closed-form fluent and action counts of the compiled problem for an input with `nf`
/// fluents (none of them assignment fluents), `na` actions and `nt` instances.
pub fn expected_sizes(nf: usize, na: usize, nt: usize, n: usize, m: usize, stack: usize, hier: bool) -> (usize, usize) {
    let q = n + 1;
    let levels = if hier { stack + 1 } else { 1 };
    // cond, succ, act, nocond, nosucc, noact per controller
    let per_controller = q * nf + 2 * q * q + 2 * q * na + q + 2 * q + 2 * q;
    // cs per state plus evl, app, o0, o1 per level
    let per_level = q + 4;
    let mut fluents = nf + m * per_controller + levels * per_level;
    if hier {
        // lvl per level, fsc per controller and level, parameterless call per (i, q, b, j)
        fluents += levels + m * levels + m * q * 2 * m;
    }
    if nt > 1 {
        fluents += nt;
    }
    // per programmable state: pcond/econd per fluent, pact/eact per branch and action,
    // psucc/esucc per branch and successor
    let per_state = 2 * nf + 2 * (2 * na) + 2 * (2 * q);
    let mut actions = m * levels * n * per_state;
    if hier {
        actions += m * (levels - 1) * n * 2 * (2 * m);
        actions += m * (levels - 1);
    }
    actions += nt - 1;
    (fluents, actions)
}

pub fn plan_of(ids: &[u32]) -> Plan {
    Plan::new(ids.iter().map(|&i| ActionId(i)).collect())
}

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write;

use super::PddlError;
use crate::model::{ActionId, FluentId, GeneralizedProblem, LiteralSet, Plan, Problem};

/// Domain and problem text for a ground problem.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmittedPddl {
    pub domain: String,
    pub problem: String,
}

pub const UNIT_OBJECT: &str = "hfsc-unit";

fn flat_names(p: &Problem) -> Result<Vec<String>, PddlError> {
    let mut seen = HashMap::new();
    let mut out = Vec::with_capacity(p.fluents.len());
    for f in p.fluents.ids() {
        let n = p.fluents.name(f).flat_name();
        if let Some(prev) = seen.insert(n.clone(), f) {
            return Err(PddlError::Emit(format!(
                "fluents {} and {} flatten to the same name",
                p.fluents.name(prev),
                p.fluents.name(f)
            )));
        }
        out.push(n);
    }
    Ok(out)
}

fn literal_list(names: &[String], set: &LiteralSet) -> Vec<String> {
    let mut v: Vec<String> = set
        .literals()
        .map(|l| {
            let n = &names[l.fluent.index()];
            if l.positive {
                format!("({n})")
            } else {
                format!("(not ({n}))")
            }
        })
        .collect();
    v.sort();
    v
}

fn conj(parts: Vec<String>) -> String {
    format!("(and {})", parts.join(" "))
}

/// Emits the domain of a ground problem as 0-ary predicates and parameterless actions.
pub fn emit_domain(p: &Problem, name: &str) -> Result<String, PddlError> {
    let names = flat_names(p)?;
    let derived = p.fluents.has_derived();
    let mut out = format!("(define (domain {name})\n  (:requirements :typing :negative-preconditions :conditional-effects :equality");
    if derived {
        out.push_str(" :derived-predicates");
    }
    out.push_str(")\n  (:predicates");
    let mut preds: Vec<&String> = p.fluents.ids().filter(|&f| !p.fluents.is_derived(f)).map(|f| &names[f.index()]).collect();
    preds.sort();
    for n in preds {
        let _ = write!(out, "\n    ({n})");
    }
    out.push_str(")\n");
    let mut derived_fluents: Vec<FluentId> = p.fluents.ids().filter(|&f| p.fluents.is_derived(f)).collect();
    derived_fluents.sort_by(|a, b| names[a.index()].cmp(&names[b.index()]));
    for f in derived_fluents {
        let body = p.fluents.derived_body(f).unwrap();
        let _ = writeln!(out, "  (:derived ({}) {})", names[f.index()], conj(literal_list(&names, body)));
    }
    let mut order: Vec<usize> = (0..p.actions.len()).collect();
    let action_names: Vec<String> = p.actions.iter().map(|a| a.name.flat_name()).collect();
    order.sort_by(|&a, &b| action_names[a].cmp(&action_names[b]));
    for w in order.windows(2) {
        if action_names[w[0]] == action_names[w[1]] {
            return Err(PddlError::Emit(format!("duplicate action name {}", action_names[w[0]])));
        }
    }
    for i in order {
        let a = &p.actions[i];
        let _ = write!(out, "  (:action {}\n    :parameters ()", action_names[i]);
        if !a.pre.is_empty() {
            let _ = write!(out, "\n    :precondition {}", conj(literal_list(&names, &a.pre)));
        }
        let mut parts = Vec::new();
        let mut whens = Vec::new();
        for ce in &a.effects {
            if ce.condition.is_empty() {
                parts.extend(literal_list(&names, &ce.effect));
            } else {
                whens.push(format!(
                    "(when {} {})",
                    conj(literal_list(&names, &ce.condition)),
                    conj(literal_list(&names, &ce.effect))
                ));
            }
        }
        parts.sort();
        parts.extend(whens);
        let _ = writeln!(out, "\n    :effect {})", conj(parts));
    }
    out.push_str(")\n");
    Ok(out)
}

/// Emits the problem file for `p` against the domain produced by [`emit_domain`].
pub fn emit_problem(p: &Problem, name: &str, domain: &str) -> Result<String, PddlError> {
    let names = flat_names(p)?;
    let mut init: Vec<&String> = p.init.true_fluents().map(|f| &names[f.index()]).collect();
    init.sort();
    let mut out = format!("(define (problem {name})\n  (:domain {domain})\n");
    let goal = if p.goal.is_empty() {
        let _ = writeln!(out, "  (:objects {UNIT_OBJECT})");
        format!("(and (= {UNIT_OBJECT} {UNIT_OBJECT}))")
    } else {
        out.push_str("  (:objects)\n");
        conj(literal_list(&names, &p.goal))
    };
    out.push_str("  (:init");
    for n in init {
        let _ = write!(out, "\n    ({n})");
    }
    let _ = writeln!(out, ")\n  (:goal {goal}))");
    Ok(out)
}

pub fn emit(p: &Problem) -> Result<EmittedPddl, PddlError> {
    Ok(EmittedPddl { domain: emit_domain(p, "hfsc-ground")?, problem: emit_problem(p, "hfsc-instance", "hfsc-ground")? })
}

/// Domain text plus one problem text per instance.
pub fn emit_generalized(gp: &GeneralizedProblem, name: &str) -> Result<(String, Vec<String>), PddlError> {
    let domain = emit_domain(&gp.instance(0), name)?;
    let problems = (0..gp.len())
        .map(|t| emit_problem(&gp.instance(t), &format!("{name}-{}", t + 1), name))
        .collect::<Result<_, _>>()?;
    Ok((domain, problems))
}

/// Reads a plan: one parenthesized ground action per line, `;` comments.
/// Actions are matched by flat name, so both `(pick b1)` and `(pick_b1)` resolve.
pub fn parse_plan(text: &str, p: &Problem) -> Result<Plan, PddlError> {
    let index: HashMap<String, ActionId> =
        p.actions.iter().enumerate().map(|(i, a)| (a.name.flat_name(), ActionId(i as u32))).collect();
    let mut steps = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split(';').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let inner = line
            .strip_prefix('(')
            .and_then(|l| l.strip_suffix(')'))
            .ok_or_else(|| PddlError::Syntax { line: lineno + 1, col: 1, msg: "expected (action ...)".into() })?;
        let key = inner.split_whitespace().collect::<Vec<_>>().join("_").to_lowercase();
        let id = index
            .get(&key)
            .ok_or_else(|| PddlError::UnknownAction { line: lineno + 1, name: key.clone() })?;
        steps.push(*id);
    }
    Ok(Plan::new(steps))
}

/// Compares two ground problems up to fluent renaming by flat name.
pub fn isomorphic(a: &Problem, b: &Problem) -> bool {
    let (Ok(na), Ok(nb)) = (flat_names(a), flat_names(b)) else { return false };
    if na.len() != nb.len() || a.actions.len() != b.actions.len() {
        return false;
    }
    let map_b: HashMap<&String, FluentId> = nb.iter().enumerate().map(|(i, n)| (n, FluentId(i as u32))).collect();
    let mut to_b = Vec::with_capacity(na.len());
    for n in &na {
        match map_b.get(n) {
            Some(&f) => to_b.push(f),
            None => return false,
        }
    }
    let tr = |s: &LiteralSet| s.map_fluents(|f| to_b[f.index()]).expect("renaming keeps consistency");
    for f in a.fluents.ids() {
        let g = to_b[f.index()];
        match (a.fluents.derived_body(f), b.fluents.derived_body(g)) {
            (None, None) => {}
            (Some(x), Some(y)) if &tr(x) == y => {}
            _ => return false,
        }
        if a.init.get(f) != b.init.get(g) {
            return false;
        }
    }
    if tr(&a.goal) != b.goal {
        return false;
    }
    type Ids = (Vec<u32>, Vec<u32>);
    type Sig = (LiteralSet, Vec<(Vec<u32>, Vec<u32>, Vec<u32>, Vec<u32>)>);
    fn normalize(pre: LiteralSet, effects: Vec<(LiteralSet, LiteralSet)>) -> Sig {
        let mut merged: BTreeMap<Ids, Ids> = BTreeMap::new();
        for (c, e) in effects {
            let key = (c.positive().iter().map(|f| f.0).collect(), c.negative().iter().map(|f| f.0).collect());
            let slot = merged.entry(key).or_default();
            slot.0.extend(e.positive().iter().map(|f| f.0));
            slot.1.extend(e.negative().iter().map(|f| f.0));
        }
        let mut v: Vec<_> = merged
            .into_iter()
            .map(|((cp, cn), (mut ep, mut en))| {
                ep.sort_unstable();
                ep.dedup();
                en.sort_unstable();
                en.dedup();
                (cp, cn, ep, en)
            })
            .collect();
        v.sort();
        (pre, v)
    }
    let mut sig_b: HashMap<String, Sig> = HashMap::new();
    for x in b.actions.iter() {
        let effs = x.effects.iter().map(|ce| (ce.condition.clone(), ce.effect.clone())).collect();
        sig_b.insert(x.name.flat_name(), normalize(x.pre.clone(), effs));
    }
    a.actions.iter().all(|x| {
        let effs = x.effects.iter().map(|ce| (tr(&ce.condition), tr(&ce.effect))).collect();
        sig_b.get(&x.name.flat_name()) == Some(&normalize(tr(&x.pre), effs))
    })
}

//! Reading controllers and simulated executions out of plans for compiled problems.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::compile::{CompiledProblem, DecodingKey, Prior, Role};
use crate::fsc::{Controller, Hierarchy, Instruction, TraceStep, Transition};
use crate::model::{Atom, Plan};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DecodeError {
    #[error("slot {0} is programmed twice")]
    DuplicateProgram(String),
    #[error("step {step}: {msg}")]
    MalformedPhase { step: usize, msg: String },
    #[error("step {0} references an action outside the key")]
    UnknownAction(usize),
    #[error("step {step}: {msg}")]
    InvariantViolation { step: usize, msg: String },
}

#[derive(Default)]
struct Tables {
    gamma: BTreeMap<(usize, usize), Atom>,
    phi: BTreeMap<(usize, usize, bool), Instruction>,
    lambda: BTreeMap<(usize, usize, bool), usize>,
}

impl Tables {
    fn set<K: Ord + Copy + std::fmt::Debug, V>(map: &mut BTreeMap<K, V>, k: K, v: V, what: &str) -> Result<(), DecodeError> {
        if map.insert(k, v).is_some() {
            return Err(DecodeError::DuplicateProgram(format!("{what} {k:?}")));
        }
        Ok(())
    }

    fn call(key: &DecodingKey, j: usize, args: &[usize]) -> Instruction {
        Instruction::Call { controller: j, args: args.iter().map(|&v| key.variables[v].clone()).collect() }
    }

    fn apply_prior(&mut self, p: &Prior) -> Result<(), DecodeError> {
        match p {
            Prior::Cond { controller, state, fluent } => {
                Self::set(&mut self.gamma, (*controller, *state), fluent.clone(), "condition")
            }
            Prior::Act { controller, state, branch, action } => Self::set(
                &mut self.phi,
                (*controller, *state, *branch),
                Instruction::Action(action.clone()),
                "instruction",
            ),
            Prior::Succ { controller, state, branch, next } => {
                Self::set(&mut self.lambda, (*controller, *state, *branch), *next, "successor")
            }
            Prior::Call { controller, state, branch, callee, args } => Self::set(
                &mut self.phi,
                (*controller, *state, *branch),
                Instruction::Call { controller: *callee, args: args.clone() },
                "instruction",
            ),
        }
    }

    fn apply_role(&mut self, key: &DecodingKey, role: &Role) -> Result<(), DecodeError> {
        match role {
            Role::Pcond { i, q, f, .. } => Self::set(&mut self.gamma, (*i, *q), key.fluents[*f].clone(), "condition"),
            Role::Pact { i, q, b, a, .. } => {
                Self::set(&mut self.phi, (*i, *q, *b), Instruction::Action(key.actions[*a].clone()), "instruction")
            }
            Role::Psucc { i, q, b, next, .. } => Self::set(&mut self.lambda, (*i, *q, *b), *next, "successor"),
            Role::Pcall { i, q, b, j, args, .. } => {
                Self::set(&mut self.phi, (*i, *q, *b), Self::call(key, *j, args), "instruction")
            }
            _ => Ok(()),
        }
    }
}

fn role_at(key: &DecodingKey, step: usize, a: crate::model::ActionId) -> Result<&Role, DecodeError> {
    key.entries.get(a.index()).map(|e| &e.role).ok_or(DecodeError::UnknownAction(step))
}

/// Controller tables programmed by the priors in `key` and the program actions of `plan`.
/// Slots with only one of `Φ` and `Λ` set are left out.
pub fn decode(plan: &Plan, key: &DecodingKey) -> Result<Hierarchy, DecodeError> {
    let mut t = Tables::default();
    for p in &key.priors {
        t.apply_prior(p)?;
    }
    for (step, &a) in plan.steps.iter().enumerate() {
        t.apply_role(key, role_at(key, step, a)?)?;
    }
    let mut controllers: Vec<Controller> = (0..key.m)
        .map(|i| Controller::new(format!("c{i}"), key.controller_params.get(i).cloned().unwrap_or_default()))
        .collect();
    for ((i, q), f) in t.gamma {
        controllers[i].gamma.insert(q, f);
    }
    for ((i, q, b), instruction) in t.phi {
        if let Some(&next) = t.lambda.get(&(i, q, b)) {
            if controllers[i].gamma.contains_key(&q) {
                controllers[i].transitions.insert((q, b), Transition { next, instruction });
            }
        }
    }
    Ok(Hierarchy {
        num_states: key.num_states(),
        controllers,
        root: 0,
        variables: key.variables.clone(),
        values: key.values.clone(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Phase {
    Idle,
    Evaluated { i: usize, q: usize },
    Applied { i: usize, q: usize, b: bool },
}

/// Simulated execution steps per instance, taken from the execute-role actions of `plan`.
pub fn decode_trace(plan: &Plan, key: &DecodingKey) -> Result<Vec<Vec<TraceStep>>, DecodeError> {
    let mut out = vec![Vec::new()];
    let mut phase = vec![Phase::Idle; key.stack + 1];
    let mut level = 0usize;
    let bad = |step: usize, msg: String| Err(DecodeError::MalformedPhase { step, msg });
    for (step, &a) in plan.steps.iter().enumerate() {
        let role = role_at(key, step, a)?;
        if let Some(l) = role.level() {
            if l != level {
                return bad(step, format!("{} runs on level {l} while the stack is on level {level}", role.name()));
            }
        }
        match role {
            Role::Econd { i, l, q, .. } => {
                if phase[*l] != Phase::Idle {
                    return bad(step, format!("econd on level {l} before the previous step finished"));
                }
                phase[*l] = Phase::Evaluated { i: *i, q: *q };
            }
            Role::Eact { i, l, q, b, .. } | Role::Ecall { i, l, q, b, .. } => {
                if phase[*l] != (Phase::Evaluated { i: *i, q: *q }) {
                    return bad(step, format!("{} on level {l} without a matching econd", role.name()));
                }
                phase[*l] = Phase::Applied { i: *i, q: *q, b: *b };
                let instruction = match role {
                    Role::Eact { a, .. } => Instruction::Action(key.actions[*a].clone()),
                    Role::Ecall { j, args, .. } => Tables::call(key, *j, args),
                    _ => unreachable!(),
                };
                out.last_mut().unwrap().push(TraceStep { level: *l, controller: *i, state: *q, branch: *b, instruction });
                if matches!(role, Role::Ecall { .. }) {
                    level += 1;
                    if phase.get(level) != Some(&Phase::Idle) {
                        return bad(step, format!("call enters level {level} which is busy or out of range"));
                    }
                }
            }
            Role::Esucc { i, l, q, b, .. } => {
                if phase[*l] != (Phase::Applied { i: *i, q: *q, b: *b }) {
                    return bad(step, format!("esucc on level {l} without a matching eact or ecall"));
                }
                phase[*l] = Phase::Idle;
            }
            Role::Term { l, .. } => {
                if *l == 0 || phase[*l] != Phase::Idle || !matches!(phase[*l - 1], Phase::Applied { .. }) {
                    return bad(step, format!("term on level {l} outside a call"));
                }
                level -= 1;
            }
            Role::End { .. } => {
                if level != 0 || phase[0] != Phase::Idle {
                    return bad(step, "instance ends mid-step".into());
                }
                out.push(Vec::new());
            }
            _ => {}
        }
    }
    if phase.iter().any(|p| *p != Phase::Idle) || level != 0 {
        return bad(plan.len(), "plan ends mid-step".into());
    }
    Ok(out)
}

/// Every `no*` fluent turns false at most once and never turns true again.
pub fn check_program_once(cp: &CompiledProblem, plan: &Plan) -> Result<(), DecodeError> {
    let p = &cp.problem;
    let markers: Vec<_> = cp.layout.program_markers().collect();
    let mut s = p.init.clone();
    for (step, &a) in plan.steps.iter().enumerate() {
        let next = p.apply(&s, a).map_err(|e| DecodeError::InvariantViolation { step, msg: e.to_string() })?;
        for &f in &markers {
            if !s.get(f) && next.get(f) {
                return Err(DecodeError::InvariantViolation {
                    step,
                    msg: format!("{} becomes true again", p.fluents.name(f)),
                });
            }
        }
        s = next;
    }
    Ok(())
}

/// Between consecutive `esucc` actions on one level there is exactly one `econd` followed by
/// one `eact` or `ecall`.
pub fn check_phase_order(key: &DecodingKey, plan: &Plan) -> Result<(), DecodeError> {
    decode_trace(plan, key).map(|_| ())
}

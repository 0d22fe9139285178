use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{tuple_index, CompileError, CompiledProblem};
use crate::fsc::{Hierarchy, Instruction};
use crate::model::{Atom, FluentId};

/// One pre-programmed table entry of a controller.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Prior {
    Cond { controller: usize, state: usize, fluent: Atom },
    Act { controller: usize, state: usize, branch: bool, action: Atom },
    Succ { controller: usize, state: usize, branch: bool, next: usize },
    Call { controller: usize, state: usize, branch: bool, callee: usize, args: Vec<String> },
}

/// Table entries of every controller in `h`, with `h`'s terminal state mapped to `q_n`.
pub fn priors_from_hierarchy(h: &Hierarchy, n: usize) -> Vec<Prior> {
    let term = h.terminal();
    let state = |q: usize| if q == term { n } else { q };
    let mut out = Vec::new();
    for (i, c) in h.controllers.iter().enumerate() {
        for (&q, f) in &c.gamma {
            out.push(Prior::Cond { controller: i, state: state(q), fluent: f.clone() });
        }
        for (&(q, branch), t) in &c.transitions {
            out.push(Prior::Succ { controller: i, state: state(q), branch, next: state(t.next) });
            out.push(match &t.instruction {
                Instruction::Action(a) => Prior::Act { controller: i, state: state(q), branch, action: a.clone() },
                Instruction::Call { controller, args } => Prior::Call {
                    controller: i,
                    state: state(q),
                    branch,
                    callee: *controller,
                    args: args.clone(),
                },
            });
        }
    }
    out
}

/// Marks the given slots as programmed in the initial state.
pub fn inject_priors(mut cp: CompiledProblem, priors: &[Prior]) -> Result<CompiledProblem, CompileError> {
    if priors.is_empty() {
        return Ok(cp);
    }
    let fluent_index: HashMap<&Atom, usize> = cp.key.fluents.iter().enumerate().map(|(i, a)| (a, i)).collect();
    let action_index: HashMap<&Atom, usize> = cp.key.actions.iter().enumerate().map(|(i, a)| (a, i)).collect();
    let n = cp.key.n;
    let m = cp.key.m;
    let lay = &cp.layout;
    let mut slots: Vec<(FluentId, FluentId, String)> = Vec::with_capacity(priors.len());
    for p in priors {
        let (controller, state) = match p {
            Prior::Cond { controller, state, .. }
            | Prior::Act { controller, state, .. }
            | Prior::Succ { controller, state, .. }
            | Prior::Call { controller, state, .. } => (*controller, *state),
        };
        if controller >= m || state >= n {
            return Err(CompileError::InvalidParams(format!(
                "prior {p:?} addresses controller {controller} state {state} outside m={m}, n={n}"
            )));
        }
        let slot = match p {
            Prior::Cond { fluent, .. } => {
                let f = *fluent_index.get(fluent).ok_or_else(|| CompileError::UnknownName(fluent.to_string()))?;
                (lay.nocond(controller, state), lay.cond(controller, state, f), format!("cond c{controller} q{state}"))
            }
            Prior::Act { branch, action, .. } => {
                let a = *action_index.get(action).ok_or_else(|| CompileError::UnknownName(action.to_string()))?;
                (
                    lay.noact(controller, state, *branch),
                    lay.act(controller, state, *branch, a),
                    format!("action c{controller} q{state} b{}", *branch as u8),
                )
            }
            Prior::Succ { branch, next, .. } => {
                if *next > n {
                    return Err(CompileError::InvalidParams(format!("prior successor {next} exceeds n={n}")));
                }
                (
                    lay.nosucc(controller, state, *branch),
                    lay.succ(controller, state, *branch, *next),
                    format!("successor c{controller} q{state} b{}", *branch as u8),
                )
            }
            Prior::Call { branch, callee, args, .. } => {
                if !cp.key.hierarchical {
                    return Err(CompileError::InvalidParams("calls need a hierarchical compilation".into()));
                }
                if *callee >= m || cp.key.controller_params[*callee].len() != args.len() {
                    return Err(CompileError::InvalidParams(format!("prior call to c{callee} has bad arity")));
                }
                let tuple = args
                    .iter()
                    .map(|v| {
                        cp.key.variables.iter().position(|x| x == v).ok_or_else(|| CompileError::UnknownName(v.clone()))
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                let t = tuple_index(&tuple, cp.key.variables.len());
                (
                    lay.noact(controller, state, *branch),
                    lay.call(controller, state, *branch, *callee, t),
                    format!("action c{controller} q{state} b{}", *branch as u8),
                )
            }
        };
        slots.push(slot);
    }
    let init = &mut cp.problem.init;
    for (marker, programmed, what) in slots {
        if !init.get(marker) && !init.get(programmed) {
            return Err(CompileError::PriorConflict(format!("{what} is programmed twice with different values")));
        }
        init.set(marker, false);
        init.set(programmed, true);
    }
    for p in priors {
        if !cp.key.priors.contains(p) {
            cp.key.priors.push(p.clone());
        }
    }
    Ok(cp)
}

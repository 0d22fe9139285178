//! Hierarchical finite state controllers.
//!
//! Every controller in a [`Hierarchy`] shares the state set `q_0..q_n`, where
//! `q_n` is terminal. A controller state `q` tests one fluent (`gamma`); the
//! outcome `b` selects a [`Transition`] holding the successor state and the
//! instruction to run, either a primitive action or a call to another
//! controller with variable-object arguments.
//!
//! Conditions and actions are stored by name so a hierarchy synthesized on one
//! set of instances can be executed on problems with a larger object universe.

mod dot;
mod exec;
mod io;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{ActionId, Atom, FluentId, Problem};

pub use dot::to_dot;
pub use exec::{
    execute, execute_bound, solves, step, Configuration, ExecutionTrace, Limits, StackFrame, StepError, StepEvent,
    TraceStep, Verdict,
};
pub use io::{load, save, FORMAT_TAG};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FscError {
    #[error("invalid hierarchy: {0}")]
    Invalid(String),
    #[error("condition {0} does not name a fluent of the problem")]
    UnknownFluent(Atom),
    #[error("action {0} does not name an action of the problem")]
    UnknownAction(Atom),
    #[error("unknown variable object {0}")]
    UnknownVariable(String),
    #[error("the problem declares no assignment fluents but the hierarchy passes parameters")]
    MissingAssignments,
    #[error("format error at {path}: {msg}")]
    Format { path: String, msg: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Instruction {
    Action(Atom),
    Call { controller: usize, args: Vec<String> },
}

impl Instruction {
    pub fn label(&self, h: &Hierarchy) -> String {
        match self {
            Instruction::Action(a) => a.to_string(),
            Instruction::Call { controller, args } => {
                let name = h.controllers.get(*controller).map(|c| c.name.as_str()).unwrap_or("?");
                format!("call {name}({})", args.join(", "))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Transition {
    pub next: usize,
    pub instruction: Instruction,
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Controller {
    pub name: String,
    pub params: Vec<String>,
    /// `Γ`: condition fluent per non-terminal state.
    pub gamma: BTreeMap<usize, Atom>,
    /// `Λ` and `Φ` keyed by `(state, branch)`.
    pub transitions: BTreeMap<(usize, bool), Transition>,
}

impl Controller {
    pub fn new(name: impl Into<String>, params: Vec<String>) -> Self {
        Controller { name: name.into(), params, ..Default::default() }
    }

    /// Sets `Γ(q)`, `Λ(q, b)` and `Φ(q, b)` in one go.
    pub fn set(&mut self, q: usize, condition: Atom, branch: bool, next: usize, instruction: Instruction) -> &mut Self {
        self.gamma.insert(q, condition);
        self.transitions.insert((q, branch), Transition { next, instruction });
        self
    }

    /// Non-terminal states with at least one programmed entry.
    pub fn used_states(&self) -> usize {
        self.gamma.len()
    }

    pub fn has_call_to(&self, j: usize) -> bool {
        self.transitions
            .values()
            .any(|t| matches!(&t.instruction, Instruction::Call { controller, .. } if *controller == j))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hierarchy {
    /// `n + 1`; state `n` is terminal.
    pub num_states: usize,
    pub controllers: Vec<Controller>,
    pub root: usize,
    pub variables: Vec<String>,
    pub values: Vec<String>,
}

impl Hierarchy {
    pub fn new(num_states: usize, controllers: Vec<Controller>) -> Self {
        Hierarchy { num_states, controllers, root: 0, variables: Vec::new(), values: Vec::new() }
    }

    pub fn terminal(&self) -> usize {
        self.num_states - 1
    }

    pub fn is_recursive(&self) -> bool {
        self.controllers.iter().enumerate().any(|(i, c)| c.has_call_to(i))
    }

    pub fn validate(&self) -> Result<(), FscError> {
        let bad = |m: String| Err(FscError::Invalid(m));
        if self.controllers.is_empty() {
            return bad("hierarchy has no controllers".into());
        }
        if self.num_states == 0 {
            return bad("controllers need at least one state".into());
        }
        if self.root >= self.controllers.len() {
            return bad(format!("root {} does not exist", self.root));
        }
        let term = self.terminal();
        for (i, c) in self.controllers.iter().enumerate() {
            for &q in c.gamma.keys() {
                if q >= term {
                    return bad(format!("{}: condition on terminal or out-of-range state {q}", c.name));
                }
            }
            for (&(q, b), t) in &c.transitions {
                if q >= term {
                    return bad(format!("{}: transition out of terminal or out-of-range state {q}", c.name));
                }
                if !c.gamma.contains_key(&q) {
                    return bad(format!("{}: state {q} branch {} has no condition", c.name, b as u8));
                }
                if t.next >= self.num_states {
                    return bad(format!("{}: successor {} out of range", c.name, t.next));
                }
                if let Instruction::Call { controller, args } = &t.instruction {
                    let Some(callee) = self.controllers.get(*controller) else {
                        return bad(format!("{}: call to missing controller {controller}", c.name));
                    };
                    if callee.params.len() != args.len() {
                        return bad(format!(
                            "{} (controller {i}): call to {} passes {} arguments, expected {}",
                            c.name,
                            callee.name,
                            args.len(),
                            callee.params.len()
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    /// Resolves names against `p`.
    pub fn bind(&self, p: &Problem) -> Result<BoundHierarchy, FscError> {
        self.validate()?;
        let var_index = |v: &str| -> Result<usize, FscError> {
            let space = p.assignments.as_ref().ok_or(FscError::MissingAssignments)?;
            space.variable_index(v).ok_or_else(|| FscError::UnknownVariable(v.to_string()))
        };
        let mut action_index = std::collections::HashMap::new();
        for (i, a) in p.actions.iter().enumerate() {
            action_index.insert(&a.name, ActionId(i as u32));
        }
        let mut controllers = Vec::with_capacity(self.controllers.len());
        for c in &self.controllers {
            let mut gamma = vec![None; self.num_states];
            for (&q, f) in &c.gamma {
                gamma[q] = Some(p.fluents.id(f).ok_or_else(|| FscError::UnknownFluent(f.clone()))?);
            }
            let mut table = vec![[None, None]; self.num_states];
            for (&(q, b), t) in &c.transitions {
                let instruction = match &t.instruction {
                    Instruction::Action(a) => {
                        BoundInstruction::Action(*action_index.get(a).ok_or_else(|| FscError::UnknownAction(a.clone()))?)
                    }
                    Instruction::Call { controller, args } => BoundInstruction::Call {
                        controller: *controller,
                        args: args.iter().map(|v| var_index(v)).collect::<Result<_, _>>()?,
                    },
                };
                table[q][b as usize] = Some((t.next, instruction));
            }
            let params = if c.params.is_empty() {
                Vec::new()
            } else {
                c.params.iter().map(|v| var_index(v)).collect::<Result<_, _>>()?
            };
            controllers.push(BoundController { gamma, table, params });
        }
        let assignment_fluents = p.assignments.as_ref().map(|s| s.fluents().collect()).unwrap_or_default();
        Ok(BoundHierarchy { terminal: self.terminal(), root: self.root, controllers, assignment_fluents })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BoundInstruction {
    Action(ActionId),
    Call { controller: usize, args: Vec<usize> },
}

#[derive(Clone, Debug)]
pub struct BoundController {
    pub gamma: Vec<Option<FluentId>>,
    pub table: Vec<[Option<(usize, BoundInstruction)>; 2]>,
    pub params: Vec<usize>,
}

/// A hierarchy whose names are resolved against one problem's tables.
#[derive(Clone, Debug)]
pub struct BoundHierarchy {
    pub terminal: usize,
    pub root: usize,
    pub controllers: Vec<BoundController>,
    pub assignment_fluents: Vec<FluentId>,
}

impl fmt::Display for Hierarchy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.controllers {
            writeln!(f, "{}[{}]:", c.name, c.params.join(", "))?;
            for (&(q, b), t) in &c.transitions {
                writeln!(
                    f,
                    "  q{q} --{}/{}: {}--> q{}",
                    c.gamma[&q],
                    b as u8,
                    t.instruction.label(self),
                    t.next
                )?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pddl::{ground, parse_domain, parse_problem};

    const DOMAIN: &str = "(define (domain ptr) (:requirements :typing :negative-preconditions :conditional-effects)
      (:types var node)
      (:constants a b - var)
      (:predicates (assign ?v - var ?x - node) (next ?x ?y - node) (mark ?x - node) (flag))
      (:derived (null ?v - var) (forall (?x - node) (not (assign ?v ?x))))
      (:action touch :parameters (?v - var)
        :effect (and (forall (?x - node) (when (assign ?v ?x) (mark ?x)))))
      (:action advance :parameters (?v - var)
        :effect (and (forall (?x ?y - node) (when (and (assign ?v ?x) (next ?x ?y)) (assign ?v ?y)))
                     (forall (?x - node) (when (assign ?v ?x) (not (assign ?v ?x))))))
      (:action raise :parameters () :effect (and (flag))))";

    fn problem(goal: &str) -> Problem {
        let d = parse_domain(DOMAIN).unwrap();
        let p = parse_problem(&format!(
            "(define (problem p) (:domain ptr) (:objects x1 x2 x3 - node)
              (:init (assign a x1) (assign b x2) (next x1 x2) (next x2 x3)) (:goal (and {goal})))"
        ))
        .unwrap();
        ground(&d, &p).unwrap()
    }

    fn act(s: &str) -> Instruction {
        Instruction::Action(s.parse().unwrap())
    }

    fn cond(s: &str) -> Atom {
        s.parse().unwrap()
    }

    #[test]
    fn terminal_root_solves_trivial_goal() {
        let h = Hierarchy::new(1, vec![Controller::new("c", vec![])]);
        let t = execute(&h, &problem(""), Limits::default()).unwrap();
        assert_eq!(t.verdict, Verdict::Solved);
        assert_eq!(t.configurations.len(), 1);
        let t = execute(&h, &problem("(flag)"), Limits::default()).unwrap();
        assert_eq!(t.verdict, Verdict::GoalUnsatisfied);
    }

    #[test]
    fn self_loop_is_detected_as_revisit() {
        let mut c = Controller::new("c", vec![]);
        c.set(0, cond("(flag)"), false, 0, act("(raise)"));
        c.set(0, cond("(flag)"), true, 0, act("(raise)"));
        let h = Hierarchy::new(2, vec![c]);
        let t = execute(&h, &problem("(flag)"), Limits::default()).unwrap();
        assert_eq!(t.verdict, Verdict::RevisitedConfiguration);
        assert_eq!(t.configurations.len(), 3);
    }

    #[test]
    fn missing_branch_is_undefined() {
        let mut c = Controller::new("c", vec![]);
        c.set(0, cond("(flag)"), true, 1, act("(raise)"));
        let t = execute(&Hierarchy::new(2, vec![c]), &problem(""), Limits::default()).unwrap();
        assert_eq!(t.verdict, Verdict::UndefinedTransition);
    }

    fn caller_callee() -> Hierarchy {
        // root calls walker(b) once; walker marks and advances b until null
        let mut root = Controller::new("root", vec![]);
        root.set(0, cond("(flag)"), false, 2, Instruction::Call { controller: 1, args: vec!["b".into()] });
        let mut w = Controller::new("walker", vec!["a".into()]);
        w.set(0, cond("(null a)"), false, 1, act("(touch a)"));
        w.set(0, cond("(null a)"), true, 2, act("(raise)"));
        w.set(1, cond("(null a)"), false, 0, act("(advance a)"));
        let mut h = Hierarchy::new(3, vec![root, w]);
        h.variables = vec!["a".into(), "b".into()];
        h
    }

    #[test]
    fn call_copies_arguments_and_return_restores_bindings() {
        let p = problem("(mark x2) (mark x3)");
        let h = caller_callee();
        let t = execute(&h, &p, Limits::with_stack(1)).unwrap();
        assert_eq!(t.verdict, Verdict::Solved, "{:?}", t.steps);
        let f = |s: &str| p.fluents.id(&cond(s)).unwrap();
        let first_inner = &t.configurations[1];
        assert_eq!(first_inner.level, 1);
        assert!(first_inner.world.get(f("(assign a x2)")));
        assert!(!first_inner.world.get(f("(assign b x2)")));
        assert!(!first_inner.world.get(f("(assign a x1)")));
        let end = t.final_state();
        assert!(end.get(f("(assign a x1)")) && end.get(f("(assign b x2)")));
        assert!(end.get(f("(flag)")), "callee side effects survive the return");
        assert_eq!(t.max_level(), 1);
    }

    #[test]
    fn stack_bound_is_enforced() {
        let t = execute(&caller_callee(), &problem(""), Limits::with_stack(0)).unwrap();
        assert_eq!(t.verdict, Verdict::StackOverflow);
    }

    #[test]
    fn bind_rejects_unknown_names() {
        let mut c = Controller::new("c", vec![]);
        c.set(0, cond("(nothing)"), true, 1, act("(raise)"));
        let err = Hierarchy::new(2, vec![c]).bind(&problem("")).unwrap_err();
        assert!(matches!(err, FscError::UnknownFluent(_)));
    }

    #[test]
    fn validate_checks_call_arity() {
        let mut h = caller_callee();
        h.controllers[0].transitions.get_mut(&(0, false)).unwrap().instruction =
            Instruction::Call { controller: 1, args: vec![] };
        assert!(h.validate().is_err());
    }

    #[test]
    fn save_load_round_trip() {
        let h = caller_callee();
        let text = save(&h);
        assert_eq!(load(&text).unwrap(), h);
        assert_eq!(save(&load(&text).unwrap()), text);
    }

    #[test]
    fn load_reports_paths() {
        let empty = r#"{"format":"hfsc-v1","states":2,"controllers":[]}"#;
        assert!(matches!(load(empty), Err(FscError::Format { path, .. }) if path == "controllers"));
        let bad = r#"{"format":"hfsc-v1","states":2,"controllers":[{"name":"c","conditions":{"0":"(flag)"},
            "transitions":[{"from":0,"branch":1,"to":"x","action":"(raise)"}]}]}"#;
        match load(bad) {
            Err(FscError::Format { path, .. }) => assert_eq!(path, "controllers[0].transitions[0].to"),
            other => panic!("{other:?}"),
        }
        let tag = r#"{"format":"v0","states":2,"controllers":[{"name":"c"}]}"#;
        assert!(matches!(load(tag), Err(FscError::Format { path, .. }) if path == "format"));
    }

    #[test]
    fn dot_shapes() {
        let single = Hierarchy::new(1, vec![Controller::new("c", vec![])]);
        let d = to_dot(&single);
        assert_eq!(d.matches("[label=\"Q").count(), 1);
        assert_eq!(d.matches("->").count(), 0);
        let two = to_dot(&caller_callee());
        assert_eq!(two.matches("subgraph cluster_").count(), 2);
        assert!(two.contains("(null a)/1: (raise)"));
        assert_eq!(two, to_dot(&caller_callee()));
    }
}

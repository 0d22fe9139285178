use std::collections::HashSet;

use super::{BoundHierarchy, BoundInstruction, FscError, Hierarchy, Instruction};
use crate::model::{ActionId, FluentId, GeneralizedProblem, Problem, State};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    /// Maximum stack level `ℓ`; at most `ℓ + 1` frames are live.
    pub max_stack: usize,
    pub step_budget: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_stack: 64, step_budget: 1_000_000 }
    }
}

impl Limits {
    pub fn with_stack(max_stack: usize) -> Self {
        Limits { max_stack, ..Default::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct StackFrame {
    pub controller: usize,
    pub state: usize,
    /// Branch of an outstanding call; `Λ` is applied to it on return.
    pub pending: Option<bool>,
    /// Assignment fluents that held on this level when the outstanding call was made.
    pub saved: Vec<FluentId>,
}

impl StackFrame {
    pub fn new(controller: usize) -> Self {
        StackFrame { controller, state: 0, pending: None, saved: Vec::new() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StepEvent {
    Primitive { branch: bool, action: ActionId },
    Call { branch: bool, callee: usize },
    Return { callee: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, thiserror::Error)]
pub enum StepError {
    #[error("no transition defined")]
    UndefinedTransition,
    #[error("action precondition does not hold")]
    InapplicableAction,
    #[error("call exceeds the stack bound")]
    StackOverflow,
    #[error("execution already terminated")]
    Terminated,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Configuration {
    pub level: usize,
    pub controller: usize,
    pub state: usize,
    pub world: State,
}

/// One executed controller transition (returns are not listed).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceStep {
    pub level: usize,
    pub controller: usize,
    pub state: usize,
    pub branch: bool,
    pub instruction: Instruction,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Solved,
    GoalUnsatisfied,
    RevisitedConfiguration,
    StackOverflow,
    StepBudgetExhausted,
    UndefinedTransition,
    InapplicableAction,
}

impl Verdict {
    pub fn is_solved(self) -> bool {
        self == Verdict::Solved
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExecutionTrace {
    pub configurations: Vec<Configuration>,
    pub steps: Vec<TraceStep>,
    pub verdict: Verdict,
}

impl ExecutionTrace {
    pub fn final_state(&self) -> &State {
        &self.configurations.last().expect("a trace has at least one configuration").world
    }

    pub fn max_level(&self) -> usize {
        self.configurations.iter().map(|c| c.level).max().unwrap_or(0)
    }
}

/// Performs one transition of the frame stack, mutating `frames` and `s` in place.
/// On error nothing is modified.
pub fn step(
    h: &BoundHierarchy,
    p: &Problem,
    frames: &mut Vec<StackFrame>,
    s: &mut State,
    max_stack: usize,
) -> Result<StepEvent, StepError> {
    let top = frames.last().ok_or(StepError::Terminated)?;
    if top.state == h.terminal {
        if frames.len() == 1 {
            return Err(StepError::Terminated);
        }
        let callee = top.controller;
        let caller = &frames[frames.len() - 2];
        let branch = caller.pending.ok_or(StepError::UndefinedTransition)?;
        let next = match &h.controllers[caller.controller].table[caller.state][branch as usize] {
            Some((next, _)) => *next,
            None => return Err(StepError::UndefinedTransition),
        };
        frames.pop();
        let caller = frames.last_mut().unwrap();
        for &f in &h.assignment_fluents {
            s.set(f, false);
        }
        for &f in &caller.saved {
            s.set(f, true);
        }
        caller.saved.clear();
        caller.pending = None;
        caller.state = next;
        return Ok(StepEvent::Return { callee });
    }
    let c = &h.controllers[top.controller];
    let cond = c.gamma[top.state].ok_or(StepError::UndefinedTransition)?;
    let branch = p.fluents.holds(s, cond);
    let (next, instr) = c.table[top.state][branch as usize].as_ref().ok_or(StepError::UndefinedTransition)?;
    match instr {
        BoundInstruction::Action(a) => {
            let action = p.action(*a);
            if !action.applicable(s) {
                return Err(StepError::InapplicableAction);
            }
            *s = action.apply_unchecked(s, p.effect_mode).map_err(|_| StepError::InapplicableAction)?;
            frames.last_mut().unwrap().state = *next;
            Ok(StepEvent::Primitive { branch, action: *a })
        }
        BoundInstruction::Call { controller, args } => {
            if frames.len() > max_stack {
                return Err(StepError::StackOverflow);
            }
            let callee = &h.controllers[*controller];
            let saved: Vec<FluentId> = h.assignment_fluents.iter().copied().filter(|&f| s.get(f)).collect();
            // binding guarantees an assignment space whenever arguments are passed
            let copies: Vec<(usize, Vec<usize>)> = match p.assignments.as_ref() {
                Some(space) => {
                    callee.params.iter().zip(args).map(|(&l, &a)| (l, space.values_of(s, a).collect())).collect()
                }
                None => Vec::new(),
            };
            for &f in &saved {
                s.set(f, false);
            }
            if let Some(space) = p.assignments.as_ref() {
                for (l, xs) in copies {
                    for x in xs {
                        if let Some(f) = space.fluent(l, x) {
                            s.set(f, true);
                        }
                    }
                }
            }
            let callee_id = *controller;
            let frame = frames.last_mut().unwrap();
            frame.pending = Some(branch);
            frame.saved = saved;
            frames.push(StackFrame::new(callee_id));
            Ok(StepEvent::Call { branch, callee: callee_id })
        }
    }
}

fn configuration(frames: &[StackFrame], s: &State) -> Configuration {
    let top = frames.last().unwrap();
    Configuration { level: frames.len() - 1, controller: top.controller, state: top.state, world: s.clone() }
}

/// Runs a bound hierarchy from `(q_0, I)` on level 0 until it terminates or fails.
pub fn execute_bound(h: &Hierarchy, b: &BoundHierarchy, p: &Problem, limits: Limits) -> ExecutionTrace {
    let mut frames = vec![StackFrame::new(b.root)];
    let mut s = p.init.clone();
    let mut configurations = vec![configuration(&frames, &s)];
    let mut steps = Vec::new();
    let mut seen: HashSet<(Vec<StackFrame>, State)> = HashSet::new();
    seen.insert((frames.clone(), s.clone()));
    let mut transitions = 0usize;
    let verdict = loop {
        if frames.len() == 1 && frames[0].state == b.terminal {
            break if p.goal_satisfied(&s) { Verdict::Solved } else { Verdict::GoalUnsatisfied };
        }
        if transitions >= limits.step_budget {
            break Verdict::StepBudgetExhausted;
        }
        let before = frames.last().unwrap().clone();
        let level = frames.len() - 1;
        match step(b, p, &mut frames, &mut s, limits.max_stack) {
            Ok(ev) => {
                let src = &h.controllers[before.controller];
                match ev {
                    StepEvent::Primitive { branch, .. } | StepEvent::Call { branch, .. } => {
                        steps.push(TraceStep {
                            level,
                            controller: before.controller,
                            state: before.state,
                            branch,
                            instruction: src.transitions[&(before.state, branch)].instruction.clone(),
                        });
                    }
                    StepEvent::Return { .. } => {}
                }
            }
            Err(StepError::UndefinedTransition) => break Verdict::UndefinedTransition,
            Err(StepError::InapplicableAction) => break Verdict::InapplicableAction,
            Err(StepError::StackOverflow) => break Verdict::StackOverflow,
            Err(StepError::Terminated) => unreachable!("termination is checked before stepping"),
        }
        transitions += 1;
        configurations.push(configuration(&frames, &s));
        if !seen.insert((frames.clone(), s.clone())) {
            break Verdict::RevisitedConfiguration;
        }
    };
    ExecutionTrace { configurations, steps, verdict }
}

pub fn execute(h: &Hierarchy, p: &Problem, limits: Limits) -> Result<ExecutionTrace, FscError> {
    let b = h.bind(p)?;
    Ok(execute_bound(h, &b, p, limits))
}

/// Executes `h` on every instance of `gp` in order.
pub fn solves(h: &Hierarchy, gp: &GeneralizedProblem, limits: Limits) -> Result<Vec<Verdict>, FscError> {
    if gp.is_empty() {
        return Ok(Vec::new());
    }
    let b = h.bind(&gp.instance(0))?;
    Ok(gp.problems().map(|p| execute_bound(h, &b, &p, limits).verdict).collect())
}

//! Visit every cell of a square grid, starting in the north-west corner.
//!
//! The grid is swept row by row: east along a row, back west, then one row south.
//! `at-east`, `at-west` and `at-south` track whether the agent is on the east column,
//! west column or south row.

use super::{problem_text, requirements, InstanceData};
use crate::fsc::{Controller, Hierarchy, Instruction};
use crate::model::Atom;

pub(super) fn domain() -> String {
    format!(
        "(define (domain visitall)
  {}
  (:types col row)
  (:predicates (at-east) (at-west) (at-south)
    (at-col ?c - col) (at-row ?r - row) (visited ?c - col ?r - row)
    (succ-col ?c - col ?d - col) (succ-row ?r - row ?s - row)
    (first-col ?c - col) (last-col ?c - col) (last-row ?r - row))
  (:action right
    :parameters ()
    :effect (and
      (forall (?c - col ?d - col) (when (and (at-col ?c) (succ-col ?c ?d)) (and (not (at-col ?c)) (at-col ?d) (not (at-west)))))
      (forall (?c - col ?d - col) (when (and (at-col ?c) (succ-col ?c ?d) (last-col ?d)) (at-east)))))
  (:action left
    :parameters ()
    :effect (and
      (forall (?c - col ?d - col) (when (and (at-col ?d) (succ-col ?c ?d)) (and (not (at-col ?d)) (at-col ?c) (not (at-east)))))
      (forall (?c - col ?d - col) (when (and (at-col ?d) (succ-col ?c ?d) (first-col ?c)) (at-west)))))
  (:action down
    :parameters ()
    :effect (and
      (forall (?r - row ?s - row) (when (and (at-row ?r) (succ-row ?r ?s)) (and (not (at-row ?r)) (at-row ?s))))
      (forall (?r - row ?s - row) (when (and (at-row ?r) (succ-row ?r ?s) (last-row ?s)) (at-south)))))
  (:action visit
    :parameters ()
    :effect (forall (?c - col ?r - row) (when (and (at-col ?c) (at-row ?r)) (visited ?c ?r)))))
",
        requirements(false)
    )
}

pub(super) fn problem(t: usize, max: usize, data: &InstanceData) -> String {
    let InstanceData::Visitall { side, visited } = data else { unreachable!() };
    let side = *side;
    let mut objects: Vec<(String, &str)> = (1..=max).map(|k| (format!("c{k}"), "col")).collect();
    objects.extend((1..=max).map(|k| (format!("r{k}"), "row")));
    let mut init = vec!["(at-col c1)".to_string(), "(at-row r1)".to_string(), "(at-west)".to_string()];
    init.push("(first-col c1)".to_string());
    init.push(format!("(last-col c{side})"));
    init.push(format!("(last-row r{side})"));
    if side == 1 {
        init.push("(at-east)".to_string());
        init.push("(at-south)".to_string());
    }
    for k in 1..side {
        init.push(format!("(succ-col c{k} c{})", k + 1));
        init.push(format!("(succ-row r{k} r{})", k + 1));
    }
    for &(c, r) in visited {
        init.push(format!("(visited c{} r{})", c + 1, r + 1));
    }
    let mut goal = Vec::new();
    for c in 1..=side {
        for r in 1..=side {
            goal.push(format!("(visited c{c} r{r})"));
        }
    }
    problem_text(&format!("visitall-{}", t + 1), "visitall", &objects, &init, &goal)
}

pub(super) fn oracle(side: usize) -> Vec<String> {
    let mut out = Vec::new();
    for r in 0..side {
        for c in 0..side {
            out.push("(visit)".to_string());
            if c + 1 < side {
                out.push("(right)".to_string());
            }
        }
        if r + 1 < side {
            out.extend(std::iter::repeat_n("(left)".to_string(), side - 1));
            out.push("(down)".to_string());
        }
    }
    out
}

fn act(s: &str) -> Instruction {
    Instruction::Action(s.parse().unwrap())
}

/// Visits cells eastwards until the east column has been visited. Uses states 0 and 1;
/// `terminal` is the terminal state of the enclosing hierarchy.
pub fn row_sweep(terminal: usize) -> Controller {
    let east: Atom = "(at-east)".parse().unwrap();
    let mut c = Controller::new("sweep", vec![]);
    c.set(0, east.clone(), false, 1, act("(visit)"));
    c.set(0, east.clone(), true, terminal, act("(visit)"));
    c.set(1, east, false, 0, act("(right)"));
    c
}

/// Walks west to the first column, then one row south. Uses state 0.
pub fn column_return(terminal: usize) -> Controller {
    let west: Atom = "(at-west)".parse().unwrap();
    let mut c = Controller::new("return", vec![]);
    c.set(0, west.clone(), false, 0, act("(left)"));
    c.set(0, west, true, terminal, act("(down)"));
    c
}

/// A hierarchy with `n` states: an empty root plus the two sub-controllers above.
pub fn visitall_priors(n: usize) -> Hierarchy {
    Hierarchy::new(n + 1, vec![Controller::new("root", vec![]), row_sweep(n), column_return(n)])
}

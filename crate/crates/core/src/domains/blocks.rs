//! Uncover the green block of a single tower.
//!
//! `unstack` always takes the top block. `top-green` tracks whether the current top is
//! green, so the task reduces to unstack and put away until it holds.

use super::{problem_text, requirements, InstanceData};

pub(super) fn domain() -> String {
    format!(
        "(define (domain blocks)
  {}
  (:types block)
  (:predicates (on ?x - block ?y - block) (ontable ?x - block) (clear ?x - block) (holding ?x - block)
    (green ?x - block) (away ?x - block) (handempty) (top-green))
  (:action unstack
    :parameters ()
    :precondition (handempty)
    :effect (and
      (forall (?x - block ?y - block)
        (when (and (clear ?x) (on ?x ?y))
          (and (holding ?x) (clear ?y) (not (on ?x ?y)) (not (clear ?x)) (not (handempty)))))
      (forall (?x - block ?y - block)
        (when (and (clear ?x) (on ?x ?y) (green ?y)) (top-green)))
      (forall (?x - block ?y - block)
        (when (and (clear ?x) (on ?x ?y) (not (green ?y))) (not (top-green))))
      (forall (?x - block)
        (when (and (clear ?x) (ontable ?x))
          (and (holding ?x) (not (ontable ?x)) (not (clear ?x)) (not (handempty)) (not (top-green)))))))
  (:action putaway
    :parameters ()
    :precondition (not (handempty))
    :effect (forall (?x - block) (when (holding ?x) (and (not (holding ?x)) (away ?x) (handempty))))))
",
        requirements(false)
    )
}

/// Blocks `b1` (top) to `b<height>` (bottom); block `green` (0-based from the top) is green.
pub(super) fn problem(t: usize, max: usize, data: &InstanceData) -> String {
    let InstanceData::Blocks { height, green } = *data else { unreachable!() };
    let objects: Vec<(String, &str)> = (1..=max).map(|i| (format!("b{i}"), "block")).collect();
    let mut init = vec!["(handempty)".to_string(), "(clear b1)".to_string(), format!("(ontable b{height})")];
    for i in 1..height {
        init.push(format!("(on b{i} b{})", i + 1));
    }
    init.push(format!("(green b{})", green + 1));
    let goal = vec!["(top-green)".to_string(), "(handempty)".to_string()];
    problem_text(&format!("blocks-{}", t + 1), "blocks", &objects, &init, &goal)
}

pub(super) fn oracle(green: usize) -> Vec<String> {
    (0..green).flat_map(|_| ["(unstack)".to_string(), "(putaway)".to_string()]).collect()
}

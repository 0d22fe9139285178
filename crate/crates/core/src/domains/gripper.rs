//! Carry every ball from room a to room b, one at a time.
//!
//! Balls leave room a in a fixed order: `top-a` marks the next one and `empty-a`
//! holds once the last has been picked.

use super::{problem_text, requirements, InstanceData};

pub(super) fn domain() -> String {
    format!(
        "(define (domain gripper)
  {}
  (:types ball)
  (:predicates (at-a ?b - ball) (at-b ?b - ball) (carry ?b - ball) (top-a ?b - ball)
    (succ-ball ?b - ball ?c - ball) (last-ball ?b - ball)
    (free) (robot-at-a) (robot-at-b) (empty-a))
  (:action pick
    :parameters ()
    :precondition (and (free) (robot-at-a) (not (empty-a)))
    :effect (and
      (not (free))
      (forall (?b - ball) (when (top-a ?b) (and (carry ?b) (not (at-a ?b)) (not (top-a ?b)))))
      (forall (?b - ball ?c - ball) (when (and (top-a ?b) (succ-ball ?b ?c)) (top-a ?c)))
      (forall (?b - ball) (when (and (top-a ?b) (last-ball ?b)) (empty-a)))))
  (:action move
    :parameters ()
    :effect (and
      (when (robot-at-a) (and (not (robot-at-a)) (robot-at-b)))
      (when (robot-at-b) (and (not (robot-at-b)) (robot-at-a)))))
  (:action drop
    :parameters ()
    :precondition (and (robot-at-b) (not (free)))
    :effect (and
      (free)
      (forall (?b - ball) (when (carry ?b) (and (not (carry ?b)) (at-b ?b)))))))
",
        requirements(false)
    )
}

pub(super) fn problem(t: usize, max: usize, data: &InstanceData) -> String {
    let InstanceData::Gripper { balls } = *data else { unreachable!() };
    let objects: Vec<(String, &str)> = (1..=max).map(|i| (format!("b{i}"), "ball")).collect();
    let mut init = vec!["(free)".to_string(), "(robot-at-a)".to_string(), "(top-a b1)".to_string()];
    for i in 1..=balls {
        init.push(format!("(at-a b{i})"));
        if i < balls {
            init.push(format!("(succ-ball b{i} b{})", i + 1));
        }
    }
    init.push(format!("(last-ball b{balls})"));
    let goal: Vec<String> = (1..=balls).map(|i| format!("(at-b b{i})")).collect();
    problem_text(&format!("gripper-{}", t + 1), "gripper", &objects, &init, &goal)
}

pub(super) fn oracle(balls: usize) -> Vec<String> {
    let mut out = Vec::new();
    for i in 0..balls {
        out.extend(["(pick)", "(move)", "(drop)"].map(String::from));
        if i + 1 < balls {
            out.push("(move)".to_string());
        }
    }
    out
}

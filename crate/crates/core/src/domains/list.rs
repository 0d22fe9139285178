//! Visit every node of a linked list through a single pointer `n`.

use super::{problem_text, requirements, InstanceData};

pub(super) fn domain() -> String {
    format!(
        "(define (domain list)
  {}
  (:types var node)
  (:constants n - var)
  (:predicates (assign ?v - var ?x - node) (next ?x - node ?y - node) (visited ?x - node))
  (:derived (null ?v - var) (forall (?x - node) (not (assign ?v ?x))))
  (:action visit
    :parameters (?v - var)
    :effect (forall (?x - node) (when (assign ?v ?x) (visited ?x))))
  (:action step
    :parameters (?v - var)
    :effect (and
      (forall (?x - node ?y - node) (when (and (assign ?v ?x) (next ?x ?y)) (assign ?v ?y)))
      (forall (?x - node) (when (assign ?v ?x) (not (assign ?v ?x)))))))
",
        requirements(true)
    )
}

pub(super) fn problem(t: usize, max: usize, data: &InstanceData) -> String {
    let InstanceData::List { len } = *data else { unreachable!() };
    let objects: Vec<(String, &str)> = (1..=max).map(|i| (format!("x{i}"), "node")).collect();
    let mut init = vec!["(assign n x1)".to_string()];
    for i in 1..len {
        init.push(format!("(next x{i} x{})", i + 1));
    }
    let goal: Vec<String> = (1..=len).map(|i| format!("(visited x{i})")).collect();
    problem_text(&format!("list-{}", t + 1), "list", &objects, &init, &goal)
}

pub(super) fn oracle(len: usize) -> Vec<String> {
    let mut out = Vec::new();
    for i in 0..len {
        out.push("(visit n)".to_string());
        if i + 1 < len {
            out.push("(step n)".to_string());
        }
    }
    out
}

//! Reverse a list in place with two pointers `i` (forward) and `j` (backward).
//!
//! `crossed` is set once the pointers meet or pass each other.

use super::{problem_text, requirements, InstanceData};

pub(super) fn domain() -> String {
    format!(
        "(define (domain reverse)
  {}
  (:types var cell val)
  (:constants i j - var)
  (:predicates (assign ?v - var ?x - cell) (content ?c - cell ?x - val) (succ ?c - cell ?d - cell) (crossed))
  (:action swap
    :parameters ()
    :effect (forall (?x - cell ?y - cell ?v - val ?w - val)
      (when (and (assign i ?x) (assign j ?y) (content ?x ?v) (content ?y ?w) (not (= ?x ?y)))
        (and (not (content ?x ?v)) (content ?x ?w) (not (content ?y ?w)) (content ?y ?v)))))
  (:action inc
    :parameters ()
    :effect (and
      (forall (?x - cell ?y - cell) (when (and (assign i ?x) (succ ?x ?y)) (and (not (assign i ?x)) (assign i ?y))))
      (forall (?x - cell ?y - cell) (when (and (assign i ?x) (succ ?x ?y) (assign j ?y)) (crossed)))
      (forall (?x - cell) (when (and (assign i ?x) (assign j ?x)) (crossed)))))
  (:action dec
    :parameters ()
    :effect (and
      (forall (?x - cell ?y - cell) (when (and (assign j ?y) (succ ?x ?y)) (and (not (assign j ?y)) (assign j ?x))))
      (forall (?x - cell ?y - cell) (when (and (assign j ?y) (succ ?x ?y) (assign i ?x)) (crossed)))
      (forall (?x - cell) (when (and (assign i ?x) (assign j ?x)) (crossed))))))
",
        requirements(false)
    )
}

pub(super) fn problem(t: usize, max: usize, data: &InstanceData) -> String {
    let InstanceData::Reverse { len } = *data else { unreachable!() };
    let mut objects: Vec<(String, &str)> = (1..=max).map(|k| (format!("c{k}"), "cell")).collect();
    objects.extend((1..=max).map(|k| (format!("v{k}"), "val")));
    let mut init = vec!["(assign i c1)".to_string(), format!("(assign j c{len})")];
    for k in 1..=len {
        init.push(format!("(content c{k} v{k})"));
        if k < len {
            init.push(format!("(succ c{k} c{})", k + 1));
        }
    }
    if len == 1 {
        init.push("(crossed)".to_string());
    }
    let goal: Vec<String> = (1..=len).map(|k| format!("(content c{k} v{})", len + 1 - k)).collect();
    problem_text(&format!("reverse-{}", t + 1), "reverse", &objects, &init, &goal)
}

pub(super) fn oracle(len: usize) -> Vec<String> {
    (0..len / 2).flat_map(|_| ["(swap)", "(inc)", "(dec)"].map(String::from)).collect()
}

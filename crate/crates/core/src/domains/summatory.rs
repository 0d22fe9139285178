//! Compute 1 + 2 + ... + k into `acc` by repeatedly adding and decrementing `i`.

use std::fmt::Write;

use super::{problem_text, requirements, InstanceData};

pub(super) fn domain(max_sum: usize) -> String {
    let mut nums = String::new();
    for x in 0..=max_sum {
        let _ = write!(nums, " n{x}");
    }
    let mut add = String::new();
    for y in 1..=max_sum {
        for x in 0..=max_sum - y {
            let _ = write!(
                add,
                "\n      (when (and (assign acc n{x}) (assign i n{y})) (and (not (assign acc n{x})) (assign acc n{})))",
                x + y
            );
        }
    }
    let mut dec = String::new();
    for y in 1..=max_sum {
        let _ = write!(dec, "\n      (when (assign i n{y}) (and (not (assign i n{y})) (assign i n{})))", y - 1);
    }
    format!(
        "(define (domain summatory)
  {}
  (:types var num)
  (:constants i acc - var{nums} - num)
  (:predicates (assign ?v - var ?x - num))
  (:action add
    :parameters ()
    :effect (and{add}))
  (:action dec
    :parameters ()
    :effect (and{dec})))
",
        requirements(false)
    )
}

pub(super) fn problem(t: usize, data: &InstanceData) -> String {
    let InstanceData::Summatory { input } = *data else { unreachable!() };
    let init = vec!["(assign acc n0)".to_string(), format!("(assign i n{input})")];
    let goal = vec![format!("(assign acc n{})", input * (input + 1) / 2)];
    problem_text(&format!("summatory-{}", t + 1), "summatory", &[], &init, &goal)
}

pub(super) fn oracle(input: usize) -> Vec<String> {
    (0..input).flat_map(|_| ["(add)".to_string(), "(dec)".to_string()]).collect()
}

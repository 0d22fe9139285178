//! Depth-first traversal of binary trees with pointers `n` and `child`.
//!
//! `copyl(v, w)` and `copyr(v, w)` point `w` at the left or right child of the node
//! under `v`, leaving `w` null when that child is missing.

use rand::Rng;

use super::{problem_text, requirements, InstanceData};
use crate::fsc::{Controller, Hierarchy, Instruction};
use crate::model::Atom;

/// A binary tree over nodes `0..len`, rooted at node 0. Node `k` is object `t<k+1>`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tree {
    pub left: Vec<Option<usize>>,
    pub right: Vec<Option<usize>>,
}

impl Tree {
    pub fn len(&self) -> usize {
        self.left.len()
    }

    pub fn is_empty(&self) -> bool {
        self.left.is_empty()
    }

    /// Heap-shaped tree with `len` nodes.
    pub fn complete(len: usize) -> Self {
        let child = |k: usize| (k < len).then_some(k);
        Tree {
            left: (0..len).map(|i| child(2 * i + 1)).collect(),
            right: (0..len).map(|i| child(2 * i + 2)).collect(),
        }
    }

    /// Each new node fills a uniformly chosen free child slot.
    pub fn random<R: Rng>(len: usize, rng: &mut R) -> Self {
        let mut t = Tree { left: vec![None; len], right: vec![None; len] };
        let mut slots: Vec<(usize, bool)> = Vec::new();
        if len > 0 {
            slots.extend([(0, false), (0, true)]);
        }
        for k in 1..len {
            let (parent, is_right) = slots.swap_remove(rng.gen_range(0..slots.len()));
            if is_right {
                t.right[parent] = Some(k);
            } else {
                t.left[parent] = Some(k);
            }
            slots.extend([(k, false), (k, true)]);
        }
        t
    }

    /// Number of edges on the longest root-to-leaf path.
    pub fn depth(&self) -> usize {
        fn go(t: &Tree, k: usize) -> usize {
            let l = t.left[k].map_or(0, |c| 1 + go(t, c));
            let r = t.right[k].map_or(0, |c| 1 + go(t, c));
            l.max(r)
        }
        if self.is_empty() {
            0
        } else {
            go(self, 0)
        }
    }

    /// Nodes in depth-first, left-before-right order.
    pub fn preorder(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.len());
        let mut stack = Vec::new();
        if !self.is_empty() {
            stack.push(0);
        }
        while let Some(k) = stack.pop() {
            out.push(k);
            stack.extend(self.right[k]);
            stack.extend(self.left[k]);
        }
        out
    }

    /// Path of left/right moves (`true` = right) from the root to every node.
    fn paths(&self) -> Vec<Vec<bool>> {
        let mut out = vec![Vec::new(); self.len()];
        for k in self.preorder() {
            for (c, dir) in [(self.left[k], false), (self.right[k], true)] {
                if let Some(c) = c {
                    let mut p = out[k].clone();
                    p.push(dir);
                    out[c] = p;
                }
            }
        }
        out
    }
}

pub fn node_name(k: usize) -> String {
    format!("t{}", k + 1)
}

pub(super) fn domain() -> String {
    format!(
        "(define (domain tree-dfs)
  {}
  (:types var node)
  (:constants n child - var)
  (:predicates (assign ?v - var ?x - node) (left ?x - node ?y - node) (right ?x - node ?y - node)
    (visited ?x - node))
  (:derived (null ?v - var) (forall (?x - node) (not (assign ?v ?x))))
  (:action visit
    :parameters (?v - var)
    :effect (forall (?x - node) (when (assign ?v ?x) (visited ?x))))
  (:action copyl
    :parameters (?v - var ?w - var)
    :effect (and
      (forall (?x - node ?y - node) (when (and (assign ?v ?x) (left ?x ?y)) (assign ?w ?y)))
      (forall (?x - node ?z - node) (when (and (assign ?v ?x) (assign ?w ?z) (not (left ?x ?z))) (not (assign ?w ?z))))))
  (:action copyr
    :parameters (?v - var ?w - var)
    :effect (and
      (forall (?x - node ?y - node) (when (and (assign ?v ?x) (right ?x ?y)) (assign ?w ?y)))
      (forall (?x - node ?z - node) (when (and (assign ?v ?x) (assign ?w ?z) (not (right ?x ?z))) (not (assign ?w ?z)))))))
",
        requirements(true)
    )
}

pub(super) fn problem(t: usize, max: usize, data: &InstanceData) -> String {
    let InstanceData::Tree(tree) = data else { unreachable!() };
    let objects: Vec<(String, &str)> = (0..max).map(|k| (node_name(k), "node")).collect();
    let mut init = vec![format!("(assign n {})", node_name(0))];
    for k in 0..tree.len() {
        if let Some(c) = tree.left[k] {
            init.push(format!("(left {} {})", node_name(k), node_name(c)));
        }
        if let Some(c) = tree.right[k] {
            init.push(format!("(right {} {})", node_name(k), node_name(c)));
        }
    }
    let goal: Vec<String> = (0..tree.len()).map(|k| format!("(visited {})", node_name(k))).collect();
    problem_text(&format!("tree-dfs-{}", t + 1), "tree-dfs", &objects, &init, &goal)
}

/// Visits nodes in preorder, walking `child` down from the root to each one.
pub(super) fn oracle(tree: &Tree) -> Vec<String> {
    let paths = tree.paths();
    let mut out = Vec::new();
    for k in tree.preorder() {
        if k == 0 {
            out.push("(visit n)".to_string());
            continue;
        }
        for (step, &dir) in paths[k].iter().enumerate() {
            let op = if dir { "copyr" } else { "copyl" };
            let from = if step == 0 { "n" } else { "child" };
            out.push(format!("({op} {from} child)"));
        }
        out.push("(visit child)".to_string());
    }
    out
}

/// The recursive DFS controller: visit `n`, recurse on its left child, then continue
/// with its right child in the same frame.
pub fn dfs_hierarchy() -> Hierarchy {
    let null: Atom = "(null n)".parse().unwrap();
    let act = |s: &str| Instruction::Action(s.parse().unwrap());
    let mut c = Controller::new("dfs", vec!["n".into()]);
    c.set(0, null.clone(), true, 4, act("(visit child)"));
    c.set(0, null.clone(), false, 1, act("(visit n)"));
    c.set(1, null.clone(), false, 2, act("(copyl n child)"));
    c.set(2, null.clone(), false, 3, act("(copyr n n)"));
    let call = Instruction::Call { controller: 0, args: vec!["child".into()] };
    c.set(3, null.clone(), false, 0, call.clone());
    c.set(3, null, true, 0, call);
    let mut h = Hierarchy::new(5, vec![c]);
    h.variables = vec!["child".into(), "n".into()];
    h
}

/// Nodes visited by a reference recursive DFS.
pub fn dfs_visit_order(tree: &Tree) -> Vec<usize> {
    fn go(t: &Tree, k: Option<usize>, out: &mut Vec<usize>) {
        let mut cur = k;
        while let Some(u) = cur {
            out.push(u);
            go(t, t.left[u], out);
            cur = t.right[u];
        }
    }
    let mut out = Vec::new();
    if !tree.is_empty() {
        go(tree, Some(0), &mut out);
    }
    out
}

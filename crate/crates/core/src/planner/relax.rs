use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::model::{FluentId, Literal, LiteralSet, Problem, State};

#[inline]
fn lit_id(l: Literal) -> u32 {
    l.fluent.0 * 2 + (!l.positive) as u32
}

#[inline]
fn literal_holds(s: &State, l: u32) -> bool {
    s.get(FluentId(l / 2)) == l.is_multiple_of(2)
}

struct UnaryOp {
    pre: Box<[u32]>,
    eff: Box<[u32]>,
    action: u32,
}

/// Delete relaxation over literals: both polarities of every fluent are facts, and each
/// conditional effect `C ▷ E` of `a` becomes a unary operator `pre(a) ∪ C → E`.
pub struct Relaxation {
    ops: Vec<UnaryOp>,
    needed_by: Vec<Vec<u32>>,
    free_ops: Vec<u32>,
    goal: Vec<u32>,
    is_goal: Vec<bool>,
    num_lits: usize,
}

/// Per-evaluation buffers, reused across calls.
#[derive(Default)]
pub struct Scratch {
    cost: Vec<u64>,
    supporter: Vec<u32>,
    remaining: Vec<u32>,
    op_cost: Vec<u64>,
    heap: BinaryHeap<Reverse<(u64, u32)>>,
    marked: Vec<bool>,
}

pub const INFINITE: u64 = u64::MAX;
const NONE: u32 = u32::MAX;

impl Relaxation {
    pub fn new(p: &Problem) -> Self {
        Self::with_goal(p, &p.goal)
    }

    pub fn with_goal(p: &Problem, goal: &LiteralSet) -> Self {
        let num_lits = p.fluents.len() * 2;
        let mut ops = Vec::new();
        for (i, a) in p.actions.iter().enumerate() {
            for ce in &a.effects {
                let Ok(pre) = a.pre.union(&ce.condition) else { continue };
                let eff: Vec<u32> = ce.effect.literals().filter(|l| !pre.contains(*l)).map(lit_id).collect();
                if !eff.is_empty() {
                    ops.push(UnaryOp { pre: pre.literals().map(lit_id).collect(), eff: eff.into(), action: i as u32 });
                }
            }
        }
        let mut needed_by = vec![Vec::new(); num_lits];
        let mut free_ops = Vec::new();
        for (o, op) in ops.iter().enumerate() {
            if op.pre.is_empty() {
                free_ops.push(o as u32);
            }
            for &l in op.pre.iter() {
                needed_by[l as usize].push(o as u32);
            }
        }
        let goal: Vec<u32> = goal.literals().map(lit_id).collect();
        let mut is_goal = vec![false; num_lits];
        for &g in &goal {
            is_goal[g as usize] = true;
        }
        Relaxation { ops, needed_by, free_ops, goal, is_goal, num_lits }
    }

    /// Additive cost of reaching the goal; [`INFINITE`] if unreachable in the relaxation.
    pub fn h_add(&self, s: &State, sc: &mut Scratch) -> u64 {
        self.evaluate(s, sc)
    }

    /// h_add plus the actions of applicable relaxed operators on the best-supporter graph.
    pub fn h_add_preferred(&self, s: &State, sc: &mut Scratch, preferred: &mut Vec<u32>) -> u64 {
        preferred.clear();
        let h = self.evaluate(s, sc);
        if h != 0 && h != INFINITE {
            self.collect_preferred(sc, preferred);
        }
        h
    }

    fn fire(&self, o: usize, sc: &mut Scratch) {
        let nc = sc.op_cost[o].saturating_add(1);
        for &e in self.ops[o].eff.iter() {
            if nc < sc.cost[e as usize] {
                sc.cost[e as usize] = nc;
                sc.supporter[e as usize] = o as u32;
                sc.heap.push(Reverse((nc, e)));
            }
        }
    }

    fn evaluate(&self, s: &State, sc: &mut Scratch) -> u64 {
        if self.goal.iter().all(|&l| literal_holds(s, l)) {
            return 0;
        }
        sc.cost.clear();
        sc.cost.resize(self.num_lits, INFINITE);
        sc.supporter.clear();
        sc.supporter.resize(self.num_lits, NONE);
        sc.remaining.clear();
        sc.remaining.extend(self.ops.iter().map(|o| o.pre.len() as u32));
        sc.op_cost.clear();
        sc.op_cost.resize(self.ops.len(), 0);
        sc.heap.clear();
        let mut goals_left = self.goal.len();
        // cost-0 facts are settled directly without going through the heap
        let mut zero: Vec<u32> = (0..self.num_lits / 2)
            .map(|f| (f * 2 + (!s.get(FluentId(f as u32))) as usize) as u32)
            .collect();
        for &l in &zero {
            sc.cost[l as usize] = 0;
        }
        for &o in &self.free_ops {
            self.fire(o as usize, sc);
        }
        let settle = |l: u32, c: u64, sc: &mut Scratch, goals_left: &mut usize| -> bool {
            if self.is_goal[l as usize] {
                *goals_left -= 1;
                if *goals_left == 0 {
                    return true;
                }
            }
            for &o in &self.needed_by[l as usize] {
                let o = o as usize;
                sc.op_cost[o] = sc.op_cost[o].saturating_add(c);
                sc.remaining[o] -= 1;
                if sc.remaining[o] == 0 {
                    self.fire(o, sc);
                }
            }
            false
        };
        for l in zero.drain(..) {
            if settle(l, 0, sc, &mut goals_left) {
                return self.total(sc);
            }
        }
        while let Some(Reverse((c, l))) = sc.heap.pop() {
            if c > sc.cost[l as usize] || c == 0 {
                continue;
            }
            if settle(l, c, sc, &mut goals_left) {
                break;
            }
        }
        self.total(sc)
    }

    fn total(&self, sc: &Scratch) -> u64 {
        let mut total = 0u64;
        for &g in &self.goal {
            let c = sc.cost[g as usize];
            if c == INFINITE {
                return INFINITE;
            }
            total = total.saturating_add(c);
        }
        total
    }

    fn collect_preferred(&self, sc: &mut Scratch, out: &mut Vec<u32>) {
        sc.marked.clear();
        sc.marked.resize(self.num_lits, false);
        let mut stack: Vec<u32> = self.goal.iter().copied().filter(|&g| sc.cost[g as usize] > 0).collect();
        while let Some(l) = stack.pop() {
            if std::mem::replace(&mut sc.marked[l as usize], true) {
                continue;
            }
            let o = sc.supporter[l as usize];
            if o == NONE {
                continue;
            }
            let op = &self.ops[o as usize];
            let mut applicable = true;
            for &p in op.pre.iter() {
                if sc.cost[p as usize] > 0 {
                    applicable = false;
                    stack.push(p);
                }
            }
            if applicable {
                out.push(op.action);
            }
        }
        out.sort_unstable();
        out.dedup();
    }
}

/// Number of goal literals false in `s`.
pub fn goal_count(p: &Problem, s: &State) -> u64 {
    p.goal.literals().filter(|l| s.get(l.fluent) != l.positive).count() as u64
}

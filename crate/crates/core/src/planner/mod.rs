//! Forward state-space search for ground problems with conditional effects.

mod relax;

use std::cmp::Reverse;
use std::collections::{BinaryHeap, VecDeque};
use std::hash::BuildHasher;
use std::time::{Duration, Instant};

use hashbrown::HashTable;
use rustc_hash::FxBuildHasher;
use serde::{Deserialize, Serialize};

use crate::model::{ActionId, FluentId, Plan, Problem, State};

pub use relax::{goal_count, Relaxation, Scratch, INFINITE};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    GreedyBestFirst,
    WeightedAStar { weight: u32 },
    BreadthFirst,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Heuristic {
    Additive,
    GoalCount,
    Blind,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub strategy: Strategy,
    pub heuristic: Heuristic,
    pub max_expansions: u64,
    pub max_seconds: f64,
    /// Alternates with a second open list holding successors reached by preferred operators.
    pub preferred_operators: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            strategy: Strategy::GreedyBestFirst,
            heuristic: Heuristic::Additive,
            max_expansions: 5_000_000,
            max_seconds: 600.0,
            preferred_operators: true,
        }
    }
}

impl SearchConfig {
    pub fn breadth_first(max_expansions: u64) -> Self {
        SearchConfig {
            strategy: Strategy::BreadthFirst,
            heuristic: Heuristic::Blind,
            max_expansions,
            preferred_operators: false,
            ..Default::default()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Plan(Plan),
    /// The reachable space (after pruning dead ends) was exhausted without reaching the goal.
    Unsolvable,
    /// A budget ran out first.
    Exhausted,
}

impl Outcome {
    pub fn plan(&self) -> Option<&Plan> {
        match self {
            Outcome::Plan(p) => Some(p),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SearchStats {
    pub expanded: u64,
    pub generated: u64,
    pub seconds: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchResult {
    pub outcome: Outcome,
    pub stats: SearchStats,
}

/// Additive heuristic value of `s`.
pub fn relaxed_heuristic(s: &State, p: &Problem) -> u64 {
    Relaxation::new(p).h_add(s, &mut Scratch::default())
}

/// Indexes actions by one positive precondition fluent so that only candidates are tested.
struct SuccessorGenerator {
    always: Vec<u32>,
    buckets: Vec<(FluentId, Vec<u32>)>,
}

impl SuccessorGenerator {
    fn new(p: &Problem) -> Self {
        let mut freq = vec![0u32; p.fluents.len()];
        for a in p.actions.iter() {
            for &f in a.pre.positive() {
                freq[f.index()] += 1;
            }
        }
        let mut always = Vec::new();
        let mut by_fluent: Vec<Vec<u32>> = vec![Vec::new(); p.fluents.len()];
        for (i, a) in p.actions.iter().enumerate() {
            match a.pre.positive().iter().min_by_key(|f| freq[f.index()]) {
                Some(f) => by_fluent[f.index()].push(i as u32),
                None => always.push(i as u32),
            }
        }
        let buckets = by_fluent
            .into_iter()
            .enumerate()
            .filter(|(_, v)| !v.is_empty())
            .map(|(f, v)| (FluentId(f as u32), v))
            .collect();
        SuccessorGenerator { always, buckets }
    }

    fn applicable(&self, p: &Problem, s: &State, out: &mut Vec<u32>) {
        out.clear();
        let mut test = |i: u32| {
            if p.actions[i as usize].applicable(s) {
                out.push(i);
            }
        };
        for &i in &self.always {
            test(i);
        }
        for (f, v) in &self.buckets {
            if s.get(*f) {
                for &i in v {
                    test(i);
                }
            }
        }
        out.sort_unstable();
    }
}

struct Node {
    state: State,
    parent: u32,
    action: u32,
    g: u32,
}

struct Registry {
    nodes: Vec<Node>,
    table: HashTable<u32>,
    hasher: FxBuildHasher,
}

impl Registry {
    fn new() -> Self {
        Registry { nodes: Vec::new(), table: HashTable::new(), hasher: FxBuildHasher }
    }

    fn hash(&self, s: &State) -> u64 {
        self.hasher.hash_one(s)
    }

    /// Inserts `state` unless already known; returns the new node id.
    fn insert(&mut self, state: State, parent: u32, action: u32, g: u32) -> Option<u32> {
        let h = self.hash(&state);
        let nodes = &self.nodes;
        if self.table.find(h, |&i| nodes[i as usize].state == state).is_some() {
            return None;
        }
        let id = self.nodes.len() as u32;
        self.nodes.push(Node { state, parent, action, g });
        let nodes = &self.nodes;
        let hasher = &self.hasher;
        self.table.insert_unique(h, id, |&i| hasher.hash_one(&nodes[i as usize].state));
        Some(id)
    }

    fn plan(&self, mut id: u32) -> Plan {
        let mut steps = Vec::new();
        while self.nodes[id as usize].parent != u32::MAX {
            steps.push(ActionId(self.nodes[id as usize].action));
            id = self.nodes[id as usize].parent;
        }
        steps.reverse();
        Plan::new(steps)
    }
}

fn successor(p: &Problem, s: &State, a: u32) -> Option<State> {
    p.actions[a as usize].apply_unchecked(s, p.effect_mode).ok()
}

struct Budget {
    start: Instant,
    limit: Duration,
    max_expansions: u64,
}

impl Budget {
    fn new(cfg: &SearchConfig) -> Self {
        Budget {
            start: Instant::now(),
            limit: Duration::from_secs_f64(cfg.max_seconds.max(0.0)),
            max_expansions: cfg.max_expansions,
        }
    }

    fn exceeded(&self, expanded: u64) -> bool {
        expanded >= self.max_expansions || (expanded.is_multiple_of(256) && self.start.elapsed() > self.limit)
    }
}

pub fn solve(p: &Problem, cfg: &SearchConfig) -> SearchResult {
    let budget = Budget::new(cfg);
    let mut stats = SearchStats::default();
    let outcome = match cfg.strategy {
        Strategy::BreadthFirst => breadth_first(p, &budget, &mut stats),
        _ => best_first(p, cfg, &budget, &mut stats),
    };
    stats.seconds = budget.start.elapsed().as_secs_f64();
    SearchResult { outcome, stats }
}

/// Breadth-first search under a small expansion cap, then greedy best-first with the
/// remaining budget.
pub fn solve_default(p: &Problem, max_expansions: u64, max_seconds: f64) -> SearchResult {
    let first_cap = max_expansions.min(10_000);
    let first = solve(p, &SearchConfig { max_seconds, ..SearchConfig::breadth_first(first_cap) });
    if first.outcome != Outcome::Exhausted {
        return first;
    }
    let remaining = (max_seconds - first.stats.seconds).max(0.0);
    let mut second = solve(
        p,
        &SearchConfig { max_expansions: max_expansions.saturating_sub(first.stats.expanded), max_seconds: remaining, ..Default::default() },
    );
    second.stats.expanded += first.stats.expanded;
    second.stats.generated += first.stats.generated;
    second.stats.seconds += first.stats.seconds;
    second
}

fn breadth_first(p: &Problem, budget: &Budget, stats: &mut SearchStats) -> Outcome {
    let mut reg = Registry::new();
    let root = reg.insert(p.init.clone(), u32::MAX, u32::MAX, 0).unwrap();
    if p.goal_satisfied(&p.init) {
        return Outcome::Plan(Plan::default());
    }
    let gen = SuccessorGenerator::new(p);
    let mut queue = VecDeque::from([root]);
    let mut app = Vec::new();
    while let Some(id) = queue.pop_front() {
        if budget.exceeded(stats.expanded) {
            return Outcome::Exhausted;
        }
        stats.expanded += 1;
        let s = reg.nodes[id as usize].state.clone();
        let g = reg.nodes[id as usize].g;
        gen.applicable(p, &s, &mut app);
        for &a in &app {
            let Some(t) = successor(p, &s, a) else { continue };
            stats.generated += 1;
            let done = p.goal_satisfied(&t);
            if let Some(child) = reg.insert(t, id, a, g + 1) {
                if done {
                    return Outcome::Plan(reg.plan(child));
                }
                queue.push_back(child);
            }
        }
    }
    Outcome::Unsolvable
}

fn best_first(p: &Problem, cfg: &SearchConfig, budget: &Budget, stats: &mut SearchStats) -> Outcome {
    if p.goal_satisfied(&p.init) {
        return Outcome::Plan(Plan::default());
    }
    let relax = (cfg.heuristic == Heuristic::Additive).then(|| Relaxation::new(p));
    let use_preferred = cfg.preferred_operators && relax.is_some();
    let mut scratch = Scratch::default();
    let eval = |s: &State, scratch: &mut Scratch| -> u64 {
        match (&relax, cfg.heuristic) {
            (Some(r), _) => r.h_add(s, scratch),
            (None, Heuristic::GoalCount) => goal_count(p, s),
            _ => 0,
        }
    };
    let priority = |g: u32, h: u64| -> u64 {
        match cfg.strategy {
            Strategy::WeightedAStar { weight } => (g as u64).saturating_add(h.saturating_mul(weight as u64)),
            _ => h,
        }
    };
    let gen = SuccessorGenerator::new(p);
    let mut reg = Registry::new();
    let root = reg.insert(p.init.clone(), u32::MAX, u32::MAX, 0).unwrap();
    let h0 = eval(&p.init, &mut scratch);
    if h0 == INFINITE {
        return Outcome::Unsolvable;
    }
    type Open = BinaryHeap<Reverse<(u64, u64, u32)>>;
    let mut open: Open = BinaryHeap::new();
    let mut preferred_open: Open = BinaryHeap::new();
    let mut expanded = vec![false];
    let mut counter = 0u64;
    open.push(Reverse((priority(0, h0), counter, root)));
    let mut app = Vec::new();
    let mut preferred = Vec::new();
    let mut turn = 0u64;
    loop {
        let from_preferred = use_preferred && !preferred_open.is_empty() && (turn.is_multiple_of(2) || open.is_empty());
        turn += 1;
        let entry = if from_preferred { preferred_open.pop() } else { open.pop() };
        let Some(Reverse((_, _, id))) = entry else {
            if preferred_open.is_empty() {
                return Outcome::Unsolvable;
            }
            continue;
        };
        if std::mem::replace(&mut expanded[id as usize], true) {
            continue;
        }
        if budget.exceeded(stats.expanded) {
            return Outcome::Exhausted;
        }
        stats.expanded += 1;
        let s = reg.nodes[id as usize].state.clone();
        let g = reg.nodes[id as usize].g;
        if use_preferred {
            relax.as_ref().unwrap().h_add_preferred(&s, &mut scratch, &mut preferred);
        }
        gen.applicable(p, &s, &mut app);
        for &a in &app {
            let Some(t) = successor(p, &s, a) else { continue };
            stats.generated += 1;
            if p.goal_satisfied(&t) {
                let child = match reg.insert(t, id, a, g + 1) {
                    Some(c) => c,
                    None => continue,
                };
                return Outcome::Plan(reg.plan(child));
            }
            let h = eval(&t, &mut scratch);
            if h == INFINITE {
                continue;
            }
            if let Some(child) = reg.insert(t, id, a, g + 1) {
                expanded.push(false);
                counter += 1;
                let key = priority(g + 1, h);
                open.push(Reverse((key, counter, child)));
                if use_preferred && preferred.binary_search(&a).is_ok() {
                    preferred_open.push(Reverse((key, counter, child)));
                }
            }
        }
    }
}

#[cfg(test)]
mod tests;

//! Generators and reference solvers for the evaluation domains.
//!
//! Every generator writes domain and problem text in the supported dialect, then parses
//! and grounds it, so the text is the single source of truth. Instances of one
//! [`Generated`] share the object universe of the largest instance.

mod blocks;
mod gripper;
mod list;
mod reverse;
mod summatory;
pub mod tree;
mod visitall;

use std::collections::HashMap;
use std::fmt::{self, Write as _};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{Atom, GeneralizedProblem, Plan, Problem};
use crate::pddl::{ground_generalized, parse_domain, parse_problem, PddlError};

pub use tree::Tree;
pub use visitall::{column_return, row_sweep, visitall_priors};

#[derive(Debug, Error)]
pub enum DomainError {
    #[error(transparent)]
    Pddl(#[from] PddlError),
    #[error("invalid domain spec: {0}")]
    InvalidSpec(String),
    #[error("oracle produced unknown action {0}")]
    UnknownAction(Atom),
    #[error("instance {0} out of range")]
    NoInstance(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum DomainKind {
    Blocks,
    Gripper,
    List,
    Reverse,
    Summatory,
    TreeDfs,
    Visitall,
}

impl DomainKind {
    pub const ALL: [DomainKind; 7] = [
        DomainKind::Blocks,
        DomainKind::Gripper,
        DomainKind::List,
        DomainKind::Reverse,
        DomainKind::Summatory,
        DomainKind::TreeDfs,
        DomainKind::Visitall,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DomainKind::Blocks => "blocks",
            DomainKind::Gripper => "gripper",
            DomainKind::List => "list",
            DomainKind::Reverse => "reverse",
            DomainKind::Summatory => "summatory",
            DomainKind::TreeDfs => "tree-dfs",
            DomainKind::Visitall => "visitall",
        }
    }

    /// Instance sizes used for synthesis.
    pub fn training_sizes(self) -> Vec<usize> {
        match self {
            DomainKind::Blocks => vec![2, 3, 4, 4, 3],
            DomainKind::Gripper => vec![1, 2],
            DomainKind::List => vec![2, 3, 4, 5],
            DomainKind::Reverse => vec![3, 4],
            DomainKind::Summatory => vec![1, 2, 3],
            DomainKind::TreeDfs => vec![7],
            DomainKind::Visitall => vec![3, 3, 3],
        }
    }
}

impl fmt::Display for DomainKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// What to generate. `sizes` holds one size per instance: tower height (blocks), ball
/// count (gripper), list length (list, reverse), input value (summatory), node count
/// (tree-dfs) or grid side (visitall).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DomainSpec {
    pub kind: DomainKind,
    pub sizes: Vec<usize>,
    pub seed: u64,
    /// Deterministic layouts instead of random ones: complete trees for tree-dfs (where the
    /// node count allows it) and diagonal stripes of pre-visited cells for visitall.
    #[serde(default)]
    pub structured: bool,
}

impl DomainSpec {
    pub fn new(kind: DomainKind, sizes: Vec<usize>, seed: u64) -> Self {
        DomainSpec { kind, sizes, seed, structured: false }
    }

    pub fn training(kind: DomainKind) -> Self {
        DomainSpec { kind, sizes: kind.training_sizes(), seed: 0, structured: matches!(kind, DomainKind::TreeDfs | DomainKind::Visitall) }
    }

    /// `count` random instances up to five times the largest training size.
    pub fn held_out(kind: DomainKind, count: usize, seed: u64) -> Self {
        let max_train = kind.training_sizes().into_iter().max().unwrap_or(1);
        let (lo, hi) = match kind {
            DomainKind::TreeDfs => (2, 15),
            DomainKind::Visitall => (2, 6),
            _ => (max_train.max(2), max_train * 5),
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut sizes: Vec<usize> = (0..count).map(|_| rng.gen_range(lo..=hi)).collect();
        if let Some(last) = sizes.last_mut() {
            *last = hi;
        }
        DomainSpec { kind, sizes, seed, structured: false }
    }
}

/// Instance parameters kept alongside the text so oracles need not re-parse it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum InstanceData {
    Blocks { height: usize, green: usize },
    Gripper { balls: usize },
    List { len: usize },
    Reverse { len: usize },
    Summatory { input: usize },
    Tree(Tree),
    Visitall { side: usize, visited: Vec<(usize, usize)> },
}

#[derive(Clone, Debug)]
pub struct Generated {
    pub spec: DomainSpec,
    pub domain_text: String,
    pub problem_texts: Vec<String>,
    pub instances: Vec<InstanceData>,
    pub gp: GeneralizedProblem,
}

impl Generated {
    pub fn problem(&self, t: usize) -> Problem {
        self.gp.instance(t)
    }

    /// Writes `<name>-domain.pddl` and `<name>-problem-<t>.pddl` files into `dir`.
    pub fn write_files(&self, dir: &Path) -> std::io::Result<()> {
        std::fs::create_dir_all(dir)?;
        let name = self.spec.kind.name();
        std::fs::write(dir.join(format!("{name}-domain.pddl")), &self.domain_text)?;
        for (t, text) in self.problem_texts.iter().enumerate() {
            std::fs::write(dir.join(format!("{name}-problem-{}.pddl", t + 1)), text)?;
        }
        Ok(())
    }
}

pub(crate) fn requirements(derived: bool) -> &'static str {
    if derived {
        "(:requirements :typing :negative-preconditions :conditional-effects :equality :derived-predicates)"
    } else {
        "(:requirements :typing :negative-preconditions :conditional-effects :equality)"
    }
}

/// Problem text with typed objects, positive init atoms and a conjunctive goal.
pub(crate) fn problem_text(
    name: &str,
    domain: &str,
    objects: &[(String, &str)],
    init: &[String],
    goal: &[String],
) -> String {
    let mut out = format!("(define (problem {name})\n  (:domain {domain})\n  (:objects");
    for (o, ty) in objects {
        let _ = write!(out, " {o} - {ty}");
    }
    out.push_str(")\n  (:init");
    for a in init {
        let _ = write!(out, "\n    {a}");
    }
    out.push_str(")\n  (:goal (and");
    for g in goal {
        let _ = write!(out, " {g}");
    }
    out.push_str(")))\n");
    out
}

pub fn generate(spec: &DomainSpec) -> Result<Generated, DomainError> {
    if spec.sizes.is_empty() {
        return Err(DomainError::InvalidSpec("at least one instance size is required".into()));
    }
    if spec.sizes.contains(&0) {
        return Err(DomainError::InvalidSpec("sizes must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let (domain_text, instances, problem_texts): (String, Vec<InstanceData>, Vec<String>) = match spec.kind {
        DomainKind::Blocks => {
            if spec.sizes.iter().any(|&h| h < 2) {
                return Err(DomainError::InvalidSpec("towers need at least two blocks".into()));
            }
            // the green block starts covered, so uncovering it always takes work
            let inst: Vec<_> = spec
                .sizes
                .iter()
                .map(|&h| InstanceData::Blocks { height: h, green: rng.gen_range(1..h) })
                .collect();
            let max = spec.sizes.iter().copied().max().unwrap();
            let texts = inst.iter().enumerate().map(|(t, d)| blocks::problem(t, max, d)).collect();
            (blocks::domain(), inst, texts)
        }
        DomainKind::Gripper => {
            let inst: Vec<_> = spec.sizes.iter().map(|&b| InstanceData::Gripper { balls: b }).collect();
            let max = spec.sizes.iter().copied().max().unwrap();
            let texts = inst.iter().enumerate().map(|(t, d)| gripper::problem(t, max, d)).collect();
            (gripper::domain(), inst, texts)
        }
        DomainKind::List => {
            let inst: Vec<_> = spec.sizes.iter().map(|&len| InstanceData::List { len }).collect();
            let max = spec.sizes.iter().copied().max().unwrap();
            let texts = inst.iter().enumerate().map(|(t, d)| list::problem(t, max, d)).collect();
            (list::domain(), inst, texts)
        }
        DomainKind::Reverse => {
            let inst: Vec<_> = spec.sizes.iter().map(|&len| InstanceData::Reverse { len }).collect();
            let max = spec.sizes.iter().copied().max().unwrap();
            let texts = inst.iter().enumerate().map(|(t, d)| reverse::problem(t, max, d)).collect();
            (reverse::domain(), inst, texts)
        }
        DomainKind::Summatory => {
            let inst: Vec<_> = spec.sizes.iter().map(|&input| InstanceData::Summatory { input }).collect();
            let max_sum = spec.sizes.iter().map(|&k| k * (k + 1) / 2).max().unwrap();
            let texts = inst.iter().enumerate().map(|(t, d)| summatory::problem(t, d)).collect();
            (summatory::domain(max_sum), inst, texts)
        }
        DomainKind::TreeDfs => {
            let inst: Vec<_> = spec
                .sizes
                .iter()
                .map(|&k| {
                    let tree = if spec.structured && (k + 1).is_power_of_two() {
                        Tree::complete(k)
                    } else {
                        Tree::random(k, &mut rng)
                    };
                    InstanceData::Tree(tree)
                })
                .collect();
            let max = spec.sizes.iter().copied().max().unwrap();
            let texts = inst.iter().enumerate().map(|(t, d)| tree::problem(t, max, d)).collect();
            (tree::domain(), inst, texts)
        }
        DomainKind::Visitall => {
            let inst: Vec<_> = spec
                .sizes
                .iter()
                .enumerate()
                .map(|(t, &side)| {
                    let mut visited = Vec::new();
                    for c in 0..side {
                        for r in 0..side {
                            let pick = if spec.structured { (c + r + 2 * t) % 3 == 0 } else { rng.gen_bool(0.25) };
                            if (c, r) != (0, 0) && pick {
                                visited.push((c, r));
                            }
                        }
                    }
                    InstanceData::Visitall { side, visited }
                })
                .collect();
            let max = spec.sizes.iter().copied().max().unwrap();
            let texts = inst.iter().enumerate().map(|(t, d)| visitall::problem(t, max, d)).collect();
            (visitall::domain(), inst, texts)
        }
    };
    assemble(spec.clone(), domain_text, instances, problem_texts)
}

fn assemble(
    spec: DomainSpec,
    domain_text: String,
    instances: Vec<InstanceData>,
    problem_texts: Vec<String>,
) -> Result<Generated, DomainError> {
    let d = parse_domain(&domain_text)?;
    let ps = problem_texts.iter().map(|t| parse_problem(t)).collect::<Result<Vec<_>, _>>()?;
    let gp = ground_generalized(&d, &ps)?;
    Ok(Generated { spec, domain_text, problem_texts, instances, gp })
}

/// Tree-dfs instances for the given trees.
pub fn generate_trees(trees: &[Tree]) -> Result<Generated, DomainError> {
    if trees.is_empty() || trees.iter().any(Tree::is_empty) {
        return Err(DomainError::InvalidSpec("at least one non-empty tree is required".into()));
    }
    let sizes: Vec<usize> = trees.iter().map(Tree::len).collect();
    let max = sizes.iter().copied().max().unwrap();
    let instances: Vec<InstanceData> = trees.iter().cloned().map(InstanceData::Tree).collect();
    let texts = instances.iter().enumerate().map(|(t, d)| tree::problem(t, max, d)).collect();
    let spec = DomainSpec { kind: DomainKind::TreeDfs, sizes, seed: 0, structured: false };
    assemble(spec, tree::domain(), instances, texts)
}

/// A straightforward domain-specific plan for instance `t`.
pub fn oracle_solve(g: &Generated, t: usize) -> Result<Plan, DomainError> {
    let data = g.instances.get(t).ok_or(DomainError::NoInstance(t))?;
    let names: Vec<String> = match data {
        InstanceData::Blocks { green, .. } => blocks::oracle(*green),
        InstanceData::Gripper { balls } => gripper::oracle(*balls),
        InstanceData::List { len } => list::oracle(*len),
        InstanceData::Reverse { len } => reverse::oracle(*len),
        InstanceData::Summatory { input } => summatory::oracle(*input),
        InstanceData::Tree(tree) => tree::oracle(tree),
        InstanceData::Visitall { side, .. } => visitall::oracle(*side),
    };
    let index: HashMap<&Atom, u32> = g.gp.actions.iter().enumerate().map(|(i, a)| (&a.name, i as u32)).collect();
    let mut steps = Vec::with_capacity(names.len());
    for n in names {
        let atom: Atom = n.parse().expect("oracle action names are well formed");
        let id = index.get(&atom).ok_or_else(|| DomainError::UnknownAction(atom.clone()))?;
        steps.push(crate::model::ActionId(*id));
    }
    Ok(Plan::new(steps))
}

//! Compilation of controller synthesis into classical planning.
//!
//! [`compile_flat`] builds `P_n` for a single controller with `n + 1` states and
//! [`compile_hier`] builds `P_{n,m}^ℓ` for up to `m` controllers and a call stack of
//! `ℓ + 1` levels. Both accept a generalized problem; instances are chained by `end_t`
//! actions. Every compiled action is recorded in a [`DecodingKey`].

mod build;
mod priors;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{Atom, FluentId, Problem};

pub use build::{compile_flat, compile_hier};
pub use priors::{inject_priors, priors_from_hierarchy, Prior};

pub const KEY_FORMAT: &str = "hfsc-key-v1";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CompileError {
    #[error("missing assignment fluents: {0:?}")]
    MissingAssignmentFluents(Vec<(String, String)>),
    #[error("conflicting priors: {0}")]
    PriorConflict(String),
    #[error("invalid synthesis parameters: {0}")]
    InvalidParams(String),
    #[error("unknown name {0}")]
    UnknownName(String),
    #[error("compiled fluent {0} clashes with a fluent of the input problem")]
    NameClash(Atom),
    #[error("the generalized problem has no instances")]
    NoInstances,
}

/// Bounds and partial programs for a synthesis run.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SynthesisParams {
    /// Largest state index; controllers have states `q_0..q_n` with `q_n` terminal.
    pub n: usize,
    /// Number of controllers; controller 0 is the root.
    pub m: usize,
    /// Largest stack level `ℓ`.
    pub stack: usize,
    /// Parameter list of each controller; missing entries mean no parameters.
    #[serde(default)]
    pub params: Vec<Vec<String>>,
    #[serde(default)]
    pub priors: Vec<Prior>,
}

impl SynthesisParams {
    pub fn flat(n: usize) -> Self {
        SynthesisParams { n, m: 1, stack: 0, ..Default::default() }
    }

    pub fn hierarchical(n: usize, m: usize, stack: usize) -> Self {
        SynthesisParams { n, m, stack, ..Default::default() }
    }

    pub fn with_params(mut self, params: Vec<Vec<String>>) -> Self {
        self.params = params;
        self
    }

    pub fn with_priors(mut self, priors: Vec<Prior>) -> Self {
        self.priors = priors;
        self
    }

    pub fn params_of(&self, i: usize) -> &[String] {
        self.params.get(i).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn validate(&self) -> Result<(), CompileError> {
        if self.n == 0 {
            return Err(CompileError::InvalidParams("n must be at least 1".into()));
        }
        if self.m == 0 {
            return Err(CompileError::InvalidParams("m must be at least 1".into()));
        }
        if self.params.len() > self.m {
            return Err(CompileError::InvalidParams(format!(
                "{} parameter lists given for {} controllers",
                self.params.len(),
                self.m
            )));
        }
        Ok(())
    }
}

/// Role and indices of one compiled action. Fluent (`f`) and action (`a`) indices refer to
/// the input problem; `i` and `j` are controllers, `l` a stack level and `t` an instance.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "role", rename_all = "lowercase")]
pub enum Role {
    Pcond { i: usize, l: usize, q: usize, f: usize },
    Econd { i: usize, l: usize, q: usize, f: usize },
    Pact { i: usize, l: usize, q: usize, b: bool, a: usize },
    Eact { i: usize, l: usize, q: usize, b: bool, a: usize },
    Psucc { i: usize, l: usize, q: usize, b: bool, next: usize },
    Esucc { i: usize, l: usize, q: usize, b: bool, next: usize },
    Pcall { i: usize, l: usize, q: usize, b: bool, j: usize, args: Vec<usize> },
    Ecall { i: usize, l: usize, q: usize, b: bool, j: usize, args: Vec<usize> },
    Term { i: usize, l: usize },
    End { t: usize },
}

impl Role {
    pub fn name(&self) -> &'static str {
        match self {
            Role::Pcond { .. } => "pcond",
            Role::Econd { .. } => "econd",
            Role::Pact { .. } => "pact",
            Role::Eact { .. } => "eact",
            Role::Psucc { .. } => "psucc",
            Role::Esucc { .. } => "esucc",
            Role::Pcall { .. } => "pcall",
            Role::Ecall { .. } => "ecall",
            Role::Term { .. } => "term",
            Role::End { .. } => "end",
        }
    }

    pub fn is_program(&self) -> bool {
        matches!(self, Role::Pcond { .. } | Role::Pact { .. } | Role::Psucc { .. } | Role::Pcall { .. })
    }

    /// Stack level the action runs on, if any.
    pub fn level(&self) -> Option<usize> {
        match self {
            Role::Pcond { l, .. }
            | Role::Econd { l, .. }
            | Role::Pact { l, .. }
            | Role::Eact { l, .. }
            | Role::Psucc { l, .. }
            | Role::Esucc { l, .. }
            | Role::Pcall { l, .. }
            | Role::Ecall { l, .. }
            | Role::Term { l, .. } => Some(*l),
            Role::End { .. } => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeyEntry {
    pub name: String,
    #[serde(flatten)]
    pub role: Role,
}

/// Everything needed to turn a plan for a compiled problem back into a hierarchy.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecodingKey {
    pub format: String,
    pub hierarchical: bool,
    pub n: usize,
    pub m: usize,
    pub stack: usize,
    pub instances: usize,
    /// Names of the input fluents, indexed by `f`.
    pub fluents: Vec<Atom>,
    /// Names of the input actions, indexed by `a`.
    pub actions: Vec<Atom>,
    pub variables: Vec<String>,
    pub values: Vec<String>,
    pub controller_params: Vec<Vec<String>>,
    /// One entry per compiled action, in action-id order.
    pub entries: Vec<KeyEntry>,
    pub priors: Vec<Prior>,
}

impl DecodingKey {
    pub fn role(&self, a: crate::model::ActionId) -> &Role {
        &self.entries[a.index()].role
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("key serializes") + "\n"
    }

    pub fn from_json(text: &str) -> Result<Self, crate::fsc::FscError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let key: DecodingKey = serde_path_to_error::deserialize(de).map_err(|e| crate::fsc::FscError::Format {
            path: e.path().to_string(),
            msg: e.into_inner().to_string(),
        })?;
        if key.format != KEY_FORMAT {
            return Err(crate::fsc::FscError::Format {
                path: "format".into(),
                msg: format!("expected {KEY_FORMAT}, found {}", key.format),
            });
        }
        Ok(key)
    }

    /// Number of states including the terminal one.
    pub fn num_states(&self) -> usize {
        self.n + 1
    }
}

/// Ids of the compiled fluents, grouped by family.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Layout {
    pub num_states: usize,
    pub m: usize,
    pub levels: usize,
    pub num_fluents: usize,
    pub num_actions: usize,
    /// `level_map[l][f]`: copy of input fluent `f` on level `l`.
    pub level_map: Vec<Vec<FluentId>>,
    pub assignment: Vec<bool>,
    pub cond: Vec<FluentId>,
    pub succ: Vec<FluentId>,
    pub act: Vec<FluentId>,
    pub nocond: Vec<FluentId>,
    pub nosucc: Vec<FluentId>,
    pub noact: Vec<FluentId>,
    pub cs: Vec<FluentId>,
    pub evl: Vec<FluentId>,
    pub app: Vec<FluentId>,
    pub outcome: Vec<FluentId>,
    pub lvl: Vec<FluentId>,
    pub fsc: Vec<FluentId>,
    /// `call[((i * Q + q) * 2 + b)][j][tuple]`, tuples enumerated in base `|Ω_v|`.
    pub call: Vec<Vec<Vec<FluentId>>>,
    pub inst: Vec<FluentId>,
}

impl Layout {
    fn iq(&self, i: usize, q: usize) -> usize {
        i * self.num_states + q
    }

    pub fn cond(&self, i: usize, q: usize, f: usize) -> FluentId {
        self.cond[self.iq(i, q) * self.num_fluents + f]
    }

    pub fn succ(&self, i: usize, q: usize, b: bool, next: usize) -> FluentId {
        self.succ[(self.iq(i, q) * 2 + b as usize) * self.num_states + next]
    }

    pub fn act(&self, i: usize, q: usize, b: bool, a: usize) -> FluentId {
        self.act[(self.iq(i, q) * 2 + b as usize) * self.num_actions + a]
    }

    pub fn nocond(&self, i: usize, q: usize) -> FluentId {
        self.nocond[self.iq(i, q)]
    }

    pub fn nosucc(&self, i: usize, q: usize, b: bool) -> FluentId {
        self.nosucc[self.iq(i, q) * 2 + b as usize]
    }

    pub fn noact(&self, i: usize, q: usize, b: bool) -> FluentId {
        self.noact[self.iq(i, q) * 2 + b as usize]
    }

    pub fn cs(&self, l: usize, q: usize) -> FluentId {
        self.cs[l * self.num_states + q]
    }

    pub fn outcome(&self, l: usize, b: bool) -> FluentId {
        self.outcome[l * 2 + b as usize]
    }

    pub fn call(&self, i: usize, q: usize, b: bool, j: usize, tuple: usize) -> FluentId {
        self.call[self.iq(i, q) * 2 + b as usize][j][tuple]
    }

    /// Every `no*` fluent.
    pub fn program_markers(&self) -> impl Iterator<Item = FluentId> + '_ {
        self.nocond.iter().chain(&self.nosucc).chain(&self.noact).copied()
    }
}

#[derive(Clone, Debug)]
pub struct CompiledProblem {
    pub problem: Problem,
    pub key: DecodingKey,
    pub layout: Layout,
}

impl CompiledProblem {
    pub fn count_role(&self, role: &str) -> usize {
        self.key.entries.iter().filter(|e| e.role.name() == role).count()
    }
}

/// Base-`base` digits of `index`, most significant first.
pub(crate) fn tuple_of(mut index: usize, base: usize, len: usize) -> Vec<usize> {
    let mut out = vec![0; len];
    for slot in out.iter_mut().rev() {
        *slot = index % base;
        index /= base;
    }
    out
}

pub(crate) fn tuple_index(tuple: &[usize], base: usize) -> usize {
    tuple.iter().fold(0, |acc, &d| acc * base + d)
}

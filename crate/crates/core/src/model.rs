//! Grounded classical planning with conditional effects.
//!
//! Fluents are dense integer ids into a [`FluentTable`]; states are total
//! truth assignments stored as bit-vectors. Actions carry a precondition and
//! a list of conditional effects `C ▷ E`.
//!
//! A fluent may also be *derived*: its value is defined by a conjunction of
//! literals over stored fluents and is evaluated on demand. Derived fluents
//! never occur in preconditions, effects, initial states or goals; they exist
//! so that controllers can branch on tests such as "variable holds no value".

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("literal set assigns both values to fluent {0}")]
    ConflictingLiterals(String),
    #[error("action {action} triggers conflicting effects on {fluent}")]
    ConflictingEffects { action: String, fluent: String },
    #[error("action {0} is not applicable")]
    NotApplicable(String),
    #[error("duplicate fluent {0}")]
    DuplicateFluent(String),
    #[error("unknown fluent {0}")]
    UnknownFluent(String),
    #[error("derived fluent {0} may only be used as a controller condition")]
    DerivedMisuse(String),
    #[error("malformed atom {0:?}")]
    MalformedAtom(String),
}

/// Structured symbol: a predicate applied to object names.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom {
    pub predicate: String,
    pub args: Vec<String>,
}

impl Atom {
    pub fn new(predicate: impl Into<String>, args: impl IntoIterator<Item = impl Into<String>>) -> Self {
        Atom { predicate: predicate.into(), args: args.into_iter().map(Into::into).collect() }
    }

    pub fn nullary(predicate: impl Into<String>) -> Self {
        Atom { predicate: predicate.into(), args: Vec::new() }
    }

    /// Flat identifier form, e.g. `assign_n_x1`.
    pub fn flat_name(&self) -> String {
        let mut s = self.predicate.clone();
        for a in &self.args {
            s.push('_');
            s.push_str(a);
        }
        s
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.predicate)?;
        for a in &self.args {
            write!(f, " {a}")?;
        }
        write!(f, ")")
    }
}

impl FromStr for Atom {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        let inner = match (t.strip_prefix('('), t.ends_with(')')) {
            (Some(rest), true) => &rest[..rest.len() - 1],
            (None, false) => t,
            _ => return Err(ModelError::MalformedAtom(s.to_string())),
        };
        let mut parts = inner.split_whitespace();
        let predicate = parts.next().ok_or_else(|| ModelError::MalformedAtom(s.to_string()))?;
        if predicate.contains(['(', ')']) {
            return Err(ModelError::MalformedAtom(s.to_string()));
        }
        Ok(Atom::new(predicate, parts))
    }
}

impl Serialize for Atom {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Atom {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FluentId(pub u32);

impl FluentId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ActionId(pub u32);

impl ActionId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    pub fluent: FluentId,
    pub positive: bool,
}

impl Literal {
    pub fn pos(fluent: FluentId) -> Self {
        Literal { fluent, positive: true }
    }

    pub fn neg(fluent: FluentId) -> Self {
        Literal { fluent, positive: false }
    }

    pub fn negated(self) -> Self {
        Literal { fluent: self.fluent, positive: !self.positive }
    }
}

/// Partial assignment; never assigns both values to one fluent.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct LiteralSet {
    positive: Vec<FluentId>,
    negative: Vec<FluentId>,
}

impl LiteralSet {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn new(
        positive: impl IntoIterator<Item = FluentId>,
        negative: impl IntoIterator<Item = FluentId>,
    ) -> Result<Self, FluentId> {
        let mut positive: Vec<_> = positive.into_iter().collect();
        let mut negative: Vec<_> = negative.into_iter().collect();
        positive.sort_unstable();
        positive.dedup();
        negative.sort_unstable();
        negative.dedup();
        if let Some(f) = first_common(&positive, &negative) {
            return Err(f);
        }
        Ok(LiteralSet { positive, negative })
    }

    pub fn from_literals(lits: impl IntoIterator<Item = Literal>) -> Result<Self, FluentId> {
        let (mut p, mut n) = (Vec::new(), Vec::new());
        for l in lits {
            if l.positive {
                p.push(l.fluent)
            } else {
                n.push(l.fluent)
            }
        }
        Self::new(p, n)
    }

    pub fn positive(&self) -> &[FluentId] {
        &self.positive
    }

    pub fn negative(&self) -> &[FluentId] {
        &self.negative
    }

    pub fn is_empty(&self) -> bool {
        self.positive.is_empty() && self.negative.is_empty()
    }

    pub fn len(&self) -> usize {
        self.positive.len() + self.negative.len()
    }

    pub fn literals(&self) -> impl Iterator<Item = Literal> + '_ {
        self.positive
            .iter()
            .map(|&f| Literal::pos(f))
            .chain(self.negative.iter().map(|&f| Literal::neg(f)))
    }

    pub fn contains(&self, lit: Literal) -> bool {
        let v = if lit.positive { &self.positive } else { &self.negative };
        v.binary_search(&lit.fluent).is_ok()
    }

    /// `self ⊆ s`.
    #[inline]
    pub fn holds_in(&self, s: &State) -> bool {
        self.positive.iter().all(|&f| s.get(f)) && self.negative.iter().all(|&f| !s.get(f))
    }

    pub fn mentions(&self, f: FluentId) -> bool {
        self.positive.binary_search(&f).is_ok() || self.negative.binary_search(&f).is_ok()
    }

    pub fn fluents(&self) -> impl Iterator<Item = FluentId> + '_ {
        self.positive.iter().chain(self.negative.iter()).copied()
    }

    /// Union of two sets; `Err` carries a fluent assigned both values.
    pub fn union(&self, other: &LiteralSet) -> Result<LiteralSet, FluentId> {
        LiteralSet::new(
            self.positive.iter().chain(&other.positive).copied(),
            self.negative.iter().chain(&other.negative).copied(),
        )
    }

    pub fn map_fluents(&self, mut f: impl FnMut(FluentId) -> FluentId) -> Result<LiteralSet, FluentId> {
        let pos: Vec<_> = self.positive.iter().map(|&x| f(x)).collect();
        let neg: Vec<_> = self.negative.iter().map(|&x| f(x)).collect();
        LiteralSet::new(pos, neg)
    }
}

fn first_common(a: &[FluentId], b: &[FluentId]) -> Option<FluentId> {
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => return Some(a[i]),
        }
    }
    None
}

/// Total truth assignment over a fluent table.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct State {
    words: Box<[u64]>,
    len: u32,
}

impl State {
    pub fn new(len: usize) -> Self {
        State { words: vec![0u64; len.div_ceil(64)].into_boxed_slice(), len: len as u32 }
    }

    pub fn from_true(len: usize, fluents: impl IntoIterator<Item = FluentId>) -> Self {
        let mut s = Self::new(len);
        for f in fluents {
            s.set(f, true);
        }
        s
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, f: FluentId) -> bool {
        let i = f.index();
        debug_assert!(i < self.len());
        (self.words[i >> 6] >> (i & 63)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, f: FluentId, value: bool) {
        let i = f.index();
        debug_assert!(i < self.len());
        if value {
            self.words[i >> 6] |= 1 << (i & 63);
        } else {
            self.words[i >> 6] &= !(1 << (i & 63));
        }
    }

    pub fn true_fluents(&self) -> impl Iterator<Item = FluentId> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros();
                w &= w - 1;
                Some(FluentId((wi as u32) * 64 + b))
            })
        })
    }

    pub fn count_true(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }
}

impl fmt::Debug for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.true_fluents().map(|x| x.0)).finish()
    }
}

#[derive(Clone, Debug, Default)]
pub struct FluentTable {
    names: Vec<Atom>,
    index: HashMap<Atom, FluentId>,
    derived: Vec<Option<LiteralSet>>,
}

impl FluentTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, name: Atom) -> Result<FluentId, ModelError> {
        self.insert(name, None)
    }

    /// Adds a fluent whose value is the conjunction `body` over stored fluents.
    pub fn push_derived(&mut self, name: Atom, body: LiteralSet) -> Result<FluentId, ModelError> {
        if let Some(f) = body.fluents().find(|&f| self.is_derived(f)) {
            return Err(ModelError::DerivedMisuse(self.names[f.index()].to_string()));
        }
        self.insert(name, Some(body))
    }

    fn insert(&mut self, name: Atom, body: Option<LiteralSet>) -> Result<FluentId, ModelError> {
        if self.index.contains_key(&name) {
            return Err(ModelError::DuplicateFluent(name.to_string()));
        }
        let id = FluentId(self.names.len() as u32);
        self.index.insert(name.clone(), id);
        self.names.push(name);
        self.derived.push(body);
        Ok(id)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, f: FluentId) -> &Atom {
        &self.names[f.index()]
    }

    pub fn id(&self, name: &Atom) -> Option<FluentId> {
        self.index.get(name).copied()
    }

    pub fn ids(&self) -> impl Iterator<Item = FluentId> {
        (0..self.names.len() as u32).map(FluentId)
    }

    pub fn is_derived(&self, f: FluentId) -> bool {
        self.derived[f.index()].is_some()
    }

    pub fn derived_body(&self, f: FluentId) -> Option<&LiteralSet> {
        self.derived[f.index()].as_ref()
    }

    pub fn has_derived(&self) -> bool {
        self.derived.iter().any(Option::is_some)
    }

    /// Truth value of `f` in `s`, evaluating derived fluents.
    #[inline]
    pub fn holds(&self, s: &State, f: FluentId) -> bool {
        match &self.derived[f.index()] {
            None => s.get(f),
            Some(body) => body.holds_in(s),
        }
    }

    pub fn describe(&self, set: &LiteralSet) -> String {
        let mut parts: Vec<String> = set
            .literals()
            .map(|l| {
                let n = self.name(l.fluent).to_string();
                if l.positive {
                    n
                } else {
                    format!("(not {n})")
                }
            })
            .collect();
        parts.sort();
        parts.join(" ")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConditionalEffect {
    pub condition: LiteralSet,
    pub effect: LiteralSet,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroundAction {
    pub name: Atom,
    pub pre: LiteralSet,
    pub effects: Vec<ConditionalEffect>,
}

/// How `apply` treats triggered effects that assign a fluent both values.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum EffectMode {
    /// Reject the transition.
    #[default]
    Strict,
    /// Deletes are applied before adds, so the add wins.
    DeleteThenAdd,
}

impl GroundAction {
    pub fn new(name: Atom, pre: LiteralSet, effects: Vec<ConditionalEffect>) -> Self {
        GroundAction { name, pre, effects }
    }

    #[inline]
    pub fn applicable(&self, s: &State) -> bool {
        self.pre.holds_in(s)
    }

    /// Union of `E` over all `C ▷ E` with `C ⊆ s`.
    pub fn triggered_effects(&self, s: &State, mode: EffectMode) -> Result<LiteralSet, ModelError> {
        let mut add = Vec::new();
        let mut del = Vec::new();
        for ce in &self.effects {
            if ce.condition.holds_in(s) {
                add.extend_from_slice(ce.effect.positive());
                del.extend_from_slice(ce.effect.negative());
            }
        }
        match LiteralSet::new(add.iter().copied(), del.iter().copied()) {
            Ok(set) => Ok(set),
            Err(f) => match mode {
                EffectMode::Strict => Err(ModelError::ConflictingEffects {
                    action: self.name.to_string(),
                    fluent: format!("#{}", f.0),
                }),
                EffectMode::DeleteThenAdd => {
                    let mut keep: Vec<_> = add.clone();
                    keep.sort_unstable();
                    keep.dedup();
                    Ok(LiteralSet::new(
                        add,
                        del.into_iter().filter(|d| keep.binary_search(d).is_err()),
                    )
                    .expect("adds win over deletes"))
                }
            },
        }
    }

    /// `θ(s, a) = (s ∖ ¬eff(s, a)) ∪ eff(s, a)`.
    pub fn apply(&self, s: &State, mode: EffectMode) -> Result<State, ModelError> {
        if !self.applicable(s) {
            return Err(ModelError::NotApplicable(self.name.to_string()));
        }
        self.apply_unchecked(s, mode)
    }

    /// Applies effects without checking the precondition.
    pub fn apply_unchecked(&self, s: &State, mode: EffectMode) -> Result<State, ModelError> {
        let eff = self.triggered_effects(s, mode)?;
        let mut next = s.clone();
        for &f in eff.negative() {
            next.set(f, false);
        }
        for &f in eff.positive() {
            next.set(f, true);
        }
        Ok(next)
    }
}

pub fn triggered_effects(s: &State, a: &GroundAction, mode: EffectMode) -> Result<LiteralSet, ModelError> {
    a.triggered_effects(s, mode)
}

pub fn applicable(s: &State, a: &GroundAction) -> bool {
    a.applicable(s)
}

pub fn apply(s: &State, a: &GroundAction, mode: EffectMode) -> Result<State, ModelError> {
    a.apply(s, mode)
}

/// Single planning instance `⟨F, A, I, G⟩`.
#[derive(Clone, Debug)]
pub struct Problem {
    pub fluents: Arc<FluentTable>,
    pub actions: Arc<Vec<GroundAction>>,
    pub init: State,
    pub goal: LiteralSet,
    pub effect_mode: EffectMode,
    pub assignments: Option<Arc<AssignmentSpace>>,
}

impl Problem {
    pub fn action(&self, a: ActionId) -> &GroundAction {
        &self.actions[a.index()]
    }

    pub fn action_id(&self, name: &Atom) -> Option<ActionId> {
        self.actions.iter().position(|a| &a.name == name).map(|i| ActionId(i as u32))
    }

    pub fn apply(&self, s: &State, a: ActionId) -> Result<State, ModelError> {
        self.action(a).apply(s, self.effect_mode)
    }

    pub fn goal_satisfied(&self, s: &State) -> bool {
        self.goal.holds_in(s)
    }

    pub fn validate(&self, plan: &Plan) -> PlanVerdict {
        validate_plan(self, plan)
    }
}

/// Variable objects `Ω_v`, value objects `Ω_x` and the `assign(v, x)` fluents.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AssignmentSpace {
    pub variables: Vec<String>,
    pub values: Vec<String>,
    /// `table[v][x]`; `None` when the fluent is missing from the table.
    pub table: Vec<Vec<Option<FluentId>>>,
}

impl AssignmentSpace {
    pub const PREDICATE: &'static str = "assign";

    /// Looks up every `(assign v x)` in `fluents`.
    pub fn from_table(fluents: &FluentTable, variables: Vec<String>, values: Vec<String>) -> Self {
        let table = variables
            .iter()
            .map(|v| {
                values
                    .iter()
                    .map(|x| fluents.id(&Atom::new(Self::PREDICATE, [v.as_str(), x.as_str()])))
                    .collect()
            })
            .collect();
        AssignmentSpace { variables, values, table }
    }

    pub fn variable_index(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v == name)
    }

    pub fn fluent(&self, v: usize, x: usize) -> Option<FluentId> {
        self.table[v][x]
    }

    pub fn is_complete(&self) -> bool {
        self.table.iter().all(|row| row.iter().all(Option::is_some))
    }

    pub fn missing(&self) -> Vec<(String, String)> {
        let mut out = Vec::new();
        for (v, row) in self.table.iter().enumerate() {
            for (x, f) in row.iter().enumerate() {
                if f.is_none() {
                    out.push((self.variables[v].clone(), self.values[x].clone()));
                }
            }
        }
        out
    }

    pub fn fluents(&self) -> impl Iterator<Item = FluentId> + '_ {
        self.table.iter().flatten().flatten().copied()
    }

    pub fn is_assignment(&self, f: FluentId) -> bool {
        self.fluents().any(|g| g == f)
    }

    /// Values currently held by variable `v`.
    pub fn values_of<'a>(&'a self, s: &'a State, v: usize) -> impl Iterator<Item = usize> + 'a {
        self.table[v].iter().enumerate().filter_map(move |(x, f)| match f {
            Some(f) if s.get(*f) => Some(x),
            _ => None,
        })
    }
}

#[derive(Clone, Debug)]
pub struct Instance {
    pub name: String,
    pub init: State,
    pub goal: LiteralSet,
}

/// Instances sharing fluents and actions, differing in `I_t` and `G_t`.
#[derive(Clone, Debug)]
pub struct GeneralizedProblem {
    pub fluents: Arc<FluentTable>,
    pub actions: Arc<Vec<GroundAction>>,
    pub instances: Vec<Instance>,
    pub effect_mode: EffectMode,
    pub assignments: Option<Arc<AssignmentSpace>>,
}

impl GeneralizedProblem {
    pub fn instance(&self, t: usize) -> Problem {
        let inst = &self.instances[t];
        Problem {
            fluents: self.fluents.clone(),
            actions: self.actions.clone(),
            init: inst.init.clone(),
            goal: inst.goal.clone(),
            effect_mode: self.effect_mode,
            assignments: self.assignments.clone(),
        }
    }

    pub fn problems(&self) -> impl Iterator<Item = Problem> + '_ {
        (0..self.instances.len()).map(|t| self.instance(t))
    }

    pub fn len(&self) -> usize {
        self.instances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instances.is_empty()
    }

    pub fn from_problem(p: Problem) -> Self {
        GeneralizedProblem {
            fluents: p.fluents,
            actions: p.actions,
            instances: vec![Instance { name: "p1".into(), init: p.init, goal: p.goal }],
            effect_mode: p.effect_mode,
            assignments: p.assignments,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Plan {
    pub steps: Vec<ActionId>,
}

impl Plan {
    pub fn new(steps: Vec<ActionId>) -> Self {
        Plan { steps }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn to_text(&self, p: &Problem) -> String {
        let mut out = String::new();
        for &a in &self.steps {
            out.push_str(&format!("({})\n", p.action(a).name.flat_name()));
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PlanVerdict {
    Solves,
    GoalUnsatisfied(State),
    /// Step index whose precondition fails (or whose effects conflict in strict mode).
    InapplicableAt(usize),
}

impl PlanVerdict {
    pub fn is_solved(&self) -> bool {
        matches!(self, PlanVerdict::Solves)
    }
}

pub fn validate_plan(p: &Problem, plan: &Plan) -> PlanVerdict {
    let mut s = p.init.clone();
    for (i, &a) in plan.steps.iter().enumerate() {
        let Some(action) = p.actions.get(a.index()) else {
            return PlanVerdict::InapplicableAt(i);
        };
        match action.apply(&s, p.effect_mode) {
            Ok(next) => s = next,
            Err(_) => return PlanVerdict::InapplicableAt(i),
        }
    }
    if p.goal.holds_in(&s) {
        PlanVerdict::Solves
    } else {
        PlanVerdict::GoalUnsatisfied(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(i: u32) -> FluentId {
        FluentId(i)
    }

    fn lits(p: &[u32], n: &[u32]) -> LiteralSet {
        LiteralSet::new(p.iter().map(|&i| f(i)), n.iter().map(|&i| f(i))).unwrap()
    }

    #[test]
    fn literal_set_rejects_conflict() {
        assert_eq!(LiteralSet::new([f(1)], [f(1)]), Err(f(1)));
    }

    #[test]
    fn no_effects_is_identity() {
        let a = GroundAction::new(Atom::nullary("noop"), LiteralSet::empty(), vec![]);
        let s = State::from_true(5, [f(0), f(3)]);
        assert!(a.triggered_effects(&s, EffectMode::Strict).unwrap().is_empty());
        assert_eq!(a.apply(&s, EffectMode::Strict).unwrap(), s);
    }

    #[test]
    fn empty_precondition_is_always_applicable() {
        let a = GroundAction::new(Atom::nullary("a"), LiteralSet::empty(), vec![]);
        assert!(a.applicable(&State::new(3)));
        assert!(a.applicable(&State::from_true(3, [f(0), f(1), f(2)])));
    }

    #[test]
    fn exact_precondition_is_applicable() {
        let a = GroundAction::new(Atom::nullary("a"), lits(&[0, 2], &[1]), vec![]);
        let s = State::from_true(3, [f(0), f(2)]);
        assert!(a.applicable(&s));
        assert!(!a.applicable(&State::from_true(3, [f(0), f(1), f(2)])));
    }

    #[test]
    fn strict_mode_rejects_conflicts_and_lenient_mode_adds() {
        let a = GroundAction::new(
            Atom::nullary("c"),
            LiteralSet::empty(),
            vec![
                ConditionalEffect { condition: LiteralSet::empty(), effect: lits(&[0], &[]) },
                ConditionalEffect { condition: LiteralSet::empty(), effect: lits(&[], &[0, 1]) },
            ],
        );
        let s = State::from_true(2, [f(1)]);
        assert!(matches!(
            a.apply(&s, EffectMode::Strict),
            Err(ModelError::ConflictingEffects { .. })
        ));
        let t = a.apply(&s, EffectMode::DeleteThenAdd).unwrap();
        assert!(t.get(f(0)) && !t.get(f(1)));
    }

    #[test]
    fn not_applicable_error() {
        let a = GroundAction::new(Atom::nullary("a"), lits(&[0], &[]), vec![]);
        assert!(matches!(a.apply(&State::new(1), EffectMode::Strict), Err(ModelError::NotApplicable(_))));
    }

    #[test]
    fn empty_plan_verdicts() {
        let mut t = FluentTable::new();
        let p0 = t.push(Atom::nullary("p")).unwrap();
        let prob = Problem {
            fluents: Arc::new(t),
            actions: Arc::new(vec![]),
            init: State::from_true(1, [p0]),
            goal: LiteralSet::new([p0], []).unwrap(),
            effect_mode: EffectMode::Strict,
            assignments: None,
        };
        assert_eq!(validate_plan(&prob, &Plan::default()), PlanVerdict::Solves);
        let mut q = prob.clone();
        q.goal = LiteralSet::new([], [p0]).unwrap();
        assert!(matches!(validate_plan(&q, &Plan::default()), PlanVerdict::GoalUnsatisfied(_)));
    }

    #[test]
    fn atom_text_round_trip() {
        let a: Atom = "(assign n x1)".parse().unwrap();
        assert_eq!(a, Atom::new("assign", ["n", "x1"]));
        assert_eq!(a.to_string().parse::<Atom>().unwrap(), a);
        assert_eq!("(handempty)".parse::<Atom>().unwrap(), Atom::nullary("handempty"));
        assert!("(broken".parse::<Atom>().is_err());
    }

    #[test]
    fn derived_fluent_evaluates_body() {
        let mut t = FluentTable::new();
        let a = t.push(Atom::new("assign", ["n", "x"])).unwrap();
        let null = t.push_derived(Atom::new("null", ["n"]), LiteralSet::new([], [a]).unwrap()).unwrap();
        assert!(t.holds(&State::new(2), null));
        assert!(!t.holds(&State::from_true(2, [a]), null));
        assert!(t.push_derived(Atom::nullary("bad"), LiteralSet::new([null], []).unwrap()).is_err());
    }

    #[test]
    fn state_bits() {
        let mut s = State::new(130);
        s.set(f(0), true);
        s.set(f(64), true);
        s.set(f(129), true);
        assert_eq!(s.true_fluents().collect::<Vec<_>>(), vec![f(0), f(64), f(129)]);
        s.set(f(64), false);
        assert_eq!(s.count_true(), 2);
    }
}

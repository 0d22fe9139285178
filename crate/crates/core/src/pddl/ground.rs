use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use super::ast::*;
use super::parse::{check_problem, Scope};
use super::PddlError;
use crate::model::{
    AssignmentSpace, Atom, ConditionalEffect, EffectMode, FluentId, FluentTable, GeneralizedProblem,
    GroundAction, Instance, LiteralSet, Problem, State,
};

type Binding = Vec<(String, String)>;

fn lookup<'b>(b: &'b Binding, t: &'b Term) -> Option<&'b str> {
    match t {
        Term::Const(c) => Some(c),
        Term::Var(v) => b.iter().rev().find(|(n, _)| n == v).map(|(_, o)| o.as_str()),
    }
}

struct Grounder<'a> {
    scope: Scope<'a>,
    objects: Vec<TypedName>,
    by_type: HashMap<String, Vec<String>>,
    fluents: FluentTable,
    static_preds: HashSet<&'a str>,
    /// Per fluent: true in at least one instance's initial state.
    true_somewhere: Vec<bool>,
    /// Per fluent: false in at least one instance's initial state.
    false_somewhere: Vec<bool>,
}

#[derive(Default)]
struct Lits {
    add: Vec<FluentId>,
    del: Vec<FluentId>,
}

impl Lits {
    fn into_set(self) -> Option<LiteralSet> {
        LiteralSet::new(self.add, self.del).ok()
    }

    /// Effect semantics: a fluent both added and deleted ends up true.
    fn into_effect(self) -> LiteralSet {
        let mut add = self.add;
        add.sort_unstable();
        add.dedup();
        let del: Vec<_> = self.del.into_iter().filter(|d| add.binary_search(d).is_err()).collect();
        LiteralSet::new(add, del).expect("adds removed from deletes")
    }
}

impl<'a> Grounder<'a> {
    fn objects_of(&mut self, ty: &str) -> Vec<String> {
        if let Some(v) = self.by_type.get(ty) {
            return v.clone();
        }
        let v: Vec<String> = self
            .objects
            .iter()
            .filter(|o| self.scope.is_subtype(&o.ty, ty))
            .map(|o| o.name.clone())
            .collect();
        self.by_type.insert(ty.to_string(), v.clone());
        v
    }

    fn atom(&self, a: &AtomTemplate, b: &Binding) -> Atom {
        Atom {
            predicate: a.predicate.clone(),
            args: a.args.iter().map(|t| lookup(b, t).expect("bound").to_string()).collect(),
        }
    }

    fn fluent(&self, a: &AtomTemplate, b: &Binding) -> Result<FluentId, PddlError> {
        let atom = self.atom(a, b);
        self.fluents
            .id(&atom)
            .ok_or_else(|| PddlError::Ground(format!("atom {atom} is not type-correct")))
    }

    /// `Some(false)` when the condition is certainly false in every instance.
    fn static_check(&self, c: &Condition, b: &Binding) -> Option<bool> {
        match c {
            Condition::Equal { left, right, positive } => {
                let (l, r) = (lookup(b, left)?, lookup(b, right)?);
                Some((l == r) == *positive)
            }
            Condition::Atom { atom, positive } => {
                if !self.static_preds.contains(atom.predicate.as_str()) {
                    return None;
                }
                let mut args = Vec::with_capacity(atom.args.len());
                for t in &atom.args {
                    args.push(lookup(b, t)?.to_string());
                }
                let Some(f) = self.fluents.id(&Atom { predicate: atom.predicate.clone(), args }) else {
                    return Some(false);
                };
                Some(if *positive { self.true_somewhere[f.index()] } else { self.false_somewhere[f.index()] })
            }
            Condition::Forall { .. } => None,
        }
    }

    fn enumerate(
        &mut self,
        vars: &[TypedName],
        b: &mut Binding,
        filters: &[Condition],
        f: &mut dyn FnMut(&mut Self, &Binding) -> Result<(), PddlError>,
    ) -> Result<(), PddlError> {
        let Some((first, rest)) = vars.split_first() else {
            return f(self, b);
        };
        for o in self.objects_of(&first.ty) {
            b.push((first.name.clone(), o));
            if filters.iter().all(|c| self.static_check(c, b) != Some(false)) {
                self.enumerate(rest, b, filters, f)?;
            }
            b.pop();
        }
        Ok(())
    }

    fn conditions(&self, cs: &[Condition], b: &Binding, out: &mut Lits) -> Result<bool, PddlError> {
        for c in cs {
            match c {
                Condition::Equal { .. } => {
                    if self.static_check(c, b) == Some(false) {
                        return Ok(false);
                    }
                }
                Condition::Atom { atom, positive } => {
                    if self.static_check(c, b) == Some(false) {
                        return Ok(false);
                    }
                    let f = self.fluent(atom, b)?;
                    if self.fluents.is_derived(f) {
                        return Err(PddlError::Ground(format!(
                            "derived atom {} used outside a controller condition",
                            self.fluents.name(f)
                        )));
                    }
                    if *positive {
                        out.add.push(f)
                    } else {
                        out.del.push(f)
                    }
                }
                Condition::Forall { .. } => {
                    return Err(PddlError::UnsupportedRequirement(":universal-preconditions".into()))
                }
            }
        }
        Ok(true)
    }

    fn effects(
        &mut self,
        es: &[Effect],
        b: &mut Binding,
        unconditional: &mut Lits,
        out: &mut Vec<ConditionalEffect>,
    ) -> Result<(), PddlError> {
        for e in es {
            match e {
                Effect::Literal { atom, positive } => {
                    let f = self.effect_fluent(atom, b)?;
                    if *positive {
                        unconditional.add.push(f)
                    } else {
                        unconditional.del.push(f)
                    }
                }
                Effect::When { condition, effect } => {
                    let mut cond = Lits::default();
                    if !self.conditions(condition, b, &mut cond)? {
                        continue;
                    }
                    let Some(condition) = cond.into_set() else { continue };
                    let mut eff = Lits::default();
                    for e in effect {
                        let Effect::Literal { atom, positive } = e else {
                            return Err(PddlError::Ground("only literals allowed inside 'when'".into()));
                        };
                        let f = self.effect_fluent(atom, b)?;
                        if *positive {
                            eff.add.push(f)
                        } else {
                            eff.del.push(f)
                        }
                    }
                    let effect = eff.into_effect();
                    if !effect.is_empty() {
                        out.push(ConditionalEffect { condition, effect });
                    }
                }
                Effect::Forall { vars, effect } => {
                    let filters: Vec<Condition> = match effect.as_slice() {
                        [Effect::When { condition, .. }] => condition.clone(),
                        _ => Vec::new(),
                    };
                    let effect = effect.clone();
                    self.enumerate(vars, b, &filters, &mut |g, b| {
                        let mut b = b.clone();
                        g.effects(&effect, &mut b, unconditional, out)
                    })?;
                }
            }
        }
        Ok(())
    }

    fn effect_fluent(&self, atom: &AtomTemplate, b: &Binding) -> Result<FluentId, PddlError> {
        let f = self.fluent(atom, b)?;
        if self.fluents.is_derived(f) {
            return Err(PddlError::Ground(format!("derived atom {} in an effect", self.fluents.name(f))));
        }
        Ok(f)
    }

    fn derived_body(&mut self, cs: &[Condition], b: &mut Binding, out: &mut Lits) -> Result<(), PddlError> {
        for c in cs {
            match c {
                Condition::Atom { atom, positive } => {
                    let f = self.fluent(atom, b)?;
                    if *positive {
                        out.add.push(f)
                    } else {
                        out.del.push(f)
                    }
                }
                Condition::Equal { .. } => {
                    return Err(PddlError::Ground("equality is not supported in derived predicates".into()))
                }
                Condition::Forall { vars, body } => {
                    let body = body.clone();
                    let mut inner = Lits::default();
                    self.enumerate(vars, b, &[], &mut |g, b| {
                        let mut b = b.clone();
                        g.derived_body(&body, &mut b, &mut inner)
                    })?;
                    out.add.extend(inner.add);
                    out.del.extend(inner.del);
                }
            }
        }
        Ok(())
    }
}

fn tuples(g: &mut Grounder, params: &[TypedName]) -> Vec<Vec<String>> {
    let mut out = vec![Vec::new()];
    for p in params {
        let objs = g.objects_of(&p.ty);
        out = out
            .into_iter()
            .flat_map(|t| {
                objs.iter().map(move |o| {
                    let mut t = t.clone();
                    t.push(o.clone());
                    t
                })
            })
            .collect();
    }
    out
}

/// Grounds one problem.
/// Drops actions and conditional effects that test a fluent no action ever changes
/// against a value it has in no initial state, until nothing more goes.
fn prune_unreachable(actions: &mut Vec<GroundAction>, g: &Grounder) {
    loop {
        let mut changes = vec![false; g.fluents.len()];
        for a in actions.iter() {
            for ce in &a.effects {
                for l in ce.effect.literals() {
                    changes[l.fluent.index()] = true;
                }
            }
        }
        let dead = |s: &LiteralSet| {
            s.literals().any(|l| {
                let i = l.fluent.index();
                !g.fluents.is_derived(l.fluent)
                    && !changes[i]
                    && !(if l.positive { g.true_somewhere[i] } else { g.false_somewhere[i] })
            })
        };
        let before: usize = actions.iter().map(|a| 1 + a.effects.len()).sum();
        actions.retain(|a| !dead(&a.pre));
        for a in actions.iter_mut() {
            if a.effects.iter().any(|ce| dead(&ce.condition)) {
                let effects = a.effects.iter().filter(|ce| !dead(&ce.condition)).cloned().collect();
                *a = GroundAction::new(a.name.clone(), a.pre.clone(), effects);
            }
        }
        if actions.iter().map(|a| 1 + a.effects.len()).sum::<usize>() == before {
            return;
        }
    }
}

pub fn ground(d: &DomainAst, p: &ProblemAst) -> Result<Problem, PddlError> {
    Ok(ground_generalized(d, std::slice::from_ref(p))?.instance(0))
}

/// Grounds several problems over one shared object universe.
pub fn ground_generalized(d: &DomainAst, ps: &[ProblemAst]) -> Result<GeneralizedProblem, PddlError> {
    let first = ps.first().ok_or_else(|| PddlError::Ground("no problems given".into()))?;
    for p in ps {
        check_problem(d, p)?;
        let mut a: Vec<_> = p.objects.iter().map(|o| (&o.name, &o.ty)).collect();
        let mut b: Vec<_> = first.objects.iter().map(|o| (&o.name, &o.ty)).collect();
        a.sort();
        b.sort();
        if a != b {
            return Err(PddlError::Ground(format!("problem {} declares a different object set", p.name)));
        }
    }
    let scope = Scope::new(d)?;
    let mut objects = d.constants.clone();
    for o in &first.objects {
        if !objects.iter().any(|c| c.name == o.name) {
            objects.push(o.clone());
        }
    }
    let mut effect_preds = HashSet::new();
    fn collect<'x>(es: &'x [Effect], out: &mut HashSet<&'x str>) {
        for e in es {
            match e {
                Effect::Literal { atom, .. } => {
                    out.insert(atom.predicate.as_str());
                }
                Effect::When { effect, .. } | Effect::Forall { effect, .. } => collect(effect, out),
            }
        }
    }
    for a in &d.actions {
        collect(&a.effect, &mut effect_preds);
    }
    let static_preds = d
        .predicates
        .iter()
        .map(|p| p.name.as_str())
        .filter(|p| !effect_preds.contains(p))
        .collect();

    let mut g = Grounder {
        scope,
        objects,
        by_type: HashMap::new(),
        fluents: FluentTable::new(),
        static_preds,
        true_somewhere: Vec::new(),
        false_somewhere: Vec::new(),
    };

    for pred in &d.predicates {
        for t in tuples(&mut g, &pred.params) {
            g.fluents.push(Atom { predicate: pred.name.clone(), args: t }).map_err(|e| PddlError::Ground(e.to_string()))?;
        }
    }
    let stored = g.fluents.len();

    let mut inits = Vec::new();
    for p in ps {
        let mut s = State::new(stored);
        for a in &p.init {
            let f = g.fluent(a, &Vec::new())?;
            s.set(f, true);
        }
        inits.push(s);
    }
    g.true_somewhere = (0..stored).map(|i| inits.iter().any(|s| s.get(FluentId(i as u32)))).collect();
    g.false_somewhere = (0..stored).map(|i| inits.iter().any(|s| !s.get(FluentId(i as u32)))).collect();

    for dv in &d.derived {
        for t in tuples(&mut g, &dv.head.params) {
            let mut b: Binding = dv.head.params.iter().map(|p| p.name.clone()).zip(t.iter().cloned()).collect();
            let mut lits = Lits::default();
            g.derived_body(&dv.body, &mut b, &mut lits)?;
            let body = lits
                .into_set()
                .ok_or_else(|| PddlError::Ground(format!("derived {} has a contradictory body", dv.head.name)))?;
            g.fluents
                .push_derived(Atom { predicate: dv.head.name.clone(), args: t }, body)
                .map_err(|e| PddlError::Ground(e.to_string()))?;
        }
    }
    let total = g.fluents.len();
    g.true_somewhere.resize(total, true);
    g.false_somewhere.resize(total, true);

    let mut actions = Vec::new();
    for schema in &d.actions {
        let mut found = Vec::new();
        g.enumerate(&schema.params, &mut Vec::new(), &schema.precondition, &mut |g, b| {
            let mut pre = Lits::default();
            if !g.conditions(&schema.precondition, b, &mut pre)? {
                return Ok(());
            }
            let Some(pre) = pre.into_set() else { return Ok(()) };
            let mut unconditional = Lits::default();
            let mut ces = Vec::new();
            let mut b2 = b.clone();
            g.effects(&schema.effect, &mut b2, &mut unconditional, &mut ces)?;
            let unconditional = unconditional.into_effect();
            if !unconditional.is_empty() {
                ces.insert(0, ConditionalEffect { condition: LiteralSet::empty(), effect: unconditional });
            }
            let name = Atom {
                predicate: schema.name.clone(),
                args: b.iter().map(|(_, o)| o.clone()).collect(),
            };
            found.push(GroundAction::new(name, pre, ces));
            Ok(())
        })?;
        actions.extend(found);
    }
    prune_unreachable(&mut actions, &g);

    let mut instances = Vec::new();
    for (p, mut init) in ps.iter().zip(inits) {
        let mut goal = Lits::default();
        if !g.conditions(&p.goal, &Vec::new(), &mut goal)? {
            return Err(PddlError::Ground(format!("goal of {} is statically false", p.name)));
        }
        let goal = goal
            .into_set()
            .ok_or_else(|| PddlError::Ground(format!("goal of {} is contradictory", p.name)))?;
        let mut full = State::new(total);
        for f in init.true_fluents() {
            full.set(f, true);
        }
        init = full;
        instances.push(Instance { name: p.name.clone(), init, goal });
    }

    let assignments = d.predicates.iter().find(|p| p.name == AssignmentSpace::PREDICATE && p.params.len() == 2).map(|p| {
        let vars = g.objects_of(&p.params[0].ty);
        let vals = g.objects_of(&p.params[1].ty);
        Arc::new(AssignmentSpace::from_table(&g.fluents, vars, vals))
    });

    Ok(GeneralizedProblem {
        fluents: Arc::new(g.fluents),
        actions: Arc::new(actions),
        instances,
        effect_mode: EffectMode::Strict,
        assignments,
    })
}

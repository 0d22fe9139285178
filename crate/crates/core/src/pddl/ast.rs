use std::fmt::Write;

pub const OBJECT: &str = "object";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypedName {
    pub name: String,
    pub ty: String,
}

impl TypedName {
    pub fn new(name: impl Into<String>, ty: impl Into<String>) -> Self {
        TypedName { name: name.into(), ty: ty.into() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Term {
    Var(String),
    Const(String),
}

impl Term {
    pub fn text(&self) -> &str {
        match self {
            Term::Var(s) | Term::Const(s) => s,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AtomTemplate {
    pub predicate: String,
    pub args: Vec<Term>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Condition {
    Atom { atom: AtomTemplate, positive: bool },
    Equal { left: Term, right: Term, positive: bool },
    /// Only allowed in derived-predicate bodies.
    Forall { vars: Vec<TypedName>, body: Vec<Condition> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Effect {
    Literal { atom: AtomTemplate, positive: bool },
    When { condition: Vec<Condition>, effect: Vec<Effect> },
    Forall { vars: Vec<TypedName>, effect: Vec<Effect> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PredicateDecl {
    pub name: String,
    pub params: Vec<TypedName>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivedDecl {
    pub head: PredicateDecl,
    pub body: Vec<Condition>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ActionSchema {
    pub name: String,
    pub params: Vec<TypedName>,
    pub precondition: Vec<Condition>,
    pub effect: Vec<Effect>,
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct DomainAst {
    pub name: String,
    pub requirements: Vec<String>,
    /// `(name, parent)` pairs; the parent of a root type is `object`.
    pub types: Vec<TypedName>,
    pub constants: Vec<TypedName>,
    pub predicates: Vec<PredicateDecl>,
    pub derived: Vec<DerivedDecl>,
    pub actions: Vec<ActionSchema>,
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ProblemAst {
    pub name: String,
    pub domain: String,
    pub objects: Vec<TypedName>,
    pub init: Vec<AtomTemplate>,
    pub goal: Vec<Condition>,
}

fn typed_list(out: &mut String, items: &[TypedName]) {
    // consecutive names of the same type share one `- type` suffix
    let mut i = 0;
    while i < items.len() {
        let mut j = i;
        while j < items.len() && items[j].ty == items[i].ty {
            j += 1;
        }
        for it in &items[i..j] {
            out.push(' ');
            out.push_str(&it.name);
        }
        let _ = write!(out, " - {}", items[i].ty);
        i = j;
    }
}

fn atom_text(a: &AtomTemplate) -> String {
    let mut s = format!("({}", a.predicate);
    for t in &a.args {
        s.push(' ');
        s.push_str(t.text());
    }
    s.push(')');
    s
}

fn negate(s: String, positive: bool) -> String {
    if positive {
        s
    } else {
        format!("(not {s})")
    }
}

pub fn condition_text(c: &Condition) -> String {
    match c {
        Condition::Atom { atom, positive } => negate(atom_text(atom), *positive),
        Condition::Equal { left, right, positive } => {
            negate(format!("(= {} {})", left.text(), right.text()), *positive)
        }
        Condition::Forall { vars, body } => {
            let mut v = String::new();
            typed_list(&mut v, vars);
            format!("(forall ({}) {})", v.trim_start(), conjunction(body))
        }
    }
}

pub fn conjunction(cs: &[Condition]) -> String {
    let parts: Vec<String> = cs.iter().map(condition_text).collect();
    format!("(and {})", parts.join(" "))
}

fn effect_text(e: &Effect) -> String {
    match e {
        Effect::Literal { atom, positive } => negate(atom_text(atom), *positive),
        Effect::When { condition, effect } => {
            format!("(when {} {})", conjunction(condition), effect_conjunction(effect))
        }
        Effect::Forall { vars, effect } => {
            let mut v = String::new();
            typed_list(&mut v, vars);
            format!("(forall ({}) {})", v.trim_start(), effect_conjunction(effect))
        }
    }
}

fn effect_conjunction(es: &[Effect]) -> String {
    let parts: Vec<String> = es.iter().map(effect_text).collect();
    format!("(and {})", parts.join(" "))
}

impl DomainAst {
    pub fn to_pddl(&self) -> String {
        let mut out = format!("(define (domain {})\n", self.name);
        if !self.requirements.is_empty() {
            let _ = writeln!(out, "  (:requirements {})", self.requirements.join(" "));
        }
        if !self.types.is_empty() {
            out.push_str("  (:types");
            typed_list(&mut out, &self.types);
            out.push_str(")\n");
        }
        if !self.constants.is_empty() {
            out.push_str("  (:constants");
            typed_list(&mut out, &self.constants);
            out.push_str(")\n");
        }
        out.push_str("  (:predicates");
        for p in &self.predicates {
            let _ = write!(out, "\n    ({}", p.name);
            typed_list(&mut out, &p.params);
            out.push(')');
        }
        out.push_str(")\n");
        for d in &self.derived {
            let mut head = format!("({}", d.head.name);
            typed_list(&mut head, &d.head.params);
            head.push(')');
            let _ = writeln!(out, "  (:derived {head}\n    {})", conjunction(&d.body));
        }
        for a in &self.actions {
            let _ = write!(out, "  (:action {}\n    :parameters (", a.name);
            let mut params = String::new();
            typed_list(&mut params, &a.params);
            out.push_str(params.trim_start());
            out.push(')');
            if !a.precondition.is_empty() {
                let _ = write!(out, "\n    :precondition {}", conjunction(&a.precondition));
            }
            let _ = writeln!(out, "\n    :effect {})", effect_conjunction(&a.effect));
        }
        out.push_str(")\n");
        out
    }
}

impl ProblemAst {
    pub fn to_pddl(&self) -> String {
        let mut out = format!("(define (problem {})\n  (:domain {})\n  (:objects", self.name, self.domain);
        typed_list(&mut out, &self.objects);
        out.push_str(")\n  (:init");
        for a in &self.init {
            out.push_str("\n    ");
            out.push_str(&atom_text(a));
        }
        let _ = writeln!(out, ")\n  (:goal {}))", conjunction(&self.goal));
        out
    }
}

use std::collections::{HashMap, HashSet};

use super::ast::*;
use super::sexpr::{read, syntax, Pos, SExpr};
use super::PddlError;

pub const SUPPORTED_REQUIREMENTS: &[&str] = &[
    ":strips",
    ":typing",
    ":negative-preconditions",
    ":conditional-effects",
    ":equality",
    ":derived-predicates",
];

fn expect_list<'a>(e: &'a SExpr, what: &str) -> Result<&'a [SExpr], PddlError> {
    e.list().ok_or_else(|| syntax(e.pos(), format!("expected list for {what}")))
}

fn expect_symbol<'a>(e: &'a SExpr, what: &str) -> Result<&'a str, PddlError> {
    e.symbol().ok_or_else(|| syntax(e.pos(), format!("expected symbol for {what}")))
}

/// `a b - t c - u d` → typed names; untyped names default to `object`.
fn typed_list(items: &[SExpr]) -> Result<Vec<TypedName>, PddlError> {
    let mut out = Vec::new();
    let mut pending: Vec<String> = Vec::new();
    let mut i = 0;
    while i < items.len() {
        let e = &items[i];
        if e.list().is_some() {
            if e.head() == Some("either") {
                return Err(PddlError::UnsupportedRequirement("either-types".into()));
            }
            return Err(syntax(e.pos(), "unexpected list in typed list"));
        }
        let s = e.symbol().unwrap();
        if s == "-" {
            let ty = items.get(i + 1).ok_or_else(|| syntax(e.pos(), "missing type after '-'"))?;
            if ty.head() == Some("either") {
                return Err(PddlError::UnsupportedRequirement("either-types".into()));
            }
            let ty = expect_symbol(ty, "type name")?;
            if pending.is_empty() {
                return Err(syntax(e.pos(), "'-' without preceding names"));
            }
            out.extend(pending.drain(..).map(|n| TypedName::new(n, ty)));
            i += 2;
        } else {
            pending.push(s.to_string());
            i += 1;
        }
    }
    out.extend(pending.into_iter().map(|n| TypedName::new(n, OBJECT)));
    Ok(out)
}

fn term(s: &str) -> Term {
    if let Some(stripped) = s.strip_prefix('?') {
        Term::Var(format!("?{stripped}"))
    } else {
        Term::Const(s.to_string())
    }
}

fn atom_template(items: &[SExpr], pos: Pos) -> Result<AtomTemplate, PddlError> {
    let pred = items.first().ok_or_else(|| syntax(pos, "empty atom"))?;
    let predicate = expect_symbol(pred, "predicate")?.to_string();
    let args = items[1..]
        .iter()
        .map(|a| expect_symbol(a, "argument").map(term))
        .collect::<Result<_, _>>()?;
    Ok(AtomTemplate { predicate, args })
}

fn unsupported_connective(head: &str) -> Option<&'static str> {
    match head {
        "or" => Some(":disjunctive-preconditions"),
        "imply" => Some(":disjunctive-preconditions"),
        "exists" => Some(":existential-preconditions"),
        "forall" => Some(":universal-preconditions"),
        _ => None,
    }
}

/// Parses a goal description into a flat conjunction. `forall` only in derived bodies.
fn conditions(e: &SExpr, allow_forall: bool, out: &mut Vec<Condition>) -> Result<(), PddlError> {
    let items = expect_list(e, "condition")?;
    match e.head() {
        Some("and") => {
            for c in &items[1..] {
                conditions(c, allow_forall, out)?;
            }
            Ok(())
        }
        Some("not") => {
            if items.len() != 2 {
                return Err(syntax(e.pos(), "'not' takes one argument"));
            }
            let inner = &items[1];
            let inner_items = expect_list(inner, "negated atom")?;
            match inner.head() {
                Some("=") => out.push(equality(inner_items, inner.pos(), false)?),
                Some(h) if unsupported_connective(h).is_some() || h == "and" || h == "not" => {
                    return Err(PddlError::UnsupportedRequirement(":disjunctive-preconditions".into()))
                }
                _ => out.push(Condition::Atom { atom: atom_template(inner_items, inner.pos())?, positive: false }),
            }
            Ok(())
        }
        Some("=") => {
            out.push(equality(items, e.pos(), true)?);
            Ok(())
        }
        Some("forall") if allow_forall => {
            if items.len() != 3 {
                return Err(syntax(e.pos(), "forall takes a variable list and a body"));
            }
            let vars = typed_list(expect_list(&items[1], "forall variables")?)?;
            let mut body = Vec::new();
            conditions(&items[2], allow_forall, &mut body)?;
            out.push(Condition::Forall { vars, body });
            Ok(())
        }
        Some(h) if unsupported_connective(h).is_some() => {
            Err(PddlError::UnsupportedRequirement(unsupported_connective(h).unwrap().into()))
        }
        _ => {
            out.push(Condition::Atom { atom: atom_template(items, e.pos())?, positive: true });
            Ok(())
        }
    }
}

fn equality(items: &[SExpr], pos: Pos, positive: bool) -> Result<Condition, PddlError> {
    if items.len() != 3 {
        return Err(syntax(pos, "'=' takes two arguments"));
    }
    Ok(Condition::Equal {
        left: term(expect_symbol(&items[1], "term")?),
        right: term(expect_symbol(&items[2], "term")?),
        positive,
    })
}

fn effects(e: &SExpr, nested_in_when: bool, out: &mut Vec<Effect>) -> Result<(), PddlError> {
    let items = expect_list(e, "effect")?;
    match e.head() {
        Some("and") => {
            for c in &items[1..] {
                effects(c, nested_in_when, out)?;
            }
            Ok(())
        }
        Some("not") => {
            if items.len() != 2 {
                return Err(syntax(e.pos(), "'not' takes one argument"));
            }
            let inner = expect_list(&items[1], "negated atom")?;
            out.push(Effect::Literal { atom: atom_template(inner, items[1].pos())?, positive: false });
            Ok(())
        }
        Some("when") => {
            if nested_in_when {
                return Err(syntax(e.pos(), "nested 'when'"));
            }
            if items.len() != 3 {
                return Err(syntax(e.pos(), "'when' takes a condition and an effect"));
            }
            let mut condition = Vec::new();
            conditions(&items[1], false, &mut condition)?;
            let mut effect = Vec::new();
            effects(&items[2], true, &mut effect)?;
            out.push(Effect::When { condition, effect });
            Ok(())
        }
        Some("forall") => {
            if nested_in_when {
                return Err(syntax(e.pos(), "'forall' inside 'when'"));
            }
            if items.len() != 3 {
                return Err(syntax(e.pos(), "forall takes a variable list and an effect"));
            }
            let vars = typed_list(expect_list(&items[1], "forall variables")?)?;
            let mut effect = Vec::new();
            effects(&items[2], false, &mut effect)?;
            out.push(Effect::Forall { vars, effect });
            Ok(())
        }
        Some("increase") | Some("decrease") | Some("assign") if items.len() == 3 && items[1].list().is_some() => {
            Err(PddlError::UnsupportedRequirement(":numeric-fluents".into()))
        }
        _ => {
            out.push(Effect::Literal { atom: atom_template(items, e.pos())?, positive: true });
            Ok(())
        }
    }
}

fn define_header<'a>(e: &'a SExpr, kind: &str) -> Result<(&'a [SExpr], String), PddlError> {
    let items = expect_list(e, "define")?;
    if e.head() != Some("define") {
        return Err(syntax(e.pos(), "expected (define ...)"));
    }
    let header = items.get(1).ok_or_else(|| syntax(e.pos(), format!("missing ({kind} name)")))?;
    let h = expect_list(header, kind)?;
    if header.head() != Some(kind) || h.len() != 2 {
        return Err(syntax(header.pos(), format!("expected ({kind} name)")));
    }
    Ok((&items[2..], expect_symbol(&h[1], "name")?.to_string()))
}

pub fn parse_domain(text: &str) -> Result<DomainAst, PddlError> {
    let top = read(text)?;
    let (sections, name) = define_header(&top, "domain")?;
    let mut d = DomainAst { name, ..Default::default() };
    for sec in sections {
        let items = expect_list(sec, "domain section")?;
        match sec.head() {
            Some(":requirements") => {
                for r in &items[1..] {
                    let r = expect_symbol(r, "requirement")?;
                    if !SUPPORTED_REQUIREMENTS.contains(&r) {
                        return Err(PddlError::UnsupportedRequirement(r.to_string()));
                    }
                    d.requirements.push(r.to_string());
                }
            }
            Some(":types") => d.types = typed_list(&items[1..])?,
            Some(":constants") => d.constants = typed_list(&items[1..])?,
            Some(":predicates") => {
                for p in &items[1..] {
                    let pi = expect_list(p, "predicate")?;
                    let name = expect_symbol(pi.first().ok_or_else(|| syntax(p.pos(), "empty predicate"))?, "predicate")?;
                    d.predicates.push(PredicateDecl { name: name.to_string(), params: typed_list(&pi[1..])? });
                }
            }
            Some(":functions") => return Err(PddlError::UnsupportedRequirement(":numeric-fluents".into())),
            Some(":derived") => {
                if items.len() != 3 {
                    return Err(syntax(sec.pos(), ":derived takes a head and a body"));
                }
                let hi = expect_list(&items[1], "derived head")?;
                let name = expect_symbol(hi.first().ok_or_else(|| syntax(sec.pos(), "empty head"))?, "predicate")?;
                let head = PredicateDecl { name: name.to_string(), params: typed_list(&hi[1..])? };
                let mut body = Vec::new();
                conditions(&items[2], true, &mut body)?;
                d.derived.push(DerivedDecl { head, body });
            }
            Some(":action") => d.actions.push(action(sec, items)?),
            _ => return Err(syntax(sec.pos(), "unknown domain section")),
        }
    }
    check_domain(&d)?;
    Ok(d)
}

fn action(sec: &SExpr, items: &[SExpr]) -> Result<ActionSchema, PddlError> {
    let name = expect_symbol(items.get(1).ok_or_else(|| syntax(sec.pos(), "missing action name"))?, "action name")?;
    let mut a = ActionSchema { name: name.to_string(), params: vec![], precondition: vec![], effect: vec![] };
    let mut i = 2;
    while i < items.len() {
        let key = expect_symbol(&items[i], "action keyword")?;
        let val = items.get(i + 1).ok_or_else(|| syntax(items[i].pos(), "missing value"))?;
        match key {
            ":parameters" => a.params = typed_list(expect_list(val, "parameters")?)?,
            ":precondition" => conditions(val, false, &mut a.precondition)?,
            ":effect" => effects(val, false, &mut a.effect)?,
            _ => return Err(syntax(items[i].pos(), format!("unknown action keyword {key}"))),
        }
        i += 2;
    }
    Ok(a)
}

pub(crate) struct Scope<'a> {
    pub types: HashMap<&'a str, &'a str>,
    pub predicates: HashMap<&'a str, &'a [TypedName]>,
    pub constants: HashSet<&'a str>,
}

impl<'a> Scope<'a> {
    pub fn new(d: &'a DomainAst) -> Result<Self, PddlError> {
        let mut types = HashMap::new();
        types.insert(OBJECT, OBJECT);
        for t in &d.types {
            types.insert(t.name.as_str(), t.ty.as_str());
        }
        for t in &d.types {
            if !types.contains_key(t.ty.as_str()) {
                return Err(PddlError::Semantic(format!("undeclared type {}", t.ty)));
            }
            // reject cycles
            let mut cur = t.name.as_str();
            for _ in 0..=types.len() {
                if cur == OBJECT {
                    break;
                }
                cur = types[cur];
            }
            if cur != OBJECT {
                return Err(PddlError::Semantic(format!("cyclic type {}", t.name)));
            }
        }
        let mut predicates = HashMap::new();
        for p in d.predicates.iter().chain(d.derived.iter().map(|x| &x.head)) {
            if predicates.insert(p.name.as_str(), p.params.as_slice()).is_some() {
                return Err(PddlError::Semantic(format!("predicate {} declared twice", p.name)));
            }
        }
        let constants = d.constants.iter().map(|c| c.name.as_str()).collect();
        Ok(Scope { types, predicates, constants })
    }

    pub fn check_type(&self, ty: &str) -> Result<(), PddlError> {
        if self.types.contains_key(ty) {
            Ok(())
        } else {
            Err(PddlError::Semantic(format!("undeclared type {ty}")))
        }
    }

    pub fn is_subtype(&self, ty: &str, of: &str) -> bool {
        let mut cur = ty;
        for _ in 0..=self.types.len() {
            if cur == of {
                return true;
            }
            if cur == OBJECT {
                return false;
            }
            match self.types.get(cur) {
                Some(parent) => cur = parent,
                None => return false,
            }
        }
        false
    }
}

fn check_terms(scope: &Scope, vars: &HashSet<String>, terms: &[&Term]) -> Result<(), PddlError> {
    for t in terms {
        match t {
            Term::Var(v) if !vars.contains(v) => {
                return Err(PddlError::Semantic(format!("unbound variable {v}")))
            }
            Term::Const(c) if !scope.constants.contains(c.as_str()) => {
                return Err(PddlError::Semantic(format!("undeclared constant {c}")))
            }
            _ => {}
        }
    }
    Ok(())
}

fn check_atom(scope: &Scope, vars: &HashSet<String>, a: &AtomTemplate) -> Result<(), PddlError> {
    let params = scope
        .predicates
        .get(a.predicate.as_str())
        .ok_or_else(|| PddlError::Semantic(format!("undeclared predicate {}", a.predicate)))?;
    if params.len() != a.args.len() {
        return Err(PddlError::Semantic(format!("wrong arity for {}", a.predicate)));
    }
    check_terms(scope, vars, &a.args.iter().collect::<Vec<_>>())
}

fn check_conditions(scope: &Scope, vars: &HashSet<String>, cs: &[Condition]) -> Result<(), PddlError> {
    for c in cs {
        match c {
            Condition::Atom { atom, .. } => check_atom(scope, vars, atom)?,
            Condition::Equal { left, right, .. } => check_terms(scope, vars, &[left, right])?,
            Condition::Forall { vars: fv, body } => {
                let mut inner = vars.clone();
                for v in fv {
                    scope.check_type(&v.ty)?;
                    inner.insert(v.name.clone());
                }
                check_conditions(scope, &inner, body)?;
            }
        }
    }
    Ok(())
}

fn check_effects(scope: &Scope, vars: &HashSet<String>, es: &[Effect]) -> Result<(), PddlError> {
    for e in es {
        match e {
            Effect::Literal { atom, .. } => check_atom(scope, vars, atom)?,
            Effect::When { condition, effect } => {
                check_conditions(scope, vars, condition)?;
                check_effects(scope, vars, effect)?;
            }
            Effect::Forall { vars: fv, effect } => {
                let mut inner = vars.clone();
                for v in fv {
                    scope.check_type(&v.ty)?;
                    inner.insert(v.name.clone());
                }
                check_effects(scope, &inner, effect)?;
            }
        }
    }
    Ok(())
}

fn check_domain(d: &DomainAst) -> Result<(), PddlError> {
    let scope = Scope::new(d)?;
    for c in &d.constants {
        scope.check_type(&c.ty)?;
    }
    for p in &d.predicates {
        for t in &p.params {
            scope.check_type(&t.ty)?;
        }
    }
    for dv in &d.derived {
        let vars: HashSet<String> = dv.head.params.iter().map(|p| p.name.clone()).collect();
        check_conditions(&scope, &vars, &dv.body)?;
    }
    for a in &d.actions {
        for p in &a.params {
            scope.check_type(&p.ty)?;
        }
        let vars: HashSet<String> = a.params.iter().map(|p| p.name.clone()).collect();
        check_conditions(&scope, &vars, &a.precondition)?;
        check_effects(&scope, &vars, &a.effect)?;
    }
    Ok(())
}

pub fn parse_problem(text: &str) -> Result<ProblemAst, PddlError> {
    let top = read(text)?;
    let (sections, name) = define_header(&top, "problem")?;
    let mut p = ProblemAst { name, ..Default::default() };
    for sec in sections {
        let items = expect_list(sec, "problem section")?;
        match sec.head() {
            Some(":domain") => {
                p.domain = expect_symbol(items.get(1).ok_or_else(|| syntax(sec.pos(), "missing domain"))?, "domain")?
                    .to_string()
            }
            Some(":objects") => p.objects = typed_list(&items[1..])?,
            Some(":init") => {
                for a in &items[1..] {
                    let ai = expect_list(a, "init atom")?;
                    if a.head() == Some("not") {
                        continue; // closed world
                    }
                    let atom = atom_template(ai, a.pos())?;
                    if atom.args.iter().any(|t| matches!(t, Term::Var(_))) {
                        return Err(syntax(a.pos(), "init atoms must be ground"));
                    }
                    p.init.push(atom);
                }
            }
            Some(":goal") => {
                let g = items.get(1).ok_or_else(|| syntax(sec.pos(), "missing goal"))?;
                conditions(g, false, &mut p.goal)?;
            }
            Some(":requirements") => {}
            Some(":metric") => return Err(PddlError::UnsupportedRequirement(":numeric-fluents".into())),
            _ => return Err(syntax(sec.pos(), "unknown problem section")),
        }
    }
    Ok(p)
}

/// Checks a problem against its domain: object types, init atoms, goal atoms.
pub fn check_problem(d: &DomainAst, p: &ProblemAst) -> Result<(), PddlError> {
    let mut scope = Scope::new(d)?;
    for o in &p.objects {
        scope.check_type(&o.ty).map_err(|_| {
            PddlError::Semantic(format!("object {} has undeclared type {}", o.name, o.ty))
        })?;
    }
    for o in &p.objects {
        scope.constants.insert(o.name.as_str());
    }
    let none = HashSet::new();
    for a in &p.init {
        check_atom(&scope, &none, a)?;
    }
    check_conditions(&scope, &none, &p.goal)?;
    Ok(())
}

use std::sync::Arc;

use super::{
    inject_priors, tuple_of, CompileError, CompiledProblem, DecodingKey, KeyEntry, Layout, Role, SynthesisParams,
    KEY_FORMAT,
};
use crate::model::{
    Atom, ConditionalEffect, FluentId, FluentTable, GeneralizedProblem, GroundAction, LiteralSet, Problem, State,
};

fn lits(pos: impl IntoIterator<Item = FluentId>, neg: impl IntoIterator<Item = FluentId>) -> LiteralSet {
    LiteralSet::new(pos, neg).expect("compiled literal sets are consistent by construction")
}

fn join(a: &LiteralSet, b: &LiteralSet) -> LiteralSet {
    a.union(b).expect("compiled literal sets are consistent by construction")
}

fn always(effect: LiteralSet) -> ConditionalEffect {
    ConditionalEffect { condition: LiteralSet::empty(), effect }
}

struct Builder {
    hier: bool,
    table: FluentTable,
    actions: Vec<GroundAction>,
    entries: Vec<KeyEntry>,
}

impl Builder {
    fn fluent(&mut self, predicate: &str, args: Vec<String>) -> Result<FluentId, CompileError> {
        let atom = Atom::new(predicate, args);
        self.table.push(atom.clone()).map_err(|_| CompileError::NameClash(atom))
    }

    /// Appends the controller token in hierarchical mode.
    fn ci(&self, mut args: Vec<String>, i: usize) -> Vec<String> {
        if self.hier {
            args.push(format!("c{i}"));
        }
        args
    }

    fn lv(&self, mut args: Vec<String>, l: usize) -> Vec<String> {
        if self.hier {
            args.push(format!("l{l}"));
        }
        args
    }

    fn action(&mut self, role: Role, args: Vec<String>, pre: LiteralSet, effects: Vec<ConditionalEffect>) {
        let name = Atom::new(role.name(), args);
        self.entries.push(KeyEntry { name: name.flat_name(), role });
        self.actions.push(GroundAction::new(name, pre, effects));
    }
}

fn q(q: usize) -> String {
    format!("q{q}")
}

fn b(b: bool) -> String {
    format!("b{}", b as u8)
}

/// `P_n`: a single controller with states `q_0..q_n`.
pub fn compile_flat(gp: &GeneralizedProblem, n: usize) -> Result<CompiledProblem, CompileError> {
    compile(gp, &SynthesisParams::flat(n), false)
}

/// `P_{n,m}^ℓ` with parameter lists and priors from `params`.
pub fn compile_hier(gp: &GeneralizedProblem, params: &SynthesisParams) -> Result<CompiledProblem, CompileError> {
    compile(gp, params, true)
}

fn compile(gp: &GeneralizedProblem, params: &SynthesisParams, hier: bool) -> Result<CompiledProblem, CompileError> {
    if gp.is_empty() {
        return Err(CompileError::NoInstances);
    }
    params.validate()?;
    if !hier && (params.m != 1 || params.stack != 0 || !params.params.is_empty()) {
        return Err(CompileError::InvalidParams("a flat compilation has one controller and no stack".into()));
    }
    let n = params.n;
    let nq = n + 1;
    let m = params.m;
    let levels = if hier { params.stack + 1 } else { 1 };
    let nf = gp.fluents.len();
    let na = gp.actions.len();
    let num_instances = gp.len();

    let (variables, values, assign_table) = match (&gp.assignments, hier) {
        (Some(space), true) => {
            if !space.is_complete() {
                return Err(CompileError::MissingAssignmentFluents(space.missing()));
            }
            (space.variables.clone(), space.values.clone(), space.table.clone())
        }
        _ => (Vec::new(), Vec::new(), Vec::new()),
    };
    let mut assignment = vec![false; nf];
    for f in assign_table.iter().flatten().flatten() {
        assignment[f.index()] = true;
    }
    let mut controller_params: Vec<Vec<usize>> = Vec::with_capacity(m);
    for i in 0..m {
        let names = params.params_of(i);
        let mut idx = Vec::with_capacity(names.len());
        for v in names {
            let k = variables.iter().position(|x| x == v).ok_or_else(|| CompileError::UnknownName(v.clone()))?;
            if idx.contains(&k) {
                return Err(CompileError::InvalidParams(format!("controller {i} repeats parameter {v}")));
            }
            idx.push(k);
        }
        controller_params.push(idx);
    }

    let mut bld = Builder { hier, table: FluentTable::new(), actions: Vec::new(), entries: Vec::new() };
    for f in gp.fluents.ids() {
        let name = gp.fluents.name(f).clone();
        match gp.fluents.derived_body(f) {
            Some(body) => bld.table.push_derived(name, body.clone()),
            None => bld.table.push(name),
        }
        .expect("input fluent table is valid");
    }
    let mut layout = Layout {
        num_states: nq,
        m,
        levels,
        num_fluents: nf,
        num_actions: na,
        assignment: assignment.clone(),
        ..Default::default()
    };
    layout.level_map.push(gp.fluents.ids().collect());
    for l in 1..levels {
        let mut map = Vec::with_capacity(nf);
        for f in gp.fluents.ids() {
            if assignment[f.index()] {
                let name = gp.fluents.name(f);
                map.push(bld.fluent(&format!("{}-l{l}", name.predicate), name.args.clone())?);
            } else {
                map.push(f);
            }
        }
        layout.level_map.push(map);
    }

    for i in 0..m {
        for s in 0..nq {
            for f in 0..nf {
                let id = bld.fluent("cond", bld.ci(vec![q(s), format!("f{f}")], i))?;
                layout.cond.push(id);
            }
        }
        for s in 0..nq {
            for br in [false, true] {
                for t in 0..nq {
                    let id = bld.fluent("succ", bld.ci(vec![q(s), b(br), q(t)], i))?;
                    layout.succ.push(id);
                }
            }
        }
        for s in 0..nq {
            for br in [false, true] {
                for a in 0..na {
                    let id = bld.fluent("act", bld.ci(vec![q(s), b(br), format!("a{a}")], i))?;
                    layout.act.push(id);
                }
            }
        }
        for s in 0..nq {
            let id = bld.fluent("nocond", bld.ci(vec![q(s)], i))?;
            layout.nocond.push(id);
        }
        for s in 0..nq {
            for br in [false, true] {
                let id = bld.fluent("nosucc", bld.ci(vec![q(s), b(br)], i))?;
                layout.nosucc.push(id);
            }
        }
        for s in 0..nq {
            for br in [false, true] {
                let id = bld.fluent("noact", bld.ci(vec![q(s), b(br)], i))?;
                layout.noact.push(id);
            }
        }
    }
    for l in 0..levels {
        for s in 0..nq {
            let id = bld.fluent("cs", bld.lv(vec![q(s)], l))?;
            layout.cs.push(id);
        }
        let id = bld.fluent("evl", bld.lv(vec![], l))?;
        layout.evl.push(id);
        let id = bld.fluent("app", bld.lv(vec![], l))?;
        layout.app.push(id);
        for br in [false, true] {
            let id = bld.fluent(&format!("o{}", br as u8), bld.lv(vec![], l))?;
            layout.outcome.push(id);
        }
    }
    let nv = variables.len();
    let arity = |j: usize| controller_params[j].len();
    let tuples = |j: usize| nv.pow(arity(j) as u32);
    if hier {
        for l in 0..levels {
            let id = bld.fluent("lvl", vec![format!("l{l}")])?;
            layout.lvl.push(id);
        }
        for i in 0..m {
            for l in 0..levels {
                let id = bld.fluent("fsc", vec![format!("c{i}"), format!("l{l}")])?;
                layout.fsc.push(id);
            }
        }
        for i in 0..m {
            for s in 0..nq {
                for br in [false, true] {
                    let mut per_j = Vec::with_capacity(m);
                    for j in 0..m {
                        let mut ids = Vec::with_capacity(tuples(j));
                        for t in 0..tuples(j) {
                            let mut args = vec![q(s), b(br), format!("c{i}"), format!("j{j}")];
                            args.extend(tuple_of(t, nv, arity(j)).into_iter().map(|v| variables[v].clone()));
                            ids.push(bld.fluent("call", args)?);
                        }
                        per_j.push(ids);
                    }
                    layout.call.push(per_j);
                }
            }
        }
    }
    if num_instances > 1 {
        for t in 0..num_instances {
            let id = bld.fluent("inst", vec![format!("t{}", t + 1)])?;
            layout.inst.push(id);
        }
    }

    let map = |set: &LiteralSet, l: usize| -> LiteralSet {
        set.map_fluents(|f| layout.level_map[l][f.index()]).expect("level copies keep literal sets consistent")
    };
    let program_args = |bld: &Builder, base: Vec<String>, i: usize, l: usize| bld.lv(bld.ci(base, i), l);

    for i in 0..m {
        for l in 0..levels {
            let ctx: Vec<FluentId> = if hier { vec![layout.lvl[l], layout.fsc[i * levels + l]] } else { vec![] };
            let with_ctx = |extra: &[FluentId], neg: &[FluentId]| -> LiteralSet {
                lits(ctx.iter().chain(extra).copied(), neg.iter().copied())
            };
            let evl = layout.evl[l];
            let app = layout.app[l];
            for s in 0..n {
                let cs = layout.cs(l, s);
                for f in 0..nf {
                    let args = program_args(&bld, vec![q(s), format!("f{f}")], i, l);
                    let nocond = layout.nocond(i, s);
                    let cond = layout.cond(i, s, f);
                    bld.action(
                        Role::Pcond { i, l, q: s, f },
                        args.clone(),
                        with_ctx(&[cs, nocond], &[]),
                        vec![always(lits([cond], [nocond]))],
                    );
                    let (o0, o1) = (layout.outcome(l, false), layout.outcome(l, true));
                    let mut effects = vec![always(lits([evl], []))];
                    match gp.fluents.derived_body(FluentId(f as u32)) {
                        Some(body) => {
                            let body = map(body, l);
                            for lit in body.literals() {
                                effects.push(ConditionalEffect {
                                    condition: LiteralSet::from_literals([lit.negated()]).unwrap(),
                                    effect: lits([o0], []),
                                });
                            }
                            effects.push(ConditionalEffect { condition: body, effect: lits([o1], []) });
                        }
                        None => {
                            let fl = layout.level_map[l][f];
                            effects.push(ConditionalEffect { condition: lits([], [fl]), effect: lits([o0], []) });
                            effects.push(ConditionalEffect { condition: lits([fl], []), effect: lits([o1], []) });
                        }
                    }
                    bld.action(Role::Econd { i, l, q: s, f }, args, with_ctx(&[cs, cond], &[evl]), effects);
                }
                for br in [false, true] {
                    let o = layout.outcome(l, br);
                    let noact = layout.noact(i, s, br);
                    for (a, action) in gp.actions.iter().enumerate() {
                        let args = program_args(&bld, vec![q(s), b(br), format!("a{a}")], i, l);
                        let pre_a = map(&action.pre, l);
                        let act = layout.act(i, s, br, a);
                        bld.action(
                            Role::Pact { i, l, q: s, b: br, a },
                            args.clone(),
                            join(&pre_a, &with_ctx(&[cs, evl, o, noact], &[])),
                            vec![always(lits([act], [noact]))],
                        );
                        let mut effects: Vec<ConditionalEffect> = action
                            .effects
                            .iter()
                            .map(|ce| ConditionalEffect { condition: map(&ce.condition, l), effect: map(&ce.effect, l) })
                            .collect();
                        effects.push(always(lits([app], [])));
                        bld.action(
                            Role::Eact { i, l, q: s, b: br, a },
                            args,
                            join(&pre_a, &with_ctx(&[cs, evl, o, act], &[app])),
                            effects,
                        );
                    }
                    let nosucc = layout.nosucc(i, s, br);
                    for t in 0..nq {
                        let args = program_args(&bld, vec![q(s), b(br), q(t)], i, l);
                        let succ = layout.succ(i, s, br, t);
                        bld.action(
                            Role::Psucc { i, l, q: s, b: br, next: t },
                            args.clone(),
                            with_ctx(&[cs, evl, o, app, nosucc], &[]),
                            vec![always(lits([succ], [nosucc]))],
                        );
                        let mut del = vec![evl, o, app];
                        if t != s {
                            del.push(cs);
                        }
                        bld.action(
                            Role::Esucc { i, l, q: s, b: br, next: t },
                            args,
                            with_ctx(&[cs, evl, o, app, succ], &[]),
                            vec![always(lits([layout.cs(l, t)], del))],
                        );
                    }
                    if hier && l + 1 < levels {
                        for j in 0..m {
                            for t in 0..tuples(j) {
                                let tuple = tuple_of(t, nv, arity(j));
                                let mut args = program_args(&bld, vec![q(s), b(br)], i, l);
                                args.push(format!("j{j}"));
                                args.extend(tuple.iter().map(|&v| variables[v].clone()));
                                let call = layout.call(i, s, br, j, t);
                                bld.action(
                                    Role::Pcall { i, l, q: s, b: br, j, args: tuple.clone() },
                                    args.clone(),
                                    with_ctx(&[cs, evl, o, noact], &[]),
                                    vec![always(lits([call], [noact]))],
                                );
                                let mut effects = vec![always(lits(
                                    [layout.lvl[l + 1], layout.cs(l + 1, 0), app, layout.fsc[j * levels + l + 1]],
                                    [layout.lvl[l]],
                                ))];
                                for (k, &p) in tuple.iter().enumerate() {
                                    let target = controller_params[j][k];
                                    for x in 0..values.len() {
                                        let src = assign_table[p][x].unwrap();
                                        let dst = assign_table[target][x].unwrap();
                                        effects.push(ConditionalEffect {
                                            condition: lits([layout.level_map[l][src.index()]], []),
                                            effect: lits([layout.level_map[l + 1][dst.index()]], []),
                                        });
                                    }
                                }
                                bld.action(
                                    Role::Ecall { i, l, q: s, b: br, j, args: tuple },
                                    args,
                                    with_ctx(&[cs, evl, o, call], &[app]),
                                    effects,
                                );
                            }
                        }
                    }
                }
            }
            if hier && l > 0 {
                let fsc = layout.fsc[i * levels + l];
                let mut del = vec![layout.lvl[l], fsc, layout.cs(l, n)];
                del.extend(assign_table.iter().flatten().flatten().map(|f| layout.level_map[l][f.index()]));
                bld.action(
                    Role::Term { i, l },
                    vec![format!("c{i}"), format!("l{l}")],
                    lits([layout.lvl[l], fsc, layout.cs(l, n)], []),
                    vec![always(lits([layout.lvl[l - 1]], del))],
                );
            }
        }
    }

    let world: Vec<FluentId> = gp.fluents.ids().filter(|&f| !gp.fluents.is_derived(f)).collect();
    for t in 0..num_instances.saturating_sub(1) {
        let next = &gp.instances[t + 1].init;
        let pre = join(&gp.instances[t].goal, &lits([layout.cs(0, n), layout.inst[t]], []));
        let mut add: Vec<FluentId> = world.iter().copied().filter(|&f| next.get(f)).collect();
        let mut del: Vec<FluentId> = world.iter().copied().filter(|&f| !next.get(f)).collect();
        add.extend([layout.cs(0, 0), layout.inst[t + 1]]);
        del.extend([layout.cs(0, n), layout.inst[t]]);
        bld.action(Role::End { t }, vec![format!("t{}", t + 1)], pre, vec![always(lits(add, del))]);
    }

    let total = bld.table.len();
    let mut init = State::new(total);
    for f in gp.instances[0].init.true_fluents() {
        if !gp.fluents.is_derived(f) {
            init.set(f, true);
        }
    }
    init.set(layout.cs(0, 0), true);
    for f in layout.program_markers().collect::<Vec<_>>() {
        init.set(f, true);
    }
    if hier {
        init.set(layout.lvl[0], true);
        init.set(layout.fsc[0], true);
    }
    let mut goal_extra = vec![layout.cs(0, n)];
    if num_instances > 1 {
        init.set(layout.inst[0], true);
        goal_extra.push(layout.inst[num_instances - 1]);
    }
    let goal = join(&gp.instances[num_instances - 1].goal, &lits(goal_extra, []));

    let key = DecodingKey {
        format: KEY_FORMAT.into(),
        hierarchical: hier,
        n,
        m,
        stack: levels - 1,
        instances: num_instances,
        fluents: gp.fluents.ids().map(|f| gp.fluents.name(f).clone()).collect(),
        actions: gp.actions.iter().map(|a| a.name.clone()).collect(),
        variables: variables.clone(),
        values,
        controller_params: (0..m).map(|i| params.params_of(i).to_vec()).collect(),
        entries: bld.entries,
        priors: Vec::new(),
    };
    let problem = Problem {
        fluents: Arc::new(bld.table),
        actions: Arc::new(bld.actions),
        init,
        goal,
        effect_mode: gp.effect_mode,
        assignments: None,
    };
    inject_priors(CompiledProblem { problem, key, layout }, &params.priors)
}

//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 when a controller fails an instance or synthesis proves
//! the bounds insufficient, 2 on usage or input errors, 3 when a search budget runs out.

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use thiserror::Error;

use crate::compile::{compile_flat, compile_hier, priors_from_hierarchy, CompileError, DecodingKey, Prior, SynthesisParams};
use crate::decode::{decode, DecodeError};
use crate::domains::{generate, visitall_priors, DomainError, DomainKind, DomainSpec};
use crate::fsc::{self, FscError, Hierarchy, Limits, Verdict};
use crate::model::{ActionId, GeneralizedProblem, Plan};
use crate::pddl::{emit, emit_generalized, ground_generalized, parse_domain, parse_problem, PddlError};
use crate::planner::{solve_default, Outcome, SearchStats};

pub const REPORT_FORMAT: &str = "hfsc-report-v1";

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Pddl(#[from] PddlError),
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error(transparent)]
    Compile(#[from] CompileError),
    #[error(transparent)]
    Decode(#[from] DecodeError),
    #[error(transparent)]
    Fsc(#[from] FscError),
    #[error("{0}")]
    Usage(String),
}

#[derive(Debug, Parser)]
#[command(name = "hfsc", version, about = "Synthesize hierarchical finite state controllers for generalized planning")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compile, plan and decode a controller for a set of instances.
    Synth(SynthArgs),
    /// Execute a controller on each instance and print the trace.
    Run(RunArgs),
    /// Execute a controller on each instance and report verdicts.
    Verify(RunArgs),
    /// Write the compiled classical problem and its decoding key.
    Compile(CompileArgs),
    /// Turn a plan for a compiled problem into a controller.
    Decode(DecodeArgs),
    /// Render a controller in Graphviz format.
    ExportDot(DotArgs),
    /// Write domain and problem files for a built-in domain.
    Generate(GenerateArgs),
}

/// Where instances come from: PDDL files or a built-in generator.
#[derive(Debug, Args, Clone)]
pub struct InputArgs {
    /// Built-in domain.
    #[arg(long, value_enum, conflicts_with = "domain_file")]
    pub domain: Option<DomainKind>,
    /// Comma-separated instance sizes for the built-in domain.
    #[arg(long, value_delimiter = ',')]
    pub sizes: Vec<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Use the domain's held-out test distribution with this many instances.
    #[arg(long)]
    pub held_out: Option<usize>,
    /// PDDL domain file.
    #[arg(long, requires = "problem")]
    pub domain_file: Option<PathBuf>,
    /// PDDL problem file; repeat for several instances.
    #[arg(long)]
    pub problem: Vec<PathBuf>,
}

#[derive(Debug, Args, Clone)]
pub struct BoundArgs {
    /// Largest state index; `q_n` is terminal.
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    /// Number of controllers. Values above 1 select the hierarchical compilation.
    #[arg(long, default_value_t = 1)]
    pub m: usize,
    /// Largest stack level. Nonzero values select the hierarchical compilation.
    #[arg(long, default_value_t = 0)]
    pub stack: usize,
    /// Parameters of controller i as `i:var,var`; repeatable.
    #[arg(long = "params")]
    pub params: Vec<String>,
    /// Partial program: `two-subcontrollers` or a controller JSON file.
    #[arg(long)]
    pub priors: Option<String>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub bounds: BoundArgs,
    #[arg(long, default_value_t = 5_000_000)]
    pub budget_expansions: u64,
    #[arg(long, default_value_t = 600.0)]
    pub budget_seconds: f64,
    /// Also write the compiled PDDL and decoding key into this directory.
    #[arg(long)]
    pub emit_pddl: Option<PathBuf>,
    /// Try n = 1, 2, ... up to `--n` and stop at the first success.
    #[arg(long)]
    pub iterate_bounds: bool,
    /// Controller output file.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
    /// JSON report output file.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Controller JSON file.
    #[arg(long)]
    pub controller: PathBuf,
    /// Maximum stack level during execution.
    #[arg(long, default_value_t = 64)]
    pub stack: usize,
    #[arg(long, default_value_t = 1_000_000)]
    pub step_budget: usize,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CompileArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub bounds: BoundArgs,
    /// Output directory for `domain.pddl`, `problem.pddl` and `key.json`.
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct DecodeArgs {
    #[arg(long)]
    pub key: PathBuf,
    /// Plan for the compiled problem, one action per line.
    #[arg(long)]
    pub plan: PathBuf,
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DotArgs {
    #[arg(long)]
    pub controller: PathBuf,
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Serialize)]
pub struct InstanceReport {
    pub instance: String,
    pub verdict: String,
    pub steps: usize,
}

#[derive(Debug, Serialize)]
pub struct SynthAttempt {
    pub n: usize,
    pub outcome: &'static str,
    pub expanded: u64,
    pub generated: u64,
    pub seconds: f64,
    pub plan_length: Option<usize>,
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub format: &'static str,
    pub command: &'static str,
    pub instances: usize,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub attempts: Vec<SynthAttempt>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub controller: Option<serde_json::Value>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub verdicts: Vec<InstanceReport>,
    pub exit_code: i32,
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|source| CliError::Io { path: dir.to_path_buf(), source })?;
    }
    std::fs::write(path, text).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn domain_spec(input: &InputArgs, kind: DomainKind) -> DomainSpec {
    if let Some(count) = input.held_out {
        DomainSpec::held_out(kind, count, input.seed)
    } else if input.sizes.is_empty() {
        DomainSpec { seed: input.seed, ..DomainSpec::training(kind) }
    } else {
        DomainSpec { kind, sizes: input.sizes.clone(), seed: input.seed, structured: kind == DomainKind::TreeDfs }
    }
}

pub fn load_instances(input: &InputArgs) -> Result<GeneralizedProblem, CliError> {
    match (&input.domain, &input.domain_file) {
        (Some(kind), None) => Ok(generate(&domain_spec(input, *kind))?.gp),
        (None, Some(path)) => {
            let d = parse_domain(&read(path)?)?;
            let ps = input.problem.iter().map(|p| Ok(parse_problem(&read(p)?)?)).collect::<Result<Vec<_>, CliError>>()?;
            Ok(ground_generalized(&d, &ps)?)
        }
        _ => Err(CliError::Usage("give either --domain or --domain-file with --problem".into())),
    }
}

fn parse_params(specs: &[String], m: usize) -> Result<Vec<Vec<String>>, CliError> {
    let mut out = vec![Vec::new(); m];
    for s in specs {
        let (i, vars) = s.split_once(':').ok_or_else(|| CliError::Usage(format!("--params {s}: expected i:var,...")))?;
        let i: usize = i.parse().map_err(|_| CliError::Usage(format!("--params {s}: bad controller index")))?;
        let slot = out.get_mut(i).ok_or_else(|| CliError::Usage(format!("--params {s}: controller {i} >= m")))?;
        *slot = vars.split(',').filter(|v| !v.is_empty()).map(str::to_string).collect();
    }
    while out.last().is_some_and(Vec::is_empty) {
        out.pop();
    }
    Ok(out)
}

fn load_priors(spec: Option<&str>, n: usize) -> Result<Vec<Prior>, CliError> {
    match spec {
        None => Ok(Vec::new()),
        Some("two-subcontrollers") => Ok(priors_from_hierarchy(&visitall_priors(n), n)),
        Some(path) => Ok(priors_from_hierarchy(&fsc::load(&read(Path::new(path))?)?, n)),
    }
}

fn synthesis_params(b: &BoundArgs, n: usize) -> Result<(SynthesisParams, bool), CliError> {
    let priors = load_priors(b.priors.as_deref(), n)?;
    let hierarchical = b.m > 1 || b.stack > 0 || !b.params.is_empty();
    let params = parse_params(&b.params, b.m)?;
    let sp = SynthesisParams { n, m: b.m, stack: b.stack, params, priors };
    sp.validate()?;
    Ok((sp, hierarchical))
}

fn compile_with(gp: &GeneralizedProblem, sp: &SynthesisParams, hierarchical: bool) -> Result<crate::compile::CompiledProblem, CliError> {
    let cp = if hierarchical {
        compile_hier(gp, sp)?
    } else {
        let cp = compile_flat(gp, sp.n)?;
        crate::compile::inject_priors(cp, &sp.priors)?
    };
    Ok(cp)
}

fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::Solved => "solved",
        Verdict::GoalUnsatisfied => "goal-unsatisfied",
        Verdict::RevisitedConfiguration => "revisited-configuration",
        Verdict::StackOverflow => "stack-overflow",
        Verdict::StepBudgetExhausted => "step-budget-exhausted",
        Verdict::UndefinedTransition => "undefined-transition",
        Verdict::InapplicableAction => "inapplicable-action",
    }
}

fn verify_all(h: &Hierarchy, gp: &GeneralizedProblem, limits: Limits) -> Result<Vec<InstanceReport>, CliError> {
    let mut out = Vec::with_capacity(gp.len());
    for t in 0..gp.len() {
        let p = gp.instance(t);
        let trace = fsc::execute(h, &p, limits)?;
        out.push(InstanceReport {
            instance: gp.instances[t].name.clone(),
            verdict: verdict_name(trace.verdict).to_string(),
            steps: trace.steps.len(),
        });
    }
    Ok(out)
}

fn finish(report: Report, path: Option<&Path>) -> Result<i32, CliError> {
    let text = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
    match path {
        Some(p) => write(p, &text)?,
        None => print!("{text}"),
    }
    Ok(report.exit_code)
}

fn synth(a: &SynthArgs) -> Result<i32, CliError> {
    let gp = load_instances(&a.input)?;
    let bounds: Vec<usize> = if a.iterate_bounds { (1..=a.bounds.n).collect() } else { vec![a.bounds.n] };
    let mut attempts = Vec::new();
    let mut exhausted = false;
    for n in bounds {
        let (sp, hierarchical) = synthesis_params(&a.bounds, n)?;
        let cp = compile_with(&gp, &sp, hierarchical)?;
        if let Some(dir) = &a.emit_pddl {
            let e = emit(&cp.problem)?;
            write(&dir.join(format!("compiled-n{n}-domain.pddl")), &e.domain)?;
            write(&dir.join(format!("compiled-n{n}-problem.pddl")), &e.problem)?;
            write(&dir.join(format!("compiled-n{n}-key.json")), &cp.key.to_json())?;
        }
        let r = solve_default(&cp.problem, a.budget_expansions, a.budget_seconds);
        let stats: SearchStats = r.stats;
        let outcome = match &r.outcome {
            Outcome::Plan(_) => "plan",
            Outcome::Unsolvable => "unsolvable",
            Outcome::Exhausted => "exhausted",
        };
        exhausted |= r.outcome == Outcome::Exhausted;
        attempts.push(SynthAttempt {
            n,
            outcome,
            expanded: stats.expanded,
            generated: stats.generated,
            seconds: stats.seconds,
            plan_length: r.outcome.plan().map(Plan::len),
        });
        if let Outcome::Plan(plan) = &r.outcome {
            if let Some(dir) = &a.emit_pddl {
                write(&dir.join(format!("compiled-n{n}.plan")), &plan.to_text(&cp.problem))?;
            }
            let h = decode(plan, &cp.key)?;
            let text = fsc::save(&h);
            match &a.out {
                Some(p) => write(p, &text)?,
                None => eprint!("{h}"),
            }
            let stack = if hierarchical { a.bounds.stack } else { 0 };
            let verdicts = verify_all(&h, &gp, Limits::with_stack(stack))?;
            let ok = verdicts.iter().all(|v| v.verdict == "solved");
            let report = Report {
                format: REPORT_FORMAT,
                command: "synth",
                instances: gp.len(),
                attempts,
                controller: Some(serde_json::from_str(&text).expect("controller json")),
                verdicts,
                exit_code: if ok { EXIT_OK } else { EXIT_FAILED },
            };
            return finish(report, a.report.as_deref());
        }
    }
    let report = Report {
        format: REPORT_FORMAT,
        command: "synth",
        instances: gp.len(),
        attempts,
        controller: None,
        verdicts: Vec::new(),
        exit_code: if exhausted { EXIT_BUDGET } else { EXIT_FAILED },
    };
    finish(report, a.report.as_deref())
}

fn run(a: &RunArgs, print_trace: bool) -> Result<i32, CliError> {
    let gp = load_instances(&a.input)?;
    let h = fsc::load(&read(&a.controller)?)?;
    let limits = Limits { max_stack: a.stack, step_budget: a.step_budget };
    if print_trace {
        for t in 0..gp.len() {
            let trace = fsc::execute(&h, &gp.instance(t), limits)?;
            eprintln!("; {}", gp.instances[t].name);
            for s in &trace.steps {
                eprintln!("{}{} q{} b={} {}", "  ".repeat(s.level), h.controllers[s.controller].name, s.state, s.branch as u8, s.instruction.label(&h));
            }
        }
    }
    let verdicts = verify_all(&h, &gp, limits)?;
    let ok = verdicts.iter().all(|v| v.verdict == "solved");
    let report = Report {
        format: REPORT_FORMAT,
        command: if print_trace { "run" } else { "verify" },
        instances: gp.len(),
        attempts: Vec::new(),
        controller: None,
        verdicts,
        exit_code: if ok { EXIT_OK } else { EXIT_FAILED },
    };
    finish(report, a.report.as_deref())
}

fn compile_cmd(a: &CompileArgs) -> Result<i32, CliError> {
    let gp = load_instances(&a.input)?;
    let (sp, hierarchical) = synthesis_params(&a.bounds, a.bounds.n)?;
    let cp = compile_with(&gp, &sp, hierarchical)?;
    let e = emit(&cp.problem)?;
    write(&a.out_dir.join("domain.pddl"), &e.domain)?;
    write(&a.out_dir.join("problem.pddl"), &e.problem)?;
    write(&a.out_dir.join("key.json"), &cp.key.to_json())?;
    Ok(EXIT_OK)
}

/// Resolves a plan against the compiled action names recorded in a key.
pub fn parse_key_plan(text: &str, key: &DecodingKey) -> Result<Plan, CliError> {
    let index: HashMap<&str, ActionId> =
        key.entries.iter().enumerate().map(|(i, e)| (e.name.as_str(), ActionId(i as u32))).collect();
    let mut steps = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split(';').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let inner = line.trim_start_matches('(').trim_end_matches(')');
        let name = inner.split_whitespace().collect::<Vec<_>>().join("_").to_lowercase();
        let id = index
            .get(name.as_str())
            .ok_or_else(|| CliError::Pddl(PddlError::UnknownAction { line: lineno + 1, name: name.clone() }))?;
        steps.push(*id);
    }
    Ok(Plan::new(steps))
}

fn decode_cmd(a: &DecodeArgs) -> Result<i32, CliError> {
    let key = DecodingKey::from_json(&read(&a.key)?)?;
    let plan = parse_key_plan(&read(&a.plan)?, &key)?;
    let h = decode(&plan, &key)?;
    let text = fsc::save(&h);
    match &a.out {
        Some(p) => write(p, &text)?,
        None => print!("{text}"),
    }
    Ok(EXIT_OK)
}

fn dot_cmd(a: &DotArgs) -> Result<i32, CliError> {
    let h = fsc::load(&read(&a.controller)?)?;
    let text = fsc::to_dot(&h);
    match &a.out {
        Some(p) => write(p, &text)?,
        None => print!("{text}"),
    }
    Ok(EXIT_OK)
}

fn generate_cmd(a: &GenerateArgs) -> Result<i32, CliError> {
    match (&a.input.domain, &a.input.domain_file) {
        (Some(kind), None) => {
            let g = generate(&domain_spec(&a.input, *kind))?;
            g.write_files(&a.out_dir).map_err(|source| CliError::Io { path: a.out_dir.clone(), source })?;
        }
        _ => {
            let gp = load_instances(&a.input)?;
            let (domain, problems) = emit_generalized(&gp, "ground")?;
            write(&a.out_dir.join("ground-domain.pddl"), &domain)?;
            for (t, p) in problems.iter().enumerate() {
                write(&a.out_dir.join(format!("ground-problem-{}.pddl", t + 1)), p)?;
            }
        }
    }
    Ok(EXIT_OK)
}

/// Runs a parsed command line and returns the process exit code.
pub fn run_cli(cli: &Cli) -> Result<i32, CliError> {
    match &cli.command {
        Command::Synth(a) => synth(a),
        Command::Run(a) => run(a, true),
        Command::Verify(a) => run(a, false),
        Command::Compile(a) => compile_cmd(a),
        Command::Decode(a) => decode_cmd(a),
        Command::ExportDot(a) => dot_cmd(a),
        Command::Generate(a) => generate_cmd(a),
    }
}

/// Entry point for the binary: parses `std::env::args`, reports errors on stderr.
pub fn main_exit_code() -> i32 {
    let cli = Cli::parse();
    match run_cli(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}

//! Python bindings for the `hfsc` crate.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use hfsc::compile::{compile_flat, compile_hier, priors_from_hierarchy, SynthesisParams};
use hfsc::decode::decode;
use hfsc::domains::{self, DomainKind, DomainSpec};
use hfsc::fsc::{self, Limits, Verdict};
use hfsc::model;
use hfsc::pddl;
use hfsc::planner::{solve_default, Outcome};

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_kind(name: &str) -> PyResult<DomainKind> {
    DomainKind::ALL
        .into_iter()
        .find(|k| k.name() == name)
        .ok_or_else(|| PyValueError::new_err(format!("unknown domain {name}")))
}

/// A set of ground planning instances sharing fluents and actions.
#[pyclass(frozen, module = "hfsc_py")]
pub struct GeneralizedProblem {
    inner: model::GeneralizedProblem,
}

#[pymethods]
impl GeneralizedProblem {
    #[getter]
    fn num_instances(&self) -> usize {
        self.inner.len()
    }

    #[getter]
    fn num_fluents(&self) -> usize {
        self.inner.fluents.len()
    }

    #[getter]
    fn num_actions(&self) -> usize {
        self.inner.actions.len()
    }

    #[getter]
    fn instance_names(&self) -> Vec<String> {
        self.inner.instances.iter().map(|i| i.name.clone()).collect()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!(
            "GeneralizedProblem(instances={}, fluents={}, actions={})",
            self.inner.len(),
            self.inner.fluents.len(),
            self.inner.actions.len()
        )
    }
}

/// A hierarchy of finite state controllers.
#[pyclass(frozen, module = "hfsc_py")]
pub struct Controller {
    inner: fsc::Hierarchy,
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

#[pymethods]
impl Controller {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Controller { inner: fsc::load(text).map_err(value_err)? })
    }

    fn to_json(&self) -> String {
        fsc::save(&self.inner)
    }

    fn to_dot(&self) -> String {
        fsc::to_dot(&self.inner)
    }

    /// Number of states per controller, terminal included.
    #[getter]
    fn num_states(&self) -> usize {
        self.inner.num_states
    }

    #[getter]
    fn names(&self) -> Vec<String> {
        self.inner.controllers.iter().map(|c| c.name.clone()).collect()
    }

    #[getter]
    fn is_recursive(&self) -> bool {
        self.inner.is_recursive()
    }

    /// Executes the controller on every instance and returns one verdict per instance.
    #[pyo3(signature = (problem, max_stack = 64, step_budget = 1_000_000))]
    fn verify(&self, problem: &GeneralizedProblem, max_stack: usize, step_budget: usize) -> PyResult<Vec<String>> {
        let limits = Limits { max_stack, step_budget };
        let verdicts = fsc::solves(&self.inner, &problem.inner, limits).map_err(value_err)?;
        Ok(verdicts.into_iter().map(|v| verdict_name(v).to_string()).collect())
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Controller(controllers={}, states={})", self.inner.controllers.len(), self.inner.num_states)
    }
}

/// Generates instances of a built-in domain.
#[pyfunction]
#[pyo3(signature = (domain, sizes = None, seed = 0))]
fn generate(domain: &str, sizes: Option<Vec<usize>>, seed: u64) -> PyResult<GeneralizedProblem> {
    let kind = parse_kind(domain)?;
    let spec = match sizes {
        Some(sizes) => DomainSpec { sizes, seed, ..DomainSpec::training(kind) },
        None => DomainSpec { seed, ..DomainSpec::training(kind) },
    };
    let g = domains::generate(&spec).map_err(value_err)?;
    Ok(GeneralizedProblem { inner: g.gp })
}

/// Parses and grounds a PDDL domain with one or more problems.
#[pyfunction]
fn load_pddl(domain: &str, problems: Vec<String>) -> PyResult<GeneralizedProblem> {
    let d = pddl::parse_domain(domain).map_err(value_err)?;
    let ps = problems.iter().map(|p| pddl::parse_problem(p)).collect::<Result<Vec<_>, _>>().map_err(value_err)?;
    Ok(GeneralizedProblem { inner: pddl::ground_generalized(&d, &ps).map_err(value_err)? })
}

/// Synthesizes a controller. Returns `None` when the bounds admit no solution.
#[pyfunction]
#[pyo3(signature = (problem, n, m = 1, stack = 0, params = None, priors = None, max_expansions = 5_000_000, max_seconds = 600.0))]
#[allow(clippy::too_many_arguments)]
fn synthesize(
    py: Python<'_>,
    problem: &GeneralizedProblem,
    n: usize,
    m: usize,
    stack: usize,
    params: Option<Vec<Vec<String>>>,
    priors: Option<&Controller>,
    max_expansions: u64,
    max_seconds: f64,
) -> PyResult<Option<Controller>> {
    let mut sp = SynthesisParams::hierarchical(n, m, stack).with_params(params.unwrap_or_default());
    if let Some(p) = priors {
        sp = sp.with_priors(priors_from_hierarchy(&p.inner, n));
    }
    let hierarchical = m > 1 || stack > 0 || !sp.params.is_empty();
    let gp = &problem.inner;
    let result = py.detach(|| -> Result<_, String> {
        let cp = if hierarchical {
            compile_hier(gp, &sp)
        } else {
            compile_flat(gp, n).and_then(|cp| hfsc::compile::inject_priors(cp, &sp.priors))
        }
        .map_err(|e| e.to_string())?;
        let r = solve_default(&cp.problem, max_expansions, max_seconds);
        Ok((r.outcome, cp.key))
    });
    let (outcome, key) = result.map_err(PyValueError::new_err)?;
    match outcome {
        Outcome::Plan(plan) => Ok(Some(Controller { inner: decode(&plan, &key).map_err(value_err)? })),
        Outcome::Unsolvable => Ok(None),
        Outcome::Exhausted => Err(PyRuntimeError::new_err("search budget exhausted")),
    }
}

/// The recursive depth-first traversal controller for the tree-dfs domain.
#[pyfunction]
fn dfs_controller() -> Controller {
    Controller { inner: domains::tree::dfs_hierarchy() }
}

/// Row-sweep and column-return sub-controllers for visitall under an empty root.
#[pyfunction]
#[pyo3(signature = (n = 2))]
fn visitall_priors(n: usize) -> Controller {
    Controller { inner: domains::visitall_priors(n) }
}

#[pymodule]
fn hfsc_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<GeneralizedProblem>()?;
    m.add_class::<Controller>()?;
    m.add_function(wrap_pyfunction!(generate, m)?)?;
    m.add_function(wrap_pyfunction!(load_pddl, m)?)?;
    m.add_function(wrap_pyfunction!(synthesize, m)?)?;
    m.add_function(wrap_pyfunction!(dfs_controller, m)?)?;
    m.add_function(wrap_pyfunction!(visitall_priors, m)?)?;
    Ok(())
}

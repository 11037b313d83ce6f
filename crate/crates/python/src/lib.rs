//! Python bindings: formulas, the portfolio solver, statistics and the
//! reference oracle. Literals cross the boundary as signed DIMACS integers.

use std::time::Duration;

use pyo3::exceptions::{PyOSError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;
use vivipar::harness::{self, OracleError};
use vivipar::{LcmMode, Lit, PortfolioConfig, SolveStatus};

fn value_error(e: impl ToString) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Validates DIMACS clauses against the declared variable count.
pub fn build_formula(num_vars: u32, clauses: &[Vec<i64>]) -> Result<vivipar::Formula, String> {
    let mut out = Vec::with_capacity(clauses.len());
    for (i, c) in clauses.iter().enumerate() {
        let mut lits = Vec::with_capacity(c.len());
        for &v in c {
            if v == 0 || v.unsigned_abs() > num_vars as u64 {
                return Err(format!("clause {i}: literal {v} out of range 1..={num_vars}"));
            }
            lits.push(Lit::from_dimacs(v as i32));
        }
        out.push(lits);
    }
    Ok(vivipar::Formula::new(num_vars, out))
}

pub fn model_to_dimacs(model: &[bool]) -> Vec<i64> {
    model
        .iter()
        .enumerate()
        .map(|(i, &b)| if b { i as i64 + 1 } else { -(i as i64 + 1) })
        .collect()
}

/// Accepts a list of signed literals; unmentioned variables are false.
pub fn model_from_dimacs(num_vars: u32, lits: &[i64]) -> Result<Vec<bool>, String> {
    let mut model = vec![false; num_vars as usize];
    for &v in lits {
        if v == 0 || v.unsigned_abs() > num_vars as u64 {
            return Err(format!("literal {v} out of range 1..={num_vars}"));
        }
        model[v.unsigned_abs() as usize - 1] = v > 0;
    }
    Ok(model)
}

pub fn parse_mode(name: &str, ecm_max_lbd: u32) -> Result<LcmMode, String> {
    LcmMode::from_name(name, ecm_max_lbd)
}

/// A CNF formula.
#[pyclass(module = "vivipar", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct Formula {
    inner: vivipar::Formula,
}

#[pymethods]
impl Formula {
    #[new]
    #[pyo3(signature = (num_vars, clauses))]
    fn new(num_vars: u32, clauses: Vec<Vec<i64>>) -> PyResult<Self> {
        let inner = build_formula(num_vars, &clauses).map_err(value_error)?;
        Ok(Formula { inner })
    }

    #[staticmethod]
    fn from_dimacs(text: &str) -> PyResult<Self> {
        let inner = vivipar::parse_dimacs(text.as_bytes()).map_err(value_error)?;
        Ok(Formula { inner })
    }

    #[staticmethod]
    fn from_file(path: std::path::PathBuf) -> PyResult<Self> {
        let bytes = std::fs::read(&path).map_err(|e| PyOSError::new_err(format!("{}: {e}", path.display())))?;
        let inner = vivipar::parse_dimacs(&bytes).map_err(|e| value_error(format!("{}: {e}", path.display())))?;
        Ok(Formula { inner })
    }

    /// Uniform random 3-SAT with `num_clauses` clauses over `num_vars` variables.
    #[staticmethod]
    #[pyo3(signature = (num_vars, num_clauses, seed=0))]
    fn random_3sat(num_vars: u32, num_clauses: usize, seed: u64) -> PyResult<Self> {
        if num_vars < 3 {
            return Err(value_error("random 3-SAT needs at least 3 variables"));
        }
        Ok(Formula {
            inner: harness::gen_random_3sat(num_vars, num_clauses, seed),
        })
    }

    #[staticmethod]
    fn pigeonhole(pigeons: u32, holes: u32) -> Self {
        Formula {
            inner: harness::pigeonhole(pigeons, holes),
        }
    }

    #[getter]
    fn num_vars(&self) -> u32 {
        self.inner.num_vars()
    }

    #[getter]
    fn num_clauses(&self) -> usize {
        self.inner.clauses().len() + self.inner.has_empty_clause() as usize
    }

    fn clauses(&self) -> Vec<Vec<i64>> {
        let mut out: Vec<Vec<i64>> = Vec::new();
        if self.inner.has_empty_clause() {
            out.push(Vec::new());
        }
        out.extend(
            self.inner
                .clauses()
                .iter()
                .map(|c| c.lits().iter().map(|l| l.to_dimacs() as i64).collect()),
        );
        out
    }

    fn to_dimacs(&self) -> String {
        self.inner.to_dimacs_string()
    }

    /// True if `model` (signed literals) satisfies every clause.
    fn check(&self, model: Vec<i64>) -> PyResult<bool> {
        let m = model_from_dimacs(self.inner.num_vars(), &model).map_err(value_error)?;
        Ok(harness::verify_model(&self.inner, &m))
    }

    fn __len__(&self) -> usize {
        self.num_clauses()
    }

    fn __repr__(&self) -> String {
        format!("Formula(num_vars={}, num_clauses={})", self.num_vars(), self.num_clauses())
    }

    fn __eq__(&self, other: &Formula) -> bool {
        self.inner == other.inner
    }
}

/// Solver counters.
#[pyclass(module = "vivipar", frozen, get_all, skip_from_py_object)]
#[derive(Clone)]
pub struct Stats {
    propagations_total: u64,
    propagations_vivify: u64,
    vivify_attempts: u64,
    vivify_successes: u64,
    literals_removed: u64,
    clauses_learned: u64,
    clauses_exported: u64,
    clauses_imported: u64,
    improvements_published: u64,
    improvements_adopted: u64,
    restarts: u64,
    reductions: u64,
    conflicts: u64,
    decisions: u64,
    buffer_overflows: u64,
    /// Share of propagations spent vivifying, in percent.
    vivify_prop_pct: f64,
    /// Successful vivification attempts, in percent.
    success_rate: f64,
}

impl From<&vivipar::Stats> for Stats {
    fn from(s: &vivipar::Stats) -> Self {
        Stats {
            propagations_total: s.propagations_total,
            propagations_vivify: s.propagations_vivify,
            vivify_attempts: s.vivify_attempts,
            vivify_successes: s.vivify_successes,
            literals_removed: s.literals_removed,
            clauses_learned: s.clauses_learned,
            clauses_exported: s.clauses_exported,
            clauses_imported: s.clauses_imported,
            improvements_published: s.improvements_published,
            improvements_adopted: s.improvements_adopted,
            restarts: s.restarts,
            reductions: s.reductions,
            conflicts: s.conflicts,
            decisions: s.decisions,
            buffer_overflows: s.buffer_overflows,
            vivify_prop_pct: s.vivify_prop_pct(),
            success_rate: s.success_rate(),
        }
    }
}

#[pymethods]
impl Stats {
    fn as_dict<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let d = PyDict::new(py);
        let ints = [
            ("propagations_total", self.propagations_total),
            ("propagations_vivify", self.propagations_vivify),
            ("vivify_attempts", self.vivify_attempts),
            ("vivify_successes", self.vivify_successes),
            ("literals_removed", self.literals_removed),
            ("clauses_learned", self.clauses_learned),
            ("clauses_exported", self.clauses_exported),
            ("clauses_imported", self.clauses_imported),
            ("improvements_published", self.improvements_published),
            ("improvements_adopted", self.improvements_adopted),
            ("restarts", self.restarts),
            ("reductions", self.reductions),
            ("conflicts", self.conflicts),
            ("decisions", self.decisions),
            ("buffer_overflows", self.buffer_overflows),
        ];
        for (k, v) in ints {
            d.set_item(k, v)?;
        }
        d.set_item("vivify_prop_pct", self.vivify_prop_pct)?;
        d.set_item("success_rate", self.success_rate)?;
        Ok(d)
    }

    fn __repr__(&self) -> String {
        format!(
            "Stats(conflicts={}, vivify_attempts={}, vivify_prop_pct={:.2}, success_rate={:.2})",
            self.conflicts, self.vivify_attempts, self.vivify_prop_pct, self.success_rate
        )
    }
}

/// Outcome of a portfolio run.
#[pyclass(module = "vivipar", frozen, get_all)]
pub struct SolveResult {
    /// "SAT", "UNSAT" or "UNKNOWN".
    status: String,
    /// Signed literals of a satisfying assignment, for SAT answers.
    model: Option<Vec<i64>>,
    winner: Option<usize>,
    wall_seconds: f64,
    mode: String,
    /// Sum over workers.
    stats: Stats,
    worker_stats: Vec<Stats>,
}

#[pymethods]
impl SolveResult {
    #[getter]
    fn satisfiable(&self) -> Option<bool> {
        match self.status.as_str() {
            "SAT" => Some(true),
            "UNSAT" => Some(false),
            _ => None,
        }
    }

    fn __repr__(&self) -> String {
        format!("SolveResult(status={:?}, mode={:?}, winner={:?})", self.status, self.mode, self.winner)
    }
}

/// Runs the portfolio on `formula`. The GIL is released while solving.
#[pyfunction]
#[pyo3(signature = (
    formula, *, lcm="none", ecm_max_lbd=4, threads=None, seed=0,
    deterministic=false, time_limit=None, max_conflicts=None, export_max_lbd=4
))]
#[allow(clippy::too_many_arguments)]
fn solve(
    py: Python<'_>,
    formula: &Formula,
    lcm: &str,
    ecm_max_lbd: u32,
    threads: Option<usize>,
    seed: u64,
    deterministic: bool,
    time_limit: Option<f64>,
    max_conflicts: Option<u64>,
    export_max_lbd: u32,
) -> PyResult<SolveResult> {
    let mode = parse_mode(lcm, ecm_max_lbd).map_err(value_error)?;
    let time_limit = match time_limit {
        Some(t) if !t.is_finite() || t < 0.0 => return Err(value_error("time_limit must be a non-negative number")),
        Some(t) => Some(Duration::from_secs_f64(t)),
        None => None,
    };
    let mut config = PortfolioConfig {
        lcm_mode: mode,
        seed,
        deterministic,
        time_limit,
        max_conflicts,
        ..PortfolioConfig::default()
    };
    if let Some(n) = threads {
        config.num_workers = n;
    }
    config.export_filter.max_lbd = export_max_lbd;
    let inner = formula.inner.clone();
    let result = py
        .detach(move || vivipar::run(&inner, &config))
        .map_err(value_error)?;
    let model = match &result.status {
        SolveStatus::Sat(m) => Some(model_to_dimacs(m)),
        _ => None,
    };
    Ok(SolveResult {
        status: result.status.label().to_string(),
        model,
        winner: result.winner,
        wall_seconds: result.wall_time.as_secs_f64(),
        mode: mode.to_string(),
        stats: Stats::from(&result.total_stats()),
        worker_stats: result.workers.iter().map(|w| Stats::from(&w.stats)).collect(),
    })
}

/// Exhaustive reference solver. Returns `(status, model)`.
#[pyfunction]
fn brute_force(py: Python<'_>, formula: &Formula) -> PyResult<(String, Option<Vec<i64>>)> {
    let inner = formula.inner.clone();
    let status = py
        .detach(move || harness::brute_force(&inner))
        .map_err(|e: OracleError| value_error(e))?;
    let model = match &status {
        SolveStatus::Sat(m) => Some(model_to_dimacs(m)),
        _ => None,
    };
    Ok((status.label().to_string(), model))
}

#[pyfunction]
fn verify_model(formula: &Formula, model: Vec<i64>) -> PyResult<bool> {
    formula.check(model)
}

#[pymodule(name = "vivipar")]
fn vivipar_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Formula>()?;
    m.add_class::<Stats>()?;
    m.add_class::<SolveResult>()?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(brute_force, m)?)?;
    m.add_function(wrap_pyfunction!(verify_model, m)?)?;
    m.add("MODES", ["none", "pcm", "lpcm", "ecm3", "ecm4"])?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}

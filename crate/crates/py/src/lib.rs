//! Python module `credal_kernel`.
//!
//! Exact quantities come back as `fractions.Fraction`; approximate ones
//! (Beta laws) as `float`. Numeric arguments may be `int`, `Fraction`,
//! `float` or a decimal/fraction string.

use kernel::independence::{combine_ci_frechet, combine_ci_strong};
use kernel::interval::{self, format_rational, parse_rational, ProbInterval, Rational, Real, UnitValue};
use kernel::markov::{refine_bounds_local, stationary_bounds_vertices, two_state_exact, IntervalTransitionMatrix};
use kernel::Error;
use credal_kernel_cli::{run_document, Failure, Options};
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;

create_exception!(credal_kernel, PreconditionError, PyException, "A mathematical precondition was violated.");
create_exception!(credal_kernel, InputError, PyValueError, "Malformed input or arguments.");

fn py_err(e: Error) -> PyErr {
    if e.is_precondition() {
        PreconditionError::new_err(e.to_string())
    } else {
        InputError::new_err(e.to_string())
    }
}

fn failure_err(f: Failure) -> PyErr {
    let msg = f.diagnostic["message"].as_str().unwrap_or("unknown error").to_string();
    if f.code == 2 {
        PreconditionError::new_err(msg)
    } else {
        InputError::new_err(msg)
    }
}

fn rational(obj: &Bound<'_, PyAny>) -> PyResult<Rational> {
    let text = match (obj.getattr("numerator"), obj.getattr("denominator")) {
        (Ok(n), Ok(d)) => format!("{}/{}", n.str()?, d.str()?),
        _ => obj.str()?.to_string(),
    };
    parse_rational(&text).ok_or_else(|| InputError::new_err(format!("not a rational number: {text}")))
}

fn unit(obj: &Bound<'_, PyAny>) -> PyResult<UnitValue> {
    UnitValue::exact(rational(obj)?).map_err(py_err)
}

fn pair(obj: &Bound<'_, PyAny>) -> PyResult<(Rational, Rational)> {
    let (a, b): (Bound<'_, PyAny>, Bound<'_, PyAny>) = obj.extract()?;
    Ok((rational(&a)?, rational(&b)?))
}

fn prob_interval(obj: &Bound<'_, PyAny>) -> PyResult<ProbInterval> {
    let (lo, hi) = pair(obj)?;
    ProbInterval::exact(lo, hi).map_err(py_err)
}

fn fraction<'py>(py: Python<'py>, r: &Rational) -> PyResult<Bound<'py, PyAny>> {
    py.import("fractions")?.getattr("Fraction")?.call1((format_rational(r),))
}

fn number<'py>(py: Python<'py>, x: &Real) -> PyResult<Bound<'py, PyAny>> {
    match x {
        Real::Exact(r) => fraction(py, r),
        Real::Approx { value, .. } => Ok(value.into_pyobject(py)?.into_any()),
    }
}

fn endpoints<'py>(py: Python<'py>, i: &ProbInterval) -> PyResult<(Bound<'py, PyAny>, Bound<'py, PyAny>)> {
    Ok((number(py, i.lo().real())?, number(py, i.hi().real())?))
}

/// Classical Bayes posterior `xy / (xy + (1-x)z)`.
#[pyfunction]
fn bayes_kernel<'py>(
    py: Python<'py>,
    prior: &Bound<'py, PyAny>,
    likelihood: &Bound<'py, PyAny>,
    alt_likelihood: &Bound<'py, PyAny>,
) -> PyResult<Bound<'py, PyAny>> {
    let p = interval::bayes_kernel(&unit(prior)?, &unit(likelihood)?, &unit(alt_likelihood)?).map_err(py_err)?;
    number(py, p.real())
}

/// Interval Bayes posterior from `(lo, hi)` pairs.
#[pyfunction]
fn bayes_interval<'py>(
    py: Python<'py>,
    prior: &Bound<'py, PyAny>,
    likelihood: &Bound<'py, PyAny>,
    alt_likelihood: &Bound<'py, PyAny>,
) -> PyResult<(Bound<'py, PyAny>, Bound<'py, PyAny>)> {
    let post = interval::bayes_kernel_interval(
        &prob_interval(prior)?,
        &prob_interval(likelihood)?,
        &prob_interval(alt_likelihood)?,
    )
    .map_err(py_err)?;
    endpoints(py, &post)
}

/// Combines `P(U|W)` and `P(V|W)` into bounds on `P(U∩V|W)`, Fréchet by
/// default or as a product under strong independence.
#[pyfunction]
#[pyo3(signature = (cu, cv, strong = false))]
fn combine_ci<'py>(
    py: Python<'py>,
    cu: &Bound<'py, PyAny>,
    cv: &Bound<'py, PyAny>,
    strong: bool,
) -> PyResult<(Bound<'py, PyAny>, Bound<'py, PyAny>)> {
    let (cu, cv) = (prob_interval(cu)?, prob_interval(cv)?);
    let out = if strong { combine_ci_strong(&cu, &cv) } else { combine_ci_frechet(&cu, &cv) };
    endpoints(py, &out)
}

/// Per-state stationary bounds of an interval transition matrix given as
/// rows of `(lo, hi)` pairs. `mode` is `"vertices"`, `"exact"` (two states
/// only) or `"refine"`, which hill-climbs from vertex index `start`.
#[pyfunction]
#[pyo3(signature = (rows, mode = "vertices", steps = 64, start = 0))]
fn stationary_bounds<'py>(
    py: Python<'py>,
    rows: &Bound<'py, PyAny>,
    mode: &str,
    steps: usize,
    start: usize,
) -> PyResult<Vec<(Bound<'py, PyAny>, Bound<'py, PyAny>)>> {
    let parsed = rows
        .try_iter()?
        .map(|row| row?.try_iter()?.map(|cell| pair(&cell?)).collect::<PyResult<Vec<_>>>())
        .collect::<PyResult<Vec<_>>>()?;
    let itm = IntervalTransitionMatrix::new(parsed).map_err(py_err)?;
    let bounds = match mode {
        "vertices" => stationary_bounds_vertices(&itm),
        "exact" => two_state_exact(&itm),
        "refine" => refine_bounds_local(&itm, start, steps),
        other => return Err(InputError::new_err(format!("unknown mode \"{other}\""))),
    }
    .map_err(py_err)?;
    bounds.bounds.iter().map(|b| endpoints(py, b)).collect()
}

/// Runs a command-line subcommand on a JSON document (a `str` or any
/// JSON-serialisable object). Returns the result body as a `dict`, or the
/// rendered table when `table` is true.
#[pyfunction]
#[pyo3(signature = (
    command, document, mode = None, *, table = false, precision = 4, beta_tol = 1e-12,
    grid_depth = 10, ifs_depth = 12, state = None, steps = 64
))]
#[allow(clippy::too_many_arguments)]
fn run<'py>(
    py: Python<'py>,
    command: &str,
    document: &Bound<'py, PyAny>,
    mode: Option<&str>,
    table: bool,
    precision: usize,
    beta_tol: f64,
    grid_depth: u32,
    ifs_depth: u32,
    state: Option<usize>,
    steps: usize,
) -> PyResult<Bound<'py, PyAny>> {
    let json = py.import("json")?;
    let text: String = match document.extract::<String>() {
        Ok(s) => s,
        Err(_) => json.call_method1("dumps", (document,))?.extract()?,
    };
    let doc = serde_json::from_str(&text).map_err(|e| InputError::new_err(format!("invalid JSON: {e}")))?;
    let opts = Options { precision, beta_tol, grid_depth, ifs_depth, state, steps };
    let report = run_document(command, mode, doc, &opts).map_err(failure_err)?;
    if table {
        return Ok(report.table.into_pyobject(py)?.into_any());
    }
    let body = serde_json::to_string(&report.body).expect("serializable");
    json.call_method1("loads", (body,))
}

#[pymodule(name = "credal_kernel")]
fn credal_kernel_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("PreconditionError", m.py().get_type::<PreconditionError>())?;
    m.add("InputError", m.py().get_type::<InputError>())?;
    m.add_function(wrap_pyfunction!(bayes_kernel, m)?)?;
    m.add_function(wrap_pyfunction!(bayes_interval, m)?)?;
    m.add_function(wrap_pyfunction!(combine_ci, m)?)?;
    m.add_function(wrap_pyfunction!(stationary_bounds, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    Ok(())
}

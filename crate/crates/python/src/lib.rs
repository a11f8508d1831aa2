//! Python bindings. Exact rationals cross the boundary as `"p/q"` strings.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use maxop::discrete::{self, MaxKind};
use maxop::fractional::{self, BetaParams, GridSpec};
use maxop::lab::{self, Corpus, CorpusKind};
use maxop::rational::{self, Rational};
use maxop::Family;

fn err(e: maxop::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_rational(s: &str) -> PyResult<Rational> {
    rational::parse(s).map_err(err)
}

fn parse<T: std::str::FromStr<Err = maxop::Error>>(s: &str) -> PyResult<T> {
    s.parse().map_err(err)
}

fn params(b: f64) -> PyResult<BetaParams> {
    BetaParams::new(b).map_err(err)
}

/// A signal on the integers: finitely many values plus constant tails.
#[pyclass(name = "DiscreteSignal", module = "pymaxop", frozen)]
struct PyDiscreteSignal {
    inner: maxop::DiscreteSignal,
}

#[pymethods]
impl PyDiscreteSignal {
    #[new]
    #[pyo3(signature = (values, offset = 0, tail_left = "0", tail_right = "0"))]
    fn new(values: Vec<String>, offset: i64, tail_left: &str, tail_right: &str) -> PyResult<Self> {
        let values = values.iter().map(|v| parse_rational(v)).collect::<PyResult<Vec<_>>>()?;
        let inner =
            maxop::DiscreteSignal::new(parse_rational(tail_left)?, parse_rational(tail_right)?, offset, values);
        Ok(PyDiscreteSignal { inner })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let inner = serde_json::from_str(text).map_err(|e| PyValueError::new_err(e.to_string()))?;
        Ok(PyDiscreteSignal { inner })
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&self.inner).expect("signals serialize")
    }

    fn __call__(&self, n: i64) -> String {
        rational::format(&self.inner.eval(n))
    }

    fn support(&self) -> Option<(i64, i64)> {
        self.inner.support()
    }

    fn variation(&self) -> String {
        rational::format(&self.inner.variation())
    }

    fn bv_norm(&self) -> String {
        rational::format(&self.inner.bv_norm())
    }

    /// `(value, radius)` of the centered operator at `n`; the radius is
    /// `None` when the supremum is only reached as `r → ∞`.
    fn centered_max(&self, n: i64) -> (String, Option<u64>) {
        let v = discrete::centered_max_value(&self.inner, n);
        (rational::format(&v.value), v.reach.radius())
    }

    fn uncentered_max(&self, n: i64) -> String {
        rational::format(&discrete::uncentered_max_value(&self.inner, n).value)
    }

    /// Values of the maximal function on `[lo, hi]`.
    #[pyo3(signature = (lo, hi, kind = "centered"))]
    fn max_profile(&self, lo: i64, hi: i64, kind: &str) -> PyResult<Vec<String>> {
        let p = discrete::maximal_profile(&self.inner, parse::<MaxKind>(kind)?, lo, hi).map_err(err)?;
        Ok(p.values.iter().map(rational::format).collect())
    }

    /// Exact total variation of the maximal function over all integers.
    #[pyo3(signature = (kind = "centered"))]
    fn max_variation(&self, kind: &str) -> PyResult<String> {
        let v = discrete::total_variation_of_max(&self.inner, parse::<MaxKind>(kind)?).map_err(err)?;
        Ok(rational::format(&v))
    }

    fn __repr__(&self) -> String {
        format!("DiscreteSignal({})", self.to_json())
    }
}

/// A compactly supported continuous piecewise-linear function.
#[pyclass(name = "PwlFunction", module = "pymaxop", frozen)]
struct PyPwlFunction {
    inner: maxop::PwlFunction,
}

#[pymethods]
impl PyPwlFunction {
    #[new]
    fn new(breakpoints: Vec<f64>, values: Vec<f64>) -> PyResult<Self> {
        Ok(PyPwlFunction { inner: maxop::PwlFunction::new(breakpoints, values).map_err(err)? })
    }

    #[staticmethod]
    fn hat(center: f64, half_width: f64) -> Self {
        PyPwlFunction { inner: maxop::PwlFunction::hat(center, half_width) }
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let inner = serde_json::from_str(text).map_err(|e| PyValueError::new_err(e.to_string()))?;
        Ok(PyPwlFunction { inner })
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&self.inner).expect("functions serialize")
    }

    #[getter]
    fn breakpoints(&self) -> Vec<f64> {
        self.inner.breakpoints().to_vec()
    }

    #[getter]
    fn values(&self) -> Vec<f64> {
        self.inner.values().to_vec()
    }

    fn __call__(&self, x: f64) -> f64 {
        self.inner.eval(x)
    }

    fn support(&self) -> Option<(f64, f64)> {
        self.inner.support()
    }

    fn l1_norm(&self) -> f64 {
        self.inner.l1_norm()
    }

    fn lq_norm(&self, p: f64) -> PyResult<f64> {
        self.inner.lq_norm(p).map_err(err)
    }

    /// Value of the non-centered fractional maximal function at `x`.
    fn frac_max(&self, beta: f64, x: f64) -> PyResult<f64> {
        Ok(fractional::eval_uncentered(&self.inner, params(beta)?, x))
    }

    fn frac_max_centered(&self, beta: f64, x: f64) -> PyResult<f64> {
        Ok(fractional::eval_centered(&self.inner, params(beta)?, x))
    }

    /// `(a, b, value)` of the good ball at `x`.
    fn good_ball(&self, beta: f64, x: f64) -> PyResult<(f64, f64, f64)> {
        let g = fractional::good_ball(&self.inner, params(beta)?, x).map_err(err)?;
        Ok((g.a, g.b, g.value))
    }

    fn frac_derivative(&self, beta: f64, x: f64) -> PyResult<f64> {
        fractional::derivative_at(&self.inner, params(beta)?, x).map_err(err)
    }

    /// `(norm, error bound)` of the derivative in `L^q`, `q = 1/(1 − β)`.
    #[pyo3(signature = (beta, tol = 1e-6))]
    fn frac_derivative_norm(&self, beta: f64, tol: f64) -> PyResult<(f64, f64)> {
        let grid = GridSpec { rel_tol: tol, ..GridSpec::default() };
        let r = fractional::derivative_lq_norm(&self.inner, params(beta)?, &grid).map_err(err)?;
        Ok((r.norm, r.norm_error))
    }

    fn __repr__(&self) -> String {
        format!("PwlFunction({})", self.to_json())
    }
}

/// Runs a continuity experiment and returns the report as JSON.
#[pyfunction]
#[pyo3(signature = (f, family, js, beta = 0.5))]
fn continuity_frac(f: PyRef<'_, PyPwlFunction>, family: &str, js: Vec<u32>, beta: f64) -> PyResult<String> {
    let r = lab::run_fractional_experiment(&f.inner, parse::<Family>(family)?, beta, &js, &GridSpec::default())
        .map_err(err)?;
    r.to_json().map_err(err)
}

#[pyfunction]
fn continuity_disc(f: PyRef<'_, PyDiscreteSignal>, family: &str, js: Vec<u32>) -> PyResult<String> {
    let r = lab::run_discrete_experiment(&f.inner, parse::<Family>(family)?, &js).map_err(err)?;
    r.to_json().map_err(err)
}

/// A seeded corpus of signals (`kind = "disc"`) or functions (`"pwl"`).
#[pyfunction]
fn corpus(py: Python<'_>, seed: u64, count: usize, kind: &str) -> PyResult<Vec<Py<PyAny>>> {
    match lab::generate_corpus(seed, count, parse::<CorpusKind>(kind)?).map_err(err)? {
        Corpus::Discrete(v) => v
            .into_iter()
            .map(|inner| Ok(Py::new(py, PyDiscreteSignal { inner })?.into_any()))
            .collect(),
        Corpus::Pwl(v) => {
            v.into_iter().map(|inner| Ok(Py::new(py, PyPwlFunction { inner })?.into_any())).collect()
        }
    }
}

#[pymodule]
fn pymaxop(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyDiscreteSignal>()?;
    m.add_class::<PyPwlFunction>()?;
    m.add_function(wrap_pyfunction!(continuity_frac, m)?)?;
    m.add_function(wrap_pyfunction!(continuity_disc, m)?)?;
    m.add_function(wrap_pyfunction!(corpus, m)?)?;
    Ok(())
}

//! Python module `pycritline`: families, counts, zero location and the
//! special parameters. Reports come back as plain dicts and lists.

use critline::families::{parse_spec_file, build_family, Sign, SymmetricFamily};
use critline::phase::trace_phase;
use critline::poly::RealPolynomial;
use critline::specfun::{self, EvalPrecision};
use critline::winding::{count_N, count_strip, Rect};
use critline::{stability, zerofind};
use num_complex::Complex64;
use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList, PyString, PyTuple};
use serde_json::Value;

fn err(e: critline::Error) -> PyErr {
    match e {
        critline::Error::Parse(_) | critline::Error::InvalidParameter(_) => PyValueError::new_err(e.to_string()),
        e => PyArithmeticError::new_err(e.to_string()),
    }
}

fn to_py<'py>(py: Python<'py>, v: &Value) -> PyResult<Bound<'py, PyAny>> {
    Ok(match v {
        Value::Null => py.None().into_bound(py),
        Value::Bool(b) => b.into_pyobject(py)?.to_owned().into_any(),
        Value::Number(n) => match n.as_i64() {
            Some(i) => i.into_pyobject(py)?.into_any(),
            None => n.as_f64().unwrap_or(f64::NAN).into_pyobject(py)?.into_any(),
        },
        Value::String(s) => PyString::new(py, s).into_any(),
        Value::Array(a) => {
            let items = a.iter().map(|x| to_py(py, x)).collect::<PyResult<Vec<_>>>()?;
            PyList::new(py, items)?.into_any()
        }
        Value::Object(m) => {
            let d = PyDict::new(py);
            for (k, x) in m {
                d.set_item(k, to_py(py, x)?)?;
            }
            d.into_any()
        }
    })
}

fn ser<'py, T: serde::Serialize>(py: Python<'py>, x: &T) -> PyResult<Bound<'py, PyAny>> {
    let v = serde_json::to_value(x).map_err(|e| PyValueError::new_err(e.to_string()))?;
    to_py(py, &v)
}

/// Render a keyword value as the right-hand side of a family file line.
fn spec_value(v: &Bound<'_, PyAny>) -> PyResult<String> {
    if let Ok(z) = v.extract::<Complex64>() {
        if v.extract::<f64>().is_err() {
            return Ok(format!("{}{:+}i", z.re, z.im));
        }
    }
    if let Ok(b) = v.extract::<bool>() {
        return Ok(b.to_string());
    }
    if let Ok(x) = v.extract::<f64>() {
        return Ok(x.to_string());
    }
    if let Ok(s) = v.extract::<String>() {
        return Ok(s);
    }
    if let Ok(items) = v.extract::<Vec<Bound<'_, PyAny>>>() {
        return Ok(items.iter().map(spec_value).collect::<PyResult<Vec<_>>>()?.join(";"));
    }
    Err(PyValueError::new_err(format!("unsupported parameter value {v}")))
}

/// A symmetrized family `h(s) + h(2a-s)` or `h(s) - h(2a-s)` (conjugated
/// for L-translates).
#[pyclass(name = "Family", module = "pycritline", frozen)]
struct PyFamily {
    inner: SymmetricFamily,
}

#[pymethods]
impl PyFamily {
    /// `Family("zeta-translate", sign="plus", alpha=8)`. G-class entries go
    /// in `entries` as `(b, lambda_k, A_k)` tuples.
    #[new]
    #[pyo3(signature = (family, sign = "minus", **params))]
    fn new(family: &str, sign: &str, params: Option<&Bound<'_, PyDict>>) -> PyResult<Self> {
        let mut lines = vec![format!("family = {family}"), format!("sign = {sign}")];
        if let Some(params) = params {
            for (k, v) in params.iter() {
                let k: String = k.extract()?;
                if k == "entries" {
                    for e in v.extract::<Vec<(f64, f64, f64)>>()? {
                        lines.push(format!("entry = {};{};{}", e.0, e.1, e.2));
                    }
                } else {
                    lines.push(format!("{k} = {}", spec_value(&v)?));
                }
            }
        }
        Self::from_spec(&lines.join("\n"))
    }

    /// Build from the text of a family file.
    #[staticmethod]
    fn from_spec(text: &str) -> PyResult<Self> {
        let (spec, sign) = parse_spec_file(text).map_err(err)?;
        Ok(PyFamily {
            inner: build_family(&spec, sign).map_err(err)?,
        })
    }

    #[getter]
    fn label(&self) -> String {
        self.inner.label()
    }

    #[getter]
    fn axis(&self) -> f64 {
        self.inner.a()
    }

    #[getter]
    fn sign(&self) -> String {
        self.inner.sign.to_string()
    }

    fn f(&self, s: Complex64) -> PyResult<Complex64> {
        self.inner.f(s).map_err(err)
    }

    /// The function before normalizing factors were applied.
    fn original(&self, s: Complex64) -> PyResult<Complex64> {
        self.inner.original(s).map_err(err)
    }

    fn h(&self, s: Complex64) -> PyResult<Complex64> {
        self.inner.h_eval(s).map_err(err)
    }

    fn ratio(&self, s: Complex64) -> PyResult<Complex64> {
        self.inner.ratio(s).map_err(err)
    }

    /// Count report up to height `t`; `strip` switches to the strip count.
    #[pyo3(signature = (t, strip = None))]
    fn count<'py>(&self, py: Python<'py>, t: f64, strip: Option<f64>) -> PyResult<Bound<'py, PyAny>> {
        let r = match strip {
            Some(s0) => count_strip(&self.inner, t, s0),
            None => count_N(&self.inner, t),
        }
        .map_err(err)?;
        ser(py, &r)
    }

    fn line_zeros<'py>(&self, py: Python<'py>, t: f64) -> PyResult<Bound<'py, PyAny>> {
        ser(py, &zerofind::line_zeros(&self.inner, t).map_err(err)?)
    }

    fn real_zeros<'py>(&self, py: Python<'py>, lo: f64, hi: f64) -> PyResult<Bound<'py, PyAny>> {
        ser(py, &zerofind::real_zeros(&self.inner, lo, hi).map_err(err)?)
    }

    fn offline_zeros<'py>(
        &self,
        py: Python<'py>,
        sigma_lo: f64,
        sigma_hi: f64,
        tau_lo: f64,
        tau_hi: f64,
    ) -> PyResult<Bound<'py, PyAny>> {
        let rect = Rect::new(sigma_lo, sigma_hi, tau_lo, tau_hi);
        ser(py, &zerofind::offline_zeros(&self.inner, rect).map_err(err)?)
    }

    fn multiplicity(&self, s: Complex64) -> PyResult<u32> {
        zerofind::multiplicity(&self.inner, s).map_err(err)
    }

    /// `(tau, phi)` samples of `arg h(a + i tau)`.
    #[pyo3(signature = (tau_max, tau_min = 0.0, tol = 1e-9))]
    fn phase(&self, tau_max: f64, tau_min: f64, tol: f64) -> PyResult<Vec<(f64, f64)>> {
        Ok(trace_phase(&self.inner.h, tau_min, tau_max, tol).map_err(err)?.samples)
    }

    fn __repr__(&self) -> String {
        format!("Family({})", self.inner.label())
    }
}

#[pyfunction]
fn zeta(s: Complex64) -> PyResult<Complex64> {
    Ok(specfun::zeta(s, &EvalPrecision::default()).map_err(err)?.value)
}

#[pyfunction]
fn r_of_alpha(alpha: f64) -> PyResult<f64> {
    zerofind::r_of_alpha(alpha).map_err(err)
}

#[pyfunction]
fn alpha_star() -> PyResult<f64> {
    Ok(zerofind::solve_alpha_star().map_err(err)?.parameter)
}

/// `y*` for `q` given by coefficients, constant term first.
#[pyfunction]
#[pyo3(signature = (q = vec![1.0]))]
fn y_star(q: Vec<f64>) -> PyResult<f64> {
    let q = RealPolynomial::new(q).map_err(err)?;
    Ok(zerofind::solve_y_star(&q).map_err(err)?.parameter)
}

/// `(alpha, tau0)` of the double line zero of the plus translate family.
#[pyfunction]
#[pyo3(signature = (bracket = (2.5, 2.7), window = (4.0, 7.0)))]
fn double_zero(bracket: (f64, f64), window: (f64, f64)) -> PyResult<(f64, f64)> {
    let dz = zerofind::solve_double_zero(
        |a| critline::families::zeta_translate(a, true, Sign::Plus),
        bracket,
        window,
    )
    .map_err(err)?;
    Ok((dz.alpha, dz.tau0))
}

/// Necessary stability conditions for a real polynomial, constant term first.
#[pyfunction]
fn hb_check<'py>(py: Python<'py>, coeffs: Vec<f64>) -> PyResult<Bound<'py, PyDict>> {
    let p = RealPolynomial::new(coeffs).map_err(err)?;
    let (q, r) = stability::hb_split(&p);
    let d = PyDict::new(py);
    d.set_item("stable", stability::is_stable(&p).map_err(err)?)?;
    d.set_item("interlacing", stability::interlacing_check(&q, &r).map_err(err)?)?;
    d.set_item("stodola", stability::stodola(&p))?;
    d.set_item("phase_limit", stability::phase_limit_check(&p, 1e3, 0.05).map_err(err)?)?;
    let parts = PyTuple::new(py, [q.coeffs().to_vec(), r.coeffs().to_vec()])?;
    d.set_item("split", parts)?;
    Ok(d)
}

#[pymodule]
pub fn pycritline(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyFamily>()?;
    m.add_function(wrap_pyfunction!(zeta, m)?)?;
    m.add_function(wrap_pyfunction!(r_of_alpha, m)?)?;
    m.add_function(wrap_pyfunction!(alpha_star, m)?)?;
    m.add_function(wrap_pyfunction!(y_star, m)?)?;
    m.add_function(wrap_pyfunction!(double_zero, m)?)?;
    m.add_function(wrap_pyfunction!(hb_check, m)?)?;
    Ok(())
}

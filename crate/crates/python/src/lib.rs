//! Python bindings. Numbers may be given as `int`, `str` ("2/5", "0.4") or
//! `fractions.Fraction`; exact results come back as `"p/q"` strings.

use catalyx::catalysis::verify_catalyst_with_cap;
use catalyx::conversion::{catalytic_probability as cat_prob, power_mean_f64, vidal_with_index};
use catalyx::number::{format_rational, parse_rational};
use catalyx::sequences::supermajorizes as super_majorizes;
use catalyx::{
    synthesize_catalyst as synthesize, Catalyst as CoreCatalyst, ConversionSettings, Error, SchmidtVector as CoreVector,
    SynthesisCertificate, SynthesisSettings,
};
use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

create_exception!(catalyx_py, CatalyxError, PyValueError);

fn err(e: Error) -> PyErr {
    CatalyxError::new_err(e.to_string())
}

fn number_text(obj: &Bound<'_, PyAny>) -> PyResult<String> {
    // Floats go through repr, which is the shortest exact decimal for the value.
    Ok(obj.str()?.to_cow()?.into_owned())
}

/// Sequence of nonnegative Schmidt coefficients.
#[pyclass(name = "SchmidtVector", module = "catalyx_py")]
#[derive(Clone)]
pub struct PySchmidtVector {
    inner: CoreVector,
}

#[pymethods]
impl PySchmidtVector {
    #[new]
    fn new(values: &Bound<'_, PyAny>) -> PyResult<Self> {
        let items = values.iter()?.map(|v| number_text(&v?)).collect::<PyResult<Vec<_>>>()?;
        Ok(PySchmidtVector { inner: CoreVector::parse(&items).map_err(err)? })
    }

    fn values(&self) -> Vec<String> {
        self.inner.to_strings()
    }

    fn sum(&self) -> String {
        format_rational(&self.inner.sum())
    }

    fn normalized(&self) -> Self {
        PySchmidtVector { inner: self.inner.normalized() }
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!("SchmidtVector([{}])", self.inner.to_strings().join(", "))
    }
}

/// Catalyst as `(value, multiplicity)` runs.
#[pyclass(name = "Catalyst", module = "catalyx_py")]
#[derive(Clone)]
pub struct PyCatalyst {
    inner: CoreCatalyst,
}

#[pymethods]
impl PyCatalyst {
    #[new]
    fn new(values: &Bound<'_, PyAny>) -> PyResult<Self> {
        let items = values.iter()?.map(|v| number_text(&v?)).collect::<PyResult<Vec<_>>>()?;
        Ok(PyCatalyst { inner: CoreCatalyst::parse(&items).map_err(err)? })
    }

    fn entries(&self) -> Vec<(String, String)> {
        self.inner.to_entries().into_iter().map(|e| (e.value, e.multiplicity)).collect()
    }

    fn dimension(&self) -> String {
        self.inner.dimension().to_string()
    }

    fn __repr__(&self) -> String {
        format!("Catalyst(dimension={}, entries={})", self.inner.dimension(), self.inner.entries().len())
    }
}

/// Result of `synthesize_catalyst`.
#[pyclass(name = "Certificate", module = "catalyx_py")]
pub struct PyCertificate {
    inner: SynthesisCertificate,
}

#[pymethods]
impl PyCertificate {
    #[getter]
    fn verified(&self) -> bool {
        self.inner.verified
    }

    #[getter]
    fn route(&self) -> String {
        serde_json::to_value(self.inner.route).ok().and_then(|v| v.as_str().map(str::to_owned)).unwrap_or_default()
    }

    #[getter]
    fn catalyst(&self) -> PyResult<PyCatalyst> {
        Ok(PyCatalyst { inner: self.inner.catalyst().map_err(err)? })
    }

    fn reverify(&self) -> PyResult<bool> {
        self.inner.reverify(catalyx::catalysis::DEFAULT_PRODUCT_CAP).map_err(err)
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyCertificate { inner: SynthesisCertificate::from_json(text).map_err(err)? })
    }

    fn __repr__(&self) -> String {
        format!("Certificate(route={}, dimension={}, verified={})", self.route(), self.inner.catalyst_dimension, self.inner.verified)
    }
}

fn vector(obj: &Bound<'_, PyAny>) -> PyResult<CoreVector> {
    if let Ok(v) = obj.downcast::<PySchmidtVector>() {
        return Ok(v.borrow().inner.clone());
    }
    Ok(PySchmidtVector::new(obj)?.inner)
}

fn catalyst(obj: &Bound<'_, PyAny>) -> PyResult<CoreCatalyst> {
    if let Ok(c) = obj.downcast::<PyCatalyst>() {
        return Ok(c.borrow().inner.clone());
    }
    Ok(PyCatalyst::new(obj)?.inner)
}

/// `x ≺^w y`.
#[pyfunction]
fn supermajorizes(x: &Bound<'_, PyAny>, y: &Bound<'_, PyAny>) -> PyResult<bool> {
    super_majorizes(&vector(x)?, &vector(y)?).map_err(err)
}

/// Single-copy probability as `(p, m)`, with `p` a `"p/q"` string.
#[pyfunction]
fn vidal_probability(x: &Bound<'_, PyAny>, y: &Bound<'_, PyAny>) -> PyResult<(String, usize)> {
    let (p, m) = vidal_with_index(&vector(x)?, &vector(y)?).map_err(err)?;
    Ok((format_rational(&p), m))
}

#[pyfunction]
fn power_mean(x: &Bound<'_, PyAny>, nu: f64) -> PyResult<f64> {
    power_mean_f64(&vector(x)?, nu).map_err(err)
}

/// Catalytic probability report as a dict.
#[pyfunction]
#[pyo3(signature = (x, y, grid=None, precision_bits=None))]
fn catalytic_probability<'py>(
    py: Python<'py>,
    x: &Bound<'py, PyAny>,
    y: &Bound<'py, PyAny>,
    grid: Option<usize>,
    precision_bits: Option<usize>,
) -> PyResult<Bound<'py, PyDict>> {
    let mut s = ConversionSettings::default();
    if let Some(g) = grid {
        s.grid = g;
    }
    if let Some(b) = precision_bits {
        s.precision_bits = b;
    }
    let r = cat_prob(&vector(x)?, &vector(y)?, &s).map_err(err)?;
    let d = PyDict::new_bound(py);
    d.set_item("p_vidal", format_rational(&r.p_vidal))?;
    d.set_item("p_cat", r.p_cat.to_f64())?;
    d.set_item("p_cat_text", r.p_cat.to_sci_string(30))?;
    d.set_item("argmin_nu", r.argmin_nu)?;
    d.set_item("attainability", r.attainability.to_string())?;
    d.set_item("tolerance", r.tolerance)?;
    Ok(d)
}

/// Exact check of `x⊗c ≺^w y⊗c`.
#[pyfunction]
fn verify_catalyst(x: &Bound<'_, PyAny>, y: &Bound<'_, PyAny>, c: &Bound<'_, PyAny>) -> PyResult<bool> {
    verify_catalyst_with_cap(&vector(x)?, &vector(y)?, &catalyst(c)?, catalyx::catalysis::DEFAULT_PRODUCT_CAP)
        .map_err(err)
}

/// Builds a catalyst for `x → λy`; `lam` is a number or `"p/q"` string.
#[pyfunction]
#[pyo3(signature = (x, y, lam, margin=None, max_degree=None))]
fn synthesize_catalyst(
    py: Python<'_>,
    x: &Bound<'_, PyAny>,
    y: &Bound<'_, PyAny>,
    lam: &Bound<'_, PyAny>,
    margin: Option<f64>,
    max_degree: Option<usize>,
) -> PyResult<PyCertificate> {
    let (x, y) = (vector(x)?, vector(y)?);
    let lambda = parse_rational(&number_text(lam)?).map_err(err)?;
    let mut s = SynthesisSettings::default();
    if let Some(m) = margin {
        s.margin = m;
    }
    if let Some(d) = max_degree {
        s.max_degree = d;
    }
    let cert = py.allow_threads(|| synthesize(&x, &y, &lambda, &s)).map_err(err)?;
    Ok(PyCertificate { inner: cert })
}

#[pymodule]
fn catalyx_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("CatalyxError", m.py().get_type_bound::<CatalyxError>())?;
    m.add_class::<PySchmidtVector>()?;
    m.add_class::<PyCatalyst>()?;
    m.add_class::<PyCertificate>()?;
    m.add_function(wrap_pyfunction!(supermajorizes, m)?)?;
    m.add_function(wrap_pyfunction!(vidal_probability, m)?)?;
    m.add_function(wrap_pyfunction!(power_mean, m)?)?;
    m.add_function(wrap_pyfunction!(catalytic_probability, m)?)?;
    m.add_function(wrap_pyfunction!(verify_catalyst, m)?)?;
    m.add_function(wrap_pyfunction!(synthesize_catalyst, m)?)?;
    Ok(())
}

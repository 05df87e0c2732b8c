#![allow(clippy::useless_conversion)]

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use weilcalc::diagrams::{catalog, ENTRIES, SEXTUPLE};
use weilcalc::point::PolyMap;
use weilcalc::runner::run_checks;
use weilcalc::script::{parse_components, parse_object, parse_script};
use weilcalc::suite::{run_suite as run_suite_rs, SuiteOptions, SECTIONS};
use weilcalc::tangent::{self, TangentVector};
use weilcalc::{Error, InfinitesimalObject, Rational, WeilAlgebra};

fn py_err(e: Error) -> PyErr {
    PyValueError::new_err(format!("{}: {e}", e.kind()))
}

fn to_rational(v: &Bound<'_, PyAny>) -> PyResult<Rational> {
    let text = v.str()?.to_string();
    text.trim().parse().map_err(|_| PyValueError::new_err(format!("not a rational: {text}")))
}

fn to_fraction(py: Python<'_>, r: &Rational) -> PyResult<PyObject> {
    let frac = py.import_bound("fractions")?.getattr("Fraction")?;
    Ok(frac.call1((r.to_string(),))?.unbind())
}

fn fractions(py: Python<'_>, rs: &[Rational]) -> PyResult<Vec<PyObject>> {
    rs.iter().map(|r| to_fraction(py, r)).collect()
}

/// An infinitesimal object such as `D`, `D(3)`, `D^2{(1,2)}` or `D (+) D`.
#[pyclass(name = "InfinitesimalObject", frozen)]
#[derive(Clone)]
struct PyInfinitesimal {
    inner: InfinitesimalObject,
}

#[pymethods]
impl PyInfinitesimal {
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        Ok(PyInfinitesimal { inner: parse_object(text).map_err(py_err)? })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    /// Dimension of the Weil algebra.
    #[getter]
    fn dim(&self) -> usize {
        WeilAlgebra::of(&self.inner).dim()
    }

    /// Basis monomials of the Weil algebra, rendered.
    fn basis(&self) -> Vec<String> {
        WeilAlgebra::of(&self.inner).basis().iter().map(|m| m.render("d")).collect()
    }

    fn oplus(&self, other: &PyInfinitesimal) -> PyResult<Self> {
        Ok(PyInfinitesimal { inner: self.inner.oplus(&other.inner).map_err(py_err)? })
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("InfinitesimalObject('{}')", self.inner)
    }
}

/// A polynomial vector field on `R^k`.
#[pyclass(name = "VectorField", frozen)]
#[derive(Clone)]
struct PyField {
    inner: tangent::VectorField,
}

#[pymethods]
impl PyField {
    /// `VectorField(2, "x2, -x1")`
    #[new]
    fn new(k: usize, components: &str) -> PyResult<Self> {
        let comps = parse_components(components, 'x').map_err(py_err)?;
        let map = PolyMap::new(k, comps).map_err(py_err)?;
        Ok(PyField { inner: tangent::VectorField::new(map).map_err(py_err)? })
    }

    #[getter]
    fn k(&self) -> usize {
        self.inner.k()
    }

    fn components(&self) -> Vec<String> {
        self.inner.components().iter().map(|p| p.render("x")).collect()
    }

    /// The bracket through the commutator loop of microflows.
    fn bracket(&self, other: &PyField) -> PyResult<PyField> {
        Ok(PyField { inner: tangent::lie_bracket(&self.inner, &other.inner).map_err(py_err)? })
    }

    fn bracket_via_strong_difference(&self, other: &PyField) -> PyResult<PyField> {
        Ok(PyField { inner: tangent::bracket_via_strong_diff(&self.inner, &other.inner).map_err(py_err)? })
    }

    fn jacobian_bracket(&self, other: &PyField) -> PyResult<PyField> {
        Ok(PyField { inner: self.inner.jacobian_bracket(&other.inner).map_err(py_err)? })
    }

    fn at(&self, x: Vec<Bound<'_, PyAny>>) -> PyResult<PyTangent> {
        let x = x.iter().map(to_rational).collect::<PyResult<Vec<_>>>()?;
        if x.len() != self.inner.k() {
            return Err(PyValueError::new_err(format!("expected {} coordinates", self.inner.k())));
        }
        Ok(PyTangent { inner: self.inner.at(&x) })
    }

    fn is_zero(&self) -> bool {
        self.inner.is_zero()
    }

    fn __eq__(&self, other: &PyField) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        format!("VectorField({}, \"{}\")", self.inner.k(), self.components().join(", "))
    }
}

/// A tangent vector: a base point and a direction, both rational.
#[pyclass(name = "TangentVector", frozen)]
#[derive(Clone)]
struct PyTangent {
    inner: TangentVector,
}

#[pymethods]
impl PyTangent {
    #[new]
    fn new(base: Vec<Bound<'_, PyAny>>, direction: Vec<Bound<'_, PyAny>>) -> PyResult<Self> {
        let base = base.iter().map(to_rational).collect::<PyResult<Vec<_>>>()?;
        let dir = direction.iter().map(to_rational).collect::<PyResult<Vec<_>>>()?;
        Ok(PyTangent { inner: TangentVector::new(base, dir).map_err(py_err)? })
    }

    #[getter]
    fn base(&self, py: Python<'_>) -> PyResult<Vec<PyObject>> {
        fractions(py, &self.inner.base)
    }

    #[getter]
    fn direction(&self, py: Python<'_>) -> PyResult<Vec<PyObject>> {
        fractions(py, &self.inner.dir)
    }

    /// Sum through the pullback of two copies of `W_D`.
    fn __add__(&self, other: &PyTangent) -> PyResult<PyTangent> {
        Ok(PyTangent { inner: tangent::tangent_add(&self.inner, &other.inner).map_err(py_err)? })
    }

    fn __neg__(&self) -> PyTangent {
        PyTangent { inner: tangent::tangent_neg(&self.inner) }
    }

    fn __rmul__(&self, alpha: &Bound<'_, PyAny>) -> PyResult<PyTangent> {
        Ok(PyTangent { inner: tangent::tangent_scale(&to_rational(alpha)?, &self.inner) })
    }

    fn __eq__(&self, other: &PyTangent) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        let join = |v: &[Rational]| v.iter().map(|r| r.to_string()).collect::<Vec<_>>().join(", ");
        format!("TangentVector([{}], [{}])", join(&self.inner.base), join(&self.inner.dir))
    }
}

#[pyfunction]
fn tangent_zero(base: Vec<Bound<'_, PyAny>>) -> PyResult<PyTangent> {
    let base = base.iter().map(to_rational).collect::<PyResult<Vec<_>>>()?;
    Ok(PyTangent { inner: tangent::tangent_zero(&base) })
}

/// The three Jacobi terms `[X,[Y,Z]]`, `[Y,[Z,X]]`, `[Z,[X,Y]]` read off
/// the six composed microcubes, and whether they sum to zero.
#[pyfunction]
fn jacobi(x: &PyField, y: &PyField, z: &PyField) -> PyResult<(Vec<PyField>, bool)> {
    let six = tangent::jacobi_witness(&x.inner, &y.inner, &z.inner)
        .and_then(|s| s.map(|g| Ok(g.point().clone())))
        .map_err(py_err)?;
    let out = tangent::general_jacobi(&six).map_err(py_err)?;
    let terms = out
        .terms
        .iter()
        .map(|p| tangent::FlowElement::new(x.inner.k(), p.clone()).and_then(|f| f.to_field()))
        .map(|r| r.map(|inner| PyField { inner }).map_err(py_err))
        .collect::<PyResult<Vec<_>>>()?;
    Ok((terms, out.vanishes()))
}

type ConeRow = (String, String, usize, usize, bool);

/// `(cone, label, limit_dim, apex_dim, is_limit)` for every built-in cone.
#[pyfunction]
fn catalog_cones() -> PyResult<Vec<ConeRow>> {
    ENTRIES
        .iter()
        .chain([&SEXTUPLE])
        .map(|e| {
            let lim = catalog().limit(e.cone).map_err(py_err)?;
            let v = lim.verdict();
            Ok((e.cone.to_string(), e.label.to_string(), v.limit_dim, v.apex_dim, v.is_limit()))
        })
        .collect()
}

/// Runs a script's check directives; returns `(exit_code, json_report)`.
#[pyfunction]
fn check_script(text: &str) -> PyResult<(i32, String)> {
    let script = parse_script(text).map_err(py_err)?;
    let report = run_checks(&script);
    Ok((report.exit_code(), report.to_json()))
}

#[pyfunction]
#[pyo3(signature = (section=None, trials=10, seed=42, dim=2, degree=2))]
fn run_suite(section: Option<u8>, trials: usize, seed: u64, dim: usize, degree: u32) -> PyResult<(i32, String)> {
    if section.is_some_and(|s| !SECTIONS.contains(&s)) || dim == 0 {
        return Err(PyValueError::new_err("section must be 3..=6 and dim at least 1"));
    }
    let report = run_suite_rs(&SuiteOptions { section, trials, seed, dim, degree });
    Ok((report.exit_code(), report.to_json()))
}

#[pymodule]
fn weilcalc_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyInfinitesimal>()?;
    m.add_class::<PyField>()?;
    m.add_class::<PyTangent>()?;
    m.add_function(wrap_pyfunction!(tangent_zero, m)?)?;
    m.add_function(wrap_pyfunction!(jacobi, m)?)?;
    m.add_function(wrap_pyfunction!(catalog_cones, m)?)?;
    m.add_function(wrap_pyfunction!(check_script, m)?)?;
    m.add_function(wrap_pyfunction!(run_suite, m)?)?;
    Ok(())
}

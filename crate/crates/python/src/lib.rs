//! Python bindings. Structured results come back as plain dicts built from
//! the same JSON the command-line tool emits.

use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use serde::Serialize;

use minigraph::geometry::{grid_minimality_report, MapExpr, DEFAULT_MINIMAL_TOL};
use minigraph::jacobian::{classify_cr, jacobian, DEFAULT_CR_TOL};
use minigraph::weierstrass::{graph_jets, integrate_surface, phi_components, verify_construction, HoloData, DEFAULT_QUAD_ORDER};
use minigraph::{cli, GridSpec};

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_py(py: Python<'_>, value: &impl Serialize) -> PyResult<Py<PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    json_loads(py, &text)
}

fn json_loads(py: Python<'_>, text: &str) -> PyResult<Py<PyAny>> {
    Ok(py.import("json")?.call_method1("loads", (text,))?.unbind())
}

fn grid(text: Option<&str>) -> PyResult<GridSpec> {
    match text {
        Some(s) => s.parse::<GridSpec>().map_err(value_err),
        None => Ok(GridSpec::default()),
    }
}

/// A parsed expression in `x, y` (real mode) or `w` (complex mode).
#[pyclass(name = "Expr", frozen)]
struct PyExpr {
    inner: minigraph::Expr,
}

#[pymethods]
impl PyExpr {
    #[new]
    #[pyo3(signature = (source, mode = "real"))]
    fn new(source: &str, mode: &str) -> PyResult<Self> {
        let inner = match mode {
            "real" => minigraph::Expr::real(source),
            "complex" => minigraph::Expr::complex(source),
            other => return Err(PyValueError::new_err(format!("mode must be 'real' or 'complex', got {other:?}"))),
        }
        .map_err(value_err)?;
        Ok(PyExpr { inner })
    }

    #[getter]
    fn mode(&self) -> &'static str {
        self.inner.mode().name()
    }

    /// Value at `(x, y)`.
    fn eval(&self, x: f64, y: f64) -> PyResult<f64> {
        self.inner.eval_real(x, y).map_err(value_err)
    }

    /// Value and derivatives through second order at `(x, y)` as a dict.
    fn jet(&self, py: Python<'_>, x: f64, y: f64) -> PyResult<Py<PyAny>> {
        let j = self.inner.eval_jet2(x, y).map_err(value_err)?;
        to_py(py, &j)
    }

    /// Value at complex `w`.
    fn eval_complex(&self, w: Complex64) -> PyResult<Complex64> {
        self.inner.eval_complex(w).map_err(value_err)
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Expr({:?}, mode={:?})", self.inner.to_string(), self.inner.mode().name())
    }
}

/// A graph map `f = (f1, f2)` of the plane into the plane.
#[pyclass(name = "Map", frozen)]
struct PyMap {
    inner: MapExpr,
}

#[pymethods]
impl PyMap {
    #[new]
    fn new(f1: &str, f2: &str) -> PyResult<Self> {
        Ok(PyMap {
            inner: MapExpr::parse(f1, f2).map_err(value_err)?,
        })
    }

    /// Second-order jets of both components at `(x, y)`.
    fn jets(&self, py: Python<'_>, x: f64, y: f64) -> PyResult<Py<PyAny>> {
        to_py(py, &self.inner.jets(x, y).map_err(value_err)?)
    }

    /// Jacobian determinant of `f` at `(x, y)`.
    fn jacobian(&self, x: f64, y: f64) -> PyResult<f64> {
        Ok(jacobian(&self.inner.jets(x, y).map_err(value_err)?))
    }

    /// Minimal surface residual and mean curvature over a grid
    /// `"X0:X1:NX,Y0:Y1:NY"`.
    #[pyo3(signature = (grid = None, tol = DEFAULT_MINIMAL_TOL))]
    fn minimality(&self, py: Python<'_>, grid: Option<&str>, tol: f64) -> PyResult<Py<PyAny>> {
        let g = self::grid(grid)?;
        let r = py.detach(|| grid_minimality_report(&self.inner, &g, tol)).map_err(value_err)?;
        to_py(py, &r)
    }

    /// Cauchy-Riemann classification over a grid.
    #[pyo3(signature = (grid = None, tol = DEFAULT_CR_TOL))]
    fn classify(&self, py: Python<'_>, grid: Option<&str>, tol: f64) -> PyResult<Py<PyAny>> {
        let g = self::grid(grid)?;
        let r = py.detach(|| classify_cr(&self.inner, &g, tol)).map_err(value_err)?;
        to_py(py, &r)
    }

    fn __repr__(&self) -> String {
        format!("Map({:?}, {:?})", self.inner.f1.to_string(), self.inner.f2.to_string())
    }
}

/// Seed data `(h, a, b)` for the Weierstrass-type construction.
#[pyclass(name = "Seed", frozen)]
struct PySeed {
    inner: HoloData,
}

#[pymethods]
impl PySeed {
    #[new]
    #[pyo3(signature = (h, a, b, offset = (0.0, 0.0)))]
    fn new(h: &str, a: f64, b: f64, offset: (f64, f64)) -> PyResult<Self> {
        let inner = HoloData::parse(h, a, b).map_err(value_err)?.with_offset([offset.0, offset.1]);
        Ok(PySeed { inner })
    }

    #[getter]
    fn d(&self) -> Complex64 {
        self.inner.d()
    }

    /// `(phi1, phi2, phi3, phi4)` at `w`.
    fn phi(&self, w: Complex64) -> PyResult<(Complex64, Complex64, Complex64, Complex64)> {
        let q = phi_components(&self.inner, w).map_err(value_err)?;
        Ok((q.phi1, q.phi2, q.phi3, q.phi4))
    }

    /// Surface point `(x, y, f1, f2)` over `w`.
    #[pyo3(signature = (w, order = DEFAULT_QUAD_ORDER))]
    fn point(&self, w: Complex64, order: usize) -> PyResult<(f64, f64, f64, f64)> {
        let [x, y, f1, f2] = integrate_surface(&self.inner, w, order).map_err(value_err)?;
        Ok((x, y, f1, f2))
    }

    /// Jacobian of the graph map from the closed form at `w`.
    fn closed_form_jacobian(&self, w: Complex64) -> PyResult<f64> {
        self.inner.closed_form_jacobian(w).map_err(value_err)
    }

    /// Jets of the constructed graph map at the plane point `(x, y)`.
    fn graph_jets(&self, py: Python<'_>, x: f64, y: f64) -> PyResult<Py<PyAny>> {
        to_py(py, &graph_jets(&self.inner, x, y).map_err(value_err)?)
    }

    /// Check every construction identity over a grid in the `w` plane.
    #[pyo3(signature = (grid = None))]
    fn verify(&self, py: Python<'_>, grid: Option<&str>) -> PyResult<Py<PyAny>> {
        let g = self::grid(grid)?;
        let r = py.detach(|| verify_construction(&self.inner, &g)).map_err(value_err)?;
        to_py(py, &r)
    }
}

/// Run the command-line tool in-process. Returns `(exit_code, stdout, stderr)`.
#[pyfunction]
fn run(py: Python<'_>, args: Vec<String>) -> (i32, String, String) {
    let argv: Vec<String> = std::iter::once("minigraph".to_string()).chain(args).collect();
    let out = py.detach(|| cli::run(argv));
    (out.code, out.stdout, out.stderr)
}

/// Run a command and return its JSON report as a dict. Usage errors raise
/// `ValueError`; a failing verdict is reported in the dict, not raised.
#[pyfunction]
fn report(py: Python<'_>, args: Vec<String>) -> PyResult<Py<PyAny>> {
    let (code, stdout, stderr) = run(py, args);
    if code == cli::EXIT_USAGE || stdout.is_empty() {
        return Err(PyValueError::new_err(stderr.trim().to_string()));
    }
    json_loads(py, &stdout)
}

/// The built-in reference examples as a report dict.
#[pyfunction]
fn selftest(py: Python<'_>) -> PyResult<Py<PyAny>> {
    report(py, vec!["selftest".into()])
}

#[pymodule]
fn pyminigraph(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<PyExpr>()?;
    m.add_class::<PyMap>()?;
    m.add_class::<PySeed>()?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_function(wrap_pyfunction!(report, m)?)?;
    m.add_function(wrap_pyfunction!(selftest, m)?)?;
    Ok(())
}

//! Python bindings. Distances cross the boundary as `fractions.Fraction`
//! (or anything whose `str` is an integer, `p/q` or a decimal literal) so no
//! precision is lost in either direction.

use nhyp_core::generate::{generate as gen_space, Generator};
use nhyp_core::hyperbolicity::{self, DeltaOptions, Engine, FamilyMode};
use nhyp_core::io::{parse_space, space_to_json, ParseOptions};
use nhyp_core::tightspan::{enumerate_cells, DEFAULT_CELL_BOUND};
use nhyp_core::{validate_metric, witness, FiniteMetricSpace, Scalar};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn value_error(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn fraction<'py>(py: Python<'py>, s: &Scalar) -> PyResult<Bound<'py, PyAny>> {
    py.import("fractions")?.getattr("Fraction")?.call1((s.to_string(),))
}

fn scalar(obj: &Bound<'_, PyAny>) -> PyResult<Scalar> {
    let text: String = obj.str()?.extract()?;
    text.parse().map_err(value_error)
}

fn json_to_py<'py>(py: Python<'py>, v: &serde_json::Value) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (v.to_string(),))
}

/// A finite metric space with exact rational distances.
#[pyclass(name = "MetricSpace", module = "nhyp", frozen)]
pub struct PyMetricSpace {
    inner: FiniteMetricSpace,
}

#[pymethods]
impl PyMetricSpace {
    #[new]
    #[pyo3(signature = (matrix, points=None))]
    fn new(matrix: Vec<Vec<Bound<'_, PyAny>>>, points: Option<Vec<String>>) -> PyResult<Self> {
        let matrix = matrix
            .iter()
            .map(|row| row.iter().map(scalar).collect::<PyResult<Vec<_>>>())
            .collect::<PyResult<Vec<_>>>()?;
        let points = points.unwrap_or_else(|| nhyp_core::metric::default_labels(matrix.len()));
        let inner = validate_metric(points, matrix).map_err(value_error)?;
        Ok(PyMetricSpace { inner })
    }

    /// Parses the JSON or CSV interchange format.
    #[staticmethod]
    #[pyo3(signature = (text, rationalize=false))]
    fn parse(text: &str, rationalize: bool) -> PyResult<Self> {
        let opts = ParseOptions { rationalize, ..ParseOptions::default() };
        parse_space(text, &opts).map(|inner| PyMetricSpace { inner }).map_err(value_error)
    }

    fn to_json(&self) -> String {
        space_to_json(&self.inner)
    }

    #[getter]
    fn points(&self) -> Vec<String> {
        self.inner.labels().to_vec()
    }

    #[getter]
    fn matrix<'py>(&self, py: Python<'py>) -> PyResult<Vec<Vec<Bound<'py, PyAny>>>> {
        self.inner
            .matrix()
            .iter()
            .map(|row| row.iter().map(|x| fraction(py, x)).collect())
            .collect()
    }

    fn distance<'py>(&self, py: Python<'py>, a: &str, b: &str) -> PyResult<Bound<'py, PyAny>> {
        let idx = |l: &str| self.inner.index_of(l).ok_or_else(|| value_error(format!("unknown point {l:?}")));
        fraction(py, self.inner.d(idx(a)?, idx(b)?))
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!("MetricSpace(points={:?})", self.inner.labels())
    }
}

/// Least delta for which the space is (n, delta)-hyperbolic, with the family
/// attaining it.
#[pyfunction]
#[pyo3(signature = (space, n, engine="assignment", mode="full"))]
fn min_delta<'py>(
    py: Python<'py>,
    space: &PyMetricSpace,
    n: usize,
    engine: &str,
    mode: &str,
) -> PyResult<Bound<'py, PyDict>> {
    let engine = match engine {
        "assignment" => Engine::Assignment,
        "brute" => Engine::Brute,
        other => return Err(value_error(format!("unknown engine {other:?}"))),
    };
    let mode = match mode {
        "full" => FamilyMode::Full,
        "distinct" => FamilyMode::Distinct,
        other => return Err(value_error(format!("unknown mode {other:?}"))),
    };
    let x = &space.inner;
    let md = py.detach(|| hyperbolicity::min_delta(x, n, DeltaOptions { engine, mode }));
    let out = PyDict::new(py);
    out.set_item("delta", fraction(py, &md.delta)?)?;
    let family: Vec<(String, String)> = md
        .witness
        .family
        .pairs()
        .iter()
        .map(|&(a, b)| (x.label(a).to_string(), x.label(b).to_string()))
        .collect();
    out.set_item("family", family)?;
    out.set_item("families_checked", md.families_checked)?;
    Ok(out)
}

/// Gromov's four-point constant.
#[pyfunction]
fn gromov_delta<'py>(py: Python<'py>, space: &PyMetricSpace) -> PyResult<Bound<'py, PyAny>> {
    fraction(py, &hyperbolicity::gromov_delta(&space.inner))
}

/// Vertices and cells of the tight span. Values inside the returned dict are
/// `"p/q"` strings.
#[pyfunction]
#[pyo3(signature = (space, bound=DEFAULT_CELL_BOUND))]
fn tight_span<'py>(py: Python<'py>, space: &PyMetricSpace, bound: usize) -> PyResult<Bound<'py, PyAny>> {
    let x = &space.inner;
    let complex = py.detach(|| enumerate_cells(x, bound)).map_err(value_error)?;
    let mut v = complex.to_json();
    v["dimension"] = complex.dimension().into();
    json_to_py(py, &v)
}

/// Largest orthoplex scale over paired subsets of `2(n+1)` points, with the
/// witness for the best one.
#[pyfunction]
fn best_scale<'py>(py: Python<'py>, space: &PyMetricSpace, n: usize) -> PyResult<Bound<'py, PyDict>> {
    let x = &space.inner;
    let b = py.detach(|| witness::best_scale(x, n)).map_err(value_error)?;
    let out = PyDict::new(py);
    match &b.s_hat {
        Some(s) => out.set_item("s_hat", fraction(py, s)?)?,
        None => out.set_item("s_hat", py.None())?,
    }
    out.set_item("families_checked", b.families_checked)?;
    match &b.witness {
        Some(w) => out.set_item("witness", json_to_py(py, &w.to_json())?)?,
        None => out.set_item("witness", py.None())?,
    }
    Ok(out)
}

/// Builds a named space: `cycle(m)`, `tree(leaves)`,
/// `graph(points, edge_probability, max_weight)`, `linf_grid(dim, side, scale)`
/// or `l2_grid(dim, side, scale)`.
#[pyfunction]
#[pyo3(signature = (kind, seed=0, **params))]
fn generate(kind: &str, seed: u64, params: Option<&Bound<'_, PyDict>>) -> PyResult<PyMetricSpace> {
    let get = |key: &str| -> PyResult<Option<Bound<'_, PyAny>>> {
        match params {
            Some(p) => p.get_item(key),
            None => Ok(None),
        }
    };
    let need = |key: &str| -> PyResult<usize> {
        get(key)?
            .ok_or_else(|| value_error(format!("{kind} needs {key}=")))?
            .extract()
    };
    let scale = || -> PyResult<Scalar> {
        match get("scale")? {
            Some(s) => scalar(&s),
            None => Ok(Scalar::one()),
        }
    };
    let g = match kind {
        "cycle" => Generator::Cycle { m: need("m")? },
        "tree" => Generator::RandomTree { leaves: need("leaves")? },
        "graph" => Generator::RandomGraph {
            points: need("points")?,
            edge_probability: get("edge_probability")?.map(|v| v.extract()).transpose()?.unwrap_or(0.4),
            max_weight: get("max_weight")?.map(|v| v.extract()).transpose()?.unwrap_or(5),
        },
        "linf_grid" => Generator::linf_grid(need("dim")?, need("side")?, scale()?),
        "l2_grid" => Generator::l2_grid(need("dim")?, need("side")?, scale()?),
        other => return Err(value_error(format!("unknown generator {other:?}"))),
    };
    gen_space(&g, seed).map(|inner| PyMetricSpace { inner }).map_err(value_error)
}

/// The l-infinity product of two spaces.
#[pyfunction]
fn linf_product(a: &PyMetricSpace, b: &PyMetricSpace) -> PyMetricSpace {
    PyMetricSpace { inner: nhyp_core::linf_product(&a.inner, &b.inner) }
}

#[pymodule]
fn nhyp(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyMetricSpace>()?;
    m.add_function(wrap_pyfunction!(min_delta, m)?)?;
    m.add_function(wrap_pyfunction!(gromov_delta, m)?)?;
    m.add_function(wrap_pyfunction!(tight_span, m)?)?;
    m.add_function(wrap_pyfunction!(best_scale, m)?)?;
    m.add_function(wrap_pyfunction!(generate, m)?)?;
    m.add_function(wrap_pyfunction!(linf_product, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}

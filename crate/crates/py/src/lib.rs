//! Python bindings for `transfractal`.

use num_bigint::BigUint;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use transfractal::cover::{self, BoxCover, CoverMethod};
use transfractal::dim::{self, BoxRow, BoxTable, CountMethod, DimensionFit, FitConfig};
use transfractal::edgelist;
use transfractal::hm::{self, BaseGraph, Code};
use transfractal::shm;
use transfractal::tree::{self, DegreeProfile, LevelProfile, OffspringDistribution};
use transfractal::MetricMode;

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn mode(name: &str) -> PyResult<MetricMode> {
    name.parse().map_err(err)
}

fn base(name: &str) -> PyResult<BaseGraph> {
    BaseGraph::builtin(name)
        .or_else(|| BaseGraph::from_text(name).ok())
        .ok_or_else(|| err(format!("unknown base graph '{name}'")))
}

/// An undirected simple graph.
#[pyclass(name = "Graph", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyGraph {
    inner: transfractal::Graph,
}

#[pymethods]
impl PyGraph {
    #[new]
    fn new(num_vertices: usize, edges: Vec<(usize, usize)>) -> PyResult<Self> {
        Ok(PyGraph {
            inner: transfractal::Graph::from_edges(num_vertices, &edges).map_err(err)?,
        })
    }

    #[staticmethod]
    fn from_edge_list(text: &str) -> PyResult<Self> {
        Ok(PyGraph {
            inner: edgelist::parse_edge_list(text).map_err(err)?,
        })
    }

    fn to_edge_list(&self) -> String {
        edgelist::write_edge_list(&self.inner)
    }

    #[getter]
    fn num_vertices(&self) -> usize {
        self.inner.num_vertices()
    }

    #[getter]
    fn num_edges(&self) -> usize {
        self.inner.num_edges()
    }

    fn neighbors(&self, v: usize) -> PyResult<Vec<usize>> {
        if v >= self.inner.num_vertices() {
            return Err(err(format!("vertex {v} out of range")));
        }
        Ok(self.inner.neighbors(v).to_vec())
    }

    fn edges(&self) -> Vec<(usize, usize)> {
        self.inner.edges().collect()
    }

    fn label(&self, v: usize) -> Option<String> {
        self.inner.label(v).map(str::to_string)
    }

    fn is_connected(&self) -> bool {
        self.inner.is_connected()
    }

    fn diameter(&self) -> PyResult<u32> {
        transfractal::graph::diameter(&self.inner).map_err(err)
    }

    fn is_ell_box(&self, vertices: Vec<usize>, ell: u32, metric: &str) -> PyResult<bool> {
        transfractal::graph::is_ell_box(&self.inner, &vertices, ell, mode(metric)?).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("Graph(vertices={}, edges={})", self.inner.num_vertices(), self.inner.num_edges())
    }
}

/// A partition of the vertices into boxes of size `ell`.
#[pyclass(name = "BoxCover", frozen, get_all)]
struct PyBoxCover {
    ell: u32,
    mode: String,
    boxes: Vec<Vec<usize>>,
    method: String,
    optimal: bool,
}

#[pymethods]
impl PyBoxCover {
    fn __len__(&self) -> usize {
        self.boxes.len()
    }

    fn __repr__(&self) -> String {
        format!("BoxCover(ell={}, boxes={}, method={}, optimal={})", self.ell, self.boxes.len(), self.method, self.optimal)
    }
}

impl From<BoxCover> for PyBoxCover {
    fn from(c: BoxCover) -> Self {
        PyBoxCover {
            ell: c.ell,
            mode: c.mode.as_str().to_string(),
            boxes: c.boxes,
            method: c.method.as_str().to_string(),
            optimal: c.optimal,
        }
    }
}

impl PyBoxCover {
    fn to_core(&self) -> PyResult<BoxCover> {
        let method = match self.method.as_str() {
            "exact" => CoverMethod::Exact,
            "greedy" => CoverMethod::Greedy,
            _ => CoverMethod::Constructive,
        };
        Ok(BoxCover {
            ell: self.ell,
            mode: mode(&self.mode)?,
            boxes: self.boxes.clone(),
            method,
            optimal: self.optimal,
        })
    }
}

#[pyfunction]
#[pyo3(signature = (graph, ell, metric = "subgraph", seed = 0))]
fn greedy_boxing(graph: &PyGraph, ell: u32, metric: &str, seed: u64) -> PyResult<PyBoxCover> {
    Ok(cover::greedy_boxing(&graph.inner, ell, mode(metric)?, seed).map_err(err)?.into())
}

#[pyfunction]
#[pyo3(signature = (graph, ell, metric = "subgraph", budget = cover::DEFAULT_NODE_BUDGET))]
fn min_boxes_exact(py: Python<'_>, graph: &PyGraph, ell: u32, metric: &str, budget: u64) -> PyResult<PyBoxCover> {
    let m = mode(metric)?;
    let g = graph.inner.clone();
    let c = py.detach(move || cover::min_boxes_exact(&g, ell, m, budget)).map_err(err)?;
    Ok(c.into())
}

/// Raises `ValueError` describing the first violation.
#[pyfunction]
fn verify_cover(graph: &PyGraph, cover: &PyBoxCover) -> PyResult<()> {
    cover::verify_cover(&graph.inner, &cover.to_core()?).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (n, base_graph = "cherry"))]
fn build_hm(n: usize, base_graph: &str) -> PyResult<PyGraph> {
    Ok(PyGraph {
        inner: hm::build_hm(&base(base_graph)?, n).map_err(err)?,
    })
}

#[pyfunction]
#[pyo3(signature = (n, base_graph = "cherry"))]
fn hm_diameter_formula(n: usize, base_graph: &str) -> PyResult<u32> {
    hm::hm_diameter_formula(&base(base_graph)?, n).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (k, base_graph = "cherry"))]
fn hm_ell(k: usize, base_graph: &str) -> PyResult<u32> {
    hm::hm_ell(&base(base_graph)?, k).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (n, k, base_graph = "cherry"))]
fn hm_prefix_boxing(n: usize, k: usize, base_graph: &str) -> PyResult<PyBoxCover> {
    Ok(hm::hm_prefix_boxing(&base(base_graph)?, n, k).map_err(err)?.into())
}

/// Vertex indices of the certified witness set.
#[pyfunction]
#[pyo3(signature = (graph, n, k, base_graph = "cherry"))]
fn hm_witness_set(graph: &PyGraph, n: usize, k: usize, base_graph: &str) -> PyResult<Vec<usize>> {
    Ok(hm::hm_witness_set(&base(base_graph)?, &graph.inner, n, k).map_err(err)?.vertices)
}

/// Labels along the constructed walk between two word labels.
#[pyfunction]
#[pyo3(signature = (x, y, base_graph = "cherry"))]
fn hm_construct_path(x: &str, y: &str, base_graph: &str) -> PyResult<Vec<String>> {
    let b = base(base_graph)?;
    let letters = b.num_letters();
    let x = Code::parse_label(x, letters).map_err(err)?;
    let y = Code::parse_label(y, letters).map_err(err)?;
    let p = hm::hm_construct_path(&b, &x, &y).map_err(err)?;
    Ok(p.words.iter().map(|w| w.to_label(letters)).collect())
}

#[pyfunction]
fn shm_counts(v0: u128, e0: u128, m: u128, n: u32) -> PyResult<(u128, u128)> {
    shm::shm_counts(v0, e0, m, n).map_err(err)
}

#[pyfunction]
fn shm_box_bounds(v0: u128, e0: u128, m: u128, d0: u32, n: u32, k: u32) -> PyResult<(u128, u128)> {
    shm::shm_box_bounds(v0, e0, m, d0, n, k).map_err(err)
}

/// Snapshots at steps `0..=steps`.
#[pyfunction]
#[pyo3(signature = (initial, m, p, steps, seed = 0))]
fn shm_evolve(initial: &str, m: usize, p: f64, steps: u32, seed: u64) -> PyResult<Vec<PyGraph>> {
    let g = shm::shm_initial(initial).map_err(err)?;
    let states = shm::shm_evolve(&g, m, p, steps, seed).map_err(err)?;
    Ok(states.into_iter().map(|s| PyGraph { inner: s.graph }).collect())
}

fn profile(spec: &Bound<'_, PyAny>) -> PyResult<DegreeProfile> {
    if let Ok(values) = spec.extract::<Vec<u64>>() {
        return DegreeProfile::new_finite(values).map_err(err);
    }
    let text: String = spec.extract()?;
    DegreeProfile::from_text(&text).map_err(err)
}

/// Generation sizes of the spherically symmetric tree of height `n`. The
/// profile is a list of child counts or profile text such as
/// `"rule twothree"`.
#[pyfunction]
fn level_sizes(profile_spec: &Bound<'_, PyAny>, n: u64) -> PyResult<Vec<BigUint>> {
    Ok(tree::level_sizes(&profile(profile_spec)?, n).map_err(err)?.levels)
}

#[pyfunction]
fn tree_box_bounds(levels: Vec<BigUint>, n: u32, k: u32) -> PyResult<(BigUint, BigUint)> {
    tree::tree_box_bounds(&LevelProfile { levels }, n, k).map_err(err)
}

#[pyfunction]
fn greedy_count(levels: Vec<BigUint>, n: u32, k: u32) -> PyResult<BigUint> {
    tree::greedy_count(&LevelProfile { levels }, n, k).map_err(err)
}

/// `(graph, root)` of the spherically symmetric tree of height `n`.
#[pyfunction]
fn build_spherical(profile_spec: &Bound<'_, PyAny>, n: u32) -> PyResult<(PyGraph, usize)> {
    let (t, _) = tree::build_spherical(&profile(profile_spec)?, n).map_err(err)?;
    Ok((PyGraph { inner: t.graph }, t.root))
}

#[pyfunction]
#[pyo3(signature = (q, n, seed = 0, level_cap = 1 << 40))]
fn sample_gw_levels(q: Vec<f64>, n: u32, seed: u64, level_cap: u64) -> PyResult<Vec<BigUint>> {
    let q = OffspringDistribution::new(q).map_err(err)?;
    Ok(tree::sample_gw_levels(&q, n, seed, level_cap).map_err(err)?.levels)
}

fn table(rows: Vec<(u32, u32, BigUint, String, BigUint)>) -> PyResult<BoxTable> {
    let mut t = BoxTable::new();
    for (ell, n, count, method, size) in rows {
        let method: CountMethod = method.parse().map_err(err)?;
        t.push(BoxRow::new(ell, n, count, method, size)).map_err(err)?;
    }
    Ok(t)
}

/// Result of a dimension fit.
#[pyclass(name = "DimensionFit", frozen, get_all)]
struct PyDimensionFit {
    kind: String,
    slope: f64,
    intercept: f64,
    max_residual: f64,
    bracket: Option<(f64, f64)>,
    linear: bool,
    points: Vec<(f64, f64)>,
}

#[pymethods]
impl PyDimensionFit {
    fn __repr__(&self) -> String {
        format!("DimensionFit(kind={}, slope={}, bracket={:?}, linear={})", self.kind, self.slope, self.bracket, self.linear)
    }
}

impl From<DimensionFit> for PyDimensionFit {
    fn from(f: DimensionFit) -> Self {
        PyDimensionFit {
            kind: f.kind.as_str().to_string(),
            slope: f.slope,
            intercept: f.intercept,
            max_residual: f.max_residual,
            bracket: f.bracket,
            linear: f.linear,
            points: f.points,
        }
    }
}

/// Rows are `(ell, n, count, method, size)` with method one of `exact`,
/// `lower`, `upper`, `greedy`.
#[pyfunction]
#[pyo3(signature = (rows, residual_tolerance = 0.05))]
fn fit_tau(rows: Vec<(u32, u32, BigUint, String, BigUint)>, residual_tolerance: f64) -> PyResult<PyDimensionFit> {
    let cfg = FitConfig { residual_tolerance };
    Ok(dim::fit_tau(&table(rows)?, &cfg).map_err(err)?.into())
}

#[pyfunction]
#[pyo3(signature = (rows, residual_tolerance = 0.05))]
fn fit_db(rows: Vec<(u32, u32, BigUint, String, BigUint)>, residual_tolerance: f64) -> PyResult<PyDimensionFit> {
    let cfg = FitConfig { residual_tolerance };
    Ok(dim::fit_db(&table(rows)?, &cfg).map_err(err)?.into())
}

#[pymodule]
fn transfractal_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGraph>()?;
    m.add_class::<PyBoxCover>()?;
    m.add_class::<PyDimensionFit>()?;
    m.add_function(wrap_pyfunction!(greedy_boxing, m)?)?;
    m.add_function(wrap_pyfunction!(min_boxes_exact, m)?)?;
    m.add_function(wrap_pyfunction!(verify_cover, m)?)?;
    m.add_function(wrap_pyfunction!(build_hm, m)?)?;
    m.add_function(wrap_pyfunction!(hm_diameter_formula, m)?)?;
    m.add_function(wrap_pyfunction!(hm_ell, m)?)?;
    m.add_function(wrap_pyfunction!(hm_prefix_boxing, m)?)?;
    m.add_function(wrap_pyfunction!(hm_witness_set, m)?)?;
    m.add_function(wrap_pyfunction!(hm_construct_path, m)?)?;
    m.add_function(wrap_pyfunction!(shm_counts, m)?)?;
    m.add_function(wrap_pyfunction!(shm_box_bounds, m)?)?;
    m.add_function(wrap_pyfunction!(shm_evolve, m)?)?;
    m.add_function(wrap_pyfunction!(level_sizes, m)?)?;
    m.add_function(wrap_pyfunction!(tree_box_bounds, m)?)?;
    m.add_function(wrap_pyfunction!(greedy_count, m)?)?;
    m.add_function(wrap_pyfunction!(build_spherical, m)?)?;
    m.add_function(wrap_pyfunction!(sample_gw_levels, m)?)?;
    m.add_function(wrap_pyfunction!(fit_tau, m)?)?;
    m.add_function(wrap_pyfunction!(fit_db, m)?)?;
    Ok(())
}

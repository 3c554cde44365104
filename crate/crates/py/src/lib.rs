//! Python bindings: task graphs, mappers, metrics, schedulers, PSO and the
//! exhaustive oracle. Mappings cross the boundary as `list[int]` (tile per
//! core); errors surface as `ValueError`.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use noc3d::harness::oracle::exhaustive_oracle as oracle_search;
use noc3d::scheduler::{cluster_plan as plan_clusters, dynamic_schedule as schedule_dynamic};
use noc3d::taskgraph::{generate_random_graph, parse_graph, Arc};
use noc3d::{EnergyModel, MapperKind, Mapping, Mesh3D, Objective, Occupancy, PsoParams, TaskGraph};

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn mesh(n: usize) -> PyResult<Mesh3D> {
    Mesh3D::new(n).map_err(err)
}

fn model(e_switch: f64, e_link: f64, rho: f64) -> PyResult<EnergyModel> {
    EnergyModel::new(e_switch, e_link, rho).map_err(err)
}

#[pyclass(name = "TaskGraph", module = "pynoc3d", frozen)]
struct PyTaskGraph {
    inner: TaskGraph,
}

#[pymethods]
impl PyTaskGraph {
    /// `arcs` is a list of `(src, dst, volume, bandwidth)` tuples.
    #[new]
    fn new(n_cores: usize, arcs: Vec<(usize, usize, u64, u64)>) -> PyResult<Self> {
        let arcs = arcs
            .into_iter()
            .map(|(src, dst, volume, bandwidth)| Arc {
                src,
                dst,
                volume,
                bandwidth,
            })
            .collect();
        Ok(Self {
            inner: TaskGraph::new(n_cores, arcs).map_err(err)?,
        })
    }

    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        Ok(Self {
            inner: parse_graph(text).map_err(err)?,
        })
    }

    #[staticmethod]
    #[pyo3(signature = (n_cores, n_arcs, seed, vol_min=10, vol_max=1000, bw_min=1, bw_max=100))]
    fn random(
        n_cores: usize,
        n_arcs: usize,
        seed: u64,
        vol_min: u64,
        vol_max: u64,
        bw_min: u64,
        bw_max: u64,
    ) -> PyResult<Self> {
        Ok(Self {
            inner: generate_random_graph(n_cores, n_arcs, vol_min..=vol_max, bw_min..=bw_max, seed)
                .map_err(err)?,
        })
    }

    #[getter]
    fn num_cores(&self) -> usize {
        self.inner.num_cores()
    }

    #[getter]
    fn arcs(&self) -> Vec<(usize, usize, u64, u64)> {
        self.inner
            .arcs()
            .iter()
            .map(|a| (a.src, a.dst, a.volume, a.bandwidth))
            .collect()
    }

    fn out_degree(&self, core: usize) -> PyResult<usize> {
        self.inner.out_degree(core).map_err(err)
    }

    fn ranking(&self, core: usize) -> PyResult<u64> {
        self.inner.ranking(core).map_err(err)
    }

    fn priority_order(&self) -> PyResult<Vec<usize>> {
        Ok(self.inner.priority_order().map_err(err)?.order)
    }

    fn to_text(&self) -> String {
        self.inner.to_text()
    }

    fn __len__(&self) -> usize {
        self.inner.num_cores()
    }

    fn __repr__(&self) -> String {
        format!(
            "TaskGraph(cores={}, arcs={})",
            self.inner.num_cores(),
            self.inner.arcs().len()
        )
    }
}

#[pyfunction]
#[pyo3(signature = (links, e_switch=0.284, e_link=0.449))]
fn bit_energy(links: usize, e_switch: f64, e_link: f64) -> PyResult<f64> {
    Ok(model(e_switch, e_link, 1.0)?.bit_energy(links))
}

#[pyfunction]
fn xyz_hops(n: usize, a: usize, b: usize) -> PyResult<usize> {
    mesh(n)?.xyz_hops(a, b).map_err(err)
}

/// Nearest free tile to `anchor` in lozenge order, given occupied tiles.
#[pyfunction]
fn lozenge_next_empty(n: usize, anchor: usize, occupied: Vec<usize>) -> PyResult<usize> {
    let m = mesh(n)?;
    let mut occ = Occupancy::new(m.num_tiles());
    for t in occupied {
        if t >= m.num_tiles() {
            return Err(err(format!("tile {t} out of range")));
        }
        occ.occupy(t);
    }
    m.lozenge_next_empty(anchor, &occ).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (graph, mesh_n=3, algo="ddmap"))]
fn map_cores(graph: &PyTaskGraph, mesh_n: usize, algo: &str) -> PyResult<Vec<usize>> {
    let kind: MapperKind = algo.parse().map_err(err)?;
    Ok(kind.map(&graph.inner, &mesh(mesh_n)?).map_err(err)?.assign)
}

/// Returns a dict with `total_energy`, `comm_cost`, `avg_latency` (None when
/// no arc carries data) and `eta`.
#[pyfunction]
#[pyo3(signature = (graph, mapping, mesh_n=3, e_switch=0.284, e_link=0.449, rho=1.0))]
fn evaluate<'py>(
    py: Python<'py>,
    graph: &PyTaskGraph,
    mapping: Vec<usize>,
    mesh_n: usize,
    e_switch: f64,
    e_link: f64,
    rho: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let r = noc3d::metrics::evaluate(
        &graph.inner,
        &Mapping::new(mapping),
        &mesh(mesh_n)?,
        &model(e_switch, e_link, rho)?,
    )
    .map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("total_energy", r.total_energy)?;
    d.set_item("comm_cost", r.comm_cost)?;
    d.set_item("avg_latency", r.avg_latency)?;
    d.set_item("eta", r.eta)?;
    Ok(d)
}

/// Tile per task from round-by-round DDMap scheduling.
#[pyfunction]
#[pyo3(signature = (graph, mesh_n=3))]
fn dynamic_schedule(graph: &PyTaskGraph, mesh_n: usize) -> PyResult<Vec<usize>> {
    Ok(schedule_dynamic(&graph.inner, &mesh(mesh_n)?)
        .map_err(err)?
        .mapping()
        .assign)
}

/// Dict with `clusters`, `cluster_mapping` and the task-level `mapping`.
#[pyfunction]
#[pyo3(signature = (graph, mesh_n=3, mapper="ddmap"))]
fn cluster_schedule<'py>(
    py: Python<'py>,
    graph: &PyTaskGraph,
    mesh_n: usize,
    mapper: &str,
) -> PyResult<Bound<'py, PyDict>> {
    let kind: MapperKind = mapper.parse().map_err(err)?;
    let plan = plan_clusters(&graph.inner, &mesh(mesh_n)?, kind).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("clusters", plan.clusters.clusters.clone())?;
    d.set_item("cluster_mapping", plan.cluster_mapping.assign.clone())?;
    d.set_item("mapping", plan.schedule.mapping().assign)?;
    Ok(d)
}

/// Dict with `mapping`, `fitness` and `trace` (list of best-so-far values).
#[pyfunction]
#[pyo3(signature = (
    graph, mesh_n=3, objective="energy", seed=0, seed_mapping=None,
    swarm_size=200, max_evals=150_000, simulations=1,
    c1=1.2, c2=1.3, w=0.721348, e_switch=0.284, e_link=0.449, rho=1.0
))]
#[allow(clippy::too_many_arguments)]
fn pso_optimize<'py>(
    py: Python<'py>,
    graph: &PyTaskGraph,
    mesh_n: usize,
    objective: &str,
    seed: u64,
    seed_mapping: Option<Vec<usize>>,
    swarm_size: usize,
    max_evals: usize,
    simulations: usize,
    c1: f64,
    c2: f64,
    w: f64,
    e_switch: f64,
    e_link: f64,
    rho: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let objective: Objective = objective.parse().map_err(err)?;
    let params = PsoParams {
        c1,
        c2,
        w,
        swarm_size,
        max_simulations: simulations,
        max_evals,
        seed,
    };
    let m = mesh(mesh_n)?;
    let em = model(e_switch, e_link, rho)?;
    let seed_mapping = seed_mapping.map(Mapping::new);
    let g = &graph.inner;
    let r = py
        .detach(|| noc3d::pso::pso_optimize(g, &m, &params, &em, objective, seed_mapping.as_ref()))
        .map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("mapping", r.mapping.assign)?;
    d.set_item("fitness", r.fitness)?;
    d.set_item(
        "trace",
        r.trace.iter().map(|t| t.gbest_fitness).collect::<Vec<_>>(),
    )?;
    Ok(d)
}

/// Optimal `(fitness, mapping)` by enumerating every injective mapping.
#[pyfunction]
#[pyo3(signature = (graph, mesh_n=2, objective="energy"))]
fn exhaustive_oracle(graph: &PyTaskGraph, mesh_n: usize, objective: &str) -> PyResult<(f64, Vec<usize>)> {
    let objective: Objective = objective.parse().map_err(err)?;
    let r = oracle_search(&graph.inner, &mesh(mesh_n)?, &EnergyModel::default(), objective).map_err(err)?;
    Ok((r.fitness, r.mapping.assign))
}

#[pymodule]
fn pynoc3d(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyTaskGraph>()?;
    m.add_function(wrap_pyfunction!(bit_energy, m)?)?;
    m.add_function(wrap_pyfunction!(xyz_hops, m)?)?;
    m.add_function(wrap_pyfunction!(lozenge_next_empty, m)?)?;
    m.add_function(wrap_pyfunction!(map_cores, m)?)?;
    m.add_function(wrap_pyfunction!(evaluate, m)?)?;
    m.add_function(wrap_pyfunction!(dynamic_schedule, m)?)?;
    m.add_function(wrap_pyfunction!(cluster_schedule, m)?)?;
    m.add_function(wrap_pyfunction!(pso_optimize, m)?)?;
    m.add_function(wrap_pyfunction!(exhaustive_oracle, m)?)?;
    Ok(())
}

//! Experiment runner: executes one pipeline on one graph, produces the
//! mapping artifact and a report row.

pub mod oracle;
pub mod report;

use std::fmt;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use crate::error::{Error, Result};
use crate::mappers::MapperKind;
use crate::metrics::{evaluate, EnergyModel, EvalReport, Mapping};
use crate::pso::{pso_optimize, Objective, PsoParams, PsoResult};
use crate::scheduler::{cluster_plan, dynamic_schedule, ClusterPlan};
use crate::taskgraph::{parse_graph, TaskGraph};
use crate::topology::Mesh3D;

pub use oracle::{exhaustive_oracle, OracleResult};
pub use report::{compare_report, Comparison, ReportRow};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    /// One core per tile with the selected mapper.
    Map,
    /// Multi-round diagonal mapping.
    Dynamic,
    /// Cluster scheduling, clusters placed with the selected mapper.
    Cluster,
    /// PSO over one-per-tile mappings, optionally seeded.
    Pso,
    /// Cluster scheduling, then PSO over the cluster placement seeded with
    /// the selected mapper's result.
    ClusterPso,
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::Map => "map",
            Mode::Dynamic => "dynamic",
            Mode::Cluster => "cluster",
            Mode::Pso => "pso",
            Mode::ClusterPso => "cluster-pso",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "map" => Ok(Mode::Map),
            "dynamic" => Ok(Mode::Dynamic),
            "cluster" => Ok(Mode::Cluster),
            "pso" => Ok(Mode::Pso),
            "cluster-pso" => Ok(Mode::ClusterPso),
            other => Err(Error::InvalidParam(format!("unknown mode '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub benchmark: String,
    pub mesh: usize,
    pub algo: MapperKind,
    pub mode: Mode,
    pub model: EnergyModel,
    pub pso: PsoParams,
    pub objective: Objective,
    pub seed: u64,
    pub seed_mapping: Option<Mapping>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            benchmark: String::new(),
            mesh: 3,
            algo: MapperKind::Ddmap,
            mode: Mode::Map,
            model: EnergyModel::default(),
            pso: PsoParams::default(),
            objective: Objective::Energy,
            seed: 0,
            seed_mapping: None,
        }
    }
}

impl RunConfig {
    /// Algorithm label written to reports; dynamic scheduling always maps
    /// with DDMap and unseeded PSO uses no mapper.
    pub fn algo_label(&self) -> String {
        match self.mode {
            Mode::Dynamic => MapperKind::Ddmap.to_string(),
            Mode::Pso if self.seed_mapping.is_none() => "none".to_string(),
            Mode::Pso => "seeded".to_string(),
            _ => self.algo.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub row: ReportRow,
    /// Task-level placement (may be many-to-one).
    pub mapping: Mapping,
    pub eval: EvalReport,
    pub artifact: String,
    pub pso: Option<PsoResult>,
}

pub fn benchmark_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

pub fn load_graph(path: &Path) -> anyhow::Result<TaskGraph> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| anyhow::anyhow!("reading {}: {e}", path.display()))?;
    parse_graph(&text).map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))
}

/// Runs the configured pipeline on `g`.
pub fn run_benchmark(cfg: &RunConfig, g: &TaskGraph) -> Result<RunOutput> {
    let mesh = Mesh3D::new(cfg.mesh)?;
    let pso_params = PsoParams {
        seed: cfg.seed,
        ..cfg.pso
    };
    let started = Instant::now();

    let (mapping, pso) = match cfg.mode {
        Mode::Map => (cfg.algo.map(g, &mesh)?, None),
        Mode::Dynamic => (dynamic_schedule(g, &mesh)?.mapping(), None),
        Mode::Cluster => (cluster_plan(g, &mesh, cfg.algo)?.schedule.mapping(), None),
        Mode::Pso => {
            let r = pso_optimize(
                g,
                &mesh,
                &pso_params,
                &cfg.model,
                cfg.objective,
                cfg.seed_mapping.as_ref(),
            )?;
            (r.mapping.clone(), Some(r))
        }
        Mode::ClusterPso => {
            let plan = cluster_plan(g, &mesh, cfg.algo)?;
            let r = pso_optimize(
                &plan.cluster_graph,
                &mesh,
                &pso_params,
                &cfg.model,
                cfg.objective,
                Some(&plan.cluster_mapping),
            )?;
            let sched = ClusterPlan::expand(&plan.clusters, &r.mapping, mesh.num_tiles())?;
            (sched.mapping(), Some(r))
        }
    };
    let runtime_ms = started.elapsed().as_secs_f64() * 1e3;

    let eval = evaluate(g, &mapping, &mesh, &cfg.model)?;
    let row = ReportRow {
        benchmark: cfg.benchmark.clone(),
        algo: cfg.algo_label(),
        mode: cfg.mode.to_string(),
        total_energy: eval.total_energy,
        comm_cost: eval.comm_cost,
        avg_latency: eval.avg_latency,
        eta: eval.eta,
        runtime_ms,
        seed: cfg.seed,
    };
    let artifact = mapping_artifact(cfg, &mapping);
    Ok(RunOutput {
        row,
        mapping,
        eval,
        artifact,
        pso,
    })
}

/// Text artifact: `#` header echoing the config, then one
/// `core <id> -> tile <id>` line per core.
pub fn mapping_artifact(cfg: &RunConfig, mapping: &Mapping) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# benchmark: {}", cfg.benchmark);
    let _ = writeln!(out, "# algo: {}", cfg.algo_label());
    let _ = writeln!(out, "# mode: {}", cfg.mode);
    let _ = writeln!(out, "# mesh: {}", cfg.mesh);
    let _ = writeln!(out, "# seed: {}", cfg.seed);
    let _ = writeln!(out, "# objective: {}", cfg.objective);
    let _ = writeln!(
        out,
        "# e_switch: {} e_link: {} rho: {}",
        cfg.model.e_switch_bit, cfg.model.e_link_bit, cfg.model.rho
    );
    for (core, tile) in mapping.assign.iter().enumerate() {
        let _ = writeln!(out, "core {core} -> tile {tile}");
    }
    out
}

/// Reads `core <id> -> tile <id>` lines; `#` lines are ignored. Core ids
/// must cover `0..N` exactly once.
pub fn parse_mapping(text: &str) -> Result<Mapping> {
    let mut pairs = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let toks: Vec<&str> = content.split_whitespace().collect();
        let bad = || Error::Parse {
            line,
            msg: "expected 'core <id> -> tile <id>'".into(),
        };
        if toks.len() != 5 || toks[0] != "core" || toks[2] != "->" || toks[3] != "tile" {
            return Err(bad());
        }
        let core: usize = toks[1].parse().map_err(|_| bad())?;
        let tile: usize = toks[4].parse().map_err(|_| bad())?;
        pairs.push((line, core, tile));
    }
    let mut assign = vec![usize::MAX; pairs.len()];
    for (line, core, tile) in pairs {
        if core >= assign.len() || assign[core] != usize::MAX {
            return Err(Error::Parse {
                line,
                msg: format!("core {core} missing from the contiguous range or repeated"),
            });
        }
        assign[core] = tile;
    }
    Ok(Mapping::new(assign))
}

/// Re-evaluates an emitted mapping and checks it reproduces `row`.
pub fn audit_row(g: &TaskGraph, cfg: &RunConfig, artifact: &str, row: &ReportRow) -> Result<bool> {
    let mesh = Mesh3D::new(cfg.mesh)?;
    let mapping = parse_mapping(artifact)?;
    let eval = evaluate(g, &mapping, &mesh, &cfg.model)?;
    Ok(eval.total_energy == row.total_energy
        && eval.comm_cost == row.comm_cost
        && eval.avg_latency == row.avg_latency
        && eval.eta == row.eta)
}

/// Path of the artifact file written for a run.
pub fn artifact_path(dir: &Path, cfg: &RunConfig) -> PathBuf {
    dir.join(format!(
        "{}.{}.{}.map",
        cfg.benchmark,
        cfg.algo_label(),
        cfg.mode
    ))
}

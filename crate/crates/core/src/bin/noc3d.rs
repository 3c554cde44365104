use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use noc3d::harness::report::{append_rows, read_rows, rows_to_csv};
use noc3d::harness::{
    artifact_path, benchmark_name, compare_report, exhaustive_oracle, load_graph, parse_mapping,
    run_benchmark, Mode, RunConfig, RunOutput,
};
use noc3d::metrics::evaluate;
use noc3d::taskgraph::generate_random_graph;
use noc3d::{EnergyModel, MapperKind, Mesh3D, Objective, PsoParams};

#[derive(Parser)]
#[command(name = "noc3d", version, about = "Task mapping and scheduling on 3D mesh NoCs")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Args, Clone)]
struct EnergyArgs {
    /// Per-bit link energy (pJ).
    #[arg(long, default_value_t = 0.449)]
    e_link: f64,
    /// Per-bit switch energy (pJ).
    #[arg(long, default_value_t = 0.284)]
    e_switch: f64,
    /// Latency constant.
    #[arg(long, default_value_t = 1.0)]
    rho: f64,
}

impl EnergyArgs {
    fn model(&self) -> anyhow::Result<EnergyModel> {
        Ok(EnergyModel::new(self.e_switch, self.e_link, self.rho)?)
    }
}

#[derive(Args, Clone)]
struct PsoArgs {
    #[arg(long, default_value_t = 1.2)]
    pso_c1: f64,
    #[arg(long, default_value_t = 1.3)]
    pso_c2: f64,
    #[arg(long, default_value_t = 0.721348)]
    pso_w: f64,
    #[arg(long, default_value_t = 200)]
    pso_swarm: usize,
    /// Independent restarts (the reference setting is 100).
    #[arg(long, default_value_t = 1)]
    pso_sims: usize,
    /// Fitness evaluations per simulation.
    #[arg(long, default_value_t = 150_000)]
    pso_evals: usize,
}

impl PsoArgs {
    fn params(&self) -> PsoParams {
        PsoParams {
            c1: self.pso_c1,
            c2: self.pso_c2,
            w: self.pso_w,
            swarm_size: self.pso_swarm,
            max_simulations: self.pso_sims,
            max_evals: self.pso_evals,
            seed: 0,
        }
    }
}

#[derive(Args, Clone)]
struct OutputArgs {
    /// Directory for mapping artifacts.
    #[arg(long)]
    out: Option<PathBuf>,
    /// CSV file to append the report row to (stdout when absent).
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Map one core per tile.
    Map {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, default_value_t = 3)]
        mesh: usize,
        #[arg(long, default_value = "ddmap")]
        algo: MapperKind,
        #[command(flatten)]
        energy: EnergyArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Schedule several tasks per tile.
    Schedule {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, default_value_t = 3)]
        mesh: usize,
        /// dynamic | cluster
        #[arg(long, default_value = "cluster")]
        mode: Mode,
        #[arg(long, default_value = "ddmap")]
        cluster_mapper: MapperKind,
        #[command(flatten)]
        energy: EnergyArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Refine a mapping with particle swarm optimization.
    Optimize {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, default_value_t = 3)]
        mesh: usize,
        #[arg(long, default_value = "energy")]
        objective: Objective,
        /// Mapping artifact used as one initial particle.
        #[arg(long)]
        seed_mapping: Option<PathBuf>,
        /// Optimize the cluster placement produced by this mapper instead of
        /// a one-per-tile mapping.
        #[arg(long)]
        cluster_seed: Option<MapperKind>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the gbest trace CSV here.
        #[arg(long)]
        trace: Option<PathBuf>,
        #[command(flatten)]
        pso: PsoArgs,
        #[command(flatten)]
        energy: EnergyArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Generate a seeded random task graph.
    Gen {
        #[arg(long)]
        cores: usize,
        #[arg(long)]
        arcs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10)]
        vol_min: u64,
        #[arg(long, default_value_t = 1000)]
        vol_max: u64,
        #[arg(long, default_value_t = 1)]
        bw_min: u64,
        #[arg(long, default_value_t = 100)]
        bw_max: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Exhaustively search all one-per-tile mappings (small instances only).
    Oracle {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, default_value_t = 2)]
        mesh: usize,
        #[arg(long, default_value = "energy")]
        objective: Objective,
        #[command(flatten)]
        energy: EnergyArgs,
    },
    /// Run many graphs through one or all mappers.
    Bench {
        /// Glob of graph files, e.g. 'benchmarks/*.ctg'.
        #[arg(long)]
        glob: String,
        #[arg(long)]
        all_algos: bool,
        #[arg(long, default_value = "ddmap")]
        algo: MapperKind,
        #[arg(long, default_value = "map")]
        mode: Mode,
        #[arg(long, default_value_t = 3)]
        mesh: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "energy")]
        objective: Objective,
        #[command(flatten)]
        pso: PsoArgs,
        #[command(flatten)]
        energy: EnergyArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Percentage reductions of variant A against variant B in a report.
    Compare {
        #[arg(long)]
        csv: PathBuf,
        /// algo/mode, e.g. ddmap/map
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
    },
    /// Re-evaluate a mapping artifact.
    Audit {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        mapping: PathBuf,
        #[arg(long, default_value_t = 3)]
        mesh: usize,
        #[command(flatten)]
        energy: EnergyArgs,
    },
}

fn emit(outputs: &[RunOutput], cfgs: &[RunConfig], output: &OutputArgs) -> anyhow::Result<()> {
    if let Some(dir) = &output.out {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        for (o, cfg) in outputs.iter().zip(cfgs) {
            let path = artifact_path(dir, cfg);
            std::fs::write(&path, &o.artifact).with_context(|| format!("writing {}", path.display()))?;
        }
    }
    let rows: Vec<_> = outputs.iter().map(|o| o.row.clone()).collect();
    match &output.csv {
        Some(path) => append_rows(path, &rows).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{}", rows_to_csv(&rows)),
    }
    Ok(())
}

fn run_single(graph: &Path, cfg: RunConfig, output: &OutputArgs) -> anyhow::Result<RunOutput> {
    let g = load_graph(graph)?;
    let out = run_benchmark(&cfg, &g).with_context(|| format!("running {}", graph.display()))?;
    emit(std::slice::from_ref(&out), std::slice::from_ref(&cfg), output)?;
    Ok(out)
}

fn main() -> anyhow::Result<()> {
    let cli = Cli::parse();
    match &cli.cmd {
        Command::Map {
            graph,
            mesh,
            algo,
            energy,
            output,
        } => {
            let cfg = RunConfig {
                benchmark: benchmark_name(graph),
                mesh: *mesh,
                algo: *algo,
                mode: Mode::Map,
                model: energy.model()?,
                ..RunConfig::default()
            };
            run_single(graph, cfg, output)?;
        }
        Command::Schedule {
            graph,
            mesh,
            mode,
            cluster_mapper,
            energy,
            output,
        } => {
            if !matches!(mode, Mode::Dynamic | Mode::Cluster) {
                bail!("schedule supports --mode dynamic or cluster");
            }
            let cfg = RunConfig {
                benchmark: benchmark_name(graph),
                mesh: *mesh,
                algo: *cluster_mapper,
                mode: *mode,
                model: energy.model()?,
                ..RunConfig::default()
            };
            run_single(graph, cfg, output)?;
        }
        Command::Optimize {
            graph,
            mesh,
            objective,
            seed_mapping,
            cluster_seed,
            seed,
            trace,
            pso,
            energy,
            output,
        } => {
            let seed_mapping = match seed_mapping {
                Some(p) => {
                    let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
                    Some(parse_mapping(&text)?)
                }
                None => None,
            };
            if seed_mapping.is_some() && cluster_seed.is_some() {
                bail!("--seed-mapping and --cluster-seed are exclusive");
            }
            let cfg = RunConfig {
                benchmark: benchmark_name(graph),
                mesh: *mesh,
                algo: cluster_seed.unwrap_or(MapperKind::Ddmap),
                mode: if cluster_seed.is_some() { Mode::ClusterPso } else { Mode::Pso },
                model: energy.model()?,
                pso: pso.params(),
                objective: *objective,
                seed: *seed,
                seed_mapping,
            };
            let out = run_single(graph, cfg, output)?;
            if let (Some(path), Some(r)) = (trace, &out.pso) {
                std::fs::write(path, r.trace_csv()).with_context(|| format!("writing {}", path.display()))?;
            }
        }
        Command::Gen {
            cores,
            arcs,
            seed,
            vol_min,
            vol_max,
            bw_min,
            bw_max,
            out,
        } => {
            let g = generate_random_graph(*cores, *arcs, *vol_min..=*vol_max, *bw_min..=*bw_max, *seed)?;
            let text = format!(
                "# random graph: {cores} cores, {arcs} arcs, seed {seed}\n{}",
                g.to_text()
            );
            std::fs::write(out, text).with_context(|| format!("writing {}", out.display()))?;
        }
        Command::Oracle {
            graph,
            mesh,
            objective,
            energy,
        } => {
            let g = load_graph(graph)?;
            let mesh = Mesh3D::new(*mesh)?;
            let r = exhaustive_oracle(&g, &mesh, &energy.model()?, *objective)?;
            println!("# optimal {objective}: {} ({} assignments)", r.fitness, r.enumerated);
            for (core, tile) in r.mapping.assign.iter().enumerate() {
                println!("core {core} -> tile {tile}");
            }
        }
        Command::Bench {
            glob,
            all_algos,
            algo,
            mode,
            mesh,
            seed,
            objective,
            pso,
            energy,
            output,
        } => {
            let mut paths: Vec<PathBuf> = glob::glob(glob)
                .with_context(|| format!("bad glob '{glob}'"))?
                .collect::<Result<_, _>>()?;
            paths.sort();
            if paths.is_empty() {
                bail!("no files match '{glob}'");
            }
            let algos: Vec<MapperKind> = if *all_algos { MapperKind::ALL.to_vec() } else { vec![*algo] };
            let model = energy.model()?;
            let mut jobs = Vec::new();
            for path in &paths {
                let g = load_graph(path)?;
                for &a in &algos {
                    let cfg = RunConfig {
                        benchmark: benchmark_name(path),
                        mesh: *mesh,
                        algo: a,
                        mode: *mode,
                        model,
                        pso: pso.params(),
                        objective: *objective,
                        seed: *seed,
                        seed_mapping: None,
                    };
                    jobs.push((g.clone(), cfg));
                }
            }
            let results: Vec<_> = jobs
                .par_iter()
                .map(|(g, cfg)| run_benchmark(cfg, g))
                .collect();
            let mut outs = Vec::new();
            let mut cfgs = Vec::new();
            for ((_, cfg), r) in jobs.into_iter().zip(results) {
                match r {
                    Ok(o) => {
                        outs.push(o);
                        cfgs.push(cfg);
                    }
                    Err(e) => eprintln!("skipping {} ({}/{}): {e}", cfg.benchmark, cfg.algo, cfg.mode),
                }
            }
            emit(&outs, &cfgs, output)?;
        }
        Command::Compare { csv, a, b } => {
            let file = std::fs::File::open(csv).with_context(|| format!("opening {}", csv.display()))?;
            let rows = read_rows(file)?;
            print!("{}", compare_report(&rows, a, b)?.to_csv());
        }
        Command::Audit {
            graph,
            mapping,
            mesh,
            energy,
        } => {
            let g = load_graph(graph)?;
            let text = std::fs::read_to_string(mapping).with_context(|| format!("reading {}", mapping.display()))?;
            let m = parse_mapping(&text)?;
            let r = evaluate(&g, &m, &Mesh3D::new(*mesh)?, &energy.model()?)?;
            println!("total_energy,comm_cost,avg_latency,eta");
            println!(
                "{},{},{},{}",
                r.total_energy,
                r.comm_cost,
                r.avg_latency.map(|l| l.to_string()).unwrap_or_default(),
                r.eta
            );
        }
    }
    Ok(())
}

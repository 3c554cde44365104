//! Acceptance criteria. Runs without the libtest harness so that every
//! criterion prints exactly one PASS/FAIL line; exits non-zero on failure.

use std::path::PathBuf;
use std::time::Instant;

use noc3d::harness::oracle::exhaustive_oracle;
use noc3d::harness::report::{reduction_pct, rows_to_csv, ReportRow};
use noc3d::harness::{load_graph, run_benchmark, Mode, RunConfig};
use noc3d::mappers::ddmap;
use noc3d::metrics::{bit_energy, evaluate, total_energy};
use noc3d::pso::pso_optimize;
use noc3d::scheduler::{cluster_plan, dynamic_schedule};
use noc3d::taskgraph::generate_random_graph;
use noc3d::{EnergyModel, MapperKind, Mapping, Mesh3D, Objective, Occupancy, PsoParams, TaskGraph};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const VOL: std::ops::RangeInclusive<u64> = 10..=1000;
const BW: std::ops::RangeInclusive<u64> = 1..=100;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome, Option<f64>);

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

// ---------------------------------------------------------------------------
// Independent brute-force evaluator: walks every XYZ route hop by hop.

#[derive(Debug, PartialEq)]
struct BruteTotals {
    router_bits: u128,
    link_bits: u128,
    bw_hops: u128,
    eta: usize,
}

fn coords(t: usize, n: usize) -> [usize; 3] {
    [t / (n * n), (t / n) % n, t % n]
}

/// Links on the X-then-Y-then-Z route, counted by stepping.
fn walk_links(a: usize, b: usize, n: usize) -> u64 {
    let [mut z, mut y, mut x] = coords(a, n);
    let [tz, ty, tx] = coords(b, n);
    let mut links = 0;
    let step = |p: &mut usize, t: usize| {
        if *p < t {
            *p += 1
        } else {
            *p -= 1
        }
    };
    while x != tx {
        step(&mut x, tx);
        links += 1;
    }
    while y != ty {
        step(&mut y, ty);
        links += 1;
    }
    while z != tz {
        step(&mut z, tz);
        links += 1;
    }
    links
}

fn brute_totals(g: &TaskGraph, assign: &[usize], n: usize) -> BruteTotals {
    let k = g.num_cores();
    let mut vol = vec![vec![None; k]; k];
    for a in g.arcs() {
        vol[a.src][a.dst] = Some((a.volume, a.bandwidth));
    }
    let mut t = BruteTotals {
        router_bits: 0,
        link_bits: 0,
        bw_hops: 0,
        eta: 0,
    };
    for i in 0..k {
        for j in 0..k {
            let Some((v, b)) = vol[i][j] else { continue };
            let links = walk_links(assign[i], assign[j], n) as u128;
            if links > 0 {
                t.router_bits += v as u128 * (links + 1);
                t.link_bits += v as u128 * links;
            }
            t.bw_hops += b as u128 * links;
            if v > 0 {
                t.eta += 1;
            }
        }
    }
    t
}

fn brute_energy(t: &BruteTotals, m: &EnergyModel) -> f64 {
    t.router_bits as f64 * m.e_switch_bit + t.link_bits as f64 * m.e_link_bit
}

// ---------------------------------------------------------------------------

fn ac1_bit_energy() -> Outcome {
    let m = EnergyModel::default();
    let six = bit_energy(6, &m);
    let one = bit_energy(1, &m);
    check((six - 4.682).abs() < 1e-12, || format!("bit_energy(6) = {six}"))?;
    check((one - 1.017).abs() < 1e-12, || format!("bit_energy(1) = {one}"))?;
    check(bit_energy(0, &m) == 0.0, || "bit_energy(0) != 0".into())?;
    Ok(format!("E(6)={six:.3} E(1)={one:.3}"))
}

fn ac2_evaluator_matches_bruteforce() -> Outcome {
    let mesh = Mesh3D::new(3).unwrap();
    let m = EnergyModel::default();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut max_rel = 0.0f64;
    for case in 0..200u64 {
        let k = rng.gen_range(2..=27);
        let arcs = rng.gen_range(0..=(k * (k - 1)).min(60));
        let g = generate_random_graph(k, arcs, 0..=1000, 0..=100, 1000 + case).unwrap();
        let assign: Vec<usize> = if case % 2 == 0 {
            let mut t: Vec<usize> = (0..27).collect();
            t.shuffle(&mut rng);
            t.truncate(k);
            t
        } else {
            (0..k).map(|_| rng.gen_range(0..27)).collect()
        };
        let brute = brute_totals(&g, &assign, 3);
        let r = evaluate(&g, &Mapping::new(assign.clone()), &mesh, &m).map_err(|e| e.to_string())?;
        let e = brute_energy(&brute, &m);
        check(r.total_energy == e, || format!("case {case}: energy {} vs {e}", r.total_energy))?;
        check(r.comm_cost == brute.bw_hops, || {
            format!("case {case}: cost {} vs {}", r.comm_cost, brute.bw_hops)
        })?;
        check(r.eta == brute.eta, || format!("case {case}: eta {} vs {}", r.eta, brute.eta))?;
        let lat = (brute.eta > 0).then(|| brute.link_bits as f64 * m.rho / brute.eta as f64);
        check(r.avg_latency == lat, || {
            format!("case {case}: latency {:?} vs {lat:?}", r.avg_latency)
        })?;
        // Per-arc float summation agrees up to rounding.
        let naive: f64 = g
            .arcs()
            .iter()
            .map(|a| a.volume as f64 * bit_energy(walk_links(assign[a.src], assign[a.dst], 3) as usize, &m))
            .sum();
        if e > 0.0 {
            max_rel = max_rel.max(((naive - e) / e).abs());
        }
    }
    check(max_rel < 1e-12, || format!("per-arc float sum drifts by {max_rel:e}"))?;
    Ok(format!("200 cases exact; per-arc float sum within {max_rel:.1e}"))
}

fn ac3_topology() -> Outcome {
    for n in 2..=4 {
        let mesh = Mesh3D::new(n).unwrap();
        let tiles = mesh.num_tiles();
        let h = |a, b| mesh.xyz_hops(a, b).unwrap();
        for a in 0..tiles {
            check(h(a, a) == 0, || format!("n={n}: d({a},{a}) != 0"))?;
            for b in 0..tiles {
                let d = h(a, b);
                check(d == h(b, a), || format!("n={n}: asymmetric at {a},{b}"))?;
                check(a == b || d > 0, || format!("n={n}: d({a},{b}) = 0"))?;
                check(d as u64 == walk_links(a, b, n), || format!("n={n}: route length at {a},{b}"))?;
                for c in 0..tiles {
                    check(d <= h(a, c) + h(c, b), || format!("n={n}: triangle {a},{c},{b}"))?;
                }
            }
        }
    }
    let mesh = Mesh3D::new(3).unwrap();
    for free in 0..27 {
        let mut occ = Occupancy::new(27);
        (0..27).filter(|&t| t != free).for_each(|t| occ.occupy(t));
        for anchor in 0..27 {
            let got = mesh.lozenge_next_empty(anchor, &occ).map_err(|e| e.to_string())?;
            check(got == free, || format!("anchor {anchor}, free {free}: got {got}"))?;
        }
    }
    Ok("axioms for n=2..4, 27x27 single-free-tile searches".into())
}

fn ac4_ddmap_placement() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut graphs = 0;
    for n in [3usize, 4, 5] {
        let mesh = Mesh3D::new(n).unwrap();
        let step = n * n + n + 1;
        for i in 0..500u64 {
            let k = rng.gen_range(2..=mesh.num_tiles().min(40));
            let arcs = rng.gen_range(0..=(k * (k - 1)).min(3 * k));
            let g = generate_random_graph(k, arcs, VOL, BW, n as u64 * 10_000 + i).unwrap();
            let m = ddmap(&g, &mesh).map_err(|e| e.to_string())?;
            let order = g.priority_order().unwrap().order;
            check(m.len() == k && m.is_injective(), || format!("n={n} graph {i}: not injective"))?;
            check(m.assign[order[0]] == step, || {
                format!("n={n} graph {i}: first core on {}", m.assign[order[0]])
            })?;
            if n >= 4 {
                check(m.assign[order[1]] == 2 * step, || {
                    format!("n={n} graph {i}: second core on {}", m.assign[order[1]])
                })?;
            }
            graphs += 1;
        }
    }
    Ok(format!("{graphs} graphs over n=3,4,5"))
}

fn ac5_pso_reaches_optimum() -> Outcome {
    let mesh = Mesh3D::new(2).unwrap();
    let m = EnergyModel::default();
    let mut hits = 0;
    for seed in 0..10u64 {
        let arcs = 3 + (seed as usize % 6);
        let g = generate_random_graph(4, arcs, VOL, BW, 500 + seed).unwrap();
        let best = exhaustive_oracle(&g, &mesh, &m, Objective::Energy).map_err(|e| e.to_string())?;
        let params = PsoParams {
            seed,
            ..PsoParams::default()
        };
        let r = pso_optimize(&g, &mesh, &params, &m, Objective::Energy, None).map_err(|e| e.to_string())?;
        check(r.trace.windows(2).all(|w| w[1].gbest_fitness <= w[0].gbest_fitness), || {
            format!("instance {seed}: trace increases")
        })?;
        check(r.fitness >= best.fitness, || format!("instance {seed}: beat the oracle"))?;
        if r.fitness == best.fitness {
            hits += 1;
        }
    }
    check(hits >= 9, || format!("optimum reached on {hits}/10"))?;
    Ok(format!("optimum reached on {hits}/10, traces non-increasing"))
}

fn ac6_mapper_ordering() -> Outcome {
    let mesh = Mesh3D::new(3).unwrap();
    let m = EnergyModel::default();
    let mut sums = [0.0f64; 3];
    for seed in 0..100u64 {
        let g = generate_random_graph(16, 24, VOL, BW, seed).unwrap();
        for (i, kind) in MapperKind::ALL.iter().enumerate() {
            let map = kind.map(&g, &mesh).map_err(|e| e.to_string())?;
            sums[i] += total_energy(&g, &map, &mesh, &m).unwrap();
        }
    }
    let idx = |k: MapperKind| MapperKind::ALL.iter().position(|&x| x == k).unwrap();
    let [d, s, c] = [MapperKind::Ddmap, MapperKind::Spiral, MapperKind::Crinkle].map(|k| sums[idx(k)] / 100.0);
    check(d < s && s < c, || format!("means ddmap {d:.1}, spiral {s:.1}, crinkle {c:.1}"))?;
    Ok(format!("mean energy ddmap {d:.1} < spiral {s:.1} < crinkle {c:.1}"))
}

fn ac7_cluster_beats_dynamic() -> Outcome {
    let mesh = Mesh3D::new(3).unwrap();
    let m = EnergyModel::default();
    let (mut de, mut dc, mut dl) = (0.0, 0.0, 0.0);
    let (mut ce, mut cc, mut cl) = (0.0, 0.0, 0.0);
    for seed in 0..50u64 {
        let g = generate_random_graph(27, 40, VOL, BW, 7_000 + seed).unwrap();
        let dynamic = evaluate(&g, &dynamic_schedule(&g, &mesh).unwrap().mapping(), &mesh, &m).unwrap();
        let plan = cluster_plan(&g, &mesh, MapperKind::Ddmap).unwrap();
        check(plan.schedule.is_consistent(), || format!("graph {seed}: inconsistent schedule"))?;
        let cluster = evaluate(&g, &plan.schedule.mapping(), &mesh, &m).unwrap();
        let cluster_level = total_energy(&plan.cluster_graph, &plan.cluster_mapping, &mesh, &m).unwrap();
        check(cluster.total_energy == cluster_level, || {
            format!("graph {seed}: task energy {} vs cluster energy {cluster_level}", cluster.total_energy)
        })?;
        de += dynamic.total_energy;
        dc += dynamic.comm_cost as f64;
        dl += dynamic.avg_latency.unwrap();
        ce += cluster.total_energy;
        cc += cluster.comm_cost as f64;
        cl += cluster.avg_latency.unwrap();
    }
    check(ce < de && cc < dc && cl < dl, || {
        format!("cluster ({ce:.0}, {cc:.0}, {cl:.1}) vs dynamic ({de:.0}, {dc:.0}, {dl:.1})")
    })?;
    let pct = |a, b| reduction_pct(a, b).unwrap();
    Ok(format!(
        "reductions: energy {:.1}%, cost {:.1}%, latency {:.1}%; decomposition exact",
        pct(ce, de),
        pct(cc, dc),
        pct(cl, dl)
    ))
}

fn ac8_seeded_pso_improves() -> Outcome {
    let mesh = Mesh3D::new(3).unwrap();
    let m = EnergyModel::default();
    let mut parts = Vec::new();
    for kind in [MapperKind::Spiral, MapperKind::Crinkle] {
        let mut improved = 0;
        let mut gain = 0.0;
        for i in 0..25u64 {
            let g = generate_random_graph(27, 40, VOL, BW, 9_000 + i).unwrap();
            let plan = cluster_plan(&g, &mesh, kind).unwrap();
            let seed_fit = total_energy(&plan.cluster_graph, &plan.cluster_mapping, &mesh, &m).unwrap();
            let params = PsoParams {
                seed: i,
                ..PsoParams::default()
            };
            let r = pso_optimize(
                &plan.cluster_graph,
                &mesh,
                &params,
                &m,
                Objective::Energy,
                Some(&plan.cluster_mapping),
            )
            .map_err(|e| e.to_string())?;
            check(r.fitness <= seed_fit, || {
                format!("{kind} instance {i}: {} worse than seed {seed_fit}", r.fitness)
            })?;
            if r.fitness < seed_fit {
                improved += 1;
                gain += reduction_pct(r.fitness, seed_fit).unwrap();
            }
        }
        check(improved * 5 >= 25 * 4, || format!("{kind}: improved {improved}/25"))?;
        parts.push(format!(
            "{kind} improved {improved}/25 (mean gain {:.1}%)",
            gain / improved.max(1) as f64
        ));
    }
    Ok(parts.join(", "))
}

fn ac9_determinism() -> Outcome {
    let bench = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../benchmarks");
    let mut graphs: Vec<(String, TaskGraph)> = ["g1", "vopd16_recon", "random27"]
        .iter()
        .map(|name| (name.to_string(), load_graph(&bench.join(format!("{name}.ctg"))).unwrap()))
        .collect();
    graphs.push(("gen".into(), generate_random_graph(20, 30, VOL, BW, 99).unwrap()));

    let pso = PsoParams {
        max_evals: 20_000,
        max_simulations: 2,
        ..PsoParams::default()
    };
    let mut cfgs = Vec::new();
    for (name, _) in &graphs {
        let base = RunConfig {
            benchmark: name.clone(),
            pso,
            seed: 5,
            ..RunConfig::default()
        };
        for algo in MapperKind::ALL {
            for mode in [Mode::Map, Mode::Cluster, Mode::ClusterPso] {
                cfgs.push(RunConfig { algo, mode, ..base.clone() });
            }
        }
        cfgs.push(RunConfig { mode: Mode::Dynamic, ..base.clone() });
        cfgs.push(RunConfig { mode: Mode::Pso, ..base.clone() });
    }

    let run_all = || -> Result<(Vec<String>, String), String> {
        let mut artifacts = Vec::new();
        let mut rows: Vec<ReportRow> = Vec::new();
        for cfg in &cfgs {
            let g = &graphs.iter().find(|(n, _)| *n == cfg.benchmark).unwrap().1;
            if cfg.mode == Mode::Pso && g.num_cores() > 27 {
                continue;
            }
            let out = run_benchmark(cfg, g).map_err(|e| format!("{} {:?}: {e}", cfg.benchmark, cfg.mode))?;
            artifacts.push(out.artifact);
            rows.push(out.row.without_runtime());
        }
        Ok((artifacts, rows_to_csv(&rows)))
    };

    let first = run_all()?;
    let second = run_all()?;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let single = pool.install(run_all)?;
    check(first == second, || "two runs differ".into())?;
    check(first == single, || "single-threaded run differs".into())?;
    Ok(format!("{} runs byte-identical across repeats and thread counts", first.0.len()))
}

fn main() {
    // (name, check, time limit in seconds)
    let criteria: [Criterion; 9] = [
        ("bit energy values", ac1_bit_energy, Some(1.0)),
        ("evaluator matches brute force", ac2_evaluator_matches_bruteforce, Some(5.0)),
        ("hop metric and lozenge search", ac3_topology, Some(5.0)),
        ("ddmap diagonal seeding and injectivity", ac4_ddmap_placement, Some(10.0)),
        ("pso reaches the exhaustive optimum", ac5_pso_reaches_optimum, Some(120.0)),
        ("ddmap < spiral < crinkle", ac6_mapper_ordering, Some(30.0)),
        ("cluster beats dynamic scheduling", ac7_cluster_beats_dynamic, Some(60.0)),
        ("seeded pso never worse, usually better", ac8_seeded_pso_improves, Some(300.0)),
        ("deterministic artifacts and rows", ac9_determinism, None),
    ];
    let mut failed = 0;
    for (i, (name, f, limit)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let mut result = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        let secs = t.elapsed().as_secs_f64();
        if let (Ok(_), Some(limit)) = (&result, limit) {
            if secs > *limit {
                result = Err(format!("took {secs:.1}s, limit {limit}s"));
            }
        }
        match result {
            Ok(detail) => println!("AC{} PASS {name} [{secs:.2}s]: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("AC{} FAIL {name} [{secs:.2}s]: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {}/{} passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

//! Discrete particle swarm optimization over tile assignments.
//!
//! A particle's position has one entry per tile: entry `i` is the tile of
//! the i-th core in priority order, and entries past the core count are
//! placeholders that keep the vector a permutation of all tiles. Velocities
//! are real; positions move by the floor of the new velocity and are then
//! repaired back into a permutation.
//!
//! Randomness is derived per (simulation, iteration, particle) from the
//! master seed, and the global best is folded in particle-index order, so
//! the parallel evaluation gives bit-identical results on every run.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::metrics::{EnergyModel, FastEvaluator, Mapping};
use crate::taskgraph::TaskGraph;
use crate::topology::Mesh3D;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Objective {
    /// Total communication energy (pJ).
    Energy,
    /// Bandwidth-weighted hop count.
    Cost,
}

impl Objective {
    pub fn as_str(&self) -> &'static str {
        match self {
            Objective::Energy => "energy",
            Objective::Cost => "cost",
        }
    }
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Objective {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "energy" => Ok(Objective::Energy),
            "cost" => Ok(Objective::Cost),
            other => Err(Error::InvalidParam(format!("unknown objective '{other}'"))),
        }
    }
}

/// Swarm constants and budgets. The particle dimension is always the
/// mesh's tile count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsoParams {
    pub c1: f64,
    pub c2: f64,
    pub w: f64,
    pub swarm_size: usize,
    /// Independent restarts; each gets a seed derived from `seed`.
    pub max_simulations: usize,
    /// Fitness evaluations allowed per simulation.
    pub max_evals: usize,
    pub seed: u64,
}

impl Default for PsoParams {
    /// Reference constants with a single simulation.
    fn default() -> Self {
        Self {
            c1: 1.2,
            c2: 1.3,
            w: 0.721348,
            swarm_size: 200,
            max_simulations: 1,
            max_evals: 150_000,
            seed: 0,
        }
    }
}

impl PsoParams {
    /// Reference constants with the full 100 independent simulations.
    pub fn reference() -> Self {
        Self {
            max_simulations: 100,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<()> {
        for (name, v) in [("c1", self.c1), ("c2", self.c2), ("w", self.w)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::InvalidParam(format!("{name} must be finite and >= 0")));
            }
        }
        if self.swarm_size == 0 || self.max_simulations == 0 {
            return Err(Error::InvalidParam(
                "swarm size and simulation count must be positive".into(),
            ));
        }
        if self.max_evals < self.swarm_size {
            return Err(Error::InvalidParam(format!(
                "evaluation budget {} is smaller than one swarm ({})",
                self.max_evals, self.swarm_size
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Particle {
    pub position: Vec<usize>,
    pub velocity: Vec<f64>,
    pub pbest_position: Vec<usize>,
    pub pbest_fitness: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Swarm {
    pub particles: Vec<Particle>,
    pub gbest_position: Vec<usize>,
    pub gbest_fitness: f64,
}

impl Swarm {
    /// Index of the best personal best; lowest index wins ties.
    fn fold_gbest(&mut self) {
        for p in &self.particles {
            if p.pbest_fitness < self.gbest_fitness {
                self.gbest_fitness = p.pbest_fitness;
                self.gbest_position.clone_from(&p.pbest_position);
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TracePoint {
    pub iteration: usize,
    pub evals: usize,
    pub gbest_fitness: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PsoResult {
    pub mapping: Mapping,
    pub fitness: f64,
    /// Best-so-far after every iteration, across all simulations.
    pub trace: Vec<TracePoint>,
}

impl PsoResult {
    /// `iteration,evals,gbest_fitness` with a header row.
    pub fn trace_csv(&self) -> String {
        let mut out = String::from("iteration,evals,gbest_fitness\n");
        for t in &self.trace {
            out.push_str(&format!("{},{},{}\n", t.iteration, t.evals, t.gbest_fitness));
        }
        out
    }
}

/// One velocity component. `r1` and `r2` are the already-drawn random
/// factors (uniform on `[0, c1]` and `[0, c2]`).
#[inline]
pub fn velocity_component(x: usize, v: f64, pbest: usize, gbest: usize, w: f64, r1: f64, r2: f64) -> f64 {
    w * v + r1 * (pbest as f64 - x as f64) + r2 * (gbest as f64 - x as f64)
}

/// New velocity with per-component random factors, clamped to `[−D, D]`
/// where `D = x.len()`.
pub fn velocity_update<R: Rng + ?Sized>(
    x: &[usize],
    v: &[f64],
    pbest: &[usize],
    gbest: &[usize],
    params: &PsoParams,
    rng: &mut R,
) -> Vec<f64> {
    let d = x.len() as f64;
    (0..x.len())
        .map(|i| {
            let r1 = rng.gen::<f64>() * params.c1;
            let r2 = rng.gen::<f64>() * params.c2;
            velocity_component(x[i], v[i], pbest[i], gbest[i], params.w, r1, r2).clamp(-d, d)
        })
        .collect()
}

/// `x + floor(v)` component-wise, clamped to `[0, D−1]`.
pub fn position_update(x: &[usize], v: &[f64]) -> Vec<usize> {
    let hi = x.len().saturating_sub(1) as f64;
    x.iter()
        .zip(v)
        .map(|(&xi, &vi)| (xi as f64 + vi.floor()).clamp(0.0, hi) as usize)
        .collect()
}

/// Keeps the first occurrence of every value in `0..d`; later duplicates
/// (and out-of-range values), in index order, take the unused values in
/// ascending order.
pub fn repair_permutation(raw: &[usize], d: usize) -> Vec<usize> {
    let mut used = vec![false; d.max(raw.len())];
    let mut out = raw.to_vec();
    let mut holes = Vec::new();
    for (i, &v) in raw.iter().enumerate() {
        if v < d && !used[v] {
            used[v] = true;
        } else {
            holes.push(i);
        }
    }
    let mut free = (0..d).filter(|&t| !used[t]);
    for i in holes {
        out[i] = free.next().expect("fewer slots than values");
    }
    out
}

fn mix_seed(parts: &[u64]) -> u64 {
    // splitmix64 over the parts
    let mut z = 0x9E37_79B9_7F4A_7C15u64;
    for &p in parts {
        z ^= p;
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^= z >> 31;
    }
    z
}

struct Problem {
    eval: FastEvaluator,
    model: EnergyModel,
    objective: Objective,
    priority: Vec<usize>,
    dim: usize,
}

impl Problem {
    fn fitness(&self, position: &[usize]) -> f64 {
        let t = self.eval.totals(position);
        match self.objective {
            Objective::Energy => t.energy(&self.model),
            Objective::Cost => t.cost() as f64,
        }
    }

    fn decode(&self, position: &[usize]) -> Mapping {
        let mut assign = vec![0; self.priority.len()];
        for (slot, &core) in self.priority.iter().enumerate() {
            assign[core] = position[slot];
        }
        Mapping::new(assign)
    }

    fn encode(&self, m: &Mapping) -> Vec<usize> {
        let raw: Vec<usize> = self
            .priority
            .iter()
            .map(|&c| m.assign[c])
            .chain(std::iter::repeat_n(usize::MAX, self.dim - self.priority.len()))
            .collect();
        repair_permutation(&raw, self.dim)
    }
}

/// Minimizes `objective` over one-core-per-tile mappings of `g`.
///
/// With `seed_mapping`, particle 0 of every simulation starts at that
/// mapping, so the returned fitness never exceeds the seed's.
pub fn pso_optimize(
    g: &TaskGraph,
    mesh: &Mesh3D,
    params: &PsoParams,
    model: &EnergyModel,
    objective: Objective,
    seed_mapping: Option<&Mapping>,
) -> Result<PsoResult> {
    params.validate()?;
    let dim = mesh.num_tiles();
    if g.num_cores() > dim {
        return Err(Error::TooManyCores {
            cores: g.num_cores(),
            tiles: dim,
        });
    }
    if let Some(m) = seed_mapping {
        m.validate(g, mesh)?;
        if !m.is_injective() {
            return Err(Error::InvalidParam("seed mapping is not one-to-one".into()));
        }
    }
    if g.is_empty() {
        return Ok(PsoResult {
            mapping: Mapping::new(Vec::new()),
            fitness: 0.0,
            trace: Vec::new(),
        });
    }

    let priority = g.priority_order()?.order;
    let relabeled = g.induced(&priority)?;
    let problem = Problem {
        eval: FastEvaluator::new(&relabeled, mesh),
        model: *model,
        objective,
        priority,
        dim,
    };
    let seed_position = seed_mapping.map(|m| problem.encode(m));

    let mut best: Option<(Vec<usize>, f64)> = None;
    let mut trace = Vec::new();
    let mut evals_total = 0usize;
    let mut iteration = 0usize;

    for sim in 0..params.max_simulations {
        let mut swarm = init_swarm(&problem, params, sim as u64, seed_position.as_deref());
        let mut evals = params.swarm_size;
        let mut record = |swarm: &Swarm, evals_total: usize, iteration: usize, best: &mut Option<(Vec<usize>, f64)>| {
            if best.as_ref().is_none_or(|(_, f)| swarm.gbest_fitness < *f) {
                *best = Some((swarm.gbest_position.clone(), swarm.gbest_fitness));
            }
            trace.push(TracePoint {
                iteration,
                evals: evals_total,
                gbest_fitness: best.as_ref().map(|b| b.1).unwrap_or(f64::INFINITY),
            });
        };
        evals_total += params.swarm_size;
        record(&swarm, evals_total, iteration, &mut best);
        iteration += 1;

        let mut step = 1u64;
        while evals + params.swarm_size <= params.max_evals {
            advance(&problem, params, &mut swarm, sim as u64, step);
            evals += params.swarm_size;
            evals_total += params.swarm_size;
            record(&swarm, evals_total, iteration, &mut best);
            iteration += 1;
            step += 1;
        }
    }

    let (position, fitness) = best.expect("at least one simulation ran");
    Ok(PsoResult {
        mapping: problem.decode(&position),
        fitness,
        trace,
    })
}

fn init_swarm(problem: &Problem, params: &PsoParams, sim: u64, seed_position: Option<&[usize]>) -> Swarm {
    let dim = problem.dim;
    let particles: Vec<Particle> = (0..params.swarm_size)
        .into_par_iter()
        .map(|idx| {
            let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(&[params.seed, sim, 0, idx as u64]));
            let (position, velocity) = match (idx, seed_position) {
                (0, Some(p)) => (p.to_vec(), vec![0.0; dim]),
                _ => {
                    let mut p: Vec<usize> = (0..dim).collect();
                    p.shuffle(&mut rng);
                    let v = (0..dim).map(|_| rng.gen_range(-1.0..=1.0)).collect();
                    (p, v)
                }
            };
            let fitness = problem.fitness(&position);
            Particle {
                pbest_position: position.clone(),
                position,
                velocity,
                pbest_fitness: fitness,
            }
        })
        .collect();
    let mut swarm = Swarm {
        gbest_position: particles[0].pbest_position.clone(),
        gbest_fitness: particles[0].pbest_fitness,
        particles,
    };
    swarm.fold_gbest();
    swarm
}

fn advance(problem: &Problem, params: &PsoParams, swarm: &mut Swarm, sim: u64, step: u64) {
    let gbest = &swarm.gbest_position;
    swarm
        .particles
        .par_iter_mut()
        .enumerate()
        .for_each(|(idx, p)| {
            let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(&[params.seed, sim, step, idx as u64]));
            let v = velocity_update(&p.position, &p.velocity, &p.pbest_position, gbest, params, &mut rng);
            let raw = position_update(&p.position, &v);
            p.position = repair_permutation(&raw, problem.dim);
            p.velocity = v;
            let f = problem.fitness(&p.position);
            if f < p.pbest_fitness {
                p.pbest_fitness = f;
                p.pbest_position.clone_from(&p.position);
            }
        });
    swarm.fold_gbest();
}

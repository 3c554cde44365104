//! Exhaustive search over every injective core → tile assignment.

use crate::error::{Error, Result};
use crate::metrics::{EnergyModel, FastEvaluator, Mapping};
use crate::pso::Objective;
use crate::taskgraph::TaskGraph;
use crate::topology::Mesh3D;

/// Largest number of assignments the oracle will enumerate.
pub const MAX_ASSIGNMENTS: u128 = 10_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub fitness: f64,
    /// Lexicographically smallest optimal assignment.
    pub mapping: Mapping,
    pub enumerated: u128,
}

/// Number of injective maps from `k` cores into `tiles` tiles.
pub fn assignment_count(tiles: usize, k: usize) -> u128 {
    if k > tiles {
        return 0;
    }
    ((tiles - k + 1)..=tiles).map(|x| x as u128).product()
}

pub fn exhaustive_oracle(
    g: &TaskGraph,
    mesh: &Mesh3D,
    model: &EnergyModel,
    objective: Objective,
) -> Result<OracleResult> {
    let k = g.num_cores();
    let tiles = mesh.num_tiles();
    if k > tiles {
        return Err(Error::TooManyCores { cores: k, tiles });
    }
    let total = assignment_count(tiles, k);
    if total > MAX_ASSIGNMENTS {
        return Err(Error::TooLarge(total));
    }

    let eval = FastEvaluator::new(g, mesh);
    let fitness = |assign: &[usize]| {
        let t = eval.totals(assign);
        match objective {
            Objective::Energy => t.energy(model),
            Objective::Cost => t.cost() as f64,
        }
    };

    let mut assign = vec![0usize; k];
    let mut used = vec![false; tiles];
    let mut best: Option<(f64, Vec<usize>)> = None;
    let mut enumerated = 0u128;

    // iterative DFS; tiles tried in ascending order so the first optimum
    // found is the lexicographically smallest
    let mut next_tile = vec![0usize; k + 1];
    let mut depth = 0usize;
    loop {
        if depth == k {
            enumerated += 1;
            let f = fitness(&assign);
            if best.as_ref().is_none_or(|(b, _)| f < *b) {
                best = Some((f, assign.clone()));
            }
            if depth == 0 {
                break;
            }
            depth -= 1;
            used[assign[depth]] = false;
            continue;
        }
        let start = next_tile[depth];
        match (start..tiles).find(|&t| !used[t]) {
            Some(t) => {
                assign[depth] = t;
                used[t] = true;
                next_tile[depth] = t + 1;
                depth += 1;
                next_tile[depth] = 0;
            }
            None => {
                if depth == 0 {
                    break;
                }
                depth -= 1;
                used[assign[depth]] = false;
            }
        }
    }

    let (fitness, assign) = best.expect("at least one assignment");
    Ok(OracleResult {
        fitness,
        mapping: Mapping::new(assign),
        enumerated,
    })
}

//! Many-tasks-per-tile assignment.
//!
//! Two strategies are provided. Dynamic scheduling repeats diagonal mapping
//! round after round until every task has a tile, so tile depth grows by at
//! most one per round. Cluster scheduling first groups heavily communicating
//! tasks into clusters (virtual PEs), maps the cluster graph one cluster per
//! tile, then expands back to tasks; traffic inside a cluster never reaches
//! the network.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::mappers::{ddmap, MapperKind};
use crate::metrics::Mapping;
use crate::taskgraph::{Arc, TaskGraph};
use crate::topology::Mesh3D;

/// Partition of tasks into clusters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterSet {
    pub clusters: Vec<Vec<usize>>,
    pub cluster_of: Vec<usize>,
}

impl ClusterSet {
    /// Builds from cluster lists, checking they partition `0..n_tasks`.
    pub fn from_clusters(clusters: Vec<Vec<usize>>, n_tasks: usize) -> Result<Self> {
        let mut cluster_of = vec![usize::MAX; n_tasks];
        for (ci, members) in clusters.iter().enumerate() {
            if members.is_empty() {
                return Err(Error::InvalidParam(format!("cluster {ci} is empty")));
            }
            for &t in members {
                if t >= n_tasks {
                    return Err(Error::InvalidCore {
                        id: t,
                        count: n_tasks,
                    });
                }
                if cluster_of[t] != usize::MAX {
                    return Err(Error::InvalidParam(format!("task {t} is in two clusters")));
                }
                cluster_of[t] = ci;
            }
        }
        if let Some(t) = cluster_of.iter().position(|&c| c == usize::MAX) {
            return Err(Error::InvalidParam(format!("task {t} is not clustered")));
        }
        Ok(Self {
            clusters,
            cluster_of,
        })
    }

    pub fn len(&self) -> usize {
        self.clusters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clusters.is_empty()
    }
}

/// Task placement plus per-tile task lists in assignment order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schedule {
    pub placement: Vec<usize>,
    pub slots: Vec<Vec<usize>>,
}

impl Schedule {
    fn empty(n_tasks: usize, n_tiles: usize) -> Self {
        Self {
            placement: vec![usize::MAX; n_tasks],
            slots: vec![Vec::new(); n_tiles],
        }
    }

    fn assign(&mut self, task: usize, tile: usize) {
        self.placement[task] = tile;
        self.slots[tile].push(task);
    }

    /// Task-level mapping (many-to-one).
    pub fn mapping(&self) -> Mapping {
        Mapping::new(self.placement.clone())
    }

    /// Largest number of tasks sharing one tile.
    pub fn max_depth(&self) -> usize {
        self.slots.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// True when the placement is total and the slot lists list every task
    /// exactly once, on the tile it is placed on.
    pub fn is_consistent(&self) -> bool {
        let mut seen = vec![false; self.placement.len()];
        for (tile, tasks) in self.slots.iter().enumerate() {
            for &t in tasks {
                if t >= seen.len() || seen[t] || self.placement[t] != tile {
                    return false;
                }
                seen[t] = true;
            }
        }
        seen.into_iter().all(|s| s)
    }
}

/// Multi-round diagonal mapping. Each round takes up to one task per tile
/// from the top of the residual priority list and maps them with DDMap on
/// their induced subgraph.
pub fn dynamic_schedule(g: &TaskGraph, mesh: &Mesh3D) -> Result<Schedule> {
    if g.is_empty() {
        return Err(Error::EmptyGraph);
    }
    let tiles = mesh.num_tiles();
    let mut sched = Schedule::empty(g.num_cores(), tiles);
    let mut remaining: Vec<usize> = (0..g.num_cores()).collect();

    while !remaining.is_empty() {
        let residual = g.induced(&remaining)?;
        let mut chosen: Vec<usize> = residual
            .priority_order()?
            .order
            .into_iter()
            .take(tiles)
            .map(|local| remaining[local])
            .collect();
        chosen.sort_unstable();

        let round = ddmap(&g.induced(&chosen)?, mesh)?;
        for (local, &task) in chosen.iter().enumerate() {
            sched.assign(task, round.assign[local]);
        }
        remaining.retain(|t| chosen.binary_search(t).is_err());
    }
    Ok(sched)
}

/// Greedy chain clustering.
///
/// A chain starts at the lowest-numbered unclustered task and repeatedly
/// moves to the unclustered neighbor with the largest two-way volume
/// (lower id on ties). The chain stops when the current task has no
/// unclustered neighbor, or right after adding a task that also talks to a
/// member of the chain other than its predecessor (a loop). Clusters beyond
/// `max_clusters` are folded, in creation order, into the retained cluster
/// they exchange the most volume with (lowest index on ties).
pub fn cluster_tasks(g: &TaskGraph, max_clusters: usize) -> Result<ClusterSet> {
    if max_clusters == 0 {
        return Err(Error::InvalidParam("max_clusters must be at least 1".into()));
    }
    let n = g.num_cores();
    let adj = g.neighbors();
    let comm = g.comm_matrix();
    let mut cluster_of = vec![usize::MAX; n];
    let mut clusters: Vec<Vec<usize>> = Vec::new();

    for start in 0..n {
        if cluster_of[start] != usize::MAX {
            continue;
        }
        let id = clusters.len();
        let mut members = vec![start];
        cluster_of[start] = id;
        let mut cur = start;
        loop {
            let mut next: Option<usize> = None;
            for &p in &adj[cur] {
                if cluster_of[p] != usize::MAX {
                    continue;
                }
                // adj is sorted, so strict > keeps the lower id on ties
                if next.is_none_or(|q| comm[cur][p] > comm[cur][q]) {
                    next = Some(p);
                }
            }
            let Some(next) = next else { break };
            members.push(next);
            cluster_of[next] = id;
            let closes_loop = adj[next].iter().any(|&q| q != cur && cluster_of[q] == id);
            if closes_loop {
                break;
            }
            cur = next;
        }
        clusters.push(members);
    }

    if clusters.len() > max_clusters {
        let surplus = clusters.split_off(max_clusters);
        for members in surplus {
            let mut exchange = vec![0u64; max_clusters];
            for &t in &members {
                for (other, &vol) in comm[t].iter().enumerate() {
                    let c = cluster_of[other];
                    if c < max_clusters {
                        exchange[c] += vol;
                    }
                }
            }
            let mut target = 0;
            for (c, &vol) in exchange.iter().enumerate() {
                if vol > exchange[target] {
                    target = c;
                }
            }
            for &t in &members {
                cluster_of[t] = target;
            }
            clusters[target].extend(members);
        }
    }

    ClusterSet::from_clusters(clusters, n)
}

/// One node per cluster; arcs crossing clusters are summed per ordered
/// cluster pair and arcs inside a cluster are dropped.
pub fn cluster_graph(g: &TaskGraph, cs: &ClusterSet) -> Result<TaskGraph> {
    if cs.cluster_of.len() != g.num_cores() {
        return Err(Error::MappingSize {
            got: cs.cluster_of.len(),
            expected: g.num_cores(),
        });
    }
    let mut agg: BTreeMap<(usize, usize), (u64, u64)> = BTreeMap::new();
    for a in g.arcs() {
        let (p, q) = (cs.cluster_of[a.src], cs.cluster_of[a.dst]);
        if p == q {
            continue;
        }
        let e = agg.entry((p, q)).or_default();
        e.0 += a.volume;
        e.1 += a.bandwidth;
    }
    let arcs = agg
        .into_iter()
        .map(|((src, dst), (volume, bandwidth))| Arc {
            src,
            dst,
            volume,
            bandwidth,
        })
        .collect();
    TaskGraph::new(cs.len(), arcs)
}

/// Everything produced by cluster scheduling.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterPlan {
    pub clusters: ClusterSet,
    pub cluster_graph: TaskGraph,
    /// Cluster id → tile (injective).
    pub cluster_mapping: Mapping,
    pub schedule: Schedule,
}

impl ClusterPlan {
    /// Expands a cluster-level mapping to tasks. Used after refining
    /// `cluster_mapping` externally.
    pub fn expand(clusters: &ClusterSet, cluster_mapping: &Mapping, n_tiles: usize) -> Result<Schedule> {
        if cluster_mapping.len() != clusters.len() {
            return Err(Error::MappingSize {
                got: cluster_mapping.len(),
                expected: clusters.len(),
            });
        }
        let mut sched = Schedule::empty(clusters.cluster_of.len(), n_tiles);
        for (c, members) in clusters.clusters.iter().enumerate() {
            let tile = cluster_mapping.assign[c];
            if tile >= n_tiles {
                return Err(Error::InvalidTile {
                    id: tile,
                    count: n_tiles,
                });
            }
            for &t in members {
                sched.assign(t, tile);
            }
        }
        Ok(sched)
    }
}

pub fn cluster_plan(g: &TaskGraph, mesh: &Mesh3D, mapper: MapperKind) -> Result<ClusterPlan> {
    let clusters = cluster_tasks(g, mesh.num_tiles())?;
    let cg = cluster_graph(g, &clusters)?;
    let cluster_mapping = mapper.map(&cg, mesh)?;
    let schedule = ClusterPlan::expand(&clusters, &cluster_mapping, mesh.num_tiles())?;
    Ok(ClusterPlan {
        clusters,
        cluster_graph: cg,
        cluster_mapping,
        schedule,
    })
}

/// Clusters the tasks (at most one cluster per tile), maps the cluster
/// graph with `mapper` and expands the result to tasks.
pub fn cluster_schedule(g: &TaskGraph, mesh: &Mesh3D, mapper: MapperKind) -> Result<Schedule> {
    Ok(cluster_plan(g, mesh, mapper)?.schedule)
}

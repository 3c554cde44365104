//! Communication energy, cost and latency of a placement.
//!
//! Every metric is driven by the hop count of each arc's XYZ route.
//! Volumes and hop counts are accumulated as integers first so results do
//! not depend on summation order; an arc between co-located tasks never
//! enters the network and contributes nothing.

use crate::error::{Error, Result};
use crate::taskgraph::TaskGraph;
use crate::topology::Mesh3D;

/// Per-bit energy constants (pJ) and the latency scale factor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyModel {
    /// Energy per bit per router traversed.
    pub e_switch_bit: f64,
    /// Energy per bit per link traversed.
    pub e_link_bit: f64,
    pub rho: f64,
}

impl Default for EnergyModel {
    fn default() -> Self {
        Self {
            e_switch_bit: 0.284,
            e_link_bit: 0.449,
            rho: 1.0,
        }
    }
}

impl EnergyModel {
    pub fn new(e_switch_bit: f64, e_link_bit: f64, rho: f64) -> Result<Self> {
        for (name, v) in [
            ("e_switch_bit", e_switch_bit),
            ("e_link_bit", e_link_bit),
            ("rho", rho),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::InvalidParam(format!("{name} must be finite and >= 0, got {v}")));
            }
        }
        Ok(Self {
            e_switch_bit,
            e_link_bit,
            rho,
        })
    }

    /// Energy to move one bit across `links` links, i.e. through
    /// `links + 1` routers. Zero when source and destination share a tile.
    pub fn bit_energy(&self, links: usize) -> f64 {
        if links == 0 {
            return 0.0;
        }
        (links + 1) as f64 * self.e_switch_bit + links as f64 * self.e_link_bit
    }
}

/// Assignment of every core (or task) to a tile. Injective for one-per-tile
/// mappings; schedules may place several tasks on one tile.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Mapping {
    pub assign: Vec<usize>,
}

impl Mapping {
    pub fn new(assign: Vec<usize>) -> Self {
        Self { assign }
    }

    pub fn len(&self) -> usize {
        self.assign.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assign.is_empty()
    }

    pub fn tile_of(&self, core: usize) -> usize {
        self.assign[core]
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = std::collections::HashSet::with_capacity(self.assign.len());
        self.assign.iter().all(|t| seen.insert(*t))
    }

    /// Checks the mapping covers exactly the graph's cores with valid tiles.
    pub fn validate(&self, g: &TaskGraph, mesh: &Mesh3D) -> Result<()> {
        if self.assign.len() != g.num_cores() {
            return Err(Error::MappingSize {
                got: self.assign.len(),
                expected: g.num_cores(),
            });
        }
        for &t in &self.assign {
            mesh.check_tile(t)?;
        }
        Ok(())
    }
}

/// Integer traffic totals from which every metric is derived.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TrafficTotals {
    /// Σ volume · (links + 1) over arcs that leave their tile.
    pub router_bits: u128,
    /// Σ volume · links.
    pub link_bits: u128,
    /// Σ bandwidth · links.
    pub bandwidth_hops: u128,
    /// Arcs with positive volume.
    pub eta: usize,
}

impl TrafficTotals {
    pub fn energy(&self, m: &EnergyModel) -> f64 {
        self.router_bits as f64 * m.e_switch_bit + self.link_bits as f64 * m.e_link_bit
    }

    pub fn cost(&self) -> u128 {
        self.bandwidth_hops
    }

    pub fn avg_latency(&self, m: &EnergyModel) -> Result<f64> {
        if self.eta == 0 {
            return Err(Error::NoTransfers);
        }
        Ok(self.link_bits as f64 * m.rho / self.eta as f64)
    }
}

/// Metrics of one placement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalReport {
    /// pJ.
    pub total_energy: f64,
    /// Bandwidth-weighted hops.
    pub comm_cost: u128,
    /// `None` when no arc carries volume.
    pub avg_latency: Option<f64>,
    pub eta: usize,
}

pub fn traffic_totals(g: &TaskGraph, map: &Mapping, mesh: &Mesh3D) -> Result<TrafficTotals> {
    map.validate(g, mesh)?;
    let mut t = TrafficTotals::default();
    for a in g.arcs() {
        let links = mesh.hops_unchecked(map.assign[a.src], map.assign[a.dst]) as u128;
        if a.volume > 0 {
            t.eta += 1;
        }
        if links > 0 {
            t.router_bits += a.volume as u128 * (links + 1);
            t.link_bits += a.volume as u128 * links;
            t.bandwidth_hops += a.bandwidth as u128 * links;
        }
    }
    Ok(t)
}

pub fn bit_energy(links: usize, m: &EnergyModel) -> f64 {
    m.bit_energy(links)
}

pub fn total_energy(g: &TaskGraph, map: &Mapping, mesh: &Mesh3D, m: &EnergyModel) -> Result<f64> {
    Ok(traffic_totals(g, map, mesh)?.energy(m))
}

pub fn comm_cost(g: &TaskGraph, map: &Mapping, mesh: &Mesh3D) -> Result<u128> {
    Ok(traffic_totals(g, map, mesh)?.cost())
}

pub fn avg_latency(g: &TaskGraph, map: &Mapping, mesh: &Mesh3D, m: &EnergyModel) -> Result<f64> {
    traffic_totals(g, map, mesh)?.avg_latency(m)
}

pub fn evaluate(g: &TaskGraph, map: &Mapping, mesh: &Mesh3D, m: &EnergyModel) -> Result<EvalReport> {
    let t = traffic_totals(g, map, mesh)?;
    Ok(EvalReport {
        total_energy: t.energy(m),
        comm_cost: t.cost(),
        avg_latency: t.avg_latency(m).ok(),
        eta: t.eta,
    })
}

/// Precomputed arc list and hop table for evaluating many placements of
/// the same graph on the same mesh.
#[derive(Debug, Clone)]
pub struct FastEvaluator {
    arcs: Vec<(usize, usize, u64, u64)>,
    hops: Vec<u8>,
    tiles: usize,
}

impl FastEvaluator {
    pub fn new(g: &TaskGraph, mesh: &Mesh3D) -> Self {
        let tiles = mesh.num_tiles();
        let mut hops = Vec::with_capacity(tiles * tiles);
        for a in 0..tiles {
            for b in 0..tiles {
                hops.push(mesh.hops_unchecked(a, b) as u8);
            }
        }
        Self {
            arcs: g
                .arcs()
                .iter()
                .map(|a| (a.src, a.dst, a.volume, a.bandwidth))
                .collect(),
            hops,
            tiles,
        }
    }

    /// Totals for `assign[core] = tile`; `assign` may be longer than the
    /// core count (trailing entries are ignored).
    #[inline]
    pub fn totals(&self, assign: &[usize]) -> TrafficTotals {
        let mut t = TrafficTotals::default();
        for &(s, d, vol, bw) in &self.arcs {
            let links = self.hops[assign[s] * self.tiles + assign[d]] as u128;
            if vol > 0 {
                t.eta += 1;
            }
            if links > 0 {
                t.router_bits += vol as u128 * (links + 1);
                t.link_bits += vol as u128 * links;
                t.bandwidth_hops += bw as u128 * links;
            }
        }
        t
    }
}

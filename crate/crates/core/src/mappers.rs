//! One-core-per-tile placement: diagonal mapping (DDMap) plus the spiral
//! and crinkle list-mapping baselines.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::metrics::Mapping;
use crate::taskgraph::TaskGraph;
use crate::topology::{Mesh3D, Occupancy};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MapperKind {
    Ddmap,
    Spiral,
    Crinkle,
}

impl MapperKind {
    pub const ALL: [MapperKind; 3] = [MapperKind::Ddmap, MapperKind::Spiral, MapperKind::Crinkle];

    pub fn as_str(&self) -> &'static str {
        match self {
            MapperKind::Ddmap => "ddmap",
            MapperKind::Spiral => "spiral",
            MapperKind::Crinkle => "crinkle",
        }
    }

    pub fn map(&self, g: &TaskGraph, mesh: &Mesh3D) -> Result<Mapping> {
        match self {
            MapperKind::Ddmap => ddmap(g, mesh),
            MapperKind::Spiral => sequence_map(g, mesh, &spiral_order(mesh)),
            MapperKind::Crinkle => sequence_map(g, mesh, &crinkle_order(mesh)),
        }
    }
}

impl fmt::Display for MapperKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MapperKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ddmap" => Ok(MapperKind::Ddmap),
            "spiral" => Ok(MapperKind::Spiral),
            "crinkle" => Ok(MapperKind::Crinkle),
            other => Err(Error::InvalidParam(format!("unknown mapper '{other}'"))),
        }
    }
}

fn check_fits(g: &TaskGraph, mesh: &Mesh3D) -> Result<()> {
    if g.num_cores() > mesh.num_tiles() {
        return Err(Error::TooManyCores {
            cores: g.num_cores(),
            tiles: mesh.num_tiles(),
        });
    }
    Ok(())
}

/// Dynamic diagonal mapping.
///
/// The highest-priority cores seed the interior diagonal tiles (tile 0 when
/// n = 2 has none). Afterwards the unmapped core with the largest total
/// volume to already-mapped cores is placed at the first free lozenge tile
/// around its heaviest mapped partner. Ties go to the better priority rank
/// for the selected core and to the earlier-mapped core for the anchor.
pub fn ddmap(g: &TaskGraph, mesh: &Mesh3D) -> Result<Mapping> {
    check_fits(g, mesh)?;
    let n = g.num_cores();
    if n == 0 {
        return Ok(Mapping::new(Vec::new()));
    }
    let priority = g.priority_order()?.order;
    let comm = g.comm_matrix();

    let mut assign = vec![usize::MAX; n];
    let mut occ = Occupancy::new(mesh.num_tiles());
    let mut mapped_seq: Vec<usize> = Vec::with_capacity(n);
    // volume exchanged with the mapped set, per core
    let mut attached = vec![0u64; n];

    let place = |core: usize,
                 tile: usize,
                 assign: &mut [usize],
                 occ: &mut Occupancy,
                 mapped_seq: &mut Vec<usize>,
                 attached: &mut [u64]| {
        assign[core] = tile;
        occ.occupy(tile);
        mapped_seq.push(core);
        for (other, vol) in comm[core].iter().enumerate() {
            attached[other] += vol;
        }
    };

    let mut seeds = mesh.diagonal_tiles();
    if seeds.is_empty() {
        seeds.push(0);
    }
    for (&core, &tile) in priority.iter().zip(&seeds) {
        place(core, tile, &mut assign, &mut occ, &mut mapped_seq, &mut attached);
    }

    while mapped_seq.len() < n {
        let mut pick = None;
        for &c in &priority {
            if assign[c] != usize::MAX {
                continue;
            }
            match pick {
                Some(p) if attached[c] <= attached[p] => {}
                _ => pick = Some(c),
            }
        }
        let core = pick.expect("unmapped core exists");

        let mut anchor = mapped_seq[0];
        for &m in &mapped_seq[1..] {
            if comm[core][m] > comm[core][anchor] {
                anchor = m;
            }
        }
        let tile = mesh.lozenge_next_empty(assign[anchor], &occ)?;
        place(core, tile, &mut assign, &mut occ, &mut mapped_seq, &mut attached);
    }
    Ok(Mapping::new(assign))
}

/// Serial order: layers and rows ascending, columns serpentine (west to
/// east on even rows, east to west on odd rows).
pub fn crinkle_order(mesh: &Mesh3D) -> Vec<usize> {
    let n = mesh.side();
    let mut order = Vec::with_capacity(mesh.num_tiles());
    for layer in 0..n {
        for row in 0..n {
            let base = layer * n * n + row * n;
            if row % 2 == 0 {
                order.extend((0..n).map(|c| base + c));
            } else {
                order.extend((0..n).rev().map(|c| base + c));
            }
        }
    }
    order
}

/// Center-outward order. Layers go from the middle layer outwards
/// (middle, +1, −1, +2, ...); inside each layer the walk starts at the
/// center tile and unwinds clockwise (east, south, west, north with run
/// lengths 1, 1, 2, 2, 3, 3, ...), skipping cells outside the layer.
pub fn spiral_order(mesh: &Mesh3D) -> Vec<usize> {
    let n = mesh.side();
    let center = n.div_ceil(2) - 1;

    let mut layers = vec![center];
    for k in 1..n {
        if center + k < n {
            layers.push(center + k);
        }
        if k <= center {
            layers.push(center - k);
        }
    }

    let mut in_layer: Vec<(usize, usize)> = Vec::with_capacity(n * n);
    let (mut r, mut c) = (center as isize, center as isize);
    in_layer.push((center, center));
    let dirs = [(0isize, 1isize), (1, 0), (0, -1), (-1, 0)];
    let mut run = 1;
    let mut dir = 0;
    while in_layer.len() < n * n {
        for _ in 0..2 {
            let (dr, dc) = dirs[dir % 4];
            for _ in 0..run {
                r += dr;
                c += dc;
                if r >= 0 && c >= 0 && (r as usize) < n && (c as usize) < n {
                    in_layer.push((r as usize, c as usize));
                }
            }
            dir += 1;
        }
        run += 1;
    }

    layers
        .into_iter()
        .flat_map(|l| in_layer.iter().map(move |&(r, c)| l * n * n + r * n + c))
        .collect()
}

/// Places the i-th core of the priority list on the i-th tile of `order`.
pub fn sequence_map(g: &TaskGraph, mesh: &Mesh3D, order: &[usize]) -> Result<Mapping> {
    check_fits(g, mesh)?;
    if g.num_cores() > order.len() {
        return Err(Error::TooManyCores {
            cores: g.num_cores(),
            tiles: order.len(),
        });
    }
    if g.is_empty() {
        return Ok(Mapping::new(Vec::new()));
    }
    let mut assign = vec![0; g.num_cores()];
    for (&core, &tile) in g.priority_order()?.order.iter().zip(order) {
        mesh.check_tile(tile)?;
        assign[core] = tile;
    }
    Ok(Mapping::new(assign))
}

//! n×n×n mesh model.
//!
//! Tiles are numbered layer-major, then row-major:
//! `tile = layer·n² + row·n + col`. Under this layout the cube's main
//! diagonal is the set `i·(n²+n+1)` and `tile mod n` is the column.
//! Row 0 is the north edge of a layer and column 0 its west edge.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Mesh3D {
    n: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TileCoord {
    pub layer: usize,
    pub row: usize,
    pub col: usize,
}

impl TileCoord {
    pub fn new(layer: usize, row: usize, col: usize) -> Self {
        Self { layer, row, col }
    }
}

impl Mesh3D {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidMesh(n));
        }
        Ok(Self { n })
    }

    pub fn side(&self) -> usize {
        self.n
    }

    pub fn num_tiles(&self) -> usize {
        self.n * self.n * self.n
    }

    pub fn tile_index(&self, c: TileCoord) -> Result<usize> {
        let n = self.n;
        if c.layer >= n || c.row >= n || c.col >= n {
            return Err(Error::InvalidCoord {
                layer: c.layer,
                row: c.row,
                col: c.col,
                n,
            });
        }
        Ok(c.layer * n * n + c.row * n + c.col)
    }

    pub fn tile_coords(&self, t: usize) -> Result<TileCoord> {
        self.check_tile(t)?;
        Ok(self.coords_unchecked(t))
    }

    pub(crate) fn coords_unchecked(&self, t: usize) -> TileCoord {
        let n = self.n;
        TileCoord {
            layer: t / (n * n),
            row: (t / n) % n,
            col: t % n,
        }
    }

    pub(crate) fn check_tile(&self, t: usize) -> Result<()> {
        if t >= self.num_tiles() {
            return Err(Error::InvalidTile {
                id: t,
                count: self.num_tiles(),
            });
        }
        Ok(())
    }

    /// Interior tiles of the main diagonal, nearest the origin first.
    /// The two corner tiles are left out since they only have three
    /// neighbors.
    pub fn diagonal_tiles(&self) -> Vec<usize> {
        let n = self.n;
        let step = n * n + n + 1;
        (0..n.saturating_sub(2)).map(|i| step * (i + 1)).collect()
    }

    /// Links traversed by the XYZ route between two tiles.
    pub fn xyz_hops(&self, a: usize, b: usize) -> Result<usize> {
        self.check_tile(a)?;
        self.check_tile(b)?;
        Ok(self.hops_unchecked(a, b))
    }

    #[inline]
    pub(crate) fn hops_unchecked(&self, a: usize, b: usize) -> usize {
        let p = self.coords_unchecked(a);
        let q = self.coords_unchecked(b);
        p.layer.abs_diff(q.layer) + p.row.abs_diff(q.row) + p.col.abs_diff(q.col)
    }

    /// Full `num_tiles × num_tiles` hop table.
    pub fn hop_table(&self) -> Vec<Vec<usize>> {
        let t = self.num_tiles();
        (0..t)
            .map(|a| (0..t).map(|b| self.hops_unchecked(a, b)).collect())
            .collect()
    }

    /// Largest in-layer ring radius searched before moving to another layer.
    pub fn max_ring(&self) -> usize {
        2 * (self.n - 1)
    }

    /// Free tile nearest to `anchor` along the lozenge search path.
    ///
    /// The direction comes from the anchor's column: odd columns rotate
    /// clockwise (α), even columns counter-clockwise (β). Each layer is
    /// scanned in diamond rings of in-layer Manhattan radius 0..=2(n−1)
    /// starting at the ring's north point. The anchor's layer goes first,
    /// then layer+1, layer−1, layer+2, layer−2, ... restarting the ring
    /// scan at the anchor's (row, col) in each.
    pub fn lozenge_next_empty(&self, anchor: usize, occ: &Occupancy) -> Result<usize> {
        self.check_tile(anchor)?;
        if occ.len() != self.num_tiles() {
            return Err(Error::InvalidParam(format!(
                "occupancy covers {} tiles, mesh has {}",
                occ.len(),
                self.num_tiles()
            )));
        }
        if occ.free_count() == 0 {
            return Err(Error::NoFreeTile);
        }
        let a = self.coords_unchecked(anchor);
        let clockwise = (anchor % self.n) % 2 == 1;

        for layer in self.layer_order(a.layer) {
            for d in 0..=self.max_ring() {
                for (row, col) in self.ring(a.row, a.col, d, clockwise) {
                    let t = layer * self.n * self.n + row * self.n + col;
                    if !occ.is_occupied(t) {
                        return Ok(t);
                    }
                }
            }
        }
        Err(Error::NoFreeTile)
    }

    /// Layers in visiting order: `start`, +1, −1, +2, −2, ...
    fn layer_order(&self, start: usize) -> Vec<usize> {
        let mut order = vec![start];
        for k in 1..self.n {
            if start + k < self.n {
                order.push(start + k);
            }
            if k <= start {
                order.push(start - k);
            }
        }
        order
    }

    /// In-bounds cells at in-layer Manhattan distance `d` from `(row, col)`,
    /// beginning at the north point.
    fn ring(&self, row: usize, col: usize, d: usize, clockwise: bool) -> Vec<(usize, usize)> {
        let d = d as isize;
        let mut offsets: Vec<(isize, isize)> = Vec::with_capacity(4 * d.max(1) as usize);
        if d == 0 {
            offsets.push((0, 0));
        } else if clockwise {
            // N -> E -> S -> W
            offsets.extend((0..d).map(|k| (-d + k, k)));
            offsets.extend((0..d).map(|k| (k, d - k)));
            offsets.extend((0..d).map(|k| (d - k, -k)));
            offsets.extend((0..d).map(|k| (-k, -d + k)));
        } else {
            // N -> W -> S -> E
            offsets.extend((0..d).map(|k| (-d + k, -k)));
            offsets.extend((0..d).map(|k| (k, -d + k)));
            offsets.extend((0..d).map(|k| (d - k, k)));
            offsets.extend((0..d).map(|k| (-k, d - k)));
        }
        let n = self.n as isize;
        offsets
            .into_iter()
            .filter_map(|(dr, dc)| {
                let r = row as isize + dr;
                let c = col as isize + dc;
                (r >= 0 && r < n && c >= 0 && c < n).then_some((r as usize, c as usize))
            })
            .collect()
    }
}

/// Free/occupied flag per tile.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Occupancy {
    occupied: Vec<bool>,
    count: usize,
}

impl Occupancy {
    pub fn new(num_tiles: usize) -> Self {
        Self {
            occupied: vec![false; num_tiles],
            count: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.occupied.len()
    }

    pub fn is_empty(&self) -> bool {
        self.occupied.is_empty()
    }

    pub fn is_occupied(&self, t: usize) -> bool {
        self.occupied[t]
    }

    pub fn occupy(&mut self, t: usize) {
        if !self.occupied[t] {
            self.occupied[t] = true;
            self.count += 1;
        }
    }

    pub fn release(&mut self, t: usize) {
        if self.occupied[t] {
            self.occupied[t] = false;
            self.count -= 1;
        }
    }

    pub fn occupied_count(&self) -> usize {
        self.count
    }

    pub fn free_count(&self) -> usize {
        self.occupied.len() - self.count
    }
}

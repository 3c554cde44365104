//! Communication task graphs: model, line-based text format, priority
//! ordering and seeded random generation.
//!
//! File format (UTF-8, `#` starts a comment, blank lines ignored):
//!
//! ```text
//! cores 4
//! edge 0 1 100 10      # src dst volume(bits) bandwidth(bits/s)
//! ```

use std::collections::HashSet;
use std::fmt::Write as _;
use std::ops::RangeInclusive;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Core {
    pub id: usize,
    pub label: Option<String>,
}

/// Directed communication requirement between two cores.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Arc {
    pub src: usize,
    pub dst: usize,
    /// Bits transferred from `src` to `dst`.
    pub volume: u64,
    /// Required bandwidth in bits per second.
    pub bandwidth: u64,
}

/// Directed weighted graph of tasks (or IP cores). Cycles are allowed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaskGraph {
    cores: Vec<Core>,
    arcs: Vec<Arc>,
}

/// Core ids ordered by descending out-degree, then descending ranking,
/// then ascending id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PriorityList {
    pub order: Vec<usize>,
}

impl PriorityList {
    /// Position of every core in the list, indexed by core id.
    pub fn ranks(&self) -> Vec<usize> {
        let mut rank = vec![0; self.order.len()];
        for (pos, &c) in self.order.iter().enumerate() {
            rank[c] = pos;
        }
        rank
    }
}

impl TaskGraph {
    /// Builds a graph with `n_cores` unlabeled cores, validating every arc.
    pub fn new(n_cores: usize, arcs: Vec<Arc>) -> Result<Self> {
        let cores = (0..n_cores).map(|id| Core { id, label: None }).collect();
        Self::with_cores(cores, arcs)
    }

    pub fn with_cores(cores: Vec<Core>, arcs: Vec<Arc>) -> Result<Self> {
        for (i, c) in cores.iter().enumerate() {
            if c.id != i {
                return Err(Error::InvalidParam(format!(
                    "core at position {i} has id {}",
                    c.id
                )));
            }
        }
        let n = cores.len();
        let mut seen = HashSet::with_capacity(arcs.len());
        for a in &arcs {
            check_arc(a, n, &mut seen).map_err(Error::InvalidParam)?;
        }
        Ok(Self { cores, arcs })
    }

    pub fn num_cores(&self) -> usize {
        self.cores.len()
    }

    pub fn cores(&self) -> &[Core] {
        &self.cores
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn is_empty(&self) -> bool {
        self.cores.is_empty()
    }

    fn check_core(&self, c: usize) -> Result<()> {
        if c >= self.cores.len() {
            return Err(Error::InvalidCore {
                id: c,
                count: self.cores.len(),
            });
        }
        Ok(())
    }

    pub fn out_degree(&self, c: usize) -> Result<usize> {
        self.check_core(c)?;
        Ok(self.arcs.iter().filter(|a| a.src == c).count())
    }

    /// Total volume exchanged by `c` with every other core, in both
    /// directions.
    pub fn ranking(&self, c: usize) -> Result<u64> {
        self.check_core(c)?;
        Ok(self
            .arcs
            .iter()
            .filter(|a| a.src == c || a.dst == c)
            .map(|a| a.volume)
            .sum())
    }

    pub fn priority_order(&self) -> Result<PriorityList> {
        if self.is_empty() {
            return Err(Error::EmptyGraph);
        }
        let n = self.num_cores();
        let mut od = vec![0usize; n];
        let mut rank = vec![0u64; n];
        for a in &self.arcs {
            od[a.src] += 1;
            rank[a.src] += a.volume;
            rank[a.dst] += a.volume;
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&x, &y| {
            od[y]
                .cmp(&od[x])
                .then(rank[y].cmp(&rank[x]))
                .then(x.cmp(&y))
        });
        Ok(PriorityList { order })
    }

    /// Symmetric n×n matrix of `volume(i,j) + volume(j,i)`.
    pub fn comm_matrix(&self) -> Vec<Vec<u64>> {
        let n = self.num_cores();
        let mut m = vec![vec![0u64; n]; n];
        for a in &self.arcs {
            m[a.src][a.dst] += a.volume;
            m[a.dst][a.src] += a.volume;
        }
        m
    }

    /// Undirected adjacency lists (a neighbor appears once even when arcs
    /// exist in both directions).
    pub fn neighbors(&self) -> Vec<Vec<usize>> {
        let n = self.num_cores();
        let mut adj = vec![Vec::new(); n];
        for a in &self.arcs {
            adj[a.src].push(a.dst);
            adj[a.dst].push(a.src);
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        adj
    }

    /// Subgraph induced by `keep`; core `keep[i]` becomes core `i`.
    pub fn induced(&self, keep: &[usize]) -> Result<TaskGraph> {
        let mut local = vec![usize::MAX; self.num_cores()];
        for (i, &c) in keep.iter().enumerate() {
            self.check_core(c)?;
            local[c] = i;
        }
        let cores = keep
            .iter()
            .enumerate()
            .map(|(i, &c)| Core {
                id: i,
                label: self.cores[c].label.clone(),
            })
            .collect();
        let arcs = self
            .arcs
            .iter()
            .filter(|a| local[a.src] != usize::MAX && local[a.dst] != usize::MAX)
            .map(|a| Arc {
                src: local[a.src],
                dst: local[a.dst],
                ..*a
            })
            .collect();
        TaskGraph::with_cores(cores, arcs)
    }

    /// Serializes to the text format with arcs sorted by `(src, dst)`.
    pub fn to_text(&self) -> String {
        let mut arcs = self.arcs.clone();
        arcs.sort_by_key(|a| (a.src, a.dst));
        let mut out = format!("cores {}\n", self.num_cores());
        for a in arcs {
            let _ = writeln!(out, "edge {} {} {} {}", a.src, a.dst, a.volume, a.bandwidth);
        }
        out
    }
}

impl std::str::FromStr for TaskGraph {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_graph(s)
    }
}

fn check_arc(a: &Arc, n: usize, seen: &mut HashSet<(usize, usize)>) -> std::result::Result<(), String> {
    if a.src >= n || a.dst >= n {
        return Err(format!(
            "arc {} -> {} references a core outside 0..{n}",
            a.src, a.dst
        ));
    }
    if a.src == a.dst {
        return Err(format!("self-loop on core {}", a.src));
    }
    if !seen.insert((a.src, a.dst)) {
        return Err(format!("duplicate arc {} -> {}", a.src, a.dst));
    }
    Ok(())
}

fn parse_field(tok: &str, what: &str, line: usize) -> Result<u64> {
    if tok.starts_with('-') {
        return Err(Error::Parse {
            line,
            msg: format!("negative {what} '{tok}'"),
        });
    }
    tok.parse::<u64>().map_err(|_| Error::Parse {
        line,
        msg: format!("invalid {what} '{tok}'"),
    })
}

pub fn parse_graph(text: &str) -> Result<TaskGraph> {
    let mut n_cores: Option<usize> = None;
    let mut arcs = Vec::new();
    let mut seen = HashSet::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let toks: Vec<&str> = content.split_whitespace().collect();
        match (toks[0], n_cores) {
            ("cores", None) => {
                if toks.len() != 2 {
                    return Err(Error::Parse {
                        line,
                        msg: "expected 'cores <N>'".into(),
                    });
                }
                n_cores = Some(parse_field(toks[1], "core count", line)? as usize);
            }
            ("cores", Some(_)) => {
                return Err(Error::Parse {
                    line,
                    msg: "repeated 'cores' line".into(),
                })
            }
            (_, None) => {
                return Err(Error::Parse {
                    line,
                    msg: "first statement must be 'cores <N>'".into(),
                })
            }
            ("edge", Some(n)) => {
                if toks.len() != 5 {
                    return Err(Error::Parse {
                        line,
                        msg: "expected 'edge <src> <dst> <volume> <bandwidth>'".into(),
                    });
                }
                let src = parse_field(toks[1], "source id", line)? as usize;
                let dst = parse_field(toks[2], "destination id", line)? as usize;
                let volume = parse_field(toks[3], "volume", line)?;
                let bandwidth = parse_field(toks[4], "bandwidth", line)?;
                let arc = Arc {
                    src,
                    dst,
                    volume,
                    bandwidth,
                };
                check_arc(&arc, n, &mut seen).map_err(|msg| Error::Parse { line, msg })?;
                arcs.push(arc);
            }
            (other, Some(_)) => {
                return Err(Error::Parse {
                    line,
                    msg: format!("unknown statement '{other}'"),
                })
            }
        }
    }

    let n = n_cores.ok_or(Error::Parse {
        line: 0,
        msg: "missing 'cores <N>' line".into(),
    })?;
    TaskGraph::new(n, arcs)
}

/// Seeded random graph with exactly `n_arcs` distinct ordered pairs and
/// weights drawn uniformly from the inclusive ranges.
pub fn generate_random_graph(
    n_cores: usize,
    n_arcs: usize,
    volume: RangeInclusive<u64>,
    bandwidth: RangeInclusive<u64>,
    seed: u64,
) -> Result<TaskGraph> {
    let pairs = n_cores * n_cores.saturating_sub(1);
    if n_arcs > pairs {
        return Err(Error::InfeasibleArcs {
            arcs: n_arcs,
            cores: n_cores,
        });
    }
    for r in [&volume, &bandwidth] {
        if r.is_empty() {
            return Err(Error::InvalidRange {
                lo: *r.start(),
                hi: *r.end(),
            });
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picked = index::sample(&mut rng, pairs.max(1), n_arcs).into_vec();
    picked.sort_unstable();
    let arcs = picked
        .into_iter()
        .map(|k| {
            // k enumerates ordered pairs (src, dst) with dst != src
            let src = k / (n_cores - 1);
            let mut dst = k % (n_cores - 1);
            if dst >= src {
                dst += 1;
            }
            Arc {
                src,
                dst,
                volume: rng.gen_range(volume.clone()),
                bandwidth: rng.gen_range(bandwidth.clone()),
            }
        })
        .collect();
    TaskGraph::new(n_cores, arcs)
}

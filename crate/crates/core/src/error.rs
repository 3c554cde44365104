use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("core id {id} out of range (graph has {count} cores)")]
    InvalidCore { id: usize, count: usize },

    #[error("tile id {id} out of range (mesh has {count} tiles)")]
    InvalidTile { id: usize, count: usize },

    #[error("tile coordinate ({layer}, {row}, {col}) out of range for n = {n}")]
    InvalidCoord {
        layer: usize,
        row: usize,
        col: usize,
        n: usize,
    },

    #[error("mesh side length must be at least 2, got {0}")]
    InvalidMesh(usize),

    #[error("graph has no cores")]
    EmptyGraph,

    #[error("{cores} cores do not fit on {tiles} tiles one-per-tile")]
    TooManyCores { cores: usize, tiles: usize },

    #[error("cannot place {arcs} distinct arcs among {cores} cores")]
    InfeasibleArcs { arcs: usize, cores: usize },

    #[error("invalid range [{lo}, {hi}]")]
    InvalidRange { lo: u64, hi: u64 },

    #[error("mapping covers {got} cores but graph has {expected}")]
    MappingSize { got: usize, expected: usize },

    #[error("no free tile left in the mesh")]
    NoFreeTile,

    #[error("average latency undefined: no arc carries a positive volume")]
    NoTransfers,

    #[error("instance too large for exhaustive search: {0} assignments")]
    TooLarge(u128),

    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("report rows do not cover the same benchmarks: {0}")]
    MismatchedRows(String),
}

//! Application mapping and scheduling for 3D mesh Networks-on-Chip.
//!
//! The crate covers the whole flow from a communication task graph to an
//! evaluated placement:
//!
//! - [`taskgraph`]: graph model, text format, priority ordering, random graphs
//! - [`topology`]: n×n×n mesh indexing, XYZ hop distance, lozenge free-tile search
//! - [`metrics`]: bit-energy model, communication energy, cost and latency
//! - [`mappers`]: diagonal mapping (DDMap), spiral and crinkle list mapping
//! - [`scheduler`]: multi-round dynamic scheduling and cluster scheduling
//! - [`pso`]: discrete particle swarm refinement of a mapping
//! - [`harness`]: experiment runner, exhaustive oracle, CSV reports

pub mod error;
pub mod harness;
pub mod mappers;
pub mod metrics;
pub mod pso;
pub mod scheduler;
pub mod taskgraph;
pub mod topology;

pub use error::{Error, Result};
pub use mappers::MapperKind;
pub use metrics::{EnergyModel, EvalReport, Mapping};
pub use pso::{Objective, PsoParams, PsoResult};
pub use scheduler::{ClusterSet, Schedule};
pub use taskgraph::{Arc, Core, PriorityList, TaskGraph};
pub use topology::{Mesh3D, Occupancy, TileCoord};

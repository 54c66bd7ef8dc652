//! Community detection in bipartite networks by partition density.
//!
//! [`quality`] scores partitions, [`bilpa`] finds them by label propagation
//! and [`exact`] finds optimal ones on small graphs by enumeration.
//! [`generators`] builds benchmark graphs with planted communities and
//! [`analysis`] holds closed forms for two of them.

pub mod analysis;
pub mod bilpa;
pub mod data;
pub mod error;
pub mod exact;
pub mod generators;
pub mod graph;
pub mod output;
pub mod par;
pub mod partition;
pub mod quality;

pub use bilpa::{BilpaConfig, BilpaOutcome, ResidualTie};
pub use error::{Error, Result};
pub use graph::{BipartiteGraph, EdgeRow, Side};
pub use par::Execution;
pub use partition::Partition;
pub use quality::QualityReport;

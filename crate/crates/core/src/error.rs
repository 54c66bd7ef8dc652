use thiserror::Error;

use crate::graph::Side;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("duplicate edge ({u}, {v})")]
    DuplicateEdge { u: String, v: String },

    #[error("weight {weight} on edge ({u}, {v}) is outside [0, 1]")]
    WeightOutOfRange { u: String, v: String, weight: f64 },

    #[error("edge list mixes weighted and unweighted rows (line {line})")]
    MixedWeights { line: usize },

    #[error("graph has no {0} nodes")]
    EmptySide(Side),

    #[error("{side} index {index} out of range (side has {len} nodes)")]
    IndexOutOfRange { side: Side, index: usize, len: usize },

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("partition covers {part_p}x{part_q} nodes but graph has {graph_p}x{graph_q}")]
    PartitionGraphMismatch {
        part_p: usize,
        part_q: usize,
        graph_p: usize,
        graph_q: usize,
    },

    #[error("{side} node {index} has no community label")]
    EmptyMembership { side: Side, index: usize },

    #[error("community has no nodes on the opposite side of {0}")]
    EmptyOppositeSide(Side),

    #[error("{side} node {index} is already a member of community {label}")]
    AlreadyMember { side: Side, index: usize, label: usize },

    #[error("community label {label} out of range ({count} communities)")]
    UnknownLabel { label: usize, count: usize },

    #[error("Barber modularity is undefined for overlapping partitions")]
    OverlappingPartition,

    #[error("invalid BiLPA configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid chain of bicliques: {0}")]
    InvalidChain(String),

    #[error("invalid closed-form parameters: {0}")]
    InvalidParams(String),

    #[error("enumeration needs about {required:.3e} assignments, budget is {budget}")]
    BudgetExceeded { required: f64, budget: u64 },

    #[error("{quantity}: closed form {closed} vs empirical {empirical} (|diff| {diff:e} > {tolerance:e})")]
    MismatchBeyondTolerance {
        quantity: String,
        closed: f64,
        empirical: f64,
        diff: f64,
        tolerance: f64,
    },

    #[error("unknown node id {id:?} on side {side}")]
    UnknownNode { side: Side, id: String },
}

pub type Result<T> = std::result::Result<T, Error>;

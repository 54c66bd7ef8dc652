//! Bundled datasets.

use crate::graph::{parse_edge_list, BipartiteGraph};

/// Davis's Southern women: 18 women (`A1`..`A18`) and 14 social events
/// (`B1`..`B14`), 89 attendance edges.
pub const SOUTHERN_WOMEN_TSV: &str = include_str!("../data/southern_women.tsv");

pub fn southern_women() -> BipartiteGraph {
    parse_edge_list(SOUTHERN_WOMEN_TSV).expect("bundled data parses")
}

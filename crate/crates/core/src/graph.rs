//! Bipartite graph storage and edge-list ingestion.
//!
//! Nodes are addressed by dense 0-based indices per side. External ids are
//! kept in first-appearance order so that a graph read from an edge list can
//! be written back unchanged.

use std::collections::HashMap;
use std::fmt;
use std::io::{self, Write};
use std::path::Path;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    U,
    V,
}

impl Side {
    pub fn opposite(self) -> Side {
        match self {
            Side::U => Side::V,
            Side::V => Side::U,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Side::U => f.write_str("U"),
            Side::V => f.write_str("V"),
        }
    }
}

/// One row of an edge list: a U-side id, a V-side id and an optional weight.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeRow {
    pub u: String,
    pub v: String,
    pub weight: Option<f64>,
}

impl EdgeRow {
    pub fn new(u: impl Into<String>, v: impl Into<String>) -> Self {
        EdgeRow {
            u: u.into(),
            v: v.into(),
            weight: None,
        }
    }

    pub fn weighted(u: impl Into<String>, v: impl Into<String>, weight: f64) -> Self {
        EdgeRow {
            u: u.into(),
            v: v.into(),
            weight: Some(weight),
        }
    }
}

/// A bipartite graph `G = (U, V, E)` with optional edge weights in `[0, 1]`.
///
/// Unweighted graphs store no weights; internally every adjacency entry still
/// carries a multiplier (1.0 when unweighted) so quality functions can use a
/// single code path over `L(U,V)` or `W(U,V)`.
#[derive(Debug, Clone)]
pub struct BipartiteGraph {
    u_ids: Vec<String>,
    v_ids: Vec<String>,
    u_lookup: HashMap<String, usize>,
    v_lookup: HashMap<String, usize>,
    edges: Vec<(usize, usize)>,
    weights: Option<Vec<f64>>,
    u_adj: Vec<Vec<(usize, f64)>>,
    v_adj: Vec<Vec<(usize, f64)>>,
    weight_total: f64,
}

impl BipartiteGraph {
    /// Builds a graph from edge-list rows. Ids get dense indices in order of
    /// first appearance.
    pub fn from_edge_list<I>(rows: I) -> Result<Self>
    where
        I: IntoIterator<Item = EdgeRow>,
    {
        let mut u_ids = Vec::new();
        let mut v_ids = Vec::new();
        let mut u_lookup = HashMap::new();
        let mut v_lookup = HashMap::new();
        let mut edges = Vec::new();
        let mut weights = Vec::new();
        let mut weighted = None;

        for (line, row) in rows.into_iter().enumerate() {
            match (weighted, row.weight.is_some()) {
                (None, w) => weighted = Some(w),
                (Some(a), b) if a != b => return Err(Error::MixedWeights { line: line + 1 }),
                _ => {}
            }
            let i = *u_lookup.entry(row.u.clone()).or_insert_with(|| {
                u_ids.push(row.u.clone());
                u_ids.len() - 1
            });
            let j = *v_lookup.entry(row.v.clone()).or_insert_with(|| {
                v_ids.push(row.v.clone());
                v_ids.len() - 1
            });
            edges.push((i, j));
            if let Some(w) = row.weight {
                weights.push(w);
            }
        }

        let weights = if weighted == Some(true) { Some(weights) } else { None };
        Self::assemble(u_ids, v_ids, u_lookup, v_lookup, edges, weights)
    }

    /// Builds an unweighted graph over index ranges `0..p` and `0..q`; ids are
    /// `u0..` and `v0..`. Isolated nodes are allowed.
    pub fn from_indexed(p: usize, q: usize, edges: &[(usize, usize)]) -> Result<Self> {
        Self::from_indexed_inner(p, q, edges.to_vec(), None)
    }

    pub fn from_indexed_weighted(p: usize, q: usize, edges: &[(usize, usize, f64)]) -> Result<Self> {
        let pairs = edges.iter().map(|&(i, j, _)| (i, j)).collect();
        let weights = edges.iter().map(|&(_, _, w)| w).collect();
        Self::from_indexed_inner(p, q, pairs, Some(weights))
    }

    fn from_indexed_inner(p: usize, q: usize, edges: Vec<(usize, usize)>, weights: Option<Vec<f64>>) -> Result<Self> {
        let u_ids: Vec<String> = (0..p).map(|i| format!("u{i}")).collect();
        let v_ids: Vec<String> = (0..q).map(|j| format!("v{j}")).collect();
        for &(i, j) in &edges {
            if i >= p {
                return Err(Error::IndexOutOfRange {
                    side: Side::U,
                    index: i,
                    len: p,
                });
            }
            if j >= q {
                return Err(Error::IndexOutOfRange {
                    side: Side::V,
                    index: j,
                    len: q,
                });
            }
        }
        let u_lookup = lookup(&u_ids);
        let v_lookup = lookup(&v_ids);
        Self::assemble(u_ids, v_ids, u_lookup, v_lookup, edges, weights)
    }

    fn assemble(
        u_ids: Vec<String>,
        v_ids: Vec<String>,
        u_lookup: HashMap<String, usize>,
        v_lookup: HashMap<String, usize>,
        edges: Vec<(usize, usize)>,
        weights: Option<Vec<f64>>,
    ) -> Result<Self> {
        if u_ids.is_empty() {
            return Err(Error::EmptySide(Side::U));
        }
        if v_ids.is_empty() {
            return Err(Error::EmptySide(Side::V));
        }
        let mut u_adj = vec![Vec::new(); u_ids.len()];
        let mut v_adj = vec![Vec::new(); v_ids.len()];
        let mut weight_total = 0.0;
        for (e, &(i, j)) in edges.iter().enumerate() {
            let w = match &weights {
                Some(ws) => {
                    let w = ws[e];
                    if !(0.0..=1.0).contains(&w) {
                        return Err(Error::WeightOutOfRange {
                            u: u_ids[i].clone(),
                            v: v_ids[j].clone(),
                            weight: w,
                        });
                    }
                    w
                }
                None => 1.0,
            };
            u_adj[i].push((j, w));
            v_adj[j].push((i, w));
            weight_total += w;
        }
        for (i, adj) in u_adj.iter_mut().enumerate() {
            adj.sort_by_key(|&(j, _)| j);
            if let Some(pair) = adj.windows(2).find(|pair| pair[0].0 == pair[1].0) {
                return Err(Error::DuplicateEdge {
                    u: u_ids[i].clone(),
                    v: v_ids[pair[0].0].clone(),
                });
            }
        }
        for adj in v_adj.iter_mut() {
            adj.sort_by_key(|&(i, _)| i);
        }
        Ok(BipartiteGraph {
            u_ids,
            v_ids,
            u_lookup,
            v_lookup,
            edges,
            weights,
            u_adj,
            v_adj,
            weight_total,
        })
    }

    /// `|U|`.
    pub fn p(&self) -> usize {
        self.u_ids.len()
    }

    /// `|V|`.
    pub fn q(&self) -> usize {
        self.v_ids.len()
    }

    pub fn side_len(&self, side: Side) -> usize {
        match side {
            Side::U => self.p(),
            Side::V => self.q(),
        }
    }

    /// `L(U,V)`, the number of edges.
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_weighted(&self) -> bool {
        self.weights.is_some()
    }

    /// `W(U,V)` for weighted graphs.
    pub fn weight_total(&self) -> Option<f64> {
        self.weights.as_ref().map(|_| self.weight_total)
    }

    /// `L(U,V)` or `W(U,V)`, whichever applies to this graph.
    pub fn edge_total(&self) -> f64 {
        self.weight_total
    }

    /// Edges in insertion order as `(u index, v index)`.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Per-edge weights aligned with [`edges`](Self::edges), if weighted.
    pub fn weights(&self) -> Option<&[f64]> {
        self.weights.as_deref()
    }

    pub fn id(&self, side: Side, index: usize) -> &str {
        match side {
            Side::U => &self.u_ids[index],
            Side::V => &self.v_ids[index],
        }
    }

    pub fn ids(&self, side: Side) -> &[String] {
        match side {
            Side::U => &self.u_ids,
            Side::V => &self.v_ids,
        }
    }

    pub fn index_of(&self, side: Side, id: &str) -> Option<usize> {
        match side {
            Side::U => self.u_lookup.get(id).copied(),
            Side::V => self.v_lookup.get(id).copied(),
        }
    }

    /// Neighbors of a node with their edge multipliers (1.0 when unweighted),
    /// sorted by index.
    ///
    /// Panics when `index` is out of range; see [`neighbors`](Self::neighbors)
    /// for the checked form.
    pub fn adjacency(&self, side: Side, index: usize) -> &[(usize, f64)] {
        match side {
            Side::U => &self.u_adj[index],
            Side::V => &self.v_adj[index],
        }
    }

    /// `N(u_i)` or `N(v_j)`: opposite-side indices adjacent to a node.
    pub fn neighbors(&self, side: Side, index: usize) -> Result<Vec<usize>> {
        let len = self.side_len(side);
        if index >= len {
            return Err(Error::IndexOutOfRange { side, index, len });
        }
        Ok(self.adjacency(side, index).iter().map(|&(n, _)| n).collect())
    }

    pub fn degree(&self, side: Side, index: usize) -> usize {
        self.adjacency(side, index).len()
    }

    /// Weighted degree (equals `degree` for unweighted graphs).
    pub fn strength(&self, side: Side, index: usize) -> f64 {
        self.adjacency(side, index).iter().map(|&(_, w)| w).sum()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edge_weight(u, v).is_some()
    }

    pub fn edge_weight(&self, u: usize, v: usize) -> Option<f64> {
        let adj = self.u_adj.get(u)?;
        adj.binary_search_by_key(&v, |&(j, _)| j).ok().map(|pos| adj[pos].1)
    }

    /// Graph density `L(U,V) / (|U|·|V|)`, or `W(U,V) / (|U|·|V|)` when weighted.
    pub fn density(&self) -> f64 {
        self.edge_total() / (self.p() * self.q()) as f64
    }

    /// Returns a copy with nodes moved: old `u_i` becomes `u_{u_perm[i]}` and
    /// old `v_j` becomes `v_{v_perm[j]}`. Ids travel with their nodes.
    pub fn permuted(&self, u_perm: &[usize], v_perm: &[usize]) -> BipartiteGraph {
        assert_eq!(u_perm.len(), self.p());
        assert_eq!(v_perm.len(), self.q());
        let mut u_ids = vec![String::new(); self.p()];
        let mut v_ids = vec![String::new(); self.q()];
        for (i, &to) in u_perm.iter().enumerate() {
            u_ids[to] = self.u_ids[i].clone();
        }
        for (j, &to) in v_perm.iter().enumerate() {
            v_ids[to] = self.v_ids[j].clone();
        }
        let edges = self.edges.iter().map(|&(i, j)| (u_perm[i], v_perm[j])).collect();
        let u_lookup = lookup(&u_ids);
        let v_lookup = lookup(&v_ids);
        Self::assemble(u_ids, v_ids, u_lookup, v_lookup, edges, self.weights.clone())
            .expect("permutation of a valid graph is valid")
    }

    /// Writes the graph in edge-list format, one edge per line in insertion
    /// order.
    pub fn write_edge_list<W: Write>(&self, mut out: W) -> io::Result<()> {
        for (e, &(i, j)) in self.edges.iter().enumerate() {
            match &self.weights {
                Some(ws) => writeln!(out, "{}\t{}\t{}", self.u_ids[i], self.v_ids[j], ws[e])?,
                None => writeln!(out, "{}\t{}", self.u_ids[i], self.v_ids[j])?,
            }
        }
        Ok(())
    }

    pub fn to_edge_list_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_edge_list(&mut buf).expect("writing to a Vec");
        String::from_utf8(buf).expect("ids are UTF-8")
    }
}

fn lookup(ids: &[String]) -> HashMap<String, usize> {
    ids.iter().enumerate().map(|(i, id)| (id.clone(), i)).collect()
}

/// Parses edge-list text: whitespace-separated `u_id v_id [weight]` per line,
/// `#` starts a comment line, blank lines are skipped.
pub fn parse_edge_rows(text: &str) -> Result<Vec<EdgeRow>> {
    let mut rows = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let weight = match fields.len() {
            2 => None,
            3 => Some(fields[2].parse::<f64>().map_err(|e| Error::Parse {
                line: n + 1,
                message: format!("bad weight {:?}: {e}", fields[2]),
            })?),
            k => {
                return Err(Error::Parse {
                    line: n + 1,
                    message: format!("expected 2 or 3 fields, found {k}"),
                })
            }
        };
        rows.push(EdgeRow {
            u: fields[0].to_string(),
            v: fields[1].to_string(),
            weight,
        });
    }
    Ok(rows)
}

pub fn parse_edge_list(text: &str) -> Result<BipartiteGraph> {
    BipartiteGraph::from_edge_list(parse_edge_rows(text)?)
}

pub fn read_edge_list(path: impl AsRef<Path>) -> Result<BipartiteGraph> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse {
        line: 0,
        message: format!("{}: {e}", path.display()),
    })?;
    parse_edge_list(&text)
}

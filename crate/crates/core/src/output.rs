//! Text formats for memberships, D(t) traces and rearranged matrices.
//!
//! Membership files hold one node per line, `side node_id label[,label...]`,
//! with `side` either `U` or `V`. Lines starting with `#` are comments.

use std::fmt::Write as _;

use crate::bilpa::{BilpaTrace, MatrixOrder};
use crate::error::{Error, Result};
use crate::graph::{BipartiteGraph, Side};
use crate::partition::Partition;

pub fn membership_to_string(g: &BipartiteGraph, part: &Partition) -> String {
    let mut out = String::new();
    for side in [Side::U, Side::V] {
        for (i, set) in part.side_memberships(side).iter().enumerate() {
            let labels: Vec<String> = set.iter().map(usize::to_string).collect();
            let _ = writeln!(out, "{side} {} {}", g.id(side, i), labels.join(","));
        }
    }
    out
}

/// Reads a membership file against `g`. Every node must appear exactly once.
pub fn parse_membership(g: &BipartiteGraph, text: &str) -> Result<Partition> {
    let mut sets: [Vec<Option<Vec<usize>>>; 2] = [vec![None; g.p()], vec![None; g.q()]];
    for (n, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = |message: String| Error::Parse { line: n + 1, message };
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(bad(format!("expected 3 fields, found {}", fields.len())));
        }
        let side = match fields[0] {
            "U" | "u" => Side::U,
            "V" | "v" => Side::V,
            other => return Err(bad(format!("unknown side {other:?}"))),
        };
        let index = g.index_of(side, fields[1]).ok_or_else(|| Error::UnknownNode {
            side,
            id: fields[1].to_string(),
        })?;
        let labels = fields[2]
            .split(',')
            .map(|l| l.parse::<usize>().map_err(|e| bad(format!("bad label {l:?}: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        let slot = &mut sets[side as usize][index];
        if slot.is_some() {
            return Err(bad(format!("{side} node {:?} listed twice", fields[1])));
        }
        *slot = Some(labels);
    }
    let [u, v] = sets;
    let finish = |side: Side, sets: Vec<Option<Vec<usize>>>| -> Result<Vec<Vec<usize>>> {
        sets.into_iter()
            .enumerate()
            .map(|(index, s)| s.ok_or(Error::EmptyMembership { side, index }))
            .collect()
    };
    Partition::from_memberships(finish(Side::U, u)?, finish(Side::V, v)?)
}

/// `sweep<TAB>density` per sweep, then the kept sweep.
pub fn trace_to_string(trace: &BilpaTrace) -> String {
    let mut out = String::from("#sweep\tdensity\n");
    for (t, d) in trace.d_history.iter().enumerate() {
        let _ = writeln!(out, "{}\t{d}", t + 1);
    }
    let _ = writeln!(out, "#best_sweep\t{}", trace.best_sweep);
    out
}

fn cell(g: &BipartiteGraph, i: usize, j: usize) -> f64 {
    g.edge_weight(i, j).unwrap_or(0.0)
}

fn format_cell(g: &BipartiteGraph, w: f64) -> String {
    if g.is_weighted() {
        format!("{w}")
    } else {
        format!("{}", w as u8)
    }
}

/// Tab-separated grid with a header row of V ids and a leading column of U
/// ids, rows and columns in `order`.
pub fn matrix_text(g: &BipartiteGraph, order: &MatrixOrder) -> String {
    let mut out = String::new();
    for &j in &order.cols {
        out.push('\t');
        out.push_str(g.id(Side::V, j));
    }
    out.push('\n');
    for &i in &order.rows {
        out.push_str(g.id(Side::U, i));
        for &j in &order.cols {
            out.push('\t');
            out.push_str(&format_cell(g, cell(g, i, j)));
        }
        out.push('\n');
    }
    out
}

/// Plain (P2) graymap, one pixel per cell, brightness proportional to weight.
pub fn matrix_pgm(g: &BipartiteGraph, order: &MatrixOrder) -> String {
    let mut out = format!("P2\n{} {}\n255\n", order.cols.len(), order.rows.len());
    for &i in &order.rows {
        let row: Vec<String> = order
            .cols
            .iter()
            .map(|&j| ((cell(g, i, j) * 255.0).round() as u8).to_string())
            .collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

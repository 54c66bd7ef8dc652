//! Exhaustive maximisation of partition density for a fixed community count.
//!
//! Every node is given a non-empty label set (exactly one label for hard
//! partitions). Assignments are enumerated in canonical form only: read as
//! bit strings over the node order, the communities' membership columns must
//! be non-increasing, so each partition is visited once regardless of label
//! numbering and empty communities always come last. Two identical non-empty
//! communities are not a valid partition and are skipped.

use crate::error::{Error, Result};
use crate::graph::{BipartiteGraph, Side};
use crate::par::Execution;
use crate::partition::Partition;

/// Default enumeration budget, in assignments.
pub const DEFAULT_BUDGET: u64 = 100_000_000;

const TOL: f64 = 1e-12;
const MAX_K: usize = 32;
// prefixes enumerated before fanning out; fixed so results never depend on
// the worker count
const MIN_BRANCHES: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolveOptions {
    pub budget: u64,
    /// Skip branches whose optimistic completion cannot reach the incumbent.
    pub prune: bool,
    pub execution: Execution,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            budget: DEFAULT_BUDGET,
            prune: false,
            execution: Execution::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExactResult {
    pub best_partition: Partition,
    pub best_d: f64,
    /// Distinct partitions (up to label permutation) reaching `best_d`.
    pub optima_count: u64,
    pub k: usize,
    /// Complete assignments scored.
    pub evaluated: u64,
}

/// Best hard partition into at most `k` communities.
pub fn solve_model1(g: &BipartiteGraph, k: usize) -> Result<ExactResult> {
    solve_model1_with(g, k, &SolveOptions::default())
}

pub fn solve_model1_with(g: &BipartiteGraph, k: usize, opts: &SolveOptions) -> Result<ExactResult> {
    solve(g, k, 1, opts)
}

/// Best partition into at most `k` communities where each node may hold up
/// to `max_memberships` labels. Communities may share nodes but not edges:
/// without that, nesting a community inside another pushes `D` above 1.
pub fn solve_model2(g: &BipartiteGraph, k: usize, max_memberships: usize) -> Result<ExactResult> {
    solve_model2_with(g, k, max_memberships, &SolveOptions::default())
}

pub fn solve_model2_with(
    g: &BipartiteGraph,
    k: usize,
    max_memberships: usize,
    opts: &SolveOptions,
) -> Result<ExactResult> {
    if max_memberships == 0 || max_memberships > k {
        return Err(Error::InvalidConfig(format!(
            "max_memberships must lie in 1..={k}, got {max_memberships}"
        )));
    }
    solve(g, k, max_memberships, opts)
}

/// Hard optimum over `k = 1..=k_max`; ties go to the smaller `k`.
pub fn best_over_k(g: &BipartiteGraph, k_max: usize) -> Result<(usize, ExactResult)> {
    best_over_k_with(g, k_max, &SolveOptions::default())
}

pub fn best_over_k_with(g: &BipartiteGraph, k_max: usize, opts: &SolveOptions) -> Result<(usize, ExactResult)> {
    if k_max == 0 {
        return Err(Error::InvalidConfig("k_max must be at least 1".into()));
    }
    for k in 1..=k_max {
        check_budget(g, option_masks(k, 1).len(), opts.budget)?;
    }
    let mut best: Option<(usize, ExactResult)> = None;
    for k in 1..=k_max {
        let res = solve_model1_with(g, k, opts)?;
        if best.as_ref().is_none_or(|(_, b)| res.best_d > b.best_d + TOL) {
            best = Some((k, res));
        }
    }
    Ok(best.expect("k_max >= 1"))
}

/// Assignments the enumeration would visit without canonical pruning.
pub fn required_assignments(g: &BipartiteGraph, k: usize, max_memberships: usize) -> f64 {
    let options = option_masks(k, max_memberships.min(k)).len() as f64;
    options.powi((g.p() + g.q()) as i32)
}

fn check_budget(g: &BipartiteGraph, options: usize, budget: u64) -> Result<()> {
    let required = (options as f64).powi((g.p() + g.q()) as i32);
    if required > budget as f64 {
        return Err(Error::BudgetExceeded { required, budget });
    }
    Ok(())
}

/// Label sets with 1..=mm members, ascending as bitmasks.
fn option_masks(k: usize, mm: usize) -> Vec<u32> {
    (1u64..(1u64 << k))
        .map(|m| m as u32)
        .filter(|m| (m.count_ones() as usize) <= mm)
        .collect()
}

fn solve(g: &BipartiteGraph, k: usize, mm: usize, opts: &SolveOptions) -> Result<ExactResult> {
    if k == 0 || k > MAX_K {
        return Err(Error::InvalidConfig(format!("k must lie in 1..={MAX_K}, got {k}")));
    }
    let options = option_masks(k, mm);
    check_budget(g, options.len(), opts.budget)?;

    let search = Search::new(g, k, options, opts.prune);
    let prefixes = search.prefixes();
    let partials = opts.execution.map_slice(&prefixes, |prefix| search.run_from(prefix));

    let mut best = Best::empty();
    let mut evaluated = 0;
    for part in partials {
        evaluated += part.evaluated;
        best.merge(part.best);
    }
    let masks = best.masks.expect("at least one canonical assignment exists");
    let (p, q) = (g.p(), g.q());
    let to_sets = |ms: &[u32]| -> Vec<Vec<usize>> {
        ms.iter()
            .map(|&m| (0..k).filter(|c| m >> c & 1 == 1).collect())
            .collect()
    };
    let best_partition = Partition::from_memberships(to_sets(&masks[..p]), to_sets(&masks[p..p + q]))?;
    Ok(ExactResult {
        best_partition,
        best_d: best.d,
        optima_count: best.count,
        k,
        evaluated,
    })
}

#[derive(Debug, Clone)]
struct Best {
    d: f64,
    count: u64,
    masks: Option<Vec<u32>>,
}

impl Best {
    fn empty() -> Self {
        Best {
            d: f64::NEG_INFINITY,
            count: 0,
            masks: None,
        }
    }

    fn offer(&mut self, d: f64, masks: &[u32]) {
        if d > self.d + TOL {
            self.d = d;
            self.count = 1;
            self.masks = Some(masks.to_vec());
        } else if (d - self.d).abs() <= TOL {
            self.count += 1;
        }
    }

    fn merge(&mut self, other: Best) {
        let Some(masks) = other.masks else { return };
        if other.d > self.d + TOL {
            *self = Best {
                d: other.d,
                count: other.count,
                masks: Some(masks),
            };
        } else if (other.d - self.d).abs() <= TOL {
            self.count += other.count;
        }
    }
}

struct Partial {
    best: Best,
    evaluated: u64,
}

struct Search<'a> {
    g: &'a BipartiteGraph,
    k: usize,
    options: Vec<u32>,
    prune: bool,
    p: usize,
    n: usize,
    /// Σ over V nodes at positions ≥ t of `strength · max set size`.
    optimistic_tail: Vec<f64>,
    edge_total: f64,
}

struct State {
    masks: Vec<u32>,
    internal: Vec<f64>,
    nu: Vec<usize>,
    nv: Vec<usize>,
    /// Bit `c` set while columns `c` and `c + 1` agree on every placed node.
    tight: u32,
    placed_internal: f64,
}

impl<'a> Search<'a> {
    fn new(g: &'a BipartiteGraph, k: usize, options: Vec<u32>, prune: bool) -> Self {
        let (p, q) = (g.p(), g.q());
        let n = p + q;
        let widest = options.iter().map(|m| m.count_ones()).max().unwrap_or(1) as f64;
        let mut optimistic_tail = vec![0.0; n + 1];
        for t in (0..n).rev() {
            let extra = if t >= p {
                g.strength(Side::V, t - p) * widest
            } else {
                0.0
            };
            optimistic_tail[t] = optimistic_tail[t + 1] + extra;
        }
        Search {
            g,
            k,
            options,
            prune,
            p,
            n,
            optimistic_tail,
            edge_total: g.edge_total(),
        }
    }

    fn fresh_state(&self) -> State {
        State {
            masks: vec![0; self.n],
            internal: vec![0.0; self.k],
            nu: vec![0; self.k],
            nv: vec![0; self.k],
            tight: if self.k > 1 { (1u32 << (self.k - 1)) - 1 } else { 0 },
            placed_internal: 0.0,
        }
    }

    /// New `tight` after giving set `mask` to the next node, or `None` when
    /// that breaks canonical order.
    fn advance_tight(tight: u32, mask: u32) -> Option<u32> {
        let lo = mask;
        let hi = mask >> 1;
        if tight & !lo & hi != 0 {
            return None;
        }
        Some(tight & !(lo & !hi))
    }

    /// True when giving V node `t` the set `mask` would make some edge
    /// internal to two communities.
    fn shares_edge(&self, st: &State, t: usize, mask: u32) -> bool {
        t >= self.p
            && mask.count_ones() > 1
            && self
                .g
                .adjacency(Side::V, t - self.p)
                .iter()
                .any(|&(u, _)| (st.masks[u] & mask).count_ones() > 1)
    }

    /// Places node `t`; returns the undo record.
    fn place(&self, st: &mut State, t: usize, mask: u32) -> Vec<(usize, f64)> {
        st.masks[t] = mask;
        let mut undo = Vec::new();
        let mut bits = mask;
        while bits != 0 {
            let c = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            if t < self.p {
                st.nu[c] += 1;
            } else {
                st.nv[c] += 1;
                let add: f64 = self
                    .g
                    .adjacency(Side::V, t - self.p)
                    .iter()
                    .filter(|&&(u, _)| st.masks[u] >> c & 1 == 1)
                    .map(|&(_, w)| w)
                    .sum();
                if add != 0.0 {
                    undo.push((c, st.internal[c]));
                    st.internal[c] += add;
                    st.placed_internal += add;
                }
            }
        }
        undo
    }

    fn unplace(&self, st: &mut State, t: usize, undo: Vec<(usize, f64)>, placed_before: f64) {
        let mut bits = st.masks[t];
        while bits != 0 {
            let c = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            if t < self.p {
                st.nu[c] -= 1;
            } else {
                st.nv[c] -= 1;
            }
        }
        for (c, old) in undo.into_iter().rev() {
            st.internal[c] = old;
        }
        st.placed_internal = placed_before;
        st.masks[t] = 0;
    }

    fn score(&self, st: &State) -> f64 {
        if self.edge_total == 0.0 {
            return 0.0;
        }
        let sum: f64 = (0..self.k)
            .filter(|&c| st.nu[c] > 0 && st.nv[c] > 0)
            .map(|c| st.internal[c] * st.internal[c] / (st.nu[c] * st.nv[c]) as f64)
            .sum();
        sum / self.edge_total
    }

    /// Canonical prefixes of the first few nodes, in enumeration order.
    fn prefixes(&self) -> Vec<Vec<u32>> {
        let mut level: Vec<(Vec<u32>, u32)> = vec![(Vec::new(), self.fresh_state().tight)];
        let mut depth = 0;
        while depth < self.n && level.len() < MIN_BRANCHES {
            let mut next = Vec::with_capacity(level.len() * self.options.len());
            for (prefix, tight) in &level {
                for &m in &self.options {
                    if let Some(t) = Self::advance_tight(*tight, m) {
                        let mut pre = prefix.clone();
                        pre.push(m);
                        next.push((pre, t));
                    }
                }
            }
            level = next;
            depth += 1;
        }
        level.into_iter().map(|(p, _)| p).collect()
    }

    fn run_from(&self, prefix: &[u32]) -> Partial {
        let mut st = self.fresh_state();
        let mut out = Partial {
            best: Best::empty(),
            evaluated: 0,
        };
        for (t, &m) in prefix.iter().enumerate() {
            st.tight = Self::advance_tight(st.tight, m).expect("prefix is canonical");
            if self.shares_edge(&st, t, m) {
                return out;
            }
            self.place(&mut st, t, m);
        }
        self.descend(&mut st, prefix.len(), &mut out);
        out
    }

    fn descend(&self, st: &mut State, t: usize, out: &mut Partial) {
        if t == self.n {
            // identical non-empty communities are one community counted twice
            let mut tight = st.tight;
            while tight != 0 {
                let c = tight.trailing_zeros() as usize;
                tight &= tight - 1;
                if st.nu[c] + st.nv[c] > 0 {
                    return;
                }
            }
            out.evaluated += 1;
            let d = self.score(st);
            out.best.offer(d, &st.masks);
            return;
        }
        if self.prune && self.edge_total > 0.0 && out.best.masks.is_some() {
            // each community contributes at most its internal weight
            let bound = (st.placed_internal + self.optimistic_tail[t]) / self.edge_total;
            if bound < out.best.d - TOL {
                return;
            }
        }
        let tight = st.tight;
        for &m in &self.options {
            let Some(next) = Self::advance_tight(tight, m) else {
                continue;
            };
            if self.shares_edge(st, t, m) {
                continue;
            }
            st.tight = next;
            let before = st.placed_internal;
            let undo = self.place(st, t, m);
            self.descend(st, t + 1, out);
            self.unplace(st, t, undo, before);
        }
        st.tight = tight;
    }
}

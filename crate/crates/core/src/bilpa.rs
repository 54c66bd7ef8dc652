//! BiLPA: alternating label propagation that climbs partition density.
//!
//! U nodes start with unique labels. Each sweep relabels every V node from
//! the frozen U labels, then every U node from the frozen V labels. A node
//! takes the label whose community it has the highest core degree to
//! (rule I); among equal core degrees it takes the one holding most of its
//! neighbors (rule II). Sweeps stop once density stops improving or after
//! `iter_max` sweeps, and the best sweep seen is kept. Final memberships come
//! from each node's core-degree rate: every label whose rate reaches `theta`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{BipartiteGraph, Side};
use crate::par::Execution;
use crate::partition::Partition;
use crate::quality::{self, QualityReport};

const TOL: f64 = 1e-12;

/// How ties surviving rules I and II are settled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ResidualTie {
    #[default]
    Largest,
    Smallest,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BilpaConfig {
    pub iter_max: usize,
    /// Core-degree-rate threshold in `(0, 1]`; 1.0 gives a hard partition.
    pub theta: f64,
    /// When set, residual ties are settled by a seeded draw.
    pub tie_shuffle_seed: Option<u64>,
    pub residual_tie: ResidualTie,
    pub execution: Execution,
}

impl Default for BilpaConfig {
    fn default() -> Self {
        BilpaConfig {
            iter_max: 100,
            theta: 1.0,
            tie_shuffle_seed: None,
            residual_tie: ResidualTie::default(),
            execution: Execution::default(),
        }
    }
}

impl BilpaConfig {
    pub fn with_theta(mut self, theta: f64) -> Self {
        self.theta = theta;
        self
    }

    pub fn with_iter_max(mut self, iter_max: usize) -> Self {
        self.iter_max = iter_max;
        self
    }

    pub fn with_seed(mut self, seed: Option<u64>) -> Self {
        self.tie_shuffle_seed = seed;
        self
    }

    pub fn with_execution(mut self, execution: Execution) -> Self {
        self.execution = execution;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.iter_max < 1 {
            return Err(Error::InvalidConfig("iter_max must be at least 1".into()));
        }
        if !(self.theta > 0.0 && self.theta <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "theta must lie in (0, 1], got {}",
                self.theta
            )));
        }
        Ok(())
    }

    fn tie_break(&self, round: u64) -> TieBreak {
        TieBreak {
            residual: self.residual_tie,
            seed: self.tie_shuffle_seed,
            round,
        }
    }
}

/// Residual tie rule for one side update. `round` decorrelates seeded draws
/// between sweeps and sides.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct TieBreak {
    pub residual: ResidualTie,
    pub seed: Option<u64>,
    pub round: u64,
}

impl TieBreak {
    /// `candidates` is sorted ascending and non-empty.
    fn pick(&self, node: usize, candidates: &[usize]) -> usize {
        if candidates.len() == 1 {
            return candidates[0];
        }
        if let Some(seed) = self.seed {
            let mix = seed
                ^ self.round.wrapping_mul(0x9E37_79B9_7F4A_7C15)
                ^ (node as u64).wrapping_mul(0xC2B2_AE3D_27D4_EB4F);
            let mut rng = ChaCha8Rng::seed_from_u64(mix);
            return candidates[rng.random_range(0..candidates.len())];
        }
        match self.residual {
            ResidualTie::Largest => *candidates.last().unwrap(),
            ResidualTie::Smallest => candidates[0],
        }
    }
}

/// Per-run history and the final core-degree rates.
#[derive(Debug, Clone, PartialEq)]
pub struct BilpaTrace {
    /// `D(t)` of the hard labeling after sweep `t` (index `t - 1`).
    pub d_history: Vec<f64>,
    pub sweeps_run: usize,
    /// Sweep whose labeling was kept (1-based).
    pub best_sweep: usize,
    pub final_labels_u: Vec<Vec<usize>>,
    pub final_labels_v: Vec<Vec<usize>>,
    /// `RCD(node, k)` per node as `(label, rate)`, labels in the final
    /// partition's numbering.
    pub rcd_u: Vec<Vec<(usize, f64)>>,
    pub rcd_v: Vec<Vec<(usize, f64)>>,
}

#[derive(Debug, Clone)]
pub struct BilpaOutcome {
    pub partition: Partition,
    pub report: QualityReport,
    pub trace: BilpaTrace,
}

/// Label totals adjacent to one node: `(label, Σ a_ij or Σ w_ij)` sorted by
/// label.
fn neighbor_label_totals(adj: &[(usize, f64)], fixed_labels: &[usize]) -> Vec<(usize, f64)> {
    let mut acc: Vec<(usize, f64)> = adj.iter().map(|&(x, w)| (fixed_labels[x], w)).collect();
    acc.sort_unstable_by_key(|&(l, _)| l);
    let mut out: Vec<(usize, f64)> = Vec::with_capacity(acc.len());
    for (l, w) in acc {
        match out.last_mut() {
            Some(last) if last.0 == l => last.1 += w,
            _ => out.push((l, w)),
        }
    }
    out
}

/// Rule I then rule II: labels with maximal core degree, narrowed to those
/// with the largest adjacent total. Result is sorted ascending.
fn best_labels(totals: &[(usize, f64)], fixed_counts: &[usize]) -> Vec<usize> {
    let cd = |&(l, a): &(usize, f64)| a / fixed_counts[l] as f64;
    let max_cd = totals.iter().map(cd).fold(f64::NEG_INFINITY, f64::max);
    let rule_one: Vec<&(usize, f64)> = totals.iter().filter(|t| (cd(t) - max_cd).abs() <= TOL).collect();
    let max_adj = rule_one.iter().map(|&&(_, a)| a).fold(f64::NEG_INFINITY, f64::max);
    rule_one
        .into_iter()
        .filter(|&&(_, a)| (a - max_adj).abs() <= TOL * max_adj.max(1.0))
        .map(|&(l, _)| l)
        .collect()
}

/// Number of nodes per label, indexed by label.
pub fn label_counts(labels: &[usize], label_space: usize) -> Vec<usize> {
    let mut counts = vec![0; label_space];
    for &l in labels {
        counts[l] += 1;
    }
    counts
}

/// One synchronous update of every node on `side` against the frozen labels
/// of the opposite side. `fixed_counts[k]` is the number of opposite-side
/// nodes labeled `k`. Nodes without neighbors keep their `current` label.
pub fn update_side(
    g: &BipartiteGraph,
    side: Side,
    fixed_labels: &[usize],
    fixed_counts: &[usize],
    current: &[usize],
    tie: &TieBreak,
    execution: Execution,
) -> Vec<usize> {
    execution.map_range(g.side_len(side), |node| {
        let adj = g.adjacency(side, node);
        if adj.is_empty() {
            return current[node];
        }
        let totals = neighbor_label_totals(adj, fixed_labels);
        tie.pick(node, &best_labels(&totals, fixed_counts))
    })
}

/// Result of one sweep: new U and V labels and `D` of that labeling.
#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub labels_u: Vec<usize>,
    pub labels_v: Vec<usize>,
    pub density: f64,
}

/// Steps 2–6 once: relabel V from U, then U from V, and score the result.
/// Labels live in `0..p+q`.
pub fn sweep(g: &BipartiteGraph, labels_u: &[usize], labels_v: &[usize], round: u64, cfg: &BilpaConfig) -> Sweep {
    let space = g.p() + g.q();
    let r_counts = label_counts(labels_u, space);
    let labels_v = update_side(
        g,
        Side::V,
        labels_u,
        &r_counts,
        labels_v,
        &cfg.tie_break(2 * round),
        cfg.execution,
    );
    let b_counts = label_counts(&labels_v, space);
    let labels_u = update_side(
        g,
        Side::U,
        &labels_v,
        &b_counts,
        labels_u,
        &cfg.tie_break(2 * round + 1),
        cfg.execution,
    );
    let density = quality::hard_density(g, &labels_u, &labels_v, space);
    Sweep {
        labels_u,
        labels_v,
        density,
    }
}

/// Final memberships with their core-degree rates.
#[derive(Debug, Clone)]
pub struct Membership {
    pub partition: Partition,
    pub rcd_u: Vec<Vec<(usize, f64)>>,
    pub rcd_v: Vec<Vec<(usize, f64)>>,
}

/// Labels a node joins (None when isolated) and its per-label RCD.
type NodeLabels = (Option<Vec<usize>>, Vec<(usize, f64)>);

/// Step 7: each node joins every community whose core-degree rate
/// `CD(node, k) / max_g CD(node, g)` is at least `theta`.
///
/// With `theta = 1.0` every node keeps its own label, so the hard result is
/// the labeling that was scored. Nodes without neighbors get a fresh
/// singleton community.
pub fn extract_membership(
    g: &BipartiteGraph,
    labels_u: &[usize],
    labels_v: &[usize],
    theta: f64,
) -> Result<Membership> {
    if !(theta > 0.0 && theta <= 1.0) {
        return Err(Error::InvalidConfig(format!("theta must lie in (0, 1], got {theta}")));
    }
    let space = g.p() + g.q();
    let r_counts = label_counts(labels_u, space);
    let b_counts = label_counts(labels_v, space);
    let hard = theta >= 1.0;

    // (memberships, rates) per node; `None` membership = isolated node
    let assign = |side: Side, own: &[usize], fixed: &[usize], counts: &[usize]| {
        (0..g.side_len(side))
            .map(|node| {
                let adj = g.adjacency(side, node);
                if adj.is_empty() {
                    return (None, Vec::new());
                }
                let totals = neighbor_label_totals(adj, fixed);
                let cds: Vec<(usize, f64)> = totals.iter().map(|&(l, a)| (l, a / counts[l] as f64)).collect();
                let max_cd = cds.iter().map(|&(_, c)| c).fold(0.0, f64::max);
                let rates: Vec<(usize, f64)> = cds.iter().map(|&(l, c)| (l, c / max_cd)).collect();
                let members = if hard {
                    vec![own[node]]
                } else {
                    rates
                        .iter()
                        .filter(|&&(_, r)| r >= theta - TOL)
                        .map(|&(l, _)| l)
                        .collect()
                };
                (Some(members), rates)
            })
            .collect::<Vec<_>>()
    };
    let u_raw = assign(Side::U, labels_u, labels_v, &b_counts);
    let v_raw = assign(Side::V, labels_v, labels_u, &r_counts);

    // compact labels by first appearance (U then V), fresh labels for
    // isolated nodes
    let mut map: Vec<Option<usize>> = vec![None; space];
    let mut next = 0;
    let mut compact_sets = |raw: &[NodeLabels]| -> Vec<Vec<usize>> {
        raw.iter()
            .map(|(members, _)| match members {
                Some(ls) => {
                    let mut out: Vec<usize> = ls
                        .iter()
                        .map(|&l| {
                            *map[l].get_or_insert_with(|| {
                                next += 1;
                                next - 1
                            })
                        })
                        .collect();
                    out.sort_unstable();
                    out
                }
                None => {
                    next += 1;
                    vec![next - 1]
                }
            })
            .collect()
    };
    let u_sets = compact_sets(&u_raw);
    let v_sets = compact_sets(&v_raw);
    let remap_rates = |raw: &[NodeLabels]| -> Vec<Vec<(usize, f64)>> {
        raw.iter()
            .map(|(_, rates)| {
                let mut out: Vec<(usize, f64)> = rates.iter().filter_map(|&(l, r)| map[l].map(|c| (c, r))).collect();
                out.sort_by_key(|&(c, _)| c);
                out
            })
            .collect()
    };
    let rcd_u = remap_rates(&u_raw);
    let rcd_v = remap_rates(&v_raw);
    let partition = Partition::from_memberships(u_sets, v_sets)?;
    Ok(Membership {
        partition,
        rcd_u,
        rcd_v,
    })
}

/// Runs BiLPA to completion.
pub fn run(g: &BipartiteGraph, cfg: &BilpaConfig) -> Result<BilpaOutcome> {
    cfg.validate()?;
    let p = g.p();
    let mut labels_u: Vec<usize> = (0..p).collect();
    // V nodes without neighbors keep these placeholder labels
    let mut labels_v: Vec<usize> = (0..g.q()).map(|j| p + j).collect();

    let mut d_history = Vec::new();
    let mut best: Option<(f64, Vec<usize>, Vec<usize>, usize)> = None;
    let mut previous = 0.0;
    let mut sweeps_run = 0;
    for t in 1..=cfg.iter_max {
        let s = sweep(g, &labels_u, &labels_v, t as u64, cfg);
        labels_u = s.labels_u;
        labels_v = s.labels_v;
        d_history.push(s.density);
        sweeps_run = t;
        if best.as_ref().is_none_or(|b| s.density > b.0) {
            best = Some((s.density, labels_u.clone(), labels_v.clone(), t));
        }
        if s.density <= previous {
            break;
        }
        previous = s.density;
    }
    let (_, best_u, best_v, best_sweep) = best.expect("iter_max >= 1");

    let membership = extract_membership(g, &best_u, &best_v, cfg.theta)?;
    let report = quality::partition_density(g, &membership.partition)?;
    let trace = BilpaTrace {
        d_history,
        sweeps_run,
        best_sweep,
        final_labels_u: membership.partition.side_memberships(Side::U).to_vec(),
        final_labels_v: membership.partition.side_memberships(Side::V).to_vec(),
        rcd_u: membership.rcd_u,
        rcd_v: membership.rcd_v,
    };
    Ok(BilpaOutcome {
        partition: membership.partition,
        report,
        trace,
    })
}

/// Row and column orders that group nodes by community.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatrixOrder {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
}

/// Step 8: U rows and V columns sorted by (smallest label, original index),
/// which puts each community's block on the diagonal.
pub fn rearrange_matrix(g: &BipartiteGraph, part: &Partition) -> Result<MatrixOrder> {
    if part.p() != g.p() || part.q() != g.q() {
        return Err(Error::PartitionGraphMismatch {
            part_p: part.p(),
            part_q: part.q(),
            graph_p: g.p(),
            graph_q: g.q(),
        });
    }
    let order = |side: Side| {
        let labels = part.primary_labels(side);
        let mut idx: Vec<usize> = (0..labels.len()).collect();
        idx.sort_by_key(|&i| (labels[i], i));
        idx
    };
    Ok(MatrixOrder {
        rows: order(Side::U),
        cols: order(Side::V),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{biclique, chain_of_bicliques, ring_of_bicliques};

    #[test]
    fn biclique_is_one_community() {
        let g = biclique(4, 5).unwrap();
        let out = run(&g, &BilpaConfig::default()).unwrap();
        assert_eq!(out.partition.community_count(), 1);
        assert_eq!(out.report.partition_density, 1.0);
    }

    #[test]
    fn invalid_config_rejected() {
        let g = biclique(2, 2).unwrap();
        for cfg in [
            BilpaConfig::default().with_theta(0.0),
            BilpaConfig::default().with_theta(1.5),
            BilpaConfig::default().with_iter_max(0),
        ] {
            assert!(matches!(run(&g, &cfg), Err(Error::InvalidConfig(_))));
        }
    }

    #[test]
    fn single_candidate_label() {
        // v0 adjacent to u0, u1 both labeled 7
        let g = BipartiteGraph::from_indexed(2, 1, &[(0, 0), (1, 0)]).unwrap();
        let counts = label_counts(&[7, 7], 8);
        let out = update_side(
            &g,
            Side::V,
            &[7, 7],
            &counts,
            &[0],
            &TieBreak::default(),
            Execution::Sequential,
        );
        assert_eq!(out, vec![7]);
    }

    #[test]
    fn rule_one_prefers_higher_core_degree() {
        // v0 touches both of community 0 (size 2, CD 1.0) and 3 of community 1
        // (size 4, CD 0.75)
        let g = BipartiteGraph::from_indexed(6, 1, &[(0, 0), (1, 0), (2, 0), (3, 0), (4, 0)]).unwrap();
        let fixed = [0, 0, 1, 1, 1, 1];
        let counts = label_counts(&fixed, 2);
        let out = update_side(
            &g,
            Side::V,
            &fixed,
            &counts,
            &[0],
            &TieBreak::default(),
            Execution::Sequential,
        );
        assert_eq!(out, vec![0]);
    }

    #[test]
    fn rule_two_prefers_more_neighbors() {
        // CD 1.0 to a size-2 community (label 1) and a size-3 one (label 0)
        let g = BipartiteGraph::from_indexed(5, 1, &[(0, 0), (1, 0), (2, 0), (3, 0), (4, 0)]).unwrap();
        let fixed = [0, 0, 0, 1, 1];
        let counts = label_counts(&fixed, 2);
        for residual in [ResidualTie::Largest, ResidualTie::Smallest] {
            let tie = TieBreak {
                residual,
                ..TieBreak::default()
            };
            let out = update_side(&g, Side::V, &fixed, &counts, &[0], &tie, Execution::Sequential);
            assert_eq!(out, vec![0]);
        }
    }

    #[test]
    fn residual_tie_policies() {
        let g = BipartiteGraph::from_indexed(2, 1, &[(0, 0), (1, 0)]).unwrap();
        let fixed = [3, 5];
        let counts = label_counts(&fixed, 6);
        let pick = |tie: TieBreak| update_side(&g, Side::V, &fixed, &counts, &[0], &tie, Execution::Sequential)[0];
        assert_eq!(pick(TieBreak::default()), 5);
        assert_eq!(
            pick(TieBreak {
                residual: ResidualTie::Smallest,
                ..TieBreak::default()
            }),
            3
        );
        let seeded = TieBreak {
            seed: Some(11),
            ..TieBreak::default()
        };
        assert_eq!(pick(seeded), pick(seeded));
        let drawn: std::collections::BTreeSet<usize> = (0..64)
            .map(|s| {
                pick(TieBreak {
                    seed: Some(s),
                    ..TieBreak::default()
                })
            })
            .collect();
        assert_eq!(drawn.into_iter().collect::<Vec<_>>(), vec![3, 5]);
    }

    #[test]
    fn isolated_nodes_become_singletons() {
        // u2 and v2 have no edges
        let g = BipartiteGraph::from_indexed(3, 3, &[(0, 0), (0, 1), (1, 0), (1, 1)]).unwrap();
        let out = run(&g, &BilpaConfig::default()).unwrap();
        let part = &out.partition;
        assert_eq!(part.community_count(), 3);
        let lonely_u = part.memberships(Side::U, 2)[0];
        let lonely_v = part.memberships(Side::V, 2)[0];
        assert_ne!(lonely_u, lonely_v);
        assert_eq!(out.report.partition_density, 1.0);
        assert!(out.trace.rcd_u[2].is_empty());
    }

    #[test]
    fn ring_recovered_and_trace_consistent() {
        let ring = ring_of_bicliques(2, 2, 8).unwrap();
        let out = run(&ring.graph, &BilpaConfig::default()).unwrap();
        assert_eq!(
            out.partition.canonical_communities(),
            ring.truth.canonical_communities()
        );
        assert!((out.report.partition_density - 0.8).abs() < 1e-12);
        let trace = &out.trace;
        assert_eq!(trace.d_history.len(), trace.sweeps_run);
        assert!(trace.sweeps_run <= 100);
        assert!(trace.d_history.iter().all(|d| (0.0..=1.0).contains(d)));
        let best = trace.d_history[trace.best_sweep - 1];
        assert!(trace.d_history.iter().all(|&d| d <= best));
    }

    #[test]
    fn theta_one_gives_hard_partition() {
        let chain = chain_of_bicliques(&[(3, 4), (4, 5), (5, 5)]).unwrap();
        let out = run(&chain.graph, &BilpaConfig::default()).unwrap();
        assert!(out.partition.is_hard());
        let soft = run(&chain.graph, &BilpaConfig::default().with_theta(0.9)).unwrap();
        assert_eq!(soft.partition.overlapping_nodes().len(), 2);
        assert_eq!(soft.report.partition_density, 1.0);
    }

    #[test]
    fn deterministic_without_seed() {
        let g = crate::generators::random_bipartite(15, 12, 0.3, 4).unwrap();
        let cfg = BilpaConfig::default().with_theta(0.8);
        let a = run(&g, &cfg).unwrap();
        let b = run(&g, &cfg).unwrap();
        assert_eq!(a.partition, b.partition);
        assert_eq!(a.trace, b.trace);
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let g = crate::generators::random_bipartite(30, 25, 0.2, 9).unwrap();
        for seed in [None, Some(5)] {
            let seq = run(
                &g,
                &BilpaConfig::default()
                    .with_seed(seed)
                    .with_execution(Execution::Sequential),
            )
            .unwrap();
            let par = run(
                &g,
                &BilpaConfig::default()
                    .with_seed(seed)
                    .with_execution(Execution::Parallel),
            )
            .unwrap();
            assert_eq!(seq.partition, par.partition);
            assert_eq!(seq.trace, par.trace);
        }
    }

    #[test]
    fn rearrange_identity_and_grouping() {
        let ring = ring_of_bicliques(2, 2, 4).unwrap();
        let order = rearrange_matrix(&ring.graph, &ring.truth).unwrap();
        assert_eq!(order.rows, (0..8).collect::<Vec<_>>());
        assert_eq!(order.cols, (0..8).collect::<Vec<_>>());

        let g = biclique(3, 2).unwrap();
        let order = rearrange_matrix(&g, &Partition::single(3, 2)).unwrap();
        assert_eq!(order.rows, vec![0, 1, 2]);
        assert_eq!(order.cols, vec![0, 1]);

        let part = Partition::hard(&[1, 0, 1], &[0, 1]);
        let order = rearrange_matrix(&g, &part).unwrap();
        assert_eq!(order.rows, vec![0, 2, 1]);
    }
}

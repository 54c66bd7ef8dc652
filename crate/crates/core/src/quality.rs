//! Partition density, core degree, density gains and Barber's bipartite
//! modularity.
//!
//! Every function works on unweighted and weighted graphs alike: `L(U_c,V_c)`
//! becomes `W(U_c,V_c)` and `L(U,V)` becomes `W(U,V)` when weights are present.
//! Community densities with an empty side are 0.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::graph::{BipartiteGraph, Side};
use crate::partition::Partition;

/// Per-community figures from a [`QualityReport`].
#[derive(Debug, Clone, PartialEq)]
pub struct CommunityQuality {
    pub label: usize,
    /// `L(U_c,V_c)`, or `W(U_c,V_c)` for weighted graphs.
    pub internal: f64,
    pub u_size: usize,
    pub v_size: usize,
    /// `D_c`.
    pub density: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QualityReport {
    /// `D`, or `D_W` for weighted graphs.
    pub partition_density: f64,
    pub weighted: bool,
    /// `L(U,V)` or `W(U,V)`.
    pub edge_total: f64,
    pub per_community: Vec<CommunityQuality>,
    /// `None` for overlapping partitions.
    pub barber_modularity: Option<f64>,
}

impl QualityReport {
    /// `Σ_c (L_c / L)·D_c` from the per-community rows.
    pub fn recomputed_density(&self) -> f64 {
        if self.edge_total == 0.0 {
            return 0.0;
        }
        self.per_community
            .iter()
            .map(|c| c.internal / self.edge_total * c.density)
            .sum()
    }

    pub fn community_count(&self) -> usize {
        self.per_community.len()
    }

    /// Flat `key<TAB>value` block.
    pub fn to_key_value(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "partition_density\t{}", self.partition_density);
        let _ = writeln!(s, "weighted\t{}", self.weighted);
        let _ = writeln!(s, "edge_total\t{}", self.edge_total);
        let _ = writeln!(s, "communities\t{}", self.per_community.len());
        match self.barber_modularity {
            Some(q) => {
                let _ = writeln!(s, "barber_modularity\t{q}");
            }
            None => s.push_str("barber_modularity\tNA\n"),
        }
        s
    }

    /// One community per line: `label internal u_size v_size density`.
    pub fn to_table(&self) -> String {
        let mut s = String::from("#label\tinternal\tu_size\tv_size\tdensity\n");
        for c in &self.per_community {
            let _ = writeln!(
                s,
                "{}\t{}\t{}\t{}\t{}",
                c.label, c.internal, c.u_size, c.v_size, c.density
            );
        }
        s
    }
}

fn ratio(num: f64, den: f64) -> f64 {
    if den == 0.0 || num == 0.0 {
        0.0
    } else {
        num / den
    }
}

fn mask(len: usize, set: &[usize]) -> (Vec<bool>, usize) {
    let mut m = vec![false; len];
    let mut n = 0;
    for &x in set {
        if !m[x] {
            m[x] = true;
            n += 1;
        }
    }
    (m, n)
}

/// Induced edge total between `u_set` and `v_set` plus the distinct set sizes.
fn induced(g: &BipartiteGraph, u_set: &[usize], v_set: &[usize]) -> (f64, usize, usize) {
    let (v_mask, v_len) = mask(g.q(), v_set);
    let (u_mask, u_len) = mask(g.p(), u_set);
    let mut total = 0.0;
    for (i, _) in u_mask.iter().enumerate().filter(|(_, &m)| m) {
        total += g
            .adjacency(Side::U, i)
            .iter()
            .filter(|&&(j, _)| v_mask[j])
            .map(|&(_, w)| w)
            .sum::<f64>();
    }
    (total, u_len, v_len)
}

/// `D_c = L(U_c,V_c) / (|U_c|·|V_c|)`; 0 when either side is empty.
pub fn community_density(g: &BipartiteGraph, u_set: &[usize], v_set: &[usize]) -> f64 {
    let (l, nu, nv) = induced(g, u_set, v_set);
    ratio(l, (nu * nv) as f64)
}

/// Internal edge totals per community. An edge whose endpoints share several
/// communities counts once in each of them.
fn internal_totals(g: &BipartiteGraph, part: &Partition) -> Vec<f64> {
    let mut totals = vec![0.0; part.community_count()];
    for i in 0..g.p() {
        let mu = part.memberships(Side::U, i);
        for &(j, w) in g.adjacency(Side::U, i) {
            let mv = part.memberships(Side::V, j);
            if mu.len() == 1 && mv.len() == 1 {
                if mu[0] == mv[0] {
                    totals[mu[0]] += w;
                }
                continue;
            }
            for &c in mu {
                if mv.binary_search(&c).is_ok() {
                    totals[c] += w;
                }
            }
        }
    }
    totals
}

fn side_sizes(part: &Partition, side: Side) -> Vec<usize> {
    let mut sizes = vec![0; part.community_count()];
    for set in part.side_memberships(side) {
        for &c in set {
            sizes[c] += 1;
        }
    }
    sizes
}

/// Partition density `D = (1/L) Σ_c L_c² / (|U_c|·|V_c|)` with the full
/// per-community breakdown and, for hard partitions, Barber's modularity.
pub fn partition_density(g: &BipartiteGraph, part: &Partition) -> Result<QualityReport> {
    part.check_against(g)?;
    let totals = internal_totals(g, part);
    let u_sizes = side_sizes(part, Side::U);
    let v_sizes = side_sizes(part, Side::V);
    let edge_total = g.edge_total();

    let per_community: Vec<CommunityQuality> = (0..part.community_count())
        .map(|c| CommunityQuality {
            label: c,
            internal: totals[c],
            u_size: u_sizes[c],
            v_size: v_sizes[c],
            density: ratio(totals[c], (u_sizes[c] * v_sizes[c]) as f64),
        })
        .collect();
    let partition_density = ratio(
        per_community.iter().map(|c| c.internal * c.density).sum::<f64>(),
        edge_total,
    );
    let barber_modularity = if part.is_hard() {
        Some(barber_modularity(g, part)?)
    } else {
        None
    };
    Ok(QualityReport {
        partition_density,
        weighted: g.is_weighted(),
        edge_total,
        per_community,
        barber_modularity,
    })
}

/// Just `D`.
pub fn density(g: &BipartiteGraph, part: &Partition) -> Result<f64> {
    part.check_against(g)?;
    let totals = internal_totals(g, part);
    let u_sizes = side_sizes(part, Side::U);
    let v_sizes = side_sizes(part, Side::V);
    let sum: f64 = (0..part.community_count())
        .map(|c| ratio(totals[c] * totals[c], (u_sizes[c] * v_sizes[c]) as f64))
        .sum();
    Ok(ratio(sum, g.edge_total()))
}

/// `D` for a hard labeling given as raw labels below `label_space`; used in
/// the BiLPA sweep loop where building a [`Partition`] each sweep is waste.
pub(crate) fn hard_density(g: &BipartiteGraph, u_labels: &[usize], v_labels: &[usize], label_space: usize) -> f64 {
    let mut totals = vec![0.0; label_space];
    let mut nu = vec![0usize; label_space];
    let mut nv = vec![0usize; label_space];
    for &l in u_labels {
        nu[l] += 1;
    }
    for &l in v_labels {
        nv[l] += 1;
    }
    for (i, &li) in u_labels.iter().enumerate() {
        for &(j, w) in g.adjacency(Side::U, i) {
            if v_labels[j] == li {
                totals[li] += w;
            }
        }
    }
    let sum: f64 = (0..label_space)
        .map(|c| ratio(totals[c] * totals[c], (nu[c] * nv[c]) as f64))
        .sum();
    ratio(sum, g.edge_total())
}

/// `CD(node, G_c)`: the share of the community's opposite side adjacent to the
/// node. Weighted graphs sum edge weights in the numerator.
pub fn core_degree(g: &BipartiteGraph, side: Side, index: usize, u_set: &[usize], v_set: &[usize]) -> Result<f64> {
    let len = g.side_len(side);
    if index >= len {
        return Err(Error::IndexOutOfRange { side, index, len });
    }
    let opposite = match side {
        Side::U => v_set,
        Side::V => u_set,
    };
    let (m, n) = mask(g.side_len(side.opposite()), opposite);
    if n == 0 {
        return Err(Error::EmptyOppositeSide(side));
    }
    let hit: f64 = g
        .adjacency(side, index)
        .iter()
        .filter(|&&(x, _)| m[x])
        .map(|&(_, w)| w)
        .sum();
    Ok(hit / n as f64)
}

/// Change in `D` from adding one node to a community it is not yet in.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaDensity {
    /// Exact change, with the community's side size incremented.
    pub exact: f64,
    /// First-order approximation keeping the old side size in the
    /// denominator; 0 when the community has an empty side.
    pub approx: f64,
}

pub fn delta_density(
    g: &BipartiteGraph,
    part: &Partition,
    side: Side,
    index: usize,
    target: usize,
) -> Result<DeltaDensity> {
    part.check_against(g)?;
    let len = g.side_len(side);
    if index >= len {
        return Err(Error::IndexOutOfRange { side, index, len });
    }
    if target >= part.community_count() {
        return Err(Error::UnknownLabel {
            label: target,
            count: part.community_count(),
        });
    }
    if part.contains(side, index, target) {
        return Err(Error::AlreadyMember {
            side,
            index,
            label: target,
        });
    }

    let community = &part.communities()[target];
    let (internal, nu, nv) = induced(g, &community.u, &community.v);
    let opposite = match side {
        Side::U => &community.v,
        Side::V => &community.u,
    };
    let (m, _) = mask(g.side_len(side.opposite()), opposite);
    let gained: f64 = g
        .adjacency(side, index)
        .iter()
        .filter(|&&(x, _)| m[x])
        .map(|&(_, w)| w)
        .sum();

    let total = g.edge_total();
    let (same, other) = match side {
        Side::U => (nu, nv),
        Side::V => (nv, nu),
    };
    let before = ratio(internal * internal, (same * other) as f64);
    let after = ratio((internal + gained) * (internal + gained), ((same + 1) * other) as f64);
    let exact = ratio(after - before, total);
    let approx = ratio(ratio((2.0 * internal + gained) * gained, (same * other) as f64), total);
    Ok(DeltaDensity { exact, approx })
}

/// Barber's bipartite modularity for a hard partition:
/// `Q = Σ_c [ L_c/L − (d^U_c / L)(d^V_c / L) ]`, where `d^U_c` and `d^V_c`
/// are the summed degrees of the community's U and V nodes.
pub fn barber_modularity(g: &BipartiteGraph, part: &Partition) -> Result<f64> {
    part.check_against(g)?;
    if !part.is_hard() {
        return Err(Error::OverlappingPartition);
    }
    let total = g.edge_total();
    if total == 0.0 {
        return Ok(0.0);
    }
    let k = part.community_count();
    let internal = internal_totals(g, part);
    let mut du = vec![0.0; k];
    let mut dv = vec![0.0; k];
    for i in 0..g.p() {
        du[part.memberships(Side::U, i)[0]] += g.strength(Side::U, i);
    }
    for j in 0..g.q() {
        dv[part.memberships(Side::V, j)[0]] += g.strength(Side::V, j);
    }
    Ok((0..k)
        .map(|c| internal[c] / total - (du[c] / total) * (dv[c] / total))
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{biclique, ring_of_bicliques};

    fn ring_pairs(ring: &crate::generators::Benchmark, k: usize) -> Partition {
        let truth = &ring.truth;
        let u: Vec<usize> = truth.primary_labels(Side::U).iter().map(|l| l / k).collect();
        let v: Vec<usize> = truth.primary_labels(Side::V).iter().map(|l| l / k).collect();
        Partition::hard(&u, &v)
    }

    #[test]
    fn biclique_community_is_dense() {
        let g = biclique(3, 4).unwrap();
        assert_eq!(community_density(&g, &[0, 1, 2], &[0, 1, 2, 3]), 1.0);
        assert_eq!(community_density(&g, &[0], &[]), 0.0);
    }

    #[test]
    fn single_community_equals_graph_density() {
        let ring = ring_of_bicliques(2, 3, 5).unwrap();
        let g = &ring.graph;
        let report = partition_density(g, &Partition::single(g.p(), g.q())).unwrap();
        assert!((report.partition_density - g.density()).abs() < 1e-15);
        assert_eq!(report.barber_modularity, Some(0.0));
    }

    #[test]
    fn ring_truth_and_pairs() {
        let ring = ring_of_bicliques(2, 2, 4).unwrap();
        let g = &ring.graph;
        // one biclique's nodes form a full block; the bridges leave it
        let c = &ring.truth.communities()[0];
        assert_eq!(community_density(g, &c.u, &c.v), 1.0);
        let truth = partition_density(g, &ring.truth).unwrap();
        assert!((truth.partition_density - 0.8).abs() < 1e-12);
        assert!((truth.recomputed_density() - truth.partition_density).abs() < 1e-12);
        // pairs merged: each community has 2*4+1 = 9 internal edges on a 4x4 block;
        // 2 * 81/16 / 20 = 81/160
        let pairs = partition_density(g, &ring_pairs(&ring, 2)).unwrap();
        assert!((pairs.partition_density - 81.0 / 160.0).abs() < 1e-12);
        assert_eq!(pairs.per_community[0].internal, 9.0);
    }

    #[test]
    fn barber_on_ring_of_twelve() {
        let ring = ring_of_bicliques(2, 2, 12).unwrap();
        let q_s = barber_modularity(&ring.graph, &ring.truth).unwrap();
        assert!((q_s - (0.8 - 1.0 / 12.0)).abs() < 1e-12);
        let q_pairs = barber_modularity(&ring.graph, &ring_pairs(&ring, 2)).unwrap();
        assert!((q_pairs - (0.9 - 2.0 / 12.0)).abs() < 1e-12);
        assert!(q_pairs > q_s);
    }

    #[test]
    fn barber_refuses_overlap() {
        let g = biclique(2, 2).unwrap();
        let part = Partition::from_memberships(vec![vec![0, 1], vec![0]], vec![vec![0], vec![1]]).unwrap();
        assert_eq!(barber_modularity(&g, &part), Err(Error::OverlappingPartition));
        assert_eq!(partition_density(&g, &part).unwrap().barber_modularity, None);
    }

    #[test]
    fn core_degree_cases() {
        let g = biclique(3, 3).unwrap();
        assert_eq!(core_degree(&g, Side::U, 0, &[0, 1, 2], &[0, 1, 2]).unwrap(), 1.0);
        let g = BipartiteGraph::from_indexed(2, 2, &[(0, 0)]).unwrap();
        assert_eq!(core_degree(&g, Side::U, 1, &[0], &[0, 1]).unwrap(), 0.0);
        assert_eq!(core_degree(&g, Side::U, 0, &[0], &[0, 1]).unwrap(), 0.5);
        assert_eq!(
            core_degree(&g, Side::V, 0, &[], &[0]),
            Err(Error::EmptyOppositeSide(Side::V))
        );
    }

    #[test]
    fn delta_for_node_without_neighbors_in_target() {
        // u2 only touches v2; community 0 = {u0,u1; v0,v1} is a biclique
        let g = BipartiteGraph::from_indexed(3, 3, &[(0, 0), (0, 1), (1, 0), (1, 1), (2, 2)]).unwrap();
        let part = Partition::hard(&[0, 0, 1], &[0, 0, 1]);
        let d = delta_density(&g, &part, Side::U, 2, 0).unwrap();
        assert_eq!(d.approx, 0.0);
        assert!(d.exact < 0.0);
        assert!(matches!(
            delta_density(&g, &part, Side::U, 0, 0),
            Err(Error::AlreadyMember { .. })
        ));
    }

    #[test]
    fn delta_matches_recomputation_on_ring() {
        let ring = ring_of_bicliques(2, 2, 4).unwrap();
        let g = &ring.graph;
        let part = &ring.truth;
        // u0 of biclique 0 carries the bridge into biclique 1
        let d = delta_density(g, part, Side::U, 0, 1).unwrap();
        let before = density(g, part).unwrap();
        let after = density(g, &part.with_added(Side::U, 0, 1).unwrap()).unwrap();
        assert!((d.exact - (after - before)).abs() < 1e-12);
    }

    #[test]
    fn weighted_with_unit_weights_matches_unweighted() {
        let ring = ring_of_bicliques(3, 2, 4).unwrap();
        let g = &ring.graph;
        let edges: Vec<_> = g.edges().iter().map(|&(i, j)| (i, j, 1.0)).collect();
        let w = BipartiteGraph::from_indexed_weighted(g.p(), g.q(), &edges).unwrap();
        let part = ring_pairs(&ring, 2);
        let a = partition_density(g, &part).unwrap();
        let b = partition_density(&w, &part).unwrap();
        assert_eq!(a.partition_density, b.partition_density);
        assert_eq!(a.barber_modularity, b.barber_modularity);
        assert!(b.weighted);
    }

    #[test]
    fn weighted_density_uses_weight_sums() {
        let g = BipartiteGraph::from_indexed_weighted(1, 2, &[(0, 0, 0.5), (0, 1, 0.25)]).unwrap();
        let report = partition_density(&g, &Partition::single(1, 2)).unwrap();
        // W_c = 0.75 over a 1x2 block, D_W = W_c^2 / (2 W) = 0.375
        assert!((report.partition_density - 0.375).abs() < 1e-15);
        assert!((core_degree(&g, Side::U, 0, &[0], &[0, 1]).unwrap() - 0.375).abs() < 1e-15);
    }

    #[test]
    fn mismatched_partition_rejected() {
        let g = biclique(2, 2).unwrap();
        assert!(matches!(
            partition_density(&g, &Partition::single(3, 2)),
            Err(Error::PartitionGraphMismatch { .. })
        ));
    }

    #[test]
    fn report_serialization() {
        let g = biclique(2, 2).unwrap();
        let r = partition_density(&g, &Partition::single(2, 2)).unwrap();
        assert_eq!(
            r.to_key_value(),
            "partition_density\t1\nweighted\tfalse\nedge_total\t4\ncommunities\t1\nbarber_modularity\t0\n"
        );
        assert_eq!(
            r.to_table(),
            "#label\tinternal\tu_size\tv_size\tdensity\n0\t4\t2\t2\t1\n"
        );
    }
}

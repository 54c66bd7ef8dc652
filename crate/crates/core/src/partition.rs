use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::graph::{BipartiteGraph, Side};

/// Community membership for every node of a bipartite graph.
///
/// Each node holds a non-empty, sorted set of labels; a node with more than
/// one label is an overlapping node. Labels are always compacted to
/// `0..community_count`, numbered by first appearance scanning U then V.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    u_membership: Vec<Vec<usize>>,
    v_membership: Vec<Vec<usize>>,
    community_count: usize,
}

/// The node sets `(U_c, V_c)` of one community.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct Community {
    pub u: Vec<usize>,
    pub v: Vec<usize>,
}

impl Partition {
    /// A hard partition from one label per node. Labels may be arbitrary.
    pub fn hard(u_labels: &[usize], v_labels: &[usize]) -> Partition {
        let u = u_labels.iter().map(|&l| vec![l]).collect();
        let v = v_labels.iter().map(|&l| vec![l]).collect();
        Self::compact(u, v)
    }

    /// A possibly overlapping partition. Every node needs at least one label.
    pub fn from_memberships(u: Vec<Vec<usize>>, v: Vec<Vec<usize>>) -> Result<Partition> {
        for (side, sets) in [(Side::U, &u), (Side::V, &v)] {
            if let Some(index) = sets.iter().position(|s| s.is_empty()) {
                return Err(Error::EmptyMembership { side, index });
            }
        }
        Ok(Self::compact(u, v))
    }

    /// Everything in one community.
    pub fn single(p: usize, q: usize) -> Partition {
        Self::hard(&vec![0; p], &vec![0; q])
    }

    fn compact(u: Vec<Vec<usize>>, v: Vec<Vec<usize>>) -> Partition {
        let mut map: HashMap<usize, usize> = HashMap::new();
        let mut relabel = |sets: Vec<Vec<usize>>| -> Vec<Vec<usize>> {
            sets.into_iter()
                .map(|mut set| {
                    set.sort_unstable();
                    set.dedup();
                    let mut out: Vec<usize> = set
                        .into_iter()
                        .map(|l| {
                            let next = map.len();
                            *map.entry(l).or_insert(next)
                        })
                        .collect();
                    out.sort_unstable();
                    out
                })
                .collect()
        };
        let u_membership = relabel(u);
        let v_membership = relabel(v);
        Partition {
            u_membership,
            v_membership,
            community_count: map.len(),
        }
    }

    pub fn p(&self) -> usize {
        self.u_membership.len()
    }

    pub fn q(&self) -> usize {
        self.v_membership.len()
    }

    /// `K`, the number of communities.
    pub fn community_count(&self) -> usize {
        self.community_count
    }

    pub fn memberships(&self, side: Side, index: usize) -> &[usize] {
        match side {
            Side::U => &self.u_membership[index],
            Side::V => &self.v_membership[index],
        }
    }

    pub fn side_memberships(&self, side: Side) -> &[Vec<usize>] {
        match side {
            Side::U => &self.u_membership,
            Side::V => &self.v_membership,
        }
    }

    pub fn contains(&self, side: Side, index: usize, label: usize) -> bool {
        self.memberships(side, index).binary_search(&label).is_ok()
    }

    /// True when every node has exactly one label.
    pub fn is_hard(&self) -> bool {
        self.u_membership.iter().chain(&self.v_membership).all(|s| s.len() == 1)
    }

    /// Smallest label of each node on a side. For hard partitions this is
    /// the node's only label.
    pub fn primary_labels(&self, side: Side) -> Vec<usize> {
        self.side_memberships(side).iter().map(|s| s[0]).collect()
    }

    /// Communities indexed by label.
    pub fn communities(&self) -> Vec<Community> {
        let mut out = vec![Community::default(); self.community_count];
        for (i, set) in self.u_membership.iter().enumerate() {
            for &c in set {
                out[c].u.push(i);
            }
        }
        for (j, set) in self.v_membership.iter().enumerate() {
            for &c in set {
                out[c].v.push(j);
            }
        }
        out
    }

    /// Communities in a label-independent order, for comparing groupings.
    pub fn canonical_communities(&self) -> Vec<Community> {
        let mut cs = self.communities();
        cs.sort();
        cs
    }

    /// Nodes that belong to more than one community.
    pub fn overlapping_nodes(&self) -> Vec<(Side, usize)> {
        let u = self
            .u_membership
            .iter()
            .enumerate()
            .filter(|(_, s)| s.len() > 1)
            .map(|(i, _)| (Side::U, i));
        let v = self
            .v_membership
            .iter()
            .enumerate()
            .filter(|(_, s)| s.len() > 1)
            .map(|(j, _)| (Side::V, j));
        u.chain(v).collect()
    }

    /// Copy with `label` added to one node's set. The label must already exist.
    pub fn with_added(&self, side: Side, index: usize, label: usize) -> Result<Partition> {
        if label >= self.community_count {
            return Err(Error::UnknownLabel {
                label,
                count: self.community_count,
            });
        }
        if self.contains(side, index, label) {
            return Err(Error::AlreadyMember { side, index, label });
        }
        let mut out = self.clone();
        let set = match side {
            Side::U => &mut out.u_membership[index],
            Side::V => &mut out.v_membership[index],
        };
        let pos = set.binary_search(&label).unwrap_err();
        set.insert(pos, label);
        Ok(out)
    }

    pub(crate) fn check_against(&self, g: &BipartiteGraph) -> Result<()> {
        if self.p() != g.p() || self.q() != g.q() {
            return Err(Error::PartitionGraphMismatch {
                part_p: self.p(),
                part_q: self.q(),
                graph_p: g.p(),
                graph_q: g.q(),
            });
        }
        Ok(())
    }
}

//! Synthetic benchmark graphs with planted communities.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::BipartiteGraph;
use crate::partition::Partition;

/// A generated graph together with its planted partition.
#[derive(Debug, Clone)]
pub struct Benchmark {
    pub graph: BipartiteGraph,
    pub truth: Partition,
}

/// Ring parameters: `s` bicliques `B(m, n)`, merged `k` at a time.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClosedFormParams {
    pub m: usize,
    pub n: usize,
    pub s: usize,
    pub k: usize,
}

impl ClosedFormParams {
    pub fn new(m: usize, n: usize, s: usize, k: usize) -> Result<Self> {
        let params = ClosedFormParams { m, n, s, k };
        params.validate()?;
        Ok(params)
    }

    /// `m, n ≥ 2`, `s ≥ 4`, `k ≥ 2`, `k | s` and `k < s`.
    pub fn validate(&self) -> Result<()> {
        let &ClosedFormParams { m, n, s, k } = self;
        if m < 2 || n < 2 {
            return Err(Error::InvalidParams(format!("need m, n >= 2, got m={m} n={n}")));
        }
        if s < 4 {
            return Err(Error::InvalidParams(format!("need s >= 4, got {s}")));
        }
        if k < 2 || s % k != 0 || k == s {
            return Err(Error::InvalidParams(format!(
                "k={k} must be a divisor of s={s} with 2 <= k < s"
            )));
        }
        Ok(())
    }
}

/// Complete bipartite graph `B(m, n)`.
pub fn biclique(m: usize, n: usize) -> Result<BipartiteGraph> {
    let edges: Vec<_> = (0..m).flat_map(|i| (0..n).map(move |j| (i, j))).collect();
    BipartiteGraph::from_indexed(m, n, &edges)
}

fn block_edges(edges: &mut Vec<(usize, usize)>, us: &[usize], vs: &[usize]) {
    for &i in us {
        for &j in vs {
            edges.push((i, j));
        }
    }
}

/// `s` copies of `B(m, n)` in a ring. Biclique `c` owns U nodes
/// `c·m .. (c+1)·m` and V nodes `c·n .. (c+1)·n`; a single bridge joins the
/// first U node of biclique `c` to the first V node of biclique `c+1 mod s`.
pub fn ring_of_bicliques(m: usize, n: usize, s: usize) -> Result<Benchmark> {
    if m < 2 || n < 2 || s < 3 {
        return Err(Error::InvalidParams(format!(
            "ring needs m, n >= 2 and s >= 3, got m={m} n={n} s={s}"
        )));
    }
    let mut edges = Vec::with_capacity((m * n + 1) * s);
    for c in 0..s {
        let us: Vec<_> = (c * m..(c + 1) * m).collect();
        let vs: Vec<_> = (c * n..(c + 1) * n).collect();
        block_edges(&mut edges, &us, &vs);
    }
    for c in 0..s {
        edges.push((c * m, ((c + 1) % s) * n));
    }
    let graph = BipartiteGraph::from_indexed(m * s, n * s, &edges)?;
    let u: Vec<_> = (0..m * s).map(|i| i / m).collect();
    let v: Vec<_> = (0..n * s).map(|j| j / n).collect();
    Ok(Benchmark {
        graph,
        truth: Partition::hard(&u, &v),
    })
}

/// Two `B(n, n)` and two `B(m, m)` joined into an open chain
/// `B(n,n) – B(n,n) – B(m,m) – B(m,m)` by three single edges, each from the
/// first U node of one biclique to the first V node of the next.
pub fn four_biclique_network(m: usize, n: usize) -> Result<Benchmark> {
    if m < 2 || m > n {
        return Err(Error::InvalidParams(format!(
            "four-biclique network needs 2 <= m <= n, got m={m} n={n}"
        )));
    }
    let sizes = [n, n, m, m];
    let mut offsets = vec![0];
    for s in sizes {
        offsets.push(offsets.last().unwrap() + s);
    }
    let total = offsets[4];
    let mut edges = Vec::new();
    for (c, _) in sizes.iter().enumerate() {
        let nodes: Vec<_> = (offsets[c]..offsets[c + 1]).collect();
        block_edges(&mut edges, &nodes, &nodes);
    }
    for c in 0..3 {
        edges.push((offsets[c], offsets[c + 1]));
    }
    let graph = BipartiteGraph::from_indexed(total, total, &edges)?;
    let labels: Vec<_> = (0..total)
        .map(|x| offsets.iter().rposition(|&o| o <= x).unwrap())
        .collect();
    Ok(Benchmark {
        graph,
        truth: Partition::hard(&labels, &labels),
    })
}

/// A chain of bicliques `B(s_i, t_i)` where consecutive bicliques share one
/// node. Shared nodes alternate sides: bicliques 0 and 1 share a V node,
/// 1 and 2 a U node, and so on. The planted partition puts each shared node
/// in both of its bicliques.
pub fn chain_of_bicliques(sizes: &[(usize, usize)]) -> Result<Benchmark> {
    if sizes.len() < 2 {
        return Err(Error::InvalidChain(format!(
            "need at least 2 bicliques, got {}",
            sizes.len()
        )));
    }
    if let Some(pos) = sizes.iter().position(|&(s, t)| s == 0 || t == 0) {
        return Err(Error::InvalidChain(format!("biclique {pos} has an empty side")));
    }

    let mut p = 0;
    let mut q = 0;
    let fresh = |counter: &mut usize, len: usize| -> Vec<usize> {
        let out = (*counter..*counter + len).collect();
        *counter += len;
        out
    };
    let mut blocks: Vec<(Vec<usize>, Vec<usize>)> = Vec::with_capacity(sizes.len());
    for (i, &(s, t)) in sizes.iter().enumerate() {
        let block = if i == 0 {
            (fresh(&mut p, s), fresh(&mut q, t))
        } else {
            let (prev_u, prev_v) = &blocks[i - 1];
            if (i - 1) % 2 == 0 {
                let mut vs = vec![*prev_v.last().unwrap()];
                vs.extend(fresh(&mut q, t - 1));
                (fresh(&mut p, s), vs)
            } else {
                let mut us = vec![*prev_u.last().unwrap()];
                us.extend(fresh(&mut p, s - 1));
                (us, fresh(&mut q, t))
            }
        };
        blocks.push(block);
    }

    let mut edges = Vec::new();
    let mut u_sets = vec![Vec::new(); p];
    let mut v_sets = vec![Vec::new(); q];
    for (c, (us, vs)) in blocks.iter().enumerate() {
        block_edges(&mut edges, us, vs);
        for &i in us {
            u_sets[i].push(c);
        }
        for &j in vs {
            v_sets[j].push(c);
        }
    }
    let graph = BipartiteGraph::from_indexed(p, q, &edges)?;
    let truth = Partition::from_memberships(u_sets, v_sets)?;
    Ok(Benchmark { graph, truth })
}

/// Each of the `p·q` possible edges present independently with probability
/// `edge_probability`; deterministic for a given seed.
pub fn random_bipartite(p: usize, q: usize, edge_probability: f64, seed: u64) -> Result<BipartiteGraph> {
    if !(0.0..=1.0).contains(&edge_probability) {
        return Err(Error::InvalidParams(format!(
            "edge probability {edge_probability} outside [0, 1]"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for i in 0..p {
        for j in 0..q {
            if rng.random_bool(edge_probability) {
                edges.push((i, j));
            }
        }
    }
    BipartiteGraph::from_indexed(p, q, &edges)
}

/// A generator invocation written as `name:args`, e.g. `ring:2,2,4`,
/// `biclique:3,4`, `four:2,5`, `chain:3x4,4x5,5x5` or `random:6,6,0.5,1`.
#[derive(Debug, Clone, PartialEq)]
pub enum GeneratorSpec {
    Biclique { m: usize, n: usize },
    Ring { m: usize, n: usize, s: usize },
    FourBiclique { m: usize, n: usize },
    Chain { sizes: Vec<(usize, usize)> },
    Random { p: usize, q: usize, prob: f64, seed: u64 },
}

/// Output of [`GeneratorSpec::build`]; random graphs have no planted truth.
#[derive(Debug, Clone)]
pub struct Generated {
    pub graph: BipartiteGraph,
    pub truth: Option<Partition>,
}

impl GeneratorSpec {
    pub fn build(&self) -> Result<Generated> {
        let planted = |b: Benchmark| Generated {
            graph: b.graph,
            truth: Some(b.truth),
        };
        Ok(match self {
            GeneratorSpec::Biclique { m, n } => Generated {
                graph: biclique(*m, *n)?,
                truth: Some(Partition::single(*m, *n)),
            },
            GeneratorSpec::Ring { m, n, s } => planted(ring_of_bicliques(*m, *n, *s)?),
            GeneratorSpec::FourBiclique { m, n } => planted(four_biclique_network(*m, *n)?),
            GeneratorSpec::Chain { sizes } => planted(chain_of_bicliques(sizes)?),
            GeneratorSpec::Random { p, q, prob, seed } => Generated {
                graph: random_bipartite(*p, *q, *prob, *seed)?,
                truth: None,
            },
        })
    }
}

fn bad_spec(spec: &str, why: &str) -> Error {
    Error::InvalidParams(format!("generator spec {spec:?}: {why}"))
}

fn numbers<T: FromStr>(spec: &str, args: &str, want: usize) -> Result<Vec<T>> {
    let parts: Vec<&str> = args.split(',').map(str::trim).collect();
    if parts.len() != want {
        return Err(bad_spec(spec, &format!("expected {want} arguments")));
    }
    parts
        .iter()
        .map(|s| s.parse::<T>().map_err(|_| bad_spec(spec, &format!("bad number {s:?}"))))
        .collect()
}

impl FromStr for GeneratorSpec {
    type Err = Error;

    fn from_str(spec: &str) -> Result<Self> {
        let (name, args) = spec
            .split_once(':')
            .ok_or_else(|| bad_spec(spec, "expected name:args"))?;
        match name {
            "biclique" => {
                let v = numbers::<usize>(spec, args, 2)?;
                Ok(GeneratorSpec::Biclique { m: v[0], n: v[1] })
            }
            "ring" => {
                let v = numbers::<usize>(spec, args, 3)?;
                Ok(GeneratorSpec::Ring {
                    m: v[0],
                    n: v[1],
                    s: v[2],
                })
            }
            "four" | "four-biclique" => {
                let v = numbers::<usize>(spec, args, 2)?;
                Ok(GeneratorSpec::FourBiclique { m: v[0], n: v[1] })
            }
            "chain" => {
                let sizes = args
                    .split(',')
                    .map(|pair| {
                        let (s, t) = pair
                            .trim()
                            .split_once('x')
                            .ok_or_else(|| bad_spec(spec, "chain sizes look like 3x4"))?;
                        let parse = |x: &str| {
                            x.parse::<usize>()
                                .map_err(|_| bad_spec(spec, &format!("bad number {x:?}")))
                        };
                        Ok((parse(s)?, parse(t)?))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(GeneratorSpec::Chain { sizes })
            }
            "random" => {
                let parts: Vec<&str> = args.split(',').map(str::trim).collect();
                if parts.len() != 4 {
                    return Err(bad_spec(spec, "expected p,q,prob,seed"));
                }
                let p = numbers::<usize>(spec, &parts[..2].join(","), 2)?;
                let prob = parts[2].parse::<f64>().map_err(|_| bad_spec(spec, "bad probability"))?;
                let seed = parts[3].parse::<u64>().map_err(|_| bad_spec(spec, "bad seed"))?;
                Ok(GeneratorSpec::Random {
                    p: p[0],
                    q: p[1],
                    prob,
                    seed,
                })
            }
            _ => Err(bad_spec(spec, "unknown generator")),
        }
    }
}

impl fmt::Display for GeneratorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeneratorSpec::Biclique { m, n } => write!(f, "biclique:{m},{n}"),
            GeneratorSpec::Ring { m, n, s } => write!(f, "ring:{m},{n},{s}"),
            GeneratorSpec::FourBiclique { m, n } => write!(f, "four:{m},{n}"),
            GeneratorSpec::Chain { sizes } => {
                let parts: Vec<String> = sizes.iter().map(|(s, t)| format!("{s}x{t}")).collect();
                write!(f, "chain:{}", parts.join(","))
            }
            GeneratorSpec::Random { p, q, prob, seed } => write!(f, "random:{p},{q},{prob},{seed}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Side;
    use crate::quality::partition_density;

    #[test]
    fn biclique_counts() {
        let g = biclique(2, 3).unwrap();
        assert_eq!((g.p() + g.q(), g.edge_count()), (5, 6));
        assert_eq!(biclique(1, 1).unwrap().edge_count(), 1);
        assert_eq!(biclique(4, 5).unwrap().density(), 1.0);
    }

    #[test]
    fn ring_counts_follow_formula() {
        for (m, n, s) in [(2, 2, 4), (3, 4, 5), (5, 2, 7)] {
            let ring = ring_of_bicliques(m, n, s).unwrap();
            assert_eq!(ring.graph.p() + ring.graph.q(), (m + n) * s);
            assert_eq!(ring.graph.edge_count(), (m * n + 1) * s);
            assert_eq!(ring.truth.community_count(), s);
        }
        assert!(ring_of_bicliques(1, 2, 4).is_err());
    }

    #[test]
    fn ring_bridge_node_has_three_neighbors() {
        let ring = ring_of_bicliques(2, 2, 4).unwrap();
        assert_eq!(ring.graph.neighbors(Side::U, 0).unwrap(), vec![0, 1, 2]);
        assert_eq!(ring.graph.neighbors(Side::U, 1).unwrap(), vec![0, 1]);
    }

    #[test]
    fn four_biclique_counts() {
        assert_eq!(four_biclique_network(2, 5).unwrap().graph.edge_count(), 61);
        assert_eq!(four_biclique_network(2, 2).unwrap().graph.edge_count(), 19);
        let b = four_biclique_network(2, 5).unwrap();
        let d = partition_density(&b.graph, &b.truth).unwrap().partition_density;
        assert!((d - 58.0 / 61.0).abs() < 1e-12);
        assert!(four_biclique_network(3, 2).is_err());
    }

    #[test]
    fn chain_counts_and_truth() {
        let sizes = [(3, 4), (4, 5), (5, 5), (4, 3), (6, 5)];
        let chain = chain_of_bicliques(&sizes).unwrap();
        assert_eq!(chain.graph.p() + chain.graph.q(), 40);
        assert_eq!(chain.graph.edge_count(), 99);
        assert_eq!(chain.truth.overlapping_nodes().len(), 4);
        let d = partition_density(&chain.graph, &chain.truth).unwrap().partition_density;
        assert_eq!(d, 1.0);

        let small = chain_of_bicliques(&[(2, 2), (2, 2)]).unwrap();
        assert_eq!(small.graph.p() + small.graph.q(), 7);
        assert_eq!(small.graph.edge_count(), 8);
        let d = partition_density(&small.graph, &small.truth).unwrap().partition_density;
        assert_eq!(d, 1.0);

        assert!(matches!(chain_of_bicliques(&[(2, 2)]), Err(Error::InvalidChain(_))));
        assert!(matches!(
            chain_of_bicliques(&[(2, 2), (0, 3)]),
            Err(Error::InvalidChain(_))
        ));
    }

    #[test]
    fn random_extremes_and_determinism() {
        assert_eq!(random_bipartite(4, 5, 1.0, 3).unwrap().edge_count(), 20);
        assert_eq!(random_bipartite(4, 5, 0.0, 3).unwrap().edge_count(), 0);
        let a = random_bipartite(5, 5, 0.5, 1).unwrap();
        let b = random_bipartite(5, 5, 0.5, 1).unwrap();
        assert_eq!(a.edges(), b.edges());
        assert!(random_bipartite(2, 2, 1.5, 0).is_err());
    }

    #[test]
    fn closed_form_params_validation() {
        assert!(ClosedFormParams::new(2, 2, 12, 2).is_ok());
        assert!(ClosedFormParams::new(2, 2, 12, 5).is_err());
        assert!(ClosedFormParams::new(2, 2, 4, 4).is_err());
        assert!(ClosedFormParams::new(1, 2, 4, 2).is_err());
        assert!(ClosedFormParams::new(2, 2, 3, 3).is_err());
    }

    #[test]
    fn spec_parsing_round_trip() {
        for text in [
            "biclique:3,4",
            "ring:2,2,4",
            "four:2,5",
            "chain:3x4,4x5",
            "random:6,5,0.5,7",
        ] {
            let spec: GeneratorSpec = text.parse().unwrap();
            assert_eq!(spec.to_string(), text);
            assert!(spec.build().is_ok());
        }
        assert!("ring:2,2".parse::<GeneratorSpec>().is_err());
        assert!("blob:1".parse::<GeneratorSpec>().is_err());
        assert!("chain:3-4".parse::<GeneratorSpec>().is_err());
    }
}

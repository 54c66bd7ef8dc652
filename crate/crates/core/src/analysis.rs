//! Closed forms for the ring of bicliques and the four-biclique network, and
//! cross-checks of those forms against generated graphs.
//!
//! Forms are computed exactly as rationals; `f64` views are for comparison
//! and output.

use std::fmt::Write as _;

use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::generators::{four_biclique_network, ring_of_bicliques, ClosedFormParams};
use crate::graph::BipartiteGraph;
use crate::par::Execution;
use crate::partition::Partition;
use crate::quality;

pub type Rational = Ratio<i128>;

/// Default agreement tolerance between closed forms and empirical values.
pub const DEFAULT_TOLERANCE: f64 = 1e-12;

fn r(n: i128) -> Rational {
    Rational::from_integer(n)
}

pub fn to_f64(x: &Rational) -> f64 {
    *x.numer() as f64 / *x.denom() as f64
}

/// Ring of `s` bicliques `B(m, n)`: modularity and density of the
/// biclique-per-community partition and of merges of consecutive bicliques.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RingForms {
    pub params: ClosedFormParams,
    pub q_s: Rational,
    /// Pairs of bicliques merged.
    pub q_s2: Rational,
    /// Groups of `k` bicliques merged.
    pub q_sk: Rational,
    pub d_s: Rational,
    pub d_sk: Rational,
    /// `Q_s − Q_{s/2} = 1/s − 1/(2(mn+1))`.
    pub q_gap: Rational,
    /// `D_s − D_{s/k}`.
    pub d_gap: Rational,
}

pub fn ring_forms(params: ClosedFormParams) -> Result<RingForms> {
    params.validate()?;
    let (m, n, s, k) = (params.m as i128, params.n as i128, params.s as i128, params.k as i128);
    let mn = m * n;
    let q_merged = |k: i128| Rational::new(k * mn + k - 1, k * (mn + 1)) - Rational::new(k, s);
    let q_s = Rational::new(mn, mn + 1) - Rational::new(1, s);
    let q_s2 = q_merged(2);
    let q_sk = q_merged(k);
    let d_s = Rational::new(mn, mn + 1);
    let d_sk = Rational::new((k * mn + k - 1).pow(2), k.pow(3) * mn * (mn + 1));
    Ok(RingForms {
        params,
        q_gap: Rational::new(1, s) - Rational::new(1, 2 * (mn + 1)),
        d_gap: d_s - d_sk,
        q_s,
        q_s2,
        q_sk,
        d_s,
        d_sk,
    })
}

/// Four-biclique network with bicliques `B(n,n), B(n,n), B(m,m), B(m,m)`;
/// the merged partition joins the two `B(m,m)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FourBicliqueForms {
    pub m: usize,
    pub n: usize,
    pub q_separate: Rational,
    pub q_merge: Rational,
    /// `(−2n² + 2m⁴ + m² − 2) / (2n² + 2m² + 3)²`
    pub q_gap: Rational,
    pub d_separate: Rational,
    pub d_merge: Rational,
    /// `((2m² − 1)² − 2) / (4m²(2n² + 2m² + 3))`
    pub d_gap: Rational,
}

pub fn four_biclique_forms(m: usize, n: usize) -> Result<FourBicliqueForms> {
    if m < 2 || m > n {
        return Err(Error::InvalidParams(format!("need 2 <= m <= n, got m={m} n={n}")));
    }
    let (mi, ni) = (m as i128, n as i128);
    let (m2, n2) = (mi * mi, ni * ni);
    let l = 2 * n2 + 2 * m2 + 3;
    let big_l = r(l);
    let sq = |x: i128| Rational::new(x, l * l);

    // side-degree totals follow the bridge layout of the generator: bridges
    // leave from U of bicliques 0..3 and land on V of bicliques 1..4
    let q_separate = Rational::new(2 * n2 + 2 * m2, l)
        - sq((n2 + 1) * n2)
        - sq((n2 + 1) * (n2 + 1))
        - sq((m2 + 1) * (m2 + 1))
        - sq(m2 * (m2 + 1));
    let q_merge = Rational::new(2 * n2, l) - sq((n2 + 1) * n2) - sq((n2 + 1) * (n2 + 1)) + Rational::new(2 * m2 + 1, l)
        - sq((2 * m2 + 1) * (2 * m2 + 2));
    let d_separate = Rational::new(2 * n2 + 2 * m2, l);
    let d_merge = (r(2 * n2) + Rational::new((2 * m2 + 1).pow(2), 4 * m2)) / big_l;
    Ok(FourBicliqueForms {
        m,
        n,
        q_gap: Rational::new(-2 * n2 + 2 * m2 * m2 + m2 - 2, l * l),
        d_gap: Rational::new((2 * m2 - 1).pow(2) - 2, 4 * m2 * l),
        q_separate,
        q_merge,
        d_separate,
        d_merge,
    })
}

/// Ring partition with `k` consecutive bicliques per community.
pub fn ring_merged_partition(m: usize, n: usize, s: usize, k: usize) -> Partition {
    let u: Vec<_> = (0..m * s).map(|i| i / m / k).collect();
    let v: Vec<_> = (0..n * s).map(|j| j / n / k).collect();
    Partition::hard(&u, &v)
}

/// Four-biclique partition with the two small bicliques merged.
pub fn four_biclique_merged_partition(m: usize, n: usize) -> Partition {
    let labels: Vec<_> = (0..2 * n + 2 * m).map(|x| (x / n).min(2)).collect();
    Partition::hard(&labels, &labels)
}

/// One closed-form value next to its measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub quantity: &'static str,
    pub closed: f64,
    pub empirical: f64,
}

impl Comparison {
    pub fn diff(&self) -> f64 {
        (self.closed - self.empirical).abs()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrossCheck {
    pub comparisons: Vec<Comparison>,
}

impl CrossCheck {
    pub fn max_diff(&self) -> f64 {
        self.comparisons.iter().map(Comparison::diff).fold(0.0, f64::max)
    }

    pub fn get(&self, quantity: &str) -> Option<&Comparison> {
        self.comparisons.iter().find(|c| c.quantity == quantity)
    }

    fn verify(self, tolerance: f64) -> Result<Self> {
        for c in &self.comparisons {
            if c.diff().is_nan() || c.diff() > tolerance {
                return Err(Error::MismatchBeyondTolerance {
                    quantity: c.quantity.to_string(),
                    closed: c.closed,
                    empirical: c.empirical,
                    diff: c.diff(),
                    tolerance,
                });
            }
        }
        Ok(self)
    }
}

fn measure(g: &BipartiteGraph, part: &Partition) -> Result<(f64, f64)> {
    Ok((quality::density(g, part)?, quality::barber_modularity(g, part)?))
}

fn ring_comparisons(forms: &RingForms) -> Result<Vec<Comparison>> {
    let ClosedFormParams { m, n, s, k } = forms.params;
    let ring = ring_of_bicliques(m, n, s)?;
    let (d_s, q_s) = measure(&ring.graph, &ring.truth)?;
    let (d_sk, q_sk) = measure(&ring.graph, &ring_merged_partition(m, n, s, k))?;
    let mut out = vec![
        Comparison {
            quantity: "q_s",
            closed: to_f64(&forms.q_s),
            empirical: q_s,
        },
        Comparison {
            quantity: "q_sk",
            closed: to_f64(&forms.q_sk),
            empirical: q_sk,
        },
        Comparison {
            quantity: "d_s",
            closed: to_f64(&forms.d_s),
            empirical: d_s,
        },
        Comparison {
            quantity: "d_sk",
            closed: to_f64(&forms.d_sk),
            empirical: d_sk,
        },
        Comparison {
            quantity: "d_gap",
            closed: to_f64(&forms.d_gap),
            empirical: d_s - d_sk,
        },
    ];
    if s % 2 == 0 {
        let (_, q_s2) = measure(&ring.graph, &ring_merged_partition(m, n, s, 2))?;
        out.push(Comparison {
            quantity: "q_s2",
            closed: to_f64(&forms.q_s2),
            empirical: q_s2,
        });
        out.push(Comparison {
            quantity: "q_gap",
            closed: to_f64(&forms.q_gap),
            empirical: q_s - q_s2,
        });
    }
    Ok(out)
}

/// Generates the ring and checks every form against `quality`.
pub fn cross_check(params: ClosedFormParams, tolerance: f64) -> Result<CrossCheck> {
    let forms = ring_forms(params)?;
    CrossCheck {
        comparisons: ring_comparisons(&forms)?,
    }
    .verify(tolerance)
}

pub fn cross_check_four_biclique(m: usize, n: usize, tolerance: f64) -> Result<CrossCheck> {
    let forms = four_biclique_forms(m, n)?;
    let net = four_biclique_network(m, n)?;
    let (d_sep, q_sep) = measure(&net.graph, &net.truth)?;
    let (d_merge, q_merge) = measure(&net.graph, &four_biclique_merged_partition(m, n))?;
    let f = to_f64;
    CrossCheck {
        comparisons: vec![
            Comparison {
                quantity: "q_separate",
                closed: f(&forms.q_separate),
                empirical: q_sep,
            },
            Comparison {
                quantity: "q_merge",
                closed: f(&forms.q_merge),
                empirical: q_merge,
            },
            Comparison {
                quantity: "q_gap",
                closed: f(&forms.q_gap),
                empirical: q_sep - q_merge,
            },
            Comparison {
                quantity: "d_separate",
                closed: f(&forms.d_separate),
                empirical: d_sep,
            },
            Comparison {
                quantity: "d_merge",
                closed: f(&forms.d_merge),
                empirical: d_merge,
            },
            Comparison {
                quantity: "d_gap",
                closed: f(&forms.d_gap),
                empirical: d_sep - d_merge,
            },
        ],
    }
    .verify(tolerance)
}

/// Parameter grid for [`sweep`]. Every `k` with `2 ≤ k < s`, `k | s` is used.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepGrid {
    pub m: Vec<usize>,
    pub n: Vec<usize>,
    pub s: Vec<usize>,
}

impl Default for SweepGrid {
    fn default() -> Self {
        SweepGrid {
            m: (2..=5).collect(),
            n: (2..=5).collect(),
            s: (4..=40).collect(),
        }
    }
}

impl SweepGrid {
    pub fn params(&self) -> Vec<ClosedFormParams> {
        let mut out = Vec::new();
        for &m in &self.m {
            for &n in &self.n {
                for &s in &self.s {
                    for k in (2..s).filter(|k| s % k == 0) {
                        out.push(ClosedFormParams { m, n, s, k });
                    }
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub forms: RingForms,
    pub check: CrossCheck,
}

/// Closed forms and measurements over the grid, in grid order. Fails on the
/// first row (in grid order) that disagrees beyond `tolerance`.
pub fn sweep(grid: &SweepGrid, tolerance: f64, execution: Execution) -> Result<Vec<SweepRow>> {
    let params = grid.params();
    let rows = execution.map_slice(&params, |&p| -> Result<SweepRow> {
        let forms = ring_forms(p)?;
        let check = CrossCheck {
            comparisons: ring_comparisons(&forms)?,
        };
        Ok(SweepRow { forms, check })
    });
    rows.into_iter()
        .map(|row| {
            let row = row?;
            let check = row.check.verify(tolerance)?;
            Ok(SweepRow {
                forms: row.forms,
                check,
            })
        })
        .collect()
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(|v| format!("{v:.15}")).unwrap_or_default()
}

pub const SWEEP_CSV_HEADER: &str =
    "m,n,s,k,q_s,q_s2,q_sk,d_s,d_sk,q_gap,d_gap,emp_q_s,emp_q_s2,emp_q_sk,emp_d_s,emp_d_sk,max_abs_diff";

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(SWEEP_CSV_HEADER);
    out.push('\n');
    for row in rows {
        let f = &row.forms;
        let ClosedFormParams { m, n, s, k } = f.params;
        let emp = |q: &str| row.check.get(q).map(|c| c.empirical);
        let even = s % 2 == 0;
        let _ = writeln!(
            out,
            "{m},{n},{s},{k},{:.15},{:.15},{:.15},{:.15},{:.15},{:.15},{:.15},{},{},{},{},{},{:e}",
            to_f64(&f.q_s),
            to_f64(&f.q_s2),
            to_f64(&f.q_sk),
            to_f64(&f.d_s),
            to_f64(&f.d_sk),
            to_f64(&f.q_gap),
            to_f64(&f.d_gap),
            fmt_opt(emp("q_s")),
            fmt_opt(if even { emp("q_s2") } else { None }),
            fmt_opt(emp("q_sk")),
            fmt_opt(emp("d_s")),
            fmt_opt(emp("d_sk")),
            row.check.max_diff(),
        );
    }
    out
}

pub const FOUR_CSV_HEADER: &str = "m,n,q_separate,q_merge,q_gap,d_separate,d_merge,d_gap,max_abs_diff";

pub fn four_biclique_csv_row(forms: &FourBicliqueForms, check: &CrossCheck) -> String {
    format!(
        "{},{},{:.15},{:.15},{:.15},{:.15},{:.15},{:.15},{:e}",
        forms.m,
        forms.n,
        to_f64(&forms.q_separate),
        to_f64(&forms.q_merge),
        to_f64(&forms.q_gap),
        to_f64(&forms.d_separate),
        to_f64(&forms.d_merge),
        to_f64(&forms.d_gap),
        check.max_diff(),
    )
}

//! The weight spectral sequence `E1` page of a product fiber: summands,
//! Tate twists, weights, purity and Euler-characteristic bookkeeping.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::combinat::sign;
use crate::loc;
use crate::nearby::semistable_monodromy_graded;
use crate::report::Record;
use crate::strata::{stratum_count, CohomologyRow, FiberModel, SemistableFiber};

/// Integers `m_ξ`, `t_ξ` shifting every weight by `m_ξ − 2t_ξ`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightOffsets {
    #[serde(default)]
    pub m_xi: i64,
    #[serde(default)]
    pub t_xi: i64,
}

impl WeightOffsets {
    pub fn shift(&self) -> i64 {
        self.m_xi - 2 * self.t_xi
    }
}

/// `H^j(Y^{(a,b)})(−twist)` restricted to one weight row of the table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct E1Summand {
    pub stratum: (usize, usize),
    pub j: i64,
    pub twist: i64,
    pub dim: u64,
    pub weight: i64,
}

/// The `(p, q)`-refined entry at filtration step `k` and total degree `m`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct E1Entry {
    pub k: usize,
    pub m: i64,
    pub p: usize,
    pub q: usize,
    pub summands: Vec<E1Summand>,
}

impl E1Entry {
    pub fn dim(&self) -> u64 {
        self.summands.iter().map(|s| s.dim).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct E1Page {
    /// No cohomology tables: dimensions are stratum counts on a unit table.
    pub symbolic: bool,
    pub entries: Vec<E1Entry>,
}

/// Flat export row.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct E1Row {
    pub k: usize,
    pub m: i64,
    pub p: usize,
    pub q: usize,
    pub a: usize,
    pub b: usize,
    pub j: i64,
    pub twist: i64,
    pub dim: u64,
    pub weight: i64,
}

impl E1Page {
    pub fn rows(&self) -> Vec<E1Row> {
        self.entries
            .iter()
            .flat_map(|e| {
                e.summands.iter().map(move |s| E1Row {
                    k: e.k,
                    m: e.m,
                    p: e.p,
                    q: e.q,
                    a: s.stratum.0,
                    b: s.stratum.1,
                    j: s.j,
                    twist: s.twist,
                    dim: s.dim,
                    weight: s.weight,
                })
            })
            .collect()
    }

    pub fn euler(&self) -> i64 {
        self.entries.iter().map(|e| sign(e.m) * e.dim() as i64).sum()
    }
}

/// `j + 2·twist + m_ξ − 2t_ξ` for a table row of weight `w` (`w = j` when pure).
pub fn weight_of(w: i64, twist: i64, offsets: WeightOffsets) -> i64 {
    w + 2 * twist + offsets.shift()
}

fn table_of(f: &FiberModel, a: usize, b: usize) -> (Vec<CohomologyRow>, bool) {
    match f.table(a, b) {
        Some(rows) => (rows.to_vec(), false),
        None => {
            let c = stratum_count(f, a, b);
            let rows = if c == 0 { vec![] } else { vec![CohomologyRow { degree: 0, weight: 0, dim: c }] };
            (rows, true)
        }
    }
}

/// Entries `E₁` for fixed `(p, q)`: at step `k`, the strata
/// `(k+i−1, k+p+q−i)` for `i = 1..p+q` contribute `H^{m−2k−p−q+1}` with twist
/// `k+p−1`. Zero-dimensional rows are skipped.
pub fn e1_page(f: &FiberModel, p: usize, q: usize, offsets: WeightOffsets) -> E1Page {
    let n = f.n();
    let mut symbolic = f.cohomology().is_none();
    let mut entries: BTreeMap<(usize, i64), Vec<E1Summand>> = BTreeMap::new();
    if p >= 1 {
        let u = p + q;
        for k in 0..n {
            let twist = (k + p) as i64 - 1;
            for i in 1..=u {
                let (a, b) = (k + i - 1, k + u - i);
                if a >= n || b >= n {
                    continue;
                }
                let (rows, sym) = table_of(f, a, b);
                symbolic |= sym;
                for row in rows.into_iter().filter(|r| r.dim > 0) {
                    let m = row.degree + (2 * k + u) as i64 - 1;
                    entries.entry((k, m)).or_default().push(E1Summand {
                        stratum: (a, b),
                        j: row.degree,
                        twist,
                        dim: row.dim,
                        weight: weight_of(row.weight, twist, offsets),
                    });
                }
            }
        }
    }
    E1Page {
        symbolic,
        entries: entries.into_iter().map(|((k, m), summands)| E1Entry { k, m, p, q, summands }).collect(),
    }
}

/// All refined pages `p ≥ 1, q ≥ 0`, `p + q ≤ 2n − 1`, in `(p, q)` order.
pub fn e1_full(f: &FiberModel, offsets: WeightOffsets) -> E1Page {
    let mut out = E1Page { symbolic: f.cohomology().is_none(), entries: Vec::new() };
    let top = 2 * f.n() - 1;
    for p in 1..=top {
        for q in 0..=top - p {
            out.entries.extend(e1_page(f, p, q, offsets).entries);
        }
    }
    out
}

/// Whether every stratum table is supported in the single degree
/// `dimY − a − b`.
pub fn is_concentrated(f: &FiberModel) -> bool {
    let n = f.n();
    (0..n).all(|a| {
        (0..n).all(|b| {
            let (rows, _) = table_of(f, a, b);
            rows.iter().all(|r| r.dim == 0 || r.degree == f.dim_y() - (a + b) as i64)
        })
    })
}

/// Purity bookkeeping for a concentrated model: every summand sits in
/// total degree `target`, weights are constant on each `(p − q, m)` class
/// and equal `m_ξ − 2t_ξ + target + p − q − 1`.
pub fn purity_report(f: &FiberModel, offsets: WeightOffsets, target: i64) -> Vec<Record> {
    const SUITE: &str = "purity";
    let mut out = Vec::new();
    let base = loc! { "n" => f.n(), "m1" => f.m1(), "m2" => f.m2() };
    let concentrated = is_concentrated(f);
    out.push(Record::new(
        SUITE,
        "concentration_hypothesis",
        base.clone(),
        concentrated,
        if concentrated { "" } else { "stratum cohomology outside degree dimY − a − b" },
    ));
    let page = e1_full(f, offsets);
    let mut classes: BTreeMap<(i64, i64), Vec<i64>> = BTreeMap::new();
    let mut misplaced = 0;
    for e in &page.entries {
        for s in &e.summands {
            if e.m != target {
                misplaced += 1;
                let mut l = base.clone();
                l.extend(loc! { "k" => e.k, "p" => e.p, "q" => e.q, "a" => s.stratum.0, "b" => s.stratum.1, "m" => e.m });
                out.push(Record::new(SUITE, "support_in_target_degree", l, false, format!("mass in degree {}", e.m)));
            }
            classes.entry((e.p as i64 - e.q as i64, e.m)).or_default().push(s.weight);
        }
    }
    if misplaced == 0 {
        let mut l = base.clone();
        l.insert("m".into(), target.into());
        out.push(Record::new(SUITE, "support_in_target_degree", l, true, ""));
    }
    for ((d, m), weights) in classes {
        let mut l = base.clone();
        l.extend(loc! { "p_minus_q" => d, "m" => m });
        let constant = weights.iter().all(|&w| w == weights[0]);
        out.push(Record::new(SUITE, "weight_constant_on_class", l.clone(), constant, format!("{weights:?}")));
        let want = offsets.shift() + m + d - 1;
        out.push(Record::compare(SUITE, "weight_value", l, weights[0], want));
    }
    out
}

/// Euler characteristic of the whole page computed two ways: by summing the
/// assembled page, and stratum by stratum counting how often each
/// `H^j(Y^{(a,b)})` appears (`a + b − 2k + 1` splits for each `k ≤ min(a,b)`).
pub fn euler_check(f: &FiberModel, offsets: WeightOffsets) -> (i64, i64) {
    let page = e1_full(f, offsets).euler();
    let n = f.n();
    let mut strata = 0i64;
    for a in 0..n {
        for b in 0..n {
            let (rows, _) = table_of(f, a, b);
            let appearances: i64 = (0..=a.min(b)).map(|k| (a + b - 2 * k + 1) as i64).sum();
            for r in rows {
                strata += sign(r.degree + (a + b) as i64) * r.dim as i64 * appearances;
            }
        }
    }
    (page, strata)
}

/// Entry of the single-factor page: `H^j(Y^{(l)})(−twist)` in `Gr_r`, total
/// degree `m = j + l`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SemistableEntry {
    pub r: i64,
    pub m: i64,
    pub stratum: usize,
    pub j: i64,
    pub twist: i64,
    pub dim: u64,
    pub weight: i64,
}

/// Page built from the single-factor graded pieces `a_{k+l}(−l)[−(k+l)]`.
pub fn semistable_e1_page(f: &SemistableFiber, offsets: WeightOffsets) -> Vec<SemistableEntry> {
    let n = f.n as i64;
    let mut out = Vec::new();
    for r in -(n - 1)..=n - 1 {
        for t in semistable_monodromy_graded(r, f.n) {
            let rows = match f.table(t.l1) {
                Some(rows) => rows.to_vec(),
                None => vec![CohomologyRow { degree: 0, weight: 0, dim: f.stratum_count(t.l1) }],
            };
            for row in rows.into_iter().filter(|x| x.dim > 0) {
                out.push(SemistableEntry {
                    r,
                    m: row.degree + t.degree,
                    stratum: t.l1,
                    j: row.degree,
                    twist: t.twist,
                    dim: row.dim,
                    weight: weight_of(row.weight, t.twist, offsets),
                });
            }
        }
    }
    out.sort_by_key(|e| (e.r, e.m, e.stratum, e.j, e.weight));
    out
}

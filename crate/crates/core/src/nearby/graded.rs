use std::collections::BTreeMap;

use super::SheafTerm;

fn in_range(t: &SheafTerm, n1: usize, n2: usize) -> bool {
    t.l1 < n1 && t.l2.is_none_or(|l2| l2 < n2)
}

/// The `(k+1)`-st graded piece of `ker N^j` for the filtration by
/// truncations: `⊕_{i=1}^{j} a_{k+i−1, k+j−i}(−(k+j−1))[−(2k+j−1)]`.
pub fn graded_ker_quotient(j: usize, k: usize, n1: usize, n2: usize) -> Vec<SheafTerm> {
    if j == 0 {
        return Vec::new();
    }
    (1..=j)
        .map(|i| SheafTerm::product(k + i - 1, k + j - i, (k + j) as i64 - 1, (2 * k + j) as i64 - 1, vec![0]))
        .filter(|t| in_range(t, n1, n2))
        .collect()
}

/// Terms of `Gr^q Gr_p` per truncation step `k`: the `p+q` summands
/// `a_{k+i−1, k+p+q−i}` with twist `k+p−1` in degree `2k+p+q−1`. Steps with
/// no surviving summand are omitted; `p = 0` gives nothing.
pub fn monodromy_graded_terms(p: usize, q: usize, n1: usize, n2: usize) -> BTreeMap<usize, Vec<SheafTerm>> {
    let mut out = BTreeMap::new();
    if p == 0 {
        return out;
    }
    let u = p + q;
    for k in 0..n1.max(n2) {
        let terms: Vec<SheafTerm> = (1..=u)
            .map(|i| SheafTerm::product(k + i - 1, k + u - i, (k + p) as i64 - 1, (2 * k + u) as i64 - 1, vec![0]))
            .filter(|t| in_range(t, n1, n2))
            .collect();
        if !terms.is_empty() {
            out.insert(k, terms);
        }
    }
    out
}

/// Single-factor `Gr_r^M`: `a_{k+l}(−l)[−(k+l)]` over `l − k = r`, `k+l ≤ n−1`.
pub fn semistable_monodromy_graded(r: i64, n: usize) -> Vec<SheafTerm> {
    let mut out = Vec::new();
    for k in 0..n as i64 {
        let l = k + r;
        if l < 0 || k + l > n as i64 - 1 {
            continue;
        }
        out.push(SheafTerm::single((k + l) as usize, l, k + l));
    }
    out
}

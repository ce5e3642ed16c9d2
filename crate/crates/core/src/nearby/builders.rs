use std::collections::BTreeMap;

use super::{index_window, Factor, FormalEntry, MapEntry, SheafComplex, SheafMap, SheafTerm};
use crate::combinat::sign;

/// Product complex over blocks `(l1, l2)` in degrees `lo..=hi`, degree
/// `l1 + l2`. `labels` returns the copy labels of a block, or `None` when
/// the block is absent. Differentials match copies by label and are
/// `∧δ₁ + (−1)^{l1} ∧δ₂`.
fn product_complex(
    n1: usize,
    n2: usize,
    lo: i64,
    hi: i64,
    twist: i64,
    labels: impl Fn(usize, usize) -> Option<Vec<i64>>,
) -> SheafComplex {
    if lo > hi {
        return SheafComplex::empty();
    }
    let mut terms: Vec<Vec<SheafTerm>> = Vec::new();
    for d in lo..=hi {
        let mut row = Vec::new();
        for l1 in 0..n1 {
            let l2 = d - l1 as i64;
            if l2 < 0 || l2 >= n2 as i64 {
                continue;
            }
            if let Some(copies) = labels(l1, l2 as usize) {
                row.push(SheafTerm::product(l1, l2 as usize, twist, d, copies));
            }
        }
        terms.push(row);
    }
    let mut diffs = Vec::new();
    for i in 0..terms.len().saturating_sub(1) {
        let mut entries = Vec::new();
        for (s, src) in terms[i].iter().enumerate() {
            let (l1, l2) = (src.l1, src.l2.expect("product term"));
            let moves = [(l1 + 1, l2, Factor::First, 1), (l1, l2 + 1, Factor::Second, sign(l1 as i64))];
            for (t1, t2, factor, coeff) in moves {
                let Some(t) = terms[i + 1].iter().position(|x| x.block() == (t1, Some(t2))) else {
                    continue;
                };
                for (sc, &label) in src.copy_labels.iter().enumerate() {
                    if let Some(tc) = terms[i + 1][t].copy_position(label) {
                        entries.push(FormalEntry { src: s, src_copy: sc, dst: t, dst_copy: tc, coeff, factor });
                    }
                }
            }
        }
        diffs.push(entries);
    }
    SheafComplex::from_parts(lo, terms, diffs)
}

/// `[a_k → a_{k+1} → ⋯ → a_{n−1}]` with `a_l` in degree `l`, representing
/// `R^kψΛ[−k]` on one strictly semistable factor.
pub fn build_semistable_resolution(k: usize, n: usize) -> SheafComplex {
    if k >= n {
        return SheafComplex::empty();
    }
    let terms: Vec<Vec<SheafTerm>> = (k..n)
        .map(|l| {
            let mut t = SheafTerm::single(l, k as i64, l as i64);
            t.copy_labels = vec![k as i64];
            vec![t]
        })
        .collect();
    let diffs = (k..n - 1)
        .map(|_| vec![FormalEntry { src: 0, src_copy: 0, dst: 0, dst_copy: 0, coeff: 1, factor: Factor::First }])
        .collect();
    SheafComplex::from_parts(k as i64, terms, diffs)
}

/// Resolution of `R^lψΛ_{X₁} ⊗ R^{k−l}ψΛ_{X₂}[−k]`: blocks `l1 ≥ l`,
/// `l2 ≥ k − l`, one copy labeled `l`.
pub fn build_product_summand(l: usize, k_minus_l: usize, n1: usize, n2: usize) -> SheafComplex {
    if l >= n1 || k_minus_l >= n2 {
        return SheafComplex::empty();
    }
    let k = (l + k_minus_l) as i64;
    product_complex(n1, n2, k, (n1 + n2 - 2) as i64, k, |l1, l2| {
        (l1 >= l && l2 >= k_minus_l).then(|| vec![l as i64])
    })
}

/// `L_k`: degree `d` carries every block with `l1 + l2 = d`, copies labeled
/// by the index window. Empty for `k` outside `[0, n1+n2−2]`.
pub fn build_l(k: i64, n1: usize, n2: usize) -> SheafComplex {
    let top = (n1 + n2) as i64 - 2;
    if k < 0 || k > top {
        return SheafComplex::empty();
    }
    product_complex(n1, n2, k, top, k, |l1, l2| Some(index_window(k, l1 as i64, l2 as i64).labels()))
}

/// `N̄ : L_k → L_{k−1}`, sending copy `l′` to copies `l′−1` and `l′` when
/// they exist in the target window.
pub fn build_nbar(k: i64, n1: usize, n2: usize) -> SheafMap {
    let source = build_l(k, n1, n2);
    let target = build_l(k - 1, n1, n2);
    let mut entries = BTreeMap::new();
    for deg in source.lo()..source.hi_exclusive() {
        let mut list = Vec::new();
        for (s, term) in source.terms(deg).iter().enumerate() {
            let Some(t) = target.term_index(deg, term.block()) else { continue };
            let tterm = &target.terms(deg)[t];
            for (sc, &l) in term.copy_labels.iter().enumerate() {
                for dst in [l - 1, l] {
                    if let Some(tc) = tterm.copy_position(dst) {
                        list.push(MapEntry { src: s, src_copy: sc, dst: t, dst_copy: tc, coeff: 1 });
                    }
                }
            }
        }
        entries.insert(deg, list);
    }
    SheafMap::new(source, target, entries)
}

/// `P_k`: blocks `k ≤ l1, l2` with twist `k`, first term in degree `2k`.
pub fn build_p(k: i64, n1: usize, n2: usize) -> SheafComplex {
    if k < 1 {
        return SheafComplex::empty();
    }
    let top = (n1 + n2) as i64 - 2;
    let k_ = k as usize;
    product_complex(n1, n2, 2 * k, top, k, |l1, l2| (l1 >= k_ && l2 >= k_).then(|| vec![0]))
}

/// `R_k`: blocks `l1, l2 ≤ k−1` with `l1 + l2 ≥ k−1`, twist `k−1`, from
/// degree `k−1` to `2k−2`.
pub fn build_r(k: i64, n1: usize, n2: usize) -> SheafComplex {
    if k < 1 {
        return SheafComplex::empty();
    }
    let top = ((n1 + n2) as i64 - 2).min(2 * k - 2);
    product_complex(n1, n2, k - 1, top, k - 1, |l1, l2| {
        let (l1, l2) = (l1 as i64, l2 as i64);
        (l1 < k && l2 < k && l1 + l2 >= k - 1).then(|| vec![0])
    })
}

/// `f : P_k → L_k`, `x ↦ (x, −x, …, (−1)^k x)` on every block.
pub fn kernel_embedding(k: i64, n1: usize, n2: usize) -> SheafMap {
    let source = build_p(k, n1, n2);
    let target = build_l(k, n1, n2);
    let mut entries = BTreeMap::new();
    for deg in source.lo()..source.hi_exclusive() {
        let mut list = Vec::new();
        for (s, term) in source.terms(deg).iter().enumerate() {
            let t = target.term_index(deg, term.block()).expect("P block lies in L");
            for (tc, &l) in target.terms(deg)[t].copy_labels.iter().enumerate() {
                list.push(MapEntry { src: s, src_copy: 0, dst: t, dst_copy: tc, coeff: sign(l) });
            }
        }
        entries.insert(deg, list);
    }
    SheafMap::new(source, target, entries)
}

/// `L_{k−1} → R_k`, copy `l′` ↦ `(−1)^{l′}` on the blocks of `R_k`. Its
/// kernel is the image of `N̄`, and with this choice of quotient functional
/// the induced differential on `R_k` is the standard one.
pub fn cokernel_projection(k: i64, n1: usize, n2: usize) -> SheafMap {
    let source = build_l(k - 1, n1, n2);
    let target = build_r(k, n1, n2);
    let mut entries = BTreeMap::new();
    for deg in target.lo()..target.hi_exclusive() {
        let mut list = Vec::new();
        for (t, term) in target.terms(deg).iter().enumerate() {
            let s = source.term_index(deg, term.block()).expect("R block lies in L_{k-1}");
            for (sc, &l) in source.terms(deg)[s].copy_labels.iter().enumerate() {
                list.push(MapEntry { src: s, src_copy: sc, dst: t, dst_copy: 0, coeff: sign(l) });
            }
        }
        entries.insert(deg, list);
    }
    SheafMap::new(source, target, entries)
}

/// Domain of [`alternating_power_map`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AltSource {
    /// All of `L_{2k}`.
    Full,
    /// The summand `R^kψΛ_{X₁} ⊗ R^kψΛ_{X₂}` of `L_{2k}` (copy label `k`).
    Summand,
}

/// `Σ_j (−1)^j N̄₁^{k−j} ⊗ N̄₂^j` into `L_k`. `N̄₁` lowers the copy label by
/// one and `N̄₂` keeps it, so copy `l` goes to `l − k + j` when that lies in
/// `[0, k]`.
pub fn alternating_power_map(k: i64, n1: usize, n2: usize, from: AltSource) -> SheafMap {
    let source = match from {
        AltSource::Full => build_l(2 * k, n1, n2),
        AltSource::Summand => build_product_summand(k as usize, k as usize, n1, n2),
    };
    let target = build_l(k, n1, n2);
    let mut entries = BTreeMap::new();
    for deg in source.lo()..source.hi_exclusive() {
        let mut list = Vec::new();
        for (s, term) in source.terms(deg).iter().enumerate() {
            let Some(t) = target.term_index(deg, term.block()) else { continue };
            let tterm = &target.terms(deg)[t];
            for (sc, &l) in term.copy_labels.iter().enumerate() {
                for j in 0..=k {
                    let dst = l - k + j;
                    if !(0..=k).contains(&dst) {
                        continue;
                    }
                    if let Some(tc) = tterm.copy_position(dst) {
                        list.push(MapEntry { src: s, src_copy: sc, dst: t, dst_copy: tc, coeff: sign(j) });
                    }
                }
            }
        }
        entries.insert(deg, list);
    }
    SheafMap::new(source, target, entries)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinat::binom;
    use crate::exactlin::{tensor_total, BasisLabel};
    use crate::strata::StalkPoint;

    fn blocks(c: &SheafComplex) -> Vec<(i64, usize, Option<usize>, usize)> {
        (c.lo()..c.hi_exclusive())
            .flat_map(|d| c.terms(d).iter().filter(|t| t.mult() > 0).map(move |t| (d, t.l1, t.l2, t.mult())))
            .collect()
    }

    #[test]
    fn semistable_resolution_shapes() {
        let c = build_semistable_resolution(3, 4);
        assert_eq!(blocks(&c), vec![(3, 3, None, 1)]);
        let c = build_semistable_resolution(0, 2);
        assert_eq!(blocks(&c), vec![(0, 0, None, 1), (1, 1, None, 1)]);
        assert!(build_semistable_resolution(2, 2).is_empty());
    }

    #[test]
    fn semistable_resolution_is_exact_off_degree_k() {
        for r in 1..=5 {
            for k in 0..5 {
                let c = build_semistable_resolution(k, 5).realize_checked(&StalkPoint::new(r, 1)).unwrap();
                let h = c.homology();
                let want: Vec<(i64, usize)> = match binom(r as u64 - 1, k as u64) {
                    0 => vec![],
                    d => vec![(k as i64, d as usize)],
                };
                assert_eq!(h.support(), want, "r={r} k={k}");
            }
        }
    }

    #[test]
    fn product_summand_shapes() {
        let c = build_product_summand(1, 1, 2, 2);
        assert_eq!(blocks(&c), vec![(2, 1, Some(1), 1)]);
        let c = build_product_summand(0, 0, 2, 2);
        assert_eq!(
            blocks(&c),
            vec![(0, 0, Some(0), 1), (1, 0, Some(1), 1), (1, 1, Some(0), 1), (2, 1, Some(1), 1)]
        );
    }

    #[test]
    fn product_summand_is_the_tensor_of_resolutions() {
        let (r, s) = (3, 2);
        for l in 0..3 {
            for m in 0..3 {
                let direct = build_product_summand(l, m, 3, 3).realize(&StalkPoint::new(r, s)).unwrap();
                let a = build_semistable_resolution(l, 3).realize(&StalkPoint::new(r, 1)).unwrap();
                let b = build_semistable_resolution(m, 3).realize(&StalkPoint::new(s, 1)).unwrap();
                let t = tensor_total(&a, &b);
                assert_eq!(direct.homology().support(), t.homology().support());
                if direct.is_empty() {
                    continue;
                }
                for d in t.degrees() {
                    let relabeled: Vec<BasisLabel> = t
                        .basis(d)
                        .iter()
                        .map(|x| match x {
                            BasisLabel::Tensor(u, v) => match (&**u, &**v) {
                                (
                                    BasisLabel::Stratum { l1, copy, j1, .. },
                                    BasisLabel::Stratum { l1: l2, j1: j2, .. },
                                ) => BasisLabel::Stratum {
                                    l1: *l1,
                                    l2: Some(*l2),
                                    copy: *copy,
                                    j1: j1.clone(),
                                    j2: j2.clone(),
                                },
                                _ => unreachable!(),
                            },
                            _ => unreachable!(),
                        })
                        .collect();
                    assert_eq!(relabeled, direct.basis(d));
                    assert_eq!(t.d(d).into_owned(), direct.d(d).into_owned(), "l={l} m={m} d={d}");
                }
            }
        }
    }

    #[test]
    fn l_shapes() {
        let l1 = build_l(1, 2, 2);
        assert_eq!(blocks(&l1), vec![(1, 0, Some(1), 1), (1, 1, Some(0), 1), (2, 1, Some(1), 2)]);
        let l0 = build_l(0, 2, 2);
        assert_eq!(blocks(&l0), blocks(&build_product_summand(0, 0, 2, 2)));
    }

    #[test]
    fn realized_l1_matches_stalk_rank() {
        let c = build_l(1, 2, 2).realize_checked(&StalkPoint::new(2, 2)).unwrap();
        assert_eq!(c.dim(1), 4);
        assert_eq!(c.dim(2), 2);
        assert_eq!(c.homology().support(), vec![(1, 2)]);
    }

    #[test]
    fn nbar_on_the_one_one_block() {
        let nb = build_nbar(2, 2, 2);
        let m = nb.block_matrix(2, (1, Some(1)));
        assert_eq!(nb.source.terms(2)[0].copy_labels, vec![1]);
        assert_eq!(nb.target.terms(2)[0].copy_labels, vec![0, 1]);
        assert_eq!(m.to_dense(), vec![vec![1.into()], vec![1.into()]]);
        let z = build_nbar(1, 2, 2).block_matrix(0, (0, Some(0)));
        assert_eq!(z.shape(), (1, 0));
    }

    #[test]
    fn nbar_kills_alternating_vectors() {
        for k in 1..4 {
            let nb = build_nbar(k, 4, 4);
            for l1 in k as usize..4 {
                for l2 in k as usize..4 {
                    let deg = (l1 + l2) as i64;
                    let m = nb.block_matrix(deg, (l1, Some(l2)));
                    let alt: Vec<_> = (0..=k).map(|j| (j as usize, crate::exactlin::Scalar::int(sign(j)))).collect();
                    assert!(m.apply(&alt).is_empty(), "k={k} block ({l1},{l2})");
                }
            }
        }
    }

    #[test]
    fn p_and_r_shapes() {
        assert_eq!(blocks(&build_p(1, 2, 2)), vec![(2, 1, Some(1), 1)]);
        assert_eq!(blocks(&build_r(1, 2, 2)), vec![(0, 0, Some(0), 1)]);
        for n in 1..6usize {
            for k in 1..n as i64 {
                assert_eq!(blocks(&build_p(k, n, n)).len(), (n - k as usize).pow(2));
            }
            for k in 1..=n as i64 {
                assert_eq!(blocks(&build_r(k, n, n)).len() as i64, k * (k + 1) / 2);
            }
        }
    }

    #[test]
    fn maps_are_chain_maps() {
        let p = StalkPoint::new(3, 3);
        for k in 1..4 {
            build_nbar(k, 3, 3).realize_checked(&p).unwrap();
            kernel_embedding(k, 3, 3).realize_checked(&p).unwrap();
            cokernel_projection(k, 3, 3).realize_checked(&p).unwrap();
        }
        alternating_power_map(1, 3, 3, AltSource::Full).realize_checked(&p).unwrap();
        alternating_power_map(1, 3, 3, AltSource::Summand).realize_checked(&p).unwrap();
    }

    #[test]
    fn sign_fault_is_localized() {
        let mut nb = build_nbar(2, 3, 3);
        nb.flip_block_sign(1, Some(1));
        match nb.realize_checked(&StalkPoint::new(3, 3)) {
            Err(super::super::NearbyError::NotChainMap { blocks, .. }) => {
                assert!(blocks.iter().any(|&(l1, l2, _)| (l1, l2) == (1, Some(1))), "{blocks:?}")
            }
            other => panic!("unexpected {other:?}"),
        }
        let mut l = build_l(1, 3, 3);
        l.flip_block_sign(1, Some(1));
        assert!(l.realize_checked(&StalkPoint::new(3, 3)).is_err());
    }
}

use super::{build_nbar, build_p, build_r, coefficient, cokernel_projection, kernel_embedding, NearbyError};
use super::{alternating_power_map, AltSource};
use crate::exactlin::{cokernel_homology, image_homology, kernel_homology};
use crate::loc;
use crate::report::{Location, Record};
use crate::strata::Realize;

const SUITE: &str = "kernels";

fn base(k: i64, n1: usize, n2: usize, at: &str) -> Location {
    loc! { "k" => k, "n1" => n1, "n2" => n2, "at" => at }
}

fn with(mut l: Location, extra: Location) -> Location {
    l.extend(extra);
    l
}

/// Checks that `P_k` and `R_k` are the kernel and cokernel of `N̄ : L_k → L_{k−1}`:
/// blockwise exactness of `0 → P → L_k → L_{k−1} → R → 0` on copy
/// matrices, then equality of realized homology dimensions of the kernel
/// and cokernel subcomplexes with those of `P_k` and `R_k`.
pub fn verify_kernel_cokernel(
    k: i64,
    n1: usize,
    n2: usize,
    on: &dyn Realize,
    at: &str,
) -> Result<Vec<Record>, NearbyError> {
    let mut out = Vec::new();
    let nbar = build_nbar(k, n1, n2);
    let f = kernel_embedding(k, n1, n2);
    let q = cokernel_projection(k, n1, n2);
    let b = base(k, n1, n2, at);

    for l1 in 0..n1 {
        for l2 in 0..n2 {
            let deg = (l1 + l2) as i64;
            let block = (l1, Some(l2));
            let fb = f.block_matrix(deg, block);
            let nb = nbar.block_matrix(deg, block);
            let qb = q.block_matrix(deg, block);
            let (ck, ck1) = (coefficient(k, l1 as i64, l2 as i64), coefficient(k - 1, l1 as i64, l2 as i64));
            debug_assert_eq!((nb.rows() as i64, nb.cols() as i64), (ck1, ck));
            let in_p = fb.cols() == 1;
            let in_r = qb.rows() == 1;
            let mut failed = Vec::new();
            if fb.rank() != fb.cols() {
                failed.push("f not injective");
            }
            if !nb.mul(&fb)?.is_zero() {
                failed.push("N̄∘f ≠ 0");
            }
            if nb.rank() as i64 != ck - fb.rank() as i64 {
                failed.push("ker N̄ ≠ im f");
            }
            if !qb.mul(&nb)?.is_zero() {
                failed.push("q∘N̄ ≠ 0");
            }
            if qb.rank() != qb.rows() {
                failed.push("q not surjective");
            }
            if (nb.rank() + qb.rank()) as i64 != ck1 {
                failed.push("im N̄ ≠ ker q");
            }
            if in_p != (ck - ck1 == 1) {
                failed.push("P block ≠ {c^k − c^{k−1} = 1}");
            }
            if in_r != (ck1 - ck == 1) {
                failed.push("R block ≠ {c^{k−1} − c^k = 1}");
            }
            out.push(Record::new(
                SUITE,
                "blockwise_exact",
                with(b.clone(), loc! { "l1" => l1, "l2" => l2 }),
                failed.is_empty(),
                failed.join("; "),
            ));
        }
    }

    let nbar_r = match nbar.realize_checked(on) {
        Ok(m) => m,
        Err(NearbyError::NotChainMap { degree, blocks }) => {
            out.push(Record::new(
                SUITE,
                "nbar_chain_map",
                with(b.clone(), loc! { "degree" => degree, "blocks" => blocks }),
                false,
                "N̄ does not commute with the differentials",
            ));
            return Ok(out);
        }
        Err(e) => return Err(e),
    };
    out.push(Record::new(SUITE, "nbar_chain_map", b.clone(), true, ""));

    let p = build_p(k, n1, n2).realize_checked(on)?.homology();
    let r = build_r(k, n1, n2).realize_checked(on)?.homology();
    let ker = kernel_homology(&nbar_r)?;
    let coker = cokernel_homology(&nbar_r)?;
    out.push(Record::compare(SUITE, "ker_homology_is_P", b.clone(), ker.support(), p.support()));
    out.push(Record::compare(SUITE, "coker_homology_is_R", b.clone(), coker.support(), r.support()));

    let alt = alternating_power_map(k, n1, n2, AltSource::Summand).realize_checked(on)?;
    let alt_img = image_homology(&alt)?;
    out.push(Record::compare(SUITE, "alternating_image_is_P", b.clone(), alt_img.support(), p.support()));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::strata::StalkPoint;

    #[test]
    fn kernel_cokernel_small_stalks() {
        for r in 1..=3 {
            for s in 1..=3 {
                for k in 1..=4 {
                    let recs = verify_kernel_cokernel(k, 3, 3, &StalkPoint::new(r, s), "stalk").unwrap();
                    for rec in &recs {
                        assert!(rec.passed, "{rec:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn full_alternating_map_overshoots_the_kernel() {
        let on = StalkPoint::new(3, 3);
        let p = build_p(1, 3, 3).realize(&on).unwrap().homology();
        let full = alternating_power_map(1, 3, 3, AltSource::Full).realize_checked(&on).unwrap();
        assert_ne!(image_homology(&full).unwrap().support(), p.support());
    }
}

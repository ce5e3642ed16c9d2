//! N̄ : L_k → L_{k−1}, its kernel P_k and cokernel R_k.
use nearcyc::nearby::{build_nbar, build_p, build_r, verify_kernel_cokernel};
use nearcyc::strata::StalkPoint;

fn main() {
    let (k, n1, n2) = (1, 3, 3);
    let at = StalkPoint::new(3, 3);
    let f = build_nbar(k, n1, n2).realize_checked(&at).expect("chain map");
    println!("N̄ realized: {} → {} basis vectors", f.source().total_dim(), f.target().total_dim());
    for (name, c) in [("P", build_p(k, n1, n2)), ("R", build_r(k, n1, n2))] {
        let blocks: Vec<_> = c.nonzero_terms().map(|t| (t.l1, t.l2.unwrap(), t.twist)).collect();
        println!("{name}_{k} blocks (l1, l2, twist): {blocks:?}");
        println!("  homology at (3,3): {:?}", c.realize(&at).unwrap().homology().support());
    }
    for rec in verify_kernel_cokernel(k, n1, n2, &at, "stalk(3,3)").unwrap() {
        if rec.check != "blockwise_exact" {
            println!("{:<24} {}", rec.check, if rec.passed { "ok" } else { "FAILED" });
        }
    }
}

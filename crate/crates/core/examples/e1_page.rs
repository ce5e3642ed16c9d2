//! E1 pages: a concentrated product fiber and a chain of two lines.
use nearcyc::spectral::{e1_full, euler_check, purity_report, semistable_e1_page, WeightOffsets};
use nearcyc::strata::{FiberModel, SemistableFiber};

fn main() {
    let offsets = WeightOffsets::default();
    let f = FiberModel::concentrated(3, 3, 4, 1).unwrap();
    for r in e1_full(&f, offsets).rows() {
        println!("k={} m={} (p,q)=({},{}) Y^({},{}) H^{}(-{}) dim {} weight {}", r.k, r.m, r.p, r.q, r.a, r.b, r.j, r.twist, r.dim, r.weight);
    }
    let pure = purity_report(&f, offsets, 4).iter().all(|r| r.passed);
    println!("pure: {pure}, euler (page, strata): {:?}", euler_check(&f, offsets));

    println!("chain of two lines:");
    for e in semistable_e1_page(&SemistableFiber::chain_of_lines(2), offsets) {
        println!("  Gr_{} H^{} of Y^({}) twist {}: dim {} weight {}", e.r, e.m, e.stratum, e.twist, e.dim, e.weight);
    }
}

//! Realizes L_k at a stalk X_{r,s} and prints its homology.
use nearcyc::nearby::build_l;
use nearcyc::strata::StalkPoint;

fn main() {
    let (r, s) = (3, 3);
    for k in 0..=(r + s - 2) as i64 {
        let c = build_l(k, r, s).realize_checked(&StalkPoint::new(r, s)).expect("d∘d = 0");
        let dims: Vec<usize> = c.degrees().map(|d| c.dim(d)).collect();
        println!("L_{k}: dims {dims:?} from degree {}, homology {:?}", c.lo(), c.homology().support());
    }
}

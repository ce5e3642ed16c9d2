//! Monodromy filtration of a conjugated nilpotent matrix.
use nearcyc::instances::random_nilpotent;
use nearcyc::monodromy::{filtration_defects, gr_q_gr_p, jordan_oracle, monodromy_filtration};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let op = random_nilpotent(&mut rng, &[4, 2, 2, 1]);
    let m = monodromy_filtration(&op);
    println!("defects: {:?}", filtration_defects(&op, &m));
    println!("dim Gr_r: {:?}", m.gr_dims());
    let j = jordan_oracle(&op);
    println!("ranks of N^e: {:?}, blocks {:?}", j.ranks, j.blocks);
    for ((p, q), d) in gr_q_gr_p(&op).into_iter().filter(|&(_, d)| d > 0) {
        println!("  Gr^{q} Gr_{p}: {d}");
    }
}

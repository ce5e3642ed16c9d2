//! Total tensor product of two random complexes.
use nearcyc::exactlin::tensor_total;
use nearcyc::instances::random_complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let a = random_complex(&mut rng, 0, 9, 3);
    let b = random_complex(&mut rng, -1, 7, 3);
    let t = tensor_total(&a, &b);
    println!("H(a)   = {:?}", a.homology().support());
    println!("H(b)   = {:?}", b.homology().support());
    println!("H(a⊗b) = {:?}", t.homology().support());
}

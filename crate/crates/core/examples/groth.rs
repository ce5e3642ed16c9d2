//! γ coefficients, the alternating collapse and the weights of V terms.
use nearcyc::groth::{collapse_sum, gamma, inclusion_exclusion_expand, red_table, reduction_sum, to_formal, SegmentData};
use nearcyc::spectral::WeightOffsets;

fn main() {
    let seg = SegmentData::quarter_shifted(vec![1, 1]).unwrap();
    println!("n = {}, γ^(3,4)_(1,2) = {}", seg.n(), gamma(3, 4, 1, 2, &seg).unwrap());
    println!("collapse S=2: {:?}", (2..=6).map(|s| collapse_sum(2, s, s)).collect::<Vec<_>>());

    let offsets = WeightOffsets::default();
    let red = reduction_sum(1, 1, &seg, offsets).unwrap();
    for r in &red {
        println!("  {} coefficient {} weight {}", r.term, r.coefficient, r.weight);
    }
    let table = red_table(&seg, offsets).unwrap();
    println!("expansion agrees: {}", inclusion_exclusion_expand(1, 1, seg.n(), &table) == to_formal(&red));
}

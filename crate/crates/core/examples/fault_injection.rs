//! Flips the sign of N̄ on one block and shows where the check fails.
use nearcyc::nearby::{build_nbar, NearbyError};
use nearcyc::strata::StalkPoint;

fn main() {
    let mut map = build_nbar(2, 3, 3);
    map.flip_block_sign(1, Some(1));
    match map.realize_checked(&StalkPoint::new(3, 3)) {
        Err(NearbyError::NotChainMap { degree, blocks }) => {
            println!("commutation fails from degree {degree}");
            println!("blocks (l1, l2, copy): {blocks:?}");
        }
        other => println!("unexpected: {:?}", other.map(|_| ())),
    }
}

//! Prints c^k_{l1,l2} for one k as a grid.
use nearcyc::nearby::{coefficient, index_window};

fn main() {
    let (n, k) = (5i64, 3i64);
    println!("c^{k}_(l1,l2), n = {n}");
    for l1 in 0..n {
        let row: Vec<String> = (0..n).map(|l2| coefficient(k, l1, l2).to_string()).collect();
        println!("  l1={l1}: {}", row.join(" "));
    }
    let w = index_window(k, 4, 2);
    println!("copy labels at (4,2): {:?}", w.labels());
}

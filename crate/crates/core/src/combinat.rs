//! Small exact combinatorics shared by the builders and oracles.

use num_bigint::BigInt;
use num_traits::One;

/// `C(n, k)`, zero when `k > n`.
pub fn binom(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    num_integer::binomial(n, k)
}

/// `C(n, k)` for signed arguments, zero outside `0 ≤ k ≤ n`.
pub fn binom_i(n: i64, k: i64) -> i64 {
    if n < 0 || k < 0 || k > n {
        return 0;
    }
    binom(n as u64, k as u64) as i64
}

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * i)
}

/// `(Σ b)! / Π b!`.
pub fn multinomial(blocks: &[u64]) -> BigInt {
    let total: u64 = blocks.iter().sum();
    let den = blocks.iter().fold(BigInt::one(), |acc, &b| acc * factorial(b));
    factorial(total) / den
}

/// All `size`-element subsets of `{1..m}` as bitmasks (bit `i-1` for
/// element `i`), in lexicographic order of their sorted element lists.
pub fn subsets(m: usize, size: usize) -> Vec<u32> {
    fn go(start: usize, m: usize, left: usize, acc: u32, out: &mut Vec<u32>) {
        if left == 0 {
            out.push(acc);
            return;
        }
        for i in start..m {
            if m - i < left {
                break;
            }
            go(i + 1, m, left - 1, acc | (1 << i), out);
        }
    }
    let mut out = Vec::new();
    if size <= m {
        go(0, m, size, 0, &mut out);
    }
    out
}

/// Sorted 1-based elements of a bitmask.
pub fn elements(mask: u32) -> Vec<u8> {
    (0..32u8).filter(|i| mask >> i & 1 == 1).map(|i| i + 1).collect()
}

pub fn mask_of(elems: &[u8]) -> u32 {
    elems.iter().fold(0, |acc, &e| acc | 1 << (e - 1))
}

/// Partitions of `n` into positive parts, each listed in nonincreasing
/// order. `partitions(0)` is the single empty partition.
pub fn partitions(n: u64) -> Vec<Vec<u64>> {
    fn go(left: u64, cap: u64, acc: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if left == 0 {
            out.push(acc.clone());
            return;
        }
        for part in (1..=left.min(cap)).rev() {
            acc.push(part);
            go(left - part, part, acc, out);
            acc.pop();
        }
    }
    let mut out = Vec::new();
    go(n, n, &mut Vec::new(), &mut out);
    out
}

/// `(-1)^e` as an integer.
pub fn sign(e: i64) -> i64 {
    if e.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

//! Seeded random test instances: chain complexes, injective chain maps and
//! nilpotent operators with known Jordan type.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::exactlin::{ChainComplex, ChainMap, Scalar, SparseMatrix};
use crate::monodromy::{jordan_matrix, NilpotentOperator};

fn small_scalar<R: Rng>(rng: &mut R) -> Scalar {
    const CHOICES: [(i64, i64); 6] = [(1, 1), (-1, 1), (2, 1), (-2, 1), (1, 2), (-1, 2)];
    let (p, q) = CHOICES[rng.gen_range(0..CHOICES.len())];
    Scalar::ratio(p, q)
}

/// Dense square matrix as rows of scalars.
type Dense = Vec<Vec<Scalar>>;

fn identity(n: usize) -> Dense {
    (0..n).map(|i| (0..n).map(|j| Scalar::int(i64::from(i == j))).collect()).collect()
}

/// Random invertible matrix and its inverse, as a product of `steps`
/// elementary operations `I + c·e_{ij}`.
fn random_invertible<R: Rng>(rng: &mut R, n: usize, steps: usize) -> (SparseMatrix, SparseMatrix) {
    let mut g = identity(n);
    let mut inv = identity(n);
    if n >= 2 {
        for _ in 0..steps {
            let i = rng.gen_range(0..n);
            let mut j = rng.gen_range(0..n - 1);
            if j >= i {
                j += 1;
            }
            let c = small_scalar(rng);
            // g ← (I + c e_ij) g : row_i += c row_j
            let row_j = g[j].clone();
            for (x, y) in g[i].iter_mut().zip(&row_j) {
                *x += &(&c * y);
            }
            // inv ← inv (I − c e_ij) : col_j −= c col_i
            for row in inv.iter_mut() {
                let t = &c * &row[i];
                row[j] -= &t;
            }
        }
    }
    (SparseMatrix::from_dense(&g), SparseMatrix::from_dense(&inv))
}

/// Random bounded complex with `total` basis vectors spread over
/// `1..=max_len` degrees starting at `lo`. Built as a sum of
/// contractible pairs and homology classes, then conjugated degreewise.
pub fn random_complex<R: Rng>(rng: &mut R, lo: i64, total: usize, max_len: usize) -> ChainComplex {
    let len = rng.gen_range(1..=max_len.max(1));
    // each unit is a homology class in one degree or a pair x ↦ y across i, i+1
    let mut dims = vec![0usize; len];
    let mut pairs: Vec<(usize, usize, usize)> = Vec::new(); // (degree index, source pos, target pos)
    let mut used = 0;
    while used < total {
        let i = rng.gen_range(0..len);
        if i + 1 < len && used + 2 <= total && rng.gen_bool(0.6) {
            pairs.push((i, dims[i], dims[i + 1]));
            dims[i] += 1;
            dims[i + 1] += 1;
            used += 2;
        } else {
            dims[i] += 1;
            used += 1;
        }
    }
    let mut diffs: Vec<SparseMatrix> = (0..len.saturating_sub(1))
        .map(|i| {
            let trips = pairs.iter().filter(|p| p.0 == i).map(|&(_, s, t)| (t, s, Scalar::int(1)));
            SparseMatrix::from_triplets(dims[i + 1], dims[i], trips).expect("in range")
        })
        .collect();
    let conj: Vec<(SparseMatrix, SparseMatrix)> = dims.iter().map(|&d| random_invertible(rng, d, 2 * d)).collect();
    for (i, d) in diffs.iter_mut().enumerate() {
        *d = conj[i + 1].0.mul(d).unwrap().mul(&conj[i].1).unwrap();
    }
    ChainComplex::from_dims(lo, &dims, diffs).expect("shapes")
}

/// Random degreewise-injective chain map `A → A ⊕ C`, with the target
/// conjugated by a random degreewise change of basis.
pub fn random_injective_map<R: Rng>(rng: &mut R, total: usize) -> ChainMap {
    let a = random_complex(rng, 0, total / 2, 3);
    let c = random_complex(rng, a.lo(), total - total / 2, 3);
    let lo = a.lo().min(c.lo());
    let hi = a.hi_exclusive().max(c.hi_exclusive());
    let a = a.widened(lo, hi);
    let c = c.widened(lo, hi);
    let dims: Vec<usize> = (lo..hi).map(|k| a.dim(k) + c.dim(k)).collect();
    let conj: Vec<(SparseMatrix, SparseMatrix)> = dims.iter().map(|&d| random_invertible(rng, d, 2 * d)).collect();
    let at = |k: i64| &conj[(k - lo) as usize];
    let diffs = (lo..hi - 1)
        .map(|k| {
            let z1 = SparseMatrix::zeros(a.dim(k + 1), c.dim(k));
            let z2 = SparseMatrix::zeros(c.dim(k + 1), a.dim(k));
            let d = SparseMatrix::block2x2(&a.d(k), &z1, &z2, &c.d(k)).unwrap();
            at(k + 1).0.mul(&d).unwrap().mul(&at(k).1).unwrap()
        })
        .collect();
    let b = ChainComplex::from_dims(lo, &dims, diffs).expect("shapes");
    let comps: BTreeMap<i64, SparseMatrix> = (lo..hi)
        .map(|k| {
            let incl = SparseMatrix::identity(a.dim(k)).vstack(&SparseMatrix::zeros(c.dim(k), a.dim(k))).unwrap();
            (k, at(k).0.mul(&incl).unwrap())
        })
        .collect();
    ChainMap::new(a, b, comps).expect("shapes")
}

/// Random partition of `dim` into Jordan block sizes.
pub fn random_partition<R: Rng>(rng: &mut R, dim: usize) -> Vec<usize> {
    let mut left = dim;
    let mut parts = Vec::new();
    while left > 0 {
        let cap = left.min(1 + dim / 2).max(1);
        let b = rng.gen_range(1..=cap);
        parts.push(b);
        left -= b;
    }
    parts.shuffle(rng);
    parts
}

/// Random nilpotent operator with the given Jordan blocks, conjugated by
/// `dim` elementary operations with small rational multipliers.
pub fn random_nilpotent<R: Rng>(rng: &mut R, blocks: &[usize]) -> NilpotentOperator {
    let j = jordan_matrix(blocks);
    let (g, inv) = random_invertible(rng, j.rows(), j.rows());
    NilpotentOperator::new(g.mul(&j).unwrap().mul(&inv).unwrap()).expect("conjugate of nilpotent")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlin::{cone, degreewise_quotient};
    use crate::monodromy::jordan_oracle;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn random_complexes_are_complexes() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let c = random_complex(&mut rng, -1, 12, 4);
            assert!(c.verify().unwrap());
            assert_eq!(c.total_dim(), 12);
        }
    }

    #[test]
    fn cone_matches_quotient() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let f = random_injective_map(&mut rng, 10);
            assert!(f.verify().unwrap());
            let k = cone(&f);
            assert!(k.verify().unwrap());
            let q = degreewise_quotient(&f).unwrap();
            assert!(q.verify().unwrap());
            assert_eq!(k.homology().support(), q.homology().support());
        }
    }

    #[test]
    fn conjugated_jordan_types_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let dim = rng.gen_range(1..=10);
            let blocks = random_partition(&mut rng, dim);
            let op = random_nilpotent(&mut rng, &blocks);
            let mut want = BTreeMap::new();
            for b in blocks {
                *want.entry(b).or_insert(0) += 1;
            }
            assert_eq!(jordan_oracle(&op).blocks, want);
        }
    }
}

//! Incremental row echelon forms, ranks, null spaces and subspace arithmetic.

use std::collections::HashMap;

use super::scalar::Scalar;
use super::sparse::{axpy, scale, SparseMatrix, SparseVec};

/// Rows in echelon form, each with leading coefficient 1 and a distinct
/// leading column.
#[derive(Debug, Clone, Default)]
pub struct Echelon {
    rows: Vec<SparseVec>,
    pivot_row: HashMap<usize, usize>,
}

impl Echelon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_rows(rows: impl IntoIterator<Item = SparseVec>) -> Self {
        let mut e = Self::new();
        for r in rows {
            e.insert(r);
        }
        e
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[SparseVec] {
        &self.rows
    }

    pub fn pivots(&self) -> impl Iterator<Item = usize> + '_ {
        self.rows.iter().map(|r| r[0].0)
    }

    /// Reduces leading entries of `v` against the stored pivots. The result is
    /// empty iff `v` lies in the row span.
    fn reduce_leading(&self, mut v: SparseVec) -> SparseVec {
        while let Some((lead, coef)) = v.first().cloned() {
            match self.pivot_row.get(&lead) {
                Some(&k) => v = axpy(&v, &-coef, &self.rows[k]),
                None => break,
            }
        }
        v
    }

    /// Adds `v` to the span. Returns `true` when the rank grew.
    pub fn insert(&mut self, v: SparseVec) -> bool {
        let v = self.reduce_leading(v);
        match v.first() {
            None => false,
            Some((lead, coef)) => {
                let lead = *lead;
                let v = if coef.is_one() { v } else { scale(&v, &coef.recip()) };
                self.pivot_row.insert(lead, self.rows.len());
                self.rows.push(v);
                true
            }
        }
    }

    pub fn contains(&self, v: &[(usize, Scalar)]) -> bool {
        self.reduce_leading(v.to_vec()).is_empty()
    }

    /// Eliminates every pivot column from `v`; the remainder is supported
    /// on non-pivot columns and is a canonical representative of
    /// `v` modulo the span.
    pub fn reduce_full(&self, v: &[(usize, Scalar)]) -> SparseVec {
        let mut v = v.to_vec();
        let mut cursor = 0;
        while cursor < v.len() {
            let (col, coef) = v[cursor].clone();
            match self.pivot_row.get(&col) {
                Some(&k) => {
                    v = axpy(&v, &-coef, &self.rows[k]);
                    // entries before `cursor` are untouched: pivot rows start at `col`
                }
                None => cursor += 1,
            }
        }
        v
    }

    /// Converts to reduced row echelon form: every pivot column is zero
    /// outside its own row.
    pub fn into_reduced(mut self) -> Self {
        let mut order: Vec<usize> = (0..self.rows.len()).collect();
        order.sort_by_key(|&k| std::cmp::Reverse(self.rows[k][0].0));
        for &k in &order {
            let row = std::mem::take(&mut self.rows[k]);
            let lead = row[0].0;
            let tail = self.reduce_full(&row[1..]);
            let mut row = vec![(lead, Scalar::int(1))];
            row.extend(tail);
            self.rows[k] = row;
        }
        self
    }
}

pub fn rank_of_rows(rows: impl IntoIterator<Item = SparseVec>) -> usize {
    Echelon::from_rows(rows).rank()
}

/// Basis of `{x : A x = 0}` as sparse vectors of length `a.cols()`.
pub fn nullspace(a: &SparseMatrix) -> Vec<SparseVec> {
    let rref = Echelon::from_rows(a.row_vecs().iter().cloned()).into_reduced();
    let pivots: HashMap<usize, usize> =
        rref.rows().iter().enumerate().map(|(k, r)| (r[0].0, k)).collect();
    // column -> list of (pivot column, coefficient) from the reduced rows
    let mut by_free: HashMap<usize, Vec<(usize, Scalar)>> = HashMap::new();
    for r in rref.rows() {
        let p = r[0].0;
        for (c, v) in &r[1..] {
            by_free.entry(*c).or_default().push((p, v.clone()));
        }
    }
    (0..a.cols())
        .filter(|c| !pivots.contains_key(c))
        .map(|f| {
            let mut v: SparseVec = by_free
                .get(&f)
                .map(|es| es.iter().map(|(p, x)| (*p, -x)).collect())
                .unwrap_or_default();
            v.push((f, Scalar::int(1)));
            v.sort_by_key(|(c, _)| *c);
            v
        })
        .collect()
}

/// A linear subspace of `Q^ambient`, held as a reduced echelon basis.
#[derive(Debug, Clone)]
pub struct Subspace {
    ambient: usize,
    basis: Echelon,
}

impl Subspace {
    pub fn zero(ambient: usize) -> Self {
        Subspace { ambient, basis: Echelon::new() }
    }

    pub fn full(ambient: usize) -> Self {
        Self::span(ambient, (0..ambient).map(|i| vec![(i, Scalar::int(1))]))
    }

    pub fn span(ambient: usize, vectors: impl IntoIterator<Item = SparseVec>) -> Self {
        Subspace { ambient, basis: Echelon::from_rows(vectors).into_reduced() }
    }

    /// Column space of `m`.
    pub fn image(m: &SparseMatrix) -> Self {
        Self::span(m.rows(), m.columns())
    }

    pub fn kernel(m: &SparseMatrix) -> Self {
        Self::span(m.cols(), nullspace(m))
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.rank()
    }

    pub fn basis(&self) -> &[SparseVec] {
        self.basis.rows()
    }

    pub fn contains(&self, v: &[(usize, Scalar)]) -> bool {
        self.basis.contains(v)
    }

    pub fn contains_space(&self, other: &Subspace) -> bool {
        other.basis().iter().all(|v| self.contains(v))
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        assert_eq!(self.ambient, other.ambient);
        Self::span(self.ambient, self.basis().iter().chain(other.basis()).cloned())
    }

    /// Intersection by the Zassenhaus construction: reduce rows `[u | u]` and
    /// `[w | 0]`; rows whose left half vanishes carry a basis of `U ∩ W` on
    /// the right.
    pub fn intersect(&self, other: &Subspace) -> Subspace {
        assert_eq!(self.ambient, other.ambient);
        let n = self.ambient;
        let mut rows: Vec<SparseVec> = Vec::with_capacity(self.dim() + other.dim());
        for u in self.basis() {
            let mut r = u.clone();
            r.extend(u.iter().map(|(c, v)| (c + n, v.clone())));
            rows.push(r);
        }
        rows.extend(other.basis().iter().cloned());
        let e = Echelon::from_rows(rows);
        let inter = e
            .rows()
            .iter()
            .filter(|r| r[0].0 >= n)
            .map(|r| r.iter().map(|(c, v)| (c - n, v.clone())).collect::<SparseVec>());
        Self::span(n, inter.collect::<Vec<_>>())
    }

    /// Image of the subspace under `m`.
    pub fn map(&self, m: &SparseMatrix) -> Subspace {
        assert_eq!(m.cols(), self.ambient);
        Self::span(m.rows(), self.basis().iter().map(|v| m.apply(v)).collect::<Vec<_>>())
    }

    pub fn equals(&self, other: &Subspace) -> bool {
        self.dim() == other.dim() && self.contains_space(other)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(rows: &[&[i64]]) -> SparseMatrix {
        SparseMatrix::from_dense(
            &rows.iter().map(|r| r.iter().map(|&x| Scalar::int(x)).collect()).collect::<Vec<_>>(),
        )
    }

    #[test]
    fn rank_of_small_matrices() {
        assert_eq!(mat(&[&[1, 2], &[2, 4]]).rank(), 1);
        assert_eq!(mat(&[&[1, 2], &[3, 4]]).rank(), 2);
        assert_eq!(SparseMatrix::zeros(3, 4).rank(), 0);
        assert_eq!(mat(&[&[0, 1, 1], &[1, 0, 1], &[1, 1, 2]]).rank(), 2);
    }

    #[test]
    fn nullspace_vectors_are_killed() {
        let a = mat(&[&[1, 2, 3, 4], &[2, 4, 6, 8], &[0, 1, 1, 0]]);
        let ns = nullspace(&a);
        assert_eq!(ns.len(), a.cols() - a.rank());
        for v in &ns {
            assert!(a.apply(v).is_empty());
        }
    }

    #[test]
    fn zassenhaus_intersection() {
        let e = |i: usize| vec![(i, Scalar::int(1))];
        let u = Subspace::span(3, vec![e(0), e(1)]);
        let w = Subspace::span(3, vec![e(1), e(2)]);
        let i = u.intersect(&w);
        assert_eq!(i.dim(), 1);
        assert!(i.contains(&e(1)));
        assert_eq!(u.sum(&w).dim(), 3);
    }

    #[test]
    fn reduce_full_gives_canonical_residue() {
        let e = Echelon::from_rows(vec![vec![(0, Scalar::int(1)), (1, Scalar::int(1))]]);
        let r1 = e.reduce_full(&[(0, Scalar::int(1))]);
        let r2 = e.reduce_full(&[(1, Scalar::int(-1))]);
        assert_eq!(r1, r2);
    }
}

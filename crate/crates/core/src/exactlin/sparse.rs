use serde::{Deserialize, Serialize};

use super::scalar::Scalar;
use super::LinError;

/// A sparse vector: strictly increasing indices, no stored zeros.
pub type SparseVec = Vec<(usize, Scalar)>;

/// `y + a·x` for sparse vectors.
pub fn axpy(y: &[(usize, Scalar)], a: &Scalar, x: &[(usize, Scalar)]) -> SparseVec {
    let mut out = Vec::with_capacity(y.len() + x.len());
    let (mut i, mut j) = (0, 0);
    while i < y.len() || j < x.len() {
        let take_y = j >= x.len() || (i < y.len() && y[i].0 < x[j].0);
        let take_x = i >= y.len() || (j < x.len() && x[j].0 < y[i].0);
        if take_y {
            out.push(y[i].clone());
            i += 1;
        } else if take_x {
            let v = a * &x[j].1;
            if !v.is_zero() {
                out.push((x[j].0, v));
            }
            j += 1;
        } else {
            let v = &y[i].1 + &(a * &x[j].1);
            if !v.is_zero() {
                out.push((y[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

pub fn scale(x: &[(usize, Scalar)], a: &Scalar) -> SparseVec {
    if a.is_zero() {
        return Vec::new();
    }
    x.iter().map(|(i, v)| (*i, a * v)).collect()
}

/// Row-major sparse matrix over exact rationals.
#[derive(Clone, PartialEq, Eq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<SparseVec>,
}

impl SparseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        SparseMatrix { rows, cols, data: vec![Vec::new(); rows] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i].push((i, Scalar::int(1)));
        }
        m
    }

    /// Builds from `(row, col, value)` triplets. Duplicate positions are summed
    /// and zeros dropped.
    pub fn from_triplets(
        rows: usize,
        cols: usize,
        triplets: impl IntoIterator<Item = (usize, usize, Scalar)>,
    ) -> Result<Self, LinError> {
        let mut buckets: Vec<Vec<(usize, Scalar)>> = vec![Vec::new(); rows];
        for (r, c, v) in triplets {
            if r >= rows || c >= cols {
                return Err(LinError::IndexOutOfRange { row: r, col: c, rows, cols });
            }
            buckets[r].push((c, v));
        }
        let data = buckets
            .into_iter()
            .map(|mut row| {
                row.sort_by_key(|(c, _)| *c);
                let mut out: SparseVec = Vec::with_capacity(row.len());
                for (c, v) in row {
                    match out.last_mut() {
                        Some((lc, lv)) if *lc == c => *lv += &v,
                        _ => out.push((c, v)),
                    }
                }
                out.retain(|(_, v)| !v.is_zero());
                out
            })
            .collect();
        Ok(SparseMatrix { rows, cols, data })
    }

    /// Builds from sparse rows that already satisfy the invariants.
    pub fn from_rows(cols: usize, rows: Vec<SparseVec>) -> Self {
        debug_assert!(rows.iter().all(|r| {
            r.windows(2).all(|w| w[0].0 < w[1].0)
                && r.iter().all(|(c, v)| *c < cols && !v.is_zero())
        }));
        SparseMatrix { rows: rows.len(), cols, data: rows }
    }

    /// Builds the matrix whose columns are the given sparse vectors.
    pub fn from_columns(rows: usize, columns: &[SparseVec]) -> Self {
        let mut data: Vec<SparseVec> = vec![Vec::new(); rows];
        for (c, col) in columns.iter().enumerate() {
            for (r, v) in col {
                data[*r].push((c, v.clone()));
            }
        }
        SparseMatrix { rows, cols: columns.len(), data }
    }

    pub fn from_dense(rows: &[Vec<Scalar>]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let data = rows
            .iter()
            .map(|r| {
                r.iter()
                    .enumerate()
                    .filter(|(_, v)| !v.is_zero())
                    .map(|(c, v)| (c, v.clone()))
                    .collect()
            })
            .collect();
        SparseMatrix { rows: rows.len(), cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn row(&self, r: usize) -> &[(usize, Scalar)] {
        &self.data[r]
    }

    pub fn row_vecs(&self) -> &[SparseVec] {
        &self.data
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().map(Vec::len).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Vec::is_empty)
    }

    pub fn get(&self, r: usize, c: usize) -> Scalar {
        match self.data[r].binary_search_by_key(&c, |(i, _)| *i) {
            Ok(k) => self.data[r][k].1.clone(),
            Err(_) => Scalar::int(0),
        }
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, &Scalar)> + '_ {
        self.data
            .iter()
            .enumerate()
            .flat_map(|(r, row)| row.iter().map(move |(c, v)| (r, c.to_owned(), v)))
    }

    pub fn to_dense(&self) -> Vec<Vec<Scalar>> {
        let mut out = vec![vec![Scalar::int(0); self.cols]; self.rows];
        for (r, c, v) in self.triplets() {
            out[r][c] = v.clone();
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let mut data: Vec<SparseVec> = vec![Vec::new(); self.cols];
        for (r, row) in self.data.iter().enumerate() {
            for (c, v) in row {
                data[*c].push((r, v.clone()));
            }
        }
        SparseMatrix { rows: self.cols, cols: self.rows, data }
    }

    /// Columns as sparse vectors.
    pub fn columns(&self) -> Vec<SparseVec> {
        self.transpose().data
    }

    pub fn scaled(&self, a: &Scalar) -> Self {
        SparseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|r| scale(r, a)).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, LinError> {
        if self.shape() != other.shape() {
            return Err(LinError::ShapeMismatch {
                context: "matrix sum",
                left: self.shape(),
                right: other.shape(),
            });
        }
        let one = Scalar::int(1);
        let data = self.data.iter().zip(&other.data).map(|(a, b)| axpy(a, &one, b)).collect();
        Ok(SparseMatrix { rows: self.rows, cols: self.cols, data })
    }

    pub fn sub(&self, other: &Self) -> Result<Self, LinError> {
        self.add(&other.scaled(&Scalar::int(-1)))
    }

    /// Matrix product `self · other`.
    pub fn mul(&self, other: &Self) -> Result<Self, LinError> {
        if self.cols != other.rows {
            return Err(LinError::ShapeMismatch {
                context: "matrix product",
                left: self.shape(),
                right: other.shape(),
            });
        }
        let data = self
            .data
            .iter()
            .map(|row| {
                let mut acc: SparseVec = Vec::new();
                for (k, v) in row {
                    acc = axpy(&acc, v, &other.data[*k]);
                }
                acc
            })
            .collect();
        Ok(SparseMatrix { rows: self.rows, cols: other.cols, data })
    }

    /// `self · x` for a sparse column vector `x`.
    pub fn apply(&self, x: &[(usize, Scalar)]) -> SparseVec {
        let mut dense: Vec<(usize, Scalar)> = Vec::new();
        for (r, row) in self.data.iter().enumerate() {
            let mut acc = Scalar::int(0);
            let (mut i, mut j) = (0, 0);
            while i < row.len() && j < x.len() {
                match row[i].0.cmp(&x[j].0) {
                    std::cmp::Ordering::Less => i += 1,
                    std::cmp::Ordering::Greater => j += 1,
                    std::cmp::Ordering::Equal => {
                        acc += &(&row[i].1 * &x[j].1);
                        i += 1;
                        j += 1;
                    }
                }
            }
            if !acc.is_zero() {
                dense.push((r, acc));
            }
        }
        dense
    }

    /// Stacks `self` on top of `other`.
    pub fn vstack(&self, other: &Self) -> Result<Self, LinError> {
        if self.cols != other.cols {
            return Err(LinError::ShapeMismatch {
                context: "vertical stack",
                left: self.shape(),
                right: other.shape(),
            });
        }
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Ok(SparseMatrix { rows: self.rows + other.rows, cols: self.cols, data })
    }

    /// Places `other` to the right of `self`.
    pub fn hstack(&self, other: &Self) -> Result<Self, LinError> {
        if self.rows != other.rows {
            return Err(LinError::ShapeMismatch {
                context: "horizontal stack",
                left: self.shape(),
                right: other.shape(),
            });
        }
        let off = self.cols;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| {
                let mut r = a.clone();
                r.extend(b.iter().map(|(c, v)| (c + off, v.clone())));
                r
            })
            .collect();
        Ok(SparseMatrix { rows: self.rows, cols: self.cols + other.cols, data })
    }

    /// Block matrix `[[a, b], [c, d]]`.
    pub fn block2x2(a: &Self, b: &Self, c: &Self, d: &Self) -> Result<Self, LinError> {
        a.hstack(b)?.vstack(&c.hstack(d)?)
    }

    /// Kronecker product `self ⊗ other`, row index `i·other.rows + k`.
    pub fn kron(&self, other: &Self) -> Self {
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        let mut data: Vec<SparseVec> = Vec::with_capacity(rows);
        for arow in &self.data {
            for brow in &other.data {
                let mut r = Vec::with_capacity(arow.len() * brow.len());
                for (ac, av) in arow {
                    for (bc, bv) in brow {
                        r.push((ac * other.cols + bc, av * bv));
                    }
                }
                data.push(r);
            }
        }
        SparseMatrix { rows, cols, data }
    }

    /// Adds `value` at `(r, c)`.
    pub fn add_entry(&mut self, r: usize, c: usize, value: &Scalar) {
        let row = &mut self.data[r];
        match row.binary_search_by_key(&c, |(i, _)| *i) {
            Ok(k) => {
                row[k].1 += value;
                if row[k].1.is_zero() {
                    row.remove(k);
                }
            }
            Err(k) => {
                if !value.is_zero() {
                    row.insert(k, (c, value.clone()));
                }
            }
        }
    }

    pub fn rank(&self) -> usize {
        super::echelon::rank_of_rows(self.data.iter().cloned())
    }
}

impl std::fmt::Debug for SparseMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "SparseMatrix {}x{} ", self.rows, self.cols)?;
        f.debug_list().entries(self.triplets()).finish()
    }
}

/// JSON triple-list form: `{rows, cols, entries: [[r, c, "p/q"], ...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<(usize, usize, String)>,
}

impl From<&SparseMatrix> for MatrixJson {
    fn from(m: &SparseMatrix) -> Self {
        MatrixJson {
            rows: m.rows,
            cols: m.cols,
            entries: m.triplets().map(|(r, c, v)| (r, c, v.to_string())).collect(),
        }
    }
}

impl TryFrom<&MatrixJson> for SparseMatrix {
    type Error = LinError;

    fn try_from(j: &MatrixJson) -> Result<Self, LinError> {
        let mut trips = Vec::with_capacity(j.entries.len());
        for (r, c, s) in &j.entries {
            let v: Scalar = s.parse().map_err(|_| LinError::BadScalar(s.clone()))?;
            trips.push((*r, *c, v));
        }
        SparseMatrix::from_triplets(j.rows, j.cols, trips)
    }
}

impl Serialize for SparseMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        MatrixJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for SparseMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let j = MatrixJson::deserialize(d)?;
        SparseMatrix::try_from(&j).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> SparseMatrix {
        SparseMatrix::from_dense(
            &rows.iter().map(|r| r.iter().map(|&x| Scalar::int(x)).collect()).collect::<Vec<_>>(),
        )
    }

    #[test]
    fn triplets_sum_duplicates_and_drop_zeros() {
        let a = SparseMatrix::from_triplets(
            2,
            2,
            vec![(0, 0, Scalar::int(1)), (0, 0, Scalar::int(-1)), (1, 1, Scalar::int(3))],
        )
        .unwrap();
        assert_eq!(a.nnz(), 1);
        assert_eq!(a.get(1, 1), Scalar::int(3));
        assert!(SparseMatrix::from_triplets(1, 1, vec![(1, 0, Scalar::int(1))]).is_err());
    }

    #[test]
    fn product_and_kron() {
        let a = m(&[&[1, 2], &[0, 1]]);
        let b = m(&[&[0, 1], &[1, 0]]);
        assert_eq!(a.mul(&b).unwrap(), m(&[&[2, 1], &[1, 0]]));
        let k = a.kron(&b);
        assert_eq!(k.shape(), (4, 4));
        assert_eq!(k.get(0, 1), Scalar::int(1));
        assert_eq!(k.get(1, 2), Scalar::int(2));
        assert_eq!(k.get(3, 2), Scalar::int(1));
    }

    #[test]
    fn json_triple_list() {
        let a = SparseMatrix::from_triplets(2, 3, vec![(1, 2, Scalar::ratio(-1, 2))]).unwrap();
        let s = serde_json::to_string(&a).unwrap();
        assert_eq!(s, r#"{"rows":2,"cols":3,"entries":[[1,2,"-1/2"]]}"#);
        let back: SparseMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back, a);
    }
}

use std::borrow::Cow;
use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::echelon::{rank_of_rows, Echelon};
use super::scalar::Scalar;
use super::sparse::{MatrixJson, SparseMatrix, SparseVec};
use super::LinError;

/// Label of a basis element. Ordering is lexicographic on the variant
/// fields, which fixes the basis order of every realized complex.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BasisLabel {
    Plain(usize),
    /// Connected piece `(J1, J2)` of the stratum `(l1, l2)`, in the copy
    /// labeled `copy`. Component sets are sorted and 1-based.
    Stratum { l1: usize, l2: Option<usize>, copy: i64, j1: Vec<u8>, j2: Vec<u8> },
    Tensor(Box<BasisLabel>, Box<BasisLabel>),
    ConeTarget(Box<BasisLabel>),
    ConeSource(Box<BasisLabel>),
}

/// A bounded cochain complex of finite-dimensional Q-vector spaces.
///
/// Degrees run over `lo..lo + bases.len()`; `diffs[i]` maps degree `lo + i`
/// to `lo + i + 1`. Differentials out of the top degree are zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainComplex {
    lo: i64,
    bases: Vec<Vec<BasisLabel>>,
    diffs: Vec<SparseMatrix>,
}

/// Per-degree homology dimensions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Homology {
    pub lo: i64,
    pub dims: Vec<usize>,
}

impl Homology {
    pub fn get(&self, degree: i64) -> usize {
        if degree < self.lo {
            return 0;
        }
        self.dims.get((degree - self.lo) as usize).copied().unwrap_or(0)
    }

    /// Nonzero `(degree, dim)` pairs.
    pub fn support(&self) -> Vec<(i64, usize)> {
        self.dims
            .iter()
            .enumerate()
            .filter(|(_, d)| **d > 0)
            .map(|(i, d)| (self.lo + i as i64, *d))
            .collect()
    }

    pub fn euler(&self) -> i64 {
        self.dims
            .iter()
            .enumerate()
            .map(|(i, d)| if (self.lo + i as i64).rem_euclid(2) == 0 { *d as i64 } else { -(*d as i64) })
            .sum()
    }

    pub fn total(&self) -> usize {
        self.dims.iter().sum()
    }
}

impl ChainComplex {
    pub fn new(lo: i64, bases: Vec<Vec<BasisLabel>>, diffs: Vec<SparseMatrix>) -> Result<Self, LinError> {
        let c = ChainComplex { lo, bases, diffs };
        c.check_shapes()?;
        Ok(c)
    }

    /// Builds without shape validation; [`ChainComplex::verify`] reports
    /// any mismatch.
    pub fn from_parts_unchecked(lo: i64, bases: Vec<Vec<BasisLabel>>, diffs: Vec<SparseMatrix>) -> Self {
        ChainComplex { lo, bases, diffs }
    }

    pub fn zero() -> Self {
        ChainComplex { lo: 0, bases: Vec::new(), diffs: Vec::new() }
    }

    /// Complex with plain labels `0..dims[i]` in each degree.
    pub fn from_dims(lo: i64, dims: &[usize], diffs: Vec<SparseMatrix>) -> Result<Self, LinError> {
        let bases = dims.iter().map(|&d| (0..d).map(BasisLabel::Plain).collect()).collect();
        Self::new(lo, bases, diffs)
    }

    fn check_shapes(&self) -> Result<(), LinError> {
        let expected = self.bases.len().saturating_sub(1);
        if self.diffs.len() != expected {
            return Err(LinError::DifferentialCount { expected, found: self.diffs.len() });
        }
        for (i, d) in self.diffs.iter().enumerate() {
            let want = (self.bases[i + 1].len(), self.bases[i].len());
            if d.shape() != want {
                return Err(LinError::ShapeAtDegree { degree: self.lo + i as i64, expected: want, found: d.shape() });
            }
        }
        Ok(())
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    /// One past the top degree.
    pub fn hi_exclusive(&self) -> i64 {
        self.lo + self.bases.len() as i64
    }

    pub fn degrees(&self) -> std::ops::Range<i64> {
        self.lo..self.hi_exclusive()
    }

    pub fn is_empty(&self) -> bool {
        self.bases.iter().all(Vec::is_empty)
    }

    pub fn dim(&self, degree: i64) -> usize {
        self.basis(degree).len()
    }

    pub fn total_dim(&self) -> usize {
        self.bases.iter().map(Vec::len).sum()
    }

    pub fn basis(&self, degree: i64) -> &[BasisLabel] {
        if degree < self.lo {
            return &[];
        }
        self.bases.get((degree - self.lo) as usize).map_or(&[], |b| b.as_slice())
    }

    /// `d^degree`, from `degree` to `degree + 1`.
    pub fn d(&self, degree: i64) -> Cow<'_, SparseMatrix> {
        if degree >= self.lo {
            if let Some(m) = self.diffs.get((degree - self.lo) as usize) {
                return Cow::Borrowed(m);
            }
        }
        Cow::Owned(SparseMatrix::zeros(self.dim(degree + 1), self.dim(degree)))
    }

    /// `true` iff `d ∘ d = 0` in every degree; shape problems are errors.
    pub fn verify(&self) -> Result<bool, LinError> {
        self.check_shapes()?;
        for w in self.diffs.windows(2) {
            if !w[1].mul(&w[0])?.is_zero() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Degrees `i` where `d^{i+1} d^i ≠ 0`.
    pub fn dd_failures(&self) -> Result<Vec<i64>, LinError> {
        self.check_shapes()?;
        let mut out = Vec::new();
        for (i, w) in self.diffs.windows(2).enumerate() {
            if !w[1].mul(&w[0])?.is_zero() {
                out.push(self.lo + i as i64);
            }
        }
        Ok(out)
    }

    pub fn rank_d(&self, degree: i64) -> usize {
        self.d(degree).rank()
    }

    /// `dim H^i = dim C^i − rank d^i − rank d^{i−1}`.
    pub fn homology(&self) -> Homology {
        let ranks: Vec<usize> = self.diffs.iter().map(SparseMatrix::rank).collect();
        let dims = (0..self.bases.len())
            .map(|i| {
                let out = ranks.get(i).copied().unwrap_or(0);
                let inc = if i > 0 { ranks[i - 1] } else { 0 };
                self.bases[i].len() - out - inc
            })
            .collect();
        Homology { lo: self.lo, dims }
    }

    pub fn euler(&self) -> i64 {
        self.degrees()
            .map(|k| if k.rem_euclid(2) == 0 { self.dim(k) as i64 } else { -(self.dim(k) as i64) })
            .sum()
    }

    /// Copy of the complex with the differential out of `degree` replaced.
    pub fn with_differential(&self, degree: i64, d: SparseMatrix) -> Result<Self, LinError> {
        let mut c = self.clone();
        let idx = (degree - self.lo) as usize;
        if degree < self.lo || idx >= c.diffs.len() {
            return Err(LinError::DegreeOutOfRange(degree));
        }
        c.diffs[idx] = d;
        c.check_shapes()?;
        Ok(c)
    }

    /// The same complex re-indexed over the degree range `lo..hi`, padding
    /// with zero terms.
    pub fn widened(&self, lo: i64, hi_exclusive: i64) -> Self {
        let lo = lo.min(self.lo);
        let hi = hi_exclusive.max(self.hi_exclusive());
        let bases: Vec<Vec<BasisLabel>> = (lo..hi).map(|k| self.basis(k).to_vec()).collect();
        let diffs = (lo..hi - 1).map(|k| self.d(k).into_owned()).collect();
        ChainComplex { lo, bases, diffs }
    }
}

/// A degreewise linear map between complexes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainMap {
    source: ChainComplex,
    target: ChainComplex,
    comps: BTreeMap<i64, SparseMatrix>,
}

impl ChainMap {
    /// Missing degrees are zero. Shapes are checked; commutation is not
    /// (see [`ChainMap::verify`]).
    pub fn new(source: ChainComplex, target: ChainComplex, comps: BTreeMap<i64, SparseMatrix>) -> Result<Self, LinError> {
        for (k, m) in &comps {
            let want = (target.dim(*k), source.dim(*k));
            if m.shape() != want {
                return Err(LinError::ShapeAtDegree { degree: *k, expected: want, found: m.shape() });
            }
        }
        Ok(ChainMap { source, target, comps })
    }

    pub fn identity(c: &ChainComplex) -> Self {
        let comps = c.degrees().map(|k| (k, SparseMatrix::identity(c.dim(k)))).collect();
        ChainMap { source: c.clone(), target: c.clone(), comps }
    }

    pub fn source(&self) -> &ChainComplex {
        &self.source
    }

    pub fn target(&self) -> &ChainComplex {
        &self.target
    }

    pub fn component(&self, degree: i64) -> Cow<'_, SparseMatrix> {
        match self.comps.get(&degree) {
            Some(m) => Cow::Borrowed(m),
            None => Cow::Owned(SparseMatrix::zeros(self.target.dim(degree), self.source.dim(degree))),
        }
    }

    fn degree_span(&self) -> std::ops::Range<i64> {
        let lo = self.source.lo().min(self.target.lo());
        let hi = self.source.hi_exclusive().max(self.target.hi_exclusive());
        lo..hi
    }

    /// `d_T f^k − f^{k+1} d_S` at `degree`.
    pub fn commutation_defect(&self, degree: i64) -> Result<SparseMatrix, LinError> {
        let left = self.target.d(degree).mul(&self.component(degree))?;
        let right = self.component(degree + 1).mul(&self.source.d(degree))?;
        left.sub(&right)
    }

    /// `true` iff the map commutes with the differentials in every degree.
    pub fn verify(&self) -> Result<bool, LinError> {
        Ok(self.commutation_failures()?.is_empty())
    }

    pub fn commutation_failures(&self) -> Result<Vec<i64>, LinError> {
        let mut out = Vec::new();
        for k in self.degree_span() {
            if !self.commutation_defect(k)?.is_zero() {
                out.push(k);
            }
        }
        Ok(out)
    }

    /// Composition `other ∘ self`.
    pub fn then(&self, other: &ChainMap) -> Result<ChainMap, LinError> {
        let mut comps = BTreeMap::new();
        for k in self.degree_span() {
            let m = other.component(k).mul(&self.component(k))?;
            if !m.is_zero() {
                comps.insert(k, m);
            }
        }
        ChainMap::new(self.source.clone(), other.target.clone(), comps)
    }

    pub fn is_zero(&self) -> bool {
        self.comps.values().all(SparseMatrix::is_zero)
    }

    /// Degrees where the component is not injective.
    pub fn non_injective_degrees(&self) -> Vec<i64> {
        self.source
            .degrees()
            .filter(|&k| self.component(k).rank() < self.source.dim(k))
            .collect()
    }
}

/// Mapping cone: degree `k` is `target^k ⊕ source^{k+1}` with
/// `(x, y) ↦ (dx + f(y), −dy)`.
pub fn cone(f: &ChainMap) -> ChainComplex {
    let (s, t) = (f.source(), f.target());
    let lo = t.lo().min(s.lo() - 1);
    let hi = t.hi_exclusive().max(s.hi_exclusive() - 1);
    if lo >= hi {
        return ChainComplex::zero();
    }
    let bases: Vec<Vec<BasisLabel>> = (lo..hi)
        .map(|k| {
            t.basis(k)
                .iter()
                .map(|l| BasisLabel::ConeTarget(Box::new(l.clone())))
                .chain(s.basis(k + 1).iter().map(|l| BasisLabel::ConeSource(Box::new(l.clone()))))
                .collect()
        })
        .collect();
    let minus_one = Scalar::int(-1);
    let diffs = (lo..hi - 1)
        .map(|k| {
            let dt = t.d(k);
            let fy = f.component(k + 1);
            let zero = SparseMatrix::zeros(s.dim(k + 2), t.dim(k));
            let ds = s.d(k + 1).scaled(&minus_one);
            SparseMatrix::block2x2(&dt, &fy, &zero, &ds).expect("cone block shapes")
        })
        .collect();
    ChainComplex { lo, bases, diffs }
}

/// Complex of degreewise cokernels of an injective chain map, with the
/// induced differential. The quotient basis is the set of target basis
/// elements in non-pivot positions of the image.
pub fn degreewise_quotient(f: &ChainMap) -> Result<ChainComplex, LinError> {
    if let Some(&k) = f.non_injective_degrees().first() {
        return Err(LinError::NotInjective { degree: k });
    }
    let t = f.target();
    let mut echelons: BTreeMap<i64, Echelon> = BTreeMap::new();
    let mut kept: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
    for k in t.degrees() {
        let e = Echelon::from_rows(f.component(k).columns());
        let pivots: std::collections::HashSet<usize> = e.pivots().collect();
        kept.insert(k, (0..t.dim(k)).filter(|i| !pivots.contains(i)).collect());
        echelons.insert(k, e);
    }
    let bases: Vec<Vec<BasisLabel>> = t
        .degrees()
        .map(|k| kept[&k].iter().map(|&i| t.basis(k)[i].clone()).collect())
        .collect();
    let mut diffs = Vec::new();
    for k in t.lo()..t.hi_exclusive() - 1 {
        let d = t.d(k);
        let next = &kept[&(k + 1)];
        let pos: BTreeMap<usize, usize> = next.iter().enumerate().map(|(j, &i)| (i, j)).collect();
        let cols: Vec<SparseVec> = kept[&k]
            .iter()
            .map(|&i| {
                let img = d.apply(&[(i, Scalar::int(1))]);
                echelons[&(k + 1)]
                    .reduce_full(&img)
                    .into_iter()
                    .map(|(r, v)| (pos[&r], v))
                    .collect()
            })
            .collect();
        diffs.push(SparseMatrix::from_columns(next.len(), &cols));
    }
    ChainComplex::new(t.lo(), bases, diffs)
}

/// Total complex of `a ⊗ b`: degree `n` is `⊕_i a^i ⊗ b^{n−i}` and
/// `d(x ⊗ y) = dx ⊗ y + (−1)^{deg x} x ⊗ dy`.
pub fn tensor_total(a: &ChainComplex, b: &ChainComplex) -> ChainComplex {
    if a.bases.is_empty() || b.bases.is_empty() {
        return ChainComplex::zero();
    }
    let lo = a.lo() + b.lo();
    let hi = a.hi_exclusive() + b.hi_exclusive() - 1;
    // offsets[n][i] = start of a^i ⊗ b^{n-i} inside degree n
    let mut bases = Vec::new();
    let mut offsets: Vec<BTreeMap<i64, usize>> = Vec::new();
    for n in lo..hi {
        let mut basis = Vec::new();
        let mut off = BTreeMap::new();
        for i in a.degrees() {
            let j = n - i;
            if j < b.lo() || j >= b.hi_exclusive() {
                continue;
            }
            off.insert(i, basis.len());
            for x in a.basis(i) {
                for y in b.basis(j) {
                    basis.push(BasisLabel::Tensor(Box::new(x.clone()), Box::new(y.clone())));
                }
            }
        }
        bases.push(basis);
        offsets.push(off);
    }
    let mut diffs = Vec::new();
    for n in lo..hi - 1 {
        let src = &offsets[(n - lo) as usize];
        let dst = &offsets[(n + 1 - lo) as usize];
        let mut trips = Vec::new();
        for (&i, &s_off) in src {
            let j = n - i;
            let (da, db) = (a.dim(i), b.dim(j));
            // dx ⊗ y lands in a^{i+1} ⊗ b^j
            if let Some(&t_off) = dst.get(&(i + 1)) {
                let d = a.d(i);
                let bj = b.dim(j);
                for (r, c, v) in d.triplets() {
                    for y in 0..db {
                        trips.push((t_off + r * bj + y, s_off + c * db + y, v.clone()));
                    }
                }
            }
            // (−1)^i x ⊗ dy lands in a^i ⊗ b^{j+1}
            if let Some(&t_off) = dst.get(&i) {
                let d = b.d(j);
                let bj1 = b.dim(j + 1);
                let sign = if i.rem_euclid(2) == 0 { Scalar::int(1) } else { Scalar::int(-1) };
                for x in 0..da {
                    for (r, c, v) in d.triplets() {
                        trips.push((t_off + x * bj1 + r, s_off + x * db + c, &sign * v));
                    }
                }
            }
        }
        let m = SparseMatrix::from_triplets(bases[(n + 1 - lo) as usize].len(), bases[(n - lo) as usize].len(), trips)
            .expect("tensor indices in range");
        diffs.push(m);
    }
    ChainComplex { lo, bases, diffs }
}

/// Homology of the subcomplex `ker f` without materializing a kernel basis:
/// `rank(d|ker f) = rank [f; d] − rank f`.
pub fn kernel_homology(f: &ChainMap) -> Result<Homology, LinError> {
    let s = f.source();
    let restricted_rank = |k: i64| -> Result<usize, LinError> {
        let fk = f.component(k);
        let stacked = fk.vstack(&s.d(k))?;
        Ok(stacked.rank() - fk.rank())
    };
    let mut dims = Vec::new();
    for k in s.degrees() {
        let ker = s.dim(k) - f.component(k).rank();
        dims.push(ker - restricted_rank(k)? - restricted_rank(k - 1)?);
    }
    Ok(Homology { lo: s.lo(), dims })
}

/// Homology of the quotient complex `target / im f`:
/// `rank(d̄^k) = rank [d^k | f^{k+1}] − rank f^{k+1}`.
pub fn cokernel_homology(f: &ChainMap) -> Result<Homology, LinError> {
    let t = f.target();
    let quotient_rank = |k: i64| -> Result<usize, LinError> {
        let next = f.component(k + 1);
        Ok(t.d(k).hstack(&next)?.rank() - next.rank())
    };
    let mut dims = Vec::new();
    for k in t.degrees() {
        let q = t.dim(k) - f.component(k).rank();
        dims.push(q - quotient_rank(k)? - quotient_rank(k - 1)?);
    }
    Ok(Homology { lo: t.lo(), dims })
}

/// Homology of the image subcomplex `im f ⊆ target`.
pub fn image_homology(f: &ChainMap) -> Result<Homology, LinError> {
    let t = f.target();
    let image_rank = |k: i64| -> usize {
        // d(im f^k) = im (d f^k) = im (f^{k+1} d_S)
        let img = t.d(k).mul(&f.component(k)).expect("shapes");
        img.rank()
    };
    let mut dims = Vec::new();
    for k in t.degrees() {
        let dim = f.component(k).rank();
        dims.push(dim - image_rank(k) - image_rank(k - 1));
    }
    Ok(Homology { lo: t.lo(), dims })
}

/// Serialized complex: per-degree labels and the differentials in the
/// triple-list matrix form.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComplexJson {
    pub lo: i64,
    pub bases: Vec<Vec<BasisLabel>>,
    pub differentials: Vec<MatrixJson>,
}

impl From<&ChainComplex> for ComplexJson {
    fn from(c: &ChainComplex) -> Self {
        ComplexJson { lo: c.lo, bases: c.bases.clone(), differentials: c.diffs.iter().map(MatrixJson::from).collect() }
    }
}

impl TryFrom<&ComplexJson> for ChainComplex {
    type Error = LinError;

    fn try_from(j: &ComplexJson) -> Result<Self, LinError> {
        let diffs = j.differentials.iter().map(SparseMatrix::try_from).collect::<Result<Vec<_>, _>>()?;
        ChainComplex::new(j.lo, j.bases.clone(), diffs)
    }
}

/// Rank of a family of sparse vectors.
pub fn span_rank(vectors: &[SparseVec]) -> usize {
    rank_of_rows(vectors.iter().cloned())
}

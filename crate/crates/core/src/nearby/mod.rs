//! Formal resolutions of nearby-cycle sheaves by strata terms `a_{l1,l2∗}Λ`,
//! the twist map `N̄` between them, and its kernel and cokernel complexes.

mod builders;
mod graded;
mod kernels;

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::exactlin::{BasisLabel, ChainComplex, ChainMap, LinError, Scalar, SparseMatrix};
use crate::strata::{Realize, StrataError};

pub use builders::{
    alternating_power_map, build_l, build_nbar, build_p, build_product_summand, build_r, build_semistable_resolution,
    cokernel_projection, kernel_embedding, AltSource,
};
pub use graded::{graded_ker_quotient, monodromy_graded_terms, semistable_monodromy_graded};
pub use kernels::verify_kernel_cokernel;

#[derive(Debug, thiserror::Error)]
pub enum NearbyError {
    #[error(transparent)]
    Strata(#[from] StrataError),
    #[error(transparent)]
    Lin(#[from] LinError),
    /// `degree` is the first failing degree; `blocks` collects the
    /// `(l1, l2, copy)` coordinates touched by the defect in every degree.
    #[error("not a chain map: commutation fails from degree {degree}, blocks {blocks:?}")]
    NotChainMap { degree: i64, blocks: Vec<(usize, Option<usize>, i64)> },
    #[error("not a complex: d∘d ≠ 0 out of degree {degree} at blocks {blocks:?}")]
    NotComplex { degree: i64, blocks: Vec<(usize, Option<usize>, i64)> },
}

/// `c^k_{l1,l2} = min(min(l1,l2)+1, l1+l2−k+1, k+1)`, clamped at 0.
pub fn coefficient(k: i64, l1: i64, l2: i64) -> i64 {
    if k < 0 || l1 < 0 || l2 < 0 {
        return 0;
    }
    (l1.min(l2) + 1).min(l1 + l2 - k + 1).min(k + 1).max(0)
}

/// Counts `0 ≤ l ≤ k` with `l ≤ l1` and `k − l ≤ l2`.
pub fn coefficient_bruteforce(k: i64, l1: i64, l2: i64) -> i64 {
    (0..=k).filter(|&l| l <= l1 && k - l <= l2).count() as i64
}

/// The consecutive copy labels `C^k_{l1,l2} = [max(0,k−l2), min(k,l1)]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IndexWindow {
    pub lo: i64,
    pub hi: i64,
}

impl IndexWindow {
    pub fn len(&self) -> i64 {
        (self.hi - self.lo + 1).max(0)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains(&self, l: i64) -> bool {
        self.lo <= l && l <= self.hi
    }

    pub fn labels(&self) -> Vec<i64> {
        (self.lo..=self.hi).collect()
    }
}

pub fn index_window(k: i64, l1: i64, l2: i64) -> IndexWindow {
    IndexWindow { lo: (k - l2).max(0), hi: k.min(l1) }
}

/// One summand `a_{l1,l2∗}Λ(−twist)^{⊕mult}` in a fixed degree. `l2` is
/// `None` for single-factor terms. A term with no copies is a zero summand
/// kept so block shapes stay total.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SheafTerm {
    pub l1: usize,
    pub l2: Option<usize>,
    pub twist: i64,
    pub degree: i64,
    pub copy_labels: Vec<i64>,
}

impl SheafTerm {
    pub fn single(l: usize, twist: i64, degree: i64) -> Self {
        SheafTerm { l1: l, l2: None, twist, degree, copy_labels: vec![0] }
    }

    pub fn product(l1: usize, l2: usize, twist: i64, degree: i64, copy_labels: Vec<i64>) -> Self {
        SheafTerm { l1, l2: Some(l2), twist, degree, copy_labels }
    }

    pub fn mult(&self) -> usize {
        self.copy_labels.len()
    }

    pub fn block(&self) -> (usize, Option<usize>) {
        (self.l1, self.l2)
    }

    fn copy_position(&self, label: i64) -> Option<usize> {
        self.copy_labels.iter().position(|&c| c == label)
    }
}

/// Which factor a `∧δ` component acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Factor {
    First,
    Second,
}

/// `coeff · ∧δ_factor` from copy `src_copy` of term `src` to copy
/// `dst_copy` of term `dst` in the next degree (indices are positions).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FormalEntry {
    pub src: usize,
    pub src_copy: usize,
    pub dst: usize,
    pub dst_copy: usize,
    pub coeff: i64,
    pub factor: Factor,
}

/// A degree-indexed list of sheaf terms with formal differentials.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SheafComplex {
    lo: i64,
    terms: Vec<Vec<SheafTerm>>,
    diffs: Vec<Vec<FormalEntry>>,
}

/// `coeff · id` from copy `src_copy` of term `src` to copy `dst_copy` of
/// term `dst` in the same degree; both terms live on the same stratum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MapEntry {
    pub src: usize,
    pub src_copy: usize,
    pub dst: usize,
    pub dst_copy: usize,
    pub coeff: i64,
}

/// A degree-preserving map of sheaf complexes acting as scalar multiples of
/// the identity between copies of the same stratum.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SheafMap {
    pub source: SheafComplex,
    pub target: SheafComplex,
    entries: BTreeMap<i64, Vec<MapEntry>>,
}

impl SheafComplex {
    pub fn empty() -> Self {
        SheafComplex { lo: 0, terms: Vec::new(), diffs: Vec::new() }
    }

    pub(crate) fn from_parts(lo: i64, terms: Vec<Vec<SheafTerm>>, diffs: Vec<Vec<FormalEntry>>) -> Self {
        debug_assert_eq!(diffs.len(), terms.len().saturating_sub(1));
        SheafComplex { lo, terms, diffs }
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi_exclusive(&self) -> i64 {
        self.lo + self.terms.len() as i64
    }

    pub fn is_empty(&self) -> bool {
        self.terms.iter().all(|t| t.iter().all(|x| x.mult() == 0))
    }

    pub fn terms(&self, degree: i64) -> &[SheafTerm] {
        if degree < self.lo {
            return &[];
        }
        self.terms.get((degree - self.lo) as usize).map_or(&[], |t| t.as_slice())
    }

    pub fn all_terms(&self) -> impl Iterator<Item = &SheafTerm> {
        self.terms.iter().flatten()
    }

    /// Terms with at least one copy.
    pub fn nonzero_terms(&self) -> impl Iterator<Item = &SheafTerm> {
        self.all_terms().filter(|t| t.mult() > 0)
    }

    pub fn differential(&self, degree: i64) -> &[FormalEntry] {
        if degree < self.lo {
            return &[];
        }
        self.diffs.get((degree - self.lo) as usize).map_or(&[], |d| d.as_slice())
    }

    fn term_index(&self, degree: i64, block: (usize, Option<usize>)) -> Option<usize> {
        self.terms(degree).iter().position(|t| t.block() == block)
    }

    /// Negates every differential entry leaving the given block. Used to
    /// inject a known sign fault.
    pub fn flip_block_sign(&mut self, l1: usize, l2: Option<usize>) {
        for (i, entries) in self.diffs.iter_mut().enumerate() {
            let terms = &self.terms[i];
            for e in entries.iter_mut() {
                if terms[e.src].block() == (l1, l2) {
                    e.coeff = -e.coeff;
                }
            }
        }
    }

    /// Evaluates the complex on a stalk or fiber: one basis vector per
    /// (term, copy, piece), differentials `coeff · ∧δ` with the subset sign.
    pub fn realize(&self, on: &dyn Realize) -> Result<ChainComplex, NearbyError> {
        let layout = Layout::new(self, on)?;
        let mut bases = Vec::with_capacity(self.terms.len());
        for (i, terms) in self.terms.iter().enumerate() {
            let mut basis = Vec::with_capacity(layout.dims[i]);
            for (t, term) in terms.iter().enumerate() {
                let pieces = &layout.pieces[&term.block()];
                for &copy in &term.copy_labels {
                    for &(a, b) in pieces {
                        basis.push(BasisLabel::Stratum {
                            l1: term.l1,
                            l2: term.l2,
                            copy,
                            j1: crate::combinat::elements(a),
                            j2: if term.l2.is_some() { crate::combinat::elements(b) } else { Vec::new() },
                        });
                    }
                }
                debug_assert_eq!(basis.len(), layout.offsets[i][t] + term.mult() * pieces.len());
            }
            bases.push(basis);
        }
        let mut diffs = Vec::with_capacity(self.diffs.len());
        for (i, entries) in self.diffs.iter().enumerate() {
            let mut trips = Vec::new();
            for e in entries {
                let src = &self.terms[i][e.src];
                let dst = &self.terms[i + 1][e.dst];
                let src_pieces = &layout.pieces[&src.block()];
                let dst_pieces = &layout.pieces[&dst.block()];
                let src_index = &layout.index[&src.block()];
                let so = layout.offsets[i][e.src] + e.src_copy * src_pieces.len();
                let to = layout.offsets[i + 1][e.dst] + e.dst_copy * dst_pieces.len();
                for (row, &(a, b)) in dst_pieces.iter().enumerate() {
                    let moving = match e.factor {
                        Factor::First => a,
                        Factor::Second => b,
                    };
                    for bit in 0..32u32 {
                        if moving >> bit & 1 == 0 {
                            continue;
                        }
                        let face = match e.factor {
                            Factor::First => (a & !(1 << bit), b),
                            Factor::Second => (a, b & !(1 << bit)),
                        };
                        if let Some(&col) = src_index.get(&face) {
                            // sign (−1)^{position of the new element − 1}
                            let below = (moving & ((1u32 << bit) - 1)).count_ones() as i64;
                            let v = e.coeff * crate::combinat::sign(below);
                            trips.push((to + row, so + col, Scalar::int(v)));
                        }
                    }
                }
            }
            diffs.push(SparseMatrix::from_triplets(layout.dims[i + 1], layout.dims[i], trips)?);
        }
        Ok(ChainComplex::new(self.lo, bases, diffs)?)
    }

    /// Realizes and asserts `d∘d = 0`, naming offending blocks on failure.
    pub fn realize_checked(&self, on: &dyn Realize) -> Result<ChainComplex, NearbyError> {
        let c = self.realize(on)?;
        if let Some(&degree) = c.dd_failures()?.first() {
            let dd = c.d(degree + 1).mul(&c.d(degree))?;
            return Err(NearbyError::NotComplex { degree, blocks: blocks_of_columns(&dd, c.basis(degree)) });
        }
        Ok(c)
    }
}

fn block_of(label: &BasisLabel) -> Option<(usize, Option<usize>, i64)> {
    match label {
        BasisLabel::Stratum { l1, l2, copy, .. } => Some((*l1, *l2, *copy)),
        _ => None,
    }
}

/// Distinct `(l1, l2, copy)` of the columns where `m` is nonzero.
pub(crate) fn blocks_of_columns(m: &SparseMatrix, labels: &[BasisLabel]) -> Vec<(usize, Option<usize>, i64)> {
    let mut out: Vec<_> = m.triplets().filter_map(|(_, c, _)| block_of(&labels[c])).collect();
    out.sort();
    out.dedup();
    out
}

type Block = (usize, Option<usize>);
type Piece = (u32, u32);

/// Piece lists and offsets shared by a realization.
struct Layout {
    pieces: HashMap<Block, Vec<Piece>>,
    index: HashMap<Block, HashMap<Piece, usize>>,
    offsets: Vec<Vec<usize>>,
    dims: Vec<usize>,
}

impl Layout {
    fn new(c: &SheafComplex, on: &dyn Realize) -> Result<Self, StrataError> {
        let mut pieces = HashMap::new();
        let mut index = HashMap::new();
        let mut offsets = Vec::new();
        let mut dims = Vec::new();
        for terms in &c.terms {
            let mut off = Vec::with_capacity(terms.len());
            let mut total = 0;
            for t in terms {
                if let std::collections::hash_map::Entry::Vacant(e) = pieces.entry(t.block()) {
                    let p = on.pieces(t.l1, t.l2)?;
                    index.insert(t.block(), p.iter().enumerate().map(|(i, &x)| (x, i)).collect());
                    e.insert(p);
                }
                off.push(total);
                total += t.mult() * pieces[&t.block()].len();
            }
            offsets.push(off);
            dims.push(total);
        }
        Ok(Layout { pieces, index, offsets, dims })
    }
}

impl SheafMap {
    pub(crate) fn new(source: SheafComplex, target: SheafComplex, entries: BTreeMap<i64, Vec<MapEntry>>) -> Self {
        SheafMap { source, target, entries }
    }

    pub fn entries(&self, degree: i64) -> &[MapEntry] {
        self.entries.get(&degree).map_or(&[], |e| e.as_slice())
    }

    /// Copy matrix of the map on one stratum block: rows are target copies,
    /// columns source copies.
    pub fn block_matrix(&self, degree: i64, block: (usize, Option<usize>)) -> SparseMatrix {
        let s = self.source.term_index(degree, block);
        let t = self.target.term_index(degree, block);
        let rows = t.map_or(0, |t| self.target.terms(degree)[t].mult());
        let cols = s.map_or(0, |s| self.source.terms(degree)[s].mult());
        let trips = self
            .entries(degree)
            .iter()
            .filter(|e| Some(e.src) == s && Some(e.dst) == t)
            .map(|e| (e.dst_copy, e.src_copy, Scalar::int(e.coeff)));
        SparseMatrix::from_triplets(rows, cols, trips).expect("copy indices in range")
    }

    /// Negates the map on one stratum block.
    pub fn flip_block_sign(&mut self, l1: usize, l2: Option<usize>) {
        for (&deg, entries) in self.entries.iter_mut() {
            let terms = self.source.terms(deg);
            for e in entries.iter_mut() {
                if terms[e.src].block() == (l1, l2) {
                    e.coeff = -e.coeff;
                }
            }
        }
    }

    /// Realizes source, target and the map (identity on pieces).
    pub fn realize(&self, on: &dyn Realize) -> Result<ChainMap, NearbyError> {
        let src = self.source.realize(on)?;
        let tgt = self.target.realize(on)?;
        let sl = Layout::new(&self.source, on)?;
        let tl = Layout::new(&self.target, on)?;
        let mut comps = BTreeMap::new();
        for (&deg, entries) in &self.entries {
            let mut trips = Vec::new();
            let si = (deg - self.source.lo) as usize;
            let ti = (deg - self.target.lo) as usize;
            for e in entries {
                let block = self.source.terms(deg)[e.src].block();
                debug_assert_eq!(block, self.target.terms(deg)[e.dst].block());
                let np = sl.pieces[&block].len();
                let so = sl.offsets[si][e.src] + e.src_copy * np;
                let to = tl.offsets[ti][e.dst] + e.dst_copy * np;
                for p in 0..np {
                    trips.push((to + p, so + p, Scalar::int(e.coeff)));
                }
            }
            comps.insert(deg, SparseMatrix::from_triplets(tgt.dim(deg), src.dim(deg), trips)?);
        }
        Ok(ChainMap::new(src, tgt, comps)?)
    }

    /// Realizes and asserts commutation with the differentials; failures
    /// name the source blocks where the defect is supported.
    pub fn realize_checked(&self, on: &dyn Realize) -> Result<ChainMap, NearbyError> {
        let f = self.realize(on)?;
        let failures = f.commutation_failures()?;
        if let Some(&degree) = failures.first() {
            let mut blocks = Vec::new();
            for &deg in &failures {
                let defect = f.commutation_defect(deg)?;
                blocks.extend(blocks_of_columns(&defect, f.source().basis(deg)));
                blocks.extend(blocks_of_columns(&defect.transpose(), f.target().basis(deg + 1)));
            }
            blocks.sort();
            blocks.dedup();
            return Err(NearbyError::NotChainMap { degree, blocks });
        }
        Ok(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coefficient_examples() {
        for k in 0..6 {
            assert_eq!(coefficient(k, k, k), k + 1);
        }
        assert_eq!(coefficient(1, 0, 1), 1);
        assert_eq!(coefficient(1, 1, 1), 2);
        assert_eq!(coefficient(2, 2, 2), 3);
        assert_eq!(coefficient_bruteforce(2, 2, 2), 3);
        assert_eq!(coefficient_bruteforce(1, 0, 0), 0);
        assert_eq!(coefficient(1, 0, 0), 0);
        for l1 in 0..5 {
            for l2 in 0..5 {
                assert_eq!(coefficient_bruteforce(0, l1, l2), 1);
            }
        }
    }

    #[test]
    fn odd_diagonal_keeps_min_plus_one() {
        for k in 1..6 {
            for l1 in 0..2 * k {
                let l2 = 2 * k - 1 - l1;
                assert_eq!(coefficient(k, l1, l2), l1.min(l2) + 1);
                assert_eq!(coefficient(k - 1, l1, l2), l1.min(l2) + 1);
            }
        }
    }

    #[test]
    fn window_matches_coefficient() {
        for k in 0..8 {
            for l1 in 0..6 {
                for l2 in 0..6 {
                    assert_eq!(index_window(k, l1, l2).len(), coefficient(k, l1, l2));
                }
            }
        }
    }
}

//! Nilpotent operators: kernel and image filtrations, the bigraded pieces
//! `Gr^q Gr_p`, the monodromy filtration and a Jordan-type oracle.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::exactlin::{SparseMatrix, SparseVec, Subspace};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MonodromyError {
    #[error("operator must be square, got {0}x{1}")]
    NotSquare(usize, usize),
    #[error("operator is not nilpotent")]
    NotNilpotent,
}

/// A nilpotent endomorphism `N` of `Q^dim`.
#[derive(Debug, Clone)]
pub struct NilpotentOperator {
    n: SparseMatrix,
    order: usize,
    /// `N^e` for `e = 0..=order`.
    powers: Vec<SparseMatrix>,
}

impl NilpotentOperator {
    pub fn new(n: SparseMatrix) -> Result<Self, MonodromyError> {
        if n.rows() != n.cols() {
            return Err(MonodromyError::NotSquare(n.rows(), n.cols()));
        }
        let dim = n.rows();
        let mut powers = vec![SparseMatrix::identity(dim)];
        while !powers.last().unwrap().is_zero() {
            if powers.len() > dim {
                return Err(MonodromyError::NotNilpotent);
            }
            let next = n.mul(powers.last().unwrap()).expect("square");
            powers.push(next);
        }
        let order = powers.len() - 1;
        Ok(NilpotentOperator { n, order, powers })
    }

    pub fn dim(&self) -> usize {
        self.n.rows()
    }

    pub fn matrix(&self) -> &SparseMatrix {
        &self.n
    }

    /// Least `e` with `N^e = 0`.
    pub fn order(&self) -> usize {
        self.order
    }

    /// `N^e`, zero for `e ≥ order`.
    pub fn power(&self, e: usize) -> SparseMatrix {
        self.powers.get(e).cloned().unwrap_or_else(|| SparseMatrix::zeros(self.dim(), self.dim()))
    }
}

/// `ker N^p` and `im N^q` for `p, q = 0..=order`.
pub fn kernel_image_filtrations(op: &NilpotentOperator) -> (Vec<Subspace>, Vec<Subspace>) {
    let kers = (0..=op.order()).map(|p| Subspace::kernel(&op.power(p))).collect();
    let ims = (0..=op.order()).map(|q| Subspace::image(&op.power(q))).collect();
    (kers, ims)
}

/// The spaces `W(p, q) = ker N^p ∩ im N^q`, for `0 ≤ p, q ≤ order`.
#[derive(Debug, Clone)]
pub struct KernelImageGrid {
    order: usize,
    dim: usize,
    w: Vec<Vec<Subspace>>,
}

impl KernelImageGrid {
    pub fn new(op: &NilpotentOperator) -> Self {
        let (kers, ims) = kernel_image_filtrations(op);
        let w = kers.iter().map(|k| ims.iter().map(|i| k.intersect(i)).collect()).collect();
        KernelImageGrid { order: op.order(), dim: op.dim(), w }
    }

    /// `W(p, q)` with `p, q` clamped to where the filtrations stabilize.
    pub fn w(&self, p: i64, q: i64) -> Subspace {
        if p <= 0 || q > self.order as i64 {
            return Subspace::zero(self.dim);
        }
        let p = (p as usize).min(self.order);
        let q = q.max(0) as usize;
        self.w[p][q].clone()
    }

    /// `dim Gr^q Gr_p = dim W(p,q) − dim(W(p−1,q) + W(p,q+1))`.
    pub fn gr_dim(&self, p: i64, q: i64) -> usize {
        let a = self.w(p, q);
        let b = self.w(p - 1, q).sum(&self.w(p, q + 1));
        a.dim() - b.dim()
    }
}

/// `dim Gr^q Gr_p` for `1 ≤ p ≤ order`, `0 ≤ q < order`.
pub fn gr_q_gr_p(op: &NilpotentOperator) -> BTreeMap<(usize, usize), usize> {
    let grid = KernelImageGrid::new(op);
    gr_q_gr_p_from(&grid)
}

pub fn gr_q_gr_p_from(grid: &KernelImageGrid) -> BTreeMap<(usize, usize), usize> {
    let mut out = BTreeMap::new();
    for p in 1..=grid.order {
        for q in 0..grid.order {
            out.insert((p, q), grid.gr_dim(p as i64, q as i64));
        }
    }
    out
}

/// An increasing filtration `M_r` of `Q^ambient`, indexed over `lo..=hi`;
/// levels below `lo` are 0 and above `hi` are `M_hi`.
#[derive(Debug, Clone)]
pub struct Filtration {
    ambient: usize,
    lo: i64,
    levels: Vec<Subspace>,
}

impl Filtration {
    pub fn new(ambient: usize, lo: i64, levels: Vec<Subspace>) -> Self {
        Filtration { ambient, lo, levels }
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.lo + self.levels.len() as i64 - 1
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn level(&self, r: i64) -> Subspace {
        if r < self.lo || self.levels.is_empty() {
            return Subspace::zero(self.ambient);
        }
        let i = ((r - self.lo) as usize).min(self.levels.len() - 1);
        self.levels[i].clone()
    }

    pub fn dim(&self, r: i64) -> usize {
        self.level(r).dim()
    }

    pub fn gr_dim(&self, r: i64) -> usize {
        self.dim(r) - self.dim(r - 1)
    }

    /// Nonzero `dim Gr_r` values.
    pub fn gr_dims(&self) -> BTreeMap<i64, usize> {
        (self.lo..=self.hi()).map(|r| (r, self.gr_dim(r))).filter(|(_, d)| *d > 0).collect()
    }

    /// Copy with `M_r` replaced by `M_r + span(v)`.
    pub fn perturbed(&self, r: i64, v: SparseVec) -> Self {
        let mut f = self.clone();
        if r >= self.lo && r <= self.hi() {
            let i = (r - self.lo) as usize;
            f.levels[i] = f.levels[i].sum(&Subspace::span(self.ambient, vec![v]));
        }
        f
    }
}

/// `M_r = Σ_{p−q−1=r, p≥1, q≥0} W(p, q)`, for `−order ≤ r ≤ order − 1`.
pub fn monodromy_filtration(op: &NilpotentOperator) -> Filtration {
    monodromy_filtration_from(&KernelImageGrid::new(op))
}

pub fn monodromy_filtration_from(grid: &KernelImageGrid) -> Filtration {
    let order = grid.order as i64;
    if order == 0 {
        return Filtration::new(grid.dim, 0, vec![Subspace::zero(0)]);
    }
    let levels = (-order..order)
        .map(|r| {
            (0..=order).fold(Subspace::zero(grid.dim), |acc, q| {
                let p = r + 1 + q;
                if p < 1 {
                    acc
                } else {
                    acc.sum(&grid.w(p, q))
                }
            })
        })
        .collect();
    Filtration::new(grid.dim, -order, levels)
}

/// Which defining property of a monodromy filtration fails, if any.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum FiltrationDefect {
    NotIncreasing(i64),
    NotExhaustive,
    ShiftFails(i64),
    /// `N^r : Gr_r → Gr_{−r}` has unequal dimensions or is not onto.
    NotIsomorphic(i64),
}

/// Checks: increasing, 0 below and everything above the range,
/// `N M_r ⊆ M_{r−2}`, and `N^r : Gr_r ≅ Gr_{−r}` for `r ≥ 1`.
pub fn filtration_defects(op: &NilpotentOperator, m: &Filtration) -> Vec<FiltrationDefect> {
    let mut out = Vec::new();
    let (lo, hi) = (m.lo() - 1, m.hi() + 1);
    if m.dim(lo) != 0 || m.dim(hi) != op.dim() {
        out.push(FiltrationDefect::NotExhaustive);
    }
    for r in lo..hi {
        if !m.level(r + 1).contains_space(&m.level(r)) {
            out.push(FiltrationDefect::NotIncreasing(r));
        }
    }
    for r in lo..=hi {
        if !m.level(r - 2).contains_space(&m.level(r).map(op.matrix())) {
            out.push(FiltrationDefect::ShiftFails(r));
        }
    }
    for r in 1..=hi.max(-lo) {
        let image = m.level(r).map(&op.power(r as usize));
        let target = m.level(-r);
        let onto = target.contains_space(&image) && image.sum(&m.level(-r - 1)).equals(&target);
        if m.gr_dim(r) != m.gr_dim(-r) || !onto {
            out.push(FiltrationDefect::NotIsomorphic(r));
        }
    }
    out
}

/// Jordan type read off the rank sequence of the powers of `N`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct JordanData {
    /// `rank N^e` for `e = 0..=order`.
    pub ranks: Vec<usize>,
    /// Block size → number of blocks.
    pub blocks: BTreeMap<usize, usize>,
    /// Predicted nonzero `dim Gr_r`.
    pub predicted_gr: BTreeMap<i64, usize>,
}

pub fn jordan_oracle(op: &NilpotentOperator) -> JordanData {
    let ranks: Vec<usize> = (0..=op.order()).map(|e| op.power(e).rank()).collect();
    jordan_from_ranks(&ranks)
}

/// Blocks of size `≥ e` number `ρ_{e−1} − ρ_e`; a block of size `s`
/// contributes to `Gr_r` for `r = −(s−1), −(s−3), …, s−1`.
pub fn jordan_from_ranks(ranks: &[usize]) -> JordanData {
    let at = |e: usize| ranks.get(e).copied().unwrap_or(0);
    let mut blocks = BTreeMap::new();
    for e in 1..ranks.len() {
        let at_least = at(e - 1) - at(e);
        let at_least_next = at(e) - at(e + 1);
        if at_least > at_least_next {
            blocks.insert(e, at_least - at_least_next);
        }
    }
    let mut predicted_gr = BTreeMap::new();
    for (&s, &count) in &blocks {
        let s = s as i64;
        for r in (-(s - 1)..=s - 1).step_by(2) {
            *predicted_gr.entry(r).or_insert(0) += count;
        }
    }
    JordanData { ranks: ranks.to_vec(), blocks, predicted_gr }
}

/// Direct sum of nilpotent Jordan blocks (`N e_i = e_{i−1}` within a block).
pub fn jordan_matrix(blocks: &[usize]) -> SparseMatrix {
    let dim: usize = blocks.iter().sum();
    let mut trips = Vec::new();
    let mut start = 0;
    for &b in blocks {
        for i in 1..b {
            trips.push((start + i - 1, start + i, crate::exactlin::Scalar::int(1)));
        }
        start += b;
    }
    SparseMatrix::from_triplets(dim, dim, trips).expect("in range")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlin::Scalar;

    fn op(blocks: &[usize]) -> NilpotentOperator {
        NilpotentOperator::new(jordan_matrix(blocks)).unwrap()
    }

    #[test]
    fn rejects_non_nilpotent() {
        assert_eq!(NilpotentOperator::new(SparseMatrix::identity(2)).unwrap_err(), MonodromyError::NotNilpotent);
        assert!(NilpotentOperator::new(SparseMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn filtrations_of_one_block() {
        let (k, i) = kernel_image_filtrations(&op(&[3]));
        assert_eq!(k.iter().map(Subspace::dim).collect::<Vec<_>>(), vec![0, 1, 2, 3]);
        assert_eq!(i.iter().map(Subspace::dim).collect::<Vec<_>>(), vec![3, 2, 1, 0]);
        let z = op(&[1, 1, 1]);
        let (k, _) = kernel_image_filtrations(&z);
        assert_eq!(k.iter().map(Subspace::dim).collect::<Vec<_>>(), vec![0, 3]);
    }

    #[test]
    fn bigraded_pieces_of_one_block() {
        for s in 1..6 {
            let g = gr_q_gr_p(&op(&[s]));
            for (&(p, q), &d) in &g {
                assert_eq!(d, usize::from(p + q == s), "s={s} p={p} q={q}");
            }
        }
        let g = gr_q_gr_p(&op(&[1, 1, 1, 1]));
        assert_eq!(g.get(&(1, 0)), Some(&4));
        assert_eq!(g.values().sum::<usize>(), 4);
    }

    #[test]
    fn monodromy_filtration_examples() {
        let m = monodromy_filtration(&op(&[3]));
        assert_eq!(m.gr_dims(), [(-2, 1), (0, 1), (2, 1)].into_iter().collect());
        let m = monodromy_filtration(&op(&[1, 1]));
        assert_eq!(m.gr_dims(), [(0, 2)].into_iter().collect());
        let o = op(&[2, 2, 1]);
        let m = monodromy_filtration(&o);
        assert_eq!(m.gr_dims(), [(-1, 2), (0, 1), (1, 2)].into_iter().collect());
        assert!(filtration_defects(&o, &m).is_empty());
    }

    #[test]
    fn single_block_level_dimensions() {
        for s in 1..7i64 {
            let m = monodromy_filtration(&op(&[s as usize]));
            for r in -s - 1..=s + 1 {
                let want = ((r + s + 1) / 2).clamp(0, s) as usize;
                let want = if r + s + 1 < 0 { 0 } else { want };
                assert_eq!(m.dim(r), want, "s={s} r={r}");
            }
        }
    }

    #[test]
    fn jordan_oracle_examples() {
        let j = jordan_from_ranks(&[3, 2, 1, 0]);
        assert_eq!(j.blocks, [(3, 1)].into_iter().collect());
        let j = jordan_from_ranks(&[4, 0]);
        assert_eq!(j.blocks, [(1, 4)].into_iter().collect());
        assert_eq!(jordan_oracle(&op(&[2, 2, 1])).blocks, [(1, 1), (2, 2)].into_iter().collect());
    }

    #[test]
    fn perturbations_break_the_filtration() {
        let o = op(&[3, 2]);
        let m = monodromy_filtration(&o);
        for r in m.lo()..=m.hi() {
            for i in 0..o.dim() {
                let v = vec![(i, Scalar::int(1))];
                if m.level(r).contains(&v) {
                    continue;
                }
                assert!(!filtration_defects(&o, &m.perturbed(r, v)).is_empty(), "r={r} e{i}");
            }
        }
    }
}

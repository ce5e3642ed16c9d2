//! Combinatorial model of the special fiber of a product of two strictly
//! semistable schemes, and realization of formal sheaf terms.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::combinat::{binom, elements, mask_of, subsets};

#[derive(Debug, thiserror::Error)]
pub enum StrataError {
    #[error("invalid fiber model: {0}")]
    Invalid(String),
    #[error("malformed fiber JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("fiber model with explicit multiplicities has no incidence data; only dimensions can be realized")]
    NoIncidence,
}

/// One row `(degree j, weight w, dimension)` of a stratum cohomology table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CohomologyRow {
    pub degree: i64,
    pub weight: i64,
    pub dim: u64,
}

/// Special fiber of `X₁ × X₂`: strata `Y^{(l1,l2)}` for `0 ≤ l1,l2 ≤ n−1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiberModel {
    n: usize,
    m1: usize,
    m2: usize,
    dim_y: i64,
    /// Overrides of the default multiplicity, keyed by `(J1, J2)` bitmasks.
    multiplicities: BTreeMap<(u32, u32), u64>,
    cohomology: Option<BTreeMap<(usize, usize), Vec<CohomologyRow>>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct MultiplicityDoc {
    #[serde(rename = "J1")]
    j1: Vec<u8>,
    #[serde(rename = "J2")]
    j2: Vec<u8>,
    count: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ProductTableDoc {
    l1: usize,
    l2: usize,
    table: Vec<(i64, i64, u64)>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FiberDoc {
    n: usize,
    m1: usize,
    m2: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    dim: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    multiplicities: Option<Vec<MultiplicityDoc>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    cohomology: Option<Vec<ProductTableDoc>>,
}

fn rows_of(table: &[(i64, i64, u64)]) -> Vec<CohomologyRow> {
    let mut rows: Vec<CohomologyRow> =
        table.iter().map(|&(degree, weight, dim)| CohomologyRow { degree, weight, dim }).collect();
    rows.sort();
    rows
}

impl FiberModel {
    /// Generic fiber: every `(J1, J2)` with `|J1|,|J2| ≤ n` has one component.
    /// The ambient dimension defaults to `2n − 2`.
    pub fn new(n: usize, m1: usize, m2: usize) -> Result<Self, StrataError> {
        if n == 0 || m1 == 0 || m2 == 0 {
            return Err(StrataError::Invalid("n, m1, m2 must be positive".into()));
        }
        if m1 > 31 || m2 > 31 {
            return Err(StrataError::Invalid("component counts above 31 are unsupported".into()));
        }
        Ok(FiberModel {
            n,
            m1,
            m2,
            dim_y: 2 * n as i64 - 2,
            multiplicities: BTreeMap::new(),
            cohomology: None,
        })
    }

    pub fn with_dim(mut self, dim_y: i64) -> Result<Self, StrataError> {
        self.dim_y = dim_y;
        if let Some(c) = self.cohomology.take() {
            self = self.with_cohomology(c)?;
        }
        Ok(self)
    }

    pub fn with_multiplicity(mut self, j1: &[u8], j2: &[u8], count: u64) -> Result<Self, StrataError> {
        let key = self.key(j1, j2)?;
        self.multiplicities.insert(key, count);
        self.check_support()?;
        Ok(self)
    }

    pub fn with_cohomology(mut self, tables: BTreeMap<(usize, usize), Vec<CohomologyRow>>) -> Result<Self, StrataError> {
        for (&(l1, l2), rows) in &tables {
            if l1 >= self.n || l2 >= self.n {
                return Err(StrataError::Invalid(format!("cohomology for stratum ({l1},{l2}) outside n={}", self.n)));
            }
            let top = 2 * (self.dim_y - l1 as i64 - l2 as i64);
            if let Some(r) = rows.iter().find(|r| r.degree < 0 || r.degree > top) {
                return Err(StrataError::Invalid(format!(
                    "stratum ({l1},{l2}): degree {} outside [0, {top}]",
                    r.degree
                )));
            }
        }
        self.cohomology = Some(tables);
        Ok(self)
    }

    fn key(&self, j1: &[u8], j2: &[u8]) -> Result<(u32, u32), StrataError> {
        let check = |j: &[u8], m: usize, which: &str| -> Result<(), StrataError> {
            if j.is_empty() {
                return Err(StrataError::Invalid(format!("{which} is empty")));
            }
            if j.windows(2).any(|w| w[0] >= w[1]) {
                return Err(StrataError::Invalid(format!("{which} = {j:?} is not strictly increasing")));
            }
            if j.iter().any(|&e| e == 0 || e as usize > m) {
                return Err(StrataError::Invalid(format!("{which} = {j:?} has entries outside 1..={m}")));
            }
            Ok(())
        };
        check(j1, self.m1, "J1")?;
        check(j2, self.m2, "J2")?;
        Ok((mask_of(j1), mask_of(j2)))
    }

    /// Nonempty strata must have nonempty faces: removing one element from
    /// either index set of a positive-count pair keeps the count positive.
    fn check_support(&self) -> Result<(), StrataError> {
        for (&(a, b), &count) in &self.multiplicities {
            if count == 0 {
                continue;
            }
            let faces = elements(a)
                .into_iter()
                .filter(|_| a.count_ones() > 1)
                .map(|e| (a & !(1 << (e - 1)), b))
                .chain(elements(b).into_iter().filter(|_| b.count_ones() > 1).map(|e| (a, b & !(1 << (e - 1)))));
            for (fa, fb) in faces {
                if self.multiplicity_mask(fa, fb) == 0 {
                    return Err(StrataError::Invalid(format!(
                        "({:?},{:?}) has count {count} but its face ({:?},{:?}) is empty",
                        elements(a),
                        elements(b),
                        elements(fa),
                        elements(fb)
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self, StrataError> {
        let doc: FiberDoc = serde_json::from_str(text)?;
        let mut f = FiberModel::new(doc.n, doc.m1, doc.m2)?;
        if let Some(d) = doc.dim {
            f.dim_y = d;
        }
        for m in doc.multiplicities.unwrap_or_default() {
            let key = f.key(&m.j1, &m.j2)?;
            f.multiplicities.insert(key, m.count);
        }
        f.check_support()?;
        if let Some(tables) = doc.cohomology {
            let mut map = BTreeMap::new();
            for t in tables {
                if map.insert((t.l1, t.l2), rows_of(&t.table)).is_some() {
                    return Err(StrataError::Invalid(format!("duplicate table for stratum ({},{})", t.l1, t.l2)));
                }
            }
            f = f.with_cohomology(map)?;
        }
        Ok(f)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let doc = FiberDoc {
            n: self.n,
            m1: self.m1,
            m2: self.m2,
            dim: (self.dim_y != 2 * self.n as i64 - 2).then_some(self.dim_y),
            multiplicities: (!self.multiplicities.is_empty()).then(|| {
                self.multiplicities
                    .iter()
                    .map(|(&(a, b), &count)| MultiplicityDoc { j1: elements(a), j2: elements(b), count })
                    .collect()
            }),
            cohomology: self.cohomology.as_ref().map(|c| {
                c.iter()
                    .map(|(&(l1, l2), rows)| ProductTableDoc {
                        l1,
                        l2,
                        table: rows.iter().map(|r| (r.degree, r.weight, r.dim)).collect(),
                    })
                    .collect()
            }),
        };
        serde_json::to_value(doc).expect("fiber doc serializes")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m1(&self) -> usize {
        self.m1
    }

    pub fn m2(&self) -> usize {
        self.m2
    }

    pub fn dim_y(&self) -> i64 {
        self.dim_y
    }

    pub fn has_default_multiplicities(&self) -> bool {
        self.multiplicities.iter().all(|(&(a, b), &c)| c == self.default_multiplicity(a, b))
    }

    fn default_multiplicity(&self, a: u32, b: u32) -> u64 {
        let (p, q) = (a.count_ones() as usize, b.count_ones() as usize);
        u64::from(p >= 1 && q >= 1 && p <= self.n && q <= self.n)
    }

    fn multiplicity_mask(&self, a: u32, b: u32) -> u64 {
        self.multiplicities.get(&(a, b)).copied().unwrap_or_else(|| self.default_multiplicity(a, b))
    }

    pub fn multiplicity(&self, j1: &[u8], j2: &[u8]) -> u64 {
        match self.key(j1, j2) {
            Ok((a, b)) => self.multiplicity_mask(a, b),
            Err(_) => 0,
        }
    }

    pub fn cohomology(&self) -> Option<&BTreeMap<(usize, usize), Vec<CohomologyRow>>> {
        self.cohomology.as_ref()
    }

    /// Table of `H^*(Y^{(l1,l2)})`; `None` when the model has no tables.
    /// A stratum missing from a supplied table set has zero cohomology.
    pub fn table(&self, l1: usize, l2: usize) -> Option<&[CohomologyRow]> {
        self.cohomology.as_ref().map(|c| c.get(&(l1, l2)).map_or(&[][..], |v| v.as_slice()))
    }

    /// Generic fiber whose stratum `Y^{(a,b)}` has cohomology only in degree
    /// `dimY − a − b`, with dimension `stratum_count · unit`, pure weight.
    pub fn concentrated(n: usize, m1: usize, m2: usize, unit: u64) -> Result<Self, StrataError> {
        let f = FiberModel::new(n, m1, m2)?;
        let mut tables = BTreeMap::new();
        for a in 0..n {
            for b in 0..n {
                let count = stratum_count(&f, a, b);
                if count == 0 {
                    continue;
                }
                let j = f.dim_y - a as i64 - b as i64;
                tables.insert((a, b), vec![CohomologyRow { degree: j, weight: j, dim: count * unit }]);
            }
        }
        f.with_cohomology(tables)
    }
}

/// Local model `X_{r,s}`: `r` components of the first factor and `s` of the
/// second pass through the point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct StalkPoint {
    pub r: usize,
    pub s: usize,
}

impl StalkPoint {
    pub fn new(r: usize, s: usize) -> Self {
        assert!(r >= 1 && s >= 1, "stalk point needs r, s ≥ 1");
        assert!(r <= 31 && s <= 31, "stalk point counts above 31 are unsupported");
        StalkPoint { r, s }
    }
}

/// Strictly semistable single factor with `m` components, strata `Y^{(l)}`
/// for `0 ≤ l ≤ n−1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SemistableFiber {
    pub n: usize,
    pub m: usize,
    pub dim_y: i64,
    pub cohomology: Option<BTreeMap<usize, Vec<CohomologyRow>>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct SingleTableDoc {
    l: usize,
    table: Vec<(i64, i64, u64)>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SemistableDoc {
    n: usize,
    m: usize,
    #[serde(default)]
    dim: Option<i64>,
    #[serde(default)]
    cohomology: Option<Vec<SingleTableDoc>>,
}

impl SemistableFiber {
    pub fn new(n: usize, m: usize) -> Self {
        SemistableFiber { n, m, dim_y: n as i64 - 1, cohomology: None }
    }

    pub fn from_json(text: &str) -> Result<Self, StrataError> {
        let doc: SemistableDoc = serde_json::from_str(text)?;
        if doc.n == 0 || doc.m == 0 || doc.m > 31 {
            return Err(StrataError::Invalid("n and m must be positive, m ≤ 31".into()));
        }
        let mut f = SemistableFiber::new(doc.n, doc.m);
        if let Some(d) = doc.dim {
            f.dim_y = d;
        }
        if let Some(tables) = doc.cohomology {
            let mut map = BTreeMap::new();
            for t in tables {
                let top = 2 * (f.dim_y - t.l as i64);
                if t.l >= f.n {
                    return Err(StrataError::Invalid(format!("cohomology for stratum {} outside n={}", t.l, f.n)));
                }
                if let Some(&(d, _, _)) = t.table.iter().find(|(d, _, _)| *d < 0 || *d > top) {
                    return Err(StrataError::Invalid(format!("stratum {}: degree {d} outside [0, {top}]", t.l)));
                }
                map.insert(t.l, rows_of(&t.table));
            }
            f.cohomology = Some(map);
        }
        Ok(f)
    }

    /// Chain of `m` projective lines meeting in `m − 1` points.
    pub fn chain_of_lines(m: usize) -> Self {
        let mut tables = BTreeMap::new();
        tables.insert(
            0,
            vec![
                CohomologyRow { degree: 0, weight: 0, dim: m as u64 },
                CohomologyRow { degree: 2, weight: 2, dim: m as u64 },
            ],
        );
        if m > 1 {
            tables.insert(1, vec![CohomologyRow { degree: 0, weight: 0, dim: m as u64 - 1 }]);
        }
        SemistableFiber { n: 2, m, dim_y: 1, cohomology: Some(tables) }
    }

    pub fn table(&self, l: usize) -> Option<&[CohomologyRow]> {
        self.cohomology.as_ref().map(|c| c.get(&l).map_or(&[][..], |v| v.as_slice()))
    }

    pub fn stratum_count(&self, l: usize) -> u64 {
        if l >= self.n {
            0
        } else {
            binom(self.m as u64, l as u64 + 1)
        }
    }
}

/// Either kind of fiber document.
#[derive(Debug, Clone)]
pub enum AnyFiber {
    Product(FiberModel),
    Semistable(SemistableFiber),
}

/// Parses a fiber document; single-factor documents carry `m` instead of
/// `m1`/`m2`.
pub fn load_fiber(text: &str) -> Result<AnyFiber, StrataError> {
    let v: serde_json::Value = serde_json::from_str(text)?;
    if v.get("m").is_some() {
        Ok(AnyFiber::Semistable(SemistableFiber::from_json(text)?))
    } else {
        Ok(AnyFiber::Product(FiberModel::from_json(text)?))
    }
}

/// Number of connected components of `Y^{(l1,l2)}`.
pub fn stratum_count(f: &FiberModel, l1: usize, l2: usize) -> u64 {
    if l1 >= f.m1 || l2 >= f.m2 {
        return 0;
    }
    if f.multiplicities.is_empty() {
        if l1 >= f.n || l2 >= f.n {
            return 0;
        }
        return binom(f.m1 as u64, l1 as u64 + 1) * binom(f.m2 as u64, l2 as u64 + 1);
    }
    let mut total = 0;
    for a in subsets(f.m1, l1 + 1) {
        for b in subsets(f.m2, l2 + 1) {
            total += f.multiplicity_mask(a, b);
        }
    }
    total
}

/// Rank of `R^kψΛ` at a point of type `(r,s)`: `C(r+s−2, k)`.
pub fn stalk_rank_nearby(p: StalkPoint, k: usize) -> u64 {
    binom((p.r + p.s - 2) as u64, k as u64)
}

/// Rank of `i^*R^{k+1}j_*Λ` at a point of type `(r,s)`: `C(r+s−1, k+1)`.
pub fn stalk_rank_fullwedge(p: StalkPoint, k: usize) -> u64 {
    binom((p.r + p.s - 1) as u64, k as u64 + 1)
}

/// Something a formal summand `a_{l1,l2}` can be evaluated on.
pub trait Realize {
    /// Dimension of one copy of `a_{l1,l2}` (`l2 = None` for single-factor terms).
    fn term_dim(&self, l1: usize, l2: Option<usize>) -> u64;

    /// Ordered pieces `(J1, J2)` spanning one copy of `a_{l1,l2}`. Bitmask
    /// `J2` is 0 for single-factor terms.
    fn pieces(&self, l1: usize, l2: Option<usize>) -> Result<Vec<(u32, u32)>, StrataError>;
}

impl Realize for StalkPoint {
    fn term_dim(&self, l1: usize, l2: Option<usize>) -> u64 {
        let a = binom(self.r as u64, l1 as u64 + 1);
        match l2 {
            None => a,
            Some(l2) => a * binom(self.s as u64, l2 as u64 + 1),
        }
    }

    fn pieces(&self, l1: usize, l2: Option<usize>) -> Result<Vec<(u32, u32)>, StrataError> {
        Ok(product_pieces(self.r, self.s, l1, l2))
    }
}

fn product_pieces(m1: usize, m2: usize, l1: usize, l2: Option<usize>) -> Vec<(u32, u32)> {
    let first = subsets(m1, l1 + 1);
    match l2 {
        None => first.into_iter().map(|a| (a, 0)).collect(),
        Some(l2) => {
            let second = subsets(m2, l2 + 1);
            first.iter().flat_map(|&a| second.iter().map(move |&b| (a, b))).collect()
        }
    }
}

impl Realize for FiberModel {
    fn term_dim(&self, l1: usize, l2: Option<usize>) -> u64 {
        match l2 {
            Some(l2) => stratum_count(self, l1, l2),
            None => 0,
        }
    }

    fn pieces(&self, l1: usize, l2: Option<usize>) -> Result<Vec<(u32, u32)>, StrataError> {
        if !self.has_default_multiplicities() {
            return Err(StrataError::NoIncidence);
        }
        let Some(l2) = l2 else {
            return Err(StrataError::Invalid("single-factor term on a product fiber".into()));
        };
        if l1 >= self.n || l2 >= self.n {
            return Ok(Vec::new());
        }
        Ok(product_pieces(self.m1, self.m2, l1, Some(l2)))
    }
}

impl Realize for SemistableFiber {
    fn term_dim(&self, l1: usize, l2: Option<usize>) -> u64 {
        match l2 {
            None => self.stratum_count(l1),
            Some(_) => 0,
        }
    }

    fn pieces(&self, l1: usize, l2: Option<usize>) -> Result<Vec<(u32, u32)>, StrataError> {
        if l2.is_some() {
            return Err(StrataError::Invalid("product term on a single-factor fiber".into()));
        }
        if l1 >= self.n {
            return Ok(Vec::new());
        }
        Ok(product_pieces(self.m, 0, l1, None))
    }
}

/// `mult · dim(a_{l1,l2})` on the given realization.
pub fn realize_term(on: &dyn Realize, term: &crate::nearby::SheafTerm) -> u64 {
    term.mult() as u64 * on.term_dim(term.l1, term.l2)
}

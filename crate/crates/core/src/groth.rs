//! Grothendieck-group combinatorics of induced representations: γ
//! coefficients, Iwahori-fixed dimensions, the alternating collapse and the
//! weights of the resulting `[V^k_{j1 j2}]` terms.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::combinat::{binom_i, factorial, multinomial, sign};
use crate::spectral::WeightOffsets;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GrothError {
    #[error("invalid segment data: {0}")]
    InvalidSegment(String),
    #[error("segment index {index} out of range 1..={len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("gamma is not integral: {0}")]
    NonIntegral(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Tempered,
    QuarterShifted,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Tempered => "tempered",
            Mode::QuarterShifted => "quarter-shifted",
        })
    }
}

/// Segment lengths `s_1..s_t` of an induced representation of rank `n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SegmentDoc", into = "SegmentDoc")]
pub struct SegmentData {
    s: Vec<u64>,
    n: u64,
    mode: Mode,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SegmentDoc {
    s: Vec<u64>,
    #[serde(default)]
    n: Option<u64>,
    mode: Mode,
}

impl TryFrom<SegmentDoc> for SegmentData {
    type Error = GrothError;
    fn try_from(d: SegmentDoc) -> Result<Self, GrothError> {
        let total: u64 = d.s.iter().sum();
        let n = d.n.unwrap_or(match d.mode {
            Mode::Tempered => total,
            Mode::QuarterShifted => 2 * total,
        });
        SegmentData::new(d.s, n, d.mode)
    }
}

impl From<SegmentData> for SegmentDoc {
    fn from(s: SegmentData) -> Self {
        SegmentDoc { s: s.s, n: Some(s.n), mode: s.mode }
    }
}

impl SegmentData {
    pub fn new(s: Vec<u64>, n: u64, mode: Mode) -> Result<Self, GrothError> {
        if s.is_empty() || s.contains(&0) {
            return Err(GrothError::InvalidSegment("segment lengths must be positive and nonempty".into()));
        }
        let total: u64 = s.iter().sum();
        let want = match mode {
            Mode::Tempered => total,
            Mode::QuarterShifted => 2 * total,
        };
        if n != want {
            return Err(GrothError::InvalidSegment(format!("{mode} mode needs n = {want}, got {n}")));
        }
        Ok(SegmentData { s, n, mode })
    }

    pub fn tempered(s: Vec<u64>) -> Result<Self, GrothError> {
        let n = s.iter().sum();
        Self::new(s, n, Mode::Tempered)
    }

    pub fn quarter_shifted(s: Vec<u64>) -> Result<Self, GrothError> {
        let n = 2 * s.iter().sum::<u64>();
        Self::new(s, n, Mode::QuarterShifted)
    }

    pub fn s(&self) -> &[u64] {
        &self.s
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }

    /// Length of segment `j` (1-based).
    pub fn length(&self, j: usize) -> Result<u64, GrothError> {
        if j == 0 || j > self.s.len() {
            return Err(GrothError::IndexOutOfRange { index: j, len: self.s.len() });
        }
        Ok(self.s[j - 1])
    }
}

/// Variant of a `V_{j1 j2}` term: a single term in tempered mode, or `k ∈ {1,2,3}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Single,
    K(u8),
}

impl Variant {
    /// `2ε`: `−1, 0, 1` for `k = 1, 2, 3`.
    pub fn two_epsilon(self) -> i64 {
        match self {
            Variant::Single | Variant::K(2) => 0,
            Variant::K(1) => -1,
            Variant::K(3) => 1,
            Variant::K(k) => panic!("variant {k} out of range"),
        }
    }

    fn multiplicity(self) -> i64 {
        match self {
            Variant::K(2) => 2,
            _ => 1,
        }
    }

    fn all(mode: Mode) -> &'static [Variant] {
        match mode {
            Mode::Tempered => &[Variant::Single],
            Mode::QuarterShifted => &[Variant::K(1), Variant::K(2), Variant::K(3)],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct VTerm {
    pub j1: usize,
    pub j2: usize,
    pub variant: Variant,
}

impl fmt::Display for VTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.variant {
            Variant::Single => write!(f, "V_{{{},{}}}", self.j1, self.j2),
            Variant::K(k) => write!(f, "V^{k}_{{{},{}}}", self.j1, self.j2),
        }
    }
}

/// `m_ξ − 2t_ξ + 2n − s_{j1} − s_{j2} − 2ε`.
pub fn vterm_weight(t: VTerm, seg: &SegmentData, offsets: WeightOffsets) -> Result<i64, GrothError> {
    let (a, b) = (seg.length(t.j1)?, seg.length(t.j2)?);
    Ok(offsets.shift() + 2 * seg.n as i64 - a as i64 - b as i64 - t.variant.two_epsilon())
}

/// Dimension of Iwahori-fixed vectors in a representation induced from
/// blocks of the given sizes: `(Σ b)! / Π b!`.
pub fn iwahori_dim(blocks: &[u64]) -> BigInt {
    multinomial(blocks)
}

fn big(n: u64) -> BigRational {
    BigRational::from_integer(factorial(n))
}

/// One factor of γ: `h!/((s_ji + h − n)! · s_ji! · Π_{j≠ji} (s_j!)²)` in
/// quarter-shifted mode, `h!/((s_ji + h − n)! · Π_{j≠ji} s_j!)` in tempered
/// mode. Zero when `s_ji < n − h`.
pub fn gamma_factor(h: u64, j: usize, seg: &SegmentData) -> Result<BigRational, GrothError> {
    let sj = seg.length(j)?;
    if sj + h < seg.n {
        return Ok(BigRational::zero());
    }
    let mut denom = big(sj + h - seg.n);
    for (i, &x) in seg.s.iter().enumerate() {
        let f = big(x);
        match seg.mode {
            Mode::Tempered if i + 1 != j => denom *= f,
            Mode::Tempered => {}
            Mode::QuarterShifted if i + 1 != j => denom *= &f * &f,
            Mode::QuarterShifted => denom *= f,
        }
    }
    Ok(big(h) / denom)
}

/// `γ^{(h1,h2)}_{j1 j2}` as an exact integer.
pub fn gamma(h1: u64, h2: u64, j1: usize, j2: usize, seg: &SegmentData) -> Result<BigInt, GrothError> {
    let g = gamma_factor(h1, j1, seg)? * gamma_factor(h2, j2, seg)?;
    if !g.is_integer() || g.is_negative() {
        return Err(GrothError::NonIntegral(format!("h=({h1},{h2}) j=({j1},{j2}) s={:?}: {g}", seg.s)));
    }
    Ok(g.to_integer())
}

/// `Σ_{h=n−s}^{n−S} (−1)^{n−S−h} C(s−S, h+s−n)`.
pub fn collapse_sum(s_size: u64, s: u64, n: u64) -> i64 {
    if s < s_size {
        return 0;
    }
    let (lo, hi) = (n as i64 - s as i64, n as i64 - s_size as i64);
    (lo..=hi).map(|h| sign(hi - h) * binom_i((s - s_size) as i64, h + s as i64 - n as i64)).sum()
}

/// A `V` term with coefficient and weight.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Reduced {
    pub term: VTerm,
    #[serde(with = "rational_string")]
    pub coefficient: BigRational,
    pub weight: i64,
}

mod rational_string {
    use num_rational::BigRational;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(x)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

/// Formal sum of `V` terms.
pub type FormalSum = BTreeMap<VTerm, BigRational>;

pub fn to_formal(terms: &[Reduced]) -> FormalSum {
    let mut out = FormalSum::new();
    for r in terms {
        *out.entry(r.term).or_insert_with(BigRational::zero) += &r.coefficient;
    }
    out.retain(|_, c| !c.is_zero());
    out
}

/// Collapsed sum: pairs with `s_{j1} = S`, `s_{j2} = T`, coefficient
/// `(n−S)!(n−T)! s_{j1}! s_{j2}! / Π (s_j!)^e` (`e = 2` tempered, `4`
/// quarter-shifted, times `1, 2, 1` on `V¹, V², V³`).
pub fn reduction_sum(s_size: u64, t_size: u64, seg: &SegmentData, offsets: WeightOffsets) -> Result<Vec<Reduced>, GrothError> {
    let mut out = Vec::new();
    if s_size > seg.n || t_size > seg.n {
        return Ok(out);
    }
    let power = match seg.mode {
        Mode::Tempered => 2,
        Mode::QuarterShifted => 4,
    };
    let denom: BigRational = seg.s.iter().map(|&x| num_traits::pow(big(x), power)).product();
    let t = seg.len();
    for j1 in 1..=t {
        for j2 in 1..=t {
            let (a, b) = (seg.length(j1)?, seg.length(j2)?);
            if a != s_size || b != t_size {
                continue;
            }
            let base = big(seg.n - s_size) * big(seg.n - t_size) * big(a) * big(b) / &denom;
            for &variant in Variant::all(seg.mode) {
                let term = VTerm { j1, j2, variant };
                out.push(Reduced {
                    term,
                    coefficient: &base * BigRational::from_integer(variant.multiplicity().into()),
                    weight: vterm_weight(term, seg, offsets)?,
                });
            }
        }
    }
    Ok(out)
}

/// `Red^{(h1,h2)}` for all `0 ≤ h1, h2 ≤ n`: γ-weighted `V` terms over the
/// pairs with `s_{ji} ≥ n − h_i`.
pub fn red_table(seg: &SegmentData, offsets: WeightOffsets) -> Result<BTreeMap<(u64, u64), Vec<Reduced>>, GrothError> {
    let mut out = BTreeMap::new();
    let t = seg.len();
    for h1 in 0..=seg.n {
        for h2 in 0..=seg.n {
            let mut terms = Vec::new();
            for j1 in 1..=t {
                for j2 in 1..=t {
                    let g = gamma(h1, h2, j1, j2, seg)?;
                    if g.is_zero() {
                        continue;
                    }
                    for &variant in Variant::all(seg.mode) {
                        let term = VTerm { j1, j2, variant };
                        terms.push(Reduced {
                            term,
                            coefficient: BigRational::from_integer(&g * BigInt::from(variant.multiplicity())),
                            weight: vterm_weight(term, seg, offsets)?,
                        });
                    }
                }
            }
            out.insert((h1, h2), terms);
        }
    }
    Ok(out)
}

/// `Σ_{h1=0}^{n−S} Σ_{h2=0}^{n−T} (−1)^{2n−S−T−h1−h2} C(n−S,h1) C(n−T,h2) Red^{(h1,h2)}`.
pub fn inclusion_exclusion_expand(
    s_size: u64,
    t_size: u64,
    n: u64,
    table: &BTreeMap<(u64, u64), Vec<Reduced>>,
) -> FormalSum {
    let mut out = FormalSum::new();
    if s_size > n || t_size > n {
        return out;
    }
    let (a, b) = ((n - s_size) as i64, (n - t_size) as i64);
    for h1 in 0..=a {
        for h2 in 0..=b {
            let c = sign(a + b - h1 - h2) * binom_i(a, h1) * binom_i(b, h2);
            let scale = BigRational::from_integer(c.into());
            for r in table.get(&(h1 as u64, h2 as u64)).into_iter().flatten() {
                *out.entry(r.term).or_insert_with(BigRational::zero) += &scale * &r.coefficient;
            }
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

/// Weight multiplicities of the surviving terms of one pair `(j1, j2)`.
pub fn weight_profile(terms: &[Reduced], j1: usize, j2: usize) -> BTreeMap<i64, BigRational> {
    let mut out = BTreeMap::new();
    for r in terms.iter().filter(|r| (r.term.j1, r.term.j2) == (j1, j2)) {
        *out.entry(r.weight).or_insert_with(BigRational::zero) += &r.coefficient;
    }
    out
}

/// Ratios of a weight profile to its smallest entry.
pub fn profile_ratios(profile: &BTreeMap<i64, BigRational>) -> Vec<BigRational> {
    let Some(min) = profile.values().min().cloned() else { return Vec::new() };
    if min.is_zero() {
        return profile.values().cloned().collect();
    }
    profile.values().map(|c| c / &min).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn iwahori_examples() {
        assert_eq!(iwahori_dim(&[1, 1]), 2.into());
        assert_eq!(iwahori_dim(&[2, 2]), 6.into());
        assert_eq!(iwahori_dim(&[5]), 1.into());
    }

    #[test]
    fn gamma_examples() {
        let q = SegmentData::quarter_shifted(vec![1]).unwrap();
        assert_eq!(gamma(1, 1, 1, 1, &q).unwrap(), 1.into());
        assert_eq!(gamma(2, 2, 1, 1, &q).unwrap(), 4.into());
        assert_eq!(gamma(0, 2, 1, 1, &q).unwrap(), 0.into());
        let t = SegmentData::tempered(vec![1, 1]).unwrap();
        assert_eq!(gamma(1, 1, 1, 2, &t).unwrap(), 1.into());
        assert!(gamma(1, 1, 3, 1, &t).is_err());
    }

    #[test]
    fn collapse_examples() {
        assert_eq!(collapse_sum(3, 3, 5), 1);
        assert_eq!(collapse_sum(1, 3, 3), 0);
        assert_eq!(collapse_sum(2, 5, 5), 0);
        assert_eq!(collapse_sum(4, 3, 5), 0);
    }

    #[test]
    fn reduction_examples() {
        let seg = SegmentData::tempered(vec![2, 1]).unwrap();
        let red = reduction_sum(2, 1, &seg, WeightOffsets::default()).unwrap();
        assert_eq!(red.len(), 1);
        assert_eq!((red[0].term.j1, red[0].term.j2), (1, 2));
        assert_eq!(red[0].coefficient, r(1));
        assert_eq!(red[0].weight, 3);
        assert!(reduction_sum(3, 1, &seg, WeightOffsets::default()).unwrap().is_empty());

        let q = SegmentData::quarter_shifted(vec![1]).unwrap();
        let red = reduction_sum(1, 1, &q, WeightOffsets::default()).unwrap();
        let weights: Vec<_> = red.iter().map(|x| (x.weight, x.coefficient.clone())).collect();
        assert_eq!(weights, vec![(3, r(1)), (2, r(2)), (1, r(1))]);
    }

    #[test]
    fn expansion_matches_collapse_on_small_cases() {
        let off = WeightOffsets { m_xi: 2, t_xi: 1 };
        for seg in [
            SegmentData::tempered(vec![1, 1]).unwrap(),
            SegmentData::tempered(vec![2, 1]).unwrap(),
            SegmentData::quarter_shifted(vec![1]).unwrap(),
            SegmentData::quarter_shifted(vec![1, 2]).unwrap(),
        ] {
            let table = red_table(&seg, off).unwrap();
            for s in 1..=seg.n() {
                for t in 1..=seg.n() {
                    let want = to_formal(&reduction_sum(s, t, &seg, off).unwrap());
                    assert_eq!(inclusion_exclusion_expand(s, t, seg.n(), &table), want, "{seg:?} {s} {t}");
                }
            }
        }
    }

    #[test]
    fn full_rank_keeps_only_the_zero_term() {
        let seg = SegmentData::tempered(vec![3]).unwrap();
        let table = red_table(&seg, WeightOffsets::default()).unwrap();
        let got = inclusion_exclusion_expand(3, 3, 3, &table);
        let only: FormalSum = table[&(0, 0)].iter().map(|x| (x.term, x.coefficient.clone())).collect();
        assert_eq!(got, only);
    }

    #[test]
    fn segment_json_round_trip() {
        let seg: SegmentData = serde_json::from_str(r#"{"s":[1,2],"mode":"quarter-shifted"}"#).unwrap();
        assert_eq!(seg.n(), 6);
        let back: SegmentData = serde_json::from_value(serde_json::to_value(&seg).unwrap()).unwrap();
        assert_eq!(back, seg);
        assert!(serde_json::from_str::<SegmentData>(r#"{"s":[1,2],"n":4,"mode":"tempered"}"#).is_err());
    }
}

//! Verification suites. Every assertion becomes a [`Record`] carrying the
//! coordinates it was checked at; the report is deterministic for a fixed
//! configuration.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::combinat::{binom, partitions};
use crate::config::{FaultTarget, RunConfig};
use crate::exactlin::tensor_total;
use crate::groth::{
    collapse_sum, gamma, inclusion_exclusion_expand, iwahori_dim, red_table, reduction_sum, to_formal, weight_profile,
    Mode, SegmentData,
};
use crate::instances::{random_complex, random_nilpotent, random_partition};
use crate::loc;
use crate::monodromy::{filtration_defects, gr_q_gr_p_from, jordan_oracle, monodromy_filtration_from, KernelImageGrid};
use crate::nearby::{
    build_l, build_nbar, build_semistable_resolution, coefficient, coefficient_bruteforce, index_window,
    monodromy_graded_terms, verify_kernel_cokernel, NearbyError,
};
use crate::report::{Location, Record};
use crate::spectral::{euler_check, purity_report, semistable_e1_page};
use crate::strata::{stalk_rank_fullwedge, stalk_rank_nearby, FiberModel, SemistableFiber, StalkPoint};

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteSummary {
    pub passed: usize,
    pub failed: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub suites: BTreeMap<String, SuiteSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub seed: u64,
    pub suites: Vec<String>,
    pub summary: Summary,
    pub records: Vec<Record>,
}

impl Report {
    pub fn new(seed: u64, suites: Vec<String>, records: Vec<Record>) -> Self {
        let mut summary = Summary { total: records.len(), ..Summary::default() };
        for s in &suites {
            summary.suites.entry(s.clone()).or_default();
        }
        for r in &records {
            let e = summary.suites.entry(r.suite.clone()).or_default();
            if r.passed {
                summary.passed += 1;
                e.passed += 1;
            } else {
                summary.failed += 1;
                e.failed += 1;
            }
        }
        Report { seed, suites, summary, records }
    }

    pub fn failures(&self) -> impl Iterator<Item = &Record> {
        self.records.iter().filter(|r| !r.passed)
    }

    pub fn all_passed(&self) -> bool {
        self.summary.failed == 0
    }
}

/// Runs the selected suites in canonical order.
pub fn run(cfg: &RunConfig) -> Report {
    let suites = cfg.selected_suites();
    let mut records = Vec::new();
    for s in &suites {
        records.extend(run_suite(s, cfg));
    }
    Report::new(cfg.seed, suites.iter().map(|s| s.to_string()).collect(), records)
}

pub fn run_suite(name: &str, cfg: &RunConfig) -> Vec<Record> {
    // each suite draws from its own stream so filtering does not shift the others
    let stream = crate::config::SUITES.iter().position(|s| *s == name).unwrap_or(0) as u64;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(stream);
    match name {
        "resolutions" => resolutions(cfg),
        "nbar" => nbar(cfg),
        "kernels" => kernels(cfg),
        "kunneth" => kunneth(cfg, &mut rng),
        "monodromy" => monodromy(cfg, &mut rng),
        "collapse" => collapse(cfg),
        "gamma" => gamma_suite(cfg),
        "purity" => purity(cfg),
        other => vec![Record::new(other, "unknown_suite", Location::new(), false, "no such suite")],
    }
}

fn error_record(suite: &str, check: &str, location: Location, e: NearbyError) -> Record {
    Record::new(suite, check, location, false, e.to_string())
}

/// One passing record for a sweep, or one record per failing cell.
fn sweep(suite: &str, check: &str, scope: Location, failures: Vec<(Location, String)>) -> Vec<Record> {
    if failures.is_empty() {
        return vec![Record::new(suite, check, scope, true, "")];
    }
    failures.into_iter().map(|(l, d)| Record::new(suite, check, l, false, d)).collect()
}

fn coefficient_records(n_max: usize) -> Vec<Record> {
    const S: &str = "resolutions";
    let mut identity = Vec::new();
    let mut monotone = Vec::new();
    for n in 1..=n_max as i64 {
        for k in 0..=2 * n - 2 {
            for l1 in 0..n {
                for l2 in 0..n {
                    let c = coefficient(k, l1, l2);
                    let b = coefficient_bruteforce(k, l1, l2);
                    let w = index_window(k, l1, l2).len().max(0);
                    if c != b || c != w {
                        identity.push((loc! {"n" => n, "k" => k, "l1" => l1, "l2" => l2}, format!("formula {c}, brute {b}, window {w}")));
                    }
                    if k >= 1 {
                        let prev = coefficient(k - 1, l1, l2);
                        let s = l1 + l2;
                        let ok = if s <= 2 * k - 2 {
                            c <= prev
                        } else if s == 2 * k - 1 {
                            c == prev
                        } else {
                            c >= prev
                        };
                        if !ok {
                            monotone.push((loc! {"n" => n, "k" => k, "l1" => l1, "l2" => l2}, format!("c^(k-1) = {prev}, c^k = {c}")));
                        }
                    }
                }
            }
        }
    }
    let mut out = sweep(S, "coefficient_identity", loc! {"n_max" => n_max}, identity);
    out.extend(sweep(S, "coefficient_monotonicity", loc! {"n_max" => n_max}, monotone));
    out
}

fn resolutions(cfg: &RunConfig) -> Vec<Record> {
    const S: &str = "resolutions";
    let max = cfg.ranges.stalk_max;
    let mut out = coefficient_records(cfg.ranges.n_max);
    let mut ranks = Vec::new();
    for r in 1..=max.max(6) as u64 {
        for s in 1..=max.max(6) as u64 {
            for k in 0..=2 * (r + s) {
                let p = StalkPoint::new(r as usize, s as usize);
                let wedge = stalk_rank_fullwedge(p, k as usize);
                let split = stalk_rank_nearby(p, k as usize) + stalk_rank_nearby(p, k as usize + 1);
                let vandermonde: u64 = (0..=k).map(|l| binom(r - 1, l) * binom(s - 1, k - l)).sum();
                if wedge != split || vandermonde != stalk_rank_nearby(p, k as usize) {
                    ranks.push((loc! {"r" => r, "s" => s, "k" => k}, format!("wedge {wedge}, split {split}, vandermonde {vandermonde}")));
                }
            }
        }
    }
    out.extend(sweep(S, "stalk_rank_identities", loc! {"max" => max.max(6)}, ranks));

    for r in 1..=max {
        for k in 0..=r {
            let l = loc! {"r" => r, "k" => k};
            match build_semistable_resolution(k, r).realize_checked(&StalkPoint::new(r, 1)) {
                Ok(c) => {
                    let want = match binom(r as u64 - 1, k as u64) {
                        0 => vec![],
                        d => vec![(k as i64, d as usize)],
                    };
                    out.push(Record::compare(S, "semistable_homology", l, c.homology().support(), want));
                }
                Err(e) => out.push(error_record(S, "semistable_homology", l, e)),
            }
        }
    }
    for r in 1..=max {
        for s in 1..=max {
            for k in 0..=(r + s - 1) as i64 {
                let l = loc! {"r" => r, "s" => s, "k" => k};
                match build_l(k, r, s).realize_checked(&StalkPoint::new(r, s)) {
                    Ok(c) => {
                        let want = match binom((r + s - 2) as u64, k as u64) {
                            0 => vec![],
                            d => vec![(k, d as usize)],
                        };
                        out.push(Record::compare(S, "product_homology", l, c.homology().support(), want));
                    }
                    Err(e) => out.push(error_record(S, "product_homology", l, e)),
                }
            }
        }
    }
    out
}

fn block_location(mut l: Location, blocks: &[(usize, Option<usize>, i64)]) -> Location {
    let list: Vec<serde_json::Value> = blocks.iter().map(|(a, b, c)| serde_json::json!([a, b, c])).collect();
    l.insert("blocks".into(), list.into());
    l
}

fn nbar(cfg: &RunConfig) -> Vec<Record> {
    const S: &str = "nbar";
    let mut out = Vec::new();
    let max = cfg.ranges.stalk_max;
    for r in 1..=max {
        for s in 1..=max {
            for k in 1..=(r + s - 2) as i64 {
                let mut map = build_nbar(k, r, s);
                if let Some(f) = cfg.fault.filter(|f| f.k == k) {
                    match f.target {
                        FaultTarget::Nbar => map.flip_block_sign(f.l1, Some(f.l2)),
                        FaultTarget::Differential => map.source.flip_block_sign(f.l1, Some(f.l2)),
                    }
                }
                let at = StalkPoint::new(r, s);
                let l = loc! {"k" => k, "r" => r, "s" => s};
                match map.source.realize_checked(&at) {
                    Ok(_) => out.push(Record::new(S, "source_is_complex", l.clone(), true, "")),
                    Err(NearbyError::NotComplex { degree, blocks }) => out.push(Record::new(
                        S,
                        "source_is_complex",
                        block_location(l.clone(), &blocks),
                        false,
                        format!("d∘d ≠ 0 out of degree {degree}"),
                    )),
                    Err(e) => out.push(error_record(S, "source_is_complex", l.clone(), e)),
                }
                match map.realize_checked(&at) {
                    Ok(_) => out.push(Record::new(S, "chain_map", l, true, "")),
                    Err(NearbyError::NotChainMap { degree, blocks }) => out.push(Record::new(
                        S,
                        "chain_map",
                        block_location(l, &blocks),
                        false,
                        format!("commutation fails from degree {degree}"),
                    )),
                    Err(e) => out.push(error_record(S, "chain_map", l, e)),
                }
            }
        }
    }
    out
}

fn kernels(cfg: &RunConfig) -> Vec<Record> {
    let mut out = Vec::new();
    let max = cfg.ranges.kernel_stalk_max;
    for r in 1..=max {
        for s in 1..=max {
            for k in 1..=(r + s - 2) as i64 {
                let at = format!("stalk({r},{s})");
                match verify_kernel_cokernel(k, r, s, &StalkPoint::new(r, s), &at) {
                    Ok(rs) => out.extend(rs),
                    Err(e) => out.push(error_record("kernels", "realize", loc! {"k" => k, "r" => r, "s" => s}, e)),
                }
            }
        }
    }
    out
}

/// `Σ_{i+j=d} h_i(a) h_j(b)`.
pub fn kunneth_prediction(a: &BTreeMap<i64, usize>, b: &BTreeMap<i64, usize>) -> Vec<(i64, usize)> {
    let mut out: BTreeMap<i64, usize> = BTreeMap::new();
    for (&i, &x) in a {
        for (&j, &y) in b {
            if x * y > 0 {
                *out.entry(i + j).or_default() += x * y;
            }
        }
    }
    out.into_iter().collect()
}

fn kunneth(cfg: &RunConfig, rng: &mut ChaCha8Rng) -> Vec<Record> {
    let mut out = Vec::new();
    let half = cfg.ranges.kunneth_total / 2;
    for i in 0..cfg.ranges.kunneth_pairs {
        let (ta, tb) = (rng.gen_range(1..=half), rng.gen_range(1..=half));
        let (la, lb) = (rng.gen_range(-2..=1), rng.gen_range(-1..=2));
        let a = random_complex(rng, la, ta, 4);
        let b = random_complex(rng, lb, tb, 4);
        let t = tensor_total(&a, &b);
        let ha: BTreeMap<i64, usize> = a.homology().support().into_iter().collect();
        let hb: BTreeMap<i64, usize> = b.homology().support().into_iter().collect();
        let l = loc! {"pair" => i, "dim_a" => ta, "dim_b" => tb};
        let is_complex = t.verify().unwrap_or(false);
        out.push(Record::new("kunneth", "tensor_is_complex", l.clone(), is_complex, ""));
        out.push(Record::compare("kunneth", "homology_dims", l, t.homology().support(), kunneth_prediction(&ha, &hb)));
    }
    out
}

fn monodromy(cfg: &RunConfig, rng: &mut ChaCha8Rng) -> Vec<Record> {
    const S: &str = "monodromy";
    let mut out = Vec::new();
    for i in 0..cfg.ranges.monodromy_ops {
        let dim = rng.gen_range(1..=cfg.ranges.monodromy_dim);
        let blocks = random_partition(rng, dim);
        let op = random_nilpotent(rng, &blocks);
        let l = loc! {"op" => i, "dim" => dim, "blocks" => blocks};
        let grid = KernelImageGrid::new(&op);
        let m = monodromy_filtration_from(&grid);
        let defects = filtration_defects(&op, &m);
        out.push(Record::new(S, "filtration_axioms", l.clone(), defects.is_empty(), format!("{defects:?}")));
        let got: BTreeMap<i64, usize> = m.gr_dims().into_iter().filter(|&(_, d)| d > 0).collect();
        out.push(Record::compare(S, "gr_matches_jordan", l.clone(), got, jordan_oracle(&op).predicted_gr));
        let pieces = gr_q_gr_p_from(&grid);
        let mut bad = Vec::new();
        for r in m.lo() - 1..=m.hi() + 1 {
            let sum: usize = pieces.iter().filter(|((p, q), _)| *p as i64 - *q as i64 - 1 == r).map(|(_, d)| d).sum();
            if sum != m.gr_dim(r) {
                bad.push(format!("r={r}: Σ Gr^qGr_p = {sum}, Gr_r = {}", m.gr_dim(r)));
            }
        }
        out.push(Record::new(S, "decomposition", l, bad.is_empty(), bad.join("; ")));
    }
    let mut shifted = Vec::new();
    for n in 1..=cfg.ranges.graded_n {
        for u in 1..=2 * n - 2 {
            let top = monodromy_graded_terms(u, 0, n, n);
            for q in 0..u {
                let mut got = monodromy_graded_terms(u - q, q, n, n);
                for t in got.values_mut().flatten() {
                    t.twist += q as i64;
                }
                if got != top {
                    shifted.push((loc! {"n" => n, "p" => u - q, "q" => q}, "differs from (p+q, 0) after twist shift".to_string()));
                }
            }
        }
    }
    out.extend(sweep(S, "graded_shift", loc! {"n_max" => cfg.ranges.graded_n}, shifted));
    out
}

/// Segment data for every partition of `n` in the given mode. The
/// identities are symmetric under reordering segments, so partitions
/// stand in for all compositions.
pub fn segments(n: u64, mode: Mode) -> Vec<SegmentData> {
    match mode {
        Mode::Tempered => partitions(n).into_iter().filter_map(|s| SegmentData::tempered(s).ok()).collect(),
        Mode::QuarterShifted if n.is_multiple_of(2) && n > 0 => {
            partitions(n / 2).into_iter().filter_map(|s| SegmentData::quarter_shifted(s).ok()).collect()
        }
        Mode::QuarterShifted => Vec::new(),
    }
}

fn collapse(cfg: &RunConfig) -> Vec<Record> {
    const S: &str = "collapse";
    let mut out = Vec::new();
    let mut delta = Vec::new();
    for s in 1..=cfg.ranges.collapse_max {
        for size in 1..=s {
            let got = collapse_sum(size, s, s);
            if got != i64::from(size == s) {
                delta.push((loc! {"S" => size, "s" => s}, format!("got {got}")));
            }
        }
    }
    out.extend(sweep(S, "collapse_is_delta", loc! {"max" => cfg.ranges.collapse_max}, delta));

    let offsets = cfg.offsets;
    for n in 1..=cfg.ranges.expand_n {
        for mode in [Mode::Tempered, Mode::QuarterShifted] {
            for seg in segments(n, mode) {
                let table = match red_table(&seg, offsets) {
                    Ok(t) => t,
                    Err(e) => {
                        out.push(Record::new(S, "expansion", loc! {"s" => seg.s(), "mode" => mode.to_string()}, false, e.to_string()));
                        continue;
                    }
                };
                let mut bad = Vec::new();
                let mut profile_bad = Vec::new();
                for a in 1..=n {
                    for b in 1..=n {
                        let red = reduction_sum(a, b, &seg, offsets).expect("valid segment");
                        let lhs = inclusion_exclusion_expand(a, b, n, &table);
                        if lhs != to_formal(&red) {
                            bad.push(format!("S={a} T={b}"));
                        }
                        let base = offsets.shift() + 2 * n as i64 - a as i64 - b as i64;
                        for t in red.iter().map(|x| (x.term.j1, x.term.j2)).collect::<std::collections::BTreeSet<_>>() {
                            let p = weight_profile(&red, t.0, t.1);
                            let want: BTreeMap<i64, BigRational> = match mode {
                                Mode::Tempered => [(base, red[0].coefficient.clone())].into(),
                                Mode::QuarterShifted => {
                                    let unit = p.get(&(base + 1)).cloned().unwrap_or_default();
                                    let two = &unit * BigRational::from_integer(2.into());
                                    [(base - 1, unit.clone()), (base, two), (base + 1, unit)].into()
                                }
                            };
                            if p != want {
                                profile_bad.push(format!("S={a} T={b} pair {t:?}: {p:?}"));
                            }
                        }
                    }
                }
                let l = loc! {"s" => seg.s(), "n" => n, "mode" => mode.to_string()};
                out.push(Record::new(S, "expansion_equals_reduction", l.clone(), bad.is_empty(), bad.join("; ")));
                out.push(Record::new(S, "weight_profile", l, profile_bad.is_empty(), profile_bad.join("; ")));
            }
        }
    }
    out
}

/// Per-factor oracle: Iwahori-fixed dimension of the block multiset.
pub fn gamma_oracle(h: u64, j: usize, seg: &SegmentData) -> BigInt {
    let s = seg.s();
    let sj = s[j - 1];
    if sj + h < seg.n() {
        return BigInt::from(0);
    }
    let mut blocks = vec![sj + h - seg.n()];
    if seg.mode() == Mode::QuarterShifted {
        blocks.push(sj);
    }
    for (i, &x) in s.iter().enumerate() {
        if i + 1 != j {
            blocks.push(x);
            if seg.mode() == Mode::QuarterShifted {
                blocks.push(x);
            }
        }
    }
    iwahori_dim(&blocks)
}

fn gamma_suite(cfg: &RunConfig) -> Vec<Record> {
    const S: &str = "gamma";
    let mut out = Vec::new();
    for n in 1..=cfg.ranges.gamma_n {
        for mode in [Mode::Tempered, Mode::QuarterShifted] {
            for seg in segments(n, mode) {
                let mut bad = Vec::new();
                let t = seg.len();
                for h1 in 0..=n {
                    for h2 in 0..=n {
                        for j1 in 1..=t {
                            for j2 in 1..=t {
                                let want = gamma_oracle(h1, j1, &seg) * gamma_oracle(h2, j2, &seg);
                                match gamma(h1, h2, j1, j2, &seg) {
                                    Ok(g) if g == want => {}
                                    Ok(g) => bad.push(format!("h=({h1},{h2}) j=({j1},{j2}): {g} vs {want}")),
                                    Err(e) => bad.push(e.to_string()),
                                }
                            }
                        }
                    }
                }
                let l = loc! {"s" => seg.s(), "n" => n, "mode" => mode.to_string()};
                out.push(Record::new(S, "gamma_equals_oracle", l, bad.is_empty(), bad.join("; ")));
            }
        }
    }
    out
}

fn purity(cfg: &RunConfig) -> Vec<Record> {
    const S: &str = "purity";
    let mut out = Vec::new();
    for n in 1..=cfg.ranges.purity_n {
        let f = match FiberModel::concentrated(n, n, n + 1, 1) {
            Ok(f) => f,
            Err(e) => {
                out.push(Record::new(S, "model", loc! {"n" => n}, false, e.to_string()));
                continue;
            }
        };
        out.extend(purity_report(&f, cfg.offsets, 2 * n as i64 - 2));
        let (page, strata) = euler_check(&f, cfg.offsets);
        out.push(Record::compare(S, "euler_two_ways", loc! {"n" => n, "m1" => n, "m2" => n + 1}, page, strata));
    }
    let demo = semistable_e1_page(&SemistableFiber::chain_of_lines(2), cfg.offsets);
    out.push(Record::compare(S, "semistable_demo_entries", loc! {"n" => 2, "m" => 2}, demo.len(), 4));
    let shift = cfg.offsets.shift();
    let ok = demo.iter().all(|e| e.weight == e.m + e.r + shift);
    out.push(Record::new(S, "semistable_weight_is_m_plus_r", loc! {"n" => 2, "m" => 2}, ok, ""));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{Fault, Ranges};

    fn small() -> RunConfig {
        RunConfig {
            ranges: Ranges {
                n_max: 4,
                stalk_max: 3,
                kernel_stalk_max: 2,
                kunneth_pairs: 5,
                kunneth_total: 12,
                monodromy_ops: 10,
                monodromy_dim: 8,
                graded_n: 3,
                collapse_max: 6,
                expand_n: 4,
                gamma_n: 4,
                purity_n: 3,
            },
            ..RunConfig::default()
        }
    }

    #[test]
    fn small_run_passes() {
        let report = run(&small());
        let failures: Vec<_> = report.failures().collect();
        assert!(failures.is_empty(), "{failures:#?}");
        assert_eq!(report.summary.suites.len(), 8);
    }

    #[test]
    fn filter_runs_one_suite() {
        let cfg = RunConfig { suites: vec!["collapse".into()], ..small() };
        let report = run(&cfg);
        assert!(report.records.iter().all(|r| r.suite == "collapse"));
        assert!(report.all_passed());
    }

    #[test]
    fn nbar_fault_is_localized() {
        let fault = Fault { target: FaultTarget::Nbar, k: 1, l1: 1, l2: 1 };
        let cfg = RunConfig { suites: vec!["nbar".into()], fault: Some(fault), ..small() };
        let report = run(&cfg);
        let bad: Vec<_> = report.failures().collect();
        assert!(!bad.is_empty());
        for r in bad {
            assert_eq!(r.check, "chain_map");
            let blocks = r.location["blocks"].as_array().unwrap();
            assert!(blocks.iter().any(|b| b[0] == 1 && b[1] == 1), "{blocks:?}");
        }
    }

    #[test]
    fn differential_fault_breaks_the_complex() {
        let fault = Fault { target: FaultTarget::Differential, k: 1, l1: 0, l2: 1 };
        let cfg = RunConfig { suites: vec!["nbar".into()], fault: Some(fault), ..small() };
        let report = run(&cfg);
        assert!(!report.all_passed());
    }

    #[test]
    fn kunneth_prediction_convolves() {
        let a = BTreeMap::from([(0, 1), (1, 2)]);
        let b = BTreeMap::from([(0, 3), (2, 1)]);
        assert_eq!(kunneth_prediction(&a, &b), vec![(0, 3), (1, 6), (2, 1), (3, 2)]);
    }
}

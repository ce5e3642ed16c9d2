//! Acceptance criteria. Runs without the libtest harness so every
//! criterion prints one PASS/FAIL line; exits nonzero if any fails.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use nearcyc::combinat::sign;
use nearcyc::config::RunConfig;
use nearcyc::exactlin::{tensor_total, Scalar, SparseMatrix};
use nearcyc::groth::{
    collapse_sum, gamma, inclusion_exclusion_expand, red_table, reduction_sum, to_formal, weight_profile, Mode,
    SegmentData,
};
use nearcyc::instances::{random_complex, random_nilpotent, random_partition};
use nearcyc::monodromy::{gr_q_gr_p_from, monodromy_filtration_from, KernelImageGrid};
use nearcyc::nearby::{
    build_l, build_nbar, coefficient, coefficient_bruteforce, index_window, monodromy_graded_terms,
    verify_kernel_cokernel,
};
use nearcyc::spectral::{e1_full, euler_check, WeightOffsets};
use nearcyc::strata::{FiberModel, StalkPoint};
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 20_240_601;

struct Outcome {
    failures: Vec<String>,
    note: String,
}

impl Outcome {
    fn new() -> Self {
        Outcome { failures: Vec::new(), note: String::new() }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(what());
        }
    }
}

/// `C(n, k)` from Pascal's rule, independent of the library.
fn pascal(n: i64, k: i64) -> u64 {
    if k < 0 || n < 0 || k > n {
        return 0;
    }
    let mut row = vec![1u64];
    for _ in 0..n {
        let mut next = vec![1u64; row.len() + 1];
        for i in 1..row.len() {
            next[i] = row[i - 1] + row[i];
        }
        row = next;
    }
    row[k as usize]
}

/// Number of ways to split `k = a + b` with `a ≤ l1`, `b ≤ l2`, `a, b ≥ 0`,
/// bounded above by the `k`-th wedge slot count `min(l1,l2)+1`.
fn coefficient_oracle(k: i64, l1: i64, l2: i64) -> i64 {
    let splits = (0..=k).filter(|&a| a <= l1 && k - a <= l2).count() as i64;
    splits.min(l1.min(l2) + 1)
}

fn criterion_1() -> Outcome {
    let mut o = Outcome::new();
    let start = Instant::now();
    let mut cells = 0;
    for n in 1..=8i64 {
        for k in 0..=2 * n - 2 {
            for l1 in 0..n {
                for l2 in 0..n {
                    cells += 1;
                    let c = coefficient(k, l1, l2);
                    let b = coefficient_bruteforce(k, l1, l2);
                    let w = index_window(k, l1, l2).len().max(0);
                    let oracle = coefficient_oracle(k, l1, l2);
                    o.check(c == b && b == w && w == oracle, || format!("k={k} l1={l1} l2={l2}: {c} {b} {w} {oracle}"));
                }
            }
        }
    }
    let elapsed = start.elapsed();
    o.check(elapsed < Duration::from_secs(1), || format!("took {elapsed:?}"));
    o.note = format!("{cells} cells in {elapsed:.2?}");
    o
}

fn criterion_2() -> Outcome {
    let mut o = Outcome::new();
    let mut cells = 0;
    for n in 1..=8i64 {
        for k in 1..=2 * n - 2 {
            for l1 in 0..n {
                for l2 in 0..n {
                    cells += 1;
                    let (now, before) = (coefficient(k, l1, l2), coefficient(k - 1, l1, l2));
                    let ok = match (l1 + l2).cmp(&(2 * k - 1)) {
                        std::cmp::Ordering::Less => now <= before,
                        std::cmp::Ordering::Equal => now == before,
                        std::cmp::Ordering::Greater => now >= before,
                    };
                    o.check(ok, || format!("k={k} l1={l1} l2={l2}: c^k={now} c^(k-1)={before}"));
                }
            }
        }
    }
    o.note = format!("{cells} cells");
    o
}

fn criterion_3() -> Outcome {
    let mut o = Outcome::new();
    let start = Instant::now();
    let mut complexes = 0;
    for r in 1..=5usize {
        for s in 1..=5usize {
            for k in 0..=(r + s) as i64 {
                complexes += 1;
                let c = match build_l(k, r, s).realize_checked(&StalkPoint::new(r, s)) {
                    Ok(c) => c,
                    Err(e) => {
                        o.failures.push(format!("r={r} s={s} k={k}: {e}"));
                        continue;
                    }
                };
                let h = c.homology();
                let want = pascal((r + s - 2) as i64, k);
                let support = h.support();
                let ok = match want {
                    0 => support.is_empty(),
                    d => support == vec![(k, d as usize)],
                };
                o.check(ok, || format!("r={r} s={s} k={k}: {support:?}, want {want} in degree {k}"));
            }
        }
    }
    let elapsed = start.elapsed();
    o.check(elapsed < Duration::from_secs(10), || format!("took {elapsed:?}"));
    o.note = format!("{complexes} complexes in {elapsed:.2?}");
    o
}

fn criterion_4() -> Outcome {
    let mut o = Outcome::new();
    let mut cases = 0;
    for r in 1..=4usize {
        for s in 1..=4usize {
            for k in 1..=(r + s - 2) as i64 {
                cases += 1;
                let at = StalkPoint::new(r, s);
                let nbar = build_nbar(k, r, s);
                if let Err(e) = nbar.realize_checked(&at) {
                    o.failures.push(format!("N̄ r={r} s={s} k={k}: {e}"));
                }
                match verify_kernel_cokernel(k, r, s, &at, "stalk") {
                    Ok(records) => {
                        for rec in records.iter().filter(|x| !x.passed) {
                            o.failures.push(format!("{} r={r} s={s} k={k}: {}", rec.check, rec.detail));
                        }
                    }
                    Err(e) => o.failures.push(format!("r={r} s={s} k={k}: {e}")),
                }
                // (−1)^l on the copies of every block with l1, l2 ≥ k
                for term in nbar.source.nonzero_terms() {
                    let (l1, l2) = (term.l1, term.l2.unwrap());
                    if (l1 as i64) < k || (l2 as i64) < k {
                        continue;
                    }
                    let m = nbar.block_matrix(term.degree, (l1, Some(l2)));
                    let x: Vec<(usize, usize, Scalar)> =
                        term.copy_labels.iter().enumerate().map(|(i, &l)| (i, 0, Scalar::int(sign(l)))).collect();
                    let x = SparseMatrix::from_triplets(m.cols(), 1, x).unwrap();
                    o.check(m.mul(&x).unwrap().is_zero(), || format!("alternating vector r={r} s={s} k={k} block ({l1},{l2})"));
                }
            }
        }
    }
    o.note = format!("{cases} (r,s,k) cases");
    o
}

fn homology_map(c: &nearcyc::exactlin::ChainComplex) -> BTreeMap<i64, usize> {
    c.homology().support().into_iter().collect()
}

fn criterion_5() -> Outcome {
    let mut o = Outcome::new();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    for i in 0..50 {
        let ta = rng.gen_range(1..=20);
        let tb = rng.gen_range(1..=40 - ta);
        let (la, lb) = (rng.gen_range(-2..=2), rng.gen_range(-2..=2));
        let a = random_complex(&mut rng, la, ta, 5);
        let b = random_complex(&mut rng, lb, tb, 5);
        let t = tensor_total(&a, &b);
        let (ha, hb) = (homology_map(&a), homology_map(&b));
        let mut want: BTreeMap<i64, usize> = BTreeMap::new();
        for (&p, &x) in &ha {
            for (&q, &y) in &hb {
                *want.entry(p + q).or_default() += x * y;
            }
        }
        want.retain(|_, v| *v > 0);
        let got = homology_map(&t);
        o.check(t.verify().unwrap() && got == want, || format!("pair {i}: {got:?} vs {want:?}"));
    }
    o.note = "50 pairs".into();
    o
}

fn criterion_6() -> Outcome {
    let mut o = Outcome::new();
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 6);
    for i in 0..200 {
        let dim = rng.gen_range(1..=30);
        let blocks = random_partition(&mut rng, dim);
        let op = random_nilpotent(&mut rng, &blocks);
        let grid = KernelImageGrid::new(&op);
        let m = monodromy_filtration_from(&grid);
        let (lo, hi) = (m.lo() - 2, m.hi() + 2);
        for r in lo..=hi {
            let image = m.level(r).map(op.matrix());
            o.check(m.level(r - 2).contains_space(&image), || format!("op {i}: N M_{r} ⊄ M_{}", r - 2));
            o.check(m.gr_dim(r) == m.gr_dim(-r), || format!("op {i}: dim Gr_{r} ≠ dim Gr_{}", -r));
        }
        // a block of size b contributes to Gr_r for r ≡ b−1 mod 2, |r| ≤ b−1
        let mut want: BTreeMap<i64, usize> = BTreeMap::new();
        for &b in &blocks {
            let b = b as i64;
            let mut r = -(b - 1);
            while r < b {
                *want.entry(r).or_default() += 1;
                r += 2;
            }
        }
        let got: BTreeMap<i64, usize> = (lo..=hi).map(|r| (r, m.gr_dim(r))).filter(|&(_, d)| d > 0).collect();
        o.check(got == want, || format!("op {i} blocks {blocks:?}: {got:?} vs {want:?}"));
        let pieces = gr_q_gr_p_from(&grid);
        for r in lo..=hi {
            let sum: usize = pieces.iter().filter(|((p, q), _)| *p as i64 - *q as i64 - 1 == r).map(|(_, d)| d).sum();
            o.check(sum == m.gr_dim(r), || format!("op {i}: Σ Gr^qGr_p = {sum} ≠ Gr_{r} = {}", m.gr_dim(r)));
        }
    }
    let elapsed = start.elapsed();
    o.check(elapsed < Duration::from_secs(30), || format!("took {elapsed:?}"));
    o.note = format!("200 operators in {elapsed:.2?}");
    o
}

fn criterion_7() -> Outcome {
    let mut o = Outcome::new();
    let mut pairs = 0;
    for n in 1..=6usize {
        for u in 1..=2 * n - 2 {
            let top = monodromy_graded_terms(u, 0, n, n);
            for q in 0..=u - 1 {
                pairs += 1;
                let p = u - q;
                let got = monodromy_graded_terms(p, q, n, n);
                let same_shape = got.len() == top.len()
                    && got.iter().zip(&top).all(|((k1, a), (k2, b))| {
                        k1 == k2
                            && a.len() == b.len()
                            && a.iter().zip(b).all(|(x, y)| {
                                (x.l1, x.l2, x.degree, x.twist + q as i64) == (y.l1, y.l2, y.degree, y.twist)
                            })
                    });
                o.check(same_shape, || format!("n={n} p={p} q={q}"));
            }
        }
    }
    o.note = format!("{pairs} (n,p,q) triples");
    o
}

fn criterion_8() -> Outcome {
    let mut o = Outcome::new();
    let offsets = WeightOffsets { m_xi: 3, t_xi: 1 };
    for n in 1..=5usize {
        for (m1, m2) in [(n, n), (n + 1, n + 2)] {
            let f = FiberModel::concentrated(n, m1, m2, 1).unwrap();
            let target = 2 * n as i64 - 2;
            let page = e1_full(&f, offsets);
            let mut classes: BTreeMap<(i64, i64), Vec<i64>> = BTreeMap::new();
            for e in &page.entries {
                o.check(e.m == target, || format!("n={n}: entry in degree {}", e.m));
                for s in &e.summands {
                    classes.entry((e.p as i64 - e.q as i64, e.m)).or_default().push(s.weight);
                }
            }
            for ((d, m), ws) in classes {
                o.check(ws.iter().all(|&w| w == ws[0]), || format!("n={n} p-q={d} m={m}: {ws:?}"));
            }
            let (a, b) = euler_check(&f, offsets);
            o.check(a == b, || format!("n={n}: euler {a} vs {b}"));
        }
    }
    o.note = "n ≤ 5, two component counts each".into();
    o
}

fn compositions(n: u64) -> Vec<Vec<u64>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for first in 1..=n {
        for mut rest in compositions(n - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn segments_of(n: u64) -> Vec<SegmentData> {
    let mut out: Vec<SegmentData> = compositions(n).into_iter().map(|s| SegmentData::tempered(s).unwrap()).collect();
    if n.is_multiple_of(2) {
        out.extend(compositions(n / 2).into_iter().map(|s| SegmentData::quarter_shifted(s).unwrap()));
    }
    out
}

/// `(Σ b)! / Π b!` as a product of binomials.
fn multinomial_oracle(blocks: &[u64]) -> BigInt {
    let mut total = 0u64;
    let mut out = BigInt::from(1);
    for &b in blocks {
        total += b;
        out *= BigInt::from(pascal(total as i64, b as i64));
    }
    out
}

fn gamma_oracle(h: u64, j: usize, seg: &SegmentData) -> BigInt {
    let (n, s) = (seg.n(), seg.s());
    let sj = s[j - 1];
    if sj + h < n {
        return BigInt::from(0);
    }
    let mut blocks = vec![sj + h - n];
    let quarter = seg.mode() == Mode::QuarterShifted;
    if quarter {
        blocks.push(sj);
    }
    for (i, &x) in s.iter().enumerate() {
        if i + 1 != j {
            blocks.push(x);
            if quarter {
                blocks.push(x);
            }
        }
    }
    multinomial_oracle(&blocks)
}

fn criterion_9() -> Outcome {
    let mut o = Outcome::new();
    for s in 1..=12u64 {
        for size in 1..=s {
            let v = collapse_sum(size, s, s);
            o.check(v == i64::from(size == s), || format!("collapse S={size} s={s}: {v}"));
        }
    }
    let mut gammas = 0usize;
    for n in 1..=10 {
        for seg in segments_of(n) {
            for h1 in 0..=n {
                for h2 in 0..=n {
                    for j1 in 1..=seg.len() {
                        for j2 in 1..=seg.len() {
                            gammas += 1;
                            let want = gamma_oracle(h1, j1, &seg) * gamma_oracle(h2, j2, &seg);
                            match gamma(h1, h2, j1, j2, &seg) {
                                Ok(g) => o.check(g == want, || format!("{seg:?} h=({h1},{h2}) j=({j1},{j2}): {g} vs {want}")),
                                Err(e) => o.failures.push(e.to_string()),
                            }
                        }
                    }
                }
            }
        }
    }
    let offsets = WeightOffsets { m_xi: 1, t_xi: 0 };
    let mut expansions = 0usize;
    for n in 1..=8 {
        for seg in segments_of(n) {
            let table = red_table(&seg, offsets).unwrap();
            for a in 1..=n {
                for b in 1..=n {
                    expansions += 1;
                    let red = reduction_sum(a, b, &seg, offsets).unwrap();
                    let ok = inclusion_exclusion_expand(a, b, n, &table) == to_formal(&red);
                    o.check(ok, || format!("{seg:?} S={a} T={b}"));
                    if seg.mode() != Mode::QuarterShifted {
                        continue;
                    }
                    for r in &red {
                        let profile = weight_profile(&red, r.term.j1, r.term.j2);
                        let c: Vec<&BigRational> = profile.values().collect();
                        let ratio_ok = c.len() == 3 && c[1] == &(c[0] * BigRational::from_integer(2.into())) && c[0] == c[2];
                        let spread: Vec<i64> = profile.keys().copied().collect();
                        let w = offsets.shift() + 2 * n as i64 - a as i64 - b as i64;
                        o.check(ratio_ok && spread == vec![w - 1, w, w + 1], || format!("{seg:?} S={a} T={b}: {profile:?}"));
                    }
                }
            }
        }
    }
    o.note = format!("{gammas} gamma cells, {expansions} expansions over all compositions");
    o
}

fn criterion_10() -> Outcome {
    let mut o = Outcome::new();
    let cfg = RunConfig::default();
    let render = || serde_json::to_string_pretty(&nearcyc::verify::run(&cfg)).unwrap();
    let (a, b) = (render(), render());
    o.check(a == b, || "reports differ".into());
    let report = nearcyc::verify::run(&cfg);
    o.check(report.all_passed(), || format!("{} failing records in the default run", report.summary.failed));
    o.note = format!("{} bytes, {} records", a.len(), report.summary.total);
    o
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 10] = [
        ("coefficient identity", criterion_1),
        ("coefficient monotonicity", criterion_2),
        ("resolution exactness", criterion_3),
        ("chain map and kernel/cokernel", criterion_4),
        ("Kunneth dimensions", criterion_5),
        ("monodromy filtration", criterion_6),
        ("graded-piece twist shift", criterion_7),
        ("E1 support, weights, Euler", criterion_8),
        ("collapse, gamma, expansion, 1:2:1", criterion_9),
        ("verify determinism", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        let status = if o.failures.is_empty() { "PASS" } else { "FAIL" };
        println!("criterion {:>2} {status}: {name} ({})", i + 1, o.note);
        for f in o.failures.iter().take(5) {
            println!("    {f}");
        }
        if !o.failures.is_empty() {
            failed += 1;
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

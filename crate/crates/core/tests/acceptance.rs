//! Acceptance gate: one test per criterion, each printing a single
//! `criterion N: PASS|FAIL ...` line to stderr (uncaptured).

use std::io::Write;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use updown_core::oracle::{self, SearchMode};
use updown_core::phi::{self, phi_fast, phi_table, PhiRecursion};
use updown_core::report::table_tsv;
use updown_core::shift::{self, moves, ordered_pairs, proper_subpairs_fix, ShiftPair};
use updown_core::suite::{self, CheckOutcome};
use updown_core::witness::{c_family, c_star_family, canonical_chain, verify_chain};
use updown_core::{Family, SubsetMask};

/// Prints the criterion line, then fails the test if any problem was found.
fn report(id: u32, title: &str, cases: u64, problems: &[String], started: Instant) {
    let status = if problems.is_empty() { "PASS" } else { "FAIL" };
    let line = format!(
        "criterion {id:>2}: {status} {title} ({cases} cases, {:.2?})",
        started.elapsed()
    );
    let mut err = std::io::stderr().lock();
    writeln!(err, "{line}").unwrap();
    for p in problems.iter().take(5) {
        writeln!(err, "      {p}").unwrap();
    }
    assert!(problems.is_empty(), "{line}: {problems:?}");
}

fn absorb(outcome: &CheckOutcome, problems: &mut Vec<String>) -> u64 {
    if !outcome.passed() {
        problems.push(outcome.to_string());
    }
    outcome.cases
}

const GOLDEN: [(u32, &str); 5] = [
    (2, include_str!("golden/table_2.tsv")),
    (3, include_str!("golden/table_3.tsv")),
    (4, include_str!("golden/table_4.tsv")),
    (5, include_str!("golden/table_5.tsv")),
    (6, include_str!("golden/table_6.tsv")),
];

#[test]
fn criterion_01_table_reproduction() {
    let t0 = Instant::now();
    let mut problems = Vec::new();
    let mut values = 0;
    for (n, golden) in GOLDEN {
        // phi_table fails on any fast/recursive disagreement.
        match phi_table(n) {
            Ok(t) => {
                values += t.values().len() as u64;
                if table_tsv(&t) != golden {
                    problems.push(format!("n={n}: table differs from golden"));
                }
            }
            Err(e) => problems.push(format!("n={n}: {e}")),
        }
    }
    if t0.elapsed().as_secs_f64() >= 1.0 {
        problems.push(format!("took {:?}, budget 1 s", t0.elapsed()));
    }
    report(
        1,
        "golden tables n=2..6, fast = recursive",
        values,
        &problems,
        t0,
    );
}

#[test]
fn criterion_02_oracle_certification() {
    let t0 = Instant::now();
    let mut problems = Vec::new();
    let mut cases = 0;
    for n in 0..=4u32 {
        for m in 0..=(1u64 << n) {
            cases += 1;
            let expect = phi_fast(n, m).unwrap();
            let (v, w) = oracle::brute_min_updown_with(n, m, SearchMode::Exhaustive).unwrap();
            if v != expect || w.len() as u64 != m || w.updown_size() as u64 != v {
                problems.push(format!("n={n} m={m}: exhaustive {v}, closed form {expect}"));
            }
        }
    }
    for m in 0..=32u64 {
        cases += 2;
        let expect = phi_fast(5, m).unwrap();
        let convex = oracle::brute_min_updown_convex(5, m).unwrap();
        if convex != expect {
            problems.push(format!(
                "n=5 m={m}: convex search {convex}, closed form {expect}"
            ));
        }
        let (v, w) = oracle::brute_min_updown(5, m).unwrap();
        if v != expect || w.len() as u64 != m || w.updown_size() as u64 != v {
            problems.push(format!(
                "n=5 m={m}: branch and bound {v}, closed form {expect}"
            ));
        }
    }
    report(
        2,
        "oracle = closed form, n<=4 exhaustive, n=5 convex + B&B",
        cases,
        &problems,
        t0,
    );
}

#[test]
fn criterion_03_method_equivalence() {
    let t0 = Instant::now();
    let mut problems = Vec::new();
    let c = suite::check_phi_agreement(16, &mut PhiRecursion::new());
    let cases = absorb(&c, &mut problems);
    if cases != (0..=16).map(|n| (1u64 << n) + 1).sum::<u64>() {
        problems.push(format!("expected every (n, m) with n <= 16, saw {cases}"));
    }
    if t0.elapsed().as_secs_f64() >= 10.0 {
        problems.push(format!("took {:?}, budget 10 s", t0.elapsed()));
    }
    report(3, "phi_fast = phi_recursive, n<=16", cases, &problems, t0);
}

#[test]
fn criterion_04_bounds() {
    let t0 = Instant::now();
    let mut problems = Vec::new();
    let cases = absorb(&suite::check_bounds(16), &mut problems);
    for (n, m, v) in [(4, 4, 12), (6, 9, 39)] {
        let (f, exact) = phi::lower_bound_f(n, m).unwrap();
        if !(exact && f == v && phi_fast(n, m).unwrap() == v) {
            problems.push(format!("n={n} m={m}: expected Φ = f = {v}"));
        }
    }
    report(
        4,
        "f <= Φ <= f + 2^(n/2), equality at perfect squares, n<=16",
        cases,
        &problems,
        t0,
    );
}

#[test]
fn criterion_05_explicit_bound() {
    let t0 = Instant::now();
    let mut problems = Vec::new();
    let cases = absorb(&suite::check_explicit_bound(12), &mut problems);
    report(
        5,
        "explicit bound >= Φ, tight on its window, n<=12",
        cases,
        &problems,
        t0,
    );
}

#[test]
fn criterion_06_self_conjugacy() {
    let t0 = Instant::now();
    let mut problems = Vec::new();
    let cases = absorb(&suite::check_self_conjugacy(12), &mut problems);
    report(
        6,
        "(Φ(n,1..2^n)) self-conjugate, n<=12",
        cases,
        &problems,
        t0,
    );
}

#[test]
fn criterion_07_delta_suite() {
    let t0 = Instant::now();
    let mut problems = Vec::new();
    let cases = absorb(&suite::check_delta(256, 8), &mut problems);
    report(
        7,
        "δ properties k<=256, δ search identity t<=8",
        cases,
        &problems,
        t0,
    );
}

#[test]
fn criterion_08_chain() {
    let t0 = Instant::now();
    let mut problems = Vec::new();
    let mut cases = 0;
    for n in 0..=10u32 {
        let chain = canonical_chain(n).unwrap();
        let r = verify_chain(&chain).unwrap();
        cases += (r.indices.len() + r.anchors.len()) as u64;
        if !r.passed() {
            problems.push(format!("n={n}: failing indices {:?}", r.failing_indices()));
        }
        // Anchors, checked directly against the definitions.
        for a in (n % 2..=n.saturating_sub(2)).step_by(2).filter(|_| n >= 2) {
            cases += 2;
            let at = 1usize << a;
            let star = (1usize << n) - phi_fast(n, 1 << a).unwrap() as usize;
            if chain.families()[at] != c_family(n, a).unwrap() {
                problems.push(format!("n={n}: C_(n,{a}) missing at {at}"));
            }
            if chain.families()[star] != c_star_family(n, a).unwrap() {
                problems.push(format!("n={n}: C*_(n,{a}) missing at {star}"));
            }
        }
    }
    report(
        8,
        "canonical chain verified with anchors, n<=10",
        cases,
        &problems,
        t0,
    );
}

fn random_family(rng: &mut ChaCha8Rng, n: u32, m: usize) -> Family {
    let mut f = Family::empty(n).unwrap();
    while f.len() < m {
        f.insert(SubsetMask(rng.gen_range(0..1u32 << n))).unwrap();
    }
    f
}

fn random_pair(rng: &mut ChaCha8Rng, n: u32) -> ShiftPair {
    loop {
        let i = rng.gen_range(1..1u32 << n);
        let j = rng.gen_range(1..1u32 << n) & !i;
        if let Ok(p) = ShiftPair::new(n, SubsetMask(i), SubsetMask(j)) {
            return p;
        }
    }
}

/// Shift invariants for one family; returns the number of assertions made.
fn shift_invariants(f: &Family, p: &ShiftPair, problems: &mut Vec<String>) -> u64 {
    let mut cases = 2;
    let s = shift::shift(f, p).unwrap();
    if s.len() != f.len() {
        problems.push(format!("{f:?} {p}: size changed"));
    }
    if s.complement_family() != shift::shift(&f.complement_family(), &p.swapped()).unwrap() {
        problems.push(format!("{f:?} {p}: complement duality"));
    }
    if proper_subpairs_fix(f, p) {
        cases += 1;
        let down_ok = s
            .down_closure()
            .is_subfamily_of(&shift::shift(&f.down_closure(), p).unwrap())
            .unwrap();
        let up_ok = s
            .up_closure()
            .is_subfamily_of(&shift::shift(&f.up_closure(), p).unwrap())
            .unwrap();
        if !(down_ok && up_ok) {
            problems.push(format!("{f:?} {p}: closure monotonicity"));
        }
    }
    cases
}

/// Runs compression, checking the potential at each step; returns the result.
fn compress(f: &Family, cases: &mut u64, problems: &mut Vec<String>) -> Family {
    let mut prev = f.clone();
    for step in shift::shift_sequence(f) {
        *cases += 1;
        if !proper_subpairs_fix(&prev, &step.pair) {
            problems.push(format!("{prev:?}: step {} not minimal", step.pair));
        }
        if step.result.element_counts_descending() >= prev.element_counts_descending() {
            problems.push(format!(
                "{prev:?}: potential did not drop under {}",
                step.pair
            ));
        }
        *cases += shift_invariants(&prev, &step.pair, problems);
        prev = step.result;
    }
    prev
}

/// `|F↕| >= 2^{n−1} + m` for strongly shifted `F ⊄ C_{n,n−2}` with `m <= 2^{n−2}`.
fn check_bound(f: &Family, bound_cases: &mut u64, problems: &mut Vec<String>) {
    let n = f.ground_size();
    let c = c_family(n, n - 2).unwrap();
    if f.len() as u64 <= 1 << (n - 2) && !f.is_subfamily_of(&c).unwrap() {
        *bound_cases += 1;
        let need = (1usize << (n - 1)) + f.len();
        if f.updown_size() < need {
            problems.push(format!("{f:?}: |F↕| = {} < {need}", f.updown_size()));
        }
    }
}

#[test]
fn criterion_09_shifting() {
    let t0 = Instant::now();
    let mut problems = Vec::new();
    let mut cases = 0u64;
    let mut bound_cases = 0u64;
    // Exhaustive: every family of size <= 2^(n-2) over [n], n <= 4.
    for n in 2..=4u32 {
        let size = 1u32 << n;
        let pairs = ordered_pairs(n);
        for bits in 0u64..1 << size {
            if bits.count_ones() > 1 << (n - 2) {
                continue;
            }
            let f = Family::from_predicate(n, |s| bits >> s.0 & 1 == 1).unwrap();
            if pairs.iter().all(|p| !moves(&f, p)) {
                check_bound(&f, &mut bound_cases, &mut problems);
            }
        }
    }
    let exhaustive = bound_cases;

    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    // Randomised: shift random small families over [5] and [6] until 10^4
    // strongly shifted families outside C_{n,n−2} have been checked.
    let mut drawn = 0u64;
    while bound_cases < exhaustive + 10_000 && drawn < 1_000_000 {
        drawn += 1;
        let n = rng.gen_range(5..=6u32);
        let m = rng.gen_range(1..=1usize << (n - 2));
        let f = random_family(&mut rng, n, m);
        let p = random_pair(&mut rng, n);
        cases += shift_invariants(&f, &p, &mut problems);
        let g = compress(&f, &mut cases, &mut problems);
        cases += 1;
        if !shift::is_strongly_shifted(&g).unwrap() {
            problems.push(format!("{f:?}: compression did not finish"));
        }
        check_bound(&g, &mut bound_cases, &mut problems);
    }
    if bound_cases < exhaustive + 10_000 {
        problems.push(format!(
            "only {} randomised bound cases",
            bound_cases - exhaustive
        ));
    }
    // Random families over up to [8] for the size/duality/monotonicity checks.
    for _ in 0..2_000 {
        let n = rng.gen_range(2..=8u32);
        let m = rng.gen_range(0..=(1usize << n).min(40));
        let f = random_family(&mut rng, n, m);
        let p = random_pair(&mut rng, n);
        cases += shift_invariants(&f, &p, &mut problems);
    }
    cases += bound_cases;
    let title = format!(
        "shifting invariants; |F↕| >= 2^(n-1)+m on {exhaustive} exhaustive + {} random families",
        bound_cases - exhaustive
    );
    report(9, &title, cases, &problems, t0);
}

#[test]
fn criterion_10_cross_sperner() {
    let t0 = Instant::now();
    let mut problems = Vec::new();
    let mut cases = 0;
    for n in 2..=5u32 {
        cases += 1;
        let (got, bound) = (
            oracle::brute_cross_sperner_max(n).unwrap(),
            phi::cross_sperner_bound(n).unwrap(),
        );
        if got != bound {
            problems.push(format!("n={n}: search max {got}, bound {bound}"));
        }
    }
    cases += absorb(&suite::check_cross_sperner(16, 0), &mut problems);
    for n in [2u32, 4, 5] {
        cases += 1;
        let got = oracle::extremal_configs_m1(n).unwrap();
        let expect: Vec<Family> = (0..1u32 << n)
            .filter(|a| a.count_ones() == n / 2 || a.count_ones() == n.div_ceil(2))
            .map(|a| Family::from_masks(n, [SubsetMask(a)]).unwrap())
            .collect();
        if got != expect {
            problems.push(format!(
                "n={n}: {} extremal singletons, expected {}",
                got.len(),
                expect.len()
            ));
        }
        if got
            .iter()
            .any(|f| f.updown_size() as u64 != phi_fast(n, 1).unwrap())
        {
            problems.push(format!("n={n}: extremal singleton above Φ(n,1)"));
        }
    }
    report(
        10,
        "cross-Sperner max = bound (search n<=5, formula n<=16), m=1 extremals",
        cases,
        &problems,
        t0,
    );
}

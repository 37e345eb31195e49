//! The invariant sweeps behind `updown verify`. Each check reports how many
//! cases it examined and the first few that failed.

use std::fmt;

use crate::error::Result;
use crate::oracle::{self, SEARCH_MAX_N};
use crate::phi::{
    self, delta, lower_bound_f, phi_fast, satisfies_lower_bound, satisfies_upper_bound,
    DyadicRational, PhiRecursion,
};
use crate::witness::{self, canonical_chain, verify_chain};

const KEPT_FAILURES: usize = 5;

/// Outcome of one check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub scope: String,
    pub cases: u64,
    pub failures: Vec<String>,
    failed: u64,
}

impl CheckOutcome {
    fn new(name: &'static str, scope: String) -> Self {
        CheckOutcome {
            name,
            scope,
            cases: 0,
            failures: Vec::new(),
            failed: 0,
        }
    }

    fn case(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failed += 1;
            if self.failures.len() < KEPT_FAILURES {
                self.failures.push(what());
            }
        }
    }

    fn error(&mut self, e: impl fmt::Display) {
        self.case(false, || e.to_string());
    }

    pub fn passed(&self) -> bool {
        self.failed == 0
    }

    pub fn failed_cases(&self) -> u64 {
        self.failed
    }
}

impl fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed() { "PASS" } else { "FAIL" };
        write!(
            f,
            "{status} {:<18} {} ({} cases",
            self.name, self.scope, self.cases
        )?;
        if !self.passed() {
            write!(f, ", {} failed", self.failed)?;
        }
        write!(f, ")")?;
        for fail in &self.failures {
            write!(f, "\n     {fail}")?;
        }
        Ok(())
    }
}

/// Closed form against the recursion for every `n <= max_n`, every `m`.
pub fn check_phi_agreement(max_n: u32, rec: &mut PhiRecursion) -> CheckOutcome {
    let mut out = CheckOutcome::new("phi-agreement", format!("n <= {max_n}"));
    for n in 0..=max_n {
        for m in 0..=(1u64 << n) {
            match (phi_fast(n, m), rec.phi(n, m)) {
                (Ok(a), Ok(b)) => {
                    out.case(a == b, || format!("n={n} m={m}: fast {a}, recursive {b}"))
                }
                (Err(e), _) | (_, Err(e)) => out.error(e),
            }
        }
    }
    out
}

/// `f(n,m) <= Φ(n,m) <= f(n,m) + √(2^n)`, with `Φ = f` whenever `f` is an integer.
pub fn check_bounds(max_n: u32) -> CheckOutcome {
    let mut out = CheckOutcome::new("bounds", format!("n <= {max_n}"));
    for n in 0..=max_n {
        for m in 0..=(1u64 << n) {
            let (v, (f, exact)) = match (phi_fast(n, m), lower_bound_f(n, m)) {
                (Ok(v), Ok(lf)) => (v, lf),
                (Err(e), _) | (_, Err(e)) => {
                    out.error(e);
                    continue;
                }
            };
            out.case(satisfies_lower_bound(n, m, v), || {
                format!("n={n} m={m}: {v} below f")
            });
            out.case(satisfies_upper_bound(n, m, v), || {
                format!("n={n} m={m}: {v} above f + 2^(n/2)")
            });
            if exact {
                out.case(v == f, || format!("n={n} m={m}: {v} != f = {f}"));
            }
        }
    }
    out
}

/// Explicit upper bound holds everywhere and is attained on its window.
pub fn check_explicit_bound(max_n: u32) -> CheckOutcome {
    let mut out = CheckOutcome::new("explicit-bound", format!("n <= {max_n}"));
    for n in 0..=max_n {
        for m in 0..=(1u64 << n) {
            let r = (|| -> Result<_> {
                Ok((
                    phi_fast(n, m)?,
                    phi::upper_bound_explicit(n, m)?,
                    phi::explicit_bound_is_tight(n, m)?,
                ))
            })();
            match r {
                Ok((v, b, tight)) => {
                    out.case(b >= v, || format!("n={n} m={m}: bound {b} < {v}"));
                    if tight {
                        out.case(b == v, || {
                            format!("n={n} m={m}: bound {b} != {v} in window")
                        });
                    }
                }
                Err(e) => out.error(e),
            }
        }
    }
    out
}

/// `(Φ(n,1), .., Φ(n,2^n))` is a self-conjugate partition.
pub fn check_self_conjugacy(max_n: u32) -> CheckOutcome {
    let mut out = CheckOutcome::new("self-conjugacy", format!("n <= {max_n}"));
    for n in 0..=max_n {
        match phi::phi_table(n) {
            Ok(t) => out.case(t.is_self_conjugate(), || {
                format!("n={n}: not self-conjugate")
            }),
            Err(e) => out.error(e),
        }
    }
    out
}

fn dy(num: u64, exp: u32) -> DyadicRational {
    DyadicRational::new(num, exp).expect("valid dyadic")
}

/// The four basic properties of `δ_k` for `k <= max_k`, and the search
/// characterisation of `q − 2^t δ_k(ℓ) + ℓ` for `t <= max_t`.
pub fn check_delta(max_k: u64, max_t: u32) -> CheckOutcome {
    let mut out = CheckOutcome::new("delta", format!("k <= {max_k}, t <= {max_t}"));
    let d = |k: u64, x: u64, out: &mut CheckOutcome| match delta(k, x) {
        Ok(v) => Some(v),
        Err(e) => {
            out.error(e);
            None
        }
    };
    let (zero, one) = (dy(0, 0), dy(1, 0));
    for k in 1..=max_k {
        if let (Some(a), Some(b)) = (d(k, 0, &mut out), d(k, k, &mut out)) {
            out.case(a == zero && b == one, || {
                format!("δ_{k}(0) = {a}, δ_{k}(k) = {b}")
            });
        }
        // Least t with k <= 2^t; the inequality then holds for every larger t too.
        let t = 64 - (k - 1).leading_zeros();
        for x in 0..k {
            if let (Some(a), Some(b)) = (d(k, x, &mut out), d(k, x + 1, &mut out)) {
                // 2^t δ(x+1) − (x+1) >= 2^t δ(x) − x  <=>  δ(x) + 2^-t <= δ(x+1)
                let ok = sum_le(a, dy(1, t), b);
                out.case(ok, || format!("δ_{k}({}) − δ_{k}({x}) < 2^-{t}", x + 1));
            }
        }
        if k.is_power_of_two() {
            let t = k.trailing_zeros();
            for x in 0..=k {
                if let Some(v) = d(k, x, &mut out) {
                    out.case(v == dy(x, t), || {
                        format!("2^{t} δ_{k}({x}) = {v}·2^{t} != {x}")
                    });
                }
            }
        }
        if (k + 1).is_power_of_two() {
            let t = (k + 1).trailing_zeros();
            for x in 1..=k {
                if let Some(v) = d(k, x, &mut out) {
                    out.case(v == dy(x + 1, t), || {
                        format!("2^{t} δ_{k}({x}) = {v}·2^{t} != {}", x + 1)
                    });
                }
            }
        }
    }
    for t in 1..=max_t {
        let total = 1u64 << t;
        for k in 1..total {
            let q = total - k;
            // 2^t δ_q(r) − r for each r, and 2^t δ_k(ℓ) for each ℓ.
            let slack: Option<Vec<i64>> = (0..=q)
                .map(|r| {
                    d(q, r, &mut out)
                        .and_then(|v| v.scaled_by_pow2(t))
                        .map(|s| s as i64 - r as i64)
                })
                .collect();
            let scaled_k: Option<Vec<u64>> = (0..=k)
                .map(|l| d(k, l, &mut out).and_then(|v| v.scaled_by_pow2(t)))
                .collect();
            let (Some(slack), Some(scaled_k)) = (slack, scaled_k) else {
                out.case(false, || format!("t={t} k={k}: 2^t δ not integral"));
                continue;
            };
            for l in 0..=k {
                let greatest = (0..=q).rev().find(|&r| slack[r as usize] <= (k - l) as i64);
                let expect = (q + l).checked_sub(scaled_k[l as usize]);
                out.case(greatest.is_some() && greatest == expect, || {
                    format!("t={t} k={k} q={q} ℓ={l}: greatest r {greatest:?}, formula {expect:?}")
                });
            }
        }
    }
    out
}

/// `a + b <= c` for dyadics, by cross-multiplication on a common exponent.
fn sum_le(a: DyadicRational, b: DyadicRational, c: DyadicRational) -> bool {
    let e = a.exp().max(b.exp()).max(c.exp());
    let lift = |x: DyadicRational| (x.num() as u128) << (e - x.exp());
    lift(a) + lift(b) <= lift(c)
}

/// Canonical chains pass every index and anchor check.
pub fn check_chains(max_n: u32) -> CheckOutcome {
    let max_n = max_n.min(witness::CHAIN_MAX_N);
    let mut out = CheckOutcome::new("chain", format!("n <= {max_n}"));
    for n in 0..=max_n {
        let report = canonical_chain(n).and_then(|c| verify_chain(&c));
        match report {
            Ok(r) => {
                for ix in &r.indices {
                    out.case(ix.passed(), || format!("n={n} m={}: {ix:?}", ix.m));
                }
                for an in &r.anchors {
                    out.case(an.ok, || format!("n={n}: anchor {an:?}"));
                }
            }
            Err(e) => out.error(e),
        }
    }
    out
}

/// Brute-force minima against the closed form for every `n <= oracle_max`
/// (`<= 5`); for `n = 5` also the convex-restricted search.
pub fn check_oracle(oracle_max: u32) -> CheckOutcome {
    let top = oracle_max.min(SEARCH_MAX_N);
    let mut out = CheckOutcome::new("oracle", format!("n <= {top}"));
    for n in 0..=top {
        for m in 0..=(1u64 << n) {
            let expect = match phi_fast(n, m) {
                Ok(v) => v,
                Err(e) => {
                    out.error(e);
                    continue;
                }
            };
            match oracle::brute_min_updown(n, m) {
                Ok((v, w)) => out.case(
                    v == expect && w.len() as u64 == m && w.updown_size() as u64 == v,
                    || format!("n={n} m={m}: search {v}, closed form {expect}"),
                ),
                Err(e) => out.error(e),
            }
            if n == SEARCH_MAX_N {
                match oracle::brute_min_updown_convex(n, m) {
                    Ok(v) => out.case(v == expect, || {
                        format!("n={n} m={m}: convex search {v}, closed form {expect}")
                    }),
                    Err(e) => out.error(e),
                }
            }
        }
    }
    out
}

/// Cross-Sperner maximum equals `2^n − 2^⌈n/2⌉ − 2^⌊n/2⌋ + 2` from the
/// closed form for `2 <= n <= max_n` and by search for `n <= oracle_max`.
pub fn check_cross_sperner(max_n: u32, oracle_max: u32) -> CheckOutcome {
    let mut out = CheckOutcome::new(
        "cross-sperner",
        format!("n <= {max_n}, search n <= {}", oracle_max.min(SEARCH_MAX_N)),
    );
    for n in 2..=max_n {
        match (phi::cross_sperner_max(n), phi::cross_sperner_bound(n)) {
            (Ok(a), Ok(b)) => out.case(a == b, || format!("n={n}: max {a}, bound {b}")),
            (Err(e), _) | (_, Err(e)) => out.error(e),
        }
        if n <= oracle_max.min(SEARCH_MAX_N) {
            match (
                oracle::brute_cross_sperner_max(n),
                phi::cross_sperner_bound(n),
            ) {
                (Ok(a), Ok(b)) => out.case(a == b, || format!("n={n}: search max {a}, bound {b}")),
                (Err(e), _) | (_, Err(e)) => out.error(e),
            }
        }
    }
    out
}

/// Scope of a full `verify` run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SuiteConfig {
    /// Ground sizes for the formula sweeps.
    pub max_n: u32,
    /// Ground sizes for the brute-force searches (at most 5).
    pub oracle_max: u32,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            max_n: 16,
            oracle_max: 4,
        }
    }
}

/// Every check, in a fixed order. Explicit-bound and self-conjugacy sweeps
/// stop at 12, chains at 10.
pub fn run_suite(cfg: SuiteConfig, rec: &mut PhiRecursion) -> Vec<CheckOutcome> {
    vec![
        check_phi_agreement(cfg.max_n, rec),
        check_bounds(cfg.max_n),
        check_explicit_bound(cfg.max_n.min(12)),
        check_self_conjugacy(cfg.max_n.min(12)),
        check_delta(256, 8),
        check_chains(cfg.max_n.min(10)),
        check_oracle(cfg.oracle_max),
        check_cross_sperner(cfg.max_n, cfg.oracle_max),
    ]
}

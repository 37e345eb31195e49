//! Exact values of `Φ(n, m)`, the least `|F↕|` over `m`-element families of
//! subsets of `[n]`, by a memoised recursion and by an `O(n)` closed form,
//! together with the square-root bounds and cross-Sperner quantities that
//! follow from them.
//!
//! Everything on the exact path is integer arithmetic.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;

use crate::error::{out_of_range, Error, Result};
use crate::family::{check_ground_size, MAX_N};

/// Largest `n` for which [`phi_table`] materialises a full column.
pub const TABLE_MAX_N: u32 = 20;

fn check_m(n: u32, m: u64) -> Result<()> {
    check_ground_size("phi", n)?;
    if m > 1u64 << n {
        return Err(out_of_range("m", m, 0, 1u64 << n));
    }
    Ok(())
}

/// Floor square root, checked by multiplication: `r² ≤ x < (r+1)²`.
pub fn isqrt(x: u128) -> u128 {
    let r = x.isqrt();
    assert!(r * r <= x && (r + 1).checked_mul(r + 1).is_none_or(|s| s > x));
    r
}

// ---------------------------------------------------------------------------
// Dyadic rationals and δ_k

/// Exact value `num / 2^exp` in `[0, 1]`. Not normalised; comparisons
/// cross-multiply.
#[derive(Clone, Copy, Debug)]
pub struct DyadicRational {
    num: u64,
    exp: u32,
}

impl DyadicRational {
    pub fn new(num: u64, exp: u32) -> Result<Self> {
        if exp > 63 || num > 1u64 << exp {
            return Err(out_of_range(
                "dyadic numerator",
                num,
                0,
                1u64 << exp.min(63),
            ));
        }
        Ok(DyadicRational { num, exp })
    }

    pub fn num(&self) -> u64 {
        self.num
    }

    pub fn exp(&self) -> u32 {
        self.exp
    }

    /// `2^shift · self` when that is an integer.
    pub fn scaled_by_pow2(&self, shift: u32) -> Option<u64> {
        if self.exp <= shift {
            (self.num as u128)
                .checked_shl(shift - self.exp)
                .and_then(|v| u64::try_from(v).ok())
        } else {
            let drop = self.exp - shift;
            (self.num & ((1u64 << drop) - 1) == 0).then(|| self.num >> drop)
        }
    }

    fn aligned(&self, other: &Self) -> (u128, u128) {
        let e = self.exp.max(other.exp);
        (
            (self.num as u128) << (e - self.exp),
            (other.num as u128) << (e - other.exp),
        )
    }
}

impl PartialEq for DyadicRational {
    fn eq(&self, other: &Self) -> bool {
        let (a, b) = self.aligned(other);
        a == b
    }
}

impl Eq for DyadicRational {}

impl PartialOrd for DyadicRational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for DyadicRational {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b) = self.aligned(other);
        a.cmp(&b)
    }
}

impl fmt::Display for DyadicRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/2^{}", self.num, self.exp)
    }
}

/// `δ_k(x)` for `k >= 1`, `0 <= x <= k`.
///
/// `δ_1(x) = x`; otherwise with `h = ⌊k/2⌋`, `δ_k(x) = δ_h(x)/2` when `x < h`
/// and `1/2 + δ_{k-h}(x-h)/2` when `x >= h`.
pub fn delta(k: u64, x: u64) -> Result<DyadicRational> {
    if k == 0 {
        return Err(out_of_range("k", k, 1, u64::MAX));
    }
    if x > k {
        return Err(out_of_range("x", x, 0, k));
    }
    Ok(delta_unchecked(k, x))
}

fn delta_unchecked(k: u64, x: u64) -> DyadicRational {
    if k == 1 {
        return DyadicRational { num: x, exp: 0 };
    }
    let h = k / 2;
    if x < h {
        let d = delta_unchecked(h, x);
        DyadicRational {
            num: d.num,
            exp: d.exp + 1,
        }
    } else {
        let d = delta_unchecked(k - h, x - h);
        DyadicRational {
            num: (1u64 << d.exp) + d.num,
            exp: d.exp + 1,
        }
    }
}

// ---------------------------------------------------------------------------
// Closed form

/// Parameters of the closed form for one `(n, m)` with `m >= 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QuickParams {
    /// 1 for even `n`, 2 for odd `n`.
    pub kappa: u64,
    /// The positive integer with `κc(c-1) <= m < κc(c+1)`.
    pub c: u64,
    /// `⌊n/2⌋`.
    pub nu: u32,
}

impl QuickParams {
    pub fn new(n: u32, m: u64) -> Result<Self> {
        check_m(n, m)?;
        if m == 0 {
            return Err(out_of_range("m", 0, 1, 1u64 << n));
        }
        let kappa = if n.is_multiple_of(2) { 1 } else { 2 };
        // κc(c-1) <= m  <=>  c(c-1) <= ⌊m/κ⌋  <=>  (2c-1)² <= 4⌊m/κ⌋ + 1
        let q = m / kappa;
        let c = (isqrt(4 * q as u128 + 1) as u64).div_ceil(2);
        debug_assert!(kappa * c * (c - 1) <= m && m < kappa * c * (c + 1));
        Ok(QuickParams {
            kappa,
            c,
            nu: n / 2,
        })
    }

    /// `√(κ 2^n) = κ 2^ν`, as a power-of-two exponent.
    pub fn root_log2(&self) -> u32 {
        self.nu + (self.kappa as u32 - 1)
    }
}

/// `Φ(n, m)` by the closed form
/// `√(κ2^n)·(2c − 1 + 2δ_{2κc}(m − κc(c−1))) − m`, with `Φ(n, 0) = 0`.
pub fn phi_fast(n: u32, m: u64) -> Result<u64> {
    check_m(n, m)?;
    if m == 0 {
        return Ok(0);
    }
    let QuickParams { kappa, c, nu } = QuickParams::new(n, m)?;
    let r = (QuickParams { kappa, c, nu }).root_log2();
    let d = delta_unchecked(2 * kappa * c, m - kappa * c * (c - 1));
    let frac = d.scaled_by_pow2(r + 1).ok_or_else(|| {
        Error::PreconditionViolated(format!("2^{} * delta = {d} is not integral", r + 1))
    })?;
    Ok(((2 * c - 1) << r) + frac - m)
}

// ---------------------------------------------------------------------------
// Recursion

/// Memo for the recursion `Φ(n,m) = 2Φ(n−2,m) + m` on `m <= 2^{n−2}` and
/// `Φ(n,m) = 2^n − s` above it, `s` the largest `s <= 2^{n−2}` with
/// `Φ(n,s) <= 2^n − m`.
///
/// Only the strictly increasing prefix `Φ(n, 0..=2^{n−2})` is stored per `n`;
/// the upper branch is a binary search over it.
#[derive(Clone, Debug, Default)]
pub struct PhiRecursion {
    prefixes: Vec<Option<Vec<u64>>>,
}

impl PhiRecursion {
    pub fn new() -> Self {
        Self::default()
    }

    fn ensure(&mut self, n: u32) {
        let idx = n as usize;
        if self.prefixes.len() <= idx {
            self.prefixes.resize(idx + 1, None);
        }
        if self.prefixes[idx].is_some() {
            return;
        }
        let col = match n {
            0 => vec![0, 1],
            1 => vec![0, 2, 2],
            _ => {
                self.ensure(n - 2);
                let lim = 1u64 << (n - 2);
                (0..=lim).map(|m| 2 * self.lookup(n - 2, m) + m).collect()
            }
        };
        self.prefixes[idx] = Some(col);
    }

    fn lookup(&self, n: u32, m: u64) -> u64 {
        let col = self.prefixes[n as usize].as_ref().expect("filled");
        if n < 2 || m <= 1u64 << (n - 2) {
            return col[m as usize];
        }
        let budget = (1u64 << n) - m;
        let s = col.partition_point(|&v| v <= budget) as u64 - 1;
        (1u64 << n) - s
    }

    /// `Φ(n, m)`.
    pub fn phi(&mut self, n: u32, m: u64) -> Result<u64> {
        check_m(n, m)?;
        self.ensure(n);
        Ok(self.lookup(n, m))
    }

    /// Overwrites one stored prefix value. Only for exercising verification
    /// failure paths.
    #[doc(hidden)]
    pub fn corrupt(&mut self, n: u32, m: u64, value: u64) {
        self.ensure(n);
        if let Some(slot) = self.prefixes[n as usize]
            .as_mut()
            .and_then(|c| c.get_mut(m as usize))
        {
            *slot = value;
        }
    }
}

thread_local! {
    static RECURSION: RefCell<PhiRecursion> = RefCell::new(PhiRecursion::new());
}

/// `Φ(n, m)` by the recursion, using a per-thread memo.
pub fn phi_recursive(n: u32, m: u64) -> Result<u64> {
    RECURSION.with(|r| r.borrow_mut().phi(n, m))
}

// ---------------------------------------------------------------------------
// Bounds

/// `⌊f(n,m)⌋` for `f(n,m) = √(2^{n+2}m) − m`, and whether `f` is an integer.
pub fn lower_bound_f(n: u32, m: u64) -> Result<(u64, bool)> {
    check_m(n, m)?;
    let x = (m as u128) << (n + 2);
    let r = isqrt(x);
    Ok(((r - m as u128) as u64, r * r == x))
}

/// `(Φ + m)² >= 2^{n+2} m`, i.e. `value >= f(n,m)`.
pub fn satisfies_lower_bound(n: u32, m: u64, value: u64) -> bool {
    let a = (value + m) as u128;
    a * a >= (m as u128) << (n + 2)
}

/// `value <= f(n,m) + √(2^n)`, decided on squares.
pub fn satisfies_upper_bound(n: u32, m: u64, value: u64) -> bool {
    // With A = value + m and s = 2^n the claim is A − √s <= 2√(sm).
    let a = (value + m) as i128;
    let s = 1i128 << n;
    if a * a <= s {
        return true;
    }
    let t = a * a + s - 4 * s * m as i128;
    t <= 0 || t * t <= 4 * a * a * s
}

/// Least `a ∈ {0..n}` with `a ≡ n (mod 2)` and `m < 2^{a+1}`.
pub fn explicit_exponent(n: u32, m: u64) -> Result<u32> {
    check_m(n, m)?;
    let a = (n % 2..=n)
        .step_by(2)
        .find(|&a| m < 1u64 << (a + 1))
        .expect("a = n always qualifies");
    Ok(a)
}

/// `√(2^{n+a}) + √(2^{n−a})·m − m`, with `0` for `m = 0`.
pub fn upper_bound_explicit(n: u32, m: u64) -> Result<u64> {
    let a = explicit_exponent(n, m)?;
    if m == 0 {
        return Ok(0);
    }
    Ok((1u64 << ((n + a) / 2)) + (m << ((n - a) / 2)) - m)
}

/// Whether `m` lies in the window where the explicit bound is attained:
/// `2^a − 2^⌈a/2⌉ − 2^⌊a/2⌋ + 2 <= m <= 2^a + 2^⌈a/2⌉ + 2^⌊a/2⌋ − 1`.
pub fn explicit_bound_is_tight(n: u32, m: u64) -> Result<bool> {
    let a = explicit_exponent(n, m)?;
    let side = (1i64 << a.div_ceil(2)) + (1i64 << (a / 2));
    let centre = 1i64 << a;
    let m = m as i64;
    Ok(centre - side + 2 <= m && m < centre + side)
}

// ---------------------------------------------------------------------------
// Conjugacy and cross-Sperner values

/// Greatest `s ∈ {0..2^n}` with `Φ(n,s) <= 2^n − m`.
pub fn self_conjugate_s(n: u32, m: u64) -> Result<u64> {
    check_m(n, m)?;
    let budget = (1u64 << n) - m;
    // Φ(n,0) = 0 always qualifies; Φ is nondecreasing.
    let (mut lo, mut hi) = (0u64, (1u64 << n) + 1);
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if phi_fast(n, mid)? <= budget {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// `ℓ* = 2^n − Φ(n, ℓ)` for `ℓ <= 2^{n−2}`.
pub fn star_index(n: u32, l: u64) -> Result<u64> {
    check_ground_size("phi", n)?;
    let lim = if n >= 2 { 1u64 << (n - 2) } else { 0 };
    if l > lim {
        return Err(out_of_range("l", l, 0, lim));
    }
    Ok((1u64 << n) - phi_fast(n, l)?)
}

/// `g(n,m) = 2^n − Φ(n,m)`, the largest partner of an `m`-family in a cross-Sperner pair.
pub fn cross_sperner_g(n: u32, m: u64) -> Result<u64> {
    check_m(n, m)?;
    if m == 0 {
        return Err(out_of_range("m", 0, 1, 1u64 << n));
    }
    Ok((1u64 << n) - phi_fast(n, m)?)
}

/// `2^n − 2^⌈n/2⌉ − 2^⌊n/2⌋ + 2`, for `n >= 2`.
pub fn cross_sperner_bound(n: u32) -> Result<u64> {
    check_ground_size("phi", n)?;
    if n < 2 {
        return Err(out_of_range("n", n as u64, 2, MAX_N as u64));
    }
    Ok((1u64 << n) - (1u64 << n.div_ceil(2)) - (1u64 << (n / 2)) + 2)
}

/// `max (m + g(n,m))` over `m >= 1` with `g(n,m) >= 1`, for `n >= 2`.
pub fn cross_sperner_max(n: u32) -> Result<u64> {
    check_ground_size("phi", n)?;
    if n < 2 {
        return Err(out_of_range("n", n as u64, 2, MAX_N as u64));
    }
    let mut best = 0;
    for m in 1..=(1u64 << n) {
        let g = cross_sperner_g(n, m)?;
        if g == 0 {
            // Φ is nondecreasing, so g stays 0 from here on.
            break;
        }
        best = best.max(m + g);
    }
    Ok(best)
}

// ---------------------------------------------------------------------------
// Tables

/// `Φ(n, 0..=2^n)` for one `n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhiTable {
    n: u32,
    values: Vec<u64>,
}

impl PhiTable {
    pub fn ground_size(&self) -> u32 {
        self.n
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }

    pub fn get(&self, m: u64) -> Option<u64> {
        self.values.get(m as usize).copied()
    }

    /// `(Φ(n,1), .., Φ(n,2^n))` as a partition with parts in decreasing order.
    pub fn partition(&self) -> Vec<u64> {
        self.values[1..].iter().rev().copied().collect()
    }

    /// Conjugate of [`PhiTable::partition`]: part `j` counts parts `>= j`.
    pub fn conjugate_partition(&self) -> Vec<u64> {
        let parts = self.partition();
        let largest = parts.first().copied().unwrap_or(0);
        let mut out = Vec::with_capacity(largest as usize);
        let mut count = parts.len();
        // parts is decreasing, so the ones >= j form a shrinking prefix.
        for j in 1..=largest {
            while count > 0 && parts[count - 1] < j {
                count -= 1;
            }
            out.push(count as u64);
        }
        out
    }

    pub fn is_self_conjugate(&self) -> bool {
        self.partition() == self.conjugate_partition()
    }

    /// Side of the Durfee square: largest `d` whose `d`-th largest part is `>= d`.
    pub fn durfee_side(&self) -> u64 {
        self.partition()
            .iter()
            .enumerate()
            .take_while(|(i, &p)| p > *i as u64)
            .count() as u64
    }
}

/// `Φ(n, ·)` by the closed form, cross-checked entry by entry against the recursion.
pub fn phi_table(n: u32) -> Result<PhiTable> {
    if n > TABLE_MAX_N {
        return Err(Error::TooLarge {
            what: "phi table",
            n,
            max: TABLE_MAX_N,
        });
    }
    let mut rec = PhiRecursion::new();
    phi_table_checked(n, &mut rec)
}

/// [`phi_table`] against a caller-supplied recursion memo.
pub fn phi_table_checked(n: u32, rec: &mut PhiRecursion) -> Result<PhiTable> {
    if n > TABLE_MAX_N {
        return Err(Error::TooLarge {
            what: "phi table",
            n,
            max: TABLE_MAX_N,
        });
    }
    let mut values = Vec::with_capacity((1usize << n) + 1);
    for m in 0..=(1u64 << n) {
        let fast = phi_fast(n, m)?;
        let recursive = rec.phi(n, m)?;
        if fast != recursive {
            return Err(Error::MethodDisagreement {
                n,
                m,
                fast,
                recursive,
            });
        }
        values.push(fast);
    }
    Ok(PhiTable { n, values })
}

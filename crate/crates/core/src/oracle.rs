//! Direct search for `min |F↕|` over `m`-families of subsets of `[n]`, small
//! `n` only. Nothing here consults the formula engines; families are plain
//! `u64` bitmaps over the `2^n <= 32` masks and closures are unions of
//! per-set comparability masks.

use std::collections::HashSet;
use std::sync::atomic::{AtomicU64, Ordering as AtomicOrdering};
use std::sync::OnceLock;

use rayon::prelude::*;

use crate::error::{out_of_range, Error, Result};
use crate::family::{Family, SubsetMask};

/// Largest `n` searched by full enumeration of `m`-subsets.
pub const EXHAUSTIVE_MAX_N: u32 = 4;
/// Largest `n` searched by branch and bound or over convex families.
pub const SEARCH_MAX_N: u32 = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SearchMode {
    /// Every `m`-subset of `2^[n]` in colex order; `n <= 4`.
    Exhaustive,
    /// Depth-first over increasing masks with incumbent pruning; `n <= 5`.
    BranchAndBound,
}

/// `table[a]` = bitmap of all `b` with `a ⊆ b` or `b ⊆ a`.
fn comparability_table(n: u32) -> Vec<u64> {
    let size = 1u32 << n;
    (0..size)
        .map(|a| {
            (0..size)
                .filter(|&b| a & b == a || a & b == b)
                .fold(0u64, |acc, b| acc | 1 << b)
        })
        .collect()
}

fn up_table(n: u32) -> Vec<u64> {
    let size = 1u32 << n;
    (0..size)
        .map(|a| {
            (0..size)
                .filter(|&b| a & b == a)
                .fold(0u64, |acc, b| acc | 1 << b)
        })
        .collect()
}

fn down_table(n: u32) -> Vec<u64> {
    let size = 1u32 << n;
    (0..size)
        .map(|a| {
            (0..size)
                .filter(|&b| a & b == b)
                .fold(0u64, |acc, b| acc | 1 << b)
        })
        .collect()
}

fn closure_of(bits: u64, table: &[u64]) -> u64 {
    let mut rest = bits;
    let mut acc = 0;
    while rest != 0 {
        acc |= table[rest.trailing_zeros() as usize];
        rest &= rest - 1;
    }
    acc
}

fn to_family(n: u32, bits: u64) -> Family {
    let mut rest = bits;
    let masks = std::iter::from_fn(move || {
        if rest == 0 {
            return None;
        }
        let tz = rest.trailing_zeros();
        rest &= rest - 1;
        Some(SubsetMask(tz))
    });
    Family::from_masks(n, masks).expect("masks below 2^n")
}

fn check(n: u32, m: u64, max_n: u32, what: &'static str) -> Result<()> {
    if n > max_n {
        return Err(Error::TooLarge {
            what,
            n,
            max: max_n,
        });
    }
    if m > 1u64 << n {
        return Err(out_of_range("m", m, 0, 1u64 << n));
    }
    Ok(())
}

/// Exact `min |F↕|` over all `m`-families and one family attaining it.
/// Uses [`SearchMode::Exhaustive`] for `n <= 4`, branch and bound for `n = 5`.
pub fn brute_min_updown(n: u32, m: u64) -> Result<(u64, Family)> {
    let mode = if n <= EXHAUSTIVE_MAX_N {
        SearchMode::Exhaustive
    } else {
        SearchMode::BranchAndBound
    };
    brute_min_updown_with(n, m, mode)
}

pub fn brute_min_updown_with(n: u32, m: u64, mode: SearchMode) -> Result<(u64, Family)> {
    match mode {
        SearchMode::Exhaustive => {
            check(n, m, EXHAUSTIVE_MAX_N, "exhaustive oracle")?;
            let (value, bits) = exhaustive(n, m as u32);
            Ok((value, to_family(n, bits)))
        }
        SearchMode::BranchAndBound => {
            check(n, m, SEARCH_MAX_N, "branch-and-bound oracle")?;
            let (value, bits) = branch_and_bound(n, m as u32);
            Ok((value, to_family(n, bits)))
        }
    }
}

/// First minimiser in colex order of the `m`-subsets of `2^[n]`.
fn exhaustive(n: u32, m: u32) -> (u64, u64) {
    let size = 1u32 << n;
    if m == 0 {
        return (0, 0);
    }
    let table = comparability_table(n);
    let limit = if size == 64 {
        u64::MAX
    } else {
        (1u64 << size) - 1
    };
    let mut combo: u64 = (1u64 << m) - 1;
    let mut best = (u64::MAX, 0u64);
    loop {
        let value = closure_of(combo, &table).count_ones() as u64;
        if value < best.0 {
            best = (value, combo);
        }
        if m == size {
            break;
        }
        // Gosper's hack: next integer with the same popcount, i.e. next in colex order.
        let low = combo & combo.wrapping_neg();
        let ripple = combo + low;
        let next = (((ripple ^ combo) >> 2) / low) | ripple;
        if next > limit || next < combo {
            break;
        }
        combo = next;
    }
    best
}

struct Search<'a> {
    size: u32,
    m: u32,
    table: &'a [u64],
    shared: &'a AtomicU64,
    best: (u64, u64),
}

impl Search<'_> {
    fn dfs(&mut self, start: u32, chosen: u32, family: u64, closure: u64) {
        let u = closure.count_ones() as u64;
        if chosen == self.m {
            if u < self.best.0 {
                self.best = (u, family);
                self.shared.fetch_min(u, AtomicOrdering::Relaxed);
            }
            return;
        }
        let remaining = self.m - chosen;
        if self.size - start < remaining {
            return;
        }
        // Members still to come either sit inside the closure already (free) or
        // add at least one new set each.
        let tail = if start >= 64 { 0 } else { !0u64 << start };
        let free = (closure & !family & tail).count_ones() as u64;
        let bound = u + (remaining as u64).saturating_sub(free);
        if bound >= self.best.0 || bound > self.shared.load(AtomicOrdering::Relaxed) {
            return;
        }
        for a in start..self.size {
            self.dfs(
                a + 1,
                chosen + 1,
                family | 1 << a,
                closure | self.table[a as usize],
            );
        }
    }
}

/// Splits on the smallest member; merges by value, then smallest bitmap.
fn branch_and_bound(n: u32, m: u32) -> (u64, u64) {
    if m == 0 {
        return (0, 0);
    }
    let size = 1u32 << n;
    let table = comparability_table(n);
    let shared = AtomicU64::new(u64::MAX);
    (0..=size - m)
        .into_par_iter()
        .map(|first| {
            let mut s = Search {
                size,
                m,
                table: &table,
                shared: &shared,
                best: (u64::MAX, 0),
            };
            s.dfs(first + 1, 1, 1 << first, table[first as usize]);
            s.best
        })
        .reduce(|| (u64::MAX, 0), |a, b| a.min(b))
}

static CONVEX_PROFILES: [OnceLock<Vec<u64>>; SEARCH_MAX_N as usize + 1] =
    [const { OnceLock::new() }; SEARCH_MAX_N as usize + 1];

/// `profile[m]` = least `|F↕|` over convex `m`-families, `n <= 5`.
///
/// Enumerates every convex family of `2^[n]` level by level: each convex
/// family of size `m + 1` is a convex family of size `m` plus one set (drop
/// any minimal member), so growing by single sets and keeping the convex
/// results reaches all of them. Levels are deduplicated by bitmap.
pub fn convex_profile(n: u32) -> Result<Vec<u64>> {
    check(n, 0, SEARCH_MAX_N, "convex oracle")?;
    Ok(CONVEX_PROFILES[n as usize]
        .get_or_init(|| compute_convex_profile(n))
        .clone())
}

fn compute_convex_profile(n: u32) -> Vec<u64> {
    let size = 1usize << n;
    let up = up_table(n);
    let down = down_table(n);
    let mut profile = vec![0u64];
    // (family, up-closure, down-closure)
    let mut level: Vec<(u64, u64, u64)> = vec![(0, 0, 0)];
    for _ in 0..size {
        let next: HashSet<(u64, u64, u64)> = level
            .par_iter()
            .flat_map_iter(|&(f, u, d)| {
                let (up, down) = (&up, &down);
                (0..size).filter_map(move |a| {
                    if f >> a & 1 == 1 {
                        return None;
                    }
                    let g = f | 1 << a;
                    let (gu, gd) = (u | up[a], d | down[a]);
                    (gu & gd == g).then_some((g, gu, gd))
                })
            })
            .collect();
        let least = next
            .iter()
            .map(|&(_, u, d)| (u | d).count_ones() as u64)
            .min()
            .expect("some convex family of every size exists");
        profile.push(least);
        level = next.into_iter().collect();
    }
    profile
}

/// Least `|F↕|` over convex `m`-families, `n <= 5`.
pub fn brute_min_updown_convex(n: u32, m: u64) -> Result<u64> {
    check(n, m, SEARCH_MAX_N, "convex oracle")?;
    Ok(convex_profile(n)?[m as usize])
}

/// `max |F| + |G|` over cross-Sperner pairs of nonempty families, `2 <= n <= 5`,
/// as `max_m (m + 2^n − min|F↕|)` over `m` leaving a nonempty partner.
pub fn brute_cross_sperner_max(n: u32) -> Result<u64> {
    if !(2..=SEARCH_MAX_N).contains(&n) {
        return Err(out_of_range("n", n as u64, 2, SEARCH_MAX_N as u64));
    }
    let total = 1u64 << n;
    let mut best = 0;
    for m in 1..=total {
        let (least, _) = brute_min_updown(n, m)?;
        if least < total {
            best = best.max(m + total - least);
        }
    }
    Ok(best)
}

/// All singleton families `{A}` whose closure is as small as any singleton's,
/// for `n ∈ {2, 4, 5}`.
pub fn extremal_configs_m1(n: u32) -> Result<Vec<Family>> {
    if !(2..=SEARCH_MAX_N).contains(&n) || n == 3 {
        return Err(out_of_range("n", n as u64, 2, SEARCH_MAX_N as u64));
    }
    let table = comparability_table(n);
    let sizes: Vec<u32> = table.iter().map(|c| c.count_ones()).collect();
    let least = *sizes.iter().min().expect("nonempty lattice");
    Ok((0..1u32 << n)
        .filter(|&a| sizes[a as usize] == least)
        .map(|a| Family::from_masks(n, [SubsetMask(a)]).expect("mask fits"))
        .collect())
}

//! Witness families: the interval families `C_{n,a}` and their conjugates,
//! sandwich lifts, join products, and the nested chain of convex witnesses
//! `F_0 ⊊ F_1 ⊊ … ⊊ F_{2^n}` with `|F_m↕| = Φ(n,m)` for every `m`.

use serde::Serialize;

use crate::error::{out_of_range, Error, Result};
use crate::family::{check_ground_size, Family, SubsetMask};
use crate::phi::{phi_fast, star_index};

/// Largest ground size for [`canonical_chain`].
pub const CHAIN_MAX_N: u32 = 12;

fn check_parity(n: u32, a: u32) -> Result<()> {
    check_ground_size("witness family", n)?;
    if a > n {
        return Err(out_of_range("a", a as u64, 0, n as u64));
    }
    if !(n - a).is_multiple_of(2) {
        return Err(Error::ParityMismatch { n, a });
    }
    Ok(())
}

/// `C_{n,a} = {A : [(n−a)/2] ⊆ A ⊆ [(n+a)/2]}`.
pub fn c_family(n: u32, a: u32) -> Result<Family> {
    check_parity(n, a)?;
    let low = SubsetMask::prefix((n - a) / 2);
    let high = SubsetMask::prefix((n + a) / 2);
    Family::from_predicate(n, |s| low.is_subset_of(s) && s.is_subset_of(high))
}

/// `C*_{n,a} = {A : A ⊄ {(n−a)/2+1..n} and {(n+a)/2+1..n} ⊄ A}`.
pub fn c_star_family(n: u32, a: u32) -> Result<Family> {
    check_parity(n, a)?;
    let low = SubsetMask::prefix((n - a) / 2);
    let tail = SubsetMask::prefix((n + a) / 2).complement(n);
    Family::from_predicate(n, |s| !s.is_disjoint(low) && !tail.is_subset_of(s))
}

/// `{{1} ∪ σ(P) : P ∈ P}` over `[n]`, where `σ` shifts every element of a
/// subset of `[n−2]` up by one. `P` must be convex.
pub fn sandwich_lift(p: &Family, n: u32) -> Result<Family> {
    check_ground_size("sandwich lift", n)?;
    if n < 2 || p.ground_size() != n - 2 {
        return Err(Error::PreconditionViolated(format!(
            "lift to n={n} needs a family over [{}], got [{}]",
            n.saturating_sub(2),
            p.ground_size()
        )));
    }
    if !p.is_convex() {
        return Err(Error::NotConvex("lifted family"));
    }
    Family::from_masks(n, p.iter().map(|s| SubsetMask(1 | (s.0 << 1))))
}

/// `{A ∪ B : A ∈ F1, B ∈ F2}` where `F1` lives on `[k]` and `F2` on
/// `{k+1..n}` (given relabelled to `[n−k]`). Requires `[k] ∈ F1`, `∅ ∈ F2`,
/// both convex.
pub fn join_product(f1: &Family, f2: &Family, k: u32, n: u32) -> Result<Family> {
    check_ground_size("join product", n)?;
    if k > n || f1.ground_size() != k || f2.ground_size() != n - k {
        return Err(Error::PreconditionViolated(format!(
            "join over k={k}, n={n} needs families over [{k}] and [{}]",
            n.saturating_sub(k)
        )));
    }
    if !f1.contains(SubsetMask::full(k)) {
        return Err(Error::PreconditionViolated(format!(
            "[{k}] not in first family"
        )));
    }
    if !f2.contains(SubsetMask::EMPTY) {
        return Err(Error::PreconditionViolated(
            "empty set not in second family".into(),
        ));
    }
    if !f1.is_convex() || !f2.is_convex() {
        return Err(Error::PreconditionViolated(
            "join factors must be convex".into(),
        ));
    }
    let mut out = Family::empty(n)?;
    for a in f1.iter() {
        for b in f2.iter() {
            out.insert(SubsetMask(a.0 | (b.0 << k)))?;
        }
    }
    Ok(out)
}

/// The `size` subsets of `[k]` of largest cardinality (ties: larger mask
/// first). An up-set containing `[k]`.
fn top_family(k: u32, size: u64) -> Result<Family> {
    let mut masks: Vec<u32> = (0..(1u32 << k)).collect();
    masks.sort_by_key(|&m| (std::cmp::Reverse(m.count_ones()), std::cmp::Reverse(m)));
    Family::from_masks(k, masks.into_iter().take(size as usize).map(SubsetMask))
}

/// The `size` subsets of `[k]` of least cardinality (ties: smaller mask
/// first). A down-set containing `∅`.
fn bottom_family(k: u32, size: u64) -> Result<Family> {
    let mut masks: Vec<u32> = (0..(1u32 << k)).collect();
    masks.sort_by_key(|&m| (m.count_ones(), m));
    Family::from_masks(k, masks.into_iter().take(size as usize).map(SubsetMask))
}

/// Witness of size `c²` (even `n`) or `2c²` (odd `n`) built as a join product
/// of a top segment of `2^[k]` and a bottom segment of `2^{[n]∖[k]}`,
/// `k = ⌊n/2⌋`.
pub fn product_witness(n: u32, c: u64) -> Result<Family> {
    check_ground_size("product witness", n)?;
    let k = n / 2;
    let cap = 1u64 << k;
    if c == 0 || c > cap {
        return Err(out_of_range("c", c, 1, cap));
    }
    let f1 = top_family(k, c)?;
    let f2 = bottom_family(n - k, if n.is_multiple_of(2) { c } else { 2 * c })?;
    join_product(&f1, &f2, k, n)
}

/// Convex families strictly between `lower ⊊ upper`, one for each
/// intermediate size, in increasing order of size.
///
/// Works down from `upper`, each time deleting a set of `upper ∖ lower` that
/// is maximal (preferred) or minimal in the current family, largest mask first.
pub fn interpolate(lower: &Family, upper: &Family) -> Result<Vec<Family>> {
    if !lower.is_subfamily_of(upper)? || lower.len() == upper.len() {
        return Err(Error::NotNested);
    }
    if !lower.is_convex() {
        return Err(Error::NotConvex("lower family"));
    }
    if !upper.is_convex() {
        return Err(Error::NotConvex("upper family"));
    }
    let gap = upper.len() - lower.len();
    let mut out = Vec::with_capacity(gap.saturating_sub(1));
    let mut current = upper.clone();
    for _ in 1..gap {
        let free = current.difference(lower)?;
        let pick = current
            .maximal_sets()
            .intersection(&free)?
            .iter()
            .last()
            .or_else(|| {
                current
                    .minimal_sets()
                    .intersection(&free)
                    .ok()
                    .and_then(|f| f.iter().last())
            })
            .expect("a convex proper superfamily has a removable extreme set");
        current.remove(pick);
        out.push(current.clone());
    }
    out.reverse();
    Ok(out)
}

/// A nested sequence of families indexed by size `0..=2^n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chain {
    n: u32,
    families: Vec<Family>,
}

impl Chain {
    /// Wraps `families` as a chain over `[n]`; checks only the shape
    /// (`2^n + 1` entries, all over `[n]`). Use [`verify_chain`] for the rest.
    pub fn from_families(n: u32, families: Vec<Family>) -> Result<Self> {
        check_ground_size("chain", n)?;
        let expect = (1usize << n) + 1;
        if families.len() != expect {
            return Err(Error::PreconditionViolated(format!(
                "chain over [{n}] needs {expect} families, got {}",
                families.len()
            )));
        }
        if let Some(f) = families.iter().find(|f| f.ground_size() != n) {
            return Err(Error::GroundSizeMismatch {
                left: n,
                right: f.ground_size(),
            });
        }
        Ok(Chain { n, families })
    }

    pub fn ground_size(&self) -> u32 {
        self.n
    }

    pub fn families(&self) -> &[Family] {
        &self.families
    }

    pub fn get(&self, m: usize) -> Option<&Family> {
        self.families.get(m)
    }

    pub fn into_families(self) -> Vec<Family> {
        self.families
    }
}

/// The canonical witness chain over `[n]`, `n <= 12`.
///
/// For `n >= 2` the first quarter lifts the chain over `[n−2]`, each `F_ℓ`
/// with `ℓ <= 2^{n−2}` placing its conjugate at index `ℓ*`, and the gaps
/// between consecutive conjugates are filled by [`interpolate`].
pub fn canonical_chain(n: u32) -> Result<Chain> {
    if n > CHAIN_MAX_N {
        return Err(Error::TooLarge {
            what: "canonical chain",
            n,
            max: CHAIN_MAX_N,
        });
    }
    let families = build_chain(n)?;
    Chain::from_families(n, families)
}

fn build_chain(n: u32) -> Result<Vec<Family>> {
    match n {
        0 => return Ok(vec![Family::empty(0)?, Family::full(0)?]),
        1 => {
            return Ok(vec![
                Family::empty(1)?,
                Family::from_sets(1, &[[1]])?,
                Family::full(1)?,
            ])
        }
        _ => {}
    }
    let quarter = 1usize << (n - 2);
    let lifted: Vec<Family> = build_chain(n - 2)?
        .iter()
        .map(|p| sandwich_lift(p, n))
        .collect::<Result<_>>()?;
    debug_assert_eq!(lifted.len(), quarter + 1);

    let mut families: Vec<Option<Family>> = vec![None; (1usize << n) + 1];
    for (l, f) in lifted.iter().enumerate() {
        families[l] = Some(f.clone());
    }
    // Walk ℓ downwards so that conjugate indices ℓ* increase.
    let mut prev = (quarter, lifted[quarter].clone());
    for l in (0..quarter).rev() {
        let idx = star_index(n, l as u64)? as usize;
        let conj = lifted[l].conjugate();
        for (offset, mid) in interpolate(&prev.1, &conj)?.into_iter().enumerate() {
            families[prev.0 + 1 + offset] = Some(mid);
        }
        families[idx] = Some(conj.clone());
        prev = (idx, conj);
    }
    families
        .into_iter()
        .enumerate()
        .map(|(m, f)| {
            f.ok_or_else(|| Error::PreconditionViolated(format!("chain index {m} left empty")))
        })
        .collect()
}

/// Checks recorded for one chain index.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IndexCheck {
    pub m: usize,
    pub cardinality: usize,
    pub cardinality_ok: bool,
    /// `F_{m−1} ⊊ F_m`; vacuously true at `m = 0`.
    pub nested_ok: bool,
    pub convex_ok: bool,
    pub closure_size: usize,
    pub phi: u64,
    pub witness_ok: bool,
}

impl IndexCheck {
    pub fn passed(&self) -> bool {
        self.cardinality_ok && self.nested_ok && self.convex_ok && self.witness_ok
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum AnchorKind {
    C,
    CStar,
}

/// Whether `C_{n,a}` (or `C*_{n,a}`) sits at its expected index.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AnchorCheck {
    pub kind: AnchorKind,
    pub a: u32,
    pub index: usize,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub n: u32,
    pub indices: Vec<IndexCheck>,
    pub anchors: Vec<AnchorCheck>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.indices.iter().all(IndexCheck::passed) && self.anchors.iter().all(|a| a.ok)
    }

    /// Indices with any failing check.
    pub fn failing_indices(&self) -> Vec<usize> {
        self.indices
            .iter()
            .filter(|c| !c.passed())
            .map(|c| c.m)
            .collect()
    }
}

/// Checks every chain invariant against `Φ` from the closed form, plus the
/// placement of `C_{n,a}` at `2^a` and `C*_{n,a}` at `2^n − Φ(n,2^a)` for
/// every `a <= n−2` with `a ≡ n (mod 2)`.
pub fn verify_chain(chain: &Chain) -> Result<VerificationReport> {
    use rayon::prelude::*;

    let n = chain.n;
    let fams = &chain.families;
    let indices = (0..fams.len())
        .into_par_iter()
        .map(|m| {
            let f = &fams[m];
            let cardinality = f.len();
            let nested_ok = m == 0 || {
                let prev = &fams[m - 1];
                prev.is_subfamily_of(f).unwrap_or(false) && prev.len() < cardinality
            };
            let closure_size = f.updown_size();
            let phi = phi_fast(n, m as u64)?;
            Ok(IndexCheck {
                m,
                cardinality,
                cardinality_ok: cardinality == m,
                nested_ok,
                convex_ok: f.is_convex(),
                closure_size,
                phi,
                witness_ok: closure_size as u64 == phi,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut anchors = Vec::new();
    if n >= 2 {
        for a in (n % 2..=n - 2).step_by(2) {
            let index = 1usize << a;
            anchors.push(AnchorCheck {
                kind: AnchorKind::C,
                a,
                index,
                ok: fams[index] == c_family(n, a)?,
            });
            let index = star_index(n, 1u64 << a)? as usize;
            anchors.push(AnchorCheck {
                kind: AnchorKind::CStar,
                a,
                index,
                ok: fams[index] == c_star_family(n, a)?,
            });
        }
    }
    Ok(VerificationReport {
        n,
        indices,
        anchors,
    })
}

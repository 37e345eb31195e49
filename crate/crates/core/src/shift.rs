//! Generalised shifting `S_{I,J}`, where a member may change size, and the
//! compression procedure that drives a family to a strongly shifted one.

use std::fmt;

use crate::error::{Error, Result};
use crate::family::{Family, SubsetMask};

/// Largest ground size accepted by [`is_strongly_shifted`].
pub const STRONG_SHIFT_MAX_N: u32 = 14;

/// Two nonempty disjoint subsets `(I, J)` of `[n]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ShiftPair {
    i: SubsetMask,
    j: SubsetMask,
}

impl ShiftPair {
    pub fn new(n: u32, i: SubsetMask, j: SubsetMask) -> Result<Self> {
        if i.is_empty() || j.is_empty() {
            return Err(Error::InvalidShiftPair(format!("empty side in ({i}, {j})")));
        }
        if !i.is_disjoint(j) {
            return Err(Error::InvalidShiftPair(format!("{i} and {j} overlap")));
        }
        if !i.fits(n) || !j.fits(n) {
            return Err(Error::InvalidShiftPair(format!(
                "({i}, {j}) not contained in [{n}]"
            )));
        }
        Ok(ShiftPair { i, j })
    }

    pub fn from_elements(n: u32, i: &[u32], j: &[u32]) -> Result<Self> {
        let valid = |s: &[u32]| s.iter().all(|&e| e >= 1 && e <= n);
        if !valid(i) || !valid(j) {
            return Err(Error::InvalidShiftPair(format!(
                "({i:?}, {j:?}) not contained in [{n}]"
            )));
        }
        Self::new(
            n,
            SubsetMask::from_elements(i.iter().copied()),
            SubsetMask::from_elements(j.iter().copied()),
        )
    }

    pub fn i(&self) -> SubsetMask {
        self.i
    }

    pub fn j(&self) -> SubsetMask {
        self.j
    }

    /// `max(I) < min(J)`.
    pub fn is_ordered(&self) -> bool {
        self.i.max_element() < self.j.min_element()
    }

    /// The pair with its sides exchanged.
    pub fn swapped(&self) -> ShiftPair {
        ShiftPair {
            i: self.j,
            j: self.i,
        }
    }

    fn canonical_key(&self) -> (u32, u32, u32, u32) {
        (
            self.j.max_element().unwrap_or(0),
            self.i.len() + self.j.len(),
            self.i.0,
            self.j.0,
        )
    }

    /// Image of one member under the shift, ignoring collisions.
    fn moved(&self, a: SubsetMask) -> Option<SubsetMask> {
        (a.is_disjoint(self.i) && self.j.is_subset_of(a))
            .then_some(SubsetMask((a.0 & !self.j.0) | self.i.0))
    }
}

impl fmt::Display for ShiftPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.i, self.j)
    }
}

fn check_pair(f: &Family, p: &ShiftPair) -> Result<()> {
    let n = f.ground_size();
    if !p.i.fits(n) || !p.j.fits(n) {
        return Err(Error::InvalidShiftPair(format!(
            "{p} not contained in [{n}]"
        )));
    }
    Ok(())
}

/// `S_{I,J}(F)`: each member `A` with `A ∩ I = ∅` and `J ⊆ A` becomes
/// `(A \ J) ∪ I` unless that set is already a member.
pub fn shift(f: &Family, p: &ShiftPair) -> Result<Family> {
    check_pair(f, p)?;
    let mut out = f.clone();
    for a in f.iter() {
        if let Some(b) = p.moved(a) {
            if !f.contains(b) {
                out.remove(a);
                out.insert(b).expect("image stays inside [n]");
            }
        }
    }
    Ok(out)
}

/// Whether `S_{I,J}(F) ≠ F`.
pub fn moves(f: &Family, p: &ShiftPair) -> bool {
    f.iter().any(|a| p.moved(a).is_some_and(|b| !f.contains(b)))
}

/// Every ordered pair `(I, J)` over `[n]`, sorted by `max(J)`, then
/// `|I| + |J|`, then `(I, J)` as integers.
///
/// With this order the first pair that moves a family is minimal: every pair
/// built from a proper subset of `I` or of `J` sorts strictly earlier.
pub fn ordered_pairs(n: u32) -> Vec<ShiftPair> {
    let mut pairs = Vec::new();
    for j in 1..(1u32 << n) {
        let below = j.trailing_zeros();
        for i in 1..(1u32 << below) {
            pairs.push(ShiftPair {
                i: SubsetMask(i),
                j: SubsetMask(j),
            });
        }
    }
    pairs.sort_by_key(ShiftPair::canonical_key);
    pairs
}

/// Ordered pairs that move `F`, in canonical order.
pub fn violating_pairs(f: &Family) -> Vec<ShiftPair> {
    ordered_pairs(f.ground_size())
        .into_iter()
        .filter(|p| moves(f, p))
        .collect()
}

/// Whether every ordered pair fixes `F`. Limited to `n <= 14`.
pub fn is_strongly_shifted(f: &Family) -> Result<bool> {
    let n = f.ground_size();
    if n > STRONG_SHIFT_MAX_N {
        return Err(Error::TooLarge {
            what: "strong-shift check",
            n,
            max: STRONG_SHIFT_MAX_N,
        });
    }
    Ok(!ordered_pairs(n).iter().any(|p| moves(f, p)))
}

/// Whether all shifts by `(I', J)` and `(I, J')` with `I' ⊊ I`, `J' ⊊ J`
/// nonempty fix `F`.
pub fn proper_subpairs_fix(f: &Family, p: &ShiftPair) -> bool {
    let fixes_all = |side: SubsetMask, make: &dyn Fn(SubsetMask) -> ShiftPair| {
        let full = side.0;
        let mut sub = (full - 1) & full;
        while sub != 0 {
            if moves(f, &make(SubsetMask(sub))) {
                return false;
            }
            sub = (sub - 1) & full;
        }
        true
    };
    fixes_all(p.i, &|i| ShiftPair { i, j: p.j }) && fixes_all(p.j, &|j| ShiftPair { i: p.i, j })
}

/// One applied shift of the compression procedure.
#[derive(Clone, Debug)]
pub struct ShiftStep {
    pub pair: ShiftPair,
    pub result: Family,
}

/// Iterator over the shifts applied by [`strongly_shift`].
pub struct ShiftSequence {
    pairs: Vec<ShiftPair>,
    current: Family,
}

impl Iterator for ShiftSequence {
    type Item = ShiftStep;

    fn next(&mut self) -> Option<ShiftStep> {
        let pair = *self.pairs.iter().find(|p| moves(&self.current, p))?;
        let result = shift(&self.current, &pair).expect("pair fits ground size");
        self.current = result.clone();
        Some(ShiftStep { pair, result })
    }
}

/// Applies minimal violating ordered shifts one at a time until none remains.
pub fn shift_sequence(f: &Family) -> ShiftSequence {
    ShiftSequence {
        pairs: ordered_pairs(f.ground_size()),
        current: f.clone(),
    }
}

/// A strongly shifted family of the same size, reached by [`shift_sequence`].
pub fn strongly_shift(f: &Family) -> Family {
    shift_sequence(f)
        .last()
        .map(|step| step.result)
        .unwrap_or_else(|| f.clone())
}

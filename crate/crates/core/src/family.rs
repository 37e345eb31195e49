//! Families of subsets of `[n]` stored as membership bit vectors over all
//! `2^n` masks, with closures computed by zeta-style passes over the lattice.
//!
//! Element `i` of `[n]` corresponds to bit `i - 1` of a [`SubsetMask`]; the
//! family keeps bit `p` of its member vector set exactly when mask `p` belongs
//! to it.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported ground size. A family over `[24]` occupies 2 MiB.
pub const MAX_N: u32 = 24;

/// One subset of `[n]`; bit `i - 1` set means element `i` is present.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SubsetMask(pub u32);

impl SubsetMask {
    pub const EMPTY: SubsetMask = SubsetMask(0);

    /// The full set `[n]`.
    pub fn full(n: u32) -> Self {
        SubsetMask(full_mask(n))
    }

    /// The prefix `[k] = {1, .., k}`.
    pub fn prefix(k: u32) -> Self {
        SubsetMask(full_mask(k))
    }

    /// Builds a mask from 1-based elements.
    pub fn from_elements<I: IntoIterator<Item = u32>>(elements: I) -> Self {
        let mut bits = 0u32;
        for e in elements {
            assert!((1..=32).contains(&e), "element {e} outside 1..=32");
            bits |= 1 << (e - 1);
        }
        SubsetMask(bits)
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    /// Elements in ascending order, 1-based.
    pub fn elements(self) -> impl Iterator<Item = u32> {
        let mut rest = self.0;
        std::iter::from_fn(move || {
            if rest == 0 {
                return None;
            }
            let tz = rest.trailing_zeros();
            rest &= rest - 1;
            Some(tz + 1)
        })
    }

    pub fn len(self) -> u32 {
        self.0.count_ones()
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, element: u32) -> bool {
        (1..=32).contains(&element) && self.0 & (1 << (element - 1)) != 0
    }

    pub fn is_subset_of(self, other: SubsetMask) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_disjoint(self, other: SubsetMask) -> bool {
        self.0 & other.0 == 0
    }

    /// Largest element, if any.
    pub fn max_element(self) -> Option<u32> {
        (self.0 != 0).then(|| 32 - self.0.leading_zeros())
    }

    /// Smallest element, if any.
    pub fn min_element(self) -> Option<u32> {
        (self.0 != 0).then(|| self.0.trailing_zeros() + 1)
    }

    pub fn fits(self, n: u32) -> bool {
        self.0 & !full_mask(n) == 0
    }

    /// `[n] \ self`.
    pub fn complement(self, n: u32) -> Self {
        SubsetMask(!self.0 & full_mask(n))
    }

    /// Image under `x -> n + 1 - x`.
    pub fn reverse(self, n: u32) -> Self {
        if n == 0 {
            return self;
        }
        SubsetMask(self.0.reverse_bits() >> (32 - n))
    }
}

impl fmt::Display for SubsetMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, e) in self.elements().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{e}")?;
        }
        f.write_str("}")
    }
}

pub(crate) fn full_mask(n: u32) -> u32 {
    if n >= 32 {
        u32::MAX
    } else {
        (1u32 << n) - 1
    }
}

pub(crate) fn check_ground_size(what: &'static str, n: u32) -> Result<()> {
    if n > MAX_N {
        return Err(Error::TooLarge {
            what,
            n,
            max: MAX_N,
        });
    }
    Ok(())
}

/// Positions whose coordinate `i` is clear, within one 64-bit word.
const LOW: [u64; 6] = [
    0x5555_5555_5555_5555,
    0x3333_3333_3333_3333,
    0x0f0f_0f0f_0f0f_0f0f,
    0x00ff_00ff_00ff_00ff,
    0x0000_ffff_0000_ffff,
    0x0000_0000_ffff_ffff,
];

fn word_count(n: u32) -> usize {
    if n <= 6 {
        1
    } else {
        1 << (n - 6)
    }
}

fn tail_mask(n: u32) -> u64 {
    if n >= 6 {
        u64::MAX
    } else {
        (1u64 << (1u32 << n)) - 1
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Direction {
    Up,
    Down,
}

/// In-place zeta pass: afterwards `words` is the up (or down) closure.
fn close(words: &mut [u64], n: u32, dir: Direction) {
    for i in 0..n {
        if i < 6 {
            let s = 1u32 << i;
            for w in words.iter_mut() {
                match dir {
                    Direction::Up => *w |= (*w & LOW[i as usize]) << s,
                    Direction::Down => *w |= (*w >> s) & LOW[i as usize],
                }
            }
        } else {
            let stride = 1usize << (i - 6);
            for chunk in words.chunks_exact_mut(2 * stride) {
                let (lo, hi) = chunk.split_at_mut(stride);
                for (l, h) in lo.iter_mut().zip(hi.iter_mut()) {
                    match dir {
                        Direction::Up => *h |= *l,
                        Direction::Down => *l |= *h,
                    }
                }
            }
        }
    }
}

/// Union over coordinates of the one-step moves of `words` (add one element
/// for `Up`, drop one for `Down`). No accumulation across coordinates.
fn one_step(words: &[u64], n: u32, dir: Direction) -> Vec<u64> {
    let mut acc = vec![0u64; words.len()];
    for i in 0..n {
        if i < 6 {
            let s = 1u32 << i;
            for (a, &w) in acc.iter_mut().zip(words) {
                match dir {
                    Direction::Up => *a |= (w & LOW[i as usize]) << s,
                    Direction::Down => *a |= (w >> s) & LOW[i as usize],
                }
            }
        } else {
            let stride = 1usize << (i - 6);
            for (acc_chunk, src_chunk) in acc
                .chunks_exact_mut(2 * stride)
                .zip(words.chunks_exact(2 * stride))
            {
                let (acc_lo, acc_hi) = acc_chunk.split_at_mut(stride);
                let (src_lo, src_hi) = src_chunk.split_at(stride);
                match dir {
                    Direction::Up => {
                        for (a, &s) in acc_hi.iter_mut().zip(src_lo) {
                            *a |= s;
                        }
                    }
                    Direction::Down => {
                        for (a, &s) in acc_lo.iter_mut().zip(src_hi) {
                            *a |= s;
                        }
                    }
                }
            }
        }
    }
    acc
}

/// A family of subsets of `[n]`.
///
/// Equality is equality of `(n, members)`; families over different ground
/// sizes are never equal and binary operations on them fail.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Family {
    n: u32,
    words: Vec<u64>,
}

impl fmt::Debug for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Family(n={}, [", self.n)?;
        for (i, m) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{m}")?;
        }
        f.write_str("])")
    }
}

/// `F↑`, `F↓` and `F↕` of one family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosureTriple {
    pub up: Family,
    pub down: Family,
    pub updown: Family,
}

impl Family {
    /// The empty family over `[n]`.
    pub fn empty(n: u32) -> Result<Self> {
        check_ground_size("family", n)?;
        Ok(Family {
            n,
            words: vec![0; word_count(n)],
        })
    }

    /// `2^[n]`.
    pub fn full(n: u32) -> Result<Self> {
        let mut f = Self::empty(n)?;
        f.words.fill(u64::MAX);
        f.words[0] &= tail_mask(n);
        Ok(f)
    }

    pub fn from_masks<I: IntoIterator<Item = SubsetMask>>(n: u32, masks: I) -> Result<Self> {
        let mut f = Self::empty(n)?;
        for m in masks {
            f.insert(m)?;
        }
        Ok(f)
    }

    /// Builds a family from sets given as 1-based element lists.
    pub fn from_sets<S: AsRef<[u32]>>(n: u32, sets: &[S]) -> Result<Self> {
        let mut f = Self::empty(n)?;
        for set in sets {
            let mut bits = 0u32;
            for &e in set.as_ref() {
                if e == 0 || e > n {
                    return Err(Error::MaskOutOfRange {
                        mask: if e == 0 || e > 32 {
                            u32::MAX
                        } else {
                            1 << (e - 1)
                        },
                        n,
                    });
                }
                bits |= 1 << (e - 1);
            }
            f.insert(SubsetMask(bits))?;
        }
        Ok(f)
    }

    /// Builds a family whose members are the masks `p < 2^n` with `pred(p)`.
    pub fn from_predicate(n: u32, mut pred: impl FnMut(SubsetMask) -> bool) -> Result<Self> {
        let mut f = Self::empty(n)?;
        for p in 0..(1u64 << n) {
            let m = SubsetMask(p as u32);
            if pred(m) {
                f.set_bit(m, true);
            }
        }
        Ok(f)
    }

    pub fn ground_size(&self) -> u32 {
        self.n
    }

    /// Number of members.
    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn contains(&self, mask: SubsetMask) -> bool {
        if !mask.fits(self.n) {
            return false;
        }
        let p = mask.0 as usize;
        self.words[p >> 6] >> (p & 63) & 1 == 1
    }

    fn set_bit(&mut self, mask: SubsetMask, value: bool) {
        let p = mask.0 as usize;
        if value {
            self.words[p >> 6] |= 1 << (p & 63);
        } else {
            self.words[p >> 6] &= !(1 << (p & 63));
        }
    }

    /// Adds `mask`; returns whether it was newly inserted.
    pub fn insert(&mut self, mask: SubsetMask) -> Result<bool> {
        if !mask.fits(self.n) {
            return Err(Error::MaskOutOfRange {
                mask: mask.0,
                n: self.n,
            });
        }
        let fresh = !self.contains(mask);
        self.set_bit(mask, true);
        Ok(fresh)
    }

    /// Removes `mask`; returns whether it was present.
    pub fn remove(&mut self, mask: SubsetMask) -> bool {
        let present = self.contains(mask);
        if present {
            self.set_bit(mask, false);
        }
        present
    }

    /// Members in ascending mask order.
    pub fn iter(&self) -> impl Iterator<Item = SubsetMask> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let tz = rest.trailing_zeros();
                rest &= rest - 1;
                Some(SubsetMask(((wi as u32) << 6) | tz))
            })
        })
    }

    /// Member vector as 64-bit words, position `p` at bit `p % 64` of word `p / 64`.
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    fn same_ground(&self, other: &Family) -> Result<()> {
        if self.n != other.n {
            return Err(Error::GroundSizeMismatch {
                left: self.n,
                right: other.n,
            });
        }
        Ok(())
    }

    fn zip_with(&self, other: &Family, op: impl Fn(u64, u64) -> u64) -> Result<Family> {
        self.same_ground(other)?;
        Ok(Family {
            n: self.n,
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(&a, &b)| op(a, b))
                .collect(),
        })
    }

    pub fn union(&self, other: &Family) -> Result<Family> {
        self.zip_with(other, |a, b| a | b)
    }

    pub fn intersection(&self, other: &Family) -> Result<Family> {
        self.zip_with(other, |a, b| a & b)
    }

    pub fn difference(&self, other: &Family) -> Result<Family> {
        self.zip_with(other, |a, b| a & !b)
    }

    pub fn is_subfamily_of(&self, other: &Family) -> Result<bool> {
        self.same_ground(other)?;
        Ok(self
            .words
            .iter()
            .zip(&other.words)
            .all(|(&a, &b)| a & !b == 0))
    }

    /// `2^[n] \ self`.
    pub fn set_complement(&self) -> Family {
        let mut words: Vec<u64> = self.words.iter().map(|w| !w).collect();
        words[0] &= tail_mask(self.n);
        Family { n: self.n, words }
    }

    /// Compares member vectors as big integers (highest mask most significant).
    pub fn cmp_bits(&self, other: &Family) -> Ordering {
        self.n
            .cmp(&other.n)
            .then_with(|| self.words.iter().rev().cmp(other.words.iter().rev()))
    }

    /// `F↑`: all sets containing some member.
    pub fn up_closure(&self) -> Family {
        let mut out = self.clone();
        close(&mut out.words, self.n, Direction::Up);
        out
    }

    /// `F↓`: all sets contained in some member.
    pub fn down_closure(&self) -> Family {
        let mut out = self.clone();
        close(&mut out.words, self.n, Direction::Down);
        out
    }

    pub fn updown_closure(&self) -> ClosureTriple {
        let up = self.up_closure();
        let down = self.down_closure();
        let updown = up.union(&down).expect("same ground size");
        ClosureTriple { up, down, updown }
    }

    /// `|F↕|`.
    pub fn updown_size(&self) -> usize {
        let up = self.up_closure();
        let down = self.down_closure();
        up.words
            .iter()
            .zip(&down.words)
            .map(|(&a, &b)| (a | b).count_ones() as usize)
            .sum()
    }

    /// `F↑ ∩ F↓ = F`.
    pub fn is_convex(&self) -> bool {
        let up = self.up_closure();
        let down = self.down_closure();
        up.words
            .iter()
            .zip(&down.words)
            .zip(&self.words)
            .all(|((&u, &d), &f)| u & d == f)
    }

    /// Members with no proper subset in the family.
    pub fn minimal_sets(&self) -> Family {
        let above = one_step(&self.up_closure().words, self.n, Direction::Up);
        Family {
            n: self.n,
            words: self
                .words
                .iter()
                .zip(&above)
                .map(|(&f, &a)| f & !a)
                .collect(),
        }
    }

    /// Members with no proper superset in the family.
    pub fn maximal_sets(&self) -> Family {
        let below = one_step(&self.down_closure().words, self.n, Direction::Down);
        Family {
            n: self.n,
            words: self
                .words
                .iter()
                .zip(&below)
                .map(|(&f, &b)| f & !b)
                .collect(),
        }
    }

    fn map_members(&self, f: impl Fn(SubsetMask) -> SubsetMask) -> Family {
        let mut out = Family {
            n: self.n,
            words: vec![0; self.words.len()],
        };
        for m in self.iter() {
            out.set_bit(f(m), true);
        }
        out
    }

    /// Elementwise complement `{[n] \ A : A ∈ F}` (not `2^[n] \ F`).
    pub fn complement_family(&self) -> Family {
        let n = self.n;
        self.map_members(|m| m.complement(n))
    }

    /// Elementwise reverse under `x -> n + 1 - x`.
    pub fn reverse_family(&self) -> Family {
        let n = self.n;
        self.map_members(|m| m.reverse(n))
    }

    /// `2^[n] \ (ρ(F))↕`.
    pub fn conjugate(&self) -> Family {
        let rev = self.reverse_family();
        let up = rev.up_closure();
        let down = rev.down_closure();
        let mut words: Vec<u64> = up
            .words
            .iter()
            .zip(&down.words)
            .map(|(&u, &d)| !(u | d))
            .collect();
        words[0] &= tail_mask(self.n);
        Family { n: self.n, words }
    }

    /// Vertex boundary in the comparability graph: `F↕ \ F`.
    pub fn boundary(&self) -> Family {
        let ClosureTriple { updown, .. } = self.updown_closure();
        updown.difference(self).expect("same ground size")
    }

    /// Counts of members containing `n, n-1, .., 1`, in that order.
    pub fn element_counts_descending(&self) -> Vec<usize> {
        let mut counts = vec![0usize; self.n as usize];
        for m in self.iter() {
            for e in m.elements() {
                counts[(self.n - e) as usize] += 1;
            }
        }
        counts
    }
}

// ---------------------------------------------------------------------------
// Text and structured formats

/// Renders `n=<n>` followed by one `{a,b,..}` line per member (ascending mask order).
pub fn format_family(f: &Family) -> String {
    let mut out = format!("n={}\n", f.n);
    for m in f.iter() {
        out.push_str(&m.to_string());
        out.push('\n');
    }
    out
}

fn parse_set(line: &str, n: u32, lineno: usize) -> Result<SubsetMask> {
    let err = |message: String| Error::Parse {
        line: lineno,
        message,
    };
    let inner = line
        .strip_prefix('{')
        .and_then(|s| s.strip_suffix('}'))
        .ok_or_else(|| err(format!("expected `{{..}}`, got `{line}`")))?;
    let mut bits = 0u32;
    if inner.trim().is_empty() {
        return Ok(SubsetMask(0));
    }
    for tok in inner.split(',') {
        let e: u32 = tok
            .trim()
            .parse()
            .map_err(|_| err(format!("bad element `{}`", tok.trim())))?;
        if e == 0 || e > n {
            return Err(err(format!("element {e} outside [{n}]")));
        }
        bits |= 1 << (e - 1);
    }
    Ok(SubsetMask(bits))
}

/// Parses the text format written by [`format_family`]. Blank lines are
/// skipped; duplicate sets are rejected.
pub fn parse_family(text: &str) -> Result<Family> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());
    let (hline, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        message: "missing `n=<int>` header".into(),
    })?;
    let n: u32 = header
        .split_once('=')
        .filter(|(k, _)| k.trim() == "n")
        .and_then(|(_, v)| v.trim().parse().ok())
        .ok_or_else(|| Error::Parse {
            line: hline,
            message: format!("expected `n=<int>`, got `{header}`"),
        })?;
    let mut f = Family::empty(n)?;
    for (lineno, line) in lines {
        let m = parse_set(line, n, lineno)?;
        if !f.insert(m)? {
            return Err(Error::Parse {
                line: lineno,
                message: format!("duplicate set {m}"),
            });
        }
    }
    Ok(f)
}

/// Structured form: ground size plus each member as a sorted element list.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyDoc {
    pub n: u32,
    pub sets: Vec<Vec<u32>>,
}

impl From<&Family> for FamilyDoc {
    fn from(f: &Family) -> Self {
        FamilyDoc {
            n: f.n,
            sets: f.iter().map(|m| m.elements().collect()).collect(),
        }
    }
}

impl TryFrom<&FamilyDoc> for Family {
    type Error = Error;

    fn try_from(doc: &FamilyDoc) -> Result<Family> {
        Family::from_sets(doc.n, &doc.sets)
    }
}

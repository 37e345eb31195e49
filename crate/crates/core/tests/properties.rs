use proptest::prelude::*;

use updown_core::phi::{phi_fast, star_index};
use updown_core::shift::{self, moves, ordered_pairs, proper_subpairs_fix, ShiftPair};
use updown_core::witness::{c_family, c_star_family, canonical_chain, join_product, sandwich_lift};
use updown_core::{Family, SubsetMask};

/// A family over `[n]`: a handful of random masks, or (when `dense`) all
/// masks except a handful.
fn family_over(n: u32) -> impl Strategy<Value = Family> {
    let size = 1u32 << n;
    (
        prop::collection::vec(0..size, 0..=(size as usize).min(24)),
        any::<bool>(),
    )
        .prop_map(move |(masks, dense)| {
            let f = Family::from_masks(n, masks.into_iter().map(SubsetMask)).unwrap();
            if dense {
                f.set_complement()
            } else {
                f
            }
        })
}

fn family(max_n: u32) -> impl Strategy<Value = Family> {
    (0..=max_n).prop_flat_map(family_over)
}

/// Two families over the same `[n]`.
fn family_pair(max_n: u32) -> impl Strategy<Value = (Family, Family)> {
    (0..=max_n).prop_flat_map(|n| (family_over(n), family_over(n)))
}

/// `F↑ ∩ F↓` of a random family: an arbitrary convex family.
fn convex(max_n: u32) -> impl Strategy<Value = Family> {
    family(max_n).prop_map(|f| f.up_closure().intersection(&f.down_closure()).unwrap())
}

/// A family over `[n]`, `n >= 2`, with a nonempty disjoint pair `(I, J)`.
fn family_and_pair(max_n: u32) -> impl Strategy<Value = (Family, ShiftPair)> {
    (2..=max_n).prop_flat_map(|n| {
        let size = 1u32 << n;
        // Each element goes to I, J or neither; force one of each.
        (family_over(n), 0..size, 0..size, 0..n, 0..n - 1).prop_map(move |(f, i, j, a, b)| {
            let b = if b >= a { b + 1 } else { b };
            let i = (i & !j & !(1 << b)) | 1 << a;
            let j = (j & !i) | 1 << b;
            (f, ShiftPair::new(n, SubsetMask(i), SubsetMask(j)).unwrap())
        })
    })
}

fn sub(a: &Family, b: &Family) -> bool {
    a.is_subfamily_of(b).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn closures_idempotent_extensive(f in family(8)) {
        let (up, down) = (f.up_closure(), f.down_closure());
        prop_assert_eq!(up.up_closure(), up.clone());
        prop_assert_eq!(down.down_closure(), down.clone());
        prop_assert!(sub(&f, &up) && sub(&f, &down));
        let t = f.updown_closure();
        prop_assert_eq!(t.updown.clone(), up.union(&down).unwrap());
        prop_assert_eq!(t.updown.len(), f.updown_size());
    }

    #[test]
    fn closures_monotone((f, g) in family_pair(8)) {
        let u = f.union(&g).unwrap();
        prop_assert!(sub(&f.up_closure(), &u.up_closure()));
        prop_assert!(sub(&f.down_closure(), &u.down_closure()));
        prop_assert!(f.updown_size() <= u.updown_size());
    }

    #[test]
    fn complements_swap_closures(f in family(8)) {
        let c = f.complement_family();
        prop_assert_eq!(c.down_closure(), f.up_closure().complement_family());
        prop_assert_eq!(c.up_closure(), f.down_closure().complement_family());
        prop_assert_eq!(c.updown_closure().updown, f.updown_closure().updown.complement_family());
    }

    #[test]
    fn reverse_commutes(f in family(8)) {
        let r = f.reverse_family();
        prop_assert_eq!(r.up_closure(), f.up_closure().reverse_family());
        prop_assert_eq!(r.down_closure(), f.down_closure().reverse_family());
        prop_assert_eq!(r.updown_closure().updown, f.updown_closure().updown.reverse_family());
        prop_assert_eq!(r.complement_family(), f.complement_family().reverse_family());
        prop_assert_eq!(r.reverse_family(), f);
    }

    #[test]
    fn conjugate_is_convex(f in family(8)) {
        prop_assert!(f.conjugate().is_convex());
    }

    #[test]
    fn convex_minus_extreme_set_stays_convex(f in convex(8), pick in any::<prop::sample::Index>()) {
        prop_assert!(f.is_convex());
        let extremes: Vec<SubsetMask> = f.minimal_sets().iter().chain(f.maximal_sets().iter()).collect();
        prop_assume!(!extremes.is_empty());
        let mut g = f.clone();
        g.remove(extremes[pick.index(extremes.len())]);
        prop_assert!(g.is_convex());
    }

    #[test]
    fn shift_preserves_size_and_dualises((f, p) in family_and_pair(8)) {
        let s = shift::shift(&f, &p).unwrap();
        prop_assert_eq!(s.len(), f.len());
        prop_assert_eq!(
            s.complement_family(),
            shift::shift(&f.complement_family(), &p.swapped()).unwrap()
        );
    }

    #[test]
    fn shift_shrinks_closures_under_hypotheses((f, p) in family_and_pair(7), steps in 0usize..6) {
        // Part-way through compression the next pair satisfies the hypotheses
        // by construction; the random pair is checked when it happens to.
        let partial = shift::shift_sequence(&f).take(steps).last().map_or(f.clone(), |s| s.result);
        let next = ordered_pairs(f.ground_size()).into_iter().find(|q| moves(&partial, q));
        let mut cases = vec![(f.clone(), p)];
        cases.extend(next.map(|q| (partial, q)));
        for (g, q) in cases {
            if !proper_subpairs_fix(&g, &q) {
                continue;
            }
            let s = shift::shift(&g, &q).unwrap();
            prop_assert!(sub(&s.down_closure(), &shift::shift(&g.down_closure(), &q).unwrap()));
            prop_assert!(sub(&s.up_closure(), &shift::shift(&g.up_closure(), &q).unwrap()));
            prop_assert!(s.up_closure().len() <= g.up_closure().len());
            prop_assert!(s.down_closure().len() <= g.down_closure().len());
        }
    }

    #[test]
    fn singleton_shifts_shrink_closures(
        (f, i, j) in (2u32..=7).prop_flat_map(|n| (family_over(n), 1..=n, 1..n))
    ) {
        // j ranges over [n] \ {i}.
        let n = f.ground_size();
        let j = if j >= i { j + 1 } else { j };
        let p = ShiftPair::from_elements(n, &[i], &[j]).unwrap();
        prop_assert!(proper_subpairs_fix(&f, &p));
        let s = shift::shift(&f, &p).unwrap();
        prop_assert!(sub(&s.down_closure(), &shift::shift(&f.down_closure(), &p).unwrap()));
        prop_assert!(sub(&s.up_closure(), &shift::shift(&f.up_closure(), &p).unwrap()));
    }

    #[test]
    fn compression_steps_meet_hypotheses_and_lower_potential(f in family(6)) {
        let mut prev = f.clone();
        for step in shift::shift_sequence(&f) {
            prop_assert!(step.pair.is_ordered());
            prop_assert!(proper_subpairs_fix(&prev, &step.pair));
            let before = prev.element_counts_descending();
            let after = step.result.element_counts_descending();
            prop_assert!(after < before, "{:?} -> {:?}", before, after);
            // Counts above max(J) are untouched, the count of max(J) drops.
            let top = step.pair.j().max_element().unwrap();
            let pos = (f.ground_size() - top) as usize;
            prop_assert_eq!(&after[..pos], &before[..pos]);
            prop_assert!(after[pos] < before[pos]);
            prop_assert!(step.result.updown_size() <= prev.up_closure().len() + prev.down_closure().len() - prev.len());
            prev = step.result;
        }
        prop_assert!(shift::is_strongly_shifted(&prev).unwrap());
        prop_assert!(ordered_pairs(f.ground_size()).iter().all(|p| !moves(&prev, p)));
    }

    #[test]
    fn sandwich_formula(p in convex(8)) {
        let n = p.ground_size() + 2;
        let f = sandwich_lift(&p, n).unwrap();
        prop_assert!(f.is_convex());
        prop_assert_eq!(f.len(), p.len());
        prop_assert_eq!(f.updown_size(), 2 * p.updown_size() + p.len());
    }

    #[test]
    fn join_formula(k in 0u32..=5, rest in 0u32..=5, a in any::<u64>(), b in any::<u64>()) {
        let n = k + rest;
        // Up-sets containing [k] and down-sets containing ∅ are exactly the
        // convex families with those members.
        let pick = |ground: u32, bits: u64| {
            Family::from_predicate(ground, |s| bits >> (s.0 % 64) & 1 == 1).unwrap()
        };
        let mut f1 = pick(k, a).up_closure();
        f1.insert(SubsetMask::full(k)).unwrap();
        let mut f2 = pick(rest, b).down_closure();
        f2.insert(SubsetMask::EMPTY).unwrap();
        let f = join_product(&f1, &f2, k, n).unwrap();
        let (s1, s2) = (f1.len(), f2.len());
        prop_assert_eq!(f.len(), s1 * s2);
        prop_assert!(f.is_convex());
        prop_assert_eq!(f.updown_size(), (s1 << rest) + (s2 << k) - s1 * s2);
    }
}

#[test]
fn anchors_are_conjugate() {
    for n in 0..=10 {
        for a in (n % 2..=n).step_by(2) {
            assert_eq!(
                c_family(n, a).unwrap().conjugate(),
                c_star_family(n, a).unwrap(),
                "n={n} a={a}"
            );
        }
    }
}

#[test]
fn conjugates_of_chain_witnesses() {
    for n in 2..=8 {
        let chain = canonical_chain(n).unwrap();
        for l in 0..=(1usize << (n - 2)) {
            let conj = chain.families()[l].conjugate();
            assert!(conj.is_convex(), "n={n} l={l}");
            assert_eq!(conj.len() as u64, star_index(n, l as u64).unwrap());
            assert_eq!(conj.updown_size(), (1usize << n) - l, "n={n} l={l}");
            let m = conj.len() as u64;
            assert_eq!(conj.updown_size() as u64, phi_fast(n, m).unwrap());
        }
    }
}

#[test]
fn odd_singleton_gap() {
    for n in (1..=19u32).step_by(2) {
        assert_eq!(
            phi_fast(n, 1).unwrap(),
            3 * (1 << ((n - 1) / 2)) - 1,
            "n={n}"
        );
    }
}

#[test]
fn quarter_value() {
    for n in 2..=20u32 {
        assert_eq!(phi_fast(n, 1 << (n - 2)).unwrap(), 3 << (n - 2), "n={n}");
    }
}

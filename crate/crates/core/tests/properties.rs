use proptest::prelude::*;

use pgcolor_core::coloring::checkers::{CompletenessChecker, NaivePairwise, OwnerSweep};
use pgcolor_core::coloring::{is_complete, is_proper, Coloring};
use pgcolor_core::geometry::build_space;
use pgcolor_core::gf::{field_of_order, SUPPORTED_ORDERS};

fn coloring_strategy(lines: usize) -> impl Strategy<Value = Vec<u32>> {
    (1u32..=20).prop_flat_map(move |k| proptest::collection::vec(1..=k, lines))
}

/// Renumbers colors so that they are exactly 1..=k.
fn compact(raw: Vec<u32>) -> Coloring {
    let mut seen: Vec<u32> = raw.clone();
    seen.sort_unstable();
    seen.dedup();
    Coloring::from_assignment(raw.iter().map(|c| seen.binary_search(c).unwrap() as u32 + 1).collect()).unwrap()
}

proptest! {
    #[test]
    fn relabeling_keeps_verdicts(raw in coloring_strategy(35), seed in any::<u64>()) {
        let s = build_space(3, 2).unwrap();
        let col = compact(raw);
        let k = col.k() as u32;
        let mut perm: Vec<u32> = (1..=k).collect();
        // a rotation by a seed-dependent offset is a permutation of 1..=k
        perm.rotate_left((seed % k as u64) as usize);
        let other = col.relabel(&perm);
        prop_assert_eq!(is_complete(&s, &col).is_complete(), is_complete(&s, &other).is_complete());
        prop_assert_eq!(is_complete(&s, &col).missing_total, is_complete(&s, &other).missing_total);
        prop_assert_eq!(is_proper(&s, &col).is_proper(), is_proper(&s, &other).is_proper());
        prop_assert_eq!(is_proper(&s, &col).total, is_proper(&s, &other).total);
    }

    #[test]
    fn checkers_agree(raw in coloring_strategy(35)) {
        let s = build_space(3, 2).unwrap();
        let col = compact(raw);
        prop_assert_eq!(OwnerSweep.check(&s, &col), NaivePairwise.check(&s, &col));
    }

    #[test]
    fn witnesses_are_real(raw in coloring_strategy(35)) {
        let s = build_space(3, 2).unwrap();
        let col = compact(raw);
        let rep = is_complete(&s, &col);
        for a in 1..=col.k() as u32 {
            for b in a + 1..=col.k() as u32 {
                if let Some(p) = rep.witness(a, b) {
                    let cs: Vec<u32> = s.point_lines(p).iter().map(|&l| col.color(l)).collect();
                    prop_assert!(cs.contains(&a) && cs.contains(&b));
                }
            }
        }
    }

    #[test]
    fn span_is_commutative_and_idempotent(a in 0usize..40, b in 0usize..40, c in 0usize..40) {
        let s = build_space(3, 3).unwrap();
        let (pa, pb, pc) = (s.point_subspace(a), s.point_subspace(b), s.point_subspace(c));
        let ab = s.span(&pa, &pb);
        prop_assert_eq!(&ab, &s.span(&pb, &pa));
        prop_assert_eq!(&ab, &s.span(&ab, &ab));
        prop_assert_eq!(s.span(&ab, &pc), s.span(&pa, &s.span(&pb, &pc)));
        prop_assert!(ab.contains(&pa) && ab.contains(&pb));
    }

    #[test]
    fn field_axioms(idx in 0usize..SUPPORTED_ORDERS.len(), a in 0u8..25, b in 0u8..25, c in 0u8..25) {
        let q = SUPPORTED_ORDERS[idx];
        let f = field_of_order(q).unwrap();
        let (a, b, c) = (a % q as u8, b % q as u8, c % q as u8);
        prop_assert_eq!(f.add(a, b), f.add(b, a));
        prop_assert_eq!(f.mul(a, b), f.mul(b, a));
        prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
        prop_assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
        prop_assert_eq!(f.add(a, f.neg(a)), 0);
        if a != 0 {
            prop_assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
        }
        prop_assert_eq!(f.pow(a, q as u32), a);
    }
}

use pgcolor_core::coloring::checkers::{CheckerRegistry, NaivePairwise};
use pgcolor_core::coloring::{
    completeness_via_bigline_owners, is_complete, is_proper, max_colors_lower_certificate, Coloring, ColoringError,
    IndexKind,
};
use pgcolor_core::construct::{alpha_lower_value, theorem1_claims, theorem1_coloring};
use pgcolor_core::coloring::checkers::CompletenessChecker;
use pgcolor_core::geometry::build_space;
use pgcolor_core::packings::{build_packing_structure5, DEFAULT_BUDGET};

/// Completeness from first principles: colors a, b are fine when some point has a line
/// of each.
fn brute_complete(space: &pgcolor_core::geometry::SpaceModel, col: &Coloring) -> bool {
    let k = col.k();
    let mut covered = vec![vec![false; k + 1]; k + 1];
    for p in 0..space.num_points() {
        let cs: Vec<u32> = space.point_lines(p).iter().map(|&l| col.color(l)).collect();
        for &a in &cs {
            for &b in &cs {
                covered[a as usize][b as usize] = true;
            }
        }
    }
    (1..=k).all(|a| (1..=k).all(|b| a == b || covered[a][b]))
}

#[test]
fn theorem1_colorings() {
    for q in [2usize, 3] {
        let s = build_space(5, q).unwrap();
        let st = build_packing_structure5(&s, DEFAULT_BUDGET).unwrap();
        let col = theorem1_coloring(&s, &st).unwrap();
        let n_carriers = q.pow(4) + q * q + 1;
        let k = (q * q + q) * n_carriers + 1;
        assert_eq!(col.k(), k);
        assert_eq!(col.k() as u128, alpha_lower_value(5, q as u128).unwrap());
        let mut expected = vec![q * q + 1; k - 1];
        expected.push(q.pow(4) + q * q + 1);
        assert_eq!(col.class_sizes(), expected);
        assert!(is_proper(&s, &col).is_proper());
        let rep = is_complete(&s, &col);
        assert!(rep.is_complete());
        if q == 2 {
            assert!(brute_complete(&s, &col));
        }
        let lb = max_colors_lower_certificate(&s, &col).unwrap();
        assert_eq!((lb.k, lb.index), (k, IndexKind::Achromatic));

        let owner = completeness_via_bigline_owners(&s, &col, &st.base_spread, &st.quotient, &theorem1_claims(&s, &st)).unwrap();
        assert!(owner.implies_complete());
        assert_eq!(owner.implies_complete(), rep.is_complete());
        assert_eq!(owner.covered_pairs, k * (k - 1) / 2);
    }
}

#[test]
fn owner_route_rejects_false_claims() {
    let s = build_space(5, 2).unwrap();
    let st = build_packing_structure5(&s, DEFAULT_BUDGET).unwrap();
    let col = theorem1_coloring(&s, &st).unwrap();
    let mut claims = theorem1_claims(&s, &st);
    // a color of carrier 1 is not owned on all of carrier 0
    let foreign = claims[1][0];
    claims[0].push(foreign);
    let err = completeness_via_bigline_owners(&s, &col, &st.base_spread, &st.quotient, &claims).unwrap_err();
    assert!(matches!(err, ColoringError::OwnerClaimFalse { big_line: 0, .. }));
}

#[test]
fn disjoint_claims_meet_on_the_shared_member() {
    let s = build_space(5, 2).unwrap();
    let st = build_packing_structure5(&s, DEFAULT_BUDGET).unwrap();
    let col = theorem1_coloring(&s, &st).unwrap();
    let mut claims = theorem1_claims(&s, &st);
    // drop the shared base color so the sets of big lines 0 and 1 are disjoint
    for c in claims.iter_mut() {
        c.pop();
    }
    let keep: Vec<Vec<u32>> =
        claims.iter().enumerate().map(|(j, c)| if j < 2 { c.clone() } else { Vec::new() }).collect();
    let r = completeness_via_bigline_owners(&s, &col, &st.base_spread, &st.quotient, &keep).unwrap();
    assert!(r.all_covered());
    assert_eq!(r.via_common_point, 36);
    assert!(!r.implies_complete());
}

#[test]
fn checkers_agree_on_theorem1_pg52() {
    let s = build_space(5, 2).unwrap();
    let st = build_packing_structure5(&s, DEFAULT_BUDGET).unwrap();
    let col = theorem1_coloring(&s, &st).unwrap();
    let reg = CheckerRegistry::with_defaults();
    let sweep = reg.get("owner-sweep").unwrap().check(&s, &col);
    assert_eq!(sweep, NaivePairwise.check(&s, &col));
    assert_eq!(sweep.covered_pairs(), 127 * 126 / 2);
}

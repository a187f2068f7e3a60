use pgcolor_core::coloring::{is_complete, is_proper, Coloring};
use pgcolor_core::geometry::build_space;
use pgcolor_core::pg32::exclude19::{search_complete, singleton_cases, stabilizer, SearchResult};
use pgcolor_core::pg32::{
    all_null_polarities, check_witness_tables, conjugate_coloring, counting_bound_19, explicit_18_coloring,
    pencil_lemma_check, preserves_intersection, Frame32,
};

#[test]
fn pencil_lemma_counts() {
    let s = build_space(3, 2).unwrap();
    let r = pencil_lemma_check(&s);
    assert!(r.holds());
    // C(35,5)
    assert_eq!(r.subsets, 324_632);
    // five pairwise meeting lines lie in a plane or pass through a point, never both:
    // 15 planes and 15 points, each with C(7,5) = 21 choices
    assert_eq!(r.pairwise_meeting, 630);
}

#[test]
fn the_eighteen_coloring() {
    let s = build_space(3, 2).unwrap();
    let f = Frame32::new(&s).unwrap();
    let col = explicit_18_coloring(&s, &f).unwrap();
    assert_eq!(col.k(), 18);
    assert!(is_complete(&s, &col).is_complete());
    let proper = is_proper(&s, &col);
    assert!(!proper.is_proper());
    assert!(check_witness_tables(&s, &f).unwrap().is_empty());
    let d = f.point("D").unwrap();
    // every line through D lies in C5 or C6
    for &l in s.point_lines(d) {
        assert!(col.color(l) == 5 || col.color(l) == 6);
    }
}

#[test]
fn polarity_suite() {
    let s = build_space(3, 2).unwrap();
    let f = Frame32::new(&s).unwrap();
    let col = explicit_18_coloring(&s, &f).unwrap();
    let pols = all_null_polarities(&s);
    // nondegenerate alternating forms on GF(2)^4: |GL(4,2)| / |Sp(4,2)| = 20160 / 720
    assert_eq!(pols.len(), 28);
    for p in &pols {
        assert_eq!(preserves_intersection(&s, p), Ok(595));
        let c = conjugate_coloring(&col, p);
        assert!(is_complete(&s, &c).is_complete());
        assert_eq!(c.class_sizes(), col.class_sizes());
    }
    let discrete = Coloring::discrete(&s);
    assert!(!is_complete(&s, &conjugate_coloring(&discrete, &pols[0])).is_complete());
}

#[test]
fn counting_bound() {
    let s = build_space(3, 2).unwrap();
    let b = counting_bound_19(&s);
    assert_eq!((b.meeting, b.pairs, b.bound), (3 * (7 - 1), 35 / 2, 19));
}

#[test]
fn eighteen_is_reachable_by_search() {
    let s = build_space(3, 2).unwrap();
    let cases = singleton_cases(&s).unwrap();
    let (_, tri) = &cases[0];
    let sym = stabilizer(&s, tri).unwrap();
    let (res, _) = search_complete(&s, 18, tri, &sym, 50_000_000);
    let SearchResult::Found(rest) = res else { panic!("{res:?}") };
    let mut classes = tri.clone();
    classes.extend(rest);
    let col = Coloring::from_classes(&s, &classes).unwrap();
    assert!(is_complete(&s, &col).is_complete());

    // three pencil lines as singletons leave too few lines: 4 singletons through the
    // carrier, 4 pairs, and 7 classes of three lines need 33 > 32 lines
    let (_, pencil) = &cases[1];
    let (res, _) = search_complete(&s, 18, pencil, &[], 50_000_000);
    assert_eq!(res, SearchResult::Exhausted);
}

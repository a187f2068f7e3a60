//! Incidence structure of PG(n,p) checked against a brute-force enumeration that uses
//! plain modular arithmetic and no library code.

use std::collections::{BTreeSet, HashMap};

use pgcolor_core::geometry::{build_space, gaussian_coeff, SpaceModel};

type Vector = Vec<u8>;

fn normalize(v: &[u8], p: u8) -> Option<Vector> {
    let lead = *v.iter().find(|&&x| x != 0)?;
    let inv = (1..p).find(|&i| (i as u32 * lead as u32) % p as u32 == 1).unwrap();
    Some(v.iter().map(|&x| ((x as u32 * inv as u32) % p as u32) as u8).collect())
}

fn oracle(n: usize, p: u8) -> (Vec<Vector>, BTreeSet<BTreeSet<Vector>>) {
    let w = n + 1;
    let mut points = BTreeSet::new();
    for code in 1..(p as usize).pow(w as u32) {
        let mut c = code;
        let v: Vector = (0..w)
            .map(|_| {
                let d = (c % p as usize) as u8;
                c /= p as usize;
                d
            })
            .collect();
        points.insert(normalize(&v, p).unwrap());
    }
    let points: Vec<Vector> = points.into_iter().collect();
    let mut lines = BTreeSet::new();
    for (i, x) in points.iter().enumerate() {
        for y in &points[i + 1..] {
            let mut line = BTreeSet::new();
            for a in 0..p {
                for b in 0..p {
                    let v: Vector = x.iter().zip(y).map(|(&s, &t)| ((a as u32 * s as u32 + b as u32 * t as u32) % p as u32) as u8).collect();
                    if let Some(nv) = normalize(&v, p) {
                        line.insert(nv);
                    }
                }
            }
            lines.insert(line);
        }
    }
    (points, lines)
}

fn library_lines(s: &SpaceModel) -> BTreeSet<BTreeSet<Vector>> {
    (0..s.num_lines()).map(|l| s.line_points(l).iter().map(|&p| s.point_coords(p).to_vec()).collect()).collect()
}

#[test]
fn counts_and_lines_match_enumeration() {
    for (n, p) in [(2usize, 2u8), (3, 2), (3, 3), (4, 2), (5, 2)] {
        let s = build_space(n, p as usize).unwrap();
        let (points, lines) = oracle(n, p);
        assert_eq!(s.num_points(), points.len(), "PG({n},{p}) points");
        assert_eq!(s.num_lines(), lines.len(), "PG({n},{p}) lines");
        assert_eq!(library_lines(&s), lines, "PG({n},{p}) line sets");
    }
    let s = build_space(5, 2).unwrap();
    assert_eq!((s.num_points(), s.num_lines(), s.lines_per_point()), (63, 651, 31));
}

#[test]
fn q_nomials_match_enumeration() {
    // lines of PG(n,q) are 2-dimensional subspaces of GF(q)^{n+1}
    for (n, p) in [(3usize, 2u8), (3, 3), (5, 2)] {
        let (_, lines) = oracle(n, p);
        assert_eq!(gaussian_coeff(n as u32 + 1, 2, p as u128).unwrap(), lines.len() as u128);
    }
}

#[test]
fn lines_meeting_pg52() {
    let s = build_space(5, 2).unwrap();
    let (_, lines) = oracle(5, 2);
    let lines: Vec<BTreeSet<Vector>> = lines.into_iter().collect();
    let ids: HashMap<BTreeSet<Vector>, usize> = library_lines(&s).into_iter().zip(0..).collect();
    let mut map = vec![0; s.num_lines()];
    for l in 0..s.num_lines() {
        let set: BTreeSet<Vector> = s.line_points(l).iter().map(|&p| s.point_coords(p).to_vec()).collect();
        map[l] = ids[&set];
    }
    for l in [0, 17, 650] {
        let brute = lines.iter().enumerate().filter(|(j, m)| *j != map[l] && !m.is_disjoint(&lines[map[l]])).count();
        assert_eq!(brute, 3 * (31 - 1));
        assert_eq!(s.lines_meeting(l).len(), 90);
    }
}

#[test]
fn two_points_one_line() {
    let s = build_space(3, 3).unwrap();
    for a in 0..s.num_points() {
        for b in 0..s.num_points() {
            if a == b {
                continue;
            }
            let common: Vec<usize> = s.point_lines(a).iter().filter(|l| s.point_lines(b).contains(l)).copied().collect();
            assert_eq!(common, vec![s.line_through(a, b).unwrap()]);
        }
    }
}

#[test]
fn each_line_of_pg32_lies_in_three_planes() {
    let s = build_space(3, 2).unwrap();
    let mut planes = BTreeSet::new();
    for a in 0..15 {
        for b in 0..15 {
            for c in 0..15 {
                let sp = s.span_points(&[a, b, c]);
                if sp.dim == 2 {
                    planes.insert(sp.point_ids.clone());
                }
            }
        }
    }
    assert_eq!(planes.len(), 15);
    for l in 0..s.num_lines() {
        let n = planes.iter().filter(|pl| s.line_points(l).iter().all(|p| pl.contains(p))).count();
        assert_eq!(n, 3);
    }
}

//! The smallest three-dimensional case, PG(3,2).
//!
//! A named frame of fifteen points, an explicit complete coloring with 18 classes,
//! the pencil lemma, null polarities and the counting bound of 19. The search that
//! rules out 19 classes lives in [`exclude19`].

pub mod exclude19;

use thiserror::Error;

use crate::coloring::{Color, Coloring, ColoringError};
use crate::geometry::{linalg, LineId, PointId, SpaceModel};
use crate::gf::Elem;

pub use exclude19::{exclude_19, search_complete, ExcludeOutcome, SearchResult, Verdict};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Pg32Error {
    #[error("expected PG(3,2), got PG({n},{q})")]
    FrameMismatch { n: usize, q: usize },
    #[error("unknown frame point {0:?}")]
    UnknownPoint(String),
    #[error("points {0} and {1} are equal")]
    DegenerateLine(&'static str, &'static str),
    #[error("matrix is not alternating")]
    NotAlternating,
    #[error("matrix is singular")]
    Singular,
    #[error(transparent)]
    Coloring(#[from] ColoringError),
}

/// Names and coordinates of the frame points. The first seven span the plane `x0 = 0`.
pub const FRAME_POINTS: [(&str, [Elem; 4]); 15] = [
    ("A", [0, 1, 0, 0]),
    ("B", [0, 0, 1, 0]),
    ("C", [0, 0, 0, 1]),
    ("A'", [0, 0, 1, 1]),
    ("B'", [0, 1, 0, 1]),
    ("C'", [0, 1, 1, 0]),
    ("D", [0, 1, 1, 1]),
    ("O", [1, 0, 0, 0]),
    ("E", [1, 1, 1, 1]),
    ("X", [1, 1, 0, 0]),
    ("Y", [1, 0, 1, 0]),
    ("Z", [1, 0, 0, 1]),
    ("K", [1, 1, 1, 0]),
    ("L", [1, 1, 0, 1]),
    ("M", [1, 0, 1, 1]),
];

/// The fifteen named points bound to the ids of a concrete PG(3,2) model.
#[derive(Debug, Clone)]
pub struct Frame32 {
    ids: [PointId; 15],
}

impl Frame32 {
    pub fn new(space: &SpaceModel) -> Result<Self, Pg32Error> {
        if space.dim() != 3 || space.q() != 2 {
            return Err(Pg32Error::FrameMismatch { n: space.dim(), q: space.q() });
        }
        let mut ids = [0; 15];
        for (slot, (_, coords)) in ids.iter_mut().zip(FRAME_POINTS.iter()) {
            *slot = space.point_id(coords).expect("nonzero vector");
        }
        Ok(Frame32 { ids })
    }

    pub fn point(&self, name: &str) -> Result<PointId, Pg32Error> {
        FRAME_POINTS
            .iter()
            .position(|(n, _)| *n == name)
            .map(|i| self.ids[i])
            .ok_or_else(|| Pg32Error::UnknownPoint(name.to_string()))
    }

    pub fn name(&self, p: PointId) -> Option<&'static str> {
        self.ids.iter().position(|&id| id == p).map(|i| FRAME_POINTS[i].0)
    }

    pub fn line(&self, space: &SpaceModel, a: &'static str, b: &'static str) -> Result<LineId, Pg32Error> {
        let (pa, pb) = (self.point(a)?, self.point(b)?);
        space.line_through(pa, pb).ok_or(Pg32Error::DegenerateLine(a, b))
    }

    /// Lines of the plane spanned by `A`, `B`, `C`.
    pub fn plane_at_infinity(&self, space: &SpaceModel) -> Vec<LineId> {
        let pts: Vec<PointId> = self.ids[..3].to_vec();
        space.lines_in_subspace(&space.span_points(&pts))
    }
}

/// The eighteen classes, each line named by two of its points. Class names follow the
/// tables below; `CB1` pairs `OY` with `MK`, the line through `B'`.
pub const EIGHTEEN_CLASSES: [(&str, &[(&str, &str)]); 18] = [
    ("C1", &[("A", "B")]),
    ("C2", &[("B", "C")]),
    ("C3", &[("C", "A")]),
    ("C4", &[("A'", "B'")]),
    ("C5", &[("A", "A'"), ("O", "E")]),
    ("C6", &[("B", "B'"), ("C", "C'"), ("X", "M"), ("Y", "L"), ("Z", "K")]),
    ("CA1", &[("O", "X"), ("E", "X")]),
    ("CA2", &[("O", "M"), ("E", "M")]),
    ("CA3", &[("Y", "K"), ("Y", "Z")]),
    ("CA4", &[("L", "Z"), ("L", "K")]),
    ("CB1", &[("O", "Y"), ("M", "K")]),
    ("CB2", &[("X", "K"), ("E", "Y")]),
    ("CB3", &[("Z", "M"), ("O", "L")]),
    ("CB4", &[("E", "L"), ("X", "Z")]),
    ("CC1", &[("O", "Z"), ("X", "Y")]),
    ("CC2", &[("X", "L"), ("O", "K")]),
    ("CC3", &[("Y", "M"), ("E", "Z")]),
    ("CC4", &[("K", "E"), ("L", "M")]),
];

/// A witness table: rows and columns name classes, entries name a common point.
pub struct WitnessTable {
    pub rows: [&'static str; 4],
    pub cols: [&'static str; 4],
    pub points: [[&'static str; 4]; 4],
}

pub const WITNESS_TABLES: [WitnessTable; 3] = [
    WitnessTable {
        rows: ["CA1", "CA2", "CA3", "CA4"],
        cols: ["CB1", "CB2", "CB3", "CB4"],
        points: [["O", "X", "O", "X"], ["M", "E", "M", "E"], ["Y", "Y", "Z", "Z"], ["K", "K", "L", "L"]],
    },
    WitnessTable {
        rows: ["CA1", "CA2", "CA3", "CA4"],
        cols: ["CC1", "CC2", "CC3", "CC4"],
        points: [["O", "O", "E", "E"], ["O", "O", "M", "M"], ["Y", "K", "Y", "K"], ["Z", "L", "Z", "L"]],
    },
    WitnessTable {
        rows: ["CB1", "CB2", "CB3", "CB4"],
        cols: ["CC1", "CC2", "CC3", "CC4"],
        points: [["O", "O", "M", "M"], ["X", "X", "E", "E"], ["O", "O", "M", "M"], ["X", "X", "E", "E"]],
    },
];

/// Deviations from the printed class list and tables applied by this module.
pub const NORMALIZATION_NOTES: [&str; 2] = [
    "class CB1 uses line MK (through B') where the printed list reads MX",
    "witness tables: entry 'l' read as point L (row CA4, columns CB4 and CC4)",
];

pub fn explicit_18_classes(space: &SpaceModel, frame: &Frame32) -> Result<Vec<Vec<LineId>>, Pg32Error> {
    EIGHTEEN_CLASSES
        .iter()
        .map(|(_, lines)| lines.iter().map(|&(a, b)| frame.line(space, a, b)).collect())
        .collect()
}

/// The complete 18-class coloring; class `i` of [`EIGHTEEN_CLASSES`] gets color `i + 1`.
pub fn explicit_18_coloring(space: &SpaceModel, frame: &Frame32) -> Result<Coloring, Pg32Error> {
    let classes = explicit_18_classes(space, frame)?;
    Ok(Coloring::from_classes(space, &classes)?)
}

/// A table entry whose point is not on a line of both classes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableMismatch {
    pub row: &'static str,
    pub col: &'static str,
    pub point: &'static str,
}

/// Checks every entry of the witness tables against the 18-class coloring.
pub fn check_witness_tables(space: &SpaceModel, frame: &Frame32) -> Result<Vec<TableMismatch>, Pg32Error> {
    let classes = explicit_18_classes(space, frame)?;
    let class = |name: &str| {
        let i = EIGHTEEN_CLASSES.iter().position(|(n, _)| *n == name).expect("table names a class");
        &classes[i]
    };
    let mut out = Vec::new();
    for t in &WITNESS_TABLES {
        for (i, row) in t.rows.iter().enumerate() {
            for (j, col) in t.cols.iter().enumerate() {
                let p = frame.point(t.points[i][j])?;
                let on = |c: &Vec<LineId>| c.iter().any(|&l| space.line_points(l).contains(&p));
                if !(on(class(row)) && on(class(col))) {
                    out.push(TableMismatch { row, col, point: t.points[i][j] });
                }
            }
        }
    }
    Ok(out)
}

/// Three distinct lines through one point inside one plane.
pub fn is_pencil(space: &SpaceModel, a: LineId, b: LineId, c: LineId) -> bool {
    if a == b || b == c || a == c {
        return false;
    }
    let common = match space.intersection_point(a, b) {
        Some(p) => p,
        None => return false,
    };
    if !space.line_points(c).contains(&common) {
        return false;
    }
    let mut pts: Vec<PointId> = space.line_points(a).to_vec();
    pts.extend_from_slice(space.line_points(b));
    pts.extend_from_slice(space.line_points(c));
    space.span_points(&pts).dim == 2
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PencilReport {
    pub subsets: u64,
    pub pairwise_meeting: u64,
    pub counterexamples: Vec<[LineId; 5]>,
}

impl PencilReport {
    pub fn holds(&self) -> bool {
        self.counterexamples.is_empty()
    }
}

/// Whether some three of the given lines form a pencil.
pub fn contains_pencil(space: &SpaceModel, lines: &[LineId]) -> bool {
    let n = lines.len();
    (0..n).any(|i| (i + 1..n).any(|j| (j + 1..n).any(|k| is_pencil(space, lines[i], lines[j], lines[k]))))
}

/// Runs over all 5-subsets of lines, keeps those whose lines pairwise meet, and looks
/// for a pencil in each.
pub fn pencil_lemma_check(space: &SpaceModel) -> PencilReport {
    let n = space.num_lines();
    let meet: Vec<Vec<bool>> = (0..n).map(|a| (0..n).map(|b| a != b && space.lines_meet(a, b)).collect()).collect();
    let mut report = PencilReport { subsets: 0, pairwise_meeting: 0, counterexamples: Vec::new() };
    let mut pick = [0usize; 5];
    fn rec(
        space: &SpaceModel,
        meet: &[Vec<bool>],
        pick: &mut [usize; 5],
        depth: usize,
        start: usize,
        all_meet: bool,
        report: &mut PencilReport,
    ) {
        let n = meet.len();
        if depth == 5 {
            report.subsets += 1;
            if all_meet {
                report.pairwise_meeting += 1;
                if !contains_pencil(space, pick) {
                    report.counterexamples.push(*pick);
                }
            }
            return;
        }
        for l in start..n {
            pick[depth] = l;
            let ok = all_meet && pick[..depth].iter().all(|&m| meet[m][l]);
            rec(space, meet, pick, depth + 1, l + 1, ok, report);
        }
    }
    rec(space, &meet, &mut pick, 0, 0, true, &mut report);
    report
}

/// A null polarity of PG(3,q) and the line permutation it induces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NullPolarity {
    matrix: [[Elem; 4]; 4],
    line_map: Vec<LineId>,
}

impl NullPolarity {
    pub fn matrix(&self) -> &[[Elem; 4]; 4] {
        &self.matrix
    }

    pub fn line_map(&self) -> &[LineId] {
        &self.line_map
    }

    pub fn image(&self, l: LineId) -> LineId {
        self.line_map[l]
    }

    /// The image of a point: the plane `{y : x A y^T = 0}`, as its sorted point ids.
    pub fn point_image(&self, space: &SpaceModel, p: PointId) -> Vec<PointId> {
        let f = space.field();
        let rows: Vec<Vec<Elem>> = self.matrix.iter().map(|r| r.to_vec()).collect();
        let u = linalg::vec_mat(f, space.point_coords(p), &rows);
        (0..space.num_points()).filter(|&y| linalg::dot(f, &u, space.point_coords(y)) == 0).collect()
    }
}

/// Builds the null polarity of an alternating nonsingular 4x4 matrix. The image of the
/// line through `x1`, `x2` is the line where the planes `x1 A` and `x2 A` meet.
pub fn null_polarity(space: &SpaceModel, matrix: [[Elem; 4]; 4]) -> Result<NullPolarity, Pg32Error> {
    if space.dim() != 3 {
        return Err(Pg32Error::FrameMismatch { n: space.dim(), q: space.q() });
    }
    let f = space.field();
    for i in 0..4 {
        if matrix[i][i] != 0 || (0..4).any(|j| matrix[i][j] != f.neg(matrix[j][i])) {
            return Err(Pg32Error::NotAlternating);
        }
    }
    let rows: Vec<Vec<Elem>> = matrix.iter().map(|r| r.to_vec()).collect();
    if linalg::rank(f, &rows) < 4 {
        return Err(Pg32Error::Singular);
    }
    let mut line_map = Vec::with_capacity(space.num_lines());
    for l in 0..space.num_lines() {
        let u: Vec<Vec<Elem>> = space.line_basis(l).iter().map(|x| linalg::vec_mat(f, x, &rows)).collect();
        let pts: Vec<PointId> = (0..space.num_points())
            .filter(|&y| u.iter().all(|ui| linalg::dot(f, ui, space.point_coords(y)) == 0))
            .collect();
        line_map.push(space.line_through(pts[0], pts[1]).expect("two planes meet in a line"));
    }
    Ok(NullPolarity { matrix, line_map })
}

/// Every nonsingular alternating 4x4 matrix over the field of the space, as polarities.
pub fn all_null_polarities(space: &SpaceModel) -> Vec<NullPolarity> {
    let f = space.field();
    let q = space.q();
    let slots = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
    let mut out = Vec::new();
    for code in 0..q.pow(6) {
        let mut m = [[0 as Elem; 4]; 4];
        let mut c = code;
        for &(i, j) in &slots {
            m[i][j] = (c % q) as Elem;
            m[j][i] = f.neg(m[i][j]);
            c /= q;
        }
        if let Ok(p) = null_polarity(space, m) {
            out.push(p);
        }
    }
    out
}

/// Whether the line map is a bijection sending meeting pairs to meeting pairs and skew
/// pairs to skew pairs. Returns the number of line pairs checked.
pub fn preserves_intersection(space: &SpaceModel, pol: &NullPolarity) -> Result<usize, (LineId, LineId)> {
    let n = space.num_lines();
    let mut seen = vec![false; n];
    for &m in &pol.line_map {
        if std::mem::replace(&mut seen[m], true) {
            return Err((m, m));
        }
    }
    let mut checked = 0;
    for a in 0..n {
        for b in a + 1..n {
            if space.lines_meet(a, b) != space.lines_meet(pol.line_map[a], pol.line_map[b]) {
                return Err((a, b));
            }
            checked += 1;
        }
    }
    Ok(checked)
}

/// The coloring that gives `pol(l)` the color of `l`.
pub fn conjugate_coloring(col: &Coloring, pol: &NullPolarity) -> Coloring {
    let mut assignment: Vec<Color> = vec![0; col.assignment().len()];
    for (l, &c) in col.assignment().iter().enumerate() {
        assignment[pol.line_map[l]] = c;
    }
    Coloring::from_assignment(assignment).expect("a permutation keeps every color")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CountingBound {
    /// Lines meeting a fixed line: the most classes a singleton class can meet.
    pub meeting: usize,
    /// Classes of size at least two that fit among the lines.
    pub pairs: usize,
    pub bound: usize,
}

/// Upper bound on the number of classes of a complete coloring. With a singleton class
/// every other class meets its line; without one every class has two lines.
pub fn counting_bound_19(space: &SpaceModel) -> CountingBound {
    let meeting = (0..space.num_lines()).map(|l| space.lines_meeting(l).len()).max().unwrap_or(0);
    let pairs = space.num_lines() / 2;
    CountingBound { meeting, pairs, bound: (1 + meeting).max(pairs) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coloring::{is_complete, is_proper};
    use crate::geometry::build_space;

    fn setup() -> (SpaceModel, Frame32) {
        let s = build_space(3, 2).unwrap();
        let f = Frame32::new(&s).unwrap();
        (s, f)
    }

    #[test]
    fn frame_incidences() {
        let (s, f) = setup();
        for [a, b, c] in [
            ["A", "B", "C'"],
            ["B", "C", "A'"],
            ["A", "C", "B'"],
            ["A", "A'", "D"],
            ["B", "B'", "D"],
            ["C", "C'", "D"],
            ["D", "O", "E"],
        ] {
            let l = f.line(&s, a, b).unwrap();
            assert!(s.line_points(l).contains(&f.point(c).unwrap()), "{a}{b}{c}");
        }
        assert_eq!(f.plane_at_infinity(&s).len(), 7);
        assert!(matches!(Frame32::new(&build_space(2, 2).unwrap()), Err(Pg32Error::FrameMismatch { .. })));
    }

    #[test]
    fn eighteen_coloring() {
        let (s, f) = setup();
        let col = explicit_18_coloring(&s, &f).unwrap();
        assert_eq!(col.k(), 18);
        let mut expected = vec![1, 1, 1, 1, 2, 5];
        expected.extend([2; 12]);
        expected.sort_unstable();
        assert_eq!(col.class_sizes(), expected);
        assert!(is_complete(&s, &col).is_complete());
        assert!(!is_proper(&s, &col).is_proper());
        assert!(check_witness_tables(&s, &f).unwrap().is_empty());
    }

    #[test]
    fn printed_mx_breaks_the_partition() {
        let (s, f) = setup();
        // MX passes through D and already belongs to C6
        let mx = f.line(&s, "M", "X").unwrap();
        assert!(s.line_points(mx).contains(&f.point("D").unwrap()));
    }

    #[test]
    fn pencils() {
        let (s, f) = setup();
        let plane = f.plane_at_infinity(&s);
        assert!(contains_pencil(&s, &plane[..5]));
        let ab = f.line(&s, "A", "B").unwrap();
        let bc = f.line(&s, "B", "C").unwrap();
        let ca = f.line(&s, "C", "A").unwrap();
        assert!(!is_pencil(&s, ab, bc, ca));
        let ox = f.line(&s, "O", "X").unwrap();
        let ab2 = f.line(&s, "A", "B").unwrap();
        let ac = f.line(&s, "A", "C").unwrap();
        assert!(!is_pencil(&s, ox, ab2, ac));
    }

    #[test]
    fn polarities() {
        let s = build_space(3, 2).unwrap();
        let all = all_null_polarities(&s);
        assert_eq!(all.len(), 28);
        let sym = [[0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]];
        let p = null_polarity(&s, sym).unwrap();
        assert_eq!(preserves_intersection(&s, &p), Ok(595));
        let diag = [[1, 1, 0, 0], [1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]];
        assert_eq!(null_polarity(&s, diag), Err(Pg32Error::NotAlternating));
        let sing = [[0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0]];
        assert_eq!(null_polarity(&s, sing), Err(Pg32Error::Singular));
    }

    #[test]
    fn star_maps_to_triangle() {
        let (s, f) = setup();
        let p = null_polarity(&s, [[0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]]).unwrap();
        let star = [f.line(&s, "O", "X").unwrap(), f.line(&s, "O", "Y").unwrap(), f.line(&s, "O", "Z").unwrap()];
        let img: Vec<LineId> = star.iter().map(|&l| p.image(l)).collect();
        let plane = p.point_image(&s, f.point("O").unwrap());
        for &l in &img {
            assert!(s.line_points(l).iter().all(|q| plane.contains(q)));
        }
        assert!(s.lines_meet(img[0], img[1]) && s.lines_meet(img[1], img[2]) && s.lines_meet(img[0], img[2]));
        let c01 = s.intersection_point(img[0], img[1]).unwrap();
        assert!(!s.line_points(img[2]).contains(&c01));
    }

    #[test]
    fn conjugation() {
        let (s, f) = setup();
        let col = explicit_18_coloring(&s, &f).unwrap();
        for p in all_null_polarities(&s) {
            let c = conjugate_coloring(&col, &p);
            assert!(is_complete(&s, &c).is_complete());
            let back = conjugate_coloring(&c, &p);
            assert_eq!(is_complete(&s, &back).is_complete(), is_complete(&s, &col).is_complete());
        }
        let k = Coloring::constant(&s);
        assert_eq!(conjugate_coloring(&k, &all_null_polarities(&s)[0]), k);
    }

    #[test]
    fn counting() {
        let s = build_space(3, 2).unwrap();
        assert_eq!(counting_bound_19(&s), CountingBound { meeting: 18, pairs: 17, bound: 19 });
    }
}

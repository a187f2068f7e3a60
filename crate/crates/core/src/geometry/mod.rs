//! Points, lines and subspaces of PG(n,q) with dense, lexicographically assigned ids.

pub mod chart;
pub mod linalg;

pub use chart::Chart;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::gf::{field_of_order, Elem, FieldError, FieldTable};

pub type PointId = usize;
pub type LineId = usize;

/// Default cap on the number of lines `build_space` will materialize.
pub const DEFAULT_LINE_CAP: u128 = 20_000;

const NONE: u32 = u32::MAX;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeometryError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("PG({n},{q}) has {lines} lines, above the cap of {cap}")]
    SizeLimit { n: usize, q: usize, lines: u128, cap: u128 },
    #[error("q-nomial coefficient overflows 128 bits")]
    Overflow,
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),
}

/// Gaussian binomial coefficient: the number of `k`-dimensional subspaces of `GF(q)^n`.
pub fn gaussian_coeff(n: u32, k: u32, q: u128) -> Result<u128, GeometryError> {
    if k > n {
        return Ok(0);
    }
    let pow = |e: u32| q.checked_pow(e).ok_or(GeometryError::Overflow);
    let mut acc: u128 = 1;
    for i in 1..=k {
        // acc is the q-nomial [n, i-1]; the next partial product is again integral
        let num = pow(n - i + 1)? - 1;
        let den = pow(i)? - 1;
        acc = acc.checked_mul(num).ok_or(GeometryError::Overflow)? / den;
    }
    Ok(acc)
}

/// Number of points of PG(n,q).
pub fn point_count(n: u32, q: u128) -> Result<u128, GeometryError> {
    gaussian_coeff(n + 1, 1, q)
}

/// A projective subspace, keyed by its reduced row-echelon basis.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subspace {
    pub dim: usize,
    pub basis: Vec<Vec<Elem>>,
    pub point_ids: Vec<PointId>,
}

impl Subspace {
    pub fn contains_point(&self, p: PointId) -> bool {
        self.point_ids.binary_search(&p).is_ok()
    }

    pub fn contains(&self, other: &Subspace) -> bool {
        other.point_ids.iter().all(|&p| self.contains_point(p))
    }

    pub fn meets(&self, other: &Subspace) -> bool {
        sorted_intersect(&self.point_ids, &other.point_ids)
    }
}

pub(crate) fn sorted_intersect(a: &[usize], b: &[usize]) -> bool {
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => return true,
        }
    }
    false
}

/// The full point/line incidence structure of PG(n,q).
#[derive(Clone)]
pub struct SpaceModel {
    n: usize,
    field: FieldTable,
    coords: Vec<Elem>,
    code_to_point: Vec<u32>,
    line_points: Vec<Vec<PointId>>,
    line_bases: Vec<Vec<Vec<Elem>>>,
    point_lines: Vec<Vec<LineId>>,
    pair_line: Vec<u32>,
}

impl std::fmt::Debug for SpaceModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "PG({},{}) [{} points, {} lines]", self.n, self.q(), self.num_points(), self.num_lines())
    }
}

pub fn build_space(n: usize, q: usize) -> Result<SpaceModel, GeometryError> {
    build_space_with_cap(n, q, DEFAULT_LINE_CAP)
}

pub fn build_space_with_cap(n: usize, q: usize, cap: u128) -> Result<SpaceModel, GeometryError> {
    let field = field_of_order(q)?;
    build_space_over(n, field, cap)
}

/// Builds PG(n,q) over an already constructed field table.
pub fn build_space_over(n: usize, field: FieldTable, cap: u128) -> Result<SpaceModel, GeometryError> {
    if n == 0 {
        return Err(GeometryError::InvalidDimension("n must be at least 1".into()));
    }
    let q = field.order();
    let lines_expected = gaussian_coeff(n as u32 + 1, 2, q as u128)?;
    if lines_expected > cap {
        return Err(GeometryError::SizeLimit { n, q, lines: lines_expected, cap });
    }
    let width = n + 1;
    let codes = q.pow(width as u32);

    // Codes read the coordinate vector most-significant first, so ascending codes are
    // lexicographic order and the first nonzero digit test picks canonical representatives.
    let mut coords = Vec::new();
    let mut code_to_point = vec![NONE; codes];
    let mut digits = vec![0 as Elem; width];
    let mut next = 0u32;
    for code in 0..codes {
        let mut c = code;
        for slot in digits.iter_mut().rev() {
            *slot = (c % q) as Elem;
            c /= q;
        }
        if digits.iter().find(|&&x| x != 0) == Some(&1) {
            code_to_point[code] = next;
            coords.extend_from_slice(&digits);
            next += 1;
        }
    }
    let v = next as usize;

    let mut space = SpaceModel {
        n,
        field,
        coords,
        code_to_point,
        line_points: Vec::new(),
        line_bases: Vec::new(),
        point_lines: Vec::new(),
        pair_line: Vec::new(),
    };

    let mut lines: Vec<(Vec<Vec<Elem>>, Vec<PointId>)> = Vec::with_capacity(lines_expected as usize);
    let mut covered = vec![false; v * v];
    for a in 0..v {
        for b in a + 1..v {
            if covered[a * v + b] {
                continue;
            }
            let s = space.subspace(&[space.point_coords(a).to_vec(), space.point_coords(b).to_vec()]);
            for &x in &s.point_ids {
                for &y in &s.point_ids {
                    covered[x * v + y] = true;
                }
            }
            lines.push((s.basis, s.point_ids));
        }
    }
    lines.sort();

    let mut pair_line = vec![NONE; v * v];
    let mut point_lines = vec![Vec::new(); v];
    for (id, (_, pts)) in lines.iter().enumerate() {
        for &x in pts {
            point_lines[x].push(id);
            for &y in pts {
                if x != y {
                    pair_line[x * v + y] = id as u32;
                }
            }
        }
    }
    let (line_bases, line_points) = lines.into_iter().unzip();
    space.line_bases = line_bases;
    space.line_points = line_points;
    space.point_lines = point_lines;
    space.pair_line = pair_line;
    Ok(space)
}

impl SpaceModel {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn q(&self) -> usize {
        self.field.order()
    }

    pub fn field(&self) -> &FieldTable {
        &self.field
    }

    pub fn num_points(&self) -> usize {
        self.point_lines.len()
    }

    pub fn num_lines(&self) -> usize {
        self.line_points.len()
    }

    /// Lines through each point.
    pub fn lines_per_point(&self) -> usize {
        self.point_lines.first().map_or(0, Vec::len)
    }

    pub fn point_coords(&self, p: PointId) -> &[Elem] {
        let w = self.n + 1;
        &self.coords[p * w..(p + 1) * w]
    }

    /// Id of the point spanned by a nonzero vector (any representative).
    pub fn point_id(&self, v: &[Elem]) -> Option<PointId> {
        if v.len() != self.n + 1 {
            return None;
        }
        let norm = linalg::normalize(&self.field, v)?;
        let q = self.q();
        let code = norm.iter().fold(0usize, |acc, &x| acc * q + x as usize);
        match self.code_to_point[code] {
            NONE => None,
            id => Some(id as PointId),
        }
    }

    pub fn line_points(&self, l: LineId) -> &[PointId] {
        &self.line_points[l]
    }

    pub fn line_basis(&self, l: LineId) -> &[Vec<Elem>] {
        &self.line_bases[l]
    }

    pub fn point_lines(&self, p: PointId) -> &[LineId] {
        &self.point_lines[p]
    }

    /// The line through two distinct points.
    pub fn line_through(&self, a: PointId, b: PointId) -> Option<LineId> {
        match self.pair_line[a * self.num_points() + b] {
            NONE => None,
            l => Some(l as LineId),
        }
    }

    pub fn line_subspace(&self, l: LineId) -> Subspace {
        Subspace { dim: 1, basis: self.line_bases[l].clone(), point_ids: self.line_points[l].clone() }
    }

    /// Id of a line given as a 1-dimensional subspace.
    pub fn line_id(&self, s: &Subspace) -> Option<LineId> {
        if s.dim != 1 {
            return None;
        }
        self.line_through(s.point_ids[0], s.point_ids[1])
    }

    pub fn point_subspace(&self, p: PointId) -> Subspace {
        Subspace { dim: 0, basis: vec![self.point_coords(p).to_vec()], point_ids: vec![p] }
    }

    /// The subspace spanned by the given (not necessarily independent) vectors.
    pub fn subspace(&self, rows: &[Vec<Elem>]) -> Subspace {
        let basis = linalg::rref(&self.field, rows);
        let k = basis.len();
        assert!(k > 0, "the zero subspace is not a projective subspace");
        let q = self.q();
        let mut point_ids = Vec::with_capacity((q.pow(k as u32) - 1) / (q - 1));
        let mut coef = vec![0 as Elem; k];
        for code in 0..q.pow(k as u32) {
            let mut c = code;
            for slot in coef.iter_mut().rev() {
                *slot = (c % q) as Elem;
                c /= q;
            }
            if coef.iter().find(|&&x| x != 0) != Some(&1) {
                continue;
            }
            let v = linalg::vec_mat(&self.field, &coef, &basis);
            point_ids.push(self.point_id(&v).expect("nonzero combination of independent rows"));
        }
        point_ids.sort_unstable();
        Subspace { dim: k - 1, basis, point_ids }
    }

    pub fn span(&self, a: &Subspace, b: &Subspace) -> Subspace {
        let rows: Vec<Vec<Elem>> = a.basis.iter().chain(&b.basis).cloned().collect();
        self.subspace(&rows)
    }

    pub fn span_points(&self, pts: &[PointId]) -> Subspace {
        let rows: Vec<Vec<Elem>> = pts.iter().map(|&p| self.point_coords(p).to_vec()).collect();
        self.subspace(&rows)
    }

    /// All lines contained in `s`, sorted.
    pub fn lines_in_subspace(&self, s: &Subspace) -> Vec<LineId> {
        let mut out: Vec<LineId> = Vec::new();
        for (i, &a) in s.point_ids.iter().enumerate() {
            for &b in &s.point_ids[i + 1..] {
                out.push(self.line_through(a, b).expect("distinct points"));
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    /// All lines other than `l` sharing a point with it, sorted.
    pub fn lines_meeting(&self, l: LineId) -> Vec<LineId> {
        let mut out: Vec<LineId> = self.line_points[l]
            .iter()
            .flat_map(|&p| self.point_lines[p].iter().copied())
            .filter(|&m| m != l)
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn lines_meet(&self, a: LineId, b: LineId) -> bool {
        sorted_intersect(&self.line_points[a], &self.line_points[b])
    }

    /// Common point of two distinct meeting lines.
    pub fn intersection_point(&self, a: LineId, b: LineId) -> Option<PointId> {
        self.line_points[a].iter().copied().find(|p| self.line_points[b].binary_search(p).is_ok())
    }

    pub fn descriptor(&self) -> SpaceDescriptor {
        let mut hasher = Sha256::new();
        for pts in &self.line_points {
            for &p in pts {
                hasher.update((p as u32).to_le_bytes());
            }
        }
        SpaceDescriptor {
            n: self.n,
            q: self.q(),
            p: self.field.characteristic(),
            e: self.field.degree(),
            irreducible: self.field.modulus().to_vec(),
            modulus_base: self.field.modulus_base(),
            points: self.num_points(),
            lines: self.num_lines(),
            line_table_sha256: hex::encode(hasher.finalize()),
        }
    }
}

/// Identifies a built space in certificate headers. The hash covers the ordered
/// line-to-points table, each point id as a little-endian `u32`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpaceDescriptor {
    pub n: usize,
    pub q: usize,
    pub p: u32,
    pub e: u32,
    pub irreducible: Vec<Elem>,
    pub modulus_base: usize,
    pub points: usize,
    pub lines: usize,
    pub line_table_sha256: String,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_examples() {
        assert_eq!(gaussian_coeff(2, 1, 2).unwrap(), 3);
        assert_eq!(gaussian_coeff(4, 2, 2).unwrap(), 35);
        assert_eq!(gaussian_coeff(3, 1, 2).unwrap(), 7);
        assert_eq!(gaussian_coeff(6, 2, 2).unwrap(), 651);
        assert_eq!(gaussian_coeff(6, 2, 3).unwrap(), 11011);
        assert_eq!(gaussian_coeff(5, 0, 7).unwrap(), 1);
        assert_eq!(gaussian_coeff(3, 5, 2).unwrap(), 0);
        assert_eq!(gaussian_coeff(200, 100, 25), Err(GeometryError::Overflow));
    }

    #[test]
    fn small_spaces() {
        let s = build_space(3, 2).unwrap();
        assert_eq!((s.num_points(), s.num_lines(), s.lines_per_point()), (15, 35, 7));
        let s = build_space(1, 3).unwrap();
        assert_eq!((s.num_points(), s.num_lines()), (4, 1));
        let s = build_space(2, 2).unwrap();
        assert_eq!((s.num_points(), s.num_lines(), s.lines_per_point()), (7, 7, 3));
    }

    #[test]
    fn point_ids_are_lexicographic() {
        let s = build_space(3, 3).unwrap();
        for p in 1..s.num_points() {
            assert!(s.point_coords(p - 1) < s.point_coords(p));
            assert_eq!(s.point_coords(p).iter().find(|&&x| x != 0), Some(&1));
        }
        assert_eq!(s.point_coords(0), &[0, 0, 0, 1]);
        assert_eq!(s.point_id(&[0, 2, 0, 2]), s.point_id(&[0, 1, 0, 1]));
        assert_eq!(s.point_id(&[0, 0, 0, 0]), None);
    }

    #[test]
    fn size_cap() {
        assert!(matches!(build_space(11, 2), Err(GeometryError::SizeLimit { .. })));
        assert!(matches!(build_space(3, 6), Err(GeometryError::Field(_))));
        assert!(build_space_with_cap(3, 2, 10).is_err());
    }

    #[test]
    fn span_examples() {
        let s = build_space(3, 2).unwrap();
        let a = s.point_subspace(0);
        let b = s.point_subspace(5);
        let l = s.span(&a, &b);
        assert_eq!(l.dim, 1);
        assert_eq!(Some(s.line_id(&l).unwrap()), s.line_through(0, 5));
        assert_eq!(s.span(&l, &l), l);
    }

    #[test]
    fn lines_meeting_counts() {
        let s = build_space(3, 2).unwrap();
        for l in 0..s.num_lines() {
            assert_eq!(s.lines_meeting(l).len(), 18);
        }
        let plane = build_space(2, 3).unwrap();
        assert_eq!(plane.lines_meeting(4).len(), plane.num_lines() - 1);
    }

    #[test]
    fn plane_of_pg32_has_seven_lines() {
        let s = build_space(3, 2).unwrap();
        let plane = s.span_points(&[0, 1, 2]);
        assert_eq!(plane.dim, 1);
        let plane = s.span_points(&[0, 1, 3]);
        assert_eq!(plane.dim, 2);
        assert_eq!(s.lines_in_subspace(&plane).len(), 7);
        let line = s.line_subspace(3);
        assert_eq!(s.lines_in_subspace(&line), vec![3]);
    }

    #[test]
    fn descriptor_is_stable() {
        let a = build_space(3, 2).unwrap().descriptor();
        let b = build_space(3, 2).unwrap().descriptor();
        assert_eq!(a, b);
        assert_eq!(a.line_table_sha256.len(), 64);
        assert_ne!(a.line_table_sha256, build_space(2, 2).unwrap().descriptor().line_table_sha256);
    }
}

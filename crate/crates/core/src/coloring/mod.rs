//! Line colorings and their verification: properness, completeness, owners.

pub mod checkers;

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{LineId, PointId, SpaceModel};
use crate::spreads::{QuotientGeometry, Spread};

pub use checkers::{CheckerRegistry, CompletenessChecker, NaivePairwise, OwnerSweep};

/// Reports list at most this many violations; totals are always exact.
pub const REPORT_CAP: usize = 100;

pub type Color = u32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ColoringError {
    #[error("coloring has {got} entries but the space has {expected} lines")]
    LengthMismatch { expected: usize, got: usize },
    #[error("colors must be in 1..=k, found 0")]
    ZeroColor,
    #[error("color {0} is never used")]
    UnusedColor(Color),
    #[error("big line {big_line}: point {point} does not own claimed color {color}")]
    OwnerClaimFalse { big_line: usize, point: PointId, color: Color },
    #[error("coloring is not complete ({missing} color pairs meet nowhere)")]
    NotComplete { missing: usize },
}

/// A total map from lines to colors `1..=k`, every color used.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coloring {
    k: usize,
    assignment: Vec<Color>,
}

impl Coloring {
    pub fn new(space: &SpaceModel, assignment: Vec<Color>) -> Result<Self, ColoringError> {
        if assignment.len() != space.num_lines() {
            return Err(ColoringError::LengthMismatch { expected: space.num_lines(), got: assignment.len() });
        }
        Self::from_assignment(assignment)
    }

    pub fn from_assignment(assignment: Vec<Color>) -> Result<Self, ColoringError> {
        if assignment.contains(&0) {
            return Err(ColoringError::ZeroColor);
        }
        let k = assignment.iter().copied().max().unwrap_or(0) as usize;
        let mut used = vec![false; k + 1];
        for &c in &assignment {
            used[c as usize] = true;
        }
        if let Some(c) = (1..=k).find(|&c| !used[c]) {
            return Err(ColoringError::UnusedColor(c as Color));
        }
        Ok(Coloring { k, assignment })
    }

    /// Builds a coloring from color classes given as line lists; class `i` gets color `i + 1`.
    pub fn from_classes(space: &SpaceModel, classes: &[Vec<LineId>]) -> Result<Self, ColoringError> {
        let mut assignment = vec![0; space.num_lines()];
        for (i, class) in classes.iter().enumerate() {
            for &l in class {
                assignment[l] = i as Color + 1;
            }
        }
        Self::new(space, assignment)
    }

    pub fn constant(space: &SpaceModel) -> Self {
        Coloring { k: 1, assignment: vec![1; space.num_lines()] }
    }

    /// Every line its own color.
    pub fn discrete(space: &SpaceModel) -> Self {
        Coloring { k: space.num_lines(), assignment: (1..=space.num_lines() as Color).collect() }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn color(&self, l: LineId) -> Color {
        self.assignment[l]
    }

    pub fn assignment(&self) -> &[Color] {
        &self.assignment
    }

    pub fn classes(&self) -> Vec<Vec<LineId>> {
        let mut out = vec![Vec::new(); self.k];
        for (l, &c) in self.assignment.iter().enumerate() {
            out[c as usize - 1].push(l);
        }
        out
    }

    /// Sorted class sizes.
    pub fn class_sizes(&self) -> Vec<usize> {
        let mut s: Vec<usize> = self.classes().iter().map(Vec::len).collect();
        s.sort_unstable();
        s
    }

    /// Renames color `c` to `perm[c - 1]`; `perm` must be a permutation of `1..=k`.
    pub fn relabel(&self, perm: &[Color]) -> Self {
        assert_eq!(perm.len(), self.k);
        Coloring { k: self.k, assignment: self.assignment.iter().map(|&c| perm[c as usize - 1]).collect() }
    }
}

/// Colors of the lines through `p`, sorted and deduplicated.
pub fn owner_colors(space: &SpaceModel, col: &Coloring, p: PointId) -> Vec<Color> {
    let set: BTreeSet<Color> = space.point_lines(p).iter().map(|&l| col.color(l)).collect();
    set.into_iter().collect()
}

/// A line owns `colors` if each of its points does.
pub fn line_is_owner(space: &SpaceModel, col: &Coloring, l: LineId, colors: &[Color]) -> bool {
    space.line_points(l).iter().all(|&p| {
        let own = owner_colors(space, col, p);
        colors.iter().all(|c| own.binary_search(c).is_ok())
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProperReport {
    /// Intersecting same-colored line pairs, capped at `REPORT_CAP`.
    pub violations: Vec<(LineId, LineId)>,
    pub total: usize,
}

impl ProperReport {
    pub fn is_proper(&self) -> bool {
        self.total == 0
    }
}

/// Every intersecting same-color pair; two distinct lines meet in at most one point,
/// so the per-point sweep sees each pair once.
pub fn is_proper(space: &SpaceModel, col: &Coloring) -> ProperReport {
    let mut violations = Vec::new();
    let mut total = 0;
    for p in 0..space.num_points() {
        let lines = space.point_lines(p);
        for (i, &a) in lines.iter().enumerate() {
            for &b in &lines[i + 1..] {
                if col.color(a) == col.color(b) {
                    total += 1;
                    if violations.len() < REPORT_CAP {
                        violations.push((a.min(b), a.max(b)));
                    }
                }
            }
        }
    }
    ProperReport { violations, total }
}

const NO_WITNESS: u32 = u32::MAX;

#[inline]
fn pair_index(a: Color, b: Color) -> usize {
    // 1-based colors, a < b
    let (a, b) = (a as usize - 1, b as usize - 1);
    b * (b - 1) / 2 + a
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompletenessReport {
    pub k: usize,
    /// Color pairs owned by no point, capped at `REPORT_CAP`.
    pub missing: Vec<(Color, Color)>,
    pub missing_total: usize,
    witness: Vec<u32>,
}

impl CompletenessReport {
    pub(crate) fn from_witnesses(k: usize, witness: Vec<u32>) -> Self {
        let mut missing = Vec::new();
        let mut missing_total = 0;
        for b in 2..=k as Color {
            for a in 1..b {
                if witness[pair_index(a, b)] == NO_WITNESS {
                    missing_total += 1;
                    if missing.len() < REPORT_CAP {
                        missing.push((a, b));
                    }
                }
            }
        }
        CompletenessReport { k, missing, missing_total, witness }
    }

    pub fn is_complete(&self) -> bool {
        self.missing_total == 0
    }

    /// A point owning both colors, if any.
    pub fn witness(&self, a: Color, b: Color) -> Option<PointId> {
        let (a, b) = (a.min(b), a.max(b));
        if a == b || a == 0 || b as usize > self.k {
            return None;
        }
        match self.witness[pair_index(a, b)] {
            NO_WITNESS => None,
            p => Some(p as PointId),
        }
    }

    pub fn covered_pairs(&self) -> usize {
        self.k * self.k.saturating_sub(1) / 2 - self.missing_total
    }
}

/// Completeness via a sweep over points: each point's owner set covers all pairs
/// inside it. The smallest witnessing point id is kept, so the report is deterministic.
pub fn is_complete(space: &SpaceModel, col: &Coloring) -> CompletenessReport {
    let k = col.k();
    let pairs = k * k.saturating_sub(1) / 2;
    let chunk = space.num_points().div_ceil(rayon::current_num_threads().max(1)).max(16);
    let witness = (0..space.num_points())
        .collect::<Vec<_>>()
        .par_chunks(chunk)
        .map(|points| {
            let mut w = vec![NO_WITNESS; pairs];
            for &p in points {
                let own = owner_colors(space, col, p);
                for (i, &b) in own.iter().enumerate() {
                    for &a in &own[..i] {
                        let slot = &mut w[pair_index(a, b)];
                        if *slot == NO_WITNESS {
                            *slot = p as u32;
                        }
                    }
                }
            }
            w
        })
        .reduce(
            || vec![NO_WITNESS; pairs],
            |mut x, y| {
                for (a, b) in x.iter_mut().zip(y) {
                    *a = (*a).min(b);
                }
                x
            },
        );
    CompletenessReport::from_witnesses(k, witness)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerificationReport {
    pub proper: ProperReport,
    pub complete: CompletenessReport,
}

pub fn verify(space: &SpaceModel, col: &Coloring) -> VerificationReport {
    VerificationReport { proper: is_proper(space, col), complete: is_complete(space, col) }
}

/// Outcome of the large-line owner argument.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OwnerRouteReport {
    /// Union of the claimed color sets.
    pub union: Vec<Color>,
    /// Pairs inside the union whose lemma witness really owns both colors.
    pub covered_pairs: usize,
    /// Pairs witnessed through the common big point of two different big lines.
    pub via_common_point: usize,
    pub failures: Vec<(Color, Color)>,
    pub k: usize,
}

impl OwnerRouteReport {
    pub fn all_covered(&self) -> bool {
        self.failures.is_empty()
    }

    /// The owner route proves completeness when it covers every color.
    pub fn implies_complete(&self) -> bool {
        self.all_covered() && self.union.len() == self.k
    }
}

/// Completeness through large lines: once every carrier point owns every color claimed
/// for its big line, a pair from one claimed set is owned anywhere on that carrier, and a
/// pair split over two big lines is owned on the spread member they share.
pub fn completeness_via_bigline_owners(
    space: &SpaceModel,
    col: &Coloring,
    spread: &Spread,
    quotient: &QuotientGeometry,
    claimed: &[Vec<Color>],
) -> Result<OwnerRouteReport, ColoringError> {
    assert_eq!(claimed.len(), quotient.big_lines.len(), "one claimed set per big line");
    let owners: Vec<Vec<Color>> = (0..space.num_points()).map(|p| owner_colors(space, col, p)).collect();
    for (j, (bl, cs)) in quotient.big_lines.iter().zip(claimed).enumerate() {
        for &p in &bl.carrier.point_ids {
            if let Some(&c) = cs.iter().find(|c| owners[p].binary_search(c).is_err()) {
                return Err(ColoringError::OwnerClaimFalse { big_line: j, point: p, color: c });
            }
        }
    }
    let mut holders: Vec<Vec<usize>> = vec![Vec::new(); col.k() + 1];
    for (j, cs) in claimed.iter().enumerate() {
        for &c in cs {
            if (c as usize) < holders.len() && holders[c as usize].last() != Some(&j) {
                holders[c as usize].push(j);
            }
        }
    }
    let union: Vec<Color> = (1..=col.k() as Color).filter(|&c| !holders[c as usize].is_empty()).collect();
    let owns = |p: PointId, c: Color| owners[p].binary_search(&c).is_ok();
    let mut covered_pairs = 0;
    let mut via_common_point = 0;
    let mut failures = Vec::new();
    for (i, &b) in union.iter().enumerate() {
        for &a in &union[..i] {
            let (ha, hb) = (&holders[a as usize], &holders[b as usize]);
            let witness = match ha.iter().find(|j| hb.contains(j)) {
                Some(&j) => quotient.big_lines[j].carrier.point_ids[0],
                None => {
                    via_common_point += 1;
                    let m = quotient.common_point(ha[0], hb[0]).expect("big lines of a plane meet");
                    spread.members[m].point_ids[0]
                }
            };
            if owns(witness, a) && owns(witness, b) {
                covered_pairs += 1;
            } else if failures.len() < REPORT_CAP {
                failures.push((a, b));
            }
        }
    }
    Ok(OwnerRouteReport { union, covered_pairs, via_common_point, failures, k: col.k() })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum IndexKind {
    /// Proper and complete: a lower bound for the achromatic index.
    Achromatic,
    /// Complete only: a lower bound for the pseudoachromatic index.
    Pseudoachromatic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LowerBound {
    pub k: usize,
    pub index: IndexKind,
}

/// The color count of a complete coloring as a lower bound on the matching index.
pub fn max_colors_lower_certificate(space: &SpaceModel, col: &Coloring) -> Result<LowerBound, ColoringError> {
    let r = verify(space, col);
    if !r.complete.is_complete() {
        return Err(ColoringError::NotComplete { missing: r.complete.missing_total });
    }
    let index = if r.proper.is_proper() { IndexKind::Achromatic } else { IndexKind::Pseudoachromatic };
    Ok(LowerBound { k: col.k(), index })
}

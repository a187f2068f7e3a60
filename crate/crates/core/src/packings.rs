//! Line packings: verification, the exact-cover search for a packing of PG(3,q)
//! containing a prescribed regular spread, and the carrier packings of PG(5,q).

use std::collections::HashMap;
use std::sync::Arc;

use rayon::prelude::*;
use thiserror::Error;

use crate::geometry::{build_space_over, gaussian_coeff, Chart, GeometryError, LineId, SpaceModel, Subspace};
use crate::spreads::{
    check_spread, geometric_spread, induced_spread, is_regular_spread, quotient_geometry, QuotientGeometry, Spread,
    SpreadError, SpreadViolation,
};

/// Default node budget for a single packing search.
pub const DEFAULT_BUDGET: u64 = 50_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PackingError {
    #[error("search budget of {budget} nodes exhausted (inconclusive)")]
    BudgetExhausted { budget: u64 },
    #[error("prescribed spread is not regular")]
    NotRegular,
    #[error("unsupported size: {0}")]
    UnsupportedSize(String),
    #[error("search space exhausted without a packing")]
    NoPacking,
    #[error(transparent)]
    Spread(#[from] SpreadError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("invalid packing: {0}")]
    Invalid(#[from] PackingViolation),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PackingViolation {
    #[error("spread {index} is not a spread: {violation}")]
    NotSpread { index: usize, violation: SpreadViolation },
    #[error("line {line} is covered by spreads {first} and {second}")]
    DoublyCovered { line: LineId, first: usize, second: usize },
    #[error("{} lines are not covered, first {}", .lines.len(), .lines[0])]
    Uncovered { lines: Vec<LineId> },
}

/// A partition of the line set into line spreads.
#[derive(Debug, Clone)]
pub struct Packing {
    pub spreads: Vec<Vec<LineId>>,
    pub line_to_spread: Vec<usize>,
}

impl Packing {
    pub fn new(space: &SpaceModel, spreads: Vec<Vec<LineId>>) -> Result<Self, PackingViolation> {
        check_packing(space, &spreads)?;
        let mut line_to_spread = vec![0; space.num_lines()];
        for (i, s) in spreads.iter().enumerate() {
            for &l in s {
                line_to_spread[l] = i;
            }
        }
        Ok(Packing { spreads, line_to_spread })
    }

    pub fn len(&self) -> usize {
        self.spreads.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spreads.is_empty()
    }

    pub fn spread(&self, space: &SpaceModel, i: usize) -> Spread {
        Spread::from_lines(space, &self.spreads[i]).expect("validated on construction")
    }
}

/// Checks that each family is a line spread and that every line is covered exactly once.
pub fn check_packing(space: &SpaceModel, spreads: &[Vec<LineId>]) -> Result<(), PackingViolation> {
    let mut owner = vec![usize::MAX; space.num_lines()];
    for (i, s) in spreads.iter().enumerate() {
        let members: Vec<Subspace> = s.iter().map(|&l| space.line_subspace(l)).collect();
        check_spread(space, 1, &members).map_err(|violation| PackingViolation::NotSpread { index: i, violation })?;
        for &l in s {
            if owner[l] != usize::MAX {
                return Err(PackingViolation::DoublyCovered { line: l, first: owner[l], second: i });
            }
            owner[l] = i;
        }
    }
    let lines: Vec<LineId> = (0..owner.len()).filter(|&l| owner[l] == usize::MAX).collect();
    if lines.is_empty() {
        Ok(())
    } else {
        Err(PackingViolation::Uncovered { lines })
    }
}

pub fn is_packing(space: &SpaceModel, spreads: &[Vec<LineId>]) -> bool {
    check_packing(space, spreads).is_ok()
}

fn line_masks(space: &SpaceModel) -> Result<Vec<u128>, PackingError> {
    if space.num_points() > 128 {
        return Err(PackingError::UnsupportedSize(format!("{:?} has more than 128 points", space)));
    }
    Ok((0..space.num_lines())
        .map(|l| space.line_points(l).iter().fold(0u128, |m, &p| m | 1 << p))
        .collect())
}

/// Colors the lines outside the prescribed spread with `q^2 + q` slots so that every
/// slot is a partial spread. Since the slots must absorb exactly `(q^2+q)(q^2+1)`
/// lines, a complete assignment makes every slot a full spread.
struct SlotSearch<'a> {
    masks: &'a [u128],
    lines: Vec<LineId>,
    slot_of: Vec<usize>,
    slot_points: Vec<u128>,
    slot_size: Vec<usize>,
    nodes: u64,
    budget: u64,
}

const FREE: usize = usize::MAX;

impl SlotSearch<'_> {
    /// Slots a line may join. Empty slots are interchangeable, so only the first counts.
    fn options(&self, l: LineId, out: &mut Vec<usize>) {
        out.clear();
        let mut empty_seen = false;
        for (s, &pts) in self.slot_points.iter().enumerate() {
            if self.slot_size[s] == 0 {
                if !empty_seen {
                    empty_seen = true;
                    out.push(s);
                }
            } else if pts & self.masks[l] == 0 {
                out.push(s);
            }
        }
    }

    fn run(&mut self) -> Result<bool, PackingError> {
        // most constrained line first, ties to the smallest id
        let mut best: Option<(usize, LineId)> = None;
        let mut opts = Vec::new();
        for &l in &self.lines {
            if self.slot_of[l] != FREE {
                continue;
            }
            self.options(l, &mut opts);
            if opts.is_empty() {
                return Ok(false);
            }
            if best.is_none_or(|(c, _)| opts.len() < c) {
                best = Some((opts.len(), l));
            }
        }
        let Some((_, line)) = best else {
            return Ok(true);
        };
        let mut choices = Vec::new();
        self.options(line, &mut choices);
        for s in choices {
            self.nodes += 1;
            if self.nodes > self.budget {
                return Err(PackingError::BudgetExhausted { budget: self.budget });
            }
            self.slot_of[line] = s;
            self.slot_points[s] |= self.masks[line];
            self.slot_size[s] += 1;
            if self.run()? {
                return Ok(true);
            }
            self.slot_of[line] = FREE;
            self.slot_points[s] &= !self.masks[line];
            self.slot_size[s] -= 1;
        }
        Ok(false)
    }
}

/// Result of a packing search together with the number of nodes it expanded.
#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub packing: Packing,
    pub nodes: u64,
}

/// A packing of PG(3,q) whose first spread is `sp`, found by exact-cover backtracking.
pub fn packing_containing_spread(space: &SpaceModel, sp: &Spread, budget: u64) -> Result<Packing, PackingError> {
    search_packing(space, sp, budget).map(|o| o.packing)
}

pub fn search_packing(space: &SpaceModel, sp: &Spread, budget: u64) -> Result<SearchOutcome, PackingError> {
    if space.dim() != 3 {
        return Err(SpreadError::NotDim3(space.dim()).into());
    }
    if !is_regular_spread(space, sp)? {
        return Err(PackingError::NotRegular);
    }
    search_packing_unchecked(space, &sp.line_ids(space), budget)
}

fn search_packing_unchecked(space: &SpaceModel, prescribed: &[LineId], budget: u64) -> Result<SearchOutcome, PackingError> {
    let masks = line_masks(space)?;
    let q = space.q() as u128;
    let slots = (gaussian_coeff(3, 1, q)? - 1) as usize;
    let lines: Vec<LineId> = (0..space.num_lines()).filter(|l| !prescribed.contains(l)).collect();
    let mut search = SlotSearch {
        masks: &masks,
        lines,
        slot_of: vec![FREE; space.num_lines()],
        slot_points: vec![0; slots],
        slot_size: vec![0; slots],
        nodes: 0,
        budget,
    };
    if !search.run()? {
        return Err(PackingError::NoPacking);
    }
    let mut spreads = vec![prescribed.to_vec()];
    for s in 0..slots {
        spreads.push(search.lines.iter().copied().filter(|&l| search.slot_of[l] == s).collect());
    }
    let packing = Packing::new(space, spreads)?;
    Ok(SearchOutcome { packing, nodes: search.nodes })
}

/// Every line spread of PG(3,2), by backtracking on the smallest uncovered point.
pub fn enumerate_spreads(space: &SpaceModel) -> Result<Vec<Vec<LineId>>, PackingError> {
    if space.dim() != 3 || space.q() != 2 {
        return Err(PackingError::UnsupportedSize("spread enumeration is limited to PG(3,2)".into()));
    }
    fn go(space: &SpaceModel, covered: &mut Vec<bool>, chosen: &mut Vec<LineId>, out: &mut Vec<Vec<LineId>>) {
        let Some(p) = covered.iter().position(|&c| !c) else {
            out.push(chosen.clone());
            return;
        };
        for &l in space.point_lines(p) {
            let pts = space.line_points(l);
            if pts.iter().any(|&x| covered[x]) {
                continue;
            }
            pts.iter().for_each(|&x| covered[x] = true);
            chosen.push(l);
            go(space, covered, chosen, out);
            chosen.pop();
            pts.iter().for_each(|&x| covered[x] = false);
        }
    }
    let mut out = Vec::new();
    go(space, &mut vec![false; space.num_points()], &mut Vec::new(), &mut out);
    for s in &mut out {
        s.sort_unstable();
    }
    out.sort();
    Ok(out)
}

/// One large line of PG(5,q) with its induced spread and a packing of its carrier
/// whose first spread is the induced one. All line ids are ambient ids.
#[derive(Debug, Clone)]
pub struct CarrierPacking {
    pub carrier: Subspace,
    pub induced: Vec<LineId>,
    pub packing: Vec<Vec<LineId>>,
}

#[derive(Debug, Clone)]
pub struct PackingStructure5 {
    pub base_spread: Spread,
    pub quotient: QuotientGeometry,
    pub carriers: Vec<CarrierPacking>,
    /// Total nodes across the distinct carrier searches.
    pub search_nodes: u64,
}

/// The geometric line spread of PG(5,q) together with a packing of every large-line
/// carrier that contains the induced regular spread.
pub fn build_packing_structure5(space: &SpaceModel, budget: u64) -> Result<PackingStructure5, PackingError> {
    if space.dim() != 5 {
        return Err(PackingError::UnsupportedSize(format!("expected PG(5,q), got {space:?}")));
    }
    let base_spread = geometric_spread(space, 1)?;
    let quotient = quotient_geometry(space, &base_spread)?;
    let local = Arc::new(build_space_over(3, space.field().clone(), u128::MAX)?);
    line_masks(&local)?;

    let mut charts = Vec::with_capacity(quotient.big_lines.len());
    let mut local_spreads = Vec::with_capacity(quotient.big_lines.len());
    for bl in &quotient.big_lines {
        let chart = Chart::new(space, bl.carrier.clone(), local.clone())?;
        let induced = induced_spread(space, &base_spread, &bl.carrier)?;
        let mut ll: Vec<LineId> =
            induced.line_ids(space).iter().map(|&l| chart.to_local_line(space, l).expect("in carrier")).collect();
        ll.sort_unstable();
        local_spreads.push(ll);
        charts.push(chart);
    }

    // carriers whose induced spreads coincide in local coordinates share one search
    let mut distinct: Vec<Vec<LineId>> = local_spreads.clone();
    distinct.sort();
    distinct.dedup();
    let results: Vec<Result<SearchOutcome, PackingError>> = distinct
        .par_iter()
        .map(|ll| {
            let sp = Spread::from_lines(&local, ll)?;
            if !is_regular_spread(&local, &sp)? {
                return Err(PackingError::NotRegular);
            }
            search_packing_unchecked(&local, ll, budget)
        })
        .collect();
    let mut found: HashMap<Vec<LineId>, Packing> = HashMap::new();
    let mut search_nodes = 0;
    for (key, r) in distinct.into_iter().zip(results) {
        let outcome = r?;
        search_nodes += outcome.nodes;
        found.insert(key, outcome.packing);
    }

    let carriers = charts
        .into_iter()
        .zip(&local_spreads)
        .map(|(chart, ll)| {
            let lp = &found[ll];
            let to_global = |s: &Vec<LineId>| -> Vec<LineId> {
                let mut g: Vec<LineId> = s.iter().map(|&l| chart.to_global_line(space, l)).collect();
                g.sort_unstable();
                g
            };
            let packing: Vec<Vec<LineId>> = lp.spreads.iter().map(to_global).collect();
            CarrierPacking { carrier: chart.carrier.clone(), induced: packing[0].clone(), packing }
        })
        .collect();
    let structure = PackingStructure5 { base_spread, quotient, carriers, search_nodes };
    verify_packing_structure(space, &structure)?;
    Ok(structure)
}

/// Checks the exact-once cover: the base spread plus all non-induced carrier spreads
/// partition the lines of PG(5,q), and each carrier packing partitions the carrier's lines.
pub fn verify_packing_structure(space: &SpaceModel, s: &PackingStructure5) -> Result<(), PackingViolation> {
    let base = s.base_spread.line_ids(space);
    let mut families: Vec<Vec<LineId>> = vec![base];
    for cp in &s.carriers {
        let mut in_carrier = space.lines_in_subspace(&cp.carrier);
        let mut union: Vec<LineId> = cp.packing.iter().flatten().copied().collect();
        union.sort_unstable();
        in_carrier.sort_unstable();
        if union != in_carrier {
            let missing: Vec<LineId> = in_carrier.iter().copied().filter(|l| union.binary_search(l).is_err()).collect();
            return Err(PackingViolation::Uncovered { lines: if missing.is_empty() { union } else { missing } });
        }
        for (i, sp) in cp.packing.iter().enumerate() {
            let members: Vec<Subspace> = sp.iter().map(|&l| space.line_subspace(l)).collect();
            // a spread of the carrier: pairwise disjoint and covering the carrier points
            let covered: usize = members.iter().map(|m| m.point_ids.len()).sum();
            let mut pts: Vec<_> = members.iter().flat_map(|m| m.point_ids.iter().copied()).collect();
            pts.sort_unstable();
            pts.dedup();
            if pts.len() != covered || pts != cp.carrier.point_ids {
                return Err(PackingViolation::NotSpread {
                    index: i,
                    violation: SpreadViolation::Uncovered { point: cp.carrier.point_ids[0], uncovered: 0 },
                });
            }
        }
        families.extend(cp.packing[1..].iter().cloned());
    }
    let mut owner = vec![usize::MAX; space.num_lines()];
    for (i, f) in families.iter().enumerate() {
        for &l in f {
            if owner[l] != usize::MAX {
                return Err(PackingViolation::DoublyCovered { line: l, first: owner[l], second: i });
            }
            owner[l] = i;
        }
    }
    let lines: Vec<LineId> = (0..owner.len()).filter(|&l| owner[l] == usize::MAX).collect();
    if lines.is_empty() {
        Ok(())
    } else {
        Err(PackingViolation::Uncovered { lines })
    }
}

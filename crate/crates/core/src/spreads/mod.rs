//! Spreads of PG(n,q): field reduction, reguli, regularity, geometric spreads and the
//! quotient geometry of large points and large lines.

pub mod registry;

use std::collections::HashMap;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::geometry::{build_space_over, gaussian_coeff, GeometryError, LineId, PointId, SpaceModel, Subspace};
use crate::gf::{ext_field, Elem, Extension, FieldError};

pub use registry::{SpreadConstruction, SpreadRegistry};

/// Seed for the sampled regularity check used when q > 3.
pub const REGULARITY_SEED: u64 = 0x5eed_0003;
/// Number of member triples sampled when the regularity check is not exhaustive.
pub const REGULARITY_SAMPLES: usize = 1000;

const NO_MEMBER: usize = usize::MAX;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpreadError {
    #[error("(t+1) = {t1} does not divide (n+1) = {n1}")]
    Divisibility { n1: usize, t1: usize },
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("lines {0} and {1} are not skew")]
    NotSkew(LineId, LineId),
    #[error("operation requires PG(3,q), got PG({0},q)")]
    NotDim3(usize),
    #[error("spread member {member} meets the carrier in {inside} of {size} points")]
    NotInduced { member: usize, inside: usize, size: usize },
    #[error("spread is not geometric")]
    NotGeometric,
    #[error("not a spread: {0}")]
    NotASpread(SpreadViolation),
    #[error("regulus is not contained in the spread")]
    RegulusOutside,
}

/// First reason a family of subspaces fails to be a spread.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpreadViolation {
    #[error("member {index} has dimension {dim}, expected {expected}")]
    WrongDimension { index: usize, dim: usize, expected: usize },
    #[error("members {first} and {second} share point {point}")]
    Overlap { point: PointId, first: usize, second: usize },
    #[error("point {point} is not covered ({uncovered} uncovered in total)")]
    Uncovered { point: PointId, uncovered: usize },
}

/// Where a field-reduction spread came from: the extension used and, per member, the
/// coordinates of the corresponding point of PG(s, q^{t+1}).
#[derive(Debug, Clone)]
pub struct Reduction {
    pub ext: Extension,
    pub big_coords: Vec<Vec<Elem>>,
}

/// A set of pairwise disjoint t-subspaces. Spreads built on a whole space cover every
/// point; induced spreads cover exactly their carrier.
#[derive(Debug, Clone)]
pub struct Spread {
    pub t: usize,
    pub members: Vec<Subspace>,
    member_of: Vec<usize>,
    pub reduction: Option<Reduction>,
}

impl Spread {
    /// Validates `members` as a spread of the whole space.
    pub fn new(space: &SpaceModel, t: usize, members: Vec<Subspace>) -> Result<Self, SpreadError> {
        check_spread(space, t, &members).map_err(SpreadError::NotASpread)?;
        Ok(Self::unchecked(space, t, members))
    }

    fn unchecked(space: &SpaceModel, t: usize, members: Vec<Subspace>) -> Self {
        let mut member_of = vec![NO_MEMBER; space.num_points()];
        for (i, m) in members.iter().enumerate() {
            for &p in &m.point_ids {
                member_of[p] = i;
            }
        }
        Spread { t, members, member_of, reduction: None }
    }

    /// A line spread given by line ids.
    pub fn from_lines(space: &SpaceModel, lines: &[LineId]) -> Result<Self, SpreadError> {
        Self::new(space, 1, lines.iter().map(|&l| space.line_subspace(l)).collect())
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn member_of(&self, p: PointId) -> Option<usize> {
        match self.member_of[p] {
            NO_MEMBER => None,
            i => Some(i),
        }
    }

    /// Line ids of the members of a line spread, in member order.
    pub fn line_ids(&self, space: &SpaceModel) -> Vec<LineId> {
        assert_eq!(self.t, 1, "line ids only exist for line spreads");
        self.members.iter().map(|m| space.line_id(m).expect("member is a line")).collect()
    }
}

/// Checks that `members` are t-subspaces partitioning the point set.
pub fn check_spread(space: &SpaceModel, t: usize, members: &[Subspace]) -> Result<(), SpreadViolation> {
    let mut owner = vec![NO_MEMBER; space.num_points()];
    for (i, m) in members.iter().enumerate() {
        if m.dim != t {
            return Err(SpreadViolation::WrongDimension { index: i, dim: m.dim, expected: t });
        }
        for &p in &m.point_ids {
            if owner[p] != NO_MEMBER {
                return Err(SpreadViolation::Overlap { point: p, first: owner[p], second: i });
            }
            owner[p] = i;
        }
    }
    let uncovered: Vec<PointId> = (0..owner.len()).filter(|&p| owner[p] == NO_MEMBER).collect();
    match uncovered.first() {
        Some(&point) => Err(SpreadViolation::Uncovered { point, uncovered: uncovered.len() }),
        None => Ok(()),
    }
}

pub fn is_spread(space: &SpaceModel, t: usize, members: &[Subspace]) -> bool {
    check_spread(space, t, members).is_ok()
}

/// The geometric t-spread obtained by field reduction from PG(s, q^{t+1}).
///
/// Each point `P` of PG(s, q^{t+1}) becomes the GF(q)-span of the vectors `x^i P`
/// (i = 0..t), written in base-field coordinates block by block.
pub fn geometric_spread(space: &SpaceModel, t: usize) -> Result<Spread, SpreadError> {
    let n1 = space.dim() + 1;
    let t1 = t + 1;
    if t == 0 || n1 % t1 != 0 || n1 == t1 {
        return Err(SpreadError::Divisibility { n1, t1 });
    }
    let ext = ext_field(space.field(), t1)?;
    let big = ext.field.order();
    let width = n1 / t1;
    let q = space.q();
    // x^i has id q^i under the polynomial-basis encoding
    let basis_elems: Vec<Elem> = (0..t1).map(|i| q.pow(i as u32) as Elem).collect();

    let mut members = Vec::new();
    let mut big_coords = Vec::new();
    let mut lam = vec![0 as Elem; width];
    for code in 0..big.pow(width as u32) {
        let mut c = code;
        for slot in lam.iter_mut().rev() {
            *slot = (c % big) as Elem;
            c /= big;
        }
        if lam.iter().find(|&&x| x != 0) != Some(&1) {
            continue;
        }
        let rows: Vec<Vec<Elem>> = basis_elems
            .iter()
            .map(|&mu| lam.iter().flat_map(|&l| ext.coords(ext.field.mul(mu, l))).collect())
            .collect();
        members.push(space.subspace(&rows));
        big_coords.push(lam.clone());
    }
    let mut spread = Spread::new(space, t, members)?;
    spread.reduction = Some(Reduction { ext, big_coords });
    Ok(spread)
}

fn require_dim3(space: &SpaceModel) -> Result<(), SpreadError> {
    if space.dim() == 3 {
        Ok(())
    } else {
        Err(SpreadError::NotDim3(space.dim()))
    }
}

fn transversals(space: &SpaceModel, lines: &[LineId]) -> Vec<LineId> {
    (0..space.num_lines())
        .filter(|m| !lines.contains(m) && lines.iter().all(|&l| space.lines_meet(l, *m)))
        .collect()
}

/// The unique regulus through three pairwise skew lines of PG(3,q), sorted.
pub fn regulus(space: &SpaceModel, l1: LineId, l2: LineId, l3: LineId) -> Result<Vec<LineId>, SpreadError> {
    require_dim3(space)?;
    for (a, b) in [(l1, l2), (l1, l3), (l2, l3)] {
        if a == b || space.lines_meet(a, b) {
            return Err(SpreadError::NotSkew(a, b));
        }
    }
    let trans = transversals(space, &[l1, l2, l3]);
    Ok(transversals(space, &trans))
}

/// The lines meeting every line of a regulus.
pub fn opposite_regulus(space: &SpaceModel, reg: &[LineId]) -> Vec<LineId> {
    transversals(space, reg)
}

/// Regularity of a line spread of PG(3,q): every member triple's regulus lies in the
/// spread. Exhaustive for q <= 3, otherwise over `REGULARITY_SAMPLES` seeded triples.
pub fn is_regular_spread(space: &SpaceModel, sp: &Spread) -> Result<bool, SpreadError> {
    require_dim3(space)?;
    let lines = sp.line_ids(space);
    let mut in_spread = vec![false; space.num_lines()];
    for &l in &lines {
        in_spread[l] = true;
    }
    let closed = |a: usize, b: usize, c: usize| -> Result<bool, SpreadError> {
        let reg = regulus(space, lines[a], lines[b], lines[c])?;
        Ok(reg.iter().all(|&l| in_spread[l]))
    };
    let m = lines.len();
    if space.q() <= 3 {
        for a in 0..m {
            for b in a + 1..m {
                for c in b + 1..m {
                    if !closed(a, b, c)? {
                        return Ok(false);
                    }
                }
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(REGULARITY_SEED);
        for _ in 0..REGULARITY_SAMPLES {
            let idx = sample(&mut rng, m, 3);
            if !closed(idx.index(0), idx.index(1), idx.index(2))? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// True iff for every pair of members, every member meeting their span lies inside it.
pub fn is_geometric_spread(space: &SpaceModel, sp: &Spread) -> bool {
    let m = sp.len();
    let mut inside = vec![false; space.num_points()];
    for a in 0..m {
        for b in a + 1..m {
            let carrier = space.span(&sp.members[a], &sp.members[b]);
            for &p in &carrier.point_ids {
                inside[p] = true;
            }
            let ok = sp.members.iter().all(|z| {
                let k = z.point_ids.iter().filter(|&&p| inside[p]).count();
                k == 0 || k == z.point_ids.len()
            });
            for &p in &carrier.point_ids {
                inside[p] = false;
            }
            if !ok {
                return false;
            }
        }
    }
    true
}

/// The members of `sp` lying in `carrier`, as a spread of the carrier.
pub fn induced_spread(space: &SpaceModel, sp: &Spread, carrier: &Subspace) -> Result<Spread, SpreadError> {
    let mut members = Vec::new();
    for (i, z) in sp.members.iter().enumerate() {
        let k = z.point_ids.iter().filter(|&&p| carrier.contains_point(p)).count();
        if k == z.point_ids.len() {
            members.push(z.clone());
        } else if k > 0 {
            return Err(SpreadError::NotInduced { member: i, inside: k, size: z.point_ids.len() });
        }
    }
    Ok(Spread::unchecked(space, sp.t, members))
}

/// Replaces the regulus through members `a, b, c` of a line spread of PG(3,q) by its
/// opposite regulus.
pub fn switch_regulus(space: &SpaceModel, sp: &Spread, a: usize, b: usize, c: usize) -> Result<Spread, SpreadError> {
    let lines = sp.line_ids(space);
    let reg = regulus(space, lines[a], lines[b], lines[c])?;
    if !reg.iter().all(|l| lines.contains(l)) {
        return Err(SpreadError::RegulusOutside);
    }
    let mut next: Vec<LineId> = lines.into_iter().filter(|l| !reg.contains(l)).collect();
    next.extend(opposite_regulus(space, &reg));
    Spread::from_lines(space, &next)
}

/// A large line: the span of two spread members, with the members it contains.
#[derive(Debug, Clone)]
pub struct BigLine {
    pub carrier: Subspace,
    pub members: Vec<usize>,
}

/// Isomorphism of the quotient geometry with PG(s, q^{t+1}), available for
/// field-reduction spreads.
#[derive(Debug, Clone)]
pub struct QuotientIso {
    pub big_space: SpaceModel,
    pub point_map: Vec<PointId>,
    pub line_map: Vec<LineId>,
}

#[derive(Debug, Clone)]
pub struct QuotientGeometry {
    /// Dimension of the quotient space.
    pub s: usize,
    /// Its order q^{t+1}.
    pub order: usize,
    pub num_big_points: usize,
    pub big_lines: Vec<BigLine>,
    /// For each member, the indices of the big lines through it.
    pub lines_through: Vec<Vec<usize>>,
    pub iso: Option<QuotientIso>,
}

impl QuotientGeometry {
    /// The common big point of two distinct big lines, when they meet.
    pub fn common_point(&self, a: usize, b: usize) -> Option<usize> {
        let mb = &self.big_lines[b].members;
        self.big_lines[a].members.iter().copied().find(|m| mb.contains(m))
    }
}

/// Large points and large lines of a geometric spread.
pub fn quotient_geometry(space: &SpaceModel, sp: &Spread) -> Result<QuotientGeometry, SpreadError> {
    if !is_geometric_spread(space, sp) {
        return Err(SpreadError::NotGeometric);
    }
    let n1 = space.dim() + 1;
    let t1 = sp.t + 1;
    let s = n1 / t1 - 1;
    let order = space.q().pow(t1 as u32);
    let m = sp.len();
    let mut pair_seen = vec![false; m * m];
    let mut big_lines = Vec::new();
    for a in 0..m {
        for b in a + 1..m {
            if pair_seen[a * m + b] {
                continue;
            }
            let carrier = space.span(&sp.members[a], &sp.members[b]);
            let mut members: Vec<usize> = carrier.point_ids.iter().filter_map(|&p| sp.member_of(p)).collect();
            members.sort_unstable();
            members.dedup();
            for &x in &members {
                for &y in &members {
                    pair_seen[x * m + y] = true;
                }
            }
            big_lines.push(BigLine { carrier, members });
        }
    }
    let mut lines_through = vec![Vec::new(); m];
    for (j, bl) in big_lines.iter().enumerate() {
        for &x in &bl.members {
            lines_through[x].push(j);
        }
    }
    let expected_lines = gaussian_coeff(s as u32 + 1, 2, order as u128)?;
    debug_assert_eq!(big_lines.len() as u128, expected_lines);

    let iso = match &sp.reduction {
        Some(red) => {
            let big_space = build_space_over(s, red.ext.field.clone(), u128::MAX)?;
            let point_map: Vec<PointId> =
                red.big_coords.iter().map(|c| big_space.point_id(c).expect("normalized big point")).collect();
            let mut line_map = Vec::with_capacity(big_lines.len());
            for bl in &big_lines {
                let l = big_space
                    .line_through(point_map[bl.members[0]], point_map[bl.members[1]])
                    .expect("distinct big points");
                if !bl.members.iter().all(|&x| big_space.line_points(l).contains(&point_map[x])) {
                    return Err(SpreadError::NotGeometric);
                }
                line_map.push(l);
            }
            Some(QuotientIso { big_space, point_map, line_map })
        }
        None => None,
    };
    Ok(QuotientGeometry { s, order, num_big_points: m, big_lines, lines_through, iso })
}

/// Index of each line spread member by line id, for quick membership tests.
pub fn member_index(space: &SpaceModel, sp: &Spread) -> HashMap<LineId, usize> {
    sp.line_ids(space).into_iter().enumerate().map(|(i, l)| (l, i)).collect()
}

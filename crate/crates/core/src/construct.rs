//! The lower-bound coloring of PG(5,q) and the bound formulas for PG(n,q).

use serde::Serialize;
use thiserror::Error;

use crate::coloring::{Color, Coloring, ColoringError};
use crate::geometry::{gaussian_coeff, point_count, GeometryError, SpaceModel};
use crate::packings::{verify_packing_structure, PackingStructure5, PackingViolation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstructError {
    #[error("n = {0} is not of the form 3*2^i - 1 with i >= 1")]
    ShapeError(usize),
    #[error("packing structure does not fit the space: {0}")]
    StructureInvalid(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Coloring(#[from] ColoringError),
    #[error("value overflows 128 bits")]
    Overflow,
}

impl From<PackingViolation> for ConstructError {
    fn from(v: PackingViolation) -> Self {
        ConstructError::StructureInvalid(v.to_string())
    }
}

/// For `n = 3*2^i - 1` returns `(i, t)` with `t = 2^i - 1`.
pub fn shape(n: usize) -> Result<(u32, usize), ConstructError> {
    if (n + 1) % 3 != 0 {
        return Err(ConstructError::ShapeError(n));
    }
    let m = (n + 1) / 3;
    if m < 2 || !m.is_power_of_two() {
        return Err(ConstructError::ShapeError(n));
    }
    Ok((m.trailing_zeros(), m - 1))
}

/// The coloring of PG(5,q) built from a packing structure.
///
/// Spread `k` (k >= 1) of the packing of carrier `j` gets color `j*(q^2+q) + k`; every
/// line of the base spread gets the final color `(q^2+q)(q^4+q^2+1) + 1`.
pub fn theorem1_coloring(space: &SpaceModel, structure: &PackingStructure5) -> Result<Coloring, ConstructError> {
    if space.dim() != 5 {
        return Err(ConstructError::StructureInvalid(format!("expected PG(5,q), got {space:?}")));
    }
    let q = space.q();
    let per_carrier = q * q + q;
    if structure.carriers.len() != q.pow(4) + q * q + 1 {
        return Err(ConstructError::StructureInvalid(format!("{} carriers", structure.carriers.len())));
    }
    if structure.carriers.iter().any(|c| c.packing.len() != per_carrier + 1) {
        return Err(ConstructError::StructureInvalid("carrier packing has the wrong number of spreads".into()));
    }
    verify_packing_structure(space, structure)?;
    let mut assignment: Vec<Color> = vec![0; space.num_lines()];
    for (j, cp) in structure.carriers.iter().enumerate() {
        for (k, spread) in cp.packing.iter().enumerate().skip(1) {
            let color = (j * per_carrier + k) as Color;
            for &l in spread {
                assignment[l] = color;
            }
        }
    }
    let base = (per_carrier * structure.carriers.len() + 1) as Color;
    for l in structure.base_spread.line_ids(space) {
        assignment[l] = base;
    }
    Ok(Coloring::new(space, assignment)?)
}

/// Colors each large line's carrier points own under [`theorem1_coloring`]: the colors of
/// its carrier packing and the base color. One set per large line, in quotient order.
pub fn theorem1_claims(space: &SpaceModel, structure: &PackingStructure5) -> Vec<Vec<Color>> {
    let q = space.q();
    let per = q * q + q;
    let base = (per * structure.carriers.len() + 1) as Color;
    (0..structure.carriers.len())
        .map(|j| (j * per + 1..=(j + 1) * per).map(|c| c as Color).chain([base]).collect())
        .collect()
}

/// The color count of the construction: `(q^{n+t+1} - 1)/(q - 1)`.
pub fn alpha_lower_value(n: usize, q: u128) -> Result<u128, ConstructError> {
    let (_, t) = shape(n)?;
    let e = (n + t + 1) as u32;
    let pow = q.checked_pow(e).ok_or(ConstructError::Overflow)?;
    Ok((pow - 1) / (q - 1))
}

/// Evaluation of the lower-bound inequality at one `(n, q)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InequalityCheck {
    pub n: usize,
    pub q: u128,
    pub v: u128,
    pub h: f64,
    pub c_n: f64,
    /// `c_n * v^h / q`, rounded up.
    pub bound: f64,
    pub alpha_lower: u128,
    /// `(q^{hn}-1)/(q-1) > q^{hn-1}`, exact.
    pub first_step: bool,
    /// `2 q^n > v`, exact; equivalent to `q^{hn-1} > 2^{-h} v^h / q`.
    pub second_step: bool,
    /// `bound <= alpha_lower` in floating point with slack.
    pub holds: bool,
}

/// Checks `c_n v^h / q <= alpha_lower_value(n, q)` with `h = (4n+1)/(3n)`, `c_n = 2^-h`.
pub fn check_inequality_main1(n: usize, q: u128) -> Result<InequalityCheck, ConstructError> {
    let alpha_lower = alpha_lower_value(n, q)?;
    let v = point_count(n as u32, q)?;
    let h = (4 * n + 1) as f64 / (3 * n) as f64;
    let c_n = 2f64.powf(-h);
    // round the bound up so that float error can only make the check stricter
    let bound = c_n * (v as f64).powf(h) / q as f64 * (1.0 + 1e-9);
    // h*n = n + t + 1 is an integer
    let hn = ((4 * n + 1) / 3) as u32;
    let q_hn = q.checked_pow(hn).ok_or(ConstructError::Overflow)?;
    let first_step = (q_hn - 1) / (q - 1) > q_hn / q && (q_hn - 1) % (q - 1) == 0;
    let q_n = q.checked_pow(n as u32).ok_or(ConstructError::Overflow)?;
    let second_step = 2 * q_n > v;
    let holds = bound <= alpha_lower as f64 && first_step && second_step;
    Ok(InequalityCheck { n, q, v, h, c_n, bound, alpha_lower, first_step, second_step, holds })
}

fn isqrt(x: u128) -> u128 {
    if x < 2 {
        return x;
    }
    let mut r = (x as f64).sqrt() as u128;
    while r * r > x {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= x {
        r += 1;
    }
    r
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PsiUpper {
    /// `floor(sqrt(v) * (v-1) / q)`.
    pub value: u128,
    /// `floor((1 + sqrt(1 + 4 v r (r-1))) / 2)`, the root of the counting inequality.
    pub quadratic: u128,
}

/// Upper bound on the pseudoachromatic index, in exact integer arithmetic.
pub fn psi_upper_value(n: usize, q: u128) -> Result<PsiUpper, ConstructError> {
    let v = point_count(n as u32, q)?;
    let r = (v - 1) / q;
    // floor(sqrt(v)(v-1)/q) = floor(isqrt(v (v-1)^2) / q)
    let sq = v
        .checked_mul(v - 1)
        .and_then(|x| x.checked_mul(v - 1))
        .ok_or(ConstructError::Overflow)?;
    let value = isqrt(sq) / q;
    let disc = v
        .checked_mul(r)
        .and_then(|x| x.checked_mul(r.saturating_sub(1)))
        .and_then(|x| x.checked_mul(4))
        .ok_or(ConstructError::Overflow)?
        + 1;
    let quadratic = (1 + isqrt(disc)) / 2;
    Ok(PsiUpper { value, quadratic })
}

/// `v * C(r,2) >= C(k,2)`: whether `k` colors survive the incidence count.
pub fn counting_incidence_check(n: usize, q: u128, k: u128) -> Result<bool, ConstructError> {
    let v = point_count(n as u32, q)?;
    let r = (v - 1) / q;
    let lhs = v.checked_mul(r * r.saturating_sub(1) / 2).ok_or(ConstructError::Overflow)?;
    Ok(lhs >= k * k.saturating_sub(1) / 2)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundsRow {
    pub n: usize,
    pub q: u128,
    pub v: u128,
    pub lines: u128,
    pub r: u128,
    pub lower_alpha: Option<u128>,
    pub upper_psi: u128,
    pub quadratic_psi: u128,
    pub chromatic_upper: u128,
    pub h: f64,
    pub c_n: f64,
    /// Planes have every index equal to v.
    pub plane_exact: Option<u128>,
}

pub fn bounds_row(n: usize, q: u128) -> Result<BoundsRow, ConstructError> {
    let v = point_count(n as u32, q)?;
    let lines = gaussian_coeff(n as u32 + 1, 2, q)?;
    let psi = psi_upper_value(n, q)?;
    let lower_alpha = match alpha_lower_value(n, q) {
        Ok(a) => Some(a),
        Err(ConstructError::ShapeError(_)) => None,
        Err(e) => return Err(e),
    };
    let h = (4 * n + 1) as f64 / (3 * n) as f64;
    Ok(BoundsRow {
        n,
        q,
        v,
        lines,
        r: (v - 1) / q,
        lower_alpha,
        upper_psi: psi.value,
        quadratic_psi: psi.quadratic,
        chromatic_upper: v,
        h,
        c_n: 2f64.powf(-h),
        plane_exact: (n == 2).then_some(v),
    })
}

pub fn bounds_table(ns: &[usize], qs: &[u128]) -> Result<Vec<BoundsRow>, ConstructError> {
    let mut rows = Vec::new();
    for &n in ns {
        for &q in qs {
            rows.push(bounds_row(n, q)?);
        }
    }
    Ok(rows)
}

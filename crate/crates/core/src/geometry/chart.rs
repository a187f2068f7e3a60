use std::sync::Arc;

use super::{GeometryError, LineId, PointId, SpaceModel, Subspace};

/// Coordinates on a k-subspace of PG(n,q), identifying it with a standalone PG(k,q).
///
/// A carrier point `x = sum c_i b_i` over the RREF basis `b` has `c_i = x[pivot_i]`,
/// and the first nonzero `c_i` is 1, so the local coordinates come out normalized.
#[derive(Debug, Clone)]
pub struct Chart {
    pub carrier: Subspace,
    local: Arc<SpaceModel>,
    to_local: Vec<u32>,
    to_global: Vec<PointId>,
}

impl Chart {
    pub fn new(space: &SpaceModel, carrier: Subspace, local: Arc<SpaceModel>) -> Result<Self, GeometryError> {
        if local.dim() != carrier.dim || local.q() != space.q() || local.field() != space.field() {
            return Err(GeometryError::InvalidDimension(format!(
                "chart model PG({},{}) does not fit a {}-subspace over GF({})",
                local.dim(),
                local.q(),
                carrier.dim,
                space.q()
            )));
        }
        let pivots = super::linalg::pivots(&carrier.basis);
        let mut to_local = vec![u32::MAX; space.num_points()];
        let mut to_global = vec![usize::MAX; local.num_points()];
        for &x in &carrier.point_ids {
            let coords = space.point_coords(x);
            let c: Vec<_> = pivots.iter().map(|&col| coords[col]).collect();
            let lp = local.point_id(&c).expect("carrier point has nonzero pivot coordinates");
            to_local[x] = lp as u32;
            to_global[lp] = x;
        }
        Ok(Chart { carrier, local, to_local, to_global })
    }

    pub fn local(&self) -> &SpaceModel {
        &self.local
    }

    pub fn to_local_point(&self, p: PointId) -> Option<PointId> {
        match self.to_local[p] {
            u32::MAX => None,
            lp => Some(lp as PointId),
        }
    }

    pub fn to_global_point(&self, lp: PointId) -> PointId {
        self.to_global[lp]
    }

    pub fn to_local_line(&self, space: &SpaceModel, l: LineId) -> Option<LineId> {
        let pts = space.line_points(l);
        let a = self.to_local_point(pts[0])?;
        let b = self.to_local_point(pts[1])?;
        self.local.line_through(a, b)
    }

    pub fn to_global_line(&self, space: &SpaceModel, ll: LineId) -> LineId {
        let pts = self.local.line_points(ll);
        space
            .line_through(self.to_global[pts[0]], self.to_global[pts[1]])
            .expect("distinct carrier points span an ambient line")
    }
}

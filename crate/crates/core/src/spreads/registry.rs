//! Named spread constructions, selectable at runtime.

use std::sync::Arc;

use super::{geometric_spread, induced_spread, quotient_geometry, switch_regulus, Spread, SpreadError};
use crate::geometry::{build_space_over, Chart, LineId, SpaceModel};

pub trait SpreadConstruction: Send + Sync {
    fn name(&self) -> &'static str;

    fn description(&self) -> &'static str;

    fn build(&self, space: &SpaceModel, t: usize) -> Result<Spread, SpreadError>;
}

/// Segre's geometric spread via field reduction.
pub struct FieldReduction;

impl SpreadConstruction for FieldReduction {
    fn name(&self) -> &'static str {
        "field-reduction"
    }

    fn description(&self) -> &'static str {
        "geometric t-spread obtained from the points of PG(s, q^(t+1))"
    }

    fn build(&self, space: &SpaceModel, t: usize) -> Result<Spread, SpreadError> {
        geometric_spread(space, t)
    }
}

/// Field-reduction line spread with one regulus replaced by its opposite regulus.
///
/// In PG(3,q) the switch happens in the whole space, which makes the spread
/// non-regular for q > 2. In higher dimensions it happens inside the carrier of the
/// first large line, which breaks the geometric property.
pub struct RegulusSwitch;

impl SpreadConstruction for RegulusSwitch {
    fn name(&self) -> &'static str {
        "regulus-switch"
    }

    fn description(&self) -> &'static str {
        "field-reduction line spread with one regulus switched to its opposite"
    }

    fn build(&self, space: &SpaceModel, t: usize) -> Result<Spread, SpreadError> {
        if t != 1 {
            return Err(SpreadError::Divisibility { n1: space.dim() + 1, t1: t + 1 });
        }
        let base = geometric_spread(space, 1)?;
        if space.dim() == 3 {
            return switch_regulus(space, &base, 0, 1, 2);
        }
        let quotient = quotient_geometry(space, &base)?;
        let carrier = quotient.big_lines[0].carrier.clone();
        let local = Arc::new(build_space_over(3, space.field().clone(), u128::MAX)?);
        let chart = Chart::new(space, carrier.clone(), local)?;
        let induced = induced_spread(space, &base, &carrier)?;
        let local_lines: Vec<LineId> =
            induced.line_ids(space).iter().map(|&l| chart.to_local_line(space, l).expect("in carrier")).collect();
        let local_spread = Spread::from_lines(chart.local(), &local_lines)?;
        let switched = switch_regulus(chart.local(), &local_spread, 0, 1, 2)?;
        let replaced = induced.line_ids(space);
        let mut lines: Vec<LineId> = base.line_ids(space).into_iter().filter(|l| !replaced.contains(l)).collect();
        lines.extend(switched.line_ids(chart.local()).into_iter().map(|ll| chart.to_global_line(space, ll)));
        Spread::from_lines(space, &lines)
    }
}

pub struct SpreadRegistry {
    entries: Vec<Box<dyn SpreadConstruction>>,
}

impl SpreadRegistry {
    pub fn empty() -> Self {
        SpreadRegistry { entries: Vec::new() }
    }

    pub fn with_defaults() -> Self {
        let mut r = Self::empty();
        r.register(Box::new(FieldReduction));
        r.register(Box::new(RegulusSwitch));
        r
    }

    /// Adds a construction, replacing any previous one with the same name.
    pub fn register(&mut self, c: Box<dyn SpreadConstruction>) {
        self.entries.retain(|e| e.name() != c.name());
        self.entries.push(c);
    }

    pub fn get(&self, name: &str) -> Option<&dyn SpreadConstruction> {
        self.entries.iter().find(|e| e.name() == name).map(|b| b.as_ref())
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.iter().map(|e| e.name()).collect()
    }
}

impl Default for SpreadRegistry {
    fn default() -> Self {
        Self::with_defaults()
    }
}

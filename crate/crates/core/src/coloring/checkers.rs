//! Interchangeable completeness checkers, registered by name.

use super::{is_complete, Coloring, CompletenessReport, NO_WITNESS};
use crate::geometry::SpaceModel;

pub trait CompletenessChecker: Send + Sync {
    fn name(&self) -> &'static str;

    fn check(&self, space: &SpaceModel, col: &Coloring) -> CompletenessReport;
}

/// Per-point owner sets; O(points * r^2).
pub struct OwnerSweep;

impl CompletenessChecker for OwnerSweep {
    fn name(&self) -> &'static str {
        "owner-sweep"
    }

    fn check(&self, space: &SpaceModel, col: &Coloring) -> CompletenessReport {
        is_complete(space, col)
    }
}

/// Reference checker: for every color pair, test every pair of lines for a common point.
/// O(k^2 * L^2) in the worst case; intended for small spaces.
pub struct NaivePairwise;

impl CompletenessChecker for NaivePairwise {
    fn name(&self) -> &'static str {
        "naive-pairwise"
    }

    fn check(&self, space: &SpaceModel, col: &Coloring) -> CompletenessReport {
        let k = col.k();
        let classes = col.classes();
        let mut witness = vec![NO_WITNESS; k * k.saturating_sub(1) / 2];
        for b in 1..k {
            for a in 0..b {
                let mut best = NO_WITNESS;
                for &x in &classes[a] {
                    for &y in &classes[b] {
                        let common = if x == y {
                            None
                        } else {
                            space.line_points(x).iter().find(|p| space.line_points(y).contains(p)).copied()
                        };
                        if let Some(p) = common {
                            best = best.min(p as u32);
                        }
                    }
                }
                // a point on a line of color a and a line of color b; the sweep keeps the
                // smallest such point, and so does this loop
                witness[b * (b - 1) / 2 + a] = best;
            }
        }
        CompletenessReport::from_witnesses(k, witness)
    }
}

pub struct CheckerRegistry {
    entries: Vec<Box<dyn CompletenessChecker>>,
}

impl CheckerRegistry {
    pub fn with_defaults() -> Self {
        CheckerRegistry { entries: vec![Box::new(OwnerSweep), Box::new(NaivePairwise)] }
    }

    pub fn register(&mut self, c: Box<dyn CompletenessChecker>) {
        self.entries.retain(|e| e.name() != c.name());
        self.entries.push(c);
    }

    pub fn get(&self, name: &str) -> Option<&dyn CompletenessChecker> {
        self.entries.iter().find(|e| e.name() == name).map(|b| b.as_ref())
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.iter().map(|e| e.name()).collect()
    }
}

impl Default for CheckerRegistry {
    fn default() -> Self {
        Self::with_defaults()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::build_space;

    #[test]
    fn checkers_agree_on_small_colorings() {
        let space = build_space(3, 2).unwrap();
        let reg = CheckerRegistry::with_defaults();
        assert_eq!(reg.names(), vec!["owner-sweep", "naive-pairwise"]);
        for col in [Coloring::constant(&space), Coloring::discrete(&space)] {
            let a = reg.get("owner-sweep").unwrap().check(&space, &col);
            let b = reg.get("naive-pairwise").unwrap().check(&space, &col);
            assert_eq!(a, b);
        }
    }
}

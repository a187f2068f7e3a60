//! Exhaustive search for complete colorings of PG(3,2) with prescribed classes.
//!
//! A complete coloring with 19 classes has at least three singleton classes, since
//! otherwise it would need at least 36 lines. Singleton lines pairwise meet, so any three
//! of them form a pencil, a triangle, or three concurrent lines spanning the space. A
//! null polarity turns the last shape into a triangle and keeps completeness. Four or
//! more pairwise meeting lines always contain a triple that is not a pencil, because a
//! pencil of PG(3,2) has only three lines. Since collineations act transitively on
//! triangles and on pencils, it suffices to search two cases: three triangle sides as
//! singleton classes, and the three lines of a pencil as singleton classes.

use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::Mutex;

use rayon::prelude::*;

use super::{Frame32, Pg32Error};
use crate::geometry::{linalg, LineId, SpaceModel};
use crate::gf::Elem;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Refuted,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchResult {
    /// The remaining classes of a complete coloring, fixed classes excluded.
    Found(Vec<Vec<LineId>>),
    Exhausted,
    BudgetExhausted,
}

#[derive(Debug, Clone)]
pub struct CaseOutcome {
    pub name: &'static str,
    pub fixed: Vec<Vec<LineId>>,
    pub symmetries: usize,
    pub result: SearchResult,
    pub nodes: u64,
}

#[derive(Debug, Clone)]
pub struct ExcludeOutcome {
    pub verdict: Verdict,
    pub nodes: u64,
    pub cases: Vec<CaseOutcome>,
}

/// Line permutations induced by the collineations of PG(3,2) that map the set of
/// `fixed` classes onto itself. Found by running through all 4x4 matrices over GF(2).
pub fn stabilizer(space: &SpaceModel, fixed: &[Vec<LineId>]) -> Result<Vec<Vec<LineId>>, Pg32Error> {
    if space.dim() != 3 || space.q() != 2 {
        return Err(Pg32Error::FrameMismatch { n: space.dim(), q: space.q() });
    }
    let f = space.field();
    let mut target: Vec<u64> = fixed.iter().map(|c| line_set(c)).collect();
    target.sort_unstable();
    let mut out = Vec::new();
    for code in 0u32..1 << 16 {
        let rows: Vec<Vec<Elem>> = (0..4).map(|i| (0..4).map(|j| ((code >> (4 * i + j)) & 1) as Elem).collect()).collect();
        if linalg::rank(f, &rows) < 4 {
            continue;
        }
        let pmap: Vec<usize> = (0..space.num_points())
            .map(|p| space.point_id(&linalg::vec_mat(f, space.point_coords(p), &rows)).expect("invertible"))
            .collect();
        let lmap: Vec<LineId> = (0..space.num_lines())
            .map(|l| {
                let pts = space.line_points(l);
                space.line_through(pmap[pts[0]], pmap[pts[1]]).expect("distinct images")
            })
            .collect();
        let mut image: Vec<u64> = fixed.iter().map(|c| line_set(&c.iter().map(|&l| lmap[l]).collect::<Vec<_>>())).collect();
        image.sort_unstable();
        if image == target {
            out.push(lmap);
        }
    }
    Ok(out)
}

fn line_set(lines: &[LineId]) -> u64 {
    lines.iter().fold(0, |m, &l| m | 1 << l)
}

fn map_set(set: u64, perm: &[LineId]) -> u64 {
    let mut out = 0;
    let mut s = set;
    while s != 0 {
        let l = s.trailing_zeros() as usize;
        out |= 1 << perm[l];
        s &= s - 1;
    }
    out
}

const FLUSH: u64 = 1 << 12;

struct Shared {
    budget: u64,
    nodes: AtomicU64,
    stop: AtomicBool,
    found: Mutex<Option<Vec<u64>>>,
}

impl Shared {
    /// Adds `n` nodes; false once the budget is gone or another branch has finished.
    fn charge(&self, n: u64) -> bool {
        let total = self.nodes.fetch_add(n, Ordering::Relaxed) + n;
        if total > self.budget {
            self.stop.store(true, Ordering::Relaxed);
        }
        !self.stop.load(Ordering::Relaxed)
    }
}

struct Worker<'a> {
    line_mask: &'a [u64],
    meet: &'a [u64],
    shared: &'a Shared,
    required: Vec<u64>,
    chosen: Vec<u64>,
    pending: u64,
    aborted: bool,
}

impl Worker<'_> {
    fn tick(&mut self) -> bool {
        self.pending += 1;
        if self.pending == FLUSH {
            let n = std::mem::take(&mut self.pending);
            if !self.shared.charge(n) {
                self.aborted = true;
            }
        }
        !self.aborted
    }

    fn finish(&mut self) {
        let n = std::mem::take(&mut self.pending);
        self.shared.charge(n);
    }

    fn hits_all(&self, mask: u64) -> bool {
        self.required.iter().all(|&r| r & mask != 0)
    }

    fn deficiency(&self, l: usize) -> usize {
        self.required.iter().filter(|&&r| r & self.line_mask[l] == 0).count()
    }

    /// Largest class size still compatible with the counts, or `None` if the node is dead.
    ///
    /// A line hitting every required mask is self-sufficient. Singleton classes are
    /// self-sufficient lines that pairwise meet, so there are at most `w` of them, the
    /// largest such family. Other classes with a self-sufficient line have two lines or
    /// more. Classes without one need at least `m` lines, where `m` is 3 when no two
    /// remaining lines cover every required mask and 2 otherwise.
    fn size_cap(&self, remaining: u64, classes: usize) -> Option<usize> {
        let r = remaining.count_ones() as usize;
        if r < classes {
            return None;
        }
        let hitting: Vec<u64> = self
            .required
            .iter()
            .map(|&req| bits(remaining).into_iter().filter(|&l| self.line_mask[l] & req != 0).fold(0, |m, l| m | 1 << l))
            .collect();
        let full = hitting.iter().fold(remaining, |m, &h| m & h);
        let f = full.count_ones() as usize;
        let partial = remaining & !full;
        let pairable = bits(partial).into_iter().any(|x| {
            let partners = hitting.iter().filter(|&&h| h & 1 << x == 0).fold(partial, |m, &h| m & h);
            partners & !(1 << x) != 0
        });
        let m = if pairable { 2 } else { 3 };
        let w = max_clique(full, self.meet);
        let need = |c: usize| {
            let single = c.min(w);
            let double = (c - single).min(f - single);
            single + 2 * double + (c - single - double) * m
        };
        if need(classes) > r {
            return None;
        }
        Some(r - need(classes - 1))
    }

    fn pivot(&self, remaining: u64) -> usize {
        let mut best = (0, usize::MAX);
        let mut s = remaining;
        while s != 0 {
            let l = s.trailing_zeros() as usize;
            let d = self.deficiency(l);
            if best.1 == usize::MAX || d > best.0 {
                best = (d, l);
            }
            s &= s - 1;
        }
        best.1
    }

    /// All classes containing `pivot`: pairs of (line set, point mask) within `cap` lines.
    fn candidate_classes(&self, remaining: u64, pivot: usize, cap: usize) -> Vec<(u64, u64)> {
        let mut out = Vec::new();
        let others: Vec<usize> = bits(remaining & !(1 << pivot));
        self.extend(&others, 0, 1 << pivot, self.line_mask[pivot], 1, cap, &mut out);
        out
    }

    #[allow(clippy::too_many_arguments)]
    fn extend(&self, others: &[usize], from: usize, set: u64, mask: u64, size: usize, cap: usize, out: &mut Vec<(u64, u64)>) {
        if self.hits_all(mask) {
            out.push((set, mask));
        }
        if size == cap {
            return;
        }
        for (i, &l) in others.iter().enumerate().skip(from) {
            self.extend(others, i + 1, set | 1 << l, mask | self.line_mask[l], size + 1, cap, out);
        }
    }

    fn dfs(&mut self, remaining: u64, classes: usize) -> bool {
        if !self.tick() {
            return false;
        }
        if classes == 0 {
            return remaining == 0;
        }
        let cap = match self.size_cap(remaining, classes) {
            Some(c) => c,
            None => return false,
        };
        let pivot = self.pivot(remaining);
        for (set, mask) in self.candidate_classes(remaining, pivot, cap) {
            self.required.push(mask);
            self.chosen.push(set);
            if self.dfs(remaining & !set, classes - 1) {
                return true;
            }
            self.required.pop();
            self.chosen.pop();
            if self.aborted {
                return false;
            }
        }
        false
    }
}

/// Size of the largest subset of `cand` whose lines pairwise meet.
fn max_clique(cand: u64, meet: &[u64]) -> usize {
    if cand == 0 {
        return 0;
    }
    let v = cand.trailing_zeros() as usize;
    let with = 1 + max_clique(cand & meet[v], meet);
    let rest = cand & !(1 << v);
    if rest.count_ones() as usize <= with {
        return with;
    }
    with.max(max_clique(rest, meet))
}

fn bits(mut s: u64) -> Vec<usize> {
    let mut out = Vec::with_capacity(s.count_ones() as usize);
    while s != 0 {
        out.push(s.trailing_zeros() as usize);
        s &= s - 1;
    }
    out
}

/// Looks for a complete coloring with `k` classes in which every class of `fixed` is a
/// color class. The fixed classes must pairwise meet. `symmetries` are line permutations
/// preserving the fixed classes; they prune equivalent choices of the first class.
///
/// Returns the result and the number of search nodes visited.
pub fn search_complete(
    space: &SpaceModel,
    k: usize,
    fixed: &[Vec<LineId>],
    symmetries: &[Vec<LineId>],
    budget: u64,
) -> (SearchResult, u64) {
    assert!(space.num_lines() <= 64 && space.num_points() <= 64, "search works on spaces with at most 64 lines");
    let line_mask: Vec<u64> =
        (0..space.num_lines()).map(|l| space.line_points(l).iter().fold(0, |m, &p| m | 1 << p)).collect();
    let meet: Vec<u64> = (0..space.num_lines())
        .map(|a| (0..space.num_lines()).filter(|&b| b != a && line_mask[a] & line_mask[b] != 0).fold(0, |m, b| m | 1 << b))
        .collect();
    let fixed_masks: Vec<u64> = fixed.iter().map(|c| c.iter().fold(0, |m, &l| m | line_mask[l])).collect();
    let used = fixed.iter().fold(0u64, |m, c| m | line_set(c));
    let all = if space.num_lines() == 64 { u64::MAX } else { (1u64 << space.num_lines()) - 1 };
    let remaining = all & !used;
    let meets = fixed_masks.iter().enumerate().all(|(i, a)| fixed_masks[i + 1..].iter().all(|b| a & b != 0));
    if !meets || k < fixed.len() {
        return (SearchResult::Exhausted, 0);
    }
    let shared = Shared { budget, nodes: AtomicU64::new(0), stop: AtomicBool::new(false), found: Mutex::new(None) };
    let classes = k - fixed.len();
    let mut root = Worker { line_mask: &line_mask, meet: &meet, shared: &shared, required: fixed_masks.clone(), chosen: Vec::new(), pending: 0, aborted: false };
    root.tick();
    root.finish();
    if !shared.charge(0) {
        return (SearchResult::BudgetExhausted, shared.nodes.load(Ordering::Relaxed));
    }
    if classes == 0 {
        let r = if remaining == 0 { SearchResult::Found(Vec::new()) } else { SearchResult::Exhausted };
        return (r, 1);
    }
    let cap = match root.size_cap(remaining, classes) {
        Some(c) => c,
        None => return (SearchResult::Exhausted, 1),
    };
    let pivot = root.pivot(remaining);
    let fixing: Vec<&Vec<LineId>> = symmetries.iter().filter(|g| g[pivot] == pivot).collect();
    let firsts: Vec<(u64, u64)> = root
        .candidate_classes(remaining, pivot, cap)
        .into_iter()
        .filter(|&(set, _)| fixing.iter().all(|g| map_set(set, g) >= set))
        .collect();
    firsts.par_iter().for_each(|&(set, mask)| {
        if shared.stop.load(Ordering::Relaxed) {
            return;
        }
        let mut w = Worker {
            line_mask: &line_mask,
            meet: &meet,
            shared: &shared,
            required: fixed_masks.iter().copied().chain([mask]).collect(),
            chosen: vec![set],
            pending: 0,
            aborted: false,
        };
        let hit = w.dfs(remaining & !set, classes - 1);
        w.finish();
        if hit {
            let mut slot = shared.found.lock().expect("no panics while holding the lock");
            if slot.is_none() {
                *slot = Some(w.chosen.clone());
            }
            shared.stop.store(true, Ordering::Relaxed);
        }
    });
    let nodes = shared.nodes.load(Ordering::Relaxed);
    if let Some(sets) = shared.found.into_inner().expect("lock not poisoned") {
        return (SearchResult::Found(sets.into_iter().map(bits).collect()), nodes);
    }
    if nodes > budget {
        (SearchResult::BudgetExhausted, nodes)
    } else {
        (SearchResult::Exhausted, nodes)
    }
}

/// The two singleton configurations every complete 19-coloring can be brought to.
pub fn singleton_cases(space: &SpaceModel) -> Result<Vec<(&'static str, Vec<Vec<LineId>>)>, Pg32Error> {
    let frame = Frame32::new(space)?;
    let line = |a, b| frame.line(space, a, b);
    Ok(vec![
        ("triangle", vec![vec![line("A", "B")?], vec![line("B", "C")?], vec![line("C", "A")?]]),
        ("pencil", vec![vec![line("A", "B")?], vec![line("A", "C")?], vec![line("A", "A'")?]]),
    ])
}

/// Searches both singleton cases for a complete coloring with 19 classes. `Refuted`
/// means both searches ran to the end without finding one. The budget is shared.
pub fn exclude_19(space: &SpaceModel, budget: u64) -> Result<ExcludeOutcome, Pg32Error> {
    let mut cases = Vec::new();
    let mut spent = 0u64;
    let mut verdict = Verdict::Refuted;
    for (name, fixed) in singleton_cases(space)? {
        let symmetries = stabilizer(space, &fixed)?;
        let (result, nodes) = search_complete(space, 19, &fixed, &symmetries, budget.saturating_sub(spent));
        spent += nodes;
        if result != SearchResult::Exhausted {
            verdict = Verdict::Inconclusive;
        }
        let stop = matches!(result, SearchResult::BudgetExhausted);
        cases.push(CaseOutcome { name, fixed, symmetries: symmetries.len(), result, nodes });
        if stop {
            break;
        }
    }
    Ok(ExcludeOutcome { verdict, nodes: spent, cases })
}

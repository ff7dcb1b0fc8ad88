//! Smallest up-sets hitting every obstruction clause.
//!
//! Every search in this module has the same shape: find the smallest up-set
//! `M` of `[4]^4` (a "missing set") that contains at least one cell of every
//! clause in a list while avoiding a fixed set of protected cells. Presence
//! conditions for trace variables enter through the protected set (their
//! closure cells may not go missing) and through their residual matching
//! clauses (each needs a missing cell once the trace is present).
//!
//! The optimum is always attained by a union of principal up-closures of
//! clause cells: given any feasible `M`, keep one witness cell per clause and
//! take the union of their closures — the result is a feasible subset of `M`.
//! The branch-and-bound below therefore only branches on clause cells, and
//! its case split at an unhit clause — "this cell goes missing, all earlier
//! ones stay present" — partitions the remaining search space exactly.

use std::collections::BTreeSet;

use crate::clauses::{self, Clause};
use crate::lattice::{self, CellSet, Point, SupportedTrace};

/// A minimum missing-set problem over `[4]^4`.
#[derive(Clone, Debug)]
pub struct HittingInstance {
    pub label: String,
    /// Cells that must stay present. A cell whose up-closure touches this
    /// set can never go missing, because missing sets are up-closed.
    pub protected: CellSet,
    /// Deduplicated clauses in canonical order; each needs a missing cell.
    pub clauses: Vec<Clause>,
}

impl HittingInstance {
    /// The shared core of every search: all upper 3-matching clauses must be
    /// hit, while the four cells `(3,1,1,1)`, `(1,3,1,1)`, `(1,1,3,1)`,
    /// `(1,1,1,3)` stay present.
    pub fn base() -> Self {
        let mut protected = CellSet::empty(4);
        for axis in 0..4 {
            let mut coords = [1u8; 4];
            coords[axis] = 3;
            protected.insert(&Point::new(4, &coords));
        }
        HittingInstance {
            label: "base".to_string(),
            protected,
            clauses: clauses::upper_matching_clauses().clone(),
        }
    }

    /// The instance whose optimum is the cost of keeping `trace` present:
    /// its closure cells are protected and its residual matchings join the
    /// clause list.
    pub fn for_trace(trace: &SupportedTrace) -> Self {
        Self::for_pattern(&trace.label(), std::slice::from_ref(trace))
    }

    /// Like [`HittingInstance::for_trace`] for several traces at once.
    pub fn for_pattern(label: &str, traces: &[SupportedTrace]) -> Self {
        let mut inst = Self::base();
        inst.label = label.to_string();
        for trace in traces {
            inst.protected.union_in_place(&trace.extension_cells());
            inst.add_clauses(clauses::residual_seed_clauses(trace));
        }
        inst
    }

    /// Protect one more cell. Used for forcing arguments: if the tightened
    /// instance is infeasible below some size, every small enough missing set
    /// must contain the cell (and hence its whole up-closure).
    pub fn with_protected(mut self, cell: &Point) -> Self {
        self.label = format!("{}|keep:{}", self.label, cell.index());
        self.protected.insert(cell);
        self
    }

    /// Restrict the search to the inner cube `{1,2,3}^4`: every cell with a
    /// zero coordinate is protected, and clauses that leave the cube are
    /// dropped. Small enough for exhaustive cross-checking.
    pub fn restricted_to_upper(mut self) -> Self {
        let mut outside = CellSet::empty(4);
        for idx in 0..lattice::cell_count(4) {
            let p = Point::from_index(4, idx);
            if p.coords.iter().any(|&c| c == 0) {
                outside.insert_index(idx);
            }
        }
        self.clauses
            .retain(|cl| cl.iter().all(|&c| !outside.contains_index(c)));
        self.protected.union_in_place(&outside);
        self.label = format!("{}|upper", self.label);
        self
    }

    fn add_clauses(&mut self, extra: Vec<Clause>) {
        let mut merged: BTreeSet<Clause> = self.clauses.iter().copied().collect();
        merged.extend(extra);
        self.clauses = merged.into_iter().collect();
    }
}

/// Check a proposed missing set against an instance, independently of how it
/// was found.
pub fn verify_missing_set(inst: &HittingInstance, missing: &CellSet) -> bool {
    missing.is_up_set()
        && !missing.intersects(&inst.protected)
        && inst
            .clauses
            .iter()
            .all(|cl| cl.iter().any(|&c| missing.contains_index(c)))
}

/// Outcome of a bounded minimum search.
#[derive(Clone, Debug)]
pub struct SearchOutcome {
    /// Smallest feasible size strictly below the cap, with a witness.
    /// `None` means no missing set of size `< cap` exists.
    pub best: Option<(u32, CellSet)>,
    /// Search-tree nodes visited.
    pub nodes: u64,
}

/// Exact bounded minimisation: the smallest missing set of size `< cap`
/// satisfying the instance, or `None` if there is none. The witness returned
/// alongside the size always passes [`verify_missing_set`].
pub fn min_missing(inst: &HittingInstance, cap: u32) -> SearchOutcome {
    let mut search = Search {
        clauses: &inst.clauses,
        up: lattice::up_closure_table(),
        best_size: cap,
        best_set: None,
        nodes: 0,
    };
    search.dive(&CellSet::empty(4), &inst.protected);
    let outcome = SearchOutcome {
        best: search.best_set.map(|w| (search.best_size, w)),
        nodes: search.nodes,
    };
    if let Some((size, witness)) = &outcome.best {
        assert!(verify_missing_set(inst, witness), "witness failed recheck");
        assert_eq!(*size, witness.len());
    }
    outcome
}

struct Search<'a> {
    clauses: &'a [Clause],
    up: &'a [CellSet],
    /// Exclusive upper bound; shrinks as better solutions appear.
    best_size: u32,
    best_set: Option<CellSet>,
    nodes: u64,
}

impl Search<'_> {
    fn dive(&mut self, missing: &CellSet, protected: &CellSet) {
        self.nodes += 1;
        // Pick the unhit clause with the fewest cells that can still go
        // missing; zero such cells ends the branch at once.
        let mut pick: Option<Vec<usize>> = None;
        for cl in self.clauses {
            if cl.iter().any(|&c| missing.contains_index(c)) {
                continue;
            }
            let usable: Vec<usize> = cl
                .iter()
                .copied()
                .filter(|&c| !self.up[c].intersects(protected))
                .collect();
            let better = pick.as_ref().map_or(true, |u| usable.len() < u.len());
            if better {
                let exhausted = usable.is_empty();
                pick = Some(usable);
                if exhausted {
                    break;
                }
            }
        }
        let Some(usable) = pick else {
            // Every clause already hit.
            let size = missing.len();
            if size < self.best_size {
                self.best_size = size;
                self.best_set = Some(missing.clone());
            }
            return;
        };
        if usable.is_empty() || self.lower_bound(missing, protected) >= self.best_size {
            return;
        }
        // Cheapest closures first; branch k rules the first k-1 cells out,
        // so the subtrees are disjoint and jointly exhaustive.
        let mut order: Vec<(u32, usize)> = usable
            .iter()
            .map(|&c| (self.up[c].difference(missing).len(), c))
            .collect();
        order.sort_unstable();
        let mut ruled_out = protected.clone();
        for (k, &(_, cell)) in order.iter().enumerate() {
            if k > 0 {
                ruled_out.insert_index(order[k - 1].1);
            }
            if self.up[cell].intersects(&ruled_out) {
                continue;
            }
            let grown = missing.union(&self.up[cell]);
            if grown.len() >= self.best_size {
                continue;
            }
            self.dive(&grown, &ruled_out);
        }
    }

    /// Additive bound from clauses whose candidate growth regions are
    /// pairwise disjoint: each such clause needs at least its cheapest
    /// closure's worth of new missing cells.
    fn lower_bound(&self, missing: &CellSet, protected: &CellSet) -> u32 {
        let mut bound = missing.len();
        let mut claimed = missing.clone();
        for cl in self.clauses {
            if cl.iter().any(|&c| missing.contains_index(c)) {
                continue;
            }
            let mut cheapest = u32::MAX;
            let mut region = CellSet::empty(4);
            for &c in cl {
                if self.up[c].intersects(protected) {
                    continue;
                }
                let extra = self.up[c].difference(missing);
                cheapest = cheapest.min(extra.len());
                region.union_in_place(&extra);
            }
            if cheapest == u32::MAX {
                return u32::MAX;
            }
            if !region.intersects(&claimed) {
                bound += cheapest;
                claimed.union_in_place(&region);
            }
        }
        bound
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::TraceKind;

    #[test]
    fn base_instance_shape() {
        let base = HittingInstance::base();
        assert_eq!(base.clauses.len(), 216);
        assert_eq!(base.protected.len(), 4);
        assert!(base.protected.contains(&Point::new(4, &[3, 1, 1, 1])));
        assert!(base.protected.contains(&Point::new(4, &[1, 1, 1, 3])));
    }

    #[test]
    fn verifier_catches_each_defect() {
        let base = HittingInstance::base();
        // The whole inner cube minus nothing: hits everything but touches the
        // protected cells.
        let mut cube = CellSet::empty(4);
        for idx in 0..lattice::cell_count(4) {
            if Point::from_index(4, idx).coords.iter().all(|&c| c >= 1) {
                cube.insert_index(idx);
            }
        }
        assert!(cube.is_up_set());
        assert!(!verify_missing_set(&base, &cube));
        // Empty set: up-closed and clean, but hits nothing.
        assert!(!verify_missing_set(&base, &CellSet::empty(4)));
        // A non-up-set is rejected even if it hits everything.
        let mut chopped = cube.clone();
        chopped.remove_index(Point::new(4, &[3, 3, 3, 3]).index());
        assert!(!chopped.is_up_set());
        assert!(!verify_missing_set(&base, &chopped));
    }

    #[test]
    fn trace_instance_merges_residual_clauses() {
        let trace = SupportedTrace::new(&[0, 1], &[0, 0]);
        let inst = HittingInstance::for_trace(&trace);
        assert_eq!(inst.protected.len(), 4 + 16);
        let residual = clauses::residual_seed_clauses(&trace);
        assert!(!residual.is_empty());
        for cl in &residual {
            assert!(inst.clauses.binary_search(cl).is_ok());
        }
        assert!(inst.clauses.len() <= 216 + residual.len());
        assert!(inst.clauses.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn saturated_trace_value_is_infeasible_at_once() {
        // The closure cells of the all-threes pair value meet every
        // up-closure, so nothing can go missing and no clause is coverable.
        let trace = SupportedTrace::new(&[0, 1], &[3, 3]);
        assert_eq!(trace.kind, TraceKind::Pair);
        let outcome = min_missing(&HittingInstance::for_trace(&trace), 64);
        assert!(outcome.best.is_none());
        assert_eq!(outcome.nodes, 1);
    }

    #[test]
    fn tiny_synthetic_instance_is_solved_exactly() {
        // One clause of three incomparable cells; cheapest closure wins.
        let cells = [
            Point::new(4, &[3, 3, 3, 0]).index(),
            Point::new(4, &[3, 3, 0, 3]).index(),
            Point::new(4, &[2, 3, 3, 3]).index(),
        ];
        let mut clause = cells;
        clause.sort_unstable();
        let inst = HittingInstance {
            label: "synthetic".to_string(),
            protected: CellSet::empty(4),
            clauses: vec![clause],
        };
        let outcome = min_missing(&inst, 64);
        let (size, witness) = outcome.best.expect("feasible");
        // All three closures have size 4 and 2 respectively: the (2,3,3,3)
        // closure needs only cells (2..3,3,3,3).
        assert_eq!(size, 2);
        assert!(witness.contains(&Point::new(4, &[2, 3, 3, 3])));
        assert!(verify_missing_set(&inst, &witness));
    }
}

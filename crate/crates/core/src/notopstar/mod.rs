//! The no-top-star side of the case split: exact minimum missing-set sizes
//! for trace presence, the inner-cube floor, critical-pattern forcing, and
//! the closing size-table arithmetic.
//!
//! The flow: [`upper_blocker_minimum`] pins the smallest possible missing
//! set at 33 cells, [`trace_thresholds`] prices every trace value class, and
//! [`combine_thresholds`] turns those prices into the 33..=63 size table.
//! Above 63, [`critical_pattern_checks`] shows the only shapes that could
//! still pay force a full rectangle missing, [`rectangle_extension_audit`]
//! bounds every minimal way that can happen, and a two-line weight count
//! closes sizes 67 and up. [`assemble_no_topstar`] runs the lot and
//! hard-checks each piece.

pub mod blocker;
pub mod hitting;
pub mod orbits;
pub mod patterns;

use std::collections::BTreeMap;

use serde_json::{json, Value};

use crate::ferrers;
use crate::lattice::TraceKind;

pub use blocker::{exhaustive_upper_minimum, upper_blocker_minimum, BlockerReport};
pub use hitting::{min_missing, verify_missing_set, HittingInstance, SearchOutcome};
pub use orbits::{
    combine_thresholds, min_missing_for_trace, reference_row, trace_orbits, trace_thresholds,
    OrbitThreshold, ThresholdRow, ThresholdTable, TraceOrbit, ORBIT_CAP,
};
pub use patterns::{
    critical_pattern_checks, rectangle_extension_audit, PatternCheck, RectangleAudit,
};

/// Everything the no-top-star argument needs, rechecked.
pub struct NoTopstarReport {
    pub blocker: BlockerReport,
    pub thresholds: Vec<OrbitThreshold>,
    pub table: ThresholdTable,
    pub patterns: Vec<PatternCheck>,
    pub rectangles: RectangleAudit,
    /// Largest legal pair shape that is not the value square.
    pub pair_max_off_square: u32,
    /// Largest legal triple shape that is neither a slab nor the staircase.
    pub triple_max_off_extremal: u32,
}

/// Masks of the extremal shapes as value sets, for comparison against the
/// legal shape lists.
fn square_mask() -> u64 {
    let mut mask = 0u64;
    for a in 0..2 {
        for b in 0..2 {
            mask |= 1 << (a + 4 * b);
        }
    }
    mask
}

fn slab_mask(axis: usize) -> u64 {
    let mut mask = 0u64;
    for code in 0..64usize {
        if code >> (2 * axis) & 3 <= 1 {
            mask |= 1 << code;
        }
    }
    mask
}

fn staircase_mask() -> u64 {
    let heights = [[4u8, 4, 2, 2], [4, 4, 2, 2], [2, 2, 0, 0], [2, 2, 0, 0]];
    let mut mask = 0u64;
    for a in 0..4usize {
        for b in 0..4usize {
            for c in 0..heights[a][b] as usize {
                mask |= 1 << (a + 4 * b + 16 * c);
            }
        }
    }
    mask
}

/// Largest *affordable* legal shape sizes at 66 missing cells once the four
/// named extremal masks are excluded, plus the checks that make the size
/// 64..=66 case analysis exhaustive: every affordable maximum-size shape is
/// one of the extremals, so a support either carries an extremal pattern
/// (handled by the forcing and infeasibility checks) or contributes at most
/// the off-extremal maximum.
fn off_extremal_maxima(thresholds: &[OrbitThreshold]) -> (u32, u32) {
    let shapes = ferrers::legal_shapes();
    // Legality peaks over all shapes, ignoring affordability.
    assert_eq!(shapes.pair[0].1, 4);
    assert_eq!(shapes.triple[0].1, 32);
    let triple_extremal: Vec<u64> = (0..3)
        .map(slab_mask)
        .chain(std::iter::once(staircase_mask()))
        .collect();
    {
        let mut peak: Vec<u64> = shapes
            .triple
            .iter()
            .filter(|&&(_, size)| size == 32)
            .map(|&(mask, _)| mask)
            .collect();
        peak.sort_unstable();
        let mut want = triple_extremal.clone();
        want.sort_unstable();
        assert_eq!(peak, want, "maximum triple shapes must be the four extremals");
    }

    let usable_pair = orbits::usable_values(thresholds, TraceKind::Pair, 66);
    let usable_triple = orbits::usable_values(thresholds, TraceKind::Triple, 66);

    // The full-row and full-column pair shapes also have four cells, but
    // their values are priced out; the square must be the only affordable
    // four-cell pair shape.
    let pair_peak: Vec<u64> = shapes
        .pair
        .iter()
        .filter(|&&(mask, size)| size == 4 && mask & !usable_pair == 0)
        .map(|&(mask, _)| mask)
        .collect();
    assert_eq!(pair_peak, vec![square_mask()]);
    let pair_off = shapes
        .pair
        .iter()
        .filter(|&&(mask, _)| mask != square_mask() && mask & !usable_pair == 0)
        .map(|&(_, size)| size)
        .max()
        .expect("affordable non-square pair shapes exist");

    let triple_off = shapes
        .triple
        .iter()
        .filter(|&&(mask, _)| !triple_extremal.contains(&mask) && mask & !usable_triple == 0)
        .map(|&(_, size)| size)
        .max()
        .expect("affordable non-extremal triple shapes exist");
    (pair_off, triple_off)
}

/// Run the complete no-top-star argument and hard-check every piece. The
/// returned report only exists if all checks passed.
pub fn assemble_no_topstar() -> NoTopstarReport {
    let blocker = upper_blocker_minimum();
    assert_eq!(blocker.max_present, 48);
    assert_eq!(blocker.min_blocker, 33);

    let thresholds = trace_thresholds();
    let table = combine_thresholds(&thresholds);
    assert_eq!(table.rows.len(), 31);
    assert_eq!(
        table.rows[0].missing, blocker.min_blocker,
        "the table must start at the proven floor"
    );
    assert_eq!(table.tight, vec![48]);

    let checks = critical_pattern_checks();
    assert_eq!(checks.len(), 9);
    for check in &checks {
        assert!(check.ok(), "pattern check {} failed", check.name);
    }

    let rectangles = rectangle_extension_audit();
    assert_eq!(rectangles.cases.len(), 72);
    assert!(rectangles.worst_margin < 0);
    assert_eq!(rectangles.worst_margin, -10624);

    // Sizes 64..=66 without an extremal shape: per support the shapes top
    // out below the extremal maxima, and the weighted total already fits the
    // smallest budget in the range.
    let (pair_off, triple_off) = off_extremal_maxima(&thresholds);
    assert_eq!(pair_off, 3);
    assert_eq!(triple_off, 31);
    assert!(300 * 4 * triple_off as u64 + 144 * 6 * pair_off as u64 <= 625 * 64);

    // Sizes 67 and up: even unconstrained maximal shapes everywhere stay
    // under the budget.
    let shapes = ferrers::legal_shapes();
    let unconstrained = 300 * 4 * shapes.triple[0].1 as u64 + 144 * 6 * shapes.pair[0].1 as u64;
    assert!(unconstrained < 625 * 67);

    NoTopstarReport {
        blocker,
        thresholds,
        table,
        patterns: checks,
        rectangles,
        pair_max_off_square: pair_off,
        triple_max_off_extremal: triple_off,
    }
}

impl NoTopstarReport {
    /// Marker values for machine-readable summaries.
    pub fn markers(&self) -> BTreeMap<String, Value> {
        let mut m = BTreeMap::new();
        m.insert(
            "trace_threshold_checks".to_string(),
            json!(self.thresholds.len()),
        );
        m.insert(
            "critical_pattern_checks".to_string(),
            json!(self.patterns.len()),
        );
        m.insert(
            "rectangle_cases".to_string(),
            json!(self.rectangles.cases.len()),
        );
        m.insert(
            "exact_no_topstar_threshold_certificate_ok".to_string(),
            json!(true),
        );
        m.insert(
            "exact_upper_blocker_branch_bound_ok".to_string(),
            json!(self.blocker.min_blocker == 33),
        );
        m.insert(
            "threshold_table_matches_reference".to_string(),
            json!(self.table.reference_mismatches.is_empty()),
        );
        m
    }

    /// Orbit minima in a stable, printable form.
    pub fn threshold_summary(&self) -> Vec<(String, Option<u32>)> {
        self.thresholds
            .iter()
            .map(|t| (t.orbit.rep.label(), t.minimum))
            .collect()
    }
}

/// The trace kinds in the order their thresholds are listed.
pub fn threshold_kinds() -> [TraceKind; 2] {
    [TraceKind::Pair, TraceKind::Triple]
}

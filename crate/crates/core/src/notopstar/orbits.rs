//! Symmetry classes of trace values and the per-size usability table.
//!
//! Coordinate permutations act on everything a hitting instance is built
//! from — the protected core cells, the upper matching clauses, closure
//! cells, residual matchings — so two traces related by one have the same
//! minimum missing-set size. Sorting a value tuple and moving it to the
//! lexicographically first support canonicalises each class; that leaves 10
//! pair classes and 20 triple classes to actually search.

use std::collections::BTreeMap;

use crate::ferrers;
use crate::lattice::{CellSet, SupportedTrace, TraceKind};

use super::hitting::{self, HittingInstance, SearchOutcome};

/// Exclusive search cap for the class minima. Table rows stop at 63, but the
/// off-extremal shape maxima need to know which values are still affordable
/// with up to 66 cells missing, so searches run to 67: a reported `None`
/// means no missing set of size at most 66 admits the value.
pub const ORBIT_CAP: u32 = 67;

/// One symmetry class of trace values.
#[derive(Clone, Debug)]
pub struct TraceOrbit {
    pub kind: TraceKind,
    /// Class representative on the first support, value sorted ascending.
    pub rep: SupportedTrace,
    /// Every value tuple on a fixed support that belongs to this class.
    pub member_values: Vec<Vec<u8>>,
}

/// The classes of one kind, in lexicographic order of sorted value tuples.
/// Panics if canonicalisation does not produce the expected class count —
/// the downstream table aggregation depends on it.
pub fn trace_orbits(kind: TraceKind) -> Vec<TraceOrbit> {
    let arity = kind.arity();
    let support: Vec<u8> = (0..arity as u8).collect();
    let mut classes: BTreeMap<Vec<u8>, Vec<Vec<u8>>> = BTreeMap::new();
    for code in 0..1usize << (2 * arity) {
        let value: Vec<u8> = (0..arity).map(|i| (code >> (2 * i) & 3) as u8).collect();
        let mut key = value.clone();
        key.sort_unstable();
        classes.entry(key).or_default().push(value);
    }
    let expected = match kind {
        TraceKind::Pair => 10,
        TraceKind::Triple => 20,
    };
    assert_eq!(
        classes.len(),
        expected,
        "value canonicalisation must yield {} classes",
        expected
    );
    classes
        .into_iter()
        .map(|(rep_value, member_values)| TraceOrbit {
            kind,
            rep: SupportedTrace::new(&support, &rep_value),
            member_values,
        })
        .collect()
}

/// Minimum missing-set size for keeping one trace present, capped.
pub fn min_missing_for_trace(trace: &SupportedTrace, cap: u32) -> SearchOutcome {
    hitting::min_missing(&HittingInstance::for_trace(trace), cap)
}

/// A searched class: its minimum below [`ORBIT_CAP`], if any, plus stats.
#[derive(Clone, Debug)]
pub struct OrbitThreshold {
    pub orbit: TraceOrbit,
    /// `None` means every compatible missing set has at least [`ORBIT_CAP`]
    /// cells (possibly none exists at all).
    pub minimum: Option<u32>,
    pub witness: Option<CellSet>,
    pub nodes: u64,
}

/// Search all 30 classes (10 pair, then 20 triple).
pub fn trace_thresholds() -> Vec<OrbitThreshold> {
    let mut out = Vec::new();
    for kind in [TraceKind::Pair, TraceKind::Triple] {
        for orbit in trace_orbits(kind) {
            let outcome = min_missing_for_trace(&orbit.rep, ORBIT_CAP);
            let (minimum, witness) = match outcome.best {
                Some((size, w)) => (Some(size), Some(w)),
                None => (None, None),
            };
            out.push(OrbitThreshold {
                orbit,
                minimum,
                witness,
                nodes: outcome.nodes,
            });
        }
    }
    assert_eq!(out.len(), 30);
    out
}

/// One row of the size table: with `missing` cells gone, the largest legal
/// shape sizes whose values are all still affordable.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ThresholdRow {
    pub missing: u32,
    pub pair_max: u32,
    pub triple_max: u32,
}

#[derive(Clone, Debug)]
pub struct ThresholdTable {
    pub rows: Vec<ThresholdRow>,
    /// Rows where the weighted budget is met with equality.
    pub tight: Vec<u32>,
    /// Rows whose recomputed maxima differ from the frozen reference table.
    /// The recomputed values are the binding ones — every class minimum is
    /// certified by an explicit feasible witness on one side and by the
    /// exhaustive search (cross-checked against fractional dual bounds) on
    /// the other — so a nonempty list here means the reference row is looser
    /// than the truth, not that the computation failed.
    pub reference_mismatches: Vec<u32>,
}

/// The reference table, frozen as an independent cross-check.
pub fn reference_row(missing: u32) -> ThresholdRow {
    let (pair_max, triple_max) = match missing {
        33 => (0, 0),
        34..=35 => (0, 1),
        36..=41 => (0, 4),
        42..=47 => (0, 7),
        48..=49 => (0, 25),
        50..=55 => (0, 26),
        56..=59 => (0, 29),
        60..=63 => (1, 29),
        _ => panic!("no table row for {} missing cells", missing),
    };
    ThresholdRow {
        missing,
        pair_max,
        triple_max,
    }
}

fn threshold_lookup(thresholds: &[OrbitThreshold], kind: TraceKind) -> BTreeMap<Vec<u8>, Option<u32>> {
    thresholds
        .iter()
        .filter(|t| t.orbit.kind == kind)
        .map(|t| {
            let arity = t.orbit.rep.kind.arity();
            (t.orbit.rep.value.coords[..arity].to_vec(), t.minimum)
        })
        .collect()
}

/// Bitmask over value codes of one kind: the values whose class minimum is
/// known and at most `m`, i.e. the values a missing set of size `m` can
/// still afford. Requires `m < ORBIT_CAP` so that `None` entries really mean
/// "not affordable".
pub fn usable_values(thresholds: &[OrbitThreshold], kind: TraceKind, m: u32) -> u64 {
    assert!(m < ORBIT_CAP);
    let lookup = threshold_lookup(thresholds, kind);
    let arity = kind.arity();
    let mut mask = 0u64;
    for code in 0..1usize << (2 * arity) {
        let mut key: Vec<u8> = (0..arity).map(|i| (code >> (2 * i) & 3) as u8).collect();
        key.sort_unstable();
        if let Some(min) = lookup[&key] {
            if min <= m {
                mask |= 1 << code;
            }
        }
    }
    mask
}

/// Build the size table for 33..=63 missing cells from the searched class
/// minima, comparing every row against the frozen reference and asserting
/// the weighted budget `300·4·triple_max + 144·6·pair_max <= 625·missing`.
pub fn combine_thresholds(thresholds: &[OrbitThreshold]) -> ThresholdTable {
    let shapes = ferrers::legal_shapes();
    let mut rows = Vec::new();
    let mut tight = Vec::new();
    let mut reference_mismatches = Vec::new();
    for m in 33..=63u32 {
        let usable_pair = usable_values(thresholds, TraceKind::Pair, m);
        let usable_triple = usable_values(thresholds, TraceKind::Triple, m);
        let fit = |list: &[(u64, u32)], usable: u64| {
            list.iter()
                .find(|(mask, _)| mask & !usable == 0)
                .map(|&(_, size)| size)
                .unwrap_or(0)
        };
        let row = ThresholdRow {
            missing: m,
            pair_max: fit(&shapes.pair, usable_pair),
            triple_max: fit(&shapes.triple, usable_triple),
        };
        if row != reference_row(m) {
            reference_mismatches.push(m);
        }
        let weighted = 300 * 4 * row.triple_max as u64 + 144 * 6 * row.pair_max as u64;
        let budget = 625 * m as u64;
        assert!(
            weighted <= budget,
            "weighted budget violated at {}: {} > {}",
            m,
            weighted,
            budget
        );
        if weighted == budget {
            tight.push(m);
        }
        rows.push(row);
    }
    ThresholdTable {
        rows,
        tight,
        reference_mismatches,
    }
}

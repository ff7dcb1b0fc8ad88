//! Extremal shape patterns: their exact presence cost and what they force.
//!
//! The size table stops at 63 missing cells. Just above it, only a handful
//! of maximal shapes could still pay for themselves: the 2x2 value square on
//! a pair support and, on a triple support, the three height-2 slabs and one
//! mixed staircase. This module pins their exact minimum missing-set sizes,
//! shows each affordable one forces a whole rectangle of cells missing, and
//! then audits every minimal way of extending such a rectangle — all margins
//! must come out negative.

use crate::ferrers;
use crate::lattice::{self, CellSet, Point, SupportedTrace, TraceKind};

use super::hitting::{self, HittingInstance};

/// The cell with value 2 on both named axes and 0 elsewhere; its up-closure
/// is the 64-cell rectangle the forcing checks are about.
pub fn rectangle_base(axis_a: usize, axis_b: usize) -> Point {
    assert!(axis_a < axis_b && axis_b < 4);
    let mut coords = [0u8; 4];
    coords[axis_a] = 2;
    coords[axis_b] = 2;
    Point::new(4, &coords)
}

/// The 2x2 value square on the first pair support.
pub fn square_traces() -> Vec<SupportedTrace> {
    let mut out = Vec::new();
    for a in 0..2u8 {
        for b in 0..2u8 {
            out.push(SupportedTrace::new(&[0, 1], &[a, b]));
        }
    }
    out
}

/// The height-2 slab along one axis of the first triple support: all values
/// whose coordinate there is at most 1.
pub fn slab_traces(axis: usize) -> Vec<SupportedTrace> {
    assert!(axis < 3);
    let mut out = Vec::new();
    for code in 0..64usize {
        let value = [
            (code & 3) as u8,
            (code >> 2 & 3) as u8,
            (code >> 4 & 3) as u8,
        ];
        if value[axis] <= 1 {
            out.push(SupportedTrace::new(&[0, 1, 2], &value));
        }
    }
    assert_eq!(out.len(), 32);
    out
}

/// The mixed staircase on the first triple support: heights 4 over the low
/// 2x2 value corner, 2 on its sides, 0 opposite.
pub fn mixed_traces() -> Vec<SupportedTrace> {
    let heights = [[4u8, 4, 2, 2], [4, 4, 2, 2], [2, 2, 0, 0], [2, 2, 0, 0]];
    let mut out = Vec::new();
    for a in 0..4u8 {
        for b in 0..4u8 {
            for c in 0..heights[a as usize][b as usize] {
                out.push(SupportedTrace::new(&[0, 1, 2], &[a, b, c]));
            }
        }
    }
    assert_eq!(out.len(), 32);
    out
}

/// One searched pattern: its bounded minimum against the expectation.
#[derive(Clone, Debug)]
pub struct PatternCheck {
    pub name: String,
    pub cap: u32,
    pub minimum: Option<u32>,
    pub expected: Option<u32>,
    pub nodes: u64,
}

impl PatternCheck {
    pub fn ok(&self) -> bool {
        self.minimum == self.expected
    }
}

fn run_check(name: &str, inst: &HittingInstance, cap: u32, expected: Option<u32>) -> PatternCheck {
    let outcome = hitting::min_missing(inst, cap);
    PatternCheck {
        name: name.to_string(),
        cap,
        minimum: outcome.best.map(|(size, _)| size),
        expected,
        nodes: outcome.nodes,
    }
}

/// The nine decisive pattern searches: exact presence costs for the square,
/// the three slabs and the staircase, then the four forcing arguments — with
/// the matching rectangle's base cell protected, nothing of size <= 66 is
/// left, so any missing set that small must contain the whole rectangle.
pub fn critical_pattern_checks() -> Vec<PatternCheck> {
    let mut out = Vec::new();
    let square = HittingInstance::for_pattern("pair-square", &square_traces());
    out.push(run_check("pair-square", &square, 65, Some(64)));
    for axis in 0..3 {
        let inst = HittingInstance::for_pattern(
            &format!("triple-slab-{}", axis),
            &slab_traces(axis),
        );
        out.push(run_check(&inst.label.clone(), &inst, 65, Some(64)));
    }
    let mixed = HittingInstance::for_pattern("triple-staircase", &mixed_traces());
    out.push(run_check("triple-staircase", &mixed, 81, Some(80)));

    let square_forced = square.with_protected(&rectangle_base(0, 1));
    out.push(run_check("pair-square-forces-rectangle", &square_forced, 67, None));
    for axis in 0..3 {
        let inst = HittingInstance::for_pattern(
            &format!("triple-slab-{}", axis),
            &slab_traces(axis),
        )
        .with_protected(&rectangle_base(axis, 3));
        out.push(run_check(
            &format!("triple-slab-{}-forces-rectangle", axis),
            &inst,
            67,
            None,
        ));
    }
    assert_eq!(out.len(), 9);
    out
}

/// One audited missing set containing a rectangle.
#[derive(Clone, Debug)]
pub struct RectangleCase {
    pub rectangle: [usize; 2],
    pub name: String,
    pub missing: CellSet,
    /// `300·(triple shape sizes) + 144·(pair shape sizes) − 625·|missing|`.
    pub margin: i64,
}

#[derive(Clone, Debug)]
pub struct RectangleAudit {
    pub cases: Vec<RectangleCase>,
    /// Largest margin over all cases; negative means every one is safe.
    pub worst_margin: i64,
}

fn margin_for(missing: &CellSet) -> i64 {
    assert!(missing.is_up_set());
    let mut triple_sum = 0i64;
    for support in lattice::triple_supports() {
        triple_sum +=
            ferrers::max_legal_size_with_closure(TraceKind::Triple, &support, missing) as i64;
    }
    let mut pair_sum = 0i64;
    for support in lattice::pair_supports() {
        pair_sum += ferrers::max_legal_size_with_closure(TraceKind::Pair, &support, missing) as i64;
    }
    300 * triple_sum + 144 * pair_sum - 625 * missing.len() as i64
}

/// A cell one step below `p` on `axis`, if any.
fn lowered(p: &Point, axis: usize) -> Option<Point> {
    if p.coords[axis] == 0 {
        return None;
    }
    let mut coords = p.coords;
    coords[axis] -= 1;
    Some(Point::new(4, &coords))
}

/// Audit every minimal extension of each rectangle: the rectangle alone,
/// plus one or both of the two maximal outside cells, plus one cell directly
/// below either of them. These are exactly the up-sets reachable from a
/// rectangle by at most two closure additions, twelve per rectangle.
pub fn rectangle_extension_audit() -> RectangleAudit {
    let up = lattice::up_closure_table();
    let mut cases = Vec::new();
    for axis_a in 0..4 {
        for axis_b in axis_a + 1..4 {
            let base_cell = rectangle_base(axis_a, axis_b);
            let rectangle = up[base_cell.index()].clone();
            assert_eq!(rectangle.len(), 64);
            // The only maximal cells outside: value 1 on one named axis,
            // 3 everywhere else.
            let outside_peak = |axis: usize| {
                let mut coords = [3u8; 4];
                coords[axis] = 1;
                Point::new(4, &coords)
            };
            let peak_a = outside_peak(axis_a);
            let peak_b = outside_peak(axis_b);
            let with = |extras: &[&Point]| {
                let mut m = rectangle.clone();
                for p in extras {
                    m.union_in_place(&up[p.index()]);
                }
                m
            };
            let mut push = |name: String, missing: CellSet| {
                cases.push(RectangleCase {
                    rectangle: [axis_a, axis_b],
                    name,
                    margin: margin_for(&missing),
                    missing,
                });
            };
            push("bare".to_string(), with(&[]));
            for (tag, peak) in [("a", &peak_a), ("b", &peak_b)] {
                push(format!("peak-{}", tag), with(&[peak]));
            }
            push("peak-ab".to_string(), with(&[&peak_a, &peak_b]));
            for (tag, peak) in [("a", &peak_a), ("b", &peak_b)] {
                for axis in 0..4 {
                    let below = lowered(peak, axis).expect("peak coordinates are positive");
                    push(format!("peak-{}-below-{}", tag, axis), with(&[peak, &below]));
                }
            }
        }
    }
    assert_eq!(cases.len(), 72);
    let worst_margin = cases.iter().map(|c| c.margin).max().expect("nonempty");
    RectangleAudit {
        cases,
        worst_margin,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pattern_generators_have_expected_shapes() {
        assert_eq!(square_traces().len(), 4);
        for axis in 0..3 {
            assert_eq!(slab_traces(axis).len(), 32);
        }
        assert_eq!(mixed_traces().len(), 32);
        assert_eq!(rectangle_base(0, 1).coords, [2, 2, 0, 0]);
        assert_eq!(rectangle_base(1, 3).coords, [0, 2, 0, 2]);
    }

    #[test]
    fn audit_case_sizes_are_the_minimal_extensions() {
        let audit = rectangle_extension_audit();
        assert_eq!(audit.cases.len(), 72);
        for case in &audit.cases {
            assert!(case.missing.is_up_set());
            let expected = match case.name.as_str() {
                "bare" => 64,
                "peak-a" | "peak-b" => 65,
                _ => 66,
            };
            assert_eq!(case.missing.len(), expected, "case {}", case.name);
        }
    }

    #[test]
    fn bare_rectangle_margin_is_the_worst() {
        let audit = rectangle_extension_audit();
        for case in &audit.cases {
            assert!(case.margin < 0, "margin {} in {}", case.margin, case.name);
            if case.name == "bare" {
                assert_eq!(case.margin, audit.worst_margin);
            }
        }
    }
}

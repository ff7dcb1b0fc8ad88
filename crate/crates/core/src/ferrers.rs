//! Exhaustive audits of pair and triple Ferrers down-sets against the local
//! matching obstructions, and the closure/hitting-constrained legal maxima
//! used by the rectangle-extension audit.

use crate::clauses::{self, Clause};
use crate::lattice::{
    enumerate_ferrers, CellSet, FerrersShape, Point, SupportedTrace, TraceKind,
};
use std::sync::OnceLock;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairAuditReport {
    pub downsets_checked: usize,
    pub legal_count: usize,
    pub max_legal_size: u32,
    pub legal_shapes: Vec<FerrersShape>,
}

/// Checks every pair Ferrers shape against every forbidden pair obstruction.
pub fn audit_pairs() -> PairAuditReport {
    let shapes = enumerate_ferrers(2);
    let obstructions = clauses::obstruction_pairs();
    let mut legal_shapes = Vec::new();
    for shape in &shapes {
        let cells = shape.expand();
        let legal = obstructions
            .iter()
            .all(|(a, b)| !(cells.contains(a) && cells.contains(b)));
        if legal {
            legal_shapes.push(shape.clone());
        }
    }
    let max_legal_size = legal_shapes.iter().map(|s| s.size()).max().unwrap_or(0);
    PairAuditReport {
        downsets_checked: shapes.len(),
        legal_count: legal_shapes.len(),
        max_legal_size,
        legal_shapes,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TripleAuditReport {
    pub downsets_checked: usize,
    pub bad_matchings: usize,
    pub legal_count: usize,
    pub max_legal_size: u32,
    pub equality_diagrams: Vec<FerrersShape>,
}

/// Down-closures of the bad triple matchings, reduced to the
/// inclusion-minimal forbidden down-sets. A down-set is illegal iff it
/// contains one of these.
fn minimal_forbidden_masks() -> &'static Vec<u64> {
    static MASKS: OnceLock<Vec<u64>> = OnceLock::new();
    MASKS.get_or_init(|| {
        let mut closures: Vec<u64> = clauses::bad_triples()
            .iter()
            .map(|[a, b, c]| {
                let mut s = crate::lattice::principal_down_closure(a);
                s.union_in_place(&crate::lattice::principal_down_closure(b));
                s.union_in_place(&crate::lattice::principal_down_closure(c));
                s.low_word()
            })
            .collect();
        closures.sort_by_key(|m| m.count_ones());
        closures.dedup();
        let mut minimal: Vec<u64> = Vec::new();
        for m in closures {
            if !minimal.iter().any(|&f| m & f == f) {
                minimal.push(m);
            }
        }
        minimal
    })
}

/// Checks every triple Ferrers shape against the minimal forbidden down-sets
/// derived from the bad 3-matchings.
pub fn audit_triples() -> TripleAuditReport {
    let shapes = enumerate_ferrers(3);
    let forbidden = minimal_forbidden_masks();
    let mut legal_count = 0usize;
    let mut max_legal_size = 0u32;
    let mut equality_diagrams = Vec::new();
    for shape in &shapes {
        let mask = shape.expand().low_word();
        let legal = !forbidden.iter().any(|&f| mask & f == f);
        if legal {
            legal_count += 1;
            let size = shape.size();
            if size > max_legal_size {
                max_legal_size = size;
                equality_diagrams.clear();
            }
            if size == max_legal_size {
                equality_diagrams.push(shape.clone());
            }
        }
    }
    TripleAuditReport {
        downsets_checked: shapes.len(),
        bad_matchings: clauses::bad_triples().len(),
        legal_count,
        max_legal_size,
        equality_diagrams,
    }
}

/// Legal shape masks with sizes, sorted by size descending, for fast
/// "largest legal shape inside a usable set" queries.
pub struct LegalShapes {
    pub pair: Vec<(u64, u32)>,
    pub triple: Vec<(u64, u32)>,
}

pub fn legal_shapes() -> &'static LegalShapes {
    static SHAPES: OnceLock<LegalShapes> = OnceLock::new();
    SHAPES.get_or_init(|| {
        let mut pair: Vec<(u64, u32)> = audit_pairs()
            .legal_shapes
            .iter()
            .map(|s| (s.expand().low_word(), s.size()))
            .collect();
        pair.sort_by(|a, b| b.1.cmp(&a.1));
        let forbidden = minimal_forbidden_masks();
        let mut triple: Vec<(u64, u32)> = enumerate_ferrers(3)
            .iter()
            .filter_map(|s| {
                let mask = s.expand().low_word();
                if forbidden.iter().any(|&f| mask & f == f) {
                    None
                } else {
                    Some((mask, s.size()))
                }
            })
            .collect();
        triple.sort_by(|a, b| b.1.cmp(&a.1));
        LegalShapes { pair, triple }
    })
}

fn clause_hit(clause: &Clause, missing: &CellSet) -> bool {
    clause.iter().any(|&i| missing.contains_index(i))
}

/// Values on a support that a given missing up-set still allows to be
/// present: all wide extensions outside `missing` and every residual seed
/// clause hit.
pub fn usable_value_mask(kind: TraceKind, support: &[u8], missing: &CellSet) -> u64 {
    assert!(missing.is_up_set(), "missing set must be an up-set");
    let table = clauses::trace_clause_table();
    let support_rank = match kind {
        TraceKind::Pair => crate::lattice::pair_supports()
            .iter()
            .position(|s| s == support)
            .expect("pair support"),
        TraceKind::Triple => crate::lattice::triple_supports()
            .iter()
            .position(|s| s == support)
            .expect("triple support"),
    };
    let value_count = 1usize << (2 * kind.arity());
    let mut mask = 0u64;
    for v in 0..value_count {
        let value = Point::from_index(kind.arity() as u8, v);
        let trace = SupportedTrace::new(support, &value.coords[..kind.arity()]);
        if trace.extension_cells().intersects(missing) {
            continue;
        }
        let clauses = match kind {
            TraceKind::Pair => &table.pair[support_rank][v],
            TraceKind::Triple => &table.triple[support_rank][v],
        };
        if clauses.iter().all(|c| clause_hit(c, missing)) {
            mask |= 1u64 << v;
        }
    }
    mask
}

/// Largest legal Ferrers down-set on the support all of whose values the
/// missing set allows.
pub fn max_legal_size_with_closure(kind: TraceKind, support: &[u8], missing: &CellSet) -> u32 {
    let usable = usable_value_mask(kind, support, missing);
    let shapes = match kind {
        TraceKind::Pair => &legal_shapes().pair,
        TraceKind::Triple => &legal_shapes().triple,
    };
    shapes
        .iter()
        .find(|(mask, _)| mask & !usable == 0)
        .map(|&(_, size)| size)
        .unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::pair_supports;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    #[test]
    fn pair_audit_report() {
        let report = audit_pairs();
        assert_eq!(report.downsets_checked, 70);
        assert_eq!(report.legal_count, 10);
        assert_eq!(report.max_legal_size, 4);
        let expected: Vec<[u8; 4]> = vec![
            [0, 0, 0, 0],
            [1, 0, 0, 0],
            [1, 1, 0, 0],
            [1, 1, 1, 0],
            [1, 1, 1, 1],
            [2, 0, 0, 0],
            [2, 1, 0, 0],
            [2, 2, 0, 0],
            [3, 0, 0, 0],
            [4, 0, 0, 0],
        ];
        let mut got: Vec<[u8; 4]> = report
            .legal_shapes
            .iter()
            .map(|s| match s {
                FerrersShape::Two(h) => *h,
                _ => unreachable!(),
            })
            .collect();
        got.sort();
        assert_eq!(got, expected);
    }

    #[test]
    fn triple_audit_report() {
        let report = audit_triples();
        assert_eq!(report.downsets_checked, 232848);
        assert_eq!(report.bad_matchings, 2016);
        assert_eq!(report.legal_count, 26893);
        assert_eq!(report.max_legal_size, 32);
        assert_eq!(report.equality_diagrams.len(), 4);
    }

    #[test]
    fn full_cube_is_illegal() {
        let full = FerrersShape::Three([[4; 4]; 4]);
        let mask = full.expand().low_word();
        assert!(minimal_forbidden_masks().iter().any(|&f| mask & f == f));
    }

    #[test]
    fn universal_contribution_bound() {
        // four triple supports at 32, six pair supports at 4
        assert!(300 * 4 * 32 + 144 * 6 * 4 < 625 * 67);
        assert_eq!(300 * 4 * 32 + 144 * 6 * 4, 41856);
    }

    #[test]
    fn legality_is_antitone_for_pairs() {
        let legal: Vec<[u8; 4]> = audit_pairs()
            .legal_shapes
            .iter()
            .map(|s| match s {
                FerrersShape::Two(h) => *h,
                _ => unreachable!(),
            })
            .collect();
        let is_legal = |h: &[u8; 4]| legal.contains(h);
        for h in &legal {
            for col in 0..4 {
                if h[col] > 0 {
                    let mut sub = *h;
                    sub[col] -= 1;
                    if FerrersShape::Two(sub).is_valid() {
                        assert!(is_legal(&sub), "sub-shape of legal {:?} illegal", h);
                    }
                }
            }
        }
    }

    #[test]
    fn legality_is_antitone_for_triples_sampled() {
        let forbidden = minimal_forbidden_masks();
        let is_legal = |mask: u64| !forbidden.iter().any(|&f| mask & f == f);
        let all = enumerate_ferrers(3);
        let legal: Vec<&FerrersShape> = all
            .iter()
            .filter(|s| is_legal(s.expand().low_word()))
            .collect();
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..1000 {
            let shape = legal[rng.gen_range(0..legal.len())];
            let FerrersShape::Three(h) = shape else { unreachable!() };
            let r = rng.gen_range(0..4);
            let c = rng.gen_range(0..4);
            if h[r][c] == 0 {
                continue;
            }
            let mut sub = *h;
            sub[r][c] -= 1;
            let sub = FerrersShape::Three(sub);
            if sub.is_valid() {
                assert!(is_legal(sub.expand().low_word()));
            }
        }
    }

    #[test]
    fn closure_maxima_trivial_cases() {
        let full = CellSet::full(4);
        for support in pair_supports() {
            assert_eq!(max_legal_size_with_closure(TraceKind::Pair, &support, &full), 0);
        }
        // an empty missing set hits no clause, so no value is usable
        let empty = CellSet::empty(4);
        assert_eq!(
            max_legal_size_with_closure(TraceKind::Pair, &pair_supports()[0], &empty),
            0
        );
        assert_eq!(usable_value_mask(TraceKind::Pair, &pair_supports()[0], &empty), 0);
    }
}

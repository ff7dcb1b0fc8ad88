//! Local matching obstructions: forbidden pair obstructions, bad triple
//! matchings, upper-cube matching clauses, and residual seed matchings.
//!
//! A "clause" is a set of three pairwise-disjoint wide quads of `[4]^4`, at
//! least one of which must be missing. Clauses are canonicalized as index
//! triples sorted ascending.

use crate::lattice::{cell_count, Point, SupportedTrace};
use std::collections::BTreeSet;
use std::sync::OnceLock;

/// Unordered pairs `{a, b}` in `[4]^2` that can never both be present on one
/// pair support: the values differ in both coordinates and in at least one
/// coordinate the two values are not exactly `{0, 1}`.
pub fn obstruction_pairs() -> &'static Vec<(Point, Point)> {
    static PAIRS: OnceLock<Vec<(Point, Point)>> = OnceLock::new();
    PAIRS.get_or_init(|| {
        let mut out = Vec::new();
        for ia in 0..cell_count(2) {
            for ib in (ia + 1)..cell_count(2) {
                let a = Point::from_index(2, ia);
                let b = Point::from_index(2, ib);
                if is_obstruction_pair(&a, &b) {
                    out.push((a, b));
                }
            }
        }
        out
    })
}

pub fn is_obstruction_pair(a: &Point, b: &Point) -> bool {
    let distinct = (0..2).all(|i| a.coords[i] != b.coords[i]);
    let some_not_01 = (0..2).any(|i| {
        let mut vals = [a.coords[i], b.coords[i]];
        vals.sort();
        vals != [0, 1]
    });
    distinct && some_not_01
}

/// Unordered triples `{a, b, c}` in `[4]^3` that can never all be present on
/// one triple support: pairwise distinct values in every coordinate, and in
/// at least one coordinate the unused value of `{0,1,2,3}` is 0 or 1.
pub fn bad_triples() -> &'static Vec<[Point; 3]> {
    static TRIPLES: OnceLock<Vec<[Point; 3]>> = OnceLock::new();
    TRIPLES.get_or_init(|| {
        let mut out = Vec::new();
        let n = cell_count(3);
        for ia in 0..n {
            let a = Point::from_index(3, ia);
            for ib in (ia + 1)..n {
                let b = Point::from_index(3, ib);
                for ic in (ib + 1)..n {
                    let c = Point::from_index(3, ic);
                    if is_bad_triple(&a, &b, &c) {
                        out.push([a, b, c]);
                    }
                }
            }
        }
        out
    })
}

pub fn is_bad_triple(a: &Point, b: &Point, c: &Point) -> bool {
    let mut latin = true;
    let mut low_unused = false;
    for i in 0..3 {
        let (x, y, z) = (a.coords[i], b.coords[i], c.coords[i]);
        if x == y || y == z || x == z {
            latin = false;
            break;
        }
        let unused = 6 - x - y - z; // 0+1+2+3 = 6
        if unused <= 1 {
            low_unused = true;
        }
    }
    latin && low_unused
}

/// A clause on the wide-quad lattice: three pairwise-disjoint quads, at least
/// one of which must be missing. Stored as ascending cell indices.
pub type Clause = [usize; 3];

fn canonical_clause(quads: [Point; 3]) -> Clause {
    let mut idx = [quads[0].index(), quads[1].index(), quads[2].index()];
    idx.sort();
    idx
}

/// The 216 clauses forbidding an upper 3-matching: for permutations
/// `(pi1, pi2, pi3)` of `{1,2,3}`, the quads `(t, pi1(t), pi2(t), pi3(t))`
/// for `t = 1, 2, 3`.
pub fn upper_matching_clauses() -> &'static Vec<Clause> {
    static CLAUSES: OnceLock<Vec<Clause>> = OnceLock::new();
    CLAUSES.get_or_init(|| {
        let perms: Vec<[u8; 3]> = permutations_of(&[1, 2, 3]);
        let mut set = BTreeSet::new();
        for p1 in &perms {
            for p2 in &perms {
                for p3 in &perms {
                    let quads = [0usize, 1, 2].map(|t| {
                        Point::new(4, &[t as u8 + 1, p1[t], p2[t], p3[t]])
                    });
                    set.insert(canonical_clause(quads));
                }
            }
        }
        let out: Vec<Clause> = set.into_iter().collect();
        assert_eq!(out.len(), 216, "upper matching clause count");
        out
    })
}

fn permutations_of(vals: &[u8; 3]) -> Vec<[u8; 3]> {
    let mut out = Vec::new();
    for i in 0..3 {
        for j in 0..3 {
            if j == i {
                continue;
            }
            let k = 3 - i - j;
            out.push([vals[i], vals[j], vals[k]]);
        }
    }
    out
}

/// A seed: the low value `u` on one column, disjoint from the trace it is
/// paired with.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Seed {
    pub column: u8,
    pub low_value: u8,
}

/// Seeds applicable to a trace: `(column j, u in {0,1})` with `u` not used by
/// the trace in column `j`.
pub fn seeds_for(trace: &SupportedTrace) -> Vec<Seed> {
    let mut out = Vec::new();
    for column in 0..4u8 {
        for low_value in 0..2u8 {
            if trace.value_on_column(column) != Some(low_value) {
                out.push(Seed { column, low_value });
            }
        }
    }
    out
}

/// Per-column values still available for residual quads: everything except
/// the trace's value on its support columns and the seed's value on its
/// column.
fn available_values(trace: &SupportedTrace, seed: &Seed) -> [Vec<u8>; 4] {
    let mut avail: [Vec<u8>; 4] = Default::default();
    for (col, slot) in avail.iter_mut().enumerate() {
        let col = col as u8;
        for v in 0..4u8 {
            if trace.value_on_column(col) == Some(v) {
                continue;
            }
            if seed.column == col && seed.low_value == v {
                continue;
            }
            slot.push(v);
        }
    }
    avail
}

/// All residual seed matchings for one trace and one seed: unordered triples
/// of pairwise-disjoint wide quads avoiding the trace and the seed. Empty
/// when some column has fewer than three available values.
pub fn residual_matchings(trace: &SupportedTrace, seed: &Seed) -> Vec<Clause> {
    let avail = available_values(trace, seed);
    if avail.iter().any(|a| a.len() < 3) {
        return Vec::new();
    }
    let mut out = BTreeSet::new();
    let subsets: Vec<Vec<[u8; 3]>> = avail.iter().map(|a| three_subsets(a)).collect();
    let perms = [[0usize, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    for s0 in &subsets[0] {
        for s1 in &subsets[1] {
            for s2 in &subsets[2] {
                for s3 in &subsets[3] {
                    // The quad containing s0[k] in column 0 is determined, so
                    // ranging over per-column bijections hits every unordered
                    // matching exactly once.
                    for p1 in &perms {
                        for p2 in &perms {
                            for p3 in &perms {
                                let quads = [0usize, 1, 2].map(|k| {
                                    Point::new(4, &[s0[k], s1[p1[k]], s2[p2[k]], s3[p3[k]]])
                                });
                                out.insert(canonical_clause(quads));
                            }
                        }
                    }
                }
            }
        }
    }
    out.into_iter().collect()
}

fn three_subsets(vals: &[u8]) -> Vec<[u8; 3]> {
    let mut out = Vec::new();
    let n = vals.len();
    for i in 0..n {
        for j in (i + 1)..n {
            for k in (j + 1)..n {
                out.push([vals[i], vals[j], vals[k]]);
            }
        }
    }
    out
}

/// All residual seed clauses of a trace across its applicable seeds,
/// deduplicated, in canonical order. Also returns, per clause, the seed it
/// came from first (for regeneration metadata).
pub fn residual_seed_clauses(trace: &SupportedTrace) -> Vec<Clause> {
    let mut set = BTreeSet::new();
    for seed in seeds_for(trace) {
        for clause in residual_matchings(trace, &seed) {
            set.insert(clause);
        }
    }
    set.into_iter().collect()
}

/// Cached residual seed clauses for every (support, value) trace variable of
/// the full lattice. Key order: pair supports then triple supports, values by
/// linear index.
pub struct TraceClauseTable {
    pub pair: Vec<Vec<Vec<Clause>>>,
    pub triple: Vec<Vec<Vec<Clause>>>,
}

pub fn trace_clause_table() -> &'static TraceClauseTable {
    static TABLE: OnceLock<TraceClauseTable> = OnceLock::new();
    TABLE.get_or_init(|| {
        let pair = crate::lattice::pair_supports()
            .iter()
            .map(|s| {
                (0..cell_count(2))
                    .map(|v| {
                        let p = Point::from_index(2, v);
                        let t = SupportedTrace::new(s, &p.coords[..2]);
                        residual_seed_clauses(&t)
                    })
                    .collect()
            })
            .collect();
        let triple = crate::lattice::triple_supports()
            .iter()
            .map(|s| {
                (0..cell_count(3))
                    .map(|v| {
                        let p = Point::from_index(3, v);
                        let t = SupportedTrace::new(s, &p.coords[..3]);
                        residual_seed_clauses(&t)
                    })
                    .collect()
            })
            .collect();
        TraceClauseTable { pair, triple }
    })
}

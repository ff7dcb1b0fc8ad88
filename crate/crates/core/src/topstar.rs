//! Branch relaxations for boards containing a full top star.
//!
//! Each branch fixes the size `c` of the present top slice (and in the
//! exceptional branch `c = 23`, also the lower missing count `l`) and builds
//! a 608-variable rational relaxation whose rows are all necessary conditions
//! for a genuine board. Proving `625 c - 625 l + 300 |T| + 144 |P| <= 40000`
//! over every branch closes this case: the solver produces a multiplier
//! certificate per branch and the verifier re-checks it in integer
//! arithmetic. All rows carry parseable ids so any certificate row can be
//! regenerated from scratch and compared.

use crate::clauses::{self, Clause};
use crate::lattice::{
    cell_count, pair_supports, triple_supports, Point, SupportedTrace, TraceKind,
};
use crate::lp::{
    self, BoundCertificate, BoundOutcome, LpError, RationalSystem, Row, RowSource,
};
use crate::rat::Rat;
use std::collections::BTreeSet;

pub const NUM_VARS: usize = 608;
/// Branch target: the weighted count may not exceed this.
pub const BUDGET: i64 = 40_000;
/// Size of the top-slice candidate region (cells with a zero coordinate).
pub const Z_SIZE: u32 = 37;
/// The top-slice size whose branch splits by lower missing count.
pub const SPLIT_C: u32 = 23;
/// Largest lower missing count in the split branch: `l <= c + 2`.
pub const SPLIT_L_MAX: u32 = 25;
/// How many violated residual rows enter the system per separation round.
const SEPARATION_BATCH: usize = 400;

// --- variable layout -------------------------------------------------------

pub fn y_col(x: usize) -> usize {
    debug_assert!(x < 64);
    x
}

pub fn m_col(x: usize, t: usize) -> usize {
    debug_assert!(x < 64 && t < 3);
    64 + x + 64 * t
}

pub fn t_col(i_rank: usize, v: usize) -> usize {
    debug_assert!(i_rank < 4 && v < 64);
    256 + i_rank * 64 + v
}

pub fn p_col(j_rank: usize, u: usize) -> usize {
    debug_assert!(j_rank < 6 && u < 16);
    512 + j_rank * 16 + u
}

fn coords3(x: usize) -> [u8; 3] {
    let p = Point::from_index(3, x);
    [p.coords[0], p.coords[1], p.coords[2]]
}

fn in_z(x: usize) -> bool {
    coords3(x).contains(&0)
}

fn digits(cs: &[u8]) -> String {
    cs.iter().map(|c| c.to_string()).collect()
}

fn parse_coords(s: &str, dim: usize) -> Option<Vec<u8>> {
    if s.len() != dim {
        return None;
    }
    s.chars()
        .map(|ch| match ch {
            '0'..='3' => Some(ch as u8 - b'0'),
            _ => None,
        })
        .collect()
}

fn parse_usize(s: &str) -> Option<usize> {
    s.parse().ok()
}

fn x_label(x: usize) -> String {
    digits(&coords3(x))
}

fn parse_x3(s: &str) -> Option<usize> {
    let cs = parse_coords(s, 3)?;
    Some(Point::new(3, &cs).index())
}

fn parse_x4(s: &str) -> Option<usize> {
    let cs = parse_coords(s, 4)?;
    Some(Point::new(4, &cs).index())
}

fn pair_rank(support: &[u8]) -> Option<usize> {
    pair_supports().iter().position(|s| s == support)
}

fn triple_rank(support: &[u8]) -> Option<usize> {
    triple_supports().iter().position(|s| s == support)
}

fn trace_col(trace: &SupportedTrace) -> usize {
    match trace.kind {
        TraceKind::Pair => p_col(
            pair_rank(trace.support_slice()).expect("pair support"),
            trace.value.index(),
        ),
        TraceKind::Triple => t_col(
            triple_rank(trace.support_slice()).expect("triple support"),
            trace.value.index(),
        ),
    }
}

/// Parses the trace label segments produced by `SupportedTrace::label`,
/// e.g. `["t", "013", "v=102"]`.
fn parse_trace(kind: &str, support: &str, value: &str) -> Option<SupportedTrace> {
    let arity = match kind {
        "p" => 2,
        "t" => 3,
        _ => return None,
    };
    let support = parse_coords(support, arity)?;
    if !support.windows(2).all(|w| w[0] < w[1]) {
        return None;
    }
    let value = parse_coords(value.strip_prefix("v=")?, arity)?;
    Some(SupportedTrace::new(&support, &value))
}

/// Names every column; these strings key the box multipliers in
/// certificates.
pub fn var_names() -> Vec<String> {
    let mut names = Vec::with_capacity(NUM_VARS);
    for x in 0..64 {
        names.push(format!("y:{}", x_label(x)));
    }
    for t in 0..3 {
        for x in 0..64 {
            names.push(format!("m:{}:{}", x_label(x), t));
        }
    }
    for support in triple_supports() {
        for v in 0..cell_count(3) {
            let p = Point::from_index(3, v);
            names.push(SupportedTrace::new(&support, &p.coords[..3]).label());
        }
    }
    for support in pair_supports() {
        for u in 0..cell_count(2) {
            let p = Point::from_index(2, u);
            names.push(SupportedTrace::new(&support, &p.coords[..2]).label());
        }
    }
    names
}

/// The weighted-count objective `625 sum y - 625 sum m + 300 sum t + 144 sum p`.
pub fn objective() -> Vec<Rat> {
    let mut d = vec![Rat::zero(); NUM_VARS];
    for (i, slot) in d.iter_mut().enumerate() {
        *slot = Rat::from_int(match i {
            0..=63 => 625,
            64..=255 => -625,
            256..=511 => 300,
            _ => 144,
        });
    }
    d
}

// --- branches ---------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct TopstarBranch {
    /// Present top-slice size `c = sum y`.
    pub c: u32,
    /// Lower missing count `l = sum m`, fixed only in the split branch.
    pub ell: Option<u32>,
}

impl TopstarBranch {
    pub fn label(&self) -> String {
        match self.ell {
            Some(l) => format!("c{:02}l{:02}", self.c, l),
            None => format!("c{:02}", self.c),
        }
    }
}

/// All 63 branches in run order: `c = 0..=37` except the split value, then
/// the split value with every `l = 0..=25`.
pub fn branches() -> Vec<TopstarBranch> {
    let mut out = Vec::new();
    for c in 0..=Z_SIZE {
        if c != SPLIT_C {
            out.push(TopstarBranch { c, ell: None });
        }
    }
    for l in 0..=SPLIT_L_MAX {
        out.push(TopstarBranch {
            c: SPLIT_C,
            ell: Some(l),
        });
    }
    assert_eq!(out.len(), 63);
    out
}

// --- row builders ------------------------------------------------------------
// Every row used anywhere is produced by exactly one of these functions, so
// regeneration from an id can never drift from the original construction.

fn one() -> Rat {
    Rat::one()
}

fn neg_one() -> Rat {
    -Rat::one()
}

fn r_t1_out(x: usize) -> Option<Row> {
    (!in_z(x)).then(|| {
        Row::new(
            format!("t1:out:{}", x_label(x)),
            vec![(y_col(x), one())],
            Rat::zero(),
        )
    })
}

fn r_t1_down(x: usize, i: usize) -> Option<Row> {
    let cs = coords3(x);
    if i >= 3 || cs[i] == 0 {
        return None;
    }
    let mut below = cs;
    below[i] -= 1;
    let pred = Point::new(3, &below).index();
    Some(Row::new(
        format!("t1:down:{}:i={}", x_label(x), i),
        vec![(y_col(x), one()), (y_col(pred), neg_one())],
        Rat::zero(),
    ))
}

fn r_t2_compat(x: usize, t: usize) -> Option<Row> {
    (t < 3).then(|| {
        Row::new(
            format!("t2:compat:{}:{}", x_label(x), t),
            vec![(y_col(x), one()), (m_col(x, t), one())],
            Rat::one(),
        )
    })
}

fn r_t2_up(x: usize, t: usize, i: usize) -> Option<Row> {
    let cs = coords3(x);
    if t >= 3 || i >= 3 || cs[i] == 3 {
        return None;
    }
    let mut above = cs;
    above[i] += 1;
    let succ = Point::new(3, &above).index();
    Some(Row::new(
        format!("t2:up:{}:{}:i={}", x_label(x), t, i),
        vec![(m_col(x, t), one()), (m_col(succ, t), neg_one())],
        Rat::zero(),
    ))
}

fn r_t2_upt(x: usize, t: usize) -> Option<Row> {
    (t < 2).then(|| {
        Row::new(
            format!("t2:upt:{}:{}", x_label(x), t),
            vec![(m_col(x, t), one()), (m_col(x, t + 1), neg_one())],
            Rat::zero(),
        )
    })
}

fn r_t3() -> Row {
    let mut coeffs = Vec::with_capacity(256);
    for x in 0..64 {
        coeffs.push((y_col(x), neg_one()));
    }
    for t in 0..3 {
        for x in 0..64 {
            coeffs.push((m_col(x, t), one()));
        }
    }
    Row::new("t3:budget", coeffs, Rat::from_int(2))
}

fn r_t4(trace: &SupportedTrace, i: usize) -> Option<Row> {
    let arity = trace.kind.arity();
    if i >= arity || trace.value.coords[i] == 0 {
        return None;
    }
    let mut below = trace.value.coords;
    below[i] -= 1;
    let pred = SupportedTrace::new(trace.support_slice(), &below[..arity]);
    Some(Row::new(
        format!("t4:{}:i={}", trace.label(), i),
        vec![(trace_col(trace), one()), (trace_col(&pred), neg_one())],
        Rat::zero(),
    ))
}

/// Maps a wide cell of the 4-cube onto its variable: the top slice uses `y`,
/// the rest use `m`.
fn cell_term(idx4: usize, sign_top: Rat, sign_lower: Rat) -> (usize, Rat) {
    let x = idx4 % 64;
    let t = idx4 / 64;
    if t == 3 {
        (y_col(x), sign_top)
    } else {
        (m_col(x, t), sign_lower)
    }
}

fn r_t5(trace: &SupportedTrace, q: usize) -> Option<Row> {
    if !trace.extension_cells().contains_index(q) {
        return None;
    }
    let id = format!("t5:{}:q={}", trace.label(), digits(&Point::from_index(4, q).coords));
    let z = trace_col(trace);
    let x = q % 64;
    let t = q / 64;
    Some(if t == 3 {
        Row::new(id, vec![(z, one()), (y_col(x), neg_one())], Rat::zero())
    } else {
        Row::new(id, vec![(z, one()), (m_col(x, t), one())], Rat::one())
    })
}

fn r_t6(j_rank: usize, a: usize, b: usize) -> Option<Row> {
    if j_rank >= 6 || a >= b || b >= 16 {
        return None;
    }
    let (pa, pb) = (Point::from_index(2, a), Point::from_index(2, b));
    if !clauses::is_obstruction_pair(&pa, &pb) {
        return None;
    }
    let j = digits(&pair_supports()[j_rank]);
    Some(Row::new(
        format!("t6:{}:a={}:b={}", j, digits(&pa.coords[..2]), digits(&pb.coords[..2])),
        vec![(p_col(j_rank, a), one()), (p_col(j_rank, b), one())],
        Rat::one(),
    ))
}

fn r_t7(i_rank: usize, a: usize, b: usize, c: usize) -> Option<Row> {
    if i_rank >= 4 || a >= b || b >= c || c >= 64 {
        return None;
    }
    let (pa, pb, pc) = (
        Point::from_index(3, a),
        Point::from_index(3, b),
        Point::from_index(3, c),
    );
    if !clauses::is_bad_triple(&pa, &pb, &pc) {
        return None;
    }
    let i = digits(&triple_supports()[i_rank]);
    Some(Row::new(
        format!(
            "t7:{}:a={}:b={}:c={}",
            i,
            digits(&pa.coords[..3]),
            digits(&pb.coords[..3]),
            digits(&pc.coords[..3])
        ),
        vec![
            (t_col(i_rank, a), one()),
            (t_col(i_rank, b), one()),
            (t_col(i_rank, c), one()),
        ],
        Rat::from_int(2),
    ))
}

fn t8_id(trace: &SupportedTrace, clause: &Clause) -> String {
    let quads: Vec<String> = clause
        .iter()
        .map(|&q| digits(&Point::from_index(4, q).coords))
        .collect();
    format!("t8:{}:m={}", trace.label(), quads.join("."))
}

/// Residual seed row: if the trace were present along with all residual
/// quads, five disjoint traces would arise, so
/// `z + sum_top y - sum_lower m <= |top part|`.
fn t8_row(trace: &SupportedTrace, clause: &Clause) -> Row {
    let mut coeffs = vec![(trace_col(trace), one())];
    let mut top = 0i64;
    for &q in clause {
        let term = cell_term(q, one(), neg_one());
        if q / 64 == 3 {
            top += 1;
        }
        coeffs.push(term);
    }
    Row::new(t8_id(trace, clause), coeffs, Rat::from_int(top))
}

fn r_t8(trace: &SupportedTrace, clause: &Clause) -> Option<Row> {
    let table = clauses::trace_clause_table();
    let list = match trace.kind {
        TraceKind::Pair => {
            &table.pair[pair_rank(trace.support_slice())?][trace.value.index()]
        }
        TraceKind::Triple => {
            &table.triple[triple_rank(trace.support_slice())?][trace.value.index()]
        }
    };
    list.binary_search(clause).ok()?;
    Some(t8_row(trace, clause))
}

fn r_t9_pair(j_rank: usize) -> Option<Row> {
    (j_rank < 6).then(|| {
        let coeffs = (0..16).map(|u| (p_col(j_rank, u), one())).collect();
        Row::new(
            format!("t9:p:{}", digits(&pair_supports()[j_rank])),
            coeffs,
            Rat::from_int(4),
        )
    })
}

fn r_t9_triple(i_rank: usize) -> Option<Row> {
    (i_rank < 4).then(|| {
        let coeffs = (0..64).map(|v| (t_col(i_rank, v), one())).collect();
        Row::new(
            format!("t9:t:{}", digits(&triple_supports()[i_rank])),
            coeffs,
            Rat::from_int(32),
        )
    })
}

fn down_size(x: usize) -> u32 {
    coords3(x).iter().map(|&c| c as u32 + 1).product()
}

fn up_size_in_z(x: usize) -> u32 {
    let base = Point::from_index(3, x);
    (0..64)
        .filter(|&y| in_z(y) && base.le(&Point::from_index(3, y)))
        .count() as u32
}

fn up_size_lower(x: usize, t: usize) -> u32 {
    let up3: u32 = coords3(x).iter().map(|&c| 4 - c as u32).product();
    up3 * (3 - t as u32)
}

fn down_size_lower(x: usize, t: usize) -> u32 {
    down_size(x) * (t as u32 + 1)
}

fn r_t10_card(var: &str, sense: &str, total: u32, cols: impl Iterator<Item = usize>) -> Option<Row> {
    let sign = match sense {
        "le" => one(),
        "ge" => neg_one(),
        _ => return None,
    };
    let rhs = match sense {
        "le" => Rat::from_int(total as i64),
        _ => Rat::from_int(-(total as i64)),
    };
    let coeffs = cols.map(|c| (c, sign.clone())).collect();
    Some(Row::new(format!("t10:{}:{}", var, sense), coeffs, rhs))
}

fn r_t10_y_card(branch: &TopstarBranch, sense: &str) -> Option<Row> {
    r_t10_card("y", sense, branch.c, (0..64).map(y_col))
}

fn r_t10_m_card(branch: &TopstarBranch, sense: &str) -> Option<Row> {
    let l = branch.ell?;
    let cols = (0..3).flat_map(|t| (0..64).map(move |x| m_col(x, t)));
    r_t10_card("m", sense, l, cols)
}

/// A top cell whose principal down-set exceeds `c` cannot lie in a down-set
/// of size `c`.
fn r_t10_absent_y(branch: &TopstarBranch, x: usize) -> Option<Row> {
    (in_z(x) && down_size(x) > branch.c).then(|| {
        Row::new(
            format!("t10:abs:y:{}", x_label(x)),
            vec![(y_col(x), one())],
            Rat::zero(),
        )
    })
}

/// A top cell whose principal up-set leaves fewer than `c` cells of the
/// candidate region must lie in every down-set of size `c`.
fn r_t10_require_y(branch: &TopstarBranch, x: usize) -> Option<Row> {
    (in_z(x) && Z_SIZE - up_size_in_z(x) < branch.c).then(|| {
        Row::new(
            format!("t10:req:y:{}", x_label(x)),
            vec![(y_col(x), neg_one())],
            -Rat::one(),
        )
    })
}

fn r_t10_absent_m(branch: &TopstarBranch, x: usize, t: usize) -> Option<Row> {
    let l = branch.ell?;
    (t < 3 && up_size_lower(x, t) > l).then(|| {
        Row::new(
            format!("t10:abs:m:{}:{}", x_label(x), t),
            vec![(m_col(x, t), one())],
            Rat::zero(),
        )
    })
}

fn r_t10_require_m(branch: &TopstarBranch, x: usize, t: usize) -> Option<Row> {
    let l = branch.ell?;
    (t < 3 && 192 - down_size_lower(x, t) < l).then(|| {
        Row::new(
            format!("t10:req:m:{}:{}", x_label(x), t),
            vec![(m_col(x, t), neg_one())],
            -Rat::one(),
        )
    })
}

// --- system assembly ----------------------------------------------------------

fn all_traces() -> Vec<SupportedTrace> {
    let mut out = Vec::new();
    for support in triple_supports() {
        for v in 0..cell_count(3) {
            let p = Point::from_index(3, v);
            out.push(SupportedTrace::new(&support, &p.coords[..3]));
        }
    }
    for support in pair_supports() {
        for u in 0..cell_count(2) {
            let p = Point::from_index(2, u);
            out.push(SupportedTrace::new(&support, &p.coords[..2]));
        }
    }
    out
}

/// Builds the eager part of the branch relaxation; residual seed rows are
/// added lazily during the solve.
pub fn build_relaxation(branch: &TopstarBranch) -> RationalSystem {
    let mut sys = RationalSystem::new(var_names(), objective(), Rat::from_int(BUDGET));
    let push = |sys: &mut RationalSystem, row: Option<Row>| {
        if let Some(row) = row {
            sys.push_row(row);
        }
    };

    for x in 0..64 {
        push(&mut sys, r_t1_out(x));
        for i in 0..3 {
            push(&mut sys, r_t1_down(x, i));
        }
    }
    for t in 0..3 {
        for x in 0..64 {
            push(&mut sys, r_t2_compat(x, t));
            for i in 0..3 {
                push(&mut sys, r_t2_up(x, t, i));
            }
        }
    }
    for t in 0..2 {
        for x in 0..64 {
            push(&mut sys, r_t2_upt(x, t));
        }
    }
    sys.push_row(r_t3());

    let traces = all_traces();
    for trace in &traces {
        for i in 0..trace.kind.arity() {
            push(&mut sys, r_t4(trace, i));
        }
    }
    for trace in &traces {
        for q in trace.extension_cells().iter_indices() {
            push(&mut sys, r_t5(trace, q));
        }
    }
    for j_rank in 0..6 {
        for (a, b) in clauses::obstruction_pairs() {
            push(&mut sys, r_t6(j_rank, a.index(), b.index()));
        }
    }
    for i_rank in 0..4 {
        for [a, b, c] in clauses::bad_triples() {
            push(&mut sys, r_t7(i_rank, a.index(), b.index(), c.index()));
        }
    }
    for j_rank in 0..6 {
        push(&mut sys, r_t9_pair(j_rank));
    }
    for i_rank in 0..4 {
        push(&mut sys, r_t9_triple(i_rank));
    }

    push(&mut sys, r_t10_y_card(branch, "le"));
    push(&mut sys, r_t10_y_card(branch, "ge"));
    push(&mut sys, r_t10_m_card(branch, "le"));
    push(&mut sys, r_t10_m_card(branch, "ge"));
    for x in 0..64 {
        push(&mut sys, r_t10_absent_y(branch, x));
        push(&mut sys, r_t10_require_y(branch, x));
    }
    if branch.ell.is_some() {
        for t in 0..3 {
            for x in 0..64 {
                push(&mut sys, r_t10_absent_m(branch, x, t));
                push(&mut sys, r_t10_require_m(branch, x, t));
            }
        }
    }
    sys
}

// --- lazy separation of residual seed rows ------------------------------------

type T8Key = (bool, usize, usize, Clause);

/// Scans every residual seed row and returns the most violated ones that are
/// not yet materialized. Only traces with positive value can violate.
fn separate_t8(x: &[Rat], materialized: &mut BTreeSet<T8Key>) -> Vec<Row> {
    let table = clauses::trace_clause_table();
    let mut candidates: Vec<(Rat, T8Key, SupportedTrace)> = Vec::new();

    let mut scan = |is_pair: bool, rank: usize, trace: SupportedTrace| {
        let z = &x[trace_col(&trace)];
        if !z.is_positive() {
            return;
        }
        let lists = if is_pair {
            &table.pair[rank][trace.value.index()]
        } else {
            &table.triple[rank][trace.value.index()]
        };
        for clause in lists {
            let key = (is_pair, rank, trace.value.index(), *clause);
            if materialized.contains(&key) {
                continue;
            }
            let mut lhs = z.clone();
            let mut rhs = 0i64;
            for &q in clause {
                let (col, sign) = cell_term(q, one(), neg_one());
                if q / 64 == 3 {
                    rhs += 1;
                }
                if !x[col].is_zero() {
                    lhs += &(&sign * &x[col]);
                }
            }
            let rhs = Rat::from_int(rhs);
            if lhs > rhs {
                candidates.push((&lhs - &rhs, key, trace));
            }
        }
    };

    for (rank, support) in pair_supports().iter().enumerate() {
        for u in 0..cell_count(2) {
            let p = Point::from_index(2, u);
            scan(true, rank, SupportedTrace::new(support, &p.coords[..2]));
        }
    }
    for (rank, support) in triple_supports().iter().enumerate() {
        for v in 0..cell_count(3) {
            let p = Point::from_index(3, v);
            scan(false, rank, SupportedTrace::new(support, &p.coords[..3]));
        }
    }

    candidates.sort_by(|a, b| b.0.cmp(&a.0).then_with(|| a.1.cmp(&b.1)));
    candidates.truncate(SEPARATION_BATCH);
    candidates
        .into_iter()
        .map(|(_, key, trace)| {
            materialized.insert(key);
            t8_row(&trace, &key.3)
        })
        .collect()
}

// --- branch driver --------------------------------------------------------------

#[derive(Debug)]
pub struct BranchProof {
    pub branch: TopstarBranch,
    pub certificate: BoundCertificate,
    /// Exact unused budget `40000 - (b^T lam + 1^T mu) / D`.
    pub gap: Rat,
    /// Rows in the final system, eager plus materialized residual rows.
    pub rows: usize,
    pub stats: lp::SolveStats,
}

/// Builds the branch relaxation, proves the budget bound with lazy residual
/// rows, and re-verifies the certificate including regeneration of every row
/// it references.
pub fn run_branch(branch: &TopstarBranch, max_pivots: u64) -> Result<BranchProof, LpError> {
    let mut sys = build_relaxation(branch);
    let mut materialized: BTreeSet<T8Key> = BTreeSet::new();
    let mut stats = lp::SolveStats::default();
    let outcome = lp::prove_bound_with_stats(
        &mut sys,
        |x: &[Rat]| separate_t8(x, &mut materialized),
        max_pivots,
        &mut stats,
    )?;
    match outcome {
        BoundOutcome::Certified(certificate) => {
            let gap = lp::verify_bound_certificate(&sys, &certificate)?;
            let source = TopstarRows { branch: *branch };
            for id in certificate.row_multipliers.keys() {
                lp::regenerate_and_match(&sys, &source, id)?;
            }
            Ok(BranchProof {
                branch: *branch,
                certificate,
                gap,
                rows: sys.rows.len(),
                stats,
            })
        }
        BoundOutcome::BoundViolated { objective, .. } => Err(LpError::Other(format!(
            "branch {}: relaxation point reaches {}",
            branch.label(),
            objective
        ))),
        BoundOutcome::Infeasible(_) => Err(LpError::Other(format!(
            "branch {}: relaxation unexpectedly empty",
            branch.label()
        ))),
    }
}

/// Rebuilds exactly the system a stored certificate references: the eager
/// relaxation plus every residual row the certificate names. Fails if any
/// referenced row cannot be regenerated.
pub fn system_for_certificate(
    branch: &TopstarBranch,
    certificate: &BoundCertificate,
) -> Result<RationalSystem, LpError> {
    let mut sys = build_relaxation(branch);
    let present: BTreeSet<String> = sys.rows.iter().map(|r| r.id.clone()).collect();
    let source = TopstarRows { branch: *branch };
    for id in certificate.row_multipliers.keys() {
        if !present.contains(id) {
            let row = source
                .rebuild_row(id)
                .ok_or_else(|| LpError::UnknownRow(id.clone()))?;
            sys.push_row(row);
        }
    }
    Ok(sys)
}

/// Checks a stored branch certificate from scratch, regenerating every row it
/// touches; returns the exact leftover budget.
pub fn verify_branch(
    branch: &TopstarBranch,
    certificate: &BoundCertificate,
) -> Result<Rat, LpError> {
    let sys = system_for_certificate(branch, certificate)?;
    lp::verify_bound_certificate(&sys, certificate)
}

// --- regeneration -----------------------------------------------------------------

/// Rebuilds any row of a branch system from its id alone.
pub struct TopstarRows {
    pub branch: TopstarBranch,
}

impl RowSource for TopstarRows {
    fn rebuild_row(&self, id: &str) -> Option<Row> {
        let parts: Vec<&str> = id.split(':').collect();
        let strip = |s: &str, prefix: &str| -> Option<usize> {
            parse_usize(s.strip_prefix(prefix).unwrap_or(s))
        };
        let row = match parts.as_slice() {
            ["t1", "out", x] => r_t1_out(parse_x3(x)?),
            ["t1", "down", x, i] => r_t1_down(parse_x3(x)?, strip(i, "i=")?),
            ["t2", "compat", x, t] => r_t2_compat(parse_x3(x)?, parse_usize(t)?),
            ["t2", "up", x, t, i] => {
                r_t2_up(parse_x3(x)?, parse_usize(t)?, strip(i, "i=")?)
            }
            ["t2", "upt", x, t] => r_t2_upt(parse_x3(x)?, parse_usize(t)?),
            ["t3", "budget"] => Some(r_t3()),
            ["t4", k, s, v, i] => r_t4(&parse_trace(k, s, v)?, strip(i, "i=")?),
            ["t5", k, s, v, q] => {
                r_t5(&parse_trace(k, s, v)?, parse_x4(q.strip_prefix("q=")?)?)
            }
            ["t6", j, a, b] => {
                let support = parse_coords(j, 2)?;
                let a = Point::new(2, &parse_coords(a.strip_prefix("a=")?, 2)?).index();
                let b = Point::new(2, &parse_coords(b.strip_prefix("b=")?, 2)?).index();
                r_t6(pair_rank(&support)?, a, b)
            }
            ["t7", i, a, b, c] => {
                let support = parse_coords(i, 3)?;
                let a = Point::new(3, &parse_coords(a.strip_prefix("a=")?, 3)?).index();
                let b = Point::new(3, &parse_coords(b.strip_prefix("b=")?, 3)?).index();
                let c = Point::new(3, &parse_coords(c.strip_prefix("c=")?, 3)?).index();
                r_t7(triple_rank(&support)?, a, b, c)
            }
            ["t8", k, s, v, m] => {
                let trace = parse_trace(k, s, v)?;
                let cells: Vec<usize> = m
                    .strip_prefix("m=")?
                    .split('.')
                    .map(parse_x4)
                    .collect::<Option<_>>()?;
                let clause: Clause = cells.try_into().ok()?;
                r_t8(&trace, &clause)
            }
            ["t9", "p", j] => r_t9_pair(pair_rank(&parse_coords(j, 2)?)?),
            ["t9", "t", i] => r_t9_triple(triple_rank(&parse_coords(i, 3)?)?),
            ["t10", "y", sense] => r_t10_y_card(&self.branch, sense),
            ["t10", "m", sense] => r_t10_m_card(&self.branch, sense),
            ["t10", "abs", "y", x] => r_t10_absent_y(&self.branch, parse_x3(x)?),
            ["t10", "req", "y", x] => r_t10_require_y(&self.branch, parse_x3(x)?),
            ["t10", "abs", "m", x, t] => {
                r_t10_absent_m(&self.branch, parse_x3(x)?, parse_usize(t)?)
            }
            ["t10", "req", "m", x, t] => {
                r_t10_require_m(&self.branch, parse_x3(x)?, parse_usize(t)?)
            }
            _ => None,
        }?;
        (row.id == id).then_some(row)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    #[test]
    fn column_layout_is_a_bijection() {
        let names = var_names();
        assert_eq!(names.len(), NUM_VARS);
        let unique: BTreeSet<&String> = names.iter().collect();
        assert_eq!(unique.len(), NUM_VARS);
        assert_eq!(y_col(63), 63);
        assert_eq!(m_col(0, 0), 64);
        assert_eq!(m_col(63, 2), 255);
        assert_eq!(t_col(0, 0), 256);
        assert_eq!(t_col(3, 63), 511);
        assert_eq!(p_col(0, 0), 512);
        assert_eq!(p_col(5, 15), 607);
        // spot-check the names at the block boundaries
        assert_eq!(names[0], "y:000");
        assert_eq!(names[64], "m:000:0");
        assert_eq!(names[256], "t:012:v=000");
        assert_eq!(names[512], "p:01:v=00");
    }

    #[test]
    fn objective_blocks() {
        let d = objective();
        assert_eq!(d[0], Rat::from_int(625));
        assert_eq!(d[255], Rat::from_int(-625));
        assert_eq!(d[256], Rat::from_int(300));
        assert_eq!(d[607], Rat::from_int(144));
    }

    #[test]
    fn branch_list_covers_the_split() {
        let bs = branches();
        assert_eq!(bs.len(), 63);
        assert_eq!(bs.iter().filter(|b| b.ell.is_some()).count(), 26);
        assert!(bs.iter().all(|b| b.c <= Z_SIZE));
        assert!(bs
            .iter()
            .filter(|b| b.ell.is_none())
            .all(|b| b.c != SPLIT_C));
        let unique: BTreeSet<String> = bs.iter().map(|b| b.label()).collect();
        assert_eq!(unique.len(), 63);
    }

    /// Row family sizes, all derivable by hand from the cube geometry.
    #[test]
    fn eager_row_census() {
        let sys = build_relaxation(&TopstarBranch { c: 0, ell: None });
        let count = |prefix: &str| sys.rows.iter().filter(|r| r.id.starts_with(prefix)).count();
        assert_eq!(count("t1:out:"), 27); // cells without a zero coordinate
        assert_eq!(count("t1:down:"), 144); // 64 cells, one per positive coord
        assert_eq!(count("t2:compat:"), 192);
        assert_eq!(count("t2:up:"), 432);
        assert_eq!(count("t2:upt:"), 128);
        assert_eq!(count("t3:"), 1);
        assert_eq!(count("t4:"), 720); // 4*144 triple + 6*24 pair predecessor rows
        assert_eq!(count("t5:"), 2560); // 256*4 + 96*16 wide extensions
        assert_eq!(count("t6:"), 420); // 6 supports * 70 obstruction pairs
        assert_eq!(count("t7:"), 8064); // 4 supports * 2016 bad triples
        assert_eq!(count("t9:"), 10);
        // at c = 0 every candidate cell has a too-large principal down-set
        assert_eq!(count("t10:abs:y:"), 37);
        assert_eq!(count("t10:req:y:"), 0);
        assert_eq!(count("t10:y:"), 2);
        assert_eq!(sys.rows.len(), 12737);

        // at c = 37 the forcing flips: every candidate cell is required
        let full = build_relaxation(&TopstarBranch { c: 37, ell: None });
        let count_full =
            |prefix: &str| full.rows.iter().filter(|r| r.id.starts_with(prefix)).count();
        assert_eq!(count_full("t10:abs:y:"), 0);
        assert_eq!(count_full("t10:req:y:"), 37);
    }

    #[test]
    fn all_branches_have_unique_row_ids() {
        for branch in branches() {
            let sys = build_relaxation(&branch);
            let ids: BTreeSet<&String> = sys.rows.iter().map(|r| &r.id).collect();
            assert_eq!(ids.len(), sys.rows.len(), "branch {}", branch.label());
        }
    }

    #[test]
    fn relaxation_build_is_deterministic() {
        let b = TopstarBranch {
            c: 23,
            ell: Some(7),
        };
        let s1 = build_relaxation(&b);
        let s2 = build_relaxation(&b);
        assert_eq!(s1.rows, s2.rows);
        assert_eq!(s1.var_names, s2.var_names);
    }

    /// A random down-set of the candidate region together with a compatible
    /// up-set of lower cells and zero traces is always a point of its branch
    /// relaxation.
    #[test]
    fn random_boards_satisfy_their_branch() {
        let mut rng = StdRng::seed_from_u64(11);
        for _ in 0..25 {
            // random down-set inside the candidate region
            let mut top = [false; 64];
            for _ in 0..rng.gen_range(0..6) {
                let seed = loop {
                    let x = rng.gen_range(0..64);
                    if in_z(x) {
                        break x;
                    }
                };
                let p = Point::from_index(3, seed);
                for y in 0..64 {
                    if Point::from_index(3, y).le(&p) {
                        top[y] = true;
                    }
                }
            }
            let c = top.iter().filter(|&&v| v).count() as u32;

            // a small up-set of lower cells avoiding the present top cells
            let mut lower = [[false; 64]; 3];
            let budget = c + 2;
            let mut l = 0u32;
            for _ in 0..rng.gen_range(0..3) {
                let x = rng.gen_range(0..64);
                let t = rng.gen_range(0..3usize);
                if top[x] {
                    continue;
                }
                let p = Point::from_index(3, x);
                let mut cells = Vec::new();
                for y in 0..64 {
                    if p.le(&Point::from_index(3, y)) {
                        for tt in t..3 {
                            if !lower[tt][y] {
                                cells.push((tt, y));
                            }
                        }
                    }
                }
                if l + cells.len() as u32 <= budget {
                    for (tt, y) in cells {
                        lower[tt][y] = true;
                        l += 1;
                    }
                }
            }

            let branch = TopstarBranch {
                c,
                ell: (c == SPLIT_C).then_some(l),
            };
            let sys = build_relaxation(&branch);
            let mut point = vec![Rat::zero(); NUM_VARS];
            for x in 0..64 {
                if top[x] {
                    point[y_col(x)] = Rat::one();
                }
            }
            for t in 0..3 {
                for x in 0..64 {
                    if lower[t][x] {
                        point[m_col(x, t)] = Rat::one();
                    }
                }
            }
            assert_eq!(sys.check_point(&point), Ok(()), "branch {}", branch.label());
            // residual rows are satisfied trivially at zero traces
            let mut seen = BTreeSet::new();
            assert!(separate_t8(&point, &mut seen).is_empty());
        }
    }

    #[test]
    fn every_row_regenerates() {
        let branch = TopstarBranch {
            c: 23,
            ell: Some(9),
        };
        let sys = build_relaxation(&branch);
        let source = TopstarRows { branch };
        for row in sys.rows.iter().step_by(131) {
            lp::regenerate_and_match(&sys, &source, &row.id)
                .unwrap_or_else(|e| panic!("row {}: {}", row.id, e));
        }
        // residual rows regenerate too
        let table = clauses::trace_clause_table();
        let trace = SupportedTrace::new(&[0, 1, 2], &[1, 0, 2]);
        let clause = table.triple[0][trace.value.index()][17];
        let row = t8_row(&trace, &clause);
        let rebuilt = source.rebuild_row(&row.id).expect("t8 rebuilds");
        assert_eq!(rebuilt, row);
    }

    #[test]
    fn tampered_rows_fail_regeneration() {
        let branch = TopstarBranch { c: 5, ell: None };
        let mut sys = build_relaxation(&branch);
        let source = TopstarRows { branch };
        let victim = sys
            .rows
            .iter()
            .position(|r| r.id.starts_with("t5:"))
            .unwrap();
        sys.rows[victim].rhs = Rat::from_int(99);
        let id = sys.rows[victim].id.clone();
        assert!(matches!(
            lp::regenerate_and_match(&sys, &source, &id),
            Err(LpError::RowMismatch { .. })
        ));
        // ids from foreign branches or thin air rebuild to nothing
        assert!(source.rebuild_row("t10:req:y:333").is_none());
        assert!(source.rebuild_row("t11:nope").is_none());
        assert!(source.rebuild_row("t8:t:012:v=000:m=0000.1111.2222").is_none());
    }
}

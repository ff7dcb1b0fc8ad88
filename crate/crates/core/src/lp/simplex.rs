//! A revised simplex engine over exact rationals for standard-form problems
//! `min c^T v` subject to `M v = q`, `v >= 0`.
//!
//! The basis is held fraction-free: the integer adjugate `A = det(B) * B^-1`
//! together with the determinant scalar. Pivots update the adjugate by the
//! two-term identity `A'[i][k] = (W_p * A[i][k] - W_i * A[p][k]) / d`, whose
//! division is exact, so the hot loop runs on machine integers with no gcd
//! reductions and entries stay cofactor-sized. Columns with fractional
//! entries are scaled to integers on entry (which changes their variable's
//! unit); `value_of` and `unbounded_ray` undo the scaling, so callers never
//! see it. The engine supports warm starts: columns may be appended between
//! optimization runs without invalidating the basis.
//!
//! Entering columns are screened with a float shadow of the data under Devex
//! reference weights and then confirmed in exact arithmetic; when the screen
//! is inconclusive, a full exact scan decides, so optimality never rests on a
//! float. The leaving variable is chosen by the lexicographic ratio test,
//! which rules out cycling without a Bland fallback.

use super::int::{frac, Int};
use crate::rat::Rat;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;

/// How many screened candidates to confirm exactly before falling back to a
/// full exact pricing pass.
const CONFIRM_CANDIDATES: usize = 32;

/// Devex weight ceiling; the reference framework restarts beyond this.
const DEVEX_RESET: f64 = 1e10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunOutcome {
    /// No improving column remains.
    Optimal,
    /// Objective reached the caller's threshold; the current point is
    /// feasible but not necessarily optimal.
    EarlyStopped,
    /// The column can increase forever; `ray` scaling of it plus the basic
    /// adjustments decreases cost without bound.
    Unbounded { entering: usize },
    /// Pivot budget exhausted.
    PivotLimit,
}

pub struct Simplex {
    rows: usize,
    /// Columns scaled to integer entries; `scale[j]` converts the engine's
    /// variable back to the caller's unit.
    cols: Vec<Vec<(usize, Int)>>,
    /// Costs in engine units (caller cost times the column scale).
    costs: Vec<Rat>,
    scale: Vec<Rat>,
    /// Right-hand side scaled integral: `rhs_int = rhs_scale * q`.
    rhs_int: Vec<Int>,
    rhs_scale: Int,
    basis: Vec<usize>,
    basis_pos: Vec<Option<usize>>,
    /// Adjugate `det(B) * B^-1`, row-major `rows x rows`.
    adj: Vec<Int>,
    det: Int,
    /// `adj * rhs_int`; basic value `i` in engine units is
    /// `xbn[i] / (det * rhs_scale)`.
    xbn: Vec<Int>,
    y: Vec<Rat>,
    z: Rat,
    banned: Vec<bool>,
    /// Float mirrors of the columns, costs, and multipliers. These only rank
    /// pricing candidates; every accept/reject decision is re-made exactly.
    cols_f: Vec<Vec<(usize, f64)>>,
    costs_f: Vec<f64>,
    y_f: Vec<f64>,
    /// Devex reference weights (float; they only order candidates).
    devex: Vec<f64>,
    pub pivots: u64,
    /// Direction vector of the last Unbounded outcome (basis-ordered,
    /// engine units).
    last_ray: Vec<Rat>,
    /// Accumulated wall time per phase: pricing, direction+ratio, update.
    pub phase_times: [std::time::Duration; 3],
}

/// Least common multiple of the denominators in a sparse rational vector.
fn denominator_lcm<'a>(entries: impl Iterator<Item = &'a Rat>) -> BigInt {
    let mut l = BigInt::one();
    for a in entries {
        if !a.is_integer() {
            l = l.lcm(&a.denom());
        }
    }
    l
}

/// Scales `value` by the integer `l / value.denom()` into an exact integer.
fn scaled_int(value: &Rat, l: &BigInt) -> Int {
    Int::from_bigint(value.numer() * (l / value.denom()))
}

impl Simplex {
    pub fn new(rows: usize, rhs: Vec<Rat>) -> Self {
        assert_eq!(rhs.len(), rows);
        let l = denominator_lcm(rhs.iter());
        let rhs_int = rhs.iter().map(|q| scaled_int(q, &l)).collect();
        Simplex {
            rows,
            cols: Vec::new(),
            costs: Vec::new(),
            scale: Vec::new(),
            rhs_int,
            rhs_scale: Int::from_bigint(l),
            basis: Vec::new(),
            basis_pos: Vec::new(),
            adj: Vec::new(),
            det: Int::from_i64(1),
            xbn: Vec::new(),
            y: Vec::new(),
            z: Rat::zero(),
            banned: Vec::new(),
            cols_f: Vec::new(),
            costs_f: Vec::new(),
            y_f: Vec::new(),
            devex: Vec::new(),
            pivots: 0,
            last_ray: Vec::new(),
            phase_times: Default::default(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn num_cols(&self) -> usize {
        self.cols.len()
    }

    pub fn add_column(&mut self, col: Vec<(usize, Rat)>, cost: Rat) -> usize {
        debug_assert!(col.windows(2).all(|w| w[0].0 < w[1].0));
        debug_assert!(col.iter().all(|(i, a)| *i < self.rows && !a.is_zero()));
        let l = denominator_lcm(col.iter().map(|(_, a)| a));
        let int_col: Vec<(usize, Int)> = col
            .iter()
            .map(|(i, a)| (*i, scaled_int(a, &l)))
            .collect();
        let scale = Rat::from_bigint(l);
        self.cols_f
            .push(int_col.iter().map(|(i, a)| (*i, a.to_f64())).collect());
        self.costs_f.push((&cost * &scale).to_f64());
        self.cols.push(int_col);
        self.costs.push(&cost * &scale);
        self.scale.push(scale);
        self.basis_pos.push(None);
        self.banned.push(false);
        self.devex.push(1.0);
        self.cols.len() - 1
    }

    pub fn ban_column(&mut self, col: usize) {
        self.banned[col] = true;
    }

    /// Installs an initial basis of unit-vector columns (each chosen column
    /// must have a single `+1` or `-1` entry, one per row).
    pub fn install_unit_basis(&mut self, cols: &[usize]) {
        assert_eq!(cols.len(), self.rows);
        let m = self.rows;
        self.basis = cols.to_vec();
        for p in self.basis_pos.iter_mut() {
            *p = None;
        }
        let mut signs = vec![0i64; m];
        let mut det = 1i64;
        let mut seen = vec![false; m];
        for (pos, &j) in cols.iter().enumerate() {
            let col = &self.cols[j];
            assert_eq!(col.len(), 1, "unit basis requires singleton columns");
            let (row, ref a) = col[0];
            assert!(!seen[row], "two basis columns on one row");
            let s = match a {
                Int::Small(1) => 1,
                Int::Small(-1) => -1,
                _ => panic!("unit basis requires +-1 entries"),
            };
            assert_eq!(row, pos, "unit basis columns must be row-aligned");
            seen[row] = true;
            signs[pos] = s;
            det *= s;
            self.basis_pos[j] = Some(pos);
        }
        self.det = Int::from_i64(det);
        self.adj = vec![Int::zero(); m * m];
        for (pos, s) in signs.iter().enumerate() {
            self.adj[pos * m + pos] = Int::from_i64(det * s);
        }
        self.refresh_from_basis();
        let ds = self.det.signum();
        for v in &self.xbn {
            assert!(v.signum() * ds >= 0, "initial basis must be feasible");
        }
    }

    /// Recomputes `xbn`, `y`, and `z` from the current adjugate.
    fn refresh_from_basis(&mut self) {
        let m = self.rows;
        self.xbn = (0..m)
            .map(|i| {
                let mut acc = Int::zero();
                for k in 0..m {
                    let a = &self.adj[i * m + k];
                    if !a.is_zero() && !self.rhs_int[k].is_zero() {
                        acc = acc.add(&a.mul(&self.rhs_int[k]));
                    }
                }
                acc
            })
            .collect();
        let det_rat = self.det.to_rat();
        self.y = (0..m)
            .map(|k| {
                let mut acc = Rat::zero();
                for i in 0..m {
                    let c = &self.costs[self.basis[i]];
                    let a = &self.adj[i * m + k];
                    if !c.is_zero() && !a.is_zero() {
                        acc += &(c * &a.to_rat());
                    }
                }
                &acc / &det_rat
            })
            .collect();
        let full = self.det.mul(&self.rhs_scale).to_rat();
        self.z = Rat::zero();
        for i in 0..m {
            let c = &self.costs[self.basis[i]];
            if !c.is_zero() && !self.xbn[i].is_zero() {
                self.z += &(c * &self.xbn[i].to_rat());
            }
        }
        self.z = &self.z / &full;
        self.y_f = self.y.iter().map(Rat::to_f64).collect();
    }

    /// Replaces all costs (phase switch, caller units) and refreshes the
    /// multipliers.
    pub fn set_costs(&mut self, costs: Vec<Rat>) {
        assert_eq!(costs.len(), self.cols.len());
        self.costs = costs
            .into_iter()
            .zip(&self.scale)
            .map(|(c, l)| &c * l)
            .collect();
        self.costs_f = self.costs.iter().map(Rat::to_f64).collect();
        self.devex.iter_mut().for_each(|g| *g = 1.0);
        self.refresh_from_basis();
    }

    pub fn objective(&self) -> &Rat {
        &self.z
    }

    pub fn multipliers(&self) -> &[Rat] {
        &self.y
    }

    /// Value of a column in the current basic solution, in caller units.
    pub fn value_of(&self, col: usize) -> Rat {
        match self.basis_pos[col] {
            Some(pos) => {
                let den = self.det.mul(&self.rhs_scale);
                &frac(&self.xbn[pos], &den) * &self.scale[col]
            }
            None => Rat::zero(),
        }
    }

    pub fn is_basic(&self, col: usize) -> bool {
        self.basis_pos[col].is_some()
    }

    /// The ray certifying the last Unbounded outcome, as sparse column
    /// values in caller units: `(entering, scale)` plus the basic
    /// adjustments.
    pub fn unbounded_ray(&self, entering: usize) -> Vec<(usize, Rat)> {
        let mut out = vec![(entering, self.scale[entering].clone())];
        for (i, v) in self.last_ray.iter().enumerate() {
            if !v.is_zero() {
                let j = self.basis[i];
                out.push((j, v * &self.scale[j]));
            }
        }
        out.sort_by_key(|(j, _)| *j);
        out
    }

    fn reduced_cost(&self, j: usize) -> Rat {
        let mut r = self.costs[j].clone();
        for (i, a) in &self.cols[j] {
            if !self.y[*i].is_zero() {
                r -= &(&a.to_rat() * &self.y[*i]);
            }
        }
        r
    }

    /// Entering column by Devex score. One float pass ranks candidates by
    /// `r^2 / weight`; the leaders are then confirmed exactly, and if none
    /// survives, a full exact pass either finds a column the floats missed or
    /// proves optimality. `None` is therefore an exact certificate.
    fn price(&mut self) -> Option<(usize, Rat)> {
        let mut cands: Vec<(f64, usize)> = Vec::new();
        for j in 0..self.cols.len() {
            if self.banned[j] || self.basis_pos[j].is_some() {
                continue;
            }
            let mut r = self.costs_f[j];
            for (i, a) in &self.cols_f[j] {
                r -= a * self.y_f[*i];
            }
            if r < 0.0 {
                cands.push((-r * r / self.devex[j], j));
            }
        }
        cands.sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        for &(_, j) in cands.iter().take(CONFIRM_CANDIDATES) {
            let r = self.reduced_cost(j);
            if r.is_negative() {
                return Some((j, r));
            }
        }
        let mut best: Option<(usize, Rat)> = None;
        for j in 0..self.cols.len() {
            if self.banned[j] || self.basis_pos[j].is_some() {
                continue;
            }
            let r = self.reduced_cost(j);
            if r.is_negative() {
                match &best {
                    Some((_, rb)) if *rb <= r => {}
                    _ => best = Some((j, r)),
                }
            }
        }
        best
    }

    /// Lexicographic comparison of candidate leaving rows `i` against `li`:
    /// compares `xb/w` and then the scaled basis-inverse rows entry by entry.
    /// The shared positive factors cancel, so integer cross-products decide.
    /// Rows of the inverse are independent, so ties always break.
    fn lex_less(&self, i: usize, li: usize, w: &[Int]) -> bool {
        use std::cmp::Ordering;
        let m = self.rows;
        match Int::prod_cmp(&self.xbn[i], &w[li], &self.xbn[li], &w[i]) {
            Ordering::Less => return true,
            Ordering::Greater => return false,
            Ordering::Equal => {}
        }
        for k in 0..m {
            match Int::prod_cmp(&self.adj[i * m + k], &w[li], &self.adj[li * m + k], &w[i]) {
                Ordering::Less => return true,
                Ordering::Greater => return false,
                Ordering::Equal => {}
            }
        }
        unreachable!("distinct basis-inverse rows cannot be proportional")
    }

    /// Runs pivots until optimal, early-stopped at `threshold`, unbounded, or
    /// out of budget.
    pub fn optimize(&mut self, threshold: Option<&Rat>, max_pivots: u64) -> RunOutcome {
        let m = self.rows;
        let trace = std::env::var_os("QC_TRACE").is_some();
        loop {
            if trace && self.pivots % 250 == 0 {
                let mut bits = self.det.bit_size();
                for v in self.adj.iter().step_by(7) {
                    bits = bits.max(v.bit_size());
                }
                eprintln!(
                    "  pivot {}: z~{:.1} adj_bits~{} phases={:.1?}",
                    self.pivots,
                    self.z.to_f64(),
                    bits,
                    self.phase_times
                );
            }
            if let Some(t) = threshold {
                if &self.z <= t {
                    return RunOutcome::EarlyStopped;
                }
            }
            let t0 = std::time::Instant::now();
            let priced = self.price();
            self.phase_times[0] += t0.elapsed();
            let Some((entering, rcost)) = priced else {
                return RunOutcome::Optimal;
            };
            if self.pivots >= max_pivots {
                return RunOutcome::PivotLimit;
            }
            self.pivots += 1;

            let t1 = std::time::Instant::now();
            // scaled direction W = adj * col = det * (B^-1 col)
            let mut w = vec![Int::zero(); m];
            for (k, a) in &self.cols[entering] {
                for i in 0..m {
                    let b = &self.adj[i * m + k];
                    if !b.is_zero() {
                        w[i] = w[i].add(&a.mul(b));
                    }
                }
            }

            // lexicographic ratio test over rows with w_i/det > 0
            let ds = self.det.signum();
            let mut leave: Option<usize> = None;
            for i in 0..m {
                if w[i].signum() == ds {
                    let better = match leave {
                        None => true,
                        Some(li) => self.lex_less(i, li, &w),
                    };
                    if better {
                        leave = Some(i);
                    }
                }
            }
            let Some(pivot_row) = leave else {
                self.last_ray = w.iter().map(|v| -frac(v, &self.det)).collect();
                return RunOutcome::Unbounded { entering };
            };
            let theta = frac(&self.xbn[pivot_row], &self.rhs_scale.mul(&w[pivot_row]));
            self.phase_times[1] += t1.elapsed();

            let t2 = std::time::Instant::now();
            let leaving = self.basis[pivot_row];
            let wp = w[pivot_row].clone();
            let d_old = self.det.clone();
            // pivot row of the adjugate and the scaled solution stay as they
            // are; every other row follows the two-term exact-division update
            let prow: Vec<Int> = self.adj[pivot_row * m..(pivot_row + 1) * m].to_vec();
            let xbn_p = self.xbn[pivot_row].clone();
            for i in 0..m {
                if i == pivot_row {
                    continue;
                }
                let wi = &w[i];
                let row = &mut self.adj[i * m..(i + 1) * m];
                if wi.is_zero() {
                    for v in row.iter_mut() {
                        if !v.is_zero() {
                            *v = Int::mul_div_exact(&wp, v, &d_old);
                        }
                    }
                    self.xbn[i] = Int::mul_div_exact(&wp, &self.xbn[i], &d_old);
                } else {
                    for (v, p) in row.iter_mut().zip(&prow) {
                        if v.is_zero() && p.is_zero() {
                            continue;
                        }
                        *v = Int::fused_update(&wp, v, wi, p, &d_old);
                    }
                    self.xbn[i] = Int::fused_update(&wp, &self.xbn[i], wi, &xbn_p, &d_old);
                }
            }
            self.det = wp.clone();

            // Devex weight propagation along the new basis-inverse pivot row.
            let gamma_q = self.devex[entering];
            if !(gamma_q < DEVEX_RESET) {
                self.devex.iter_mut().for_each(|g| *g = 1.0);
            } else {
                let det_f = wp.to_f64();
                let mut prow_f = vec![0.0_f64; m];
                for (k, p) in prow.iter().enumerate() {
                    if !p.is_zero() {
                        prow_f[k] = p.to_f64() / det_f;
                    }
                }
                for j in 0..self.cols.len() {
                    if j == entering || self.banned[j] || self.basis_pos[j].is_some() {
                        continue;
                    }
                    let mut ratio = 0.0_f64;
                    for (i, a) in &self.cols_f[j] {
                        ratio += a * prow_f[*i];
                    }
                    let nw = ratio * ratio * gamma_q;
                    if nw > self.devex[j] {
                        self.devex[j] = nw;
                    }
                }
                let pf = wp.to_f64() / d_old.to_f64();
                self.devex[leaving] = (gamma_q / (pf * pf)).max(1.0);
            }

            // multiplier update: y += r * (new pivot row of B^-1), where the
            // new row is prow / det. The float mirror is re-derived from the
            // exact values, never accumulated, so it cannot drift.
            if !rcost.is_zero() {
                let f = &rcost / &wp.to_rat();
                for (k, p) in prow.iter().enumerate() {
                    if !p.is_zero() {
                        let delta = &f * &p.to_rat();
                        self.y[k] += &delta;
                        self.y_f[k] = self.y[k].to_f64();
                    }
                }
            }
            let dz = &theta * &rcost;
            self.z += &dz;

            self.basis[pivot_row] = entering;
            self.basis_pos[leaving] = None;
            self.basis_pos[entering] = Some(pivot_row);
            self.phase_times[2] += t2.elapsed();
        }
    }
}

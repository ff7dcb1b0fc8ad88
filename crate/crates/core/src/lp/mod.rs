//! Exact linear-programming toolkit.
//!
//! A [`RationalSystem`] is a relaxation `A x <= b` over box variables
//! `0 <= x <= 1` together with an objective `d` and a target bound `B`.
//! [`solve::prove_bound`] either produces a [`BoundCertificate`] — exact
//! nonnegative multipliers showing `d^T x <= B` everywhere on the relaxation —
//! or a feasible witness point with `d^T x > B`, or an
//! [`InfeasibilityCertificate`]. Certificates are verified by
//! [`verify`], which re-checks both inequalities in cleared integer
//! arithmetic and never touches the solver.

mod int;
pub mod simplex;
pub mod solve;
pub mod verify;

pub use solve::{
    prove_bound, prove_bound_with_stats, prove_infeasible, solve_min, BoundOutcome,
    FeasibilityOutcome, MinSolution, SolveStats,
};
pub use verify::{verify_bound_certificate, verify_infeasibility_certificate};

use crate::rat::Rat;
use num_bigint::BigInt;
use std::collections::BTreeMap;
use thiserror::Error;

pub type RowId = String;

#[derive(Debug, Error)]
pub enum LpError {
    #[error("resource limit: pivot budget exhausted after {0} pivots")]
    ResourceLimit(u64),
    #[error("unknown row id `{0}`")]
    UnknownRow(String),
    #[error("duplicate row id `{0}`")]
    DuplicateRow(String),
    #[error("certificate rejected: {0}")]
    BadCertificate(String),
    #[error("row `{id}` does not match its regenerated form: {detail}")]
    RowMismatch { id: String, detail: String },
    #[error("{0}")]
    Other(String),
}

/// One inequality `sum coeffs[i] * x[i] <= rhs`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Row {
    pub id: RowId,
    /// Sparse coefficients sorted by variable index, no zeros, no repeats.
    pub coeffs: Vec<(usize, Rat)>,
    pub rhs: Rat,
}

impl Row {
    pub fn new(id: impl Into<RowId>, mut coeffs: Vec<(usize, Rat)>, rhs: Rat) -> Self {
        coeffs.sort_by_key(|(i, _)| *i);
        coeffs.dedup_by(|later, earlier| {
            if later.0 == earlier.0 {
                earlier.1 += &later.1;
                true
            } else {
                false
            }
        });
        coeffs.retain(|(_, a)| !a.is_zero());
        Row {
            id: id.into(),
            coeffs,
            rhs,
        }
    }

    pub fn lhs_at(&self, x: &[Rat]) -> Rat {
        let mut acc = Rat::zero();
        for (i, a) in &self.coeffs {
            if !x[*i].is_zero() {
                acc += &(a * &x[*i]);
            }
        }
        acc
    }

    pub fn satisfied_by(&self, x: &[Rat]) -> bool {
        self.lhs_at(x) <= self.rhs
    }
}

/// A relaxation over unit-box variables with an objective to bound.
#[derive(Debug, Clone)]
pub struct RationalSystem {
    pub var_names: Vec<String>,
    pub rows: Vec<Row>,
    /// Dense objective, one entry per variable.
    pub objective: Vec<Rat>,
    pub bound: Rat,
}

impl RationalSystem {
    pub fn new(var_names: Vec<String>, objective: Vec<Rat>, bound: Rat) -> Self {
        assert_eq!(var_names.len(), objective.len());
        RationalSystem {
            var_names,
            rows: Vec::new(),
            objective,
            bound,
        }
    }

    pub fn num_vars(&self) -> usize {
        self.var_names.len()
    }

    pub fn push_row(&mut self, row: Row) {
        debug_assert!(
            self.rows.iter().all(|r| r.id != row.id),
            "duplicate row id {}",
            row.id
        );
        debug_assert!(row.coeffs.iter().all(|(i, _)| *i < self.num_vars()));
        self.rows.push(row);
    }

    pub fn row_by_id(&self, id: &str) -> Option<&Row> {
        self.rows.iter().find(|r| r.id == id)
    }

    pub fn objective_value(&self, x: &[Rat]) -> Rat {
        let mut acc = Rat::zero();
        for (d, v) in self.objective.iter().zip(x) {
            if !d.is_zero() && !v.is_zero() {
                acc += &(d * v);
            }
        }
        acc
    }

    /// Confirms `x` lies in the unit box and satisfies every stored row.
    pub fn check_point(&self, x: &[Rat]) -> Result<(), String> {
        if x.len() != self.num_vars() {
            return Err(format!(
                "point has {} coordinates, system has {} variables",
                x.len(),
                self.num_vars()
            ));
        }
        let one = Rat::one();
        for (i, v) in x.iter().enumerate() {
            if v.is_negative() || *v > one {
                return Err(format!("variable {} = {} outside [0, 1]", self.var_names[i], v));
            }
        }
        for row in &self.rows {
            if !row.satisfied_by(x) {
                return Err(format!(
                    "row {} violated: lhs {} > rhs {}",
                    row.id,
                    row.lhs_at(x),
                    row.rhs
                ));
            }
        }
        Ok(())
    }
}

/// Nonnegative integer multipliers, scaled by `denominator`, proving
/// `d^T x <= bound` on the relaxation:
///
/// ```text
/// sum_r lam_r * A_r + mu  >=  D * d   (componentwise, box rows x_i <= 1)
/// sum_r lam_r * b_r + sum_i mu_i  <=  D * bound
/// ```
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundCertificate {
    pub denominator: BigInt,
    /// Row id -> scaled multiplier (only nonzero entries are stored).
    pub row_multipliers: BTreeMap<RowId, BigInt>,
    /// Variable name -> scaled multiplier for its `x <= 1` box row.
    pub box_multipliers: BTreeMap<String, BigInt>,
}

/// Nonnegative multipliers with `sum lam_r A_r + mu >= 0` componentwise yet
/// `sum lam_r b_r + sum mu < 0`: no point of the unit box satisfies the rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InfeasibilityCertificate {
    pub denominator: BigInt,
    pub row_multipliers: BTreeMap<RowId, BigInt>,
    pub box_multipliers: BTreeMap<String, BigInt>,
}

/// Rebuilds rows from their identifiers, independently of any stored system.
pub trait RowSource {
    fn rebuild_row(&self, id: &str) -> Option<Row>;
}

/// Confirms that the stored row equals a freshly regenerated copy.
pub fn regenerate_and_match(
    sys: &RationalSystem,
    source: &dyn RowSource,
    id: &str,
) -> Result<(), LpError> {
    let stored = sys
        .row_by_id(id)
        .ok_or_else(|| LpError::UnknownRow(id.to_string()))?;
    let rebuilt = source.rebuild_row(id).ok_or_else(|| LpError::RowMismatch {
        id: id.to_string(),
        detail: "generator does not recognize the id".into(),
    })?;
    if rebuilt.coeffs != stored.coeffs {
        return Err(LpError::RowMismatch {
            id: id.to_string(),
            detail: "coefficient lists differ".into(),
        });
    }
    if rebuilt.rhs != stored.rhs {
        return Err(LpError::RowMismatch {
            id: id.to_string(),
            detail: format!("rhs {} vs regenerated {}", stored.rhs, rebuilt.rhs),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64) -> Rat {
        Rat::from_int(n)
    }

    #[test]
    fn row_normalization() {
        let row = Row::new(
            "t",
            vec![(3, r(2)), (1, r(1)), (3, r(-2)), (0, r(5))],
            r(7),
        );
        assert_eq!(row.coeffs, vec![(0, r(5)), (1, r(1))]);
        let x = vec![r(1), r(1), r(0), r(1)];
        assert_eq!(row.lhs_at(&x), r(6));
        assert!(row.satisfied_by(&x));
    }

    #[test]
    fn check_point_reports_box_and_row_violations() {
        let mut sys = RationalSystem::new(
            vec!["a".into(), "b".into()],
            vec![r(1), r(1)],
            r(10),
        );
        sys.push_row(Row::new("sum", vec![(0, r(1)), (1, r(1))], r(1)));
        assert!(sys.check_point(&[r(1), r(0)]).is_ok());
        assert!(sys.check_point(&[r(1), r(1)]).unwrap_err().contains("sum"));
        assert!(sys.check_point(&[r(2), r(0)]).unwrap_err().contains("[0, 1]"));
    }

    struct Fixed(Row);

    impl RowSource for Fixed {
        fn rebuild_row(&self, id: &str) -> Option<Row> {
            (id == self.0.id).then(|| self.0.clone())
        }
    }

    #[test]
    fn regeneration_detects_tampering() {
        let row = Row::new("r0", vec![(0, r(1))], r(1));
        let mut sys = RationalSystem::new(vec!["x".into()], vec![r(1)], r(1));
        sys.push_row(row.clone());
        let src = Fixed(row.clone());
        assert!(regenerate_and_match(&sys, &src, "r0").is_ok());
        assert!(matches!(
            regenerate_and_match(&sys, &src, "nope"),
            Err(LpError::UnknownRow(_))
        ));

        sys.rows[0].rhs = r(2);
        assert!(matches!(
            regenerate_and_match(&sys, &src, "r0"),
            Err(LpError::RowMismatch { .. })
        ));
    }
}

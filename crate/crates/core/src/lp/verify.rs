//! Independent certificate verification.
//!
//! The functions here re-check multiplier certificates from scratch in
//! integer arithmetic: every rational in the system data is cleared by the
//! common denominator `L`, multipliers are already integers scaled by the
//! certificate denominator `D`, and both defining inequalities are evaluated
//! with `BigInt` sums. Nothing in this module calls the solver.

use super::{BoundCertificate, InfeasibilityCertificate, LpError, RationalSystem, Row};
use crate::rat::Rat;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;

/// Least common multiple of every denominator appearing in the system data.
fn data_scale(sys: &RationalSystem) -> BigInt {
    let mut l = BigInt::one();
    let mut absorb = |v: &Rat| {
        let d = v.denom();
        if !d.is_one() {
            l = l.lcm(&d);
        }
    };
    for row in &sys.rows {
        for (_, a) in &row.coeffs {
            absorb(a);
        }
        absorb(&row.rhs);
    }
    for d in &sys.objective {
        absorb(d);
    }
    absorb(&sys.bound);
    l
}

fn scaled_int(v: &Rat, l: &BigInt) -> BigInt {
    v.numer() * (l / v.denom())
}

/// Shared bookkeeping: validates the multiplier maps and accumulates the
/// cleared column sums `sum_r lam_r A_{r,i} + mu_i` (times `L`) and the
/// cleared left total `sum_r lam_r b_r + sum_i mu_i` (times `L`).
fn accumulate(
    sys: &RationalSystem,
    denominator: &BigInt,
    row_multipliers: &BTreeMap<String, BigInt>,
    box_multipliers: &BTreeMap<String, BigInt>,
) -> Result<(Vec<BigInt>, BigInt, BigInt), LpError> {
    if !denominator.is_positive() {
        return Err(LpError::BadCertificate(format!(
            "denominator {} is not positive",
            denominator
        )));
    }
    let mut rows_by_id: BTreeMap<&str, &Row> = BTreeMap::new();
    for row in &sys.rows {
        if rows_by_id.insert(row.id.as_str(), row).is_some() {
            return Err(LpError::DuplicateRow(row.id.clone()));
        }
    }
    let mut var_index: BTreeMap<&str, usize> = BTreeMap::new();
    for (i, name) in sys.var_names.iter().enumerate() {
        if var_index.insert(name.as_str(), i).is_some() {
            return Err(LpError::Other(format!("duplicate variable name {}", name)));
        }
    }

    let l = data_scale(sys);
    let n = sys.num_vars();
    let mut cols = vec![BigInt::zero(); n];
    let mut total = BigInt::zero();

    for (id, lam) in row_multipliers {
        if lam.is_negative() {
            return Err(LpError::BadCertificate(format!(
                "row multiplier {} for `{}` is negative",
                lam, id
            )));
        }
        let row = rows_by_id
            .get(id.as_str())
            .ok_or_else(|| LpError::UnknownRow(id.clone()))?;
        if lam.is_zero() {
            continue;
        }
        for (i, a) in &row.coeffs {
            cols[*i] += lam * scaled_int(a, &l);
        }
        total += lam * scaled_int(&row.rhs, &l);
    }
    for (name, mu) in box_multipliers {
        if mu.is_negative() {
            return Err(LpError::BadCertificate(format!(
                "box multiplier {} for `{}` is negative",
                mu, name
            )));
        }
        let &i = var_index.get(name.as_str()).ok_or_else(|| {
            LpError::BadCertificate(format!("box multiplier names unknown variable {}", name))
        })?;
        cols[i] += mu * &l;
        total += mu * &l;
    }
    Ok((cols, total, l))
}

/// Checks a bound certificate and returns the exact slack
/// `bound - (b^T lam + 1^T mu)`, never negative on success.
pub fn verify_bound_certificate(
    sys: &RationalSystem,
    cert: &BoundCertificate,
) -> Result<Rat, LpError> {
    let (cols, total, l) = accumulate(
        sys,
        &cert.denominator,
        &cert.row_multipliers,
        &cert.box_multipliers,
    )?;
    let d = &cert.denominator;
    for (i, col) in cols.iter().enumerate() {
        let target = d * scaled_int(&sys.objective[i], &l);
        if *col < target {
            return Err(LpError::BadCertificate(format!(
                "column {} undercovered: {} < {} (times D*L)",
                sys.var_names[i], col, target
            )));
        }
    }
    let cap = d * scaled_int(&sys.bound, &l);
    if total > cap {
        return Err(LpError::BadCertificate(format!(
            "multiplier total exceeds the bound: {} > {} (times D*L)",
            total, cap
        )));
    }
    let slack = BigRational::new(cap - total, d * l);
    Ok(Rat::from_big_rational(slack))
}

/// Checks an infeasibility certificate and returns the positive deficit
/// `-(b^T lam + 1^T mu)`.
pub fn verify_infeasibility_certificate(
    sys: &RationalSystem,
    cert: &InfeasibilityCertificate,
) -> Result<Rat, LpError> {
    let (cols, total, l) = accumulate(
        sys,
        &cert.denominator,
        &cert.row_multipliers,
        &cert.box_multipliers,
    )?;
    for (i, col) in cols.iter().enumerate() {
        if col.is_negative() {
            return Err(LpError::BadCertificate(format!(
                "column {} has negative multiplier sum {}",
                sys.var_names[i], col
            )));
        }
    }
    if !total.is_negative() {
        return Err(LpError::BadCertificate(format!(
            "multiplier total {} is not negative, no contradiction reached",
            total
        )));
    }
    let deficit = BigRational::new(-total, &cert.denominator * l);
    Ok(Rat::from_big_rational(deficit))
}

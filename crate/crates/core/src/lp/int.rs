//! Exact integers with a machine-word fast path, backing the simplex
//! engine's fraction-free basis representation. Unlike [`Rat`], values never
//! carry denominators, so the hot pivot loop runs without gcd reductions.

use crate::rat::Rat;
use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use std::cmp::Ordering;
use std::fmt;

#[derive(Clone)]
pub enum Int {
    Small(i64),
    /// Boxed so the enum stays two words; reached only on 63-bit overflow.
    Big(Box<BigInt>),
}

fn from_i128(v: i128) -> Int {
    match i64::try_from(v) {
        Ok(s) => Int::Small(s),
        Err(_) => Int::Big(Box::new(BigInt::from(v))),
    }
}

fn from_big(v: BigInt) -> Int {
    match i64::try_from(&v) {
        Ok(s) => Int::Small(s),
        Err(_) => Int::Big(Box::new(v)),
    }
}

impl Int {
    pub fn zero() -> Self {
        Int::Small(0)
    }

    pub fn from_i64(n: i64) -> Self {
        Int::Small(n)
    }

    pub fn from_bigint(n: BigInt) -> Self {
        from_big(n)
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Int::Small(n) => *n == 0,
            Int::Big(b) => b.is_zero(),
        }
    }

    pub fn signum(&self) -> i8 {
        match self {
            Int::Small(n) => match n.cmp(&0) {
                Ordering::Less => -1,
                Ordering::Equal => 0,
                Ordering::Greater => 1,
            },
            Int::Big(b) => {
                if b.is_negative() {
                    -1
                } else if b.is_zero() {
                    0
                } else {
                    1
                }
            }
        }
    }

    pub fn to_big(&self) -> BigInt {
        match self {
            Int::Small(n) => BigInt::from(*n),
            Int::Big(b) => (**b).clone(),
        }
    }

    pub fn to_rat(&self) -> Rat {
        match self {
            Int::Small(n) => Rat::from_int(*n),
            Int::Big(b) => Rat::from_bigint((**b).clone()),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Int::Small(n) => *n as f64,
            Int::Big(b) => b.to_f64().unwrap_or_else(|| {
                if b.is_negative() {
                    f64::NEG_INFINITY
                } else {
                    f64::INFINITY
                }
            }),
        }
    }

    /// Bit length of the magnitude, as a growth diagnostic.
    pub fn bit_size(&self) -> u64 {
        match self {
            Int::Small(n) => (64 - n.unsigned_abs().leading_zeros()) as u64,
            Int::Big(b) => b.bits(),
        }
    }

    pub fn mul(&self, rhs: &Int) -> Int {
        if let (Int::Small(a), Int::Small(b)) = (self, rhs) {
            return from_i128(*a as i128 * *b as i128);
        }
        from_big(self.to_big() * rhs.to_big())
    }

    pub fn add(&self, rhs: &Int) -> Int {
        if let (Int::Small(a), Int::Small(b)) = (self, rhs) {
            return from_i128(*a as i128 + *b as i128);
        }
        from_big(self.to_big() + rhs.to_big())
    }

    /// `(p * a) / d`, which the caller guarantees divides exactly.
    pub fn mul_div_exact(p: &Int, a: &Int, d: &Int) -> Int {
        if let (Int::Small(p), Int::Small(a), Int::Small(d)) = (p, a, d) {
            let num = *p as i128 * *a as i128;
            let den = *d as i128;
            debug_assert!(den != 0 && num % den == 0, "inexact division");
            return from_i128(num / den);
        }
        let num = p.to_big() * a.to_big();
        let den = d.to_big();
        debug_assert!((&num % &den).is_zero(), "inexact division");
        from_big(num / den)
    }

    /// The two-term update `(p * a - q * b) / d`, which divides exactly when
    /// the inputs come from an adjugate matrix (`d` the old determinant, `p`
    /// the new one).
    pub fn fused_update(p: &Int, a: &Int, q: &Int, b: &Int, d: &Int) -> Int {
        if let (Int::Small(p), Int::Small(a), Int::Small(q), Int::Small(b), Int::Small(d)) =
            (p, a, q, b, d)
        {
            let num = *p as i128 * *a as i128 - *q as i128 * *b as i128;
            let den = *d as i128;
            debug_assert!(den != 0 && num % den == 0, "inexact division");
            return from_i128(num / den);
        }
        let num = p.to_big() * a.to_big() - q.to_big() * b.to_big();
        let den = d.to_big();
        debug_assert!((&num % &den).is_zero(), "inexact division");
        from_big(num / den)
    }

    /// Orders `a * b` against `c * e` without materializing the products in
    /// the common machine-word case.
    pub fn prod_cmp(a: &Int, b: &Int, c: &Int, e: &Int) -> Ordering {
        if let (Int::Small(a), Int::Small(b), Int::Small(c), Int::Small(e)) = (a, b, c, e) {
            return (*a as i128 * *b as i128).cmp(&(*c as i128 * *e as i128));
        }
        (a.to_big() * b.to_big()).cmp(&(c.to_big() * e.to_big()))
    }
}

/// Exact value of `n / d` as a rational; `d` must be nonzero.
pub fn frac(n: &Int, d: &Int) -> Rat {
    if let (Int::Small(n), Int::Small(d)) = (n, d) {
        return Rat::new(*n, *d);
    }
    Rat::from_big_rational(num_rational::BigRational::new(n.to_big(), d.to_big()))
}

impl fmt::Debug for Int {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for Int {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Int::Small(n) => write!(f, "{}", n),
            Int::Big(b) => write!(f, "{}", b),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fused_update_matches_bigint_reference() {
        let big = Int::from_bigint(BigInt::from(i64::MAX) * 5);
        let cases = [
            (Int::from_i64(6), Int::from_i64(35), Int::from_i64(4), Int::from_i64(15), Int::from_i64(3)),
            (big.clone(), Int::from_i64(3), Int::from_i64(5), big.clone(), Int::from_i64(1)),
        ];
        for (p, a, q, b, d) in &cases {
            let got = Int::fused_update(p, a, q, b, d);
            let want = (p.to_big() * a.to_big() - q.to_big() * b.to_big()) / d.to_big();
            assert_eq!(got.to_big(), want);
        }
    }

    #[test]
    fn small_big_roundtrip_and_signs() {
        let v = from_i128(i64::MAX as i128 + 1);
        assert!(matches!(v, Int::Big(_)));
        assert_eq!(v.signum(), 1);
        let w = Int::from_i64(-7);
        assert_eq!(w.signum(), -1);
        assert_eq!(w.to_rat(), Rat::from_int(-7));
        assert_eq!(frac(&w, &Int::from_i64(-14)), Rat::new(1, 2));
    }

    #[test]
    fn product_ordering() {
        use Ordering::*;
        assert_eq!(
            Int::prod_cmp(&Int::from_i64(3), &Int::from_i64(5), &Int::from_i64(4), &Int::from_i64(4)),
            Less
        );
        let b = Int::from_bigint(BigInt::from(i64::MAX) * 2);
        assert_eq!(Int::prod_cmp(&b, &Int::from_i64(1), &Int::from_i64(1), &b), Equal);
    }
}

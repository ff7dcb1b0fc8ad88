//! Exact rational arithmetic with a machine-word fast path.
//!
//! `Rat` behaves like `BigRational` but keeps values in a reduced `i64/i64`
//! representation while they fit, falling back to arbitrary precision only on
//! overflow. All operations are exact; nothing ever rounds.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;
use std::fmt;

#[derive(Clone)]
pub enum Rat {
    /// Reduced fraction `num/den` with `den > 0`, `gcd(|num|, den) == 1`.
    Small(i64, i64),
    /// Reduced arbitrary-precision fraction that does not fit in `Small`.
    Big(Box<BigRational>),
}

fn gcd_i128(mut a: i128, mut b: i128) -> i128 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Builds a `Rat` from a reduced i128 fraction, demoting to `Small` if it fits.
fn from_i128_reduced(num: i128, den: i128) -> Rat {
    debug_assert!(den > 0);
    if num >= i64::MIN as i128 && num <= i64::MAX as i128 && den <= i64::MAX as i128 {
        Rat::Small(num as i64, den as i64)
    } else {
        Rat::Big(Box::new(BigRational::new(num.into(), den.into())))
    }
}

fn from_i128(mut num: i128, mut den: i128) -> Rat {
    debug_assert!(den != 0);
    if den < 0 {
        num = -num;
        den = -den;
    }
    if num == 0 {
        return Rat::Small(0, 1);
    }
    let g = gcd_i128(num, den);
    from_i128_reduced(num / g, den / g)
}

/// Demotes a `BigRational` to `Small` when it fits a machine word.
fn from_big(r: BigRational) -> Rat {
    if let (Some(n), Some(d)) = (i64::try_from(r.numer()).ok(), i64::try_from(r.denom()).ok()) {
        Rat::Small(n, d)
    } else {
        Rat::Big(Box::new(r))
    }
}

impl Rat {
    pub fn zero() -> Self {
        Rat::Small(0, 1)
    }

    pub fn one() -> Self {
        Rat::Small(1, 1)
    }

    pub fn from_int(n: i64) -> Self {
        Rat::Small(n, 1)
    }

    /// Exact fraction `num/den`; panics if `den == 0`.
    pub fn new(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        from_i128(num as i128, den as i128)
    }

    pub fn from_bigint(n: BigInt) -> Self {
        from_big(BigRational::from_integer(n))
    }

    pub fn from_big_rational(r: BigRational) -> Self {
        from_big(r)
    }

    pub fn to_big_rational(&self) -> BigRational {
        match self {
            Rat::Small(n, d) => BigRational::new((*n).into(), (*d).into()),
            Rat::Big(b) => (**b).clone(),
        }
    }

    pub fn numer(&self) -> BigInt {
        match self {
            Rat::Small(n, _) => (*n).into(),
            Rat::Big(b) => b.numer().clone(),
        }
    }

    pub fn denom(&self) -> BigInt {
        match self {
            Rat::Small(_, d) => (*d).into(),
            Rat::Big(b) => b.denom().clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Rat::Small(n, _) => *n == 0,
            Rat::Big(b) => b.is_zero(),
        }
    }

    pub fn is_positive(&self) -> bool {
        match self {
            Rat::Small(n, _) => *n > 0,
            Rat::Big(b) => b.is_positive(),
        }
    }

    pub fn is_negative(&self) -> bool {
        match self {
            Rat::Small(n, _) => *n < 0,
            Rat::Big(b) => b.is_negative(),
        }
    }

    pub fn is_integer(&self) -> bool {
        match self {
            Rat::Small(_, d) => *d == 1,
            Rat::Big(b) => b.is_integer(),
        }
    }

    pub fn is_one(&self) -> bool {
        matches!(self, Rat::Small(1, 1)) || matches!(self, Rat::Big(b) if b.is_one())
    }

    pub fn abs(&self) -> Rat {
        if self.is_negative() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    pub fn recip(&self) -> Rat {
        assert!(!self.is_zero(), "division by zero");
        match self {
            Rat::Small(n, d) => {
                if *n > 0 {
                    Rat::Small(*d, *n)
                } else {
                    from_i128(-(*d as i128), -(*n as i128))
                }
            }
            Rat::Big(b) => from_big(b.recip()),
        }
    }

    /// Exact integer value, if the fraction is an integer that fits `i64`.
    pub fn as_i64(&self) -> Option<i64> {
        match self {
            Rat::Small(n, 1) => Some(*n),
            Rat::Small(..) => None,
            Rat::Big(b) => {
                if b.is_integer() {
                    i64::try_from(b.numer()).ok()
                } else {
                    None
                }
            }
        }
    }

    /// Upper bound on the bit length of numerator and denominator, as a
    /// growth diagnostic for long pivot sequences.
    pub fn bit_size(&self) -> u64 {
        match self {
            Rat::Small(n, d) => {
                let nb = 64 - n.unsigned_abs().leading_zeros();
                let db = 64 - d.leading_zeros();
                nb.max(db) as u64
            }
            Rat::Big(b) => b.numer().bits().max(b.denom().bits()),
        }
    }

    /// Nearest-value float approximation, for use as a search heuristic only.
    pub fn to_f64(&self) -> f64 {
        match self {
            Rat::Small(n, d) => *n as f64 / *d as f64,
            Rat::Big(b) => {
                use num_traits::ToPrimitive;
                b.to_f64().unwrap_or_else(|| {
                    if b.is_negative() {
                        f64::NEG_INFINITY
                    } else {
                        f64::INFINITY
                    }
                })
            }
        }
    }
}

impl Default for Rat {
    fn default() -> Self {
        Rat::zero()
    }
}

impl fmt::Debug for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rat::Small(n, 1) => write!(f, "{}", n),
            Rat::Small(n, d) => write!(f, "{}/{}", n, d),
            Rat::Big(b) => write!(f, "{}", b),
        }
    }
}

impl PartialEq for Rat {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Rat {}

impl PartialOrd for Rat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rat {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Rat::Small(a, b), Rat::Small(c, d)) => {
                // b, d > 0 so cross-multiplication preserves order.
                (*a as i128 * *d as i128).cmp(&(*c as i128 * *b as i128))
            }
            _ => self.to_big_rational().cmp(&other.to_big_rational()),
        }
    }
}

impl std::ops::Neg for Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        match self {
            Rat::Small(n, d) => from_i128(-(n as i128), d as i128),
            Rat::Big(b) => from_big(-*b),
        }
    }
}

impl std::ops::Neg for &Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        -self.clone()
    }
}

macro_rules! small_pair {
    ($lhs:expr, $rhs:expr) => {
        match ($lhs, $rhs) {
            (Rat::Small(a, b), Rat::Small(c, d)) => {
                Some((*a as i128, *b as i128, *c as i128, *d as i128))
            }
            _ => None,
        }
    };
}

impl<'b> std::ops::Add<&'b Rat> for &Rat {
    type Output = Rat;
    fn add(self, rhs: &'b Rat) -> Rat {
        if let Some((a, b, c, d)) = small_pair!(self, rhs) {
            // i64 magnitudes: a*d + c*b < 2^127, b*d < 2^126 -- no overflow.
            return from_i128(a * d + c * b, b * d);
        }
        from_big(self.to_big_rational() + rhs.to_big_rational())
    }
}

impl<'b> std::ops::Sub<&'b Rat> for &Rat {
    type Output = Rat;
    fn sub(self, rhs: &'b Rat) -> Rat {
        if let Some((a, b, c, d)) = small_pair!(self, rhs) {
            return from_i128(a * d - c * b, b * d);
        }
        from_big(self.to_big_rational() - rhs.to_big_rational())
    }
}

impl<'b> std::ops::Mul<&'b Rat> for &Rat {
    type Output = Rat;
    fn mul(self, rhs: &'b Rat) -> Rat {
        if let Some((a, b, c, d)) = small_pair!(self, rhs) {
            // Cross-reduce first so the products stay well inside i128.
            let g1 = gcd_i128(a, d).max(1);
            let g2 = gcd_i128(c, b).max(1);
            return from_i128((a / g1) * (c / g2), (b / g2) * (d / g1));
        }
        from_big(self.to_big_rational() * rhs.to_big_rational())
    }
}

impl<'b> std::ops::Div<&'b Rat> for &Rat {
    type Output = Rat;
    fn div(self, rhs: &'b Rat) -> Rat {
        assert!(!rhs.is_zero(), "division by zero");
        self * &rhs.recip()
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl std::ops::$trait<Rat> for Rat {
            type Output = Rat;
            fn $method(self, rhs: Rat) -> Rat {
                (&self).$method(&rhs)
            }
        }
        impl std::ops::$trait<&Rat> for Rat {
            type Output = Rat;
            fn $method(self, rhs: &Rat) -> Rat {
                (&self).$method(rhs)
            }
        }
        impl std::ops::$trait<Rat> for &Rat {
            type Output = Rat;
            fn $method(self, rhs: Rat) -> Rat {
                self.$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl std::ops::AddAssign<&Rat> for Rat {
    fn add_assign(&mut self, rhs: &Rat) {
        *self = &*self + rhs;
    }
}

impl std::ops::SubAssign<&Rat> for Rat {
    fn sub_assign(&mut self, rhs: &Rat) {
        *self = &*self - rhs;
    }
}

impl std::ops::MulAssign<&Rat> for Rat {
    fn mul_assign(&mut self, rhs: &Rat) {
        *self = &*self * rhs;
    }
}

impl From<i64> for Rat {
    fn from(n: i64) -> Self {
        Rat::from_int(n)
    }
}

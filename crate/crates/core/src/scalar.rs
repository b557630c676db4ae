//! Dual-mode arithmetic: exact rationals where the map data allows it,
//! IEEE doubles elsewhere. A `Scalar` stays exact as long as every operand
//! is exact; any float operand poisons the result to float.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Signed, ToPrimitive, Zero};
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

pub type Rat = BigRational;

/// Geometric comparison tolerance used in float mode (vertex identity,
/// interval merging). Exact mode compares exactly.
pub const EPS_GEOM: f64 = 1e-10;
/// Root-finding tolerance for non-affine branches.
pub const EPS_ROOT: f64 = 1e-12;
/// Eigenvector / eigenvalue tolerance for Perron data.
pub const EPS_EIG: f64 = 1e-12;

#[derive(Clone, Debug)]
pub enum Scalar {
    Exact(Rat),
    Float(f64),
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::Exact(Rat::zero())
    }

    pub fn one() -> Self {
        Scalar::from_int(1)
    }

    pub fn from_int(n: i64) -> Self {
        Scalar::Exact(Rat::from_integer(BigInt::from(n)))
    }

    pub fn ratio(p: i64, q: i64) -> Self {
        assert!(q != 0, "zero denominator");
        Scalar::Exact(Rat::new(BigInt::from(p), BigInt::from(q)))
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Exact(_))
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Exact(r) => r.to_f64().unwrap_or(f64::NAN),
            Scalar::Float(x) => *x,
        }
    }

    pub fn abs(&self) -> Scalar {
        match self {
            Scalar::Exact(r) => Scalar::Exact(r.abs()),
            Scalar::Float(x) => Scalar::Float(x.abs()),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Exact(r) => r.is_zero(),
            Scalar::Float(x) => *x == 0.0,
        }
    }

    pub fn signum(&self) -> i32 {
        match self {
            Scalar::Exact(r) => {
                if r.is_zero() {
                    0
                } else if r.is_positive() {
                    1
                } else {
                    -1
                }
            }
            Scalar::Float(x) => {
                if *x == 0.0 {
                    0
                } else if *x > 0.0 {
                    1
                } else {
                    -1
                }
            }
        }
    }

    /// Exact equality when both sides are exact, `eps`-closeness otherwise.
    pub fn approx_eq(&self, other: &Scalar, eps: f64) -> bool {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a == b,
            _ => (self.to_f64() - other.to_f64()).abs() <= eps,
        }
    }

    pub fn min(self, other: Scalar) -> Scalar {
        if self <= other {
            self
        } else {
            other
        }
    }

    pub fn max(self, other: Scalar) -> Scalar {
        if self >= other {
            self
        } else {
            other
        }
    }

    pub fn midpoint(&self, other: &Scalar) -> Scalar {
        (self.clone() + other.clone()) / Scalar::from_int(2)
    }

    /// Parses "p/q", decimal ("1.8"), or integer text into an exact rational.
    pub fn parse_exact(text: &str) -> Option<Scalar> {
        let t = text.trim();
        if let Some((p, q)) = t.split_once('/') {
            let num: BigInt = p.trim().parse().ok()?;
            let den: BigInt = q.trim().parse().ok()?;
            if den.is_zero() {
                return None;
            }
            return Some(Scalar::Exact(Rat::new(num, den)));
        }
        if let Some((int, frac)) = t.split_once('.') {
            let sign = if int.trim_start().starts_with('-') { -1 } else { 1 };
            let int_part: BigInt = if int.is_empty() || int == "-" {
                BigInt::zero()
            } else {
                int.parse().ok()?
            };
            let digits = frac.trim();
            if digits.is_empty() || !digits.chars().all(|c| c.is_ascii_digit()) {
                return None;
            }
            let num: BigInt = digits.parse().ok()?;
            let den = BigInt::from(10u32).pow(digits.len() as u32);
            let frac_part = Rat::new(num * BigInt::from(sign), den);
            return Some(Scalar::Exact(Rat::from_integer(int_part) + frac_part));
        }
        let n: BigInt = t.parse().ok()?;
        Some(Scalar::Exact(Rat::from_integer(n)))
    }
}

impl From<f64> for Scalar {
    fn from(x: f64) -> Self {
        Scalar::Float(x)
    }
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a == b,
            _ => self.to_f64() == other.to_f64(),
        }
    }
}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a.partial_cmp(b),
            _ => self.to_f64().partial_cmp(&other.to_f64()),
        }
    }
}

macro_rules! scalar_binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                match (self, rhs) {
                    (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a $op b),
                    (a, b) => Scalar::Float(a.to_f64() $op b.to_f64()),
                }
            }
        }
        impl<'a> $trait<&'a Scalar> for &'a Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &'a Scalar) -> Scalar {
                self.clone() $op rhs.clone()
            }
        }
    };
}

scalar_binop!(Add, add, +);
scalar_binop!(Sub, sub, -);
scalar_binop!(Mul, mul, *);

impl Div for Scalar {
    type Output = Scalar;
    fn div(self, rhs: Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Exact(a), Scalar::Exact(b)) if !b.is_zero() => Scalar::Exact(a / b),
            (a, b) => Scalar::Float(a.to_f64() / b.to_f64()),
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Exact(r) => Scalar::Exact(-r),
            Scalar::Float(x) => Scalar::Float(-x),
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(r) => write!(f, "{}", r),
            Scalar::Float(x) => write!(f, "{}", x),
        }
    }
}

/// Try to recover an exact rational from an f64 (used when ingesting float
/// data into exact-capable structures).
pub fn rat_from_f64(x: f64) -> Option<Rat> {
    Rat::from_f64(x)
}

/// An open subinterval of [0,1] with `lo < hi`; `lo >= hi` encodes empty.
#[derive(Clone, Debug, PartialEq)]
pub struct Interval {
    pub lo: Scalar,
    pub hi: Scalar,
}

impl Interval {
    pub fn new(lo: Scalar, hi: Scalar) -> Self {
        Interval { lo, hi }
    }

    pub fn unit() -> Self {
        Interval::new(Scalar::from_int(0), Scalar::from_int(1))
    }

    pub fn is_empty(&self) -> bool {
        self.lo >= self.hi
    }

    pub fn length(&self) -> Scalar {
        if self.is_empty() {
            Scalar::zero()
        } else {
            self.hi.clone() - self.lo.clone()
        }
    }

    pub fn midpoint(&self) -> Scalar {
        self.lo.midpoint(&self.hi)
    }

    pub fn contains(&self, x: &Scalar) -> bool {
        !self.is_empty() && *x > self.lo && *x < self.hi
    }

    pub fn intersect(&self, other: &Interval) -> Interval {
        Interval::new(
            self.lo.clone().max(other.lo.clone()),
            self.hi.clone().min(other.hi.clone()),
        )
    }

    /// Interior overlap with positive length.
    pub fn overlaps(&self, other: &Interval) -> bool {
        !self.intersect(other).is_empty()
    }

    pub fn approx_eq(&self, other: &Interval, eps: f64) -> bool {
        self.lo.approx_eq(&other.lo, eps) && self.hi.approx_eq(&other.hi, eps)
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        (self.lo.to_f64(), self.hi.to_f64())
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.lo, self.hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_stays_exact() {
        let a = Scalar::ratio(1, 3);
        let b = Scalar::ratio(1, 6);
        let c = a + b;
        assert!(c.is_exact());
        assert_eq!(c, Scalar::ratio(1, 2));
    }

    #[test]
    fn float_poisons() {
        let a = Scalar::ratio(1, 3);
        let b = Scalar::Float(0.5);
        assert!(!(a + b).is_exact());
    }

    #[test]
    fn parse_exact_forms() {
        assert_eq!(Scalar::parse_exact("9/5"), Some(Scalar::ratio(9, 5)));
        assert_eq!(Scalar::parse_exact("1.8"), Some(Scalar::ratio(9, 5)));
        assert_eq!(Scalar::parse_exact("2"), Some(Scalar::from_int(2)));
        assert_eq!(Scalar::parse_exact("-0.25"), Some(Scalar::ratio(-1, 4)));
        assert_eq!(Scalar::parse_exact("1/0"), None);
    }

    #[test]
    fn interval_basics() {
        let i = Interval::new(Scalar::ratio(1, 4), Scalar::ratio(3, 4));
        assert_eq!(i.length(), Scalar::ratio(1, 2));
        assert!(i.contains(&Scalar::ratio(1, 2)));
        assert!(!i.contains(&Scalar::ratio(1, 4)));
        let j = Interval::new(Scalar::ratio(1, 2), Scalar::from_int(1));
        assert_eq!(i.intersect(&j).length(), Scalar::ratio(1, 4));
        let empty = Interval::new(Scalar::from_int(1), Scalar::from_int(0));
        assert!(empty.is_empty());
        assert_eq!(empty.length(), Scalar::zero());
    }
}

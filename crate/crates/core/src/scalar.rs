//! Scalar arithmetic with two interchangeable backends.
//!
//! Every quantity in this crate is a [`ScalarValue`]: either an exact
//! arbitrary-precision rational or a double-precision float paired with an
//! absolute tolerance. Sign classification (`Negative` / `Zero` / `Positive`)
//! is total and deterministic on both backends; all geometric predicates in
//! the crate reduce to it, so exact groups give exact answers and float
//! groups give ε-robust ones.

use num::rational::BigRational;
use num::{BigInt, Signed, ToPrimitive, Zero as NumZero};
use std::cmp::Ordering;
use std::fmt;

/// Default absolute tolerance for the float backend.
pub const DEFAULT_EPSILON: f64 = 1e-9;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    pub fn is_nonnegative(self) -> bool {
        !matches!(self, Sign::Negative)
    }
    pub fn is_nonpositive(self) -> bool {
        !matches!(self, Sign::Positive)
    }
}

/// Backend tag: exact rationals, or floats with an absolute tolerance.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Backend {
    Exact,
    Approx { eps: f64 },
}

impl Backend {
    pub fn approx_default() -> Backend {
        Backend::Approx { eps: DEFAULT_EPSILON }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Backend::Exact)
    }

    pub fn eps(&self) -> f64 {
        match self {
            Backend::Exact => 0.0,
            Backend::Approx { eps } => *eps,
        }
    }

    pub fn zero(&self) -> ScalarValue {
        self.from_i64(0)
    }

    pub fn one(&self) -> ScalarValue {
        self.from_i64(1)
    }

    pub fn from_i64(&self, n: i64) -> ScalarValue {
        match self {
            Backend::Exact => ScalarValue::Exact(BigRational::from_integer(BigInt::from(n))),
            Backend::Approx { eps } => ScalarValue::Approx { value: n as f64, eps: *eps },
        }
    }

    /// p/q with q != 0.
    pub fn from_ratio(&self, p: i64, q: i64) -> ScalarValue {
        assert!(q != 0, "zero denominator");
        match self {
            Backend::Exact => {
                ScalarValue::Exact(BigRational::new(BigInt::from(p), BigInt::from(q)))
            }
            Backend::Approx { eps } => ScalarValue::Approx { value: p as f64 / q as f64, eps: *eps },
        }
    }

    /// Only meaningful on the float backend; panics on the exact one (a float
    /// has no canonical preimage among the rationals we would want).
    pub fn from_f64(&self, v: f64) -> ScalarValue {
        match self {
            Backend::Exact => panic!("cannot inject a float into the exact backend"),
            Backend::Approx { eps } => ScalarValue::Approx { value: v, eps: *eps },
        }
    }

    pub fn from_big(&self, r: BigRational) -> ScalarValue {
        match self {
            Backend::Exact => ScalarValue::Exact(r),
            Backend::Approx { eps } => ScalarValue::Approx {
                value: r.to_f64().expect("rational out of f64 range"),
                eps: *eps,
            },
        }
    }
}

/// A single number on one of the two backends.
#[derive(Clone)]
pub enum ScalarValue {
    Exact(BigRational),
    Approx { value: f64, eps: f64 },
}

impl ScalarValue {
    pub fn backend(&self) -> Backend {
        match self {
            ScalarValue::Exact(_) => Backend::Exact,
            ScalarValue::Approx { eps, .. } => Backend::Approx { eps: *eps },
        }
    }

    pub fn sign(&self) -> Sign {
        match self {
            ScalarValue::Exact(r) => {
                if r.is_zero() {
                    Sign::Zero
                } else if r.is_positive() {
                    Sign::Positive
                } else {
                    Sign::Negative
                }
            }
            ScalarValue::Approx { value, eps } => {
                if value.abs() <= *eps {
                    Sign::Zero
                } else if *value > 0.0 {
                    Sign::Positive
                } else {
                    Sign::Negative
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.sign() == Sign::Zero
    }

    pub fn is_positive(&self) -> bool {
        self.sign() == Sign::Positive
    }

    pub fn is_negative(&self) -> bool {
        self.sign() == Sign::Negative
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            ScalarValue::Exact(r) => r.to_f64().expect("rational out of f64 range"),
            ScalarValue::Approx { value, .. } => *value,
        }
    }

    pub fn as_exact(&self) -> Option<&BigRational> {
        match self {
            ScalarValue::Exact(r) => Some(r),
            ScalarValue::Approx { .. } => None,
        }
    }

    pub fn neg(&self) -> ScalarValue {
        match self {
            ScalarValue::Exact(r) => ScalarValue::Exact(-r),
            ScalarValue::Approx { value, eps } => ScalarValue::Approx { value: -value, eps: *eps },
        }
    }

    pub fn abs(&self) -> ScalarValue {
        if self.is_negative() {
            self.neg()
        } else {
            self.clone()
        }
    }

    pub fn add(&self, other: &ScalarValue) -> ScalarValue {
        match (self, other) {
            (ScalarValue::Exact(a), ScalarValue::Exact(b)) => ScalarValue::Exact(a + b),
            (ScalarValue::Approx { value: a, eps: e1 }, ScalarValue::Approx { value: b, eps: e2 }) => {
                ScalarValue::Approx { value: a + b, eps: e1.max(*e2) }
            }
            _ => panic!("mixed scalar backends"),
        }
    }

    pub fn sub(&self, other: &ScalarValue) -> ScalarValue {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &ScalarValue) -> ScalarValue {
        match (self, other) {
            (ScalarValue::Exact(a), ScalarValue::Exact(b)) => ScalarValue::Exact(a * b),
            (ScalarValue::Approx { value: a, eps: e1 }, ScalarValue::Approx { value: b, eps: e2 }) => {
                ScalarValue::Approx { value: a * b, eps: e1.max(*e2) }
            }
            _ => panic!("mixed scalar backends"),
        }
    }

    /// Exact division; the divisor must be nonzero under sign classification.
    pub fn div(&self, other: &ScalarValue) -> ScalarValue {
        assert!(!other.is_zero(), "division by (classified) zero");
        match (self, other) {
            (ScalarValue::Exact(a), ScalarValue::Exact(b)) => ScalarValue::Exact(a / b),
            (ScalarValue::Approx { value: a, eps: e1 }, ScalarValue::Approx { value: b, eps: e2 }) => {
                ScalarValue::Approx { value: a / b, eps: e1.max(*e2) }
            }
            _ => panic!("mixed scalar backends"),
        }
    }

    /// Sign of `self - other`; the workhorse comparison.
    pub fn cmp_sign(&self, other: &ScalarValue) -> Sign {
        self.sub(other).sign()
    }

    pub fn lt(&self, other: &ScalarValue) -> bool {
        self.cmp_sign(other) == Sign::Negative
    }

    pub fn le(&self, other: &ScalarValue) -> bool {
        self.cmp_sign(other) != Sign::Positive
    }

    pub fn gt(&self, other: &ScalarValue) -> bool {
        self.cmp_sign(other) == Sign::Positive
    }

    pub fn ge(&self, other: &ScalarValue) -> bool {
        self.cmp_sign(other) != Sign::Negative
    }

    /// Total order on raw values (no tolerance): used only to pick pivots and
    /// canonical representatives deterministically, never as a predicate.
    pub fn raw_cmp(&self, other: &ScalarValue) -> Ordering {
        match (self, other) {
            (ScalarValue::Exact(a), ScalarValue::Exact(b)) => a.cmp(b),
            (ScalarValue::Approx { value: a, .. }, ScalarValue::Approx { value: b, .. }) => {
                a.partial_cmp(b).expect("NaN in scalar")
            }
            _ => panic!("mixed scalar backends"),
        }
    }

    pub fn min_raw(&self, other: &ScalarValue) -> ScalarValue {
        if self.raw_cmp(other) == Ordering::Greater {
            other.clone()
        } else {
            self.clone()
        }
    }

    pub fn max_raw(&self, other: &ScalarValue) -> ScalarValue {
        if self.raw_cmp(other) == Ordering::Less {
            other.clone()
        } else {
            self.clone()
        }
    }

    /// `|self|` larger under the raw order; pivot selection helper.
    pub fn abs_gt_raw(&self, other: &ScalarValue) -> bool {
        self.abs().raw_cmp(&other.abs()) == Ordering::Greater
    }
}

impl PartialEq for ScalarValue {
    fn eq(&self, other: &Self) -> bool {
        self.cmp_sign(other) == Sign::Zero
    }
}

impl fmt::Debug for ScalarValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalarValue::Exact(r) => write!(f, "{}", r),
            ScalarValue::Approx { value, .. } => write!(f, "{}", value),
        }
    }
}

impl fmt::Display for ScalarValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_sign_is_exact() {
        let b = Backend::Exact;
        assert_eq!(b.from_ratio(1, 1_000_000_000_000).sign(), Sign::Positive);
        assert_eq!(b.from_i64(0).sign(), Sign::Zero);
        assert_eq!(b.from_ratio(-1, 7).sign(), Sign::Negative);
    }

    #[test]
    fn approx_sign_uses_epsilon() {
        let b = Backend::Approx { eps: 1e-9 };
        assert_eq!(b.from_f64(5e-10).sign(), Sign::Zero);
        assert_eq!(b.from_f64(-5e-10).sign(), Sign::Zero);
        assert_eq!(b.from_f64(2e-9).sign(), Sign::Positive);
        assert_eq!(b.from_f64(-2e-9).sign(), Sign::Negative);
    }

    #[test]
    fn arithmetic_round_trip() {
        let b = Backend::Exact;
        let x = b.from_ratio(2, 3);
        let y = b.from_ratio(-1, 6);
        assert_eq!(x.add(&y), b.from_ratio(1, 2));
        assert_eq!(x.mul(&y), b.from_ratio(-1, 9));
        assert_eq!(x.div(&y), b.from_i64(-4));
        assert_eq!(x.sub(&x).sign(), Sign::Zero);
    }

    #[test]
    #[should_panic(expected = "mixed scalar backends")]
    fn mixing_backends_panics() {
        let _ = Backend::Exact.from_i64(1).add(&Backend::approx_default().from_i64(1));
    }
}

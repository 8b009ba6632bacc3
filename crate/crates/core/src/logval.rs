//! Logarithms of rationals, `log(q) / k`, compared exactly through their
//! radicands: `log(a)/k <= log(b)/l` iff `a^l <= b^k`.

use std::cmp::Ordering;
use std::fmt;

use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

use crate::rational::{format_rational, ln_approx, lt_exp, pow, to_f64, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LogValue {
    radicand: Rational,
    root: u64,
}

impl LogValue {
    pub fn new(radicand: Rational, root: u64) -> Self {
        assert!(radicand.is_positive(), "log of a non-positive radicand");
        assert!(root >= 1, "root must be positive");
        LogValue { radicand, root }
    }

    pub fn zero() -> Self {
        LogValue::new(Rational::one(), 1)
    }

    /// `log(n) / k` for small integers.
    pub fn of(n: i64, k: u64) -> Self {
        LogValue::new(Rational::from_integer(n.into()), k)
    }

    pub fn radicand(&self) -> &Rational {
        &self.radicand
    }

    pub fn root(&self) -> u64 {
        self.root
    }

    pub fn is_zero(&self) -> bool {
        self.radicand.is_one()
    }

    /// Divides the value by `k` (multiplies the root).
    pub fn div(&self, k: u64) -> Self {
        LogValue::new(self.radicand.clone(), self.root * k)
    }

    /// Multiplies the value by `k` (raises the radicand).
    pub fn mul(&self, k: u64) -> Self {
        LogValue::new(pow(&self.radicand, k), self.root)
    }

    /// Display-only decimal approximation.
    pub fn approx(&self) -> f64 {
        ln_approx(&self.radicand) / self.root as f64
    }

    /// Decimal approximation of `self - other` that stays accurate when the
    /// two values are close.
    pub fn diff_approx(&self, other: &LogValue) -> f64 {
        let a = pow(&self.radicand, other.root);
        let b = pow(&other.radicand, self.root);
        let k = (self.root * other.root) as f64;
        let rel = (&a - &b) / &b;
        let x = to_f64(&rel);
        if x.abs() < 0.5 {
            x.ln_1p() / k
        } else {
            (ln_approx(&a) - ln_approx(&b)) / k
        }
    }

    /// Exact test of `self < other + eps`.
    pub fn lt_plus(&self, other: &LogValue, eps: &Rational) -> bool {
        // k2 log a - k1 log b < k1 k2 eps  <=>  a^k2 / b^k1 < exp(k1 k2 eps)
        let lhs = pow(&self.radicand, other.root) / pow(&other.radicand, self.root);
        let x = eps * Rational::from_integer((self.root * other.root).into());
        lt_exp(&lhs, &x)
    }

    /// Exact test of `self + eps <= other`, i.e. `!(other < self + eps)`.
    pub fn plus_le(&self, eps: &Rational, other: &LogValue) -> bool {
        !other.lt_plus(self, eps)
    }

    pub fn max(a: LogValue, b: LogValue) -> LogValue {
        if a >= b {
            a
        } else {
            b
        }
    }

    /// Record form `log(p/q)/k` used in reports.
    pub fn record(&self) -> LogRecord {
        LogRecord {
            radicand: format_rational(&self.radicand),
            root: self.root,
            approx: format!("{:.12}", self.approx()),
        }
    }
}

impl Ord for LogValue {
    fn cmp(&self, other: &Self) -> Ordering {
        if self.root == other.root {
            return self.radicand.cmp(&other.radicand);
        }
        pow(&self.radicand, other.root).cmp(&pow(&other.radicand, self.root))
    }
}

impl PartialOrd for LogValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for LogValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.radicand.is_one() {
            return write!(f, "0");
        }
        let rad = if self.radicand.denom().is_one() {
            self.radicand.numer().to_string()
        } else {
            format_rational(&self.radicand)
        };
        let s = if rad.len() > 40 { format!("{}…({} digits)", &rad[..12], rad.len()) } else { rad };
        if self.root == 1 {
            write!(f, "log({s})")
        } else {
            write!(f, "log({s})/{}", self.root)
        }
    }
}

/// Serializable form of a [`LogValue`]; `approx` is a display-only decimal
/// string.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogRecord {
    pub radicand: String,
    pub root: u64,
    pub approx: String,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn exact_ordering() {
        assert_eq!(LogValue::of(3, 2).cmp(&LogValue::of(9, 4)), Ordering::Equal);
        assert!(LogValue::of(3, 4) < LogValue::of(3, 3));
        assert!(LogValue::of(2, 1) < LogValue::of(3, 1));
        assert!(LogValue::zero() < LogValue::of(3, 100));
    }

    #[test]
    fn offsets() {
        let a = LogValue::of(3, 2);
        // log 3 / 2 = 0.5493..
        assert!(a.lt_plus(&LogValue::of(3, 4), &rat(3, 10)));
        assert!(!a.lt_plus(&LogValue::of(3, 4), &rat(27, 100)));
        assert!(LogValue::of(3, 4).plus_le(&rat(27, 100), &a));
    }

    #[test]
    fn display() {
        assert_eq!(LogValue::of(3, 2).to_string(), "log(3)/2");
        assert_eq!(LogValue::zero().to_string(), "0");
        assert!((LogValue::of(3, 2).diff_approx(&LogValue::of(3, 3)) - (3f64.ln() / 6.0)).abs() < 1e-15);
    }
}

//! Exact rational helpers: canonical `p/q` text form, exponential brackets
//! and simplest-rational search.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational number, always kept in lowest terms with a
/// positive denominator.
pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Formats as `p/q`; the denominator is always written, even when it is 1.
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

fn parse_digits(s: &str, allow_sign: bool) -> Option<BigInt> {
    let (neg, digits) = match s.strip_prefix('-') {
        Some(rest) if allow_sign => (true, rest),
        _ => (false, s),
    };
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    if digits.len() > 1 && digits.starts_with('0') {
        return None;
    }
    if neg && digits == "0" {
        return None;
    }
    let v: BigInt = digits.parse().ok()?;
    Some(if neg { -v } else { v })
}

/// Parses a canonical `p/q` string. Rejects zero or negative denominators,
/// fractions not in lowest terms, signs on the denominator, leading zeros and
/// anything with a decimal point.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let bad = |why: &str| Error::Parse(format!("rational {s:?}: {why}"));
    let (p, q) = s.split_once('/').ok_or_else(|| bad("expected p/q"))?;
    let numer = parse_digits(p, true).ok_or_else(|| bad("malformed numerator"))?;
    let denom = parse_digits(q, false).ok_or_else(|| bad("malformed denominator"))?;
    if denom.is_zero() {
        return Err(bad("zero denominator"));
    }
    if !numer.gcd(&denom).is_one() && !(numer.is_zero() && denom.is_one()) {
        return Err(bad("not in lowest terms"));
    }
    Ok(Rational::new_raw(numer, denom))
}

/// Natural logarithm of a positive rational as an `f64`, robust for values
/// whose numerator or denominator overflow `f64`. Display only.
pub fn ln_approx(r: &Rational) -> f64 {
    fn ln_big(n: &BigInt) -> f64 {
        let bits = n.bits();
        if bits < 1000 {
            return n.to_f64().unwrap_or(f64::INFINITY).ln();
        }
        let shift = bits - 64;
        let top: BigInt = n >> shift;
        top.to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
    }
    ln_big(r.numer()) - ln_big(r.denom())
}

pub fn to_f64(r: &Rational) -> f64 {
    fn split(n: &BigInt) -> (f64, i64) {
        let bits = n.bits() as i64;
        if bits <= 60 {
            (n.to_f64().unwrap(), 0)
        } else {
            let top: BigInt = n >> (bits - 60) as u64;
            (top.to_f64().unwrap(), bits - 60)
        }
    }
    if r.is_zero() {
        return 0.0;
    }
    let (n, ne) = split(r.numer());
    let (d, de) = split(r.denom());
    let e = ne - de;
    (n / d) * 2f64.powi(e.clamp(-2000, 2000) as i32)
}

/// Rational bracket `lo <= exp(x) <= hi` from a Taylor expansion with a
/// geometric remainder bound. Tightness improves with `terms`.
pub fn exp_bracket(x: &Rational, terms: u32) -> (Rational, Rational) {
    if x.is_negative() {
        let (lo, hi) = exp_bracket(&-x, terms);
        return (hi.recip(), lo.recip());
    }
    // Reduce the argument: exp(x) = exp(x / 2^k)^(2^k) with x / 2^k <= 1/2.
    let mut k = 0u32;
    let mut y = x.clone();
    let half = rat(1, 2);
    while y > half {
        y /= int(2);
        k += 1;
    }
    let mut sum = Rational::zero();
    let mut term = Rational::one();
    for n in 0..terms {
        sum += &term;
        term = term * &y / int(i64::from(n) + 1);
    }
    // Remainder after `terms` terms is at most term / (1 - y) for y <= 1/2.
    let rem = &term / (Rational::one() - &y);
    let mut lo = sum.clone();
    let mut hi = sum + rem;
    for _ in 0..k {
        lo = &lo * &lo;
        hi = &hi * &hi;
    }
    (lo, hi)
}

/// Decides `q < exp(x)` exactly for a positive rational `q`, refining the
/// exponential bracket until the answer is determined. Equality cannot occur
/// for nonzero rational `x`; for `x == 0` the comparison is `q < 1`.
pub fn lt_exp(q: &Rational, x: &Rational) -> bool {
    if x.is_zero() {
        return q < &Rational::one();
    }
    let mut terms = 24;
    loop {
        let (lo, hi) = exp_bracket(x, terms);
        if q < &lo {
            return true;
        }
        if q >= &hi {
            return false;
        }
        terms *= 2;
        assert!(terms < 1 << 16, "exp bracket failed to separate");
    }
}

/// Simplest rational (least denominator, then least numerator) in the open
/// interval described by two monotone predicates: `above_low(x)` is true
/// exactly for `x` above the lower end, `below_high(x)` exactly for `x`
/// below the upper end. Works on the positive rationals via Stern-Brocot
/// descent with run-length acceleration.
pub fn simplest_between<L, H>(above_low: L, below_high: H) -> Rational
where
    L: Fn(&Rational) -> bool,
    H: Fn(&Rational) -> bool,
{
    // Left bound (a/b), right bound (c/d) with d possibly zero (infinity).
    let (mut a, mut b) = (BigInt::zero(), BigInt::one());
    let (mut c, mut d) = (BigInt::one(), BigInt::zero());
    loop {
        let m = Rational::new(&a + &c, &b + &d);
        if !above_low(&m) {
            // Move right: repeatedly replace left bound by mediant. Gallop.
            let mut step = BigInt::one();
            let mut lo = BigInt::one();
            loop {
                let t = Rational::new(&a + &c * &step, &b + &d * &step);
                if above_low(&t) {
                    break;
                }
                lo = step.clone();
                step *= 2;
            }
            // Largest k in [lo, step) with mediant(k) not above low.
            let (mut l, mut h) = (lo, step);
            while &h - &l > BigInt::one() {
                let mid: BigInt = (&l + &h) / 2;
                let t = Rational::new(&a + &c * &mid, &b + &d * &mid);
                if above_low(&t) {
                    h = mid;
                } else {
                    l = mid;
                }
            }
            a = &a + &c * &l;
            b = &b + &d * &l;
        } else if !below_high(&m) {
            let mut step = BigInt::one();
            let mut lo = BigInt::one();
            loop {
                let t = Rational::new(&c + &a * &step, &d + &b * &step);
                if below_high(&t) {
                    break;
                }
                lo = step.clone();
                step *= 2;
            }
            let (mut l, mut h) = (lo, step);
            while &h - &l > BigInt::one() {
                let mid: BigInt = (&l + &h) / 2;
                let t = Rational::new(&c + &a * &mid, &d + &b * &mid);
                if below_high(&t) {
                    h = mid;
                } else {
                    l = mid;
                }
            }
            c = &c + &a * &l;
            d = &d + &b * &l;
        } else {
            return m;
        }
    }
}

pub fn pow(r: &Rational, k: u64) -> Rational {
    num_traits::pow(r.clone(), k as usize)
}

pub fn biguint_to_rational(n: &BigUint) -> Rational {
    Rational::from_integer(BigInt::from_biguint(Sign::Plus, n.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_parse() {
        assert_eq!(parse_rational("1/3").unwrap(), rat(1, 3));
        assert_eq!(parse_rational("-7/2").unwrap(), rat(-7, 2));
        assert_eq!(parse_rational("0/1").unwrap(), int(0));
        for bad in ["2/4", "1/0", "1/-3", "+1/2", "01/2", "0.5", "1", "/2", "1/", "0/2", "-0/1"] {
            assert!(parse_rational(bad).is_err(), "{bad} accepted");
        }
        assert_eq!(format_rational(&rat(6, 4)), "3/2");
        assert_eq!(format_rational(&int(5)), "5/1");
    }

    #[test]
    fn exp_brackets_contain_e() {
        let (lo, hi) = exp_bracket(&int(1), 30);
        let e = rat(2_718_281_828_459_045, 1_000_000_000_000_000);
        assert!(lo < &e + rat(1, 1_000_000_000_000_000) && hi > e);
        assert!(&hi - &lo < rat(1, 1_000_000_000_000_000));
        let (lo, hi) = exp_bracket(&int(-3), 30);
        let e3 = (-3.0f64).exp();
        assert!((to_f64(&lo) - e3).abs() < 1e-15 && (to_f64(&hi) - e3).abs() < 1e-15);
        assert!(lt_exp(&rat(271, 100), &int(1)));
        assert!(!lt_exp(&rat(272, 100), &int(1)));
    }

    #[test]
    fn simplest_rational_search() {
        let lo = rat(1732, 1000);
        let hi = rat(1751, 1000);
        let s = simplest_between(|x| x > &lo, |x| x < &hi);
        assert_eq!(s, rat(7, 4));
        let s = simplest_between(|x| x > &int(100), |x| x < &rat(1003, 10));
        assert_eq!(s, rat(401, 4));
        let s = simplest_between(|x| x > &rat(1, 1000), |x| x < &rat(1, 999));
        assert_eq!(s, rat(2, 1999));
    }
}

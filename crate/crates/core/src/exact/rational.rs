//! Arbitrary-precision rationals.
//!
//! `Rational` is `num_rational::BigRational`, which already maintains the
//! invariants we rely on everywhere: lowest terms, denominator > 0. This
//! module adds construction helpers, the `p/q` string format used by every
//! JSON interface, and complex evaluation.

use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::str::FromStr;

pub type Rational = num_rational::BigRational;

pub fn rat_i(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn rat(p: i64, q: i64) -> Rational {
    assert!(q != 0, "zero denominator");
    Rational::new(BigInt::from(p), BigInt::from(q))
}

/// Parses "p/q" or "p". Whitespace is not accepted; the denominator must be
/// positive after normalization (any sign placement is tolerated on input).
pub fn rat_parse(s: &str) -> Result<Rational> {
    let s = s.trim();
    let mk_err = || Error::parse(format!("invalid rational literal {s:?}"));
    if let Some((p, q)) = s.split_once('/') {
        let p = BigInt::from_str(p.trim()).map_err(|_| mk_err())?;
        let q = BigInt::from_str(q.trim()).map_err(|_| mk_err())?;
        if q.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Rational::new(p, q))
    } else {
        let p = BigInt::from_str(s).map_err(|_| mk_err())?;
        Ok(Rational::from_integer(p))
    }
}

/// Canonical "p/q" rendering; integers render without the "/q" part.
pub fn rat_string(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn rat_to_f64(r: &Rational) -> f64 {
    // Falls back to a quotient of big-float conversions near overflow.
    r.to_f64().unwrap_or_else(|| {
        let n = r.numer().to_f64().unwrap_or(f64::INFINITY * r.numer().signum().to_f64().unwrap_or(1.0));
        let d = r.denom().to_f64().unwrap_or(f64::INFINITY);
        n / d
    })
}

pub fn rat_to_complex(r: &Rational) -> Complex64 {
    Complex64::new(rat_to_f64(r), 0.0)
}

/// Integer power with negative exponents allowed.
pub fn rat_pow(r: &Rational, e: i64) -> Result<Rational> {
    if e >= 0 {
        Ok(num_traits::pow::Pow::pow(r.clone(), e as u64))
    } else {
        if r.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(num_traits::pow::Pow::pow(r.clone(), (-e) as u64).recip())
    }
}

pub fn binom(n: i64, k: i64) -> Rational {
    // Generalized binomial over the integers: n may be negative; k < 0 gives 0.
    if k < 0 {
        return Rational::zero();
    }
    let mut acc = Rational::one();
    for j in 0..k {
        acc *= rat_i(n - j);
        acc /= rat_i(j + 1);
    }
    acc
}

pub fn factorial(n: u32) -> Rational {
    let mut acc = BigInt::one();
    for j in 2..=n as u64 {
        acc *= BigInt::from(j);
    }
    Rational::from_integer(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_render_round_trip() {
        for s in ["0", "5", "-3", "7/3", "-7/3", "1000000000000000000000/7"] {
            let r = rat_parse(s).unwrap();
            assert_eq!(rat_string(&r), s);
        }
        // Normalization: sign moves to the numerator, fraction reduces.
        assert_eq!(rat_string(&rat_parse("4/-6").unwrap()), "-2/3");
        assert!(rat_parse("1/0").is_err());
        assert!(rat_parse("x").is_err());
    }

    #[test]
    fn binom_handles_negative_upper_index() {
        assert_eq!(binom(4, 2), rat_i(6));
        assert_eq!(binom(-1, 3), rat_i(-1));
        assert_eq!(binom(-2, 2), rat_i(3));
        assert_eq!(binom(3, -1), rat_i(0));
        assert_eq!(binom(2, 5), rat_i(0));
    }

    #[test]
    fn pow_negative_exponent() {
        assert_eq!(rat_pow(&rat(2, 3), -2).unwrap(), rat(9, 4));
        assert!(rat_pow(&Rational::zero(), -1).is_err());
    }
}

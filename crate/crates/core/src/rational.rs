//! Exact rational arithmetic used throughout the solvers.
//!
//! All capacities, flows and thresholds are `BigRational`s so that regime
//! boundaries and strict-inequality checks are decided exactly; binary
//! floating point would misclassify knife-edge instances.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::Error;

pub type Rational = num_rational::BigRational;

/// Shorthand for an integer-valued rational.
pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Shorthand for `n/d`. Panics if `d == 0`.
pub fn frac(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        let n = r.numer().to_f64().unwrap_or(f64::MAX);
        let d = r.denom().to_f64().unwrap_or(f64::MAX);
        n / d
    })
}

/// Parses a rational from a string: an integer (`"42"`), an exact fraction
/// (`"19/3"`, `"-3/4"`), or a decimal (`"6.333"`, read as the exact base-10
/// rational 6333/1000, never as a binary float).
pub fn parse_rational(s: &str) -> Result<Rational, Error> {
    let s = s.trim();
    let bad = || Error::Parse(format!("invalid rational literal {s:?}"));
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((num, den)) = s.split_once('/') {
        let n: BigInt = num.trim().parse().map_err(|_| bad())?;
        let d: BigInt = den.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((int_part, frac_part)) = s.split_once('.') {
        let negative = int_part.trim_start().starts_with('-');
        let int_digits = if int_part.is_empty() || int_part == "-" || int_part == "+" {
            BigInt::zero()
        } else {
            int_part.parse().map_err(|_| bad())?
        };
        if frac_part.is_empty() || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let scale = BigInt::from(10u32).pow(frac_part.len() as u32);
        let frac_digits: BigInt = frac_part.parse().map_err(|_| bad())?;
        let magnitude = int_digits.abs() * &scale + frac_digits;
        let signed = if negative { -magnitude } else { magnitude };
        return Ok(Rational::new(signed, scale));
    }
    let n: BigInt = s.parse().map_err(|_| bad())?;
    Ok(Rational::from_integer(n))
}

/// Best rational approximation of `x` with denominator at most `max_denom`,
/// via the continued-fraction / Stern-Brocot walk. Used to turn a float
/// iterate back into a clean exact value before re-evaluation.
pub fn approx_rational(x: f64, max_denom: u64) -> Rational {
    assert!(max_denom >= 1);
    if !x.is_finite() {
        return Rational::zero();
    }
    let negative = x < 0.0;
    let mut x = x.abs();
    // Convergents p/q of the continued fraction expansion.
    let (mut p0, mut q0, mut p1, mut q1) = (0u128, 1u128, 1u128, 0u128);
    for _ in 0..64 {
        let a = x.floor();
        if a > u64::MAX as f64 {
            break;
        }
        let a_int = a as u128;
        let p2 = a_int.saturating_mul(p1).saturating_add(p0);
        let q2 = a_int.saturating_mul(q1).saturating_add(q0);
        if q2 > max_denom as u128 {
            break;
        }
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        let rem = x - a;
        if rem < 1e-15 {
            break;
        }
        x = 1.0 / rem;
    }
    if q1 == 0 {
        return Rational::zero();
    }
    let mut r = Rational::new(BigInt::from(p1), BigInt::from(q1));
    if negative {
        r = -r;
    }
    r
}

/// Exact rational from a float's binary expansion (no rounding at all).
pub fn from_f64_exact(x: f64) -> Rational {
    Rational::from_float(x).unwrap_or_else(Rational::zero)
}

pub fn min_rat<'a>(a: &'a Rational, b: &'a Rational) -> &'a Rational {
    if a <= b {
        a
    } else {
        b
    }
}

pub fn max_rat<'a>(a: &'a Rational, b: &'a Rational) -> &'a Rational {
    if a >= b {
        a
    } else {
        b
    }
}

/// `max(x, 0)` without consuming the input.
pub fn pos_part(x: &Rational) -> Rational {
    if x.is_positive() {
        x.clone()
    } else {
        Rational::zero()
    }
}

/// Clamps `x` into `[lo, hi]`.
pub fn clamp_rat(x: Rational, lo: &Rational, hi: &Rational) -> Rational {
    debug_assert!(lo <= hi);
    if &x < lo {
        lo.clone()
    } else if &x > hi {
        hi.clone()
    } else {
        x
    }
}

pub fn is_one(x: &Rational) -> bool {
    x.is_one()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!(parse_rational("19/3").unwrap(), frac(19, 3));
        assert_eq!(parse_rational("-3/4").unwrap(), frac(-3, 4));
        assert_eq!(parse_rational("42").unwrap(), rat(42));
        assert_eq!(parse_rational("6.333").unwrap(), frac(6333, 1000));
        assert_eq!(parse_rational("0.5").unwrap(), frac(1, 2));
        assert_eq!(parse_rational(".5").unwrap(), frac(1, 2));
        assert_eq!(parse_rational("-7.5").unwrap(), frac(-15, 2));
        assert_eq!(parse_rational(" 2 ").unwrap(), rat(2));
    }

    #[test]
    fn rejects_garbage() {
        for s in ["", "abc", "1/0", "1.2.3", "1/ ", "--3", "1e5"] {
            assert!(parse_rational(s).is_err(), "accepted {s:?}");
        }
    }

    #[test]
    fn decimal_is_exact_base_ten() {
        // 0.1 as a rational is exactly 1/10, unlike the f64 0.1.
        assert_eq!(parse_rational("0.1").unwrap(), frac(1, 10));
    }

    #[test]
    fn approximation_recovers_simple_fractions() {
        assert_eq!(approx_rational(0.5, 1 << 20), frac(1, 2));
        assert_eq!(approx_rational(2.0 / 3.0, 1 << 20), frac(2, 3));
        assert_eq!(approx_rational(-0.25, 1 << 20), frac(-1, 4));
        assert_eq!(approx_rational(3.0, 10), rat(3));
    }
}

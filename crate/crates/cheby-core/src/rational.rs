//! Exact rational values.
//!
//! Everything structural in this crate (coefficients, balance sums, E(t)
//! values, extrema) is kept as an arbitrary-precision fraction so that
//! conditions like "sum a(d)/d = 0" are decidable, not approximate. Only
//! logarithm-weighted quantities ever drop to binary64.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

/// Exact arbitrary-precision fraction, always normalized (gcd 1, positive
/// denominator). Backed by [`num_rational::BigRational`], which maintains
/// exactly that invariant.
pub type Rational = BigRational;

/// Rational from an integer.
pub fn rational_int(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

/// Rational from a numerator/denominator pair. Panics on zero denominator.
pub fn rational(num: i64, den: i64) -> Rational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Nearest binary64 value. Rationals in this crate stay far below the f64
/// range, but the fallback keeps pathological inputs finite-signed.
pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        if r.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

/// Canonical text form: `num` for integers, `num/den` otherwise.
pub fn render(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parse `num` or `num/den` with an optional leading sign on the numerator.
pub fn parse(text: &str) -> Option<Rational> {
    let mut parts = text.splitn(2, '/');
    let num: BigInt = parts.next()?.parse().ok()?;
    let den: BigInt = match parts.next() {
        Some(d) => d.parse().ok()?,
        None => BigInt::from(1),
    };
    if den.is_zero() {
        return None;
    }
    Some(BigRational::new(num, den))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn render_parse_round_trip() {
        for (n, d) in [(1i64, 1i64), (-3, 2), (7, 3), (0, 5), (-10, 1)] {
            let r = rational(n, d);
            assert_eq!(parse(&render(&r)).unwrap(), r);
        }
    }

    #[test]
    fn parse_rejects_zero_denominator() {
        assert!(parse("1/0").is_none());
    }

    #[test]
    fn negative_denominator_normalizes() {
        assert_eq!(parse("3/-2").unwrap(), rational(-3, 2));
    }

    #[test]
    fn to_f64_matches_known_values() {
        assert_eq!(to_f64(&rational(1, 2)), 0.5);
        assert_eq!(to_f64(&rational(-3, 2)), -1.5);
    }
}

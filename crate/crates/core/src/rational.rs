//! Exact rational scalars and their string forms.
//!
//! Every bound, coefficient and solver value in the crate is a [`Rational`].
//! Literals are accepted as plain decimals (`"-0.125"`, `"1e-3"`) or as
//! fractions (`"3/8"`), and are always formatted back as fractions or integers.

use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

/// Arbitrary-precision fraction in lowest terms with a positive denominator.
pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid rational literal `{0}`")]
pub struct ParseRationalError(pub String);

/// Integer-valued rational.
pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `n / d`, reduced. Panics if `d == 0`.
pub fn frac(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Parses a decimal or `p/q` literal exactly.
pub fn parse_rational(text: &str) -> Result<Rational, ParseRationalError> {
    let err = || ParseRationalError(text.to_string());
    let s = text.trim();
    if s.is_empty() {
        return Err(err());
    }
    if let Some((n, d)) = s.split_once('/') {
        let n = parse_integer(n.trim()).ok_or_else(err)?;
        let d = parse_integer(d.trim()).ok_or_else(err)?;
        if d.is_zero() {
            return Err(err());
        }
        return Ok(Rational::new(n, d));
    }
    parse_decimal(s).ok_or_else(err)
}

/// Canonical text form: `"p/q"`, or `"p"` when the denominator is one.
pub fn format_rational(r: &Rational) -> String {
    r.to_string()
}

fn parse_integer(s: &str) -> Option<BigInt> {
    let digits = s.strip_prefix(['+', '-']).unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    BigInt::from_str(s.strip_prefix('+').unwrap_or(s)).ok()
}

fn parse_decimal(s: &str) -> Option<Rational> {
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(k) => (&s[..k], s[k + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (negative, body) = match mantissa.as_bytes().first()? {
        b'-' => (true, &mantissa[1..]),
        b'+' => (false, &mantissa[1..]),
        _ => (false, mantissa),
    };
    let (whole, fraction) = body.split_once('.').unwrap_or((body, ""));
    if whole.is_empty() && fraction.is_empty() {
        return None;
    }
    if !whole.bytes().chain(fraction.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{whole}{fraction}");
    let mut numer = BigInt::from_str(if digits.is_empty() { "0" } else { &digits }).ok()?;
    if negative {
        numer = -numer;
    }
    let scale = exponent.checked_sub(i32::try_from(fraction.len()).ok()?)?;
    let ten = BigInt::from(10);
    let value = if scale >= 0 {
        Rational::from_integer(numer * num_traits::pow(ten, scale as usize))
    } else {
        Rational::new(numer, num_traits::pow(ten, scale.unsigned_abs() as usize))
    };
    Some(value)
}

/// Least common multiple of the denominators of `values` (one when empty).
pub fn common_denominator<'a, I>(values: I) -> BigInt
where
    I: IntoIterator<Item = &'a Rational>,
{
    values.into_iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
}

/// Exact `r * scale` as an integer; `None` if `scale` does not clear the denominator.
pub fn scaled_integer(r: &Rational, scale: &BigInt) -> Option<BigInt> {
    let (q, rem) = (r.numer() * scale).div_rem(r.denom());
    rem.is_zero().then_some(q)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimals_are_exact() {
        assert_eq!(parse_rational("0.1").unwrap(), frac(1, 10));
        assert_eq!(parse_rational("-2.50").unwrap(), frac(-5, 2));
        assert_eq!(parse_rational(".5").unwrap(), frac(1, 2));
        assert_eq!(parse_rational("7.").unwrap(), int(7));
        assert_eq!(parse_rational("1e3").unwrap(), int(1000));
        assert_eq!(parse_rational("25E-2").unwrap(), frac(1, 4));
        assert_eq!(parse_rational("+3").unwrap(), int(3));
    }

    #[test]
    fn fractions_reduce() {
        assert_eq!(parse_rational("6/8").unwrap(), frac(3, 4));
        assert_eq!(parse_rational("-1/-2").unwrap(), frac(1, 2));
        assert_eq!(parse_rational(" 2 / -4 ").unwrap(), frac(-1, 2));
    }

    #[test]
    fn rejects_garbage() {
        for bad in ["", "-", ".", "1/0", "abc", "1.2.3", "1/2/3", "0x10", "1e", "--1", "1/ 2.5"] {
            assert!(parse_rational(bad).is_err(), "{bad:?} accepted");
        }
    }

    #[test]
    fn format_is_canonical() {
        assert_eq!(format_rational(&frac(4, 2)), "2");
        assert_eq!(format_rational(&frac(-3, 9)), "-1/3");
        assert_eq!(parse_rational(&format_rational(&frac(22, 7))).unwrap(), frac(22, 7));
    }

    #[test]
    fn denominators() {
        let v = [frac(1, 4), frac(5, 6), int(3)];
        let d = common_denominator(v.iter());
        assert_eq!(d, BigInt::from(12));
        assert_eq!(scaled_integer(&v[1], &d), Some(BigInt::from(10)));
        assert_eq!(scaled_integer(&v[1], &BigInt::from(4)), None);
    }
}

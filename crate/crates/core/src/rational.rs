//! Exact rational scalars: parsing and canonical formatting.
//!
//! Every quantity in this crate is a [`Rat`] (an arbitrary-precision
//! rational). Floating point never enters any computation: the sender-graph
//! edge rules and the equilibrium characterization compare utilities with
//! non-strict inequalities, so a single rounded tie would silently change
//! the answers.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{GameError, Result};

/// Exact scalar used throughout the crate.
pub type Rat = BigRational;

/// Builds a rational from a numerator/denominator pair.
///
/// Panics on a zero denominator; intended for literals in code and tests.
pub fn rat(numer: i64, denom: i64) -> Rat {
    assert!(denom != 0, "zero denominator");
    Rat::new(BigInt::from(numer), BigInt::from(denom))
}

/// Builds an integer-valued rational.
pub fn int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Parses a rational literal: `"p/q"`, an integer, or a decimal.
///
/// Decimals are exact (`"0.25"` is 1/4, `"-1.5"` is -3/2); surrounding
/// whitespace is ignored.
pub fn parse_rational(text: &str) -> Result<Rat> {
    let s = text.trim();
    if s.is_empty() {
        return Err(GameError::Parse("empty rational literal".into()));
    }
    let bad = || GameError::Parse(format!("invalid rational literal {s:?}"));

    if let Some((num, den)) = s.split_once('/') {
        let num: BigInt = num.trim().parse().map_err(|_| bad())?;
        let den: BigInt = den.trim().parse().map_err(|_| bad())?;
        if den.is_zero() {
            return Err(GameError::Parse(format!("zero denominator in {s:?}")));
        }
        return Ok(Rat::new(num, den));
    }

    if let Some((whole, frac)) = s.split_once('.') {
        // Exact decimal: sign applies to the whole literal.
        let (sign, whole) = match whole.strip_prefix('-') {
            Some(rest) => (-1, rest),
            None => (1, whole.strip_prefix('+').unwrap_or(whole)),
        };
        if whole.is_empty() && frac.is_empty() {
            return Err(bad());
        }
        let digits_ok = |d: &str| d.chars().all(|c| c.is_ascii_digit());
        if !digits_ok(whole) || !digits_ok(frac) || frac.len() > 64 {
            return Err(bad());
        }
        let whole: BigInt = if whole.is_empty() { BigInt::zero() } else { whole.parse().map_err(|_| bad())? };
        let scale = BigInt::from(10u8).pow(frac.len() as u32);
        let frac: BigInt = if frac.is_empty() { BigInt::zero() } else { frac.parse().map_err(|_| bad())? };
        return Ok(Rat::new((whole * &scale + frac) * BigInt::from(sign), scale));
    }

    let n: BigInt = s.parse().map_err(|_| bad())?;
    Ok(Rat::from_integer(n))
}

/// Renders a rational canonically: `"n"` for integers, `"p/q"` otherwise.
///
/// The output round-trips through [`parse_rational`].
pub fn format_rational(value: &Rat) -> String {
    if value.denom().is_one() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

/// True iff `value` is negative. Convenience re-export used in reports.
pub fn is_negative(value: &Rat) -> bool {
    value.is_negative()
}

//! Arbitrary-precision rational scalars and formatting helpers.
//!
//! Every verdict-critical quantity in this crate is a [`Rational`]. The
//! helpers here cover the conversions the rest of the crate needs: exact
//! parsing of `p/q` and terminating-decimal literals, canonical `p/q`
//! display, and lossy conversion to `f64` for the dynamics layer.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exact rational scalar used throughout the crate.
pub type Rational = num_rational::BigRational;

/// Parses a positive-or-negative rational literal: `p/q`, an integer, or a
/// terminating decimal (converted by place value, e.g. `1.5` = `3/2`).
pub fn parse_rational(text: &str) -> Option<Rational> {
    let text = text.trim();
    if text.is_empty() {
        return None;
    }
    if let Some((num, den)) = text.split_once('/') {
        let num: BigInt = num.trim().parse().ok()?;
        let den: BigInt = den.trim().parse().ok()?;
        if den.is_zero() {
            return None;
        }
        return Some(Rational::new(num, den));
    }
    if let Some((int_part, frac_part)) = text.split_once('.') {
        if frac_part.is_empty() || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let negative = int_part.trim_start().starts_with('-');
        let int_part: BigInt = if int_part.is_empty() || int_part == "-" {
            BigInt::zero()
        } else {
            int_part.parse().ok()?
        };
        let scale = BigInt::from(10u32).pow(frac_part.len() as u32);
        let frac: BigInt = frac_part.parse().ok()?;
        let frac = if negative { -frac } else { frac };
        return Some(Rational::new(int_part * &scale + frac, scale));
    }
    let int: BigInt = text.parse().ok()?;
    Some(Rational::from(int))
}

/// Formats a rational canonically: `p` when the denominator is 1, `p/q`
/// otherwise, always in lowest terms.
pub fn format_rational(value: &Rational) -> String {
    if value.denom().is_one() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

/// Lossy conversion for the floating-point dynamics layer.
pub fn to_f64(value: &Rational) -> f64 {
    value
        .to_f64()
        .unwrap_or_else(|| panic!("rational {value} out of f64 range"))
}

/// Exact conversion from a finite float (every finite f64 is rational).
pub fn from_f64(value: f64) -> Option<Rational> {
    Rational::from_float(value)
}

#[cfg(test)]
pub(crate) fn rational_int(n: i64) -> Rational {
    Rational::from(BigInt::from(n))
}

/// Exact power with a signed arbitrary-precision exponent (the base must be
/// nonzero when the exponent is negative).
pub fn pow(base: &Rational, exp: &BigInt) -> Rational {
    let mut result = Rational::one();
    let mut square = if exp.is_negative() { base.recip() } else { base.clone() };
    let mut bits = exp.magnitude().clone();
    while !bits.is_zero() {
        if bits.bit(0) {
            result *= &square;
        }
        square = &square * &square;
        bits >>= 1;
    }
    result
}

/// Relative comparison used by float-mode verdicts: |a - b| <= tol * (1 + |a|).
pub fn approx_eq(a: &Rational, b: &Rational, tol: f64) -> bool {
    let (a, b) = (to_f64(a), to_f64(b));
    (a - b).abs() <= tol * (1.0 + a.abs())
}

//! Exact rational numbers: parsing, printing and bit-length helpers.

use crate::error::{Error, Result};
use num_bigint::{BigInt, Sign};
use num_traits::{One, Signed, Zero};

/// Arbitrary-precision rational used for every numeric quantity.
pub type Q = num_rational::BigRational;

/// Builds the rational `n/d` from machine integers.
pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Builds the integer rational `n`.
pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// Parses `p`, `p/q`, or a decimal such as `-0.125` into an exact rational.
///
/// Exponent notation, `NaN` and infinities are rejected.
pub fn parse_rational(s: &str) -> Result<Q> {
    let bad = |msg: &str| Error::Syntax { pos: 0, msg: format!("{msg}: {s:?}") };
    let t = s.trim();
    if t.is_empty() {
        return Err(bad("empty number"));
    }
    let (neg, body) = match t.as_bytes()[0] {
        b'-' => (true, &t[1..]),
        b'+' => (false, &t[1..]),
        _ => (false, t),
    };
    let digits = |x: &str| !x.is_empty() && x.bytes().all(|b| b.is_ascii_digit());
    let value = if let Some((num, den)) = body.split_once('/') {
        if !digits(num) || !digits(den) {
            return Err(bad("malformed fraction"));
        }
        let den: BigInt = den.parse().map_err(|_| bad("malformed denominator"))?;
        if den.is_zero() {
            return Err(bad("zero denominator"));
        }
        Q::new(num.parse().map_err(|_| bad("malformed numerator"))?, den)
    } else if let Some((int, frac)) = body.split_once('.') {
        if !(digits(int) || int.is_empty()) || !digits(frac) {
            return Err(bad("malformed decimal"));
        }
        let whole = format!("{int}{frac}");
        let num: BigInt = whole.parse().map_err(|_| bad("malformed decimal"))?;
        let den = num_traits::pow(BigInt::from(10), frac.len());
        Q::new(num, den)
    } else {
        if !digits(body) {
            return Err(bad("malformed integer"));
        }
        Q::from_integer(body.parse().map_err(|_| bad("malformed integer"))?)
    };
    Ok(if neg { -value } else { value })
}

/// Prints a rational as `p` or `p/q` in lowest terms.
pub fn fmt_rational(x: &Q) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Number of binary digits of `|x|`, with zero taking one digit.
pub fn bit_len(x: &BigInt) -> usize {
    if x.is_zero() {
        1
    } else {
        x.bits() as usize
    }
}

/// Binary digits of `|x|`, most significant first, left-padded to `width`.
pub fn digits_padded(x: &BigInt, width: usize) -> Vec<bool> {
    let mag = x.abs();
    let len = bit_len(&mag);
    debug_assert!(width >= len);
    let mut out = vec![false; width - len];
    if mag.is_zero() {
        out.push(false);
    } else {
        let (_, bytes) = mag.to_bytes_be();
        let mut bits: Vec<bool> = bytes
            .iter()
            .flat_map(|b| (0..8).rev().map(move |i| (b >> i) & 1 == 1))
            .collect();
        let lead = bits.len() - len;
        bits.drain(..lead);
        out.extend(bits);
    }
    out
}

/// Rebuilds a non-negative integer from binary digits, most significant first.
pub fn from_digits(bits: &[bool]) -> BigInt {
    let mut acc = BigInt::zero();
    for &b in bits {
        acc <<= 1;
        if b {
            acc += 1;
        }
    }
    acc
}

/// True when `x` is strictly negative.
pub fn is_negative(x: &BigInt) -> bool {
    x.sign() == Sign::Minus
}

/// Midpoint of two rationals.
pub fn midpoint(a: &Q, b: &Q) -> Q {
    (a + b) / qi(2)
}

/// Absolute value of a rational.
pub fn qabs(x: &Q) -> Q {
    x.abs()
}

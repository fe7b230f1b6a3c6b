//! Exact rational arithmetic helpers.
//!
//! All quantities in this crate (costs, allocations, excesses, LP data) are
//! arbitrary-precision rationals. Floating point is never used on the solve
//! path; decimal output is derived from the exact value by integer division.

use num_bigint::{BigInt, Sign};
use num_traits::{One, Signed, Zero};
use std::fmt::Write as _;

pub type Rational = num_rational::BigRational;

/// Shorthand for small literal rationals in tests and generators.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Shorthand for integer rationals.
pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot parse `{0}` as a rational number")]
pub struct ParseRationalError(pub String);

/// Parses `"p/q"`, integer (`"-3"`) and decimal (`"1.5"`) strings into exact
/// rationals. Decimal strings convert exactly: `"1.5"` becomes `3/2`.
pub fn parse_rational(s: &str) -> Result<Rational, ParseRationalError> {
    let s = s.trim();
    let err = || ParseRationalError(s.to_string());
    if s.is_empty() {
        return Err(err());
    }
    if let Some((num, den)) = s.split_once('/') {
        let num: BigInt = num.trim().parse().map_err(|_| err())?;
        let den: BigInt = den.trim().parse().map_err(|_| err())?;
        if den.is_zero() {
            return Err(err());
        }
        return Ok(Rational::new(num, den));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(err());
        }
        let negative = whole.starts_with('-');
        let whole: BigInt = if whole.is_empty() || whole == "-" || whole == "+" {
            BigInt::zero()
        } else {
            whole.parse().map_err(|_| err())?
        };
        let frac_digits = frac.len() as u32;
        let frac_num: BigInt = frac.parse().map_err(|_| err())?;
        let scale = BigInt::from(10u32).pow(frac_digits);
        let mut value = Rational::new(whole.abs() * &scale + frac_num, scale);
        if negative || s.starts_with('-') {
            value = -value;
        }
        return Ok(value);
    }
    let n: BigInt = s.parse().map_err(|_| err())?;
    Ok(Rational::from_integer(n))
}

/// Canonical string form: `"3"` for integers, `"p/q"` otherwise.
pub fn rational_string(r: &Rational) -> String {
    r.to_string()
}

/// Renders `r` as a decimal string with `sig` significant digits, rounding
/// half away from zero. Trailing zeros after the decimal point are trimmed,
/// so exact values print exactly (`3/2` gives `"1.5"`, `4` gives `"4"`).
pub fn decimal_string(r: &Rational, sig: usize) -> String {
    assert!(sig > 0);
    if r.is_zero() {
        return "0".to_string();
    }
    let negative = r.is_negative();
    let num = r.numer().abs();
    let den = r.denom().abs();

    // Decimal exponent e with 10^e <= num/den < 10^(e+1).
    let mut e: i64 = digits10(&num) as i64 - digits10(&den) as i64;
    let ten = BigInt::from(10u8);
    // digits10 only bounds the ratio within one power of ten; adjust.
    if pow10_cmp_ge(&num, &den, e) {
        if pow10_cmp_ge(&num, &den, e + 1) {
            e += 1;
        }
    } else {
        e -= 1;
    }

    // Round num/den * 10^(sig-1-e) to the nearest integer, half away from zero.
    let shift = sig as i64 - 1 - e;
    let (mut scaled_num, mut scaled_den) = (num, den);
    if shift >= 0 {
        scaled_num *= ten.pow(shift as u32);
    } else {
        scaled_den *= ten.pow((-shift) as u32);
    }
    let mut mantissa = (BigInt::from(2u8) * &scaled_num + &scaled_den) / (BigInt::from(2u8) * &scaled_den);
    // Rounding can carry over to one extra digit (e.g. 999.96 -> 1000).
    let mut digits = mantissa.to_string();
    if digits.len() > sig {
        debug_assert_eq!(digits.len(), sig + 1);
        mantissa /= &ten;
        digits = mantissa.to_string();
        e += 1;
    }

    let mut out = String::new();
    if negative {
        out.push('-');
    }
    if e >= 0 {
        let int_len = (e as usize) + 1;
        if int_len >= digits.len() {
            // Pad with zeros: all significant digits are in the integer part.
            out.push_str(&digits);
            for _ in digits.len()..int_len {
                out.push('0');
            }
        } else {
            out.push_str(&digits[..int_len]);
            let frac = digits[int_len..].trim_end_matches('0');
            if !frac.is_empty() {
                out.push('.');
                out.push_str(frac);
            }
        }
    } else {
        let zeros = (-e - 1) as usize;
        let frac = digits.trim_end_matches('0');
        if frac.is_empty() {
            return "0".to_string();
        }
        out.push_str("0.");
        for _ in 0..zeros {
            out.push('0');
        }
        out.push_str(frac);
    }
    out
}

fn digits10(n: &BigInt) -> usize {
    n.to_string().trim_start_matches('-').len()
}

/// True iff num/den >= 10^e.
fn pow10_cmp_ge(num: &BigInt, den: &BigInt, e: i64) -> bool {
    let ten = BigInt::from(10u8);
    if e >= 0 {
        *num >= den * ten.pow(e as u32)
    } else {
        num * ten.pow((-e) as u32) >= *den
    }
}

/// Rounds `value` to the nearest multiple of `1/denom`, half away from zero.
pub fn round_to_denominator(value: &Rational, denom: u64) -> Rational {
    let d = BigInt::from(denom);
    let scaled = value * Rational::from_integer(d.clone());
    let num = scaled.numer().clone();
    let den = scaled.denom().clone();
    let two = BigInt::from(2u8);
    let rounded = if num.sign() == Sign::Minus {
        -((-&num * &two + &den) / (&den * &two))
    } else {
        (&num * &two + &den) / (&den * &two)
    };
    Rational::new(rounded, d)
}

/// Serde adapter: rationals as canonical strings, accepting integers and
/// decimal strings on input.
pub mod rational_serde {
    use super::{parse_rational, Rational};
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&r.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Int(i64),
            Text(String),
        }
        match Repr::deserialize(d)? {
            Repr::Int(n) => Ok(Rational::from_integer(n.into())),
            Repr::Text(t) => parse_rational(&t).map_err(de::Error::custom),
        }
    }
}

/// Same adapter for `Vec<Rational>` fields.
pub mod rational_vec_serde {
    use super::{parse_rational, Rational};
    use serde::{de, ser::SerializeSeq, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for r in v {
            seq.serialize_element(&r.to_string())?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Int(i64),
            Text(String),
        }
        let items = Vec::<Repr>::deserialize(d)?;
        items
            .into_iter()
            .map(|it| match it {
                Repr::Int(n) => Ok(Rational::from_integer(n.into())),
                Repr::Text(t) => parse_rational(&t).map_err(de::Error::custom),
            })
            .collect()
    }
}

/// Transparent wrapper carrying the string-based serde representation into
/// containers (map values, tuple fields).
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(transparent)]
pub struct RationalJson(#[serde(with = "rational_serde")] pub Rational);

/// Formats a rational both ways, e.g. `15/8 (1.875)`.
pub fn display_both(r: &Rational) -> String {
    let mut s = r.to_string();
    if !r.denom().is_one() {
        let _ = write!(s, " ({})", decimal_string(r, 15));
    }
    s
}

//! Deterministic decimal rendering of exact rationals (round half away from zero).

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("not an exact decimal or fraction: {0:?}")]
pub struct DecimalError(pub String);

fn pow10(k: u32) -> BigInt {
    num_traits::pow(BigInt::from(10), k as usize)
}

/// `round(|r| * 10^places)` as an integer, half away from zero.
fn scaled_round(r: &BigRational, places: u32) -> BigInt {
    let num = r.numer().abs() * pow10(places);
    let den = r.denom().clone();
    let (q, rem) = num.div_rem(&den);
    if rem * 2 >= den {
        q + 1
    } else {
        q
    }
}

fn render(negative: bool, digits: BigInt, places: u32) -> String {
    let mut s = digits.to_string();
    if places > 0 {
        let p = places as usize;
        if s.len() <= p {
            s = format!("{}{s}", "0".repeat(p + 1 - s.len()));
        }
        s.insert(s.len() - p, '.');
    }
    if negative && s.chars().any(|c| c.is_ascii_digit() && c != '0') {
        s.insert(0, '-');
    }
    s
}

/// Exactly `places` digits after the point.
pub fn fixed(r: &BigRational, places: u32) -> String {
    render(r.is_negative(), scaled_round(r, places), places)
}

/// `digits` significant digits, trailing zeros kept, no exponent notation.
pub fn significant(r: &BigRational, digits: u32) -> String {
    assert!(digits > 0);
    if r.is_zero() {
        return fixed(r, digits - 1);
    }
    let abs = r.abs();
    // e = floor(log10 |r|)
    let mut e: i64 = abs.to_integer().to_string().len() as i64 - 1;
    if abs < BigRational::one() {
        e = -1;
        let mut t = abs.clone() * BigInt::from(10);
        while t < BigRational::one() {
            t *= BigInt::from(10);
            e -= 1;
        }
    }
    loop {
        let places = digits as i64 - 1 - e;
        if places >= 0 {
            let q = scaled_round(r, places as u32);
            if q.to_string().len() as i64 > digits as i64 && q.to_string().len() > 1 {
                e += 1;
                continue;
            }
            return render(r.is_negative(), q, places as u32);
        }
        let unit = pow10((-places) as u32);
        let q = scaled_round(&(r / BigRational::from_integer(unit.clone())), 0);
        return render(r.is_negative(), q * unit, 0);
    }
}

/// Exact value of `[-]digits[.digits][e[-]digits]` or `p/q`.
pub fn parse_exact(text: &str) -> Result<BigRational, DecimalError> {
    let bad = || DecimalError(text.to_string());
    let t = text.trim();
    if let Some((p, q)) = t.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(p, q));
    }
    let (mantissa, exp) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (t, 0),
    };
    let (negative, body) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    let digits = format!("{int_part}{frac_part}");
    if digits.is_empty() || !digits.chars().all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let mut value = BigRational::from_integer(digits.parse::<BigInt>().map_err(|_| bad())?);
    let shift = exp as i64 - frac_part.len() as i64;
    if shift.unsigned_abs() > 10_000 {
        return Err(bad());
    }
    let scale = BigRational::from_integer(pow10(shift.unsigned_abs() as u32));
    value = if shift >= 0 { value * scale } else { value / scale };
    Ok(if negative { -value } else { value })
}

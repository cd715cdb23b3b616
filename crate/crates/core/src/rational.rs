//! Exact rational helpers.

use alloc::string::{String, ToString};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Rational = BigRational;

pub fn rat(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

pub fn from_usize(value: usize) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

/// Largest `t` with `t^3 <= value`.
pub fn icbrt(value: u64) -> u64 {
    let v = value as u128;
    let mut lo: u128 = 0;
    let mut hi: u128 = 1 << 22; // (2^22)^3 > u64::MAX
    while lo < hi {
        let mid = (lo + hi + 1) / 2;
        if mid * mid * mid <= v {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    lo as u64
}

/// `floor(m^{1/3})`, computed without floating point.
pub fn cube_root_floor(m: usize) -> usize {
    icbrt(m as u64) as usize
}

/// `floor(m^{2/3})`: the largest `g` with `g^3 <= m^2`.
pub fn two_thirds_floor(m: usize) -> usize {
    let sq = (m as u64).checked_mul(m as u64).expect("m^2 overflows u64");
    icbrt(sq) as usize
}

/// Parses `"p/q"`, `"p"` or a finite decimal such as `"0.25"` exactly.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let text = text.trim();
    if let Some((p, q)) = text.split_once('/') {
        let p: BigInt = p.trim().parse().ok()?;
        let q: BigInt = q.trim().parse().ok()?;
        if q.is_zero() {
            return None;
        }
        return Some(Rational::new(p, q));
    }
    if let Some((whole, frac)) = text.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let negative = whole.starts_with('-');
        let whole_digits = whole.trim_start_matches(['-', '+']);
        if !whole_digits.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let mut digits = String::from(whole_digits);
        digits.push_str(frac);
        let numer: BigInt = digits.parse().ok()?;
        let denom = num_traits::pow(BigInt::from(10), frac.len());
        let value = Rational::new(numer, denom);
        return Some(if negative { -value } else { value });
    }
    let p: BigInt = text.parse().ok()?;
    Some(Rational::from_integer(p))
}

/// `"p/q"`, or `"p"` for integers.
pub fn format_rational(value: &Rational) -> String {
    if value.denom().is_one() {
        value.numer().to_string()
    } else {
        alloc::format!("{}/{}", value.numer(), value.denom())
    }
}

/// Least common multiple of the denominators.
pub fn common_denominator<'a>(values: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
}

pub fn in_unit_interval(value: &Rational) -> bool {
    !value.is_negative() && *value <= Rational::one()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integer_cube_roots_are_exact() {
        assert_eq!(icbrt(0), 0);
        assert_eq!(icbrt(7), 1);
        assert_eq!(icbrt(8), 2);
        assert_eq!(icbrt(26), 2);
        assert_eq!(icbrt(27), 3);
        assert_eq!(icbrt(63), 3);
        assert_eq!(icbrt(64), 4);
        assert_eq!(icbrt(u64::MAX), 2_642_245);
        for t in 0u64..2000 {
            assert_eq!(icbrt(t * t * t), t);
            if t > 0 {
                assert_eq!(icbrt(t * t * t - 1), t - 1);
            }
        }
    }

    #[test]
    fn two_thirds_floor_matches_definition() {
        assert_eq!(two_thirds_floor(27), 9);
        assert_eq!(two_thirds_floor(64), 16);
        assert_eq!(two_thirds_floor(125), 25);
        assert_eq!(two_thirds_floor(216), 36);
        assert_eq!(two_thirds_floor(8), 4);
        assert_eq!(two_thirds_floor(10), 4); // 100^{1/3} = 4.64
    }

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!(parse_rational("3/6"), Some(rat(1, 2)));
        assert_eq!(parse_rational("0.25"), Some(rat(1, 4)));
        assert_eq!(parse_rational("-1.5"), Some(rat(-3, 2)));
        assert_eq!(parse_rational("7"), Some(int(7)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("x"), None);
        assert_eq!(format_rational(&rat(2, 4)), "1/2");
        assert_eq!(format_rational(&int(3)), "3");
    }
}

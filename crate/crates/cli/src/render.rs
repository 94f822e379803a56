//! Text rendering of exact and floating values.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Renders `r` as a terminating decimal when its denominator is `2^a 5^b`,
/// otherwise as `p/q`. With `force_fraction` every non-integer is `p/q`.
pub fn format_rational(r: &BigRational, force_fraction: bool) -> String {
    if r.denom().is_one() {
        return r.numer().to_string();
    }
    if force_fraction {
        return format!("{}/{}", r.numer(), r.denom());
    }
    match decimal_digits(r.denom()) {
        Some(places) => {
            let scaled = r.numer().abs() * BigInt::from(10).pow(places) / r.denom();
            let mut digits = scaled.to_string();
            if digits.len() <= places as usize {
                digits = format!("{}{digits}", "0".repeat(places as usize + 1 - digits.len()));
            }
            let (int, frac) = digits.split_at(digits.len() - places as usize);
            let sign = if r.is_negative() { "-" } else { "" };
            format!("{sign}{int}.{}", frac.trim_end_matches('0'))
        }
        None => format!("{}/{}", r.numer(), r.denom()),
    }
}

/// Number of decimal places needed for `1/d`, if finite.
fn decimal_digits(d: &BigInt) -> Option<u32> {
    let mut d = d.clone();
    let (mut twos, mut fives) = (0u32, 0u32);
    let two = BigInt::from(2);
    let five = BigInt::from(5);
    while (&d % &two).is_zero() {
        d /= &two;
        twos += 1;
    }
    while (&d % &five).is_zero() {
        d /= &five;
        fives += 1;
    }
    d.is_one().then_some(twos.max(fives))
}

pub fn format_float(x: f64) -> String {
    if x == 0.0 {
        "0".to_string()
    } else {
        format!("{x}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64, d: i64) -> BigRational {
        BigRational::new(p.into(), d.into())
    }

    #[test]
    fn decimals_and_fractions() {
        assert_eq!(format_rational(&q(29, 20), false), "1.45");
        assert_eq!(format_rational(&q(3, 2), false), "1.5");
        assert_eq!(format_rational(&q(1, 20), false), "0.05");
        assert_eq!(format_rational(&q(-1, 20), false), "-0.05");
        assert_eq!(format_rational(&q(1, 1024), false), "0.0009765625");
        assert_eq!(format_rational(&q(7, 1), false), "7");
        assert_eq!(format_rational(&q(0, 1), false), "0");
        assert_eq!(format_rational(&q(1, 3), false), "1/3");
        assert_eq!(format_rational(&q(-35, 12), false), "-35/12");
        assert_eq!(format_rational(&q(29, 20), true), "29/20");
        assert_eq!(format_rational(&q(4, 1), true), "4");
    }

    #[test]
    fn floats() {
        assert_eq!(format_float(0.0), "0");
        assert_eq!(format_float(-0.0), "0");
        assert_eq!(format_float(0.5), "0.5");
    }
}

//! Number rendering shared by the CSV and JSON writers.

use std::str::FromStr;

use serde::ser::Error as _;
use serde::{Serialize, Serializer};

pub const SIGNIFICANT_DIGITS: usize = 6;
/// Magnitudes below this are written in scientific notation.
pub const SCIENTIFIC_BELOW: f64 = 1e-4;

/// Renders `x` with six significant digits, switching to scientific
/// notation below `1e-4`. Zero is written as `0`.
pub fn format_number(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    if x.abs() < SCIENTIFIC_BELOW {
        return format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x);
    }
    let exponent = x.abs().log10().floor() as i32;
    let decimals = |exp: i32| (SIGNIFICANT_DIGITS as i32 - 1 - exp).max(0) as usize;
    let text = format!("{:.*}", decimals(exponent), x);
    // Rounding can carry into the next decade (0.9999996 -> 1.000000).
    match text.parse::<f64>() {
        Ok(v) if v.abs() >= 10f64.powi(exponent + 1) => {
            format!("{:.*}", decimals(exponent + 1), x)
        }
        _ => text,
    }
}

/// `x` rounded to what [`format_number`] prints.
pub fn rounded(x: f64) -> f64 {
    format_number(x).parse().unwrap_or(x)
}

/// Writes `x` into JSON exactly as [`format_number`] prints it.
pub fn serialize_rounded<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    serde_json::Number::from_str(&format_number(*x))
        .map_err(|_| S::Error::custom(format!("{x} has no JSON representation")))?
        .serialize(s)
}

pub fn serialize_rounded_opt<S: Serializer>(x: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
    match x {
        Some(v) => serialize_rounded(v, s),
        None => s.serialize_none(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_notation_keeps_six_digits() {
        assert_eq!(format_number(0.0239), "0.0239000");
        assert_eq!(format_number(1.632_912_3), "1.63291");
        assert_eq!(format_number(94.408_203), "94.4082");
        assert_eq!(format_number(0.25), "0.250000");
        assert_eq!(format_number(-0.5), "-0.500000");
    }

    #[test]
    fn small_values_use_scientific_notation() {
        assert_eq!(format_number(5.082_658_7e-6), "5.08266e-6");
        assert_eq!(format_number(3.5e-8), "3.50000e-8");
        assert_eq!(format_number(1e-4), "0.000100000");
    }

    #[test]
    fn carry_into_next_decade() {
        assert_eq!(format_number(0.999_999_7), "1.00000");
        assert_eq!(format_number(9.999_999_6), "10.0000");
    }

    #[test]
    fn zero_and_nonfinite() {
        assert_eq!(format_number(0.0), "0");
        assert_eq!(format_number(-0.0), "0");
        assert_eq!(format_number(f64::NAN), "NaN");
    }

    #[test]
    fn printed_values_reparse() {
        for x in [1.0 / 3.0, 2.0e-7 / 3.0, 123.456_789, 0.017_77, 7.0] {
            let text = format_number(x);
            let back: f64 = text.parse().unwrap();
            assert_eq!(format_number(back), text);
            assert!(((back - x) / x).abs() < 5e-6);
        }
    }
}

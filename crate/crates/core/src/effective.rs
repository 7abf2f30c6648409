//! Binary entropy, the dilution equation `1 - H₂(rE) - rD = 0`, and the
//! key-rate upper bound.

use serde::Serialize;

use crate::error::{check, Error, Result};

/// Lower end of the bisection bracket for `r`.
pub const R_FLOOR: f64 = 1e-15;
/// Bracket width at which bisection stops.
pub const R_TOLERANCE: f64 = 1e-12;
/// Rates this far past their bounds are treated as rounding and clamped.
pub const RATE_SLACK: f64 = 1e-12;

/// `H₂(x)` in bits, with `H₂(0) = H₂(1) = 0` exactly.
pub fn binary_entropy(x: f64) -> Result<f64> {
    check((0.0..=1.0).contains(&x), "x", "0 <= x <= 1", x)?;
    Ok(entropy_unchecked(x))
}

fn entropy_unchecked(x: f64) -> f64 {
    if x == 0.0 || x == 1.0 {
        return 0.0;
    }
    -x * x.log2() - (1.0 - x) * (1.0 - x).log2()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EffectiveErrorSolution {
    pub r_star: f64,
    pub effective_error: f64,
    /// `1 - H₂(r*E) - r*D` at the returned `r*`.
    pub residual: f64,
    /// False when the left side is still nonnegative at `r = 1`, in which
    /// case `r* = 1` and Eve runs the attack on every slot.
    pub interior: bool,
}

fn dilution(r: f64, error_rate: f64, detection_rate: f64) -> f64 {
    1.0 - entropy_unchecked(r * error_rate) - r * detection_rate
}

/// Solves `1 - H₂(rE) - rD = 0` for `r ∈ (0, 1]` by bisection.
///
/// The left side is strictly decreasing on `(0, 1]` for `0 < E <= 1/2`,
/// `D > 0`, so the root is unique.
pub fn solve_r(error_rate: f64, detection_rate: f64) -> Result<EffectiveErrorSolution> {
    check(
        (0.0..=0.5 + RATE_SLACK).contains(&error_rate),
        "E",
        "0 <= E <= 1/2",
        error_rate,
    )?;
    check(
        (0.0..=1.0 + RATE_SLACK).contains(&detection_rate),
        "D",
        "0 <= D <= 1",
        detection_rate,
    )?;
    let error_rate = error_rate.min(0.5);
    let detection_rate = detection_rate.min(1.0);
    if error_rate == 0.0 && detection_rate == 0.0 {
        return Err(Error::NoRoot);
    }

    let at_one = dilution(1.0, error_rate, detection_rate);
    if at_one >= 0.0 {
        return Ok(EffectiveErrorSolution {
            r_star: 1.0,
            effective_error: error_rate,
            residual: at_one,
            interior: false,
        });
    }

    let (mut lo, mut hi) = (R_FLOOR, 1.0);
    while hi - lo >= R_TOLERANCE {
        let mid = 0.5 * (lo + hi);
        if dilution(mid, error_rate, detection_rate) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let r = 0.5 * (lo + hi);
    Ok(EffectiveErrorSolution {
        r_star: r,
        effective_error: r * error_rate,
        residual: dilution(r, error_rate, detection_rate),
        interior: true,
    })
}

/// `p_click·(1 - H₂(e_exp) - r·D)`; negative values mean no secure key.
pub fn key_rate_upper_bound(
    p_click: f64,
    e_exp: f64,
    ratio: f64,
    detection_rate: f64,
) -> Result<f64> {
    check(
        (0.0..=1.0).contains(&p_click),
        "p_click",
        "0 <= p_click <= 1",
        p_click,
    )?;
    Ok(p_click * (1.0 - binary_entropy(e_exp)? - ratio * detection_rate))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn entropy_values() {
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(1.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(0.5).unwrap(), 1.0);
        assert!((binary_entropy(0.25).unwrap() - 0.811_278_124_459_133).abs() < 1e-12);
        assert!(binary_entropy(1.5).is_err());
        assert!(binary_entropy(-0.1).is_err());
    }

    #[test]
    fn errorless_full_leak_saturates() {
        let s = solve_r(0.0, 1.0).unwrap();
        assert_eq!(s.r_star, 1.0);
        assert_eq!(s.effective_error, 0.0);
        assert!(!s.interior);
    }

    #[test]
    fn no_root_without_error_or_leak() {
        assert_eq!(solve_r(0.0, 0.0), Err(Error::NoRoot));
    }

    #[test]
    fn table_row_k9() {
        let s = solve_r(0.0290, 0.982).unwrap();
        assert!((s.effective_error - 0.0239).abs() < 1e-3, "{s:?}");
    }

    #[test]
    fn rectangular_k2_matches_grid_scan() {
        // Dense grid oracle on the same equation.
        let f = |r: f64| 1.0 - binary_entropy(r * 0.25).unwrap() - r * 0.5;
        let n = 1_000_000;
        let grid_root = (1..=n)
            .map(|j| j as f64 / n as f64)
            .find(|r| f(*r) <= 0.0)
            .unwrap();
        let s = solve_r(0.25, 0.5).unwrap();
        assert!((s.r_star - grid_root).abs() < 2e-6);
        assert!((s.r_star - 0.6821).abs() < 1e-3);
        assert!((s.effective_error - 0.1705).abs() < 1e-3);
    }

    #[test]
    fn rounding_past_the_bounds_is_clamped() {
        let s = solve_r(0.5 + 1e-16, 1.0 + 1e-16).unwrap();
        assert_eq!(s.effective_error, s.r_star * 0.5);
        assert!(solve_r(0.5 + 1e-9, 0.5).is_err());
    }

    #[test]
    fn key_rate_examples() {
        assert_eq!(key_rate_upper_bound(1e-3, 0.0, 0.5, 0.0).unwrap(), 1e-3);
        assert!(key_rate_upper_bound(1e-3, 0.5, 0.5, 0.9).unwrap() <= 0.0);
    }

    #[test]
    fn key_rate_vanishes_at_dilution_root() {
        let p_click = 5.12e-6;
        let e_exp = 0.034;
        let leak = 1.0 - binary_entropy(e_exp).unwrap();
        assert!(
            key_rate_upper_bound(p_click, e_exp, 1.0, leak)
                .unwrap()
                .abs()
                < 1e-18
        );
    }

    proptest! {
        #[test]
        fn interior_roots_are_tight(e in 0.001f64..0.5, d in 0.05f64..1.0) {
            let s = solve_r(e, d).unwrap();
            prop_assert!(s.effective_error <= e);
            if s.interior {
                prop_assert!(s.residual.abs() < 1e-9);
                let rate = key_rate_upper_bound(1.0, s.effective_error, s.r_star, d).unwrap();
                prop_assert!(rate.abs() < 1e-9);
                // Decreasing on the bracket.
                let samples: Vec<f64> = (1..=50).map(|j| dilution(j as f64 / 50.0, e, d)).collect();
                prop_assert!(samples.windows(2).all(|w| w[1] < w[0]));
            }
        }
    }
}

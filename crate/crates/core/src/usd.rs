//! Eve's unambiguous-state-discrimination statistics.

use serde::Serialize;

use crate::error::{check, Error, Result};

/// Per-pulse success probability `1 - exp(-2 n̄)` of discriminating two
/// coherent states of opposite phase.
pub fn p_usd(nbar: f64) -> Result<f64> {
    check(nbar >= 0.0 && !nbar.is_nan(), "nbar", "nbar >= 0", nbar)?;
    Ok(-(-2.0 * nbar).exp_m1())
}

/// Rate, per pulse position, of a discrimination success run of length at
/// least `k` that follows a failure.
pub fn p_seq(k: usize, nbar: f64) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidLength { min: 1, got: 0 });
    }
    let p = p_usd(nbar)?;
    let exponent = i32::try_from(k).unwrap_or(i32::MAX);
    Ok((1.0 - p) * p.powi(exponent))
}

/// Fraction `ε = (1 - r)·p_click / n̄` of Alice's pulses Eve forwards
/// untouched. Reported only; key-length accounting ignores it.
pub fn kept_fraction(ratio: f64, p_click: f64, nbar: f64) -> Result<f64> {
    check(ratio > 0.0 && ratio <= 1.0, "r", "0 < r <= 1", ratio)?;
    check(nbar > 0.0, "nbar", "nbar > 0", nbar)?;
    Ok((1.0 - ratio) * p_click / nbar)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SequentialEvent {
    pub length: usize,
    pub rate: f64,
}

impl SequentialEvent {
    pub fn new(length: usize, nbar: f64) -> Result<Self> {
        Ok(Self {
            length,
            rate: p_seq(length, nbar)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn vacuum_is_never_discriminated() {
        assert_eq!(p_usd(0.0).unwrap(), 0.0);
        assert_eq!(p_seq(3, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn bright_pulses_always_discriminated() {
        assert!((p_usd(50.0).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn p_usd_at_02() {
        assert!((p_usd(0.2).unwrap() - 0.329_679_953_964_361).abs() < 1e-12);
    }

    #[test]
    fn p_seq_k9_nbar02() {
        let p = p_seq(9, 0.2).unwrap();
        assert!((p / 3.08e-5 - 1.0).abs() < 0.01, "{p}");
    }

    #[test]
    fn p_seq_k1_nbar02() {
        assert!((p_seq(1, 0.2).unwrap() - 0.220_990).abs() < 1e-5);
    }

    #[test]
    fn p_seq_rejects_zero_length() {
        assert_eq!(p_seq(0, 0.2), Err(Error::InvalidLength { min: 1, got: 0 }));
    }

    #[test]
    fn negative_photon_number_rejected() {
        assert!(p_usd(-0.1).is_err());
    }

    #[test]
    fn kept_fraction_examples() {
        assert_eq!(kept_fraction(1.0, 5e-6, 0.2).unwrap(), 0.0);
        assert!((kept_fraction(0.5, 5e-6, 0.2).unwrap() - 1.25e-5).abs() < 1e-18);
        assert!((kept_fraction(1e-12, 0.3, 0.3).unwrap() - 1.0).abs() < 1e-11);
        assert!(kept_fraction(0.0, 5e-6, 0.2).is_err());
    }

    proptest! {
        #[test]
        fn p_seq_decreasing_in_length(k in 1usize..40, nbar in 0.01f64..5.0) {
            prop_assert!(p_seq(k + 1, nbar).unwrap() < p_seq(k, nbar).unwrap());
        }

        #[test]
        fn p_seq_has_interior_maximum(k in 1usize..30) {
            // (1-p) p^k peaks at p = k/(k+1).
            let p_star = k as f64 / (k as f64 + 1.0);
            let n_star = -(1.0 - p_star).ln() / 2.0;
            let peak = p_seq(k, n_star).unwrap();
            prop_assert!(p_seq(k, n_star * 0.8).unwrap() < peak);
            prop_assert!(p_seq(k, n_star * 1.25).unwrap() < peak);
            prop_assert!(p_seq(k, 1e-6).unwrap() < 1e-5);
            prop_assert!(p_seq(k, 30.0).unwrap() < 1e-20);
        }
    }

    #[test]
    fn run_length_weighted_sum_matches_simulation() {
        let nbar = 0.2;
        let p = p_usd(nbar).unwrap();
        let trials = 1_000_000usize;

        let analytic: f64 = (1..200)
            .map(|k| (p_seq(k, nbar).unwrap() - p_seq(k + 1, nbar).unwrap()) * k as f64)
            .sum();

        // Runs of successes that start right after a failure.
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        let mut prev_fail = false;
        let mut run = 0usize;
        let mut counting = false;
        let mut weighted = 0usize;
        for _ in 0..trials {
            let ok = rng.gen_bool(p);
            if ok {
                if prev_fail {
                    counting = true;
                    run = 0;
                }
                if counting {
                    run += 1;
                }
            } else {
                if counting {
                    weighted += run;
                }
                counting = false;
            }
            prev_fail = !ok;
        }
        let empirical = weighted as f64 / trials as f64;
        let se = (p * (1.0 - p) / trials as f64).sqrt();
        assert!(
            (empirical - analytic).abs() < 3.0 * se,
            "empirical {empirical} analytic {analytic} se {se}"
        );
    }
}

//! Width optimization of the gaussian profile and the continuous-limit
//! approximations of its rates.

use std::ops::RangeInclusive;

use serde::Serialize;

use crate::attack::{detection_rate, error_rate, AttackRates};
use crate::error::{check, Error, Result};
use crate::profile::AmplitudeProfile;

pub const SIGMA_MIN: f64 = 0.2;
pub const SIGMA_MAX: f64 = 8.0;
pub const SIGMA_GRID_STEP: f64 = 0.01;
pub const SIGMA_TOLERANCE: f64 = 1e-5;

/// One row of the optimized-gaussian table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OptimizedRow {
    pub k: usize,
    pub sigma_star: f64,
    pub error_rate: f64,
    pub detection_rate: f64,
    pub effective_error: f64,
    pub r_star: f64,
}

/// Golden-section search for a minimum of `f` on `[lo, hi]`, stopping once
/// the bracket is narrower than `tol`.
pub fn golden_section_min<F>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64)
where
    F: Fn(f64) -> f64,
{
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > tol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        }
    }
    let x = 0.5 * (lo + hi);
    (x, f(x))
}

/// Coarse grid over `[lo, hi]` followed by golden-section refinement around
/// the best grid point. The grid keeps the refinement from latching onto a
/// shallow local minimum.
pub fn grid_then_golden<F>(f: F, lo: f64, hi: f64, step: f64, tol: f64) -> (f64, f64)
where
    F: Fn(f64) -> f64,
{
    let steps = ((hi - lo) / step).round() as usize;
    let (best, _) = (0..=steps)
        .map(|j| {
            let x = lo + j as f64 * step;
            (x, f(x))
        })
        .fold(
            (lo, f64::INFINITY),
            |acc, (x, v)| if v < acc.1 { (x, v) } else { acc },
        );
    golden_section_min(&f, (best - step).max(lo), (best + step).min(hi), tol)
}

fn gaussian_error(k: usize, sigma: f64) -> f64 {
    AmplitudeProfile::gaussian(k, sigma, 0)
        .map(|p| error_rate(&p))
        .unwrap_or(f64::INFINITY)
}

/// Minimizes `E(k)` of the discretized gaussian over `σ ∈ [0.2, 8]`.
pub fn optimize_sigma(k: usize) -> Result<OptimizedRow> {
    if k < 2 {
        return Err(Error::InvalidLength { min: 2, got: k });
    }
    let (sigma, _) = grid_then_golden(
        |s| gaussian_error(k, s),
        SIGMA_MIN,
        SIGMA_MAX,
        SIGMA_GRID_STEP,
        SIGMA_TOLERANCE,
    );
    let profile = AmplitudeProfile::gaussian(k, sigma, 0)?;
    let rates = AttackRates::from_rates(error_rate(&profile), detection_rate(&profile))?;
    Ok(OptimizedRow {
        k,
        sigma_star: sigma,
        error_rate: rates.error_rate,
        detection_rate: rates.detection_rate,
        effective_error: rates.effective_error,
        r_star: rates.suppression,
    })
}

/// Optimized rows for every `k` in `ks`.
pub fn optimize_table(ks: RangeInclusive<usize>) -> Result<Vec<OptimizedRow>> {
    ks.map(optimize_sigma).collect()
}

/// First-order continuous-limit error rate `1/(16σ²) + 1 - erf(k/(2√2 σ))`.
pub fn approx_error_continuous(k: f64, sigma: f64) -> Result<f64> {
    check(sigma > 0.0, "sigma", "sigma > 0", sigma)?;
    Ok(1.0 / (16.0 * sigma * sigma) + libm::erfc(k / (2.0 * 2f64.sqrt() * sigma)))
}

/// Continuous-limit detection rate `erf(k/(2√2 σ))`.
pub fn approx_detection_continuous(k: f64, sigma: f64) -> Result<f64> {
    check(sigma > 0.0, "sigma", "sigma > 0", sigma)?;
    Ok(libm::erf(k / (2.0 * 2f64.sqrt() * sigma)))
}

/// Minimum over `σ ∈ [0.2, 8]` of [`approx_error_continuous`], as `(σ, E)`.
pub fn approx_min_error_continuous(k: f64) -> (f64, f64) {
    grid_then_golden(
        |s| approx_error_continuous(k, s).unwrap_or(f64::INFINITY),
        SIGMA_MIN,
        SIGMA_MAX,
        SIGMA_GRID_STEP,
        SIGMA_TOLERANCE,
    )
}

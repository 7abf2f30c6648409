//! Attack feasibility against a concrete setup, the individual-attack rate
//! it competes with, and scans over photon number and distance.

use std::fmt;
use std::ops::RangeInclusive;

use serde::Serialize;

use crate::effective::binary_entropy;
use crate::error::{check, Error, Result};
use crate::optimize::{optimize_sigma, optimize_table, OptimizedRow};
use crate::params::{ExperimentParams, Setup};
use crate::usd::{kept_fraction, p_seq};

/// Window lengths tried when looking for a feasible sequential attack.
pub const K_RANGE: RangeInclusive<usize> = 2..=20;
/// Precision of region boundaries on the photon-number axis.
pub const BOUNDARY_TOLERANCE: f64 = 1e-4;
/// Upper end of the distance search, km.
pub const DISTANCE_LIMIT_KM: f64 = 500.0;
/// Precision of the insecurity onset, km.
pub const DISTANCE_TOLERANCE_KM: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeasibilityReport {
    pub k: usize,
    pub nbar: f64,
    pub p_click: f64,
    pub p_seq: f64,
    pub e_exp: f64,
    pub sigma: f64,
    pub error_rate: f64,
    pub detection_rate: f64,
    pub effective_error: f64,
    pub r_star: f64,
    /// Pulses Eve forwards untouched; reported, not subtracted.
    pub kept_fraction: f64,
    /// `p_click <= p_seq`: enough runs even without dilution.
    pub enough_runs_undiluted: bool,
    /// `r*·p_click <= p_seq`
    pub enough_runs: bool,
    /// `E_eff <= e_exp`
    pub within_error_budget: bool,
    pub feasible: bool,
    pub reasons: Vec<String>,
}

/// Checks the sequential attack with the optimized gaussian `row` against
/// `params`.
pub fn assess(params: &ExperimentParams, row: &OptimizedRow) -> Result<FeasibilityReport> {
    let nbar = params.mean_photon_number();
    let click = params.p_click()?;
    let qber = params.e_exp()?;
    let runs = p_seq(row.k, nbar)?;

    let enough_runs = row.r_star * click <= runs;
    let within_error_budget = row.effective_error <= qber;
    let verdict = |ok: bool| if ok { "satisfied" } else { "violated" };
    let reasons = vec![
        format!(
            "sequential runs: r*·p_click = {:.4e} <= p_seq(k={}) = {:.4e} ({})",
            row.r_star * click,
            row.k,
            runs,
            verdict(enough_runs)
        ),
        format!(
            "error budget: E_eff = {:.4e} <= e_exp = {:.4e} ({})",
            row.effective_error,
            qber,
            verdict(within_error_budget)
        ),
    ];

    Ok(FeasibilityReport {
        k: row.k,
        nbar,
        p_click: click,
        p_seq: runs,
        e_exp: qber,
        sigma: row.sigma_star,
        error_rate: row.error_rate,
        detection_rate: row.detection_rate,
        effective_error: row.effective_error,
        r_star: row.r_star,
        kept_fraction: kept_fraction(row.r_star, click, nbar)?,
        enough_runs_undiluted: click <= runs,
        enough_runs,
        within_error_budget,
        feasible: enough_runs && within_error_budget,
        reasons,
    })
}

/// Optimizes the gaussian for `k` and checks it against `params`.
pub fn feasible_sequential(params: &ExperimentParams, k: usize) -> Result<FeasibilityReport> {
    if k < 2 {
        return Err(Error::InvalidLength { min: 2, got: k });
    }
    assess(params, &optimize_sigma(k)?)
}

/// Upper bound `1 - e² - (1 - 6e)²/2` on the collision probability, used
/// as an equality.
pub fn collision_bound(qber: f64) -> f64 {
    1.0 - qber * qber - (1.0 - 6.0 * qber).powi(2) / 2.0
}

/// QBER above which the collision bound no longer applies.
pub const COLLISION_BOUND_MAX_QBER: f64 = 1.0 / 6.0;

/// Key rate under the photon-wise individual attack:
/// `-p_click·[(1 - 2n̄)·log₂ P_C0 + H₂(e_exp)]`.
///
/// Defined for `e_exp < 1/6`; past that the bound turns over and would
/// report spurious key.
pub fn individual_attack_rate(params: &ExperimentParams) -> Result<f64> {
    let click = params.p_click()?;
    let qber = params.e_exp()?;
    let collision = collision_bound(qber);
    if qber >= COLLISION_BOUND_MAX_QBER || !(collision > 0.0 && collision <= 1.0) {
        return Err(Error::QberOutOfModel { qber, collision });
    }
    let nbar = params.mean_photon_number();
    Ok(-click * ((1.0 - 2.0 * nbar) * collision.log2() + binary_entropy(qber)?))
}

/// Optimized gaussian rows for a range of window lengths, computed once and
/// shared across scans.
#[derive(Debug, Clone, PartialEq)]
pub struct AttackCatalog {
    rows: Vec<OptimizedRow>,
}

impl AttackCatalog {
    pub fn new() -> Result<Self> {
        Self::with_range(K_RANGE)
    }

    pub fn with_range(ks: RangeInclusive<usize>) -> Result<Self> {
        Ok(Self {
            rows: optimize_table(ks)?,
        })
    }

    pub fn rows(&self) -> &[OptimizedRow] {
        &self.rows
    }

    pub fn row(&self, k: usize) -> Option<&OptimizedRow> {
        self.rows.iter().find(|r| r.k == k)
    }

    /// Report for the smallest feasible `k`, if any.
    pub fn first_feasible(&self, params: &ExperimentParams) -> Result<Option<FeasibilityReport>> {
        for row in &self.rows {
            let report = assess(params, row)?;
            if report.feasible {
                return Ok(Some(report));
            }
        }
        Ok(None)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AttackType {
    Individual,
    Sequential,
    None,
}

impl fmt::Display for AttackType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AttackType::Individual => "individual",
            AttackType::Sequential => "sequential",
            AttackType::None => "none",
        })
    }
}

/// Which attack breaks the link at one photon number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub attack: AttackType,
    pub k: Option<usize>,
}

/// Individual if its rate is nonpositive or the QBER is at least 1/6,
/// otherwise the
/// smallest feasible sequential `k`, otherwise none.
pub fn classify(setup: &Setup, nbar: f64, catalog: &AttackCatalog) -> Result<Verdict> {
    let params = setup.experiment_with_nbar(nbar)?;
    match individual_attack_rate(&params) {
        Ok(rate) if rate <= 0.0 => {
            return Ok(Verdict {
                attack: AttackType::Individual,
                k: None,
            })
        }
        Err(Error::QberOutOfModel { .. }) => {
            return Ok(Verdict {
                attack: AttackType::Individual,
                k: None,
            })
        }
        Err(e) => return Err(e),
        Ok(_) => {}
    }
    Ok(match catalog.first_feasible(&params)? {
        Some(report) => Verdict {
            attack: AttackType::Sequential,
            k: Some(report.k),
        },
        None => Verdict {
            attack: AttackType::None,
            k: None,
        },
    })
}

/// Evenly spaced photon numbers `min, min+step, ..., max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NbarGrid {
    min: f64,
    max: f64,
    step: f64,
}

impl Default for NbarGrid {
    fn default() -> Self {
        Self {
            min: 0.01,
            max: 1.0,
            step: 0.005,
        }
    }
}

impl NbarGrid {
    pub const MAX_STEP: f64 = 0.005;

    pub fn new(min: f64, max: f64, step: f64) -> Result<Self> {
        check(min > 0.0, "min", "min > 0", min)?;
        check(max > min, "max", "max > min", max)?;
        check(
            step > 0.0 && step <= Self::MAX_STEP,
            "step",
            "0 < step <= 0.005",
            step,
        )?;
        Ok(Self { min, max, step })
    }

    pub fn min(&self) -> f64 {
        self.min
    }

    pub fn max(&self) -> f64 {
        self.max
    }

    pub fn points(&self) -> Vec<f64> {
        let n = ((self.max - self.min) / self.step).round() as usize;
        let mut pts: Vec<f64> = (0..=n)
            .map(|j| self.min + j as f64 * self.step)
            .filter(|x| *x < self.max)
            .collect();
        pts.push(self.max);
        pts
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Region {
    pub nbar_low: f64,
    pub nbar_high: f64,
    pub attack: AttackType,
    pub k: Option<usize>,
}

/// Partition of a photon-number range into attack regions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionTable {
    pub regions: Vec<Region>,
}

impl RegionTable {
    pub fn has_secure_region(&self) -> bool {
        self.regions.iter().any(|r| r.attack == AttackType::None)
    }

    /// True when the regions tile `[min, max]` in order without gaps.
    pub fn is_partition_of(&self, min: f64, max: f64) -> bool {
        let Some(first) = self.regions.first() else {
            return false;
        };
        let last = self.regions.last().unwrap();
        first.nbar_low == min
            && last.nbar_high == max
            && self
                .regions
                .windows(2)
                .all(|w| w[0].nbar_high == w[1].nbar_low)
            && self.regions.iter().all(|r| r.nbar_low < r.nbar_high)
    }
}

/// Labels every grid point, merges runs of equal verdicts, and refines each
/// boundary by bisection to [`BOUNDARY_TOLERANCE`].
pub fn scan_nbar(setup: &Setup, grid: &NbarGrid, catalog: &AttackCatalog) -> Result<RegionTable> {
    let points = grid.points();
    let verdicts = points
        .iter()
        .map(|n| classify(setup, *n, catalog))
        .collect::<Result<Vec<_>>>()?;

    let mut regions = Vec::new();
    let mut low = grid.min;
    for j in 1..points.len() {
        let (before, after) = (verdicts[j - 1], verdicts[j]);
        if before == after {
            continue;
        }
        let (mut lo, mut hi) = (points[j - 1], points[j]);
        while hi - lo > BOUNDARY_TOLERANCE {
            let mid = 0.5 * (lo + hi);
            if classify(setup, mid, catalog)? == before {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let boundary = 0.5 * (lo + hi);
        regions.push(Region {
            nbar_low: low,
            nbar_high: boundary,
            attack: before.attack,
            k: before.k,
        });
        low = boundary;
    }
    let last = verdicts[verdicts.len() - 1];
    regions.push(Region {
        nbar_low: low,
        nbar_high: grid.max,
        attack: last.attack,
        k: last.k,
    });
    Ok(RegionTable { regions })
}

fn grid_has_secure_point(setup: &Setup, grid: &NbarGrid, catalog: &AttackCatalog) -> Result<bool> {
    for n in grid.points() {
        if classify(setup, n, catalog)?.attack == AttackType::None {
            return Ok(true);
        }
    }
    Ok(false)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistanceReport {
    /// Shortest fiber length at which every grid photon number is broken;
    /// `None` when a secure photon number survives up to the search limit.
    pub onset_km: Option<f64>,
    pub search_limit_km: f64,
    /// Regions at the onset, or at the search limit when there is none.
    pub regions: RegionTable,
}

/// Bisects the fiber length for the onset of insecurity.
pub fn max_secure_distance(
    setup: &Setup,
    grid: &NbarGrid,
    catalog: &AttackCatalog,
) -> Result<DistanceReport> {
    let secure_at =
        |km: f64| -> Result<bool> { grid_has_secure_point(&setup.at_length(km)?, grid, catalog) };
    let report = |km: Option<f64>| -> Result<DistanceReport> {
        let at = km.unwrap_or(DISTANCE_LIMIT_KM);
        Ok(DistanceReport {
            onset_km: km,
            search_limit_km: DISTANCE_LIMIT_KM,
            regions: scan_nbar(&setup.at_length(at)?, grid, catalog)?,
        })
    };

    if !secure_at(0.0)? {
        return report(Some(0.0));
    }
    if secure_at(DISTANCE_LIMIT_KM)? {
        return report(None);
    }
    let (mut lo, mut hi) = (0.0, DISTANCE_LIMIT_KM);
    while hi - lo > DISTANCE_TOLERANCE_KM {
        let mid = 0.5 * (lo + hi);
        if secure_at(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    report(Some(hi))
}

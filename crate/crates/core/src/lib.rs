//! Analysis of the intensity-modulated sequential attack on
//! differential-phase-shift quantum key distribution (DPS-QKD).
//!
//! Eve measures Alice's pulses with unambiguous state discrimination and,
//! whenever she sees a run of `k` consecutive successes, resends a single
//! photon spread over many time slots with shaped amplitudes. This crate
//! computes the error and detection rates such a photon produces at Bob,
//! the effective error rate after Eve dilutes the attack, the feasibility
//! of the attack for a given link, and the transmission distances at which
//! no photon number leaves a secure key.
//!
//! Module map:
//!
//! - [`params`]: link transmission, click probability, baseline QBER.
//! - [`usd`]: per-pulse discrimination and sequential-run statistics.
//! - [`profile`]: rectangular and discretized-gaussian amplitude profiles.
//! - [`attack`]: interferometer evolution, `E(k)`, `D(k)` and an enumeration oracle.
//! - [`effective`]: binary entropy, the dilution root equation, key-rate bound.
//! - [`optimize`]: per-`k` width optimization and continuous-limit formulas.
//! - [`security`]: feasibility, individual-attack rate, photon-number scans.

pub mod attack;
pub mod effective;
mod error;
pub mod optimize;
pub mod params;
pub mod profile;
pub mod security;
pub mod usd;

pub use attack::{AttackRates, DetectionAmplitudes};
pub use effective::EffectiveErrorSolution;
pub use error::{Error, Result};
pub use optimize::OptimizedRow;
pub use params::{ExperimentParams, LinkParams, Setup, SetupDocument};
pub use profile::{AmplitudeProfile, PhaseAssignment, ProfileShape};
pub use security::{
    AttackCatalog, AttackType, DistanceReport, FeasibilityReport, NbarGrid, Region, RegionTable,
    Verdict,
};
pub use usd::SequentialEvent;

//! Bob's interferometer acting on Eve's single photon, and the resulting
//! error rate `E(k)` and key-bit detection rate `D(k)`.

use serde::Serialize;

use crate::effective::{solve_r, EffectiveErrorSolution};
use crate::error::{Error, Result};
use crate::profile::{AmplitudeProfile, PhaseAssignment};

/// Amplitudes at the two detectors for each output slot. Detector 0
/// reports phase difference `z_i = 0`, detector 1 reports `z_i = 1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DetectionAmplitudes {
    first_slot: i64,
    det0: Vec<f64>,
    det1: Vec<f64>,
}

impl DetectionAmplitudes {
    pub fn first_slot(&self) -> i64 {
        self.first_slot
    }

    pub fn len(&self) -> usize {
        self.det0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.det0.is_empty()
    }

    /// `(amp_det0, amp_det1)` at `slot`, zero outside the output range.
    pub fn amplitudes(&self, slot: i64) -> (f64, f64) {
        usize::try_from(slot - self.first_slot)
            .ok()
            .filter(|j| *j < self.det0.len())
            .map(|j| (self.det0[j], self.det1[j]))
            .unwrap_or((0.0, 0.0))
    }

    /// Probability that `detector` (0 or 1) clicks at `slot`.
    pub fn probability(&self, slot: i64, detector: bool) -> f64 {
        let (a0, a1) = self.amplitudes(slot);
        if detector {
            a1 * a1
        } else {
            a0 * a0
        }
    }

    pub fn slot_probability(&self, slot: i64) -> f64 {
        let (a0, a1) = self.amplitudes(slot);
        a0 * a0 + a1 * a1
    }

    pub fn total_probability(&self) -> f64 {
        self.det0
            .iter()
            .zip(&self.det1)
            .map(|(a, b)| a * a + b * b)
            .sum()
    }
}

/// Evolves `Σ (-1)^{y_i} A_i a_i†|0⟩` through the delay-line interferometer.
/// Output slot `i` mixes input slots `i` and `i-1`, so the output range is
/// one slot longer than the support.
pub fn interferometer_amplitudes(
    profile: &AmplitudeProfile,
    phases: &PhaseAssignment,
) -> DetectionAmplitudes {
    let first = profile.first_slot();
    let last = profile.last_slot() + 1;
    let signed = |i: i64| phases.sign(i) * profile.amplitude(i);
    let (det0, det1) = (first..=last)
        .map(|i| {
            let now = signed(i);
            let prev = signed(i - 1);
            (0.5 * (now + prev), 0.5 * (prev - now))
        })
        .unzip();
    DetectionAmplitudes {
        first_slot: first,
        det0,
        det1,
    }
}

/// `E(k)`: Bob's error probability averaged over Eve's random padding signs.
///
/// Inside the window (`a < i < a+k`) the signs match Alice's and the slot
/// contributes `(A_i - A_{i-1})²/4`; every other slot has at least one
/// random sign and contributes `(A_i² + A_{i-1}²)/4`.
pub fn error_rate(profile: &AmplitudeProfile) -> f64 {
    let a = profile.window_start();
    let end = profile.window_end();
    (profile.first_slot()..=profile.last_slot() + 1)
        .map(|i| {
            let now = profile.amplitude(i);
            let prev = profile.amplitude(i - 1);
            if i > a && i <= end {
                0.25 * (now - prev) * (now - prev)
            } else {
                0.25 * (now * now + prev * prev)
            }
        })
        .sum()
}

/// `D(k)`: probability that Bob's click falls on a phase difference Eve
/// knows, i.e. in output slots `a+1 ..= a+k-1`. Errors there count too,
/// since reconciliation aligns those bits with Eve's.
pub fn detection_rate(profile: &AmplitudeProfile) -> f64 {
    let a = profile.window_start();
    ((a + 1)..=profile.window_end())
        .map(|i| {
            let now = profile.amplitude(i);
            let prev = profile.amplitude(i - 1);
            0.5 * (now * now + prev * prev)
        })
        .sum()
}

/// Largest number of enumerated padding bits.
pub const MAX_ENUMERATED_BITS: usize = 24;

// Alice's bits are irrelevant to the averaged rates; a fixed irregular
// pattern exercises both sign branches of the interferometer.
fn alice_bit(slot: i64) -> bool {
    (slot.wrapping_mul(0x9E37_79B9).wrapping_add(17) >> 3) & 1 == 1
}

/// Independent check of [`error_rate`] and [`detection_rate`] built on
/// [`interferometer_amplitudes`].
///
/// All `2^(2·pad)` choices of Eve's signs in the `pad` slots on each side of
/// the window are enumerated explicitly and the per-assignment error and
/// known-bit detection probabilities are averaged. Output slots that touch
/// a slot further out have an independent random sign and use the averaged
/// term `(A_i² + A_{i-1}²)/4`.
pub fn brute_force_rates(profile: &AmplitudeProfile, pad: usize) -> Result<(f64, f64)> {
    if pad == 0 {
        return Err(Error::InvalidLength { min: 1, got: 0 });
    }
    let bits = 2 * pad;
    if bits > MAX_ENUMERATED_BITS {
        return Err(Error::EnumerationTooLarge(bits));
    }
    let a = profile.window_start();
    let end = profile.window_end();
    let lo = a - pad as i64;
    let hi = end + pad as i64;
    let explicit = |i: i64| i > lo && i <= hi;

    let averaged: f64 = (profile.first_slot()..=profile.last_slot() + 1)
        .filter(|i| !explicit(*i))
        .map(|i| {
            let now = profile.amplitude(i);
            let prev = profile.amplitude(i - 1);
            0.25 * (now * now + prev * prev)
        })
        .sum();

    let count = 1usize << bits;
    let mut error_total = 0.0;
    let mut detect_total = 0.0;
    for mask in 0..count {
        // Bit j of the mask flips Eve's sign relative to Alice's in pad slot j
        // (left pad slots first).
        let flip = |i: i64| -> bool {
            let j = if i < a {
                i - lo
            } else if i > end {
                pad as i64 + (i - end - 1)
            } else {
                return false;
            };
            (0..bits as i64).contains(&j) && (mask >> j) & 1 == 1
        };
        let phases = PhaseAssignment::from_fn(profile, |i| alice_bit(i) ^ flip(i));
        let out = interferometer_amplitudes(profile, &phases);

        let mut err = 0.0;
        for i in (lo + 1)..=hi {
            let z = alice_bit(i) ^ alice_bit(i - 1);
            err += out.probability(i, !z);
        }
        let det: f64 = ((a + 1)..=end).map(|i| out.slot_probability(i)).sum();
        error_total += err;
        detect_total += det;
    }
    let n = count as f64;
    Ok((averaged + error_total / n, detect_total / n))
}

/// `E(k)`, `D(k)` and the diluted attack for one profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AttackRates {
    pub error_rate: f64,
    pub detection_rate: f64,
    pub suppression: f64,
    pub effective_error: f64,
    /// True when no interior root exists and the attack runs at `r = 1`.
    pub saturated: bool,
}

impl AttackRates {
    pub fn of(profile: &AmplitudeProfile) -> Result<Self> {
        Self::from_rates(error_rate(profile), detection_rate(profile))
    }

    pub fn from_rates(error_rate: f64, detection_rate: f64) -> Result<Self> {
        let EffectiveErrorSolution {
            r_star,
            effective_error,
            interior,
            ..
        } = solve_r(error_rate, detection_rate)?;
        Ok(Self {
            error_rate,
            detection_rate,
            suppression: r_star,
            effective_error,
            saturated: !interior,
        })
    }
}

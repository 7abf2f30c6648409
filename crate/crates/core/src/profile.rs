//! Amplitude profiles of the single photon Eve resends.
//!
//! A profile stores nonnegative real amplitudes `A_i` over a contiguous
//! range of time slots. The slots `[a, a+k-1]` whose phases Eve learned
//! form the known window; signs live in a separate [`PhaseAssignment`].

use serde::Serialize;

use crate::error::{check, Error, Result};

/// Bound on the squared-amplitude mass discarded by truncating a gaussian.
pub const TAIL_MASS_BOUND: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum ProfileShape {
    Rectangular,
    Gaussian {
        center: f64,
        sigma: f64,
        norm_constant: f64,
    },
    Custom,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AmplitudeProfile {
    first_slot: i64,
    amplitudes: Vec<f64>,
    window_start: i64,
    window_length: usize,
    truncation: usize,
    shape: ProfileShape,
}

/// Scales `raw` to unit squared norm.
pub fn normalize(raw: &[f64]) -> Result<Vec<f64>> {
    let norm_sq: f64 = raw.iter().map(|a| a * a).sum();
    if norm_sq.is_nan() || norm_sq <= 0.0 || norm_sq.is_infinite() {
        return Err(Error::ZeroNorm);
    }
    let scale = norm_sq.sqrt().recip();
    Ok(raw.iter().map(|a| a * scale).collect())
}

fn check_window(k: usize) -> Result<()> {
    if k == 0 {
        Err(Error::InvalidLength { min: 1, got: 0 })
    } else {
        Ok(())
    }
}

impl AmplitudeProfile {
    /// Flat profile `1/√k` on the window `[0, k-1]`.
    pub fn rectangular(k: usize) -> Result<Self> {
        check_window(k)?;
        let amp = (k as f64).sqrt().recip();
        Ok(Self {
            first_slot: 0,
            amplitudes: vec![amp; k],
            window_start: 0,
            window_length: k,
            truncation: 0,
            shape: ProfileShape::Rectangular,
        })
    }

    /// Discretized gaussian `C·exp(-(i-c)²/(4σ²))` centred on the window
    /// `[a, a+k-1]`, truncated at the smallest margin `M` whose discarded
    /// squared mass is below [`TAIL_MASS_BOUND`].
    pub fn gaussian(k: usize, sigma: f64, window_start: i64) -> Result<Self> {
        check_window(k)?;
        check(
            sigma > 0.0 && sigma.is_finite(),
            "sigma",
            "sigma > 0",
            sigma,
        )?;
        let center = window_start as f64 + (k as f64 - 1.0) / 2.0;
        // Distance from the centre to the nearest slot: 0 for odd k, 1/2 for even.
        let nearest = if k % 2 == 1 { 0.0 } else { 0.5 };
        let mut margin = (8.0 * sigma).ceil() as usize + 1;
        while gaussian_tail_mass(k, sigma, margin) >= TAIL_MASS_BOUND {
            margin += 1;
        }

        let first_slot = window_start - margin as i64;
        let len = k + 2 * margin;
        let four_var = 4.0 * sigma * sigma;
        let raw: Vec<f64> = (0..len)
            .map(|j| {
                let d = (first_slot + j as i64) as f64 - center;
                (-(d * d - nearest * nearest) / four_var).exp()
            })
            .collect();
        let norm_sq: f64 = raw.iter().map(|a| a * a).sum();
        let scale = norm_sq.sqrt().recip();
        let amplitudes = raw.iter().map(|a| a * scale).collect();
        let norm_constant = scale * (nearest * nearest / four_var).exp();

        Ok(Self {
            first_slot,
            amplitudes,
            window_start,
            window_length: k,
            truncation: margin,
            shape: ProfileShape::Gaussian {
                center,
                sigma,
                norm_constant,
            },
        })
    }

    /// Arbitrary nonnegative profile starting at `first_slot`; the known
    /// window is `[window_start, window_start + k - 1]` and must lie inside
    /// the support.
    pub fn custom(first_slot: i64, raw: &[f64], window_start: i64, k: usize) -> Result<Self> {
        check_window(k)?;
        if let Some(neg) = raw.iter().find(|a| a.is_nan() || **a < 0.0) {
            return Err(Error::InvalidParameter {
                name: "amplitude",
                constraint: "A_i >= 0",
                value: *neg,
            });
        }
        let last = first_slot + raw.len() as i64 - 1;
        if window_start < first_slot || window_start + k as i64 - 1 > last {
            return Err(Error::PhaseMismatch(format!(
                "window [{window_start}, {}] outside support [{first_slot}, {last}]",
                window_start + k as i64 - 1
            )));
        }
        let truncation = (window_start - first_slot).max(last - (window_start + k as i64 - 1));
        Ok(Self {
            first_slot,
            amplitudes: normalize(raw)?,
            window_start,
            window_length: k,
            truncation: truncation as usize,
            shape: ProfileShape::Custom,
        })
    }

    pub fn first_slot(&self) -> i64 {
        self.first_slot
    }

    /// Last slot with stored amplitude.
    pub fn last_slot(&self) -> i64 {
        self.first_slot + self.amplitudes.len() as i64 - 1
    }

    pub fn amplitudes(&self) -> &[f64] {
        &self.amplitudes
    }

    /// `A_i`, zero outside the stored support.
    pub fn amplitude(&self, slot: i64) -> f64 {
        usize::try_from(slot - self.first_slot)
            .ok()
            .and_then(|j| self.amplitudes.get(j).copied())
            .unwrap_or(0.0)
    }

    pub fn window_start(&self) -> i64 {
        self.window_start
    }

    pub fn window_end(&self) -> i64 {
        self.window_start + self.window_length as i64 - 1
    }

    pub fn window_length(&self) -> usize {
        self.window_length
    }

    pub fn in_window(&self, slot: i64) -> bool {
        (self.window_start..=self.window_end()).contains(&slot)
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn shape(&self) -> ProfileShape {
        self.shape
    }

    pub fn sigma(&self) -> Option<f64> {
        match self.shape {
            ProfileShape::Gaussian { sigma, .. } => Some(sigma),
            _ => None,
        }
    }

    pub fn norm_squared(&self) -> f64 {
        self.amplitudes.iter().map(|a| a * a).sum()
    }

    /// `(slot, A_slot)` pairs over the support.
    pub fn slots(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.amplitudes
            .iter()
            .enumerate()
            .map(move |(j, a)| (self.first_slot + j as i64, *a))
    }
}

/// Squared mass of a gaussian window profile beyond margin `m` on both
/// sides, relative to the untruncated total.
fn gaussian_tail_mass(k: usize, sigma: f64, m: usize) -> f64 {
    let half = (k as f64 - 1.0) / 2.0;
    let nearest = if k % 2 == 1 { 0.0 } else { 0.5 };
    let two_var = 2.0 * sigma * sigma;
    let weight = |d: f64| (-(d * d - nearest * nearest) / two_var).exp();

    let mut inside = 0.0;
    let mut d = -(half + m as f64);
    while d <= half + m as f64 + 0.25 {
        inside += weight(d);
        d += 1.0;
    }
    let mut outside = 0.0;
    let mut j = 1usize;
    loop {
        let term = 2.0 * weight(half + (m + j) as f64);
        outside += term;
        if term == 0.0 || term < outside * 1e-17 {
            break;
        }
        j += 1;
    }
    outside / (inside + outside)
}

/// Eve's signs `y_i` over a profile's support, with `y_i = x_i` inside the
/// known window.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PhaseAssignment {
    first_slot: i64,
    bits: Vec<bool>,
    window_start: i64,
    window_length: usize,
}

impl PhaseAssignment {
    /// `known` are the detected phases `x_a..x_{a+k-1}`; `padding` holds the
    /// freely chosen `y_i` for the remaining support slots, left side first.
    pub fn new(profile: &AmplitudeProfile, known: &[bool], padding: &[bool]) -> Result<Self> {
        let k = profile.window_length();
        let support = profile.amplitudes().len();
        if known.len() != k {
            return Err(Error::PhaseMismatch(format!(
                "expected {k} known phases, got {}",
                known.len()
            )));
        }
        if padding.len() != support - k {
            return Err(Error::PhaseMismatch(format!(
                "expected {} padding phases, got {}",
                support - k,
                padding.len()
            )));
        }
        let left = (profile.window_start() - profile.first_slot()) as usize;
        let mut bits = Vec::with_capacity(support);
        bits.extend_from_slice(&padding[..left]);
        bits.extend_from_slice(known);
        bits.extend_from_slice(&padding[left..]);
        Ok(Self {
            first_slot: profile.first_slot(),
            bits,
            window_start: profile.window_start(),
            window_length: k,
        })
    }

    /// Builds an assignment slot by slot; `phase(i)` is consulted for every
    /// support slot, window slots included.
    pub fn from_fn(profile: &AmplitudeProfile, mut phase: impl FnMut(i64) -> bool) -> Self {
        Self {
            first_slot: profile.first_slot(),
            bits: profile.slots().map(|(i, _)| phase(i)).collect(),
            window_start: profile.window_start(),
            window_length: profile.window_length(),
        }
    }

    /// `y_i`; slots outside the support read as 0.
    pub fn bit(&self, slot: i64) -> bool {
        usize::try_from(slot - self.first_slot)
            .ok()
            .and_then(|j| self.bits.get(j).copied())
            .unwrap_or(false)
    }

    /// `(-1)^{y_i}`
    pub fn sign(&self, slot: i64) -> f64 {
        if self.bit(slot) {
            -1.0
        } else {
            1.0
        }
    }

    pub fn known_phases(&self) -> &[bool] {
        let start = (self.window_start - self.first_slot) as usize;
        &self.bits[start..start + self.window_length]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rectangular_unit_impulse() {
        let p = AmplitudeProfile::rectangular(1).unwrap();
        assert_eq!(p.amplitudes(), &[1.0]);
    }

    #[test]
    fn rectangular_k4_is_half() {
        let p = AmplitudeProfile::rectangular(4).unwrap();
        assert_eq!(p.amplitudes(), &[0.5; 4]);
        assert_eq!(p.norm_squared(), 1.0);
    }

    #[test]
    fn rectangular_rejects_zero() {
        assert!(AmplitudeProfile::rectangular(0).is_err());
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(normalize(&[2.0, 0.0, 0.0]).unwrap(), vec![1.0, 0.0, 0.0]);
        let half = normalize(&[1.0, 1.0]).unwrap();
        assert!(half.iter().all(|a| (a - 0.5f64.sqrt()).abs() < 1e-15));
        let pyth = normalize(&[3.0, 4.0]).unwrap();
        assert!((pyth[0] - 0.6).abs() < 1e-15 && (pyth[1] - 0.8).abs() < 1e-15);
        assert_eq!(normalize(&[0.0, 0.0]), Err(Error::ZeroNorm));
    }

    #[test]
    fn gaussian_rejects_nonpositive_sigma() {
        assert!(AmplitudeProfile::gaussian(5, 0.0, 0).is_err());
        assert!(AmplitudeProfile::gaussian(5, -1.0, 0).is_err());
    }

    #[test]
    fn gaussian_delta_limit_odd_k() {
        let p = AmplitudeProfile::gaussian(5, 1e-3, 0).unwrap();
        assert!((p.amplitude(2) - 1.0).abs() < 1e-12);
        assert!((p.norm_squared() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gaussian_even_k_central_pair() {
        let p = AmplitudeProfile::gaussian(6, 1.18, 10).unwrap();
        assert_eq!(p.amplitude(12), p.amplitude(13));
        let p = AmplitudeProfile::gaussian(4, 1e-3, 0).unwrap();
        assert!((p.amplitude(1) - 0.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn gaussian_norm_constant_matches_continuous_limit() {
        let sigma = 6.0;
        let p = AmplitudeProfile::gaussian(9, sigma, 0).unwrap();
        let ProfileShape::Gaussian { norm_constant, .. } = p.shape() else {
            unreachable!()
        };
        let limit = ((2.0 * std::f64::consts::PI).sqrt() * sigma).powf(-0.5);
        assert!((norm_constant / limit - 1.0).abs() < 1e-9);
    }

    #[test]
    fn phase_assignment_keeps_known_bits() {
        let p = AmplitudeProfile::gaussian(3, 0.8, 0).unwrap();
        let pad_len = p.amplitudes().len() - 3;
        let padding: Vec<bool> = (0..pad_len).map(|j| j % 2 == 0).collect();
        let known = [true, false, true];
        let y = PhaseAssignment::new(&p, &known, &padding).unwrap();
        assert_eq!(y.known_phases(), &known);
        assert_eq!(y.sign(0), -1.0);
        assert_eq!(y.sign(1), 1.0);
        assert!(PhaseAssignment::new(&p, &known[..2], &padding).is_err());
    }

    #[test]
    fn custom_requires_window_inside_support() {
        assert!(AmplitudeProfile::custom(0, &[1.0, 2.0], 1, 2).is_err());
        assert!(AmplitudeProfile::custom(0, &[1.0, -2.0], 0, 1).is_err());
        let p = AmplitudeProfile::custom(-1, &[1.0, 2.0, 2.0], 0, 1).unwrap();
        assert!((p.norm_squared() - 1.0).abs() < 1e-15);
        assert_eq!(p.truncation(), 1);
    }

    proptest! {
        #[test]
        fn gaussian_invariants(k in 1usize..25, sigma in 0.05f64..8.0, a in -50i64..50) {
            let p = AmplitudeProfile::gaussian(k, sigma, a).unwrap();
            prop_assert!((p.norm_squared() - 1.0).abs() < 1e-12);
            prop_assert!(gaussian_tail_mass(k, sigma, p.truncation()) < TAIL_MASS_BOUND);

            // Symmetric about the centre, positive, unimodal.
            let amps = p.amplitudes();
            let n = amps.len();
            for j in 0..n / 2 {
                prop_assert_eq!(amps[j], amps[n - 1 - j]);
            }
            prop_assert!(amps.iter().all(|x| *x > 0.0 || sigma < 0.5));
            let peak = amps.iter().cloned().fold(0.0, f64::max);
            let top = amps.iter().position(|x| *x == peak).unwrap();
            prop_assert!(amps[..=top].windows(2).all(|w| w[0] <= w[1]));
            prop_assert!(amps[top..].windows(2).all(|w| w[0] >= w[1]));
        }
    }
}

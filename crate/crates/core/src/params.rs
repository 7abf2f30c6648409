//! Experimental setup: link transmission, Bob's click probability and the
//! baseline QBER observed without an eavesdropper.

use serde::{Deserialize, Serialize};

use crate::error::{check, Error, Result};

fn db_to_linear(loss_db: f64) -> f64 {
    10f64.powf(-loss_db / 10.0)
}

/// Component breakdown of the channel seen by Bob.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinkParams {
    /// Fiber attenuation in dB/km.
    pub fiber_attenuation: f64,
    /// Fiber length in km.
    pub length: f64,
    /// Loss of Bob's Mach-Zehnder interferometer in dB.
    pub interferometer_loss: f64,
    /// Quantum efficiency of Bob's detector.
    pub detector_efficiency: f64,
}

impl LinkParams {
    pub fn new(
        fiber_attenuation: f64,
        length: f64,
        interferometer_loss: f64,
        detector_efficiency: f64,
    ) -> Result<Self> {
        check(
            fiber_attenuation >= 0.0 && fiber_attenuation.is_finite(),
            "fiber_db_per_km",
            "fiber_db_per_km >= 0",
            fiber_attenuation,
        )?;
        check(
            length >= 0.0 && length.is_finite(),
            "length_km",
            "length_km >= 0",
            length,
        )?;
        check(
            interferometer_loss >= 0.0 && interferometer_loss.is_finite(),
            "interferometer_db",
            "interferometer_db >= 0",
            interferometer_loss,
        )?;
        check(
            detector_efficiency > 0.0 && detector_efficiency <= 1.0,
            "detector_efficiency",
            "0 < detector_efficiency <= 1",
            detector_efficiency,
        )?;
        Ok(Self {
            fiber_attenuation,
            length,
            interferometer_loss,
            detector_efficiency,
        })
    }

    /// Same link with a different fiber length.
    pub fn with_length(&self, length: f64) -> Result<Self> {
        Self::new(
            self.fiber_attenuation,
            length,
            self.interferometer_loss,
            self.detector_efficiency,
        )
    }

    /// Total loss in dB, detector efficiency excluded.
    pub fn loss_db(&self) -> f64 {
        self.fiber_attenuation * self.length + self.interferometer_loss
    }

    pub fn transmission(&self) -> f64 {
        transmission(self)
    }
}

/// `T = η_int · η_det · 10^(-α L / 10)` with the interferometer loss given in dB.
pub fn transmission(link: &LinkParams) -> f64 {
    db_to_linear(link.loss_db()) * link.detector_efficiency
}

/// Source, channel and detector parameters for one operating point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExperimentParams {
    mean_photon_number: f64,
    transmission: f64,
    dark_count: f64,
    baseline_error: f64,
    pulse_count: Option<u64>,
}

impl ExperimentParams {
    pub fn new(
        mean_photon_number: f64,
        transmission: f64,
        dark_count: f64,
        baseline_error: f64,
    ) -> Result<Self> {
        check(
            mean_photon_number > 0.0 && mean_photon_number.is_finite(),
            "nbar",
            "nbar > 0",
            mean_photon_number,
        )?;
        check(
            transmission > 0.0 && transmission <= 1.0,
            "T",
            "0 < T <= 1",
            transmission,
        )?;
        check(
            (0.0..1.0).contains(&dark_count),
            "dark_count",
            "0 <= dark_count < 1",
            dark_count,
        )?;
        check(
            (0.0..0.5).contains(&baseline_error),
            "mu",
            "0 <= mu < 0.5",
            baseline_error,
        )?;
        Ok(Self {
            mean_photon_number,
            transmission,
            dark_count,
            baseline_error,
            pulse_count: None,
        })
    }

    pub fn with_pulse_count(mut self, pulses: u64) -> Self {
        self.pulse_count = Some(pulses);
        self
    }

    pub fn with_mean_photon_number(&self, mean_photon_number: f64) -> Result<Self> {
        let mut next = Self::new(
            mean_photon_number,
            self.transmission,
            self.dark_count,
            self.baseline_error,
        )?;
        next.pulse_count = self.pulse_count;
        Ok(next)
    }

    pub fn mean_photon_number(&self) -> f64 {
        self.mean_photon_number
    }

    pub fn transmission(&self) -> f64 {
        self.transmission
    }

    pub fn dark_count(&self) -> f64 {
        self.dark_count
    }

    pub fn baseline_error(&self) -> f64 {
        self.baseline_error
    }

    pub fn pulse_count(&self) -> Option<u64> {
        self.pulse_count
    }

    pub fn p_click(&self) -> Result<f64> {
        p_click(self)
    }

    pub fn e_exp(&self) -> Result<f64> {
        e_exp(self)
    }
}

/// Bob's per-pulse click probability `T·n̄ + d`.
///
/// Values above one are reported as [`Error::NonphysicalClickRate`] instead
/// of being clamped.
pub fn p_click(params: &ExperimentParams) -> Result<f64> {
    let p = params.transmission * params.mean_photon_number + params.dark_count;
    if p > 1.0 {
        return Err(Error::NonphysicalClickRate(p));
    }
    Ok(p)
}

/// QBER without Eve: `(μ·p_click + d/2) / p_click`.
pub fn e_exp(params: &ExperimentParams) -> Result<f64> {
    let click = p_click(params)?;
    if click <= 0.0 {
        return Err(Error::ZeroClickRate);
    }
    Ok((params.baseline_error * click + params.dark_count / 2.0) / click)
}

/// Raw setup document as read from JSON.
///
/// Either `T` or the four link keys must be present. Unknown keys are
/// rejected by name.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SetupDocument {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nbar: Option<f64>,
    #[serde(rename = "T", skip_serializing_if = "Option::is_none")]
    pub transmission: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fiber_db_per_km: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub length_km: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub interferometer_db: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detector_efficiency: Option<f64>,
    pub dark_count: f64,
    pub mu: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pulse_count: Option<u64>,
}

impl SetupDocument {
    pub fn from_json(text: &str) -> Result<Self> {
        if text.trim().is_empty() {
            return Err(Error::Setup("configuration document is empty".into()));
        }
        serde_json::from_str(text).map_err(|e| Error::Setup(e.to_string()))
    }

    fn link_fields(&self) -> [(&'static str, Option<f64>); 4] {
        [
            ("fiber_db_per_km", self.fiber_db_per_km),
            ("length_km", self.length_km),
            ("interferometer_db", self.interferometer_db),
            ("detector_efficiency", self.detector_efficiency),
        ]
    }
}

/// A validated setup. The photon number is optional so that the same
/// document can drive photon-number scans.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Setup {
    nbar: Option<f64>,
    transmission: f64,
    link: Option<LinkParams>,
    dark_count: f64,
    baseline_error: f64,
    pulse_count: Option<u64>,
    warnings: Vec<String>,
}

impl Setup {
    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_document(&SetupDocument::from_json(text)?)
    }

    pub fn from_document(doc: &SetupDocument) -> Result<Self> {
        let fields = doc.link_fields();
        let present = fields.iter().filter(|(_, v)| v.is_some()).count();
        let mut warnings = Vec::new();

        let link = if present == fields.len() {
            Some(LinkParams::new(
                doc.fiber_db_per_km.unwrap_or_default(),
                doc.length_km.unwrap_or_default(),
                doc.interferometer_db.unwrap_or_default(),
                doc.detector_efficiency.unwrap_or_default(),
            )?)
        } else {
            None
        };

        let transmission = match (doc.transmission, link) {
            (Some(t), Some(link)) => {
                warnings.push(format!(
                    "both `T` and link parameters given; using T = {t} instead of the link value {}",
                    link.transmission()
                ));
                t
            }
            (Some(t), None) => {
                if present > 0 {
                    warnings
                        .push("incomplete link parameters ignored in favour of `T`".to_string());
                }
                t
            }
            (None, Some(link)) => link.transmission(),
            (None, None) => {
                let missing = fields
                    .iter()
                    .find(|(_, v)| v.is_none())
                    .map(|(k, _)| *k)
                    .unwrap_or("T");
                return Err(Error::Setup(format!(
                    "missing field `{missing}` (give either `T` or all of fiber_db_per_km, \
                     length_km, interferometer_db, detector_efficiency)"
                )));
            }
        };

        check(
            transmission > 0.0 && transmission <= 1.0,
            "T",
            "0 < T <= 1",
            transmission,
        )?;
        check(
            (0.0..1.0).contains(&doc.dark_count),
            "dark_count",
            "0 <= dark_count < 1",
            doc.dark_count,
        )?;
        check((0.0..0.5).contains(&doc.mu), "mu", "0 <= mu < 0.5", doc.mu)?;
        if let Some(n) = doc.nbar {
            check(n > 0.0 && n.is_finite(), "nbar", "nbar > 0", n)?;
        }

        Ok(Self {
            nbar: doc.nbar,
            transmission,
            link,
            dark_count: doc.dark_count,
            baseline_error: doc.mu,
            pulse_count: doc.pulse_count,
            warnings,
        })
    }

    pub fn nbar(&self) -> Option<f64> {
        self.nbar
    }

    pub fn transmission(&self) -> f64 {
        self.transmission
    }

    pub fn link(&self) -> Option<&LinkParams> {
        self.link.as_ref()
    }

    pub fn dark_count(&self) -> f64 {
        self.dark_count
    }

    pub fn baseline_error(&self) -> f64 {
        self.baseline_error
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// Operating point at the document's own `nbar`.
    pub fn experiment(&self) -> Result<ExperimentParams> {
        let nbar = self
            .nbar
            .ok_or_else(|| Error::Setup("missing field `nbar`".into()))?;
        self.experiment_with_nbar(nbar)
    }

    pub fn experiment_with_nbar(&self, nbar: f64) -> Result<ExperimentParams> {
        let params = ExperimentParams::new(
            nbar,
            self.transmission,
            self.dark_count,
            self.baseline_error,
        )?;
        Ok(match self.pulse_count {
            Some(n) => params.with_pulse_count(n),
            None => params,
        })
    }

    /// The same setup with the fiber length replaced. Requires link
    /// parameters; a direct `T` is dropped since it no longer applies.
    pub fn at_length(&self, length_km: f64) -> Result<Self> {
        let link = self
            .link
            .ok_or_else(|| {
                Error::Setup("varying the distance requires link parameters, not a bare `T`".into())
            })?
            .with_length(length_km)?;
        Ok(Self {
            transmission: link.transmission(),
            link: Some(link),
            warnings: Vec::new(),
            ..self.clone()
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diamanti_link() -> LinkParams {
        // 100 km at 0.2 dB/km
        LinkParams::new(0.2, 100.0, 2.0, 4e-3).unwrap()
    }

    #[test]
    fn lossless_link_is_identity() {
        let link = LinkParams::new(0.0, 0.0, 0.0, 1.0).unwrap();
        assert_eq!(transmission(&link), 1.0);
    }

    #[test]
    fn diamanti_link_transmission() {
        // 10^(-2.2) * 4e-3
        let t = diamanti_link().transmission();
        assert!((t - 2.5238e-5).abs() < 1e-8, "{t}");
    }

    #[test]
    fn practical_95km_is_31db() {
        let link = LinkParams::new(0.2, 95.0, 2.0, 0.1).unwrap();
        let t = link.transmission();
        assert!((t / 10f64.powf(-3.1) - 1.0).abs() < 1e-12, "{t}");
    }

    #[test]
    fn link_rejects_bad_efficiency() {
        assert!(LinkParams::new(0.2, 10.0, 2.0, 0.0).is_err());
        assert!(LinkParams::new(0.2, 10.0, 2.0, 1.5).is_err());
        assert!(LinkParams::new(-0.1, 10.0, 2.0, 0.5).is_err());
    }

    #[test]
    fn click_rate_without_signal_or_dark_counts() {
        // T = 0 is excluded by the invariant; the tiniest T gives ~0.
        let p = ExperimentParams::new(0.2, f64::MIN_POSITIVE, 0.0, 0.0).unwrap();
        assert!(p_click(&p).unwrap() < 1e-300);
    }

    #[test]
    fn diamanti_click_rate() {
        let t = diamanti_link().transmission();
        let p = ExperimentParams::new(0.2, t, 3.5e-8, 0.0).unwrap();
        let click = p_click(&p).unwrap();
        assert!((click / 5.12e-6 - 1.0).abs() < 0.01, "{click}");
    }

    #[test]
    fn click_rate_95km_nbar_030() {
        let p = ExperimentParams::new(0.30, 10f64.powf(-3.1), 1e-5, 0.01).unwrap();
        assert!((p_click(&p).unwrap() - 2.48298e-4).abs() < 1e-8);
    }

    #[test]
    fn click_rate_above_one_is_an_error() {
        let p = ExperimentParams::new(2.0, 1.0, 0.0, 0.0).unwrap();
        assert!(matches!(p_click(&p), Err(Error::NonphysicalClickRate(_))));
    }

    #[test]
    fn qber_limits() {
        let p = ExperimentParams::new(0.3, 1e-3, 0.0, 0.0).unwrap();
        assert_eq!(e_exp(&p).unwrap(), 0.0);
        let p = ExperimentParams::new(0.3, 1e-3, 0.0, 0.013).unwrap();
        assert!((e_exp(&p).unwrap() - 0.013).abs() < 1e-15);
    }

    #[test]
    fn qber_95km_nbar_030() {
        let p = ExperimentParams::new(0.30, 10f64.powf(-3.1), 1e-5, 0.01).unwrap();
        assert!((e_exp(&p).unwrap() - 0.0302).abs() < 1e-4);
    }

    #[test]
    fn qber_tends_to_half_without_signal() {
        // Only dark counts: half of them land in the wrong detector.
        let p = ExperimentParams::new(1e-9, 1e-9, 1e-5, 0.0).unwrap();
        assert!((e_exp(&p).unwrap() - 0.5).abs() < 1e-6);
    }

    #[test]
    fn qber_decreasing_in_photon_number() {
        let base = ExperimentParams::new(0.01, 1e-3, 1e-5, 0.01).unwrap();
        let values: Vec<f64> = (1..100)
            .map(|j| {
                base.with_mean_photon_number(j as f64 * 0.01)
                    .unwrap()
                    .e_exp()
                    .unwrap()
            })
            .collect();
        assert!(values.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn transmission_is_multiplicative_in_length() {
        let l1 = LinkParams::new(0.2, 30.0, 0.0, 1.0).unwrap();
        let l2 = LinkParams::new(0.2, 45.0, 0.0, 1.0).unwrap();
        let both = LinkParams::new(0.2, 75.0, 0.0, 1.0).unwrap();
        assert!(
            (both.transmission() / (l1.transmission() * l2.transmission()) - 1.0).abs() < 1e-12
        );
    }

    #[test]
    fn setup_prefers_direct_transmission_with_warning() {
        let doc = r#"{"nbar":0.2,"T":0.001,"fiber_db_per_km":0.2,"length_km":100,
            "interferometer_db":2,"detector_efficiency":0.004,"dark_count":3.5e-8,"mu":0.0}"#;
        let setup = Setup::from_json(doc).unwrap();
        assert_eq!(setup.transmission(), 0.001);
        assert_eq!(setup.warnings().len(), 1);
    }

    #[test]
    fn setup_rejects_unknown_keys_by_name() {
        let doc = r#"{"nbar":0.2,"T":0.001,"dark_count":0,"mu":0,"colour":"blue"}"#;
        let err = Setup::from_json(doc).unwrap_err().to_string();
        assert!(err.contains("colour"), "{err}");
    }

    #[test]
    fn setup_names_missing_link_key() {
        let doc = r#"{"nbar":0.2,"fiber_db_per_km":0.2,"length_km":100,
            "detector_efficiency":0.004,"dark_count":0,"mu":0}"#;
        let err = Setup::from_json(doc).unwrap_err().to_string();
        assert!(err.contains("interferometer_db"), "{err}");
    }

    #[test]
    fn setup_rejects_empty_document() {
        assert!(Setup::from_json("  \n").is_err());
    }

    #[test]
    fn setup_at_length_requires_link() {
        let doc = r#"{"T":0.001,"dark_count":0,"mu":0}"#;
        assert!(Setup::from_json(doc).unwrap().at_length(10.0).is_err());
    }
}

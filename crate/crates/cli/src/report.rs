//! Output documents. Field order is fixed by declaration order and every
//! float is rounded to the printed precision before serialization.

use serde::Serialize;

use dpsattack_core::optimize::OptimizedRow;
use dpsattack_core::{
    AmplitudeProfile, AttackRates, AttackType, DistanceReport, FeasibilityReport, ProfileShape,
    Region, RegionTable,
};

use crate::number::{format_number, serialize_rounded, serialize_rounded_opt};
use crate::{CliError, Format};

/// A document that also renders as one CSV record.
pub(crate) trait CsvRecord {
    fn header() -> &'static [&'static str];
    fn record(&self) -> Vec<String>;
}

fn opt_number(x: Option<f64>) -> String {
    x.map(format_number).unwrap_or_default()
}

fn opt_count(k: Option<usize>) -> String {
    k.map(|k| k.to_string()).unwrap_or_default()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableRow {
    pub k: usize,
    #[serde(serialize_with = "serialize_rounded")]
    pub sigma: f64,
    #[serde(rename = "E", serialize_with = "serialize_rounded")]
    pub error_rate: f64,
    #[serde(rename = "D", serialize_with = "serialize_rounded")]
    pub detection_rate: f64,
    #[serde(rename = "E_eff", serialize_with = "serialize_rounded")]
    pub effective_error: f64,
}

impl From<&OptimizedRow> for TableRow {
    fn from(row: &OptimizedRow) -> Self {
        Self {
            k: row.k,
            sigma: row.sigma_star,
            error_rate: row.error_rate,
            detection_rate: row.detection_rate,
            effective_error: row.effective_error,
        }
    }
}

impl CsvRecord for TableRow {
    fn header() -> &'static [&'static str] {
        &["k", "sigma", "E", "D", "E_eff"]
    }

    fn record(&self) -> Vec<String> {
        vec![
            self.k.to_string(),
            format_number(self.sigma),
            format_number(self.error_rate),
            format_number(self.detection_rate),
            format_number(self.effective_error),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatesDocument {
    pub k: usize,
    pub profile: &'static str,
    #[serde(serialize_with = "serialize_rounded_opt")]
    pub sigma: Option<f64>,
    #[serde(rename = "E", serialize_with = "serialize_rounded")]
    pub error_rate: f64,
    #[serde(rename = "D", serialize_with = "serialize_rounded")]
    pub detection_rate: f64,
    #[serde(serialize_with = "serialize_rounded")]
    pub r_star: f64,
    #[serde(rename = "E_eff", serialize_with = "serialize_rounded")]
    pub effective_error: f64,
    pub saturated: bool,
}

impl RatesDocument {
    pub fn new(profile: &AmplitudeProfile, rates: &AttackRates) -> Self {
        Self {
            k: profile.window_length(),
            profile: match profile.shape() {
                ProfileShape::Rectangular => "rectangular",
                ProfileShape::Gaussian { .. } => "gaussian",
                ProfileShape::Custom => "custom",
            },
            sigma: profile.sigma(),
            error_rate: rates.error_rate,
            detection_rate: rates.detection_rate,
            r_star: rates.suppression,
            effective_error: rates.effective_error,
            saturated: rates.saturated,
        }
    }
}

impl CsvRecord for RatesDocument {
    fn header() -> &'static [&'static str] {
        &[
            "k",
            "profile",
            "sigma",
            "E",
            "D",
            "r_star",
            "E_eff",
            "saturated",
        ]
    }

    fn record(&self) -> Vec<String> {
        vec![
            self.k.to_string(),
            self.profile.to_string(),
            opt_number(self.sigma),
            format_number(self.error_rate),
            format_number(self.detection_rate),
            format_number(self.r_star),
            format_number(self.effective_error),
            self.saturated.to_string(),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlotAmplitude {
    pub slot: i64,
    #[serde(serialize_with = "serialize_rounded")]
    pub amplitude: f64,
}

impl CsvRecord for SlotAmplitude {
    fn header() -> &'static [&'static str] {
        &["slot", "amplitude"]
    }

    fn record(&self) -> Vec<String> {
        vec![self.slot.to_string(), format_number(self.amplitude)]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProfileDocument {
    pub k: usize,
    #[serde(serialize_with = "serialize_rounded_opt")]
    pub sigma: Option<f64>,
    pub window_start: i64,
    pub truncation: usize,
    pub slots: Vec<SlotAmplitude>,
}

impl ProfileDocument {
    pub fn new(profile: &AmplitudeProfile) -> Self {
        Self {
            k: profile.window_length(),
            sigma: profile.sigma(),
            window_start: profile.window_start(),
            truncation: profile.truncation(),
            slots: profile
                .slots()
                .map(|(slot, amplitude)| SlotAmplitude { slot, amplitude })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub k: usize,
    #[serde(serialize_with = "serialize_rounded")]
    pub nbar: f64,
    #[serde(serialize_with = "serialize_rounded")]
    pub p_click: f64,
    #[serde(serialize_with = "serialize_rounded")]
    pub p_seq: f64,
    #[serde(serialize_with = "serialize_rounded")]
    pub e_exp: f64,
    #[serde(serialize_with = "serialize_rounded")]
    pub sigma: f64,
    #[serde(rename = "E", serialize_with = "serialize_rounded")]
    pub error_rate: f64,
    #[serde(rename = "D", serialize_with = "serialize_rounded")]
    pub detection_rate: f64,
    #[serde(serialize_with = "serialize_rounded")]
    pub r_star: f64,
    #[serde(rename = "E_eff", serialize_with = "serialize_rounded")]
    pub effective_error: f64,
    #[serde(serialize_with = "serialize_rounded")]
    pub kept_fraction: f64,
    pub enough_runs_undiluted: bool,
    pub enough_runs: bool,
    pub within_error_budget: bool,
    pub feasible: bool,
    pub reasons: Vec<String>,
    pub warnings: Vec<String>,
}

impl CheckReport {
    pub fn new(report: &FeasibilityReport, warnings: &[String]) -> Self {
        Self {
            k: report.k,
            nbar: report.nbar,
            p_click: report.p_click,
            p_seq: report.p_seq,
            e_exp: report.e_exp,
            sigma: report.sigma,
            error_rate: report.error_rate,
            detection_rate: report.detection_rate,
            r_star: report.r_star,
            effective_error: report.effective_error,
            kept_fraction: report.kept_fraction,
            enough_runs_undiluted: report.enough_runs_undiluted,
            enough_runs: report.enough_runs,
            within_error_budget: report.within_error_budget,
            feasible: report.feasible,
            reasons: report.reasons.clone(),
            warnings: warnings.to_vec(),
        }
    }
}

impl CsvRecord for CheckReport {
    fn header() -> &'static [&'static str] {
        &[
            "k",
            "nbar",
            "p_click",
            "p_seq",
            "e_exp",
            "sigma",
            "E",
            "D",
            "r_star",
            "E_eff",
            "kept_fraction",
            "enough_runs_undiluted",
            "enough_runs",
            "within_error_budget",
            "feasible",
            "reasons",
        ]
    }

    fn record(&self) -> Vec<String> {
        vec![
            self.k.to_string(),
            format_number(self.nbar),
            format_number(self.p_click),
            format_number(self.p_seq),
            format_number(self.e_exp),
            format_number(self.sigma),
            format_number(self.error_rate),
            format_number(self.detection_rate),
            format_number(self.r_star),
            format_number(self.effective_error),
            format_number(self.kept_fraction),
            self.enough_runs_undiluted.to_string(),
            self.enough_runs.to_string(),
            self.within_error_budget.to_string(),
            self.feasible.to_string(),
            self.reasons.join("; "),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionRow {
    #[serde(serialize_with = "serialize_rounded")]
    pub nbar_low: f64,
    #[serde(serialize_with = "serialize_rounded")]
    pub nbar_high: f64,
    pub attack: AttackType,
    pub k: Option<usize>,
}

impl From<&Region> for RegionRow {
    fn from(region: &Region) -> Self {
        Self {
            nbar_low: region.nbar_low,
            nbar_high: region.nbar_high,
            attack: region.attack,
            k: region.k,
        }
    }
}

impl CsvRecord for RegionRow {
    fn header() -> &'static [&'static str] {
        &["nbar_low", "nbar_high", "attack", "k"]
    }

    fn record(&self) -> Vec<String> {
        vec![
            format_number(self.nbar_low),
            format_number(self.nbar_high),
            self.attack.to_string(),
            opt_count(self.k),
        ]
    }
}

fn region_rows(table: &RegionTable) -> Vec<RegionRow> {
    table.regions.iter().map(RegionRow::from).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanDocument {
    pub regions: Vec<RegionRow>,
    pub has_secure_region: bool,
    pub warnings: Vec<String>,
}

impl ScanDocument {
    pub fn new(table: &RegionTable, warnings: &[String]) -> Self {
        Self {
            regions: region_rows(table),
            has_secure_region: table.has_secure_region(),
            warnings: warnings.to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistanceDocument {
    #[serde(serialize_with = "serialize_rounded_opt")]
    pub onset_km: Option<f64>,
    #[serde(serialize_with = "serialize_rounded")]
    pub search_limit_km: f64,
    pub regions: Vec<RegionRow>,
    pub warnings: Vec<String>,
}

impl DistanceDocument {
    pub fn new(report: &DistanceReport, warnings: &[String]) -> Self {
        Self {
            onset_km: report.onset_km,
            search_limit_km: report.search_limit_km,
            regions: region_rows(&report.regions),
            warnings: warnings.to_vec(),
        }
    }
}

fn csv_error(e: impl std::fmt::Display) -> CliError {
    CliError::Render(e.to_string())
}

pub(crate) fn to_csv<R: CsvRecord>(rows: &[R]) -> Result<String, CliError> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(R::header()).map_err(csv_error)?;
    for row in rows {
        writer.write_record(row.record()).map_err(csv_error)?;
    }
    let bytes = writer.into_inner().map_err(csv_error)?;
    String::from_utf8(bytes).map_err(csv_error)
}

pub(crate) fn to_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(csv_error)?;
    text.push('\n');
    Ok(text)
}

/// A list of rows: CSV table or JSON array.
pub(crate) fn render_rows<R: CsvRecord + Serialize>(
    format: Format,
    rows: &[R],
) -> Result<String, CliError> {
    match format {
        Format::Csv => to_csv(rows),
        Format::Json => to_json(&rows),
    }
}

/// A single document: one-record CSV or JSON object.
pub(crate) fn render_one<R: CsvRecord + Serialize>(
    format: Format,
    doc: &R,
) -> Result<String, CliError> {
    match format {
        Format::Csv => to_csv(std::slice::from_ref(doc)),
        Format::Json => to_json(doc),
    }
}

/// Region rows with the onset repeated in a leading column, empty when the
/// search limit was reached without one.
pub(crate) fn distance_csv(doc: &DistanceDocument) -> Result<String, CliError> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["onset_km"];
    header.extend_from_slice(RegionRow::header());
    writer.write_record(&header).map_err(csv_error)?;
    for row in &doc.regions {
        let mut record = vec![opt_number(doc.onset_km)];
        record.extend(row.record());
        writer.write_record(&record).map_err(csv_error)?;
    }
    let bytes = writer.into_inner().map_err(csv_error)?;
    String::from_utf8(bytes).map_err(csv_error)
}

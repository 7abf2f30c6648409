//! Command-line front end: argument parsing, setup loading and CSV/JSON
//! report rendering for the sequential-attack analysis.
//!
//! [`run`] builds the complete document in memory so that a failure never
//! leaves partial output behind; [`execute`] then writes it out.

pub mod number;
mod report;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use dpsattack_core::optimize::optimize_table;
use dpsattack_core::security::{
    assess, feasible_sequential, max_secure_distance, scan_nbar, K_RANGE,
};
use dpsattack_core::{
    AmplitudeProfile, AttackCatalog, AttackRates, FeasibilityReport, NbarGrid, Setup,
};

pub use report::{
    CheckReport, DistanceDocument, ProfileDocument, RatesDocument, RegionRow, ScanDocument,
    SlotAmplitude, TableRow,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Parser)]
#[command(
    name = "dpsattack",
    version,
    about = "Sequential-attack analysis for differential-phase-shift QKD"
)]
pub struct RunConfig {
    /// Output format; each subcommand has its own default.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Write the document here instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Optimized gaussian profiles: k, sigma, E, D, E_eff per window length.
    Table1 {
        #[arg(long, default_value_t = 4)]
        k_min: usize,
        #[arg(long, default_value_t = 10)]
        k_max: usize,
    },
    /// Error, detection and effective error rates for one profile.
    Rates {
        #[arg(long)]
        k: usize,
        /// Gaussian width; the optimized width is used when omitted.
        #[arg(long, conflicts_with = "rect")]
        sigma: Option<f64>,
        /// Use the rectangular profile instead of a gaussian.
        #[arg(long)]
        rect: bool,
    },
    /// Slot/amplitude pairs of a gaussian profile.
    ProfileDump {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        sigma: f64,
    },
    /// Feasibility of the sequential attack for a setup.
    Check {
        #[arg(long)]
        config: PathBuf,
        /// Window length; the smallest feasible one in 2..20 when omitted.
        #[arg(long)]
        k: Option<usize>,
    },
    /// Attack regions over a photon-number grid.
    ScanNbar {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 0.01)]
        min: f64,
        #[arg(long, default_value_t = 1.0)]
        max: f64,
        #[arg(long, default_value_t = 0.005)]
        step: f64,
    },
    /// Fiber length beyond which every photon number is broken.
    MaxDistance {
        #[arg(long)]
        config: PathBuf,
    },
}

impl Command {
    fn default_format(&self) -> Format {
        match self {
            Command::Table1 { .. } | Command::ProfileDump { .. } | Command::ScanNbar { .. } => {
                Format::Csv
            }
            Command::Rates { .. } | Command::Check { .. } | Command::MaxDistance { .. } => {
                Format::Json
            }
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("cannot read config `{path}`: {source}")]
    ReadConfig { path: PathBuf, source: io::Error },

    #[error("invalid config `{path}`: {source}")]
    Config {
        path: PathBuf,
        source: dpsattack_core::Error,
    },

    #[error(transparent)]
    Analysis(#[from] dpsattack_core::Error),

    #[error("cannot write `{path}`: {source}")]
    Write { path: PathBuf, source: io::Error },

    #[error("rendering failed: {0}")]
    Render(String),
}

impl CliError {
    /// Process exit status for this failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::ReadConfig { .. } | CliError::Config { .. } => 2,
            _ => 1,
        }
    }
}

/// A rendered document and the setup warnings collected on the way.
#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub document: String,
    pub warnings: Vec<String>,
}

pub fn load_setup(path: &Path) -> Result<Setup, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::ReadConfig {
        path: path.to_path_buf(),
        source,
    })?;
    Setup::from_json(&text).map_err(|source| CliError::Config {
        path: path.to_path_buf(),
        source,
    })
}

/// Runs one subcommand and renders its document.
pub fn run(config: &RunConfig) -> Result<Output, CliError> {
    let format = config
        .format
        .unwrap_or_else(|| config.command.default_format());
    let mut warnings = Vec::new();
    let document = match &config.command {
        Command::Table1 { k_min, k_max } => {
            let rows: Vec<TableRow> = optimize_table(*k_min..=*k_max)?
                .iter()
                .map(TableRow::from)
                .collect();
            report::render_rows(format, &rows)?
        }
        Command::Rates { k, sigma, rect } => {
            report::render_one(format, &rates_document(*k, *sigma, *rect)?)?
        }
        Command::ProfileDump { k, sigma } => {
            let doc = ProfileDocument::new(&AmplitudeProfile::gaussian(*k, *sigma, 0)?);
            match format {
                Format::Csv => report::to_csv(&doc.slots)?,
                Format::Json => report::to_json(&doc)?,
            }
        }
        Command::Check { config, k } => {
            let setup = load_setup(config)?;
            warnings.extend_from_slice(setup.warnings());
            let doc = CheckReport::new(&check(&setup, *k)?, setup.warnings());
            report::render_one(format, &doc)?
        }
        Command::ScanNbar {
            config,
            min,
            max,
            step,
        } => {
            let setup = load_setup(config)?;
            warnings.extend_from_slice(setup.warnings());
            let grid = NbarGrid::new(*min, *max, *step)?;
            let table = scan_nbar(&setup, &grid, &AttackCatalog::new()?)?;
            let doc = ScanDocument::new(&table, setup.warnings());
            match format {
                Format::Csv => report::to_csv(&doc.regions)?,
                Format::Json => report::to_json(&doc)?,
            }
        }
        Command::MaxDistance { config } => {
            let setup = load_setup(config)?;
            warnings.extend_from_slice(setup.warnings());
            let distance =
                max_secure_distance(&setup, &NbarGrid::default(), &AttackCatalog::new()?)?;
            let doc = DistanceDocument::new(&distance, setup.warnings());
            match format {
                Format::Csv => report::distance_csv(&doc)?,
                Format::Json => report::to_json(&doc)?,
            }
        }
    };
    Ok(Output { document, warnings })
}

fn rates_document(k: usize, sigma: Option<f64>, rect: bool) -> Result<RatesDocument, CliError> {
    let profile = if rect {
        AmplitudeProfile::rectangular(k)?
    } else {
        let sigma = match sigma {
            Some(s) => s,
            None => dpsattack_core::optimize::optimize_sigma(k)?.sigma_star,
        };
        AmplitudeProfile::gaussian(k, sigma, 0)?
    };
    Ok(RatesDocument::new(&profile, &AttackRates::of(&profile)?))
}

/// Feasibility report for `k`, or for the smallest feasible window length
/// when `k` is not given.
pub fn check(setup: &Setup, k: Option<usize>) -> Result<FeasibilityReport, CliError> {
    let params = setup.experiment()?;
    if let Some(k) = k {
        return Ok(feasible_sequential(&params, k)?);
    }
    let catalog = AttackCatalog::new()?;
    if let Some(report) = catalog.first_feasible(&params)? {
        return Ok(report);
    }
    let first = *K_RANGE.start();
    let row = catalog.row(first).ok_or_else(|| {
        CliError::Render(format!("window length {first} missing from the catalog"))
    })?;
    let mut report = assess(&params, row)?;
    report.reasons.push(format!(
        "no window length in {}..{} is feasible",
        K_RANGE.start(),
        K_RANGE.end()
    ));
    Ok(report)
}

/// Runs the command and writes the document to the configured destination.
/// Warnings go to standard error.
pub fn execute(config: &RunConfig) -> Result<(), CliError> {
    let output = run(config)?;
    for warning in &output.warnings {
        eprintln!("warning: {warning}");
    }
    match &config.output {
        Some(path) => fs::write(path, &output.document).map_err(|source| CliError::Write {
            path: path.clone(),
            source,
        }),
        None => {
            let mut stdout = io::stdout().lock();
            stdout
                .write_all(output.document.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|source| CliError::Write {
                    path: PathBuf::from("<stdout>"),
                    source,
                })
        }
    }
}

//! Batch commands behind the `rating-markov` binary. Each command reads a
//! panel (or a scenario), calls the library, and writes CSV.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use chrono::NaiveDate;

use crate::diagnostics::{rolling_series, write_test_series, Statistic, WindowLength};
use crate::error::{Error, Result};
use crate::ingest::{
    daily_counts, date_range, parse_panel, transitions_per_bank, write_count_series, write_panel,
    write_ratio_series,
};
use crate::model::{Panel, DEFAULT_TAU};
use crate::simulator::{simulate, ScenarioConfig};
use crate::stats::{moment_series, write_moment_series, Sampling};

/// File names written by [`cmd_counts`] inside the output directory.
pub const COUNTS_FILE: &str = "n_rated.csv";
pub const TRANSITIONS_FILE: &str = "transitions_per_bank.csv";

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub input: Option<PathBuf>,
    pub output: PathBuf,
    pub from: Option<NaiveDate>,
    pub to: Option<NaiveDate>,
    pub tau: i64,
    pub window: WindowLength,
    pub scenario: Option<PathBuf>,
    pub seed: Option<u64>,
}

impl RunConfig {
    pub fn new(output: impl Into<PathBuf>) -> Self {
        RunConfig {
            input: None,
            output: output.into(),
            from: None,
            to: None,
            tau: DEFAULT_TAU,
            window: WindowLength::Year,
            scenario: None,
            seed: None,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.tau < 1 {
            return Err(Error::InvalidTau(self.tau));
        }
        if self.output.as_os_str().is_empty() {
            return Err(Error::InvalidParameter("output path is empty".into()));
        }
        Ok(())
    }
}

fn read_input(config: &RunConfig) -> Result<(PathBuf, Vec<u8>)> {
    let path = config
        .input
        .clone()
        .ok_or_else(|| Error::InvalidParameter("--input is required".into()))?;
    let bytes = std::fs::read(&path).map_err(|e| Error::io(&path, e))?;
    Ok((path, bytes))
}

/// Reads the input panel. The span defaults to the first and last dates in
/// the file; `None` means the file is empty and no span was given.
pub fn load_panel(config: &RunConfig) -> Result<Option<Panel>> {
    config.validate()?;
    let (_, bytes) = read_input(config)?;
    let range = date_range(bytes.as_slice())?;
    let start = config.from.or(range.map(|r| r.0));
    let end = config.to.or(range.map(|r| r.1));
    match (start, end) {
        (Some(start), Some(end)) => parse_panel(bytes.as_slice(), start, end).map(Some),
        _ => Ok(None),
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::io(path, e))
}

fn finish(mut w: BufWriter<File>, path: &Path) -> Result<()> {
    w.flush().map_err(|e| Error::io(path, e))
}

/// Daily rated-bank counts and the moving transitions-per-bank ratio over
/// `tau` days, written as two files inside the output directory.
pub fn cmd_counts(config: &RunConfig) -> Result<()> {
    let panel = load_panel(config)?;
    std::fs::create_dir_all(&config.output).map_err(|e| Error::io(&config.output, e))?;
    let (counts, ratios) = match panel.as_ref().filter(|p| !p.is_empty()) {
        Some(p) => (daily_counts(p), transitions_per_bank(p, config.tau)?),
        None => (Vec::new(), Vec::new()),
    };
    let path = config.output.join(COUNTS_FILE);
    let mut w = create(&path)?;
    write_count_series(&mut w, &counts)?;
    finish(w, &path)?;
    let path = config.output.join(TRANSITIONS_FILE);
    let mut w = create(&path)?;
    write_ratio_series(&mut w, &ratios)?;
    finish(w, &path)
}

/// Moments of ratings and `tau`-day increments on each month start.
pub fn cmd_moments(config: &RunConfig) -> Result<()> {
    let rows = match load_panel(config)? {
        Some(p) => moment_series(&p, config.tau, Sampling::MonthStarts)?,
        None => Vec::new(),
    };
    let mut w = create(&config.output)?;
    write_moment_series(&mut w, &rows)?;
    finish(w, &config.output)
}

fn cmd_statistic(config: &RunConfig, statistic: Statistic) -> Result<()> {
    let series = match load_panel(config)? {
        Some(p) => rolling_series(&p, statistic, config.window)?,
        None => crate::diagnostics::TestSeries {
            statistic,
            window_length: config.window,
            points: Vec::new(),
        },
    };
    let mut w = create(&config.output)?;
    write_test_series(&mut w, &series)?;
    finish(w, &config.output)
}

/// Rolling homogeneity statistic.
pub fn cmd_homogeneity(config: &RunConfig) -> Result<()> {
    cmd_statistic(config, Statistic::Homogeneity)
}

/// Rolling Chapman–Kolmogorov deviation.
pub fn cmd_ck(config: &RunConfig) -> Result<()> {
    cmd_statistic(config, Statistic::ChapmanKolmogorov)
}

/// Simulates a scenario file and writes the panel in the input format.
pub fn cmd_simulate(config: &RunConfig) -> Result<()> {
    config.validate()?;
    let path = config
        .scenario
        .as_ref()
        .ok_or_else(|| Error::InvalidParameter("--scenario is required".into()))?;
    let mut scenario = ScenarioConfig::from_path(path)?.to_scenario()?;
    if let Some(seed) = config.seed {
        scenario.seed = seed;
    }
    let panel = simulate(&scenario)?;
    let mut w = create(&config.output)?;
    write_panel(&panel, &mut w)?;
    finish(w, &config.output)
}

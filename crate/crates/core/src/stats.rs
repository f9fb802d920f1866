//! Cross-sectional histograms of ratings and rating increments, and the
//! rolling first-four-moment series built from them.

use std::io::Write;

use chrono::{Datelike, Months, NaiveDate};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::format::opt_num;
use crate::model::Panel;
use crate::scale::N_STATES;

/// Variance below which skewness and kurtosis are reported as undefined.
pub const DEGENERATE_VARIANCE: f64 = 1e-12;

/// Largest possible absolute rating increment.
pub const MAX_INCREMENT: i32 = (N_STATES - 1) as i32;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Histogram {
    /// Value of the first bin; bins are consecutive integers.
    pub first_bin: i32,
    pub counts: Vec<u64>,
    pub total: u64,
}

impl Histogram {
    fn new(first_bin: i32, n_bins: usize) -> Self {
        Histogram {
            first_bin,
            counts: vec![0; n_bins],
            total: 0,
        }
    }

    fn add(&mut self, value: i32) {
        self.counts[(value - self.first_bin) as usize] += 1;
        self.total += 1;
    }

    /// Count in the bin holding `value`, zero off the support.
    pub fn count(&self, value: i32) -> u64 {
        usize::try_from(value - self.first_bin)
            .ok()
            .and_then(|k| self.counts.get(k).copied())
            .unwrap_or(0)
    }

    pub fn bins(&self) -> impl Iterator<Item = (i32, u64)> + '_ {
        self.counts
            .iter()
            .enumerate()
            .map(|(k, &c)| (self.first_bin + k as i32, c))
    }
}

/// Population moments; skewness and kurtosis (non-excess) are `None` for a
/// degenerate sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentSet {
    pub mean: f64,
    pub variance: f64,
    pub skewness: Option<f64>,
    pub kurtosis: Option<f64>,
}

/// Histogram of rating states over banks rated at `t`.
pub fn rating_histogram(panel: &Panel, t: NaiveDate) -> Result<Histogram> {
    panel.check_in_span(t)?;
    let mut h = Histogram::new(0, N_STATES);
    for s in panel.states_at(t) {
        h.add(s.index() as i32);
    }
    Ok(h)
}

fn increments_at(panel: &Panel, t: NaiveDate, tau: i64) -> Result<Vec<i32>> {
    let mut out = Vec::new();
    for h in panel.histories() {
        if let Some(inc) = h.increment(t, tau)? {
            out.push(inc.value);
        }
    }
    Ok(out)
}

/// Histogram of increments `T(t, tau)` over banks rated at both ends.
pub fn increment_histogram(panel: &Panel, t: NaiveDate, tau: i64) -> Result<Histogram> {
    panel.check_in_span(t)?;
    let mut h = Histogram::new(-MAX_INCREMENT, 2 * N_STATES - 1);
    for v in increments_at(panel, t, tau)? {
        h.add(v);
    }
    Ok(h)
}

/// Mean, variance, skewness and kurtosis with population normalization.
pub fn moments(sample: &[f64]) -> Result<MomentSet> {
    if sample.is_empty() {
        return Err(Error::EmptySample);
    }
    let n = sample.len() as f64;
    let mean = sample.iter().sum::<f64>() / n;
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for &x in sample {
        let d = x - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    let (m2, m3, m4) = (m2 / n, m3 / n, m4 / n);
    let (skewness, kurtosis) = if m2 < DEGENERATE_VARIANCE {
        (None, None)
    } else {
        (Some(m3 / m2.powf(1.5)), Some(m4 / (m2 * m2)))
    };
    Ok(MomentSet {
        mean,
        variance: m2,
        skewness,
        kurtosis,
    })
}

/// How sample dates are chosen for rolling series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Sampling {
    /// Every `n` days from the span start.
    EveryDays(u32),
    /// First day of each calendar month inside the span.
    #[default]
    MonthStarts,
}

/// Sample dates in `[start, end]`.
pub fn sample_dates(start: NaiveDate, end: NaiveDate, sampling: Sampling) -> Result<Vec<NaiveDate>> {
    match sampling {
        Sampling::EveryDays(0) => Err(Error::InvalidParameter("step must be at least one day".into())),
        Sampling::EveryDays(step) => Ok(start
            .iter_days()
            .step_by(step as usize)
            .take_while(|d| *d <= end)
            .collect()),
        Sampling::MonthStarts => {
            let first = start.with_day(1).expect("day 1 exists");
            let first = if first < start {
                first + Months::new(1)
            } else {
                first
            };
            Ok(std::iter::successors(Some(first), |d| d.checked_add_months(Months::new(1)))
                .take_while(|d| *d <= end)
                .collect())
        }
    }
}

/// One row of the moment series; `None` where the sample is empty.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentRow {
    pub date: NaiveDate,
    pub rating: Option<MomentSet>,
    pub increment: Option<MomentSet>,
}

/// Moments of the cross-sectional rating and increment samples at each
/// sample date.
pub fn moment_series(panel: &Panel, tau: i64, sampling: Sampling) -> Result<Vec<MomentRow>> {
    if tau < 1 {
        return Err(Error::InvalidTau(tau));
    }
    let dates = sample_dates(panel.start(), panel.end(), sampling)?;
    dates
        .par_iter()
        .map(|&date| {
            let r: Vec<f64> = panel.states_at(date).map(|s| s.index() as f64).collect();
            let t: Vec<f64> = increments_at(panel, date, tau)?
                .into_iter()
                .map(f64::from)
                .collect();
            Ok(MomentRow {
                date,
                rating: moments(&r).ok(),
                increment: moments(&t).ok(),
            })
        })
        .collect()
}

pub const MOMENT_HEADER: [&str; 9] = [
    "date", "mean_R", "var_R", "skew_R", "kurt_R", "mean_T", "var_T", "skew_T", "kurt_T",
];

pub fn write_moment_series<W: Write>(sink: W, rows: &[MomentRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(MOMENT_HEADER)?;
    for row in rows {
        let mut rec = vec![row.date.to_string()];
        for m in [row.rating, row.increment] {
            rec.push(opt_num(m.map(|m| m.mean)));
            rec.push(opt_num(m.map(|m| m.variance)));
            rec.push(opt_num(m.and_then(|m| m.skewness)));
            rec.push(opt_num(m.and_then(|m| m.kurtosis)));
        }
        w.write_record(&rec)?;
    }
    w.flush().map_err(|e| Error::io("moment output", e))?;
    Ok(())
}

//! Event-CSV interchange format and daily count series.
//!
//! Input rows are `bank_id,date,rating` with `YYYY-MM-DD` dates and ratings
//! drawn from the 15 scale labels or `WR` (withdrawn). Rows may come in any
//! order. Repeated identical ratings are re-affirmations and collapse into a
//! single event, so every stored event after the first is a state change.
//!
//! Rows dated before the span start fold into the state in force at the
//! span start; rows after the span end are ignored.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use chrono::NaiveDate;

use crate::error::{Error, Result};
use crate::format;
use crate::model::{add_days, Panel, RatingEvent, RatingHistory};
use crate::scale::{RatingState, WITHDRAWN};

pub const PANEL_HEADER: [&str; 3] = ["bank_id", "date", "rating"];

/// One parsed input row; `state` is `None` for a withdrawal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawRecord {
    pub bank_id: String,
    pub date: NaiveDate,
    pub state: Option<RatingState>,
    pub row: usize,
}

fn read_records<R: Read>(source: R) -> Result<Vec<RawRecord>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(source);
    let mut records = Vec::new();
    let mut header_seen = false;
    for (k, rec) in reader.records().enumerate() {
        let rec = rec?;
        let row = k + 1;
        if rec.iter().all(str::is_empty) {
            continue;
        }
        if !header_seen {
            if rec.iter().ne(PANEL_HEADER.iter().copied()) {
                return Err(Error::MalformedRow {
                    row,
                    message: format!("expected header {}", PANEL_HEADER.join(",")),
                });
            }
            header_seen = true;
            continue;
        }
        if rec.len() != 3 {
            return Err(Error::MalformedRow {
                row,
                message: format!("expected 3 fields, found {}", rec.len()),
            });
        }
        let date = rec[1].parse::<NaiveDate>().map_err(|e| Error::MalformedRow {
            row,
            message: format!("bad date {:?}: {e}", &rec[1]),
        })?;
        let label = &rec[2];
        let state = if label == WITHDRAWN {
            None
        } else {
            Some(label.parse::<RatingState>().map_err(|_| Error::UnknownLabel {
                row,
                label: label.to_string(),
            })?)
        };
        records.push(RawRecord {
            bank_id: rec[0].to_string(),
            date,
            state,
            row,
        });
    }
    Ok(records)
}

/// Earliest and latest dates in an event CSV, `None` when it has no rows.
pub fn date_range<R: Read>(source: R) -> Result<Option<(NaiveDate, NaiveDate)>> {
    let records = read_records(source)?;
    let min = records.iter().map(|r| r.date).min();
    let max = records.iter().map(|r| r.date).max();
    Ok(min.zip(max))
}

/// Parses an event CSV into a panel over the inclusive span `[start, end]`.
pub fn parse_panel<R: Read>(source: R, start: NaiveDate, end: NaiveDate) -> Result<Panel> {
    let mut by_bank: BTreeMap<String, Vec<RawRecord>> = BTreeMap::new();
    for rec in read_records(source)? {
        by_bank.entry(rec.bank_id.clone()).or_default().push(rec);
    }
    let mut histories = Vec::with_capacity(by_bank.len());
    for (bank_id, mut rows) in by_bank {
        rows.sort_by_key(|r| (r.date, r.row));
        rows.dedup_by(|later, earlier| later.date == earlier.date && later.state == earlier.state);
        if let Some(pair) = rows.windows(2).find(|w| w[0].date == w[1].date) {
            return Err(Error::ConflictingLabels {
                row: pair[1].row,
                bank_id,
                date: pair[1].date,
            });
        }
        if let Some(h) = build_history(&bank_id, &rows, start, end)? {
            histories.push(h);
        }
    }
    Panel::new(start, end, histories)
}

fn build_history(
    bank_id: &str,
    rows: &[RawRecord],
    start: NaiveDate,
    end: NaiveDate,
) -> Result<Option<RatingHistory>> {
    let mut events: Vec<RatingEvent> = Vec::new();
    let mut before_span: Option<RatingState> = None;
    let mut withdrawn: Option<NaiveDate> = None;
    let mut active = false;

    for r in rows {
        if r.date > end {
            break;
        }
        if withdrawn.is_some() {
            return Err(Error::MalformedRow {
                row: r.row,
                message: format!("bank {bank_id} rated after withdrawal"),
            });
        }
        if r.date < start {
            match r.state {
                Some(s) => {
                    before_span = Some(s);
                    active = true;
                }
                None if active => {
                    before_span = None;
                    active = false;
                    withdrawn = Some(r.date);
                }
                None => return Err(withdrawal_without_rating(bank_id, r.row)),
            }
            continue;
        }
        if events.is_empty() && r.date > start {
            if let Some(s) = before_span {
                events.push(RatingEvent::new(start, s));
            }
        }
        match r.state {
            Some(s) => {
                if events.last().is_none_or(|e| e.state != s) {
                    events.push(RatingEvent::new(r.date, s));
                }
                active = true;
            }
            None if active => {
                withdrawn = Some(r.date);
                active = false;
            }
            None => return Err(withdrawal_without_rating(bank_id, r.row)),
        }
    }
    if events.is_empty() {
        if let (Some(s), None) = (before_span, withdrawn) {
            events.push(RatingEvent::new(start, s));
        }
    }
    if events.is_empty() {
        return Ok(None);
    }
    let coverage_end = withdrawn.map_or(end, |w| add_days(w, -1));
    RatingHistory::new(bank_id, events, coverage_end).map(Some)
}

fn withdrawal_without_rating(bank_id: &str, row: usize) -> Error {
    Error::MalformedRow {
        row,
        message: format!("bank {bank_id} withdrawn without an active rating"),
    }
}

/// Writes a panel in the interchange format, one row per event plus a `WR`
/// row for banks whose coverage ends before the span does.
pub fn write_panel<W: Write>(panel: &Panel, sink: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(PANEL_HEADER)?;
    for h in panel.histories() {
        for e in h.events() {
            w.write_record([h.bank_id(), &e.date.to_string(), e.state.label()])?;
        }
        if h.coverage_end() < panel.end() {
            let wr = add_days(h.coverage_end(), 1);
            w.write_record([h.bank_id(), &wr.to_string(), WITHDRAWN])?;
        }
    }
    w.flush().map_err(|e| Error::io("panel output", e))?;
    Ok(())
}

/// Number of rated banks on every day of the span.
pub fn daily_counts(panel: &Panel) -> Vec<(NaiveDate, usize)> {
    let n = panel.n_days();
    let mut delta = vec![0i64; n + 1];
    for h in panel.histories() {
        let a = (h.coverage_start() - panel.start()).num_days() as usize;
        let b = (h.coverage_end() - panel.start()).num_days() as usize + 1;
        delta[a] += 1;
        delta[b] -= 1;
    }
    let mut running = 0i64;
    panel
        .days()
        .zip(delta)
        .map(|(day, d)| {
            running += d;
            (day, running as usize)
        })
        .collect()
}

/// Moving ratio of transitions to mean rated banks over the trailing
/// `window` days ending at each date. Dates whose window does not fit in the
/// span, or that have no rated banks, are omitted.
pub fn transitions_per_bank(panel: &Panel, window: i64) -> Result<Vec<(NaiveDate, f64)>> {
    if window < 1 {
        return Err(Error::InvalidParameter(format!(
            "moving-average window must be at least one day, got {window}"
        )));
    }
    let window = window as usize;
    let n = panel.n_days();
    let mut per_day = vec![0u64; n];
    for h in panel.histories() {
        for t in h.transitions() {
            per_day[(t.date - panel.start()).num_days() as usize] += 1;
        }
    }
    let counts = daily_counts(panel);
    let mut trans_prefix = vec![0u64; n + 1];
    let mut rated_prefix = vec![0u64; n + 1];
    for k in 0..n {
        trans_prefix[k + 1] = trans_prefix[k] + per_day[k];
        rated_prefix[k + 1] = rated_prefix[k] + counts[k].1 as u64;
    }
    let mut out = Vec::new();
    for k in window.saturating_sub(1)..n {
        let lo = k + 1 - window;
        let rated = rated_prefix[k + 1] - rated_prefix[lo];
        if rated == 0 {
            continue;
        }
        let transitions = (trans_prefix[k + 1] - trans_prefix[lo]) as f64;
        let mean_rated = rated as f64 / window as f64;
        out.push((counts[k].0, transitions / mean_rated));
    }
    Ok(out)
}

/// Writes a `date,value` series.
pub fn write_series<W: Write, T: Copy>(
    sink: W,
    points: &[(NaiveDate, T)],
    fmt: impl Fn(T) -> String,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(["date", "value"])?;
    for (date, value) in points {
        w.write_record([date.to_string(), fmt(*value)])?;
    }
    w.flush().map_err(|e| Error::io("series output", e))?;
    Ok(())
}

/// `write_series` for integer counts.
pub fn write_count_series<W: Write>(sink: W, points: &[(NaiveDate, usize)]) -> Result<()> {
    write_series(sink, points, |v| v.to_string())
}

/// `write_series` for real-valued ratios.
pub fn write_ratio_series<W: Write>(sink: W, points: &[(NaiveDate, f64)]) -> Result<()> {
    write_series(sink, points, format::num)
}

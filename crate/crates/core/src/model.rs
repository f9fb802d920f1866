//! Rating histories and the pooled panel.
//!
//! Histories are stored as sparse state-change events and evaluated as step
//! functions, which is equivalent to a daily series but far smaller.

use std::collections::BTreeMap;

use chrono::{Days, NaiveDate};

use crate::error::{Error, Result};
use crate::scale::RatingState;

/// Days per year used for every time conversion in the crate.
pub const DAYS_PER_YEAR: f64 = 365.0;

/// Default increment horizon in days.
pub const DEFAULT_TAU: i64 = 365;

pub(crate) fn add_days(date: NaiveDate, days: i64) -> NaiveDate {
    if days >= 0 {
        date + Days::new(days as u64)
    } else {
        date - Days::new(days.unsigned_abs())
    }
}

/// An observation window `(start, end]` for events, `[start, end)` for occupancy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Window {
    pub start: NaiveDate,
    pub end: NaiveDate,
}

impl Window {
    pub fn new(start: NaiveDate, end: NaiveDate) -> Result<Self> {
        if start >= end {
            return Err(Error::InvalidWindow { start, end });
        }
        Ok(Window { start, end })
    }

    pub fn days(&self) -> i64 {
        (self.end - self.start).num_days()
    }

    pub fn years(&self) -> f64 {
        self.days() as f64 / DAYS_PER_YEAR
    }

    /// Midpoint, rounded down to a whole day.
    pub fn midpoint(&self) -> NaiveDate {
        add_days(self.start, self.days() / 2)
    }

    /// Whether an event dated `date` falls in `(start, end]`.
    pub fn contains_event(&self, date: NaiveDate) -> bool {
        self.start < date && date <= self.end
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RatingEvent {
    pub date: NaiveDate,
    pub state: RatingState,
}

impl RatingEvent {
    pub fn new(date: NaiveDate, state: RatingState) -> Self {
        RatingEvent { date, state }
    }
}

/// A state change `from -> to` effective on `date`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Transition {
    pub date: NaiveDate,
    pub from: RatingState,
    pub to: RatingState,
}

/// One bank's rating path. The bank is rated from its first event through
/// `coverage_end` inclusive.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatingHistory {
    bank_id: String,
    events: Vec<RatingEvent>,
    coverage_end: NaiveDate,
}

impl RatingHistory {
    pub fn new(
        bank_id: impl Into<String>,
        events: Vec<RatingEvent>,
        coverage_end: NaiveDate,
    ) -> Result<Self> {
        let bank_id = bank_id.into();
        let bad = |msg: &str| Error::InvalidPanel(format!("bank {bank_id}: {msg}"));
        let last = events.last().ok_or_else(|| bad("no rating events"))?;
        if coverage_end < last.date {
            return Err(bad("coverage ends before the last event"));
        }
        for pair in events.windows(2) {
            if pair[1].date <= pair[0].date {
                return Err(bad("event dates not strictly increasing"));
            }
            if pair[1].state == pair[0].state {
                return Err(bad("consecutive events with the same state"));
            }
        }
        Ok(RatingHistory {
            bank_id,
            events,
            coverage_end,
        })
    }

    pub fn bank_id(&self) -> &str {
        &self.bank_id
    }

    pub fn events(&self) -> &[RatingEvent] {
        &self.events
    }

    pub fn coverage_start(&self) -> NaiveDate {
        self.events[0].date
    }

    pub fn coverage_end(&self) -> NaiveDate {
        self.coverage_end
    }

    /// State in force on day `t`, or `None` outside coverage.
    pub fn rating_at(&self, t: NaiveDate) -> Option<RatingState> {
        if t < self.coverage_start() || t > self.coverage_end {
            return None;
        }
        let idx = self.events.partition_point(|e| e.date <= t);
        Some(self.events[idx - 1].state)
    }

    /// Rating increment `R(t) - R(t - tau)`; `None` if either end is unrated.
    pub fn increment(&self, t: NaiveDate, tau: i64) -> Result<Option<Increment>> {
        if tau < 1 {
            return Err(Error::InvalidTau(tau));
        }
        let now = self.rating_at(t);
        let before = self.rating_at(add_days(t, -tau));
        Ok(now.zip(before).map(|(now, before)| Increment {
            bank_id: self.bank_id.clone(),
            t,
            tau,
            value: now.index() as i32 - before.index() as i32,
        }))
    }

    /// State changes, excluding the initial rating.
    pub fn transitions(&self) -> impl Iterator<Item = Transition> + '_ {
        self.events.windows(2).map(|w| Transition {
            date: w[1].date,
            from: w[0].state,
            to: w[1].state,
        })
    }

    pub fn n_transitions(&self) -> usize {
        self.events.len() - 1
    }

    /// Occupancy segments `[from, until)` clipped to coverage.
    pub(crate) fn segments(&self) -> impl Iterator<Item = (NaiveDate, NaiveDate, RatingState)> + '_ {
        let end = add_days(self.coverage_end, 1);
        self.events.iter().enumerate().map(move |(k, e)| {
            let until = self.events.get(k + 1).map_or(end, |n| n.date);
            (e.date, until, e.state)
        })
    }
}

/// Rating increment of one bank over `tau` days ending at `t`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Increment {
    pub bank_id: String,
    pub t: NaiveDate,
    pub tau: i64,
    pub value: i32,
}

/// All rating histories over a common observation span (inclusive days).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Panel {
    start: NaiveDate,
    end: NaiveDate,
    histories: BTreeMap<String, RatingHistory>,
}

impl Panel {
    pub fn new(
        start: NaiveDate,
        end: NaiveDate,
        histories: impl IntoIterator<Item = RatingHistory>,
    ) -> Result<Self> {
        if end < start {
            return Err(Error::InvalidWindow { start, end });
        }
        let mut map = BTreeMap::new();
        for h in histories {
            if h.coverage_start() < start || h.coverage_end() > end {
                return Err(Error::InvalidPanel(format!(
                    "bank {} coverage [{}, {}] outside span [{start}, {end}]",
                    h.bank_id(),
                    h.coverage_start(),
                    h.coverage_end()
                )));
            }
            if let Some(dup) = map.insert(h.bank_id().to_string(), h) {
                return Err(Error::InvalidPanel(format!(
                    "duplicate bank id {}",
                    dup.bank_id()
                )));
            }
        }
        Ok(Panel {
            start,
            end,
            histories: map,
        })
    }

    pub fn empty(start: NaiveDate, end: NaiveDate) -> Result<Self> {
        Panel::new(start, end, [])
    }

    pub fn start(&self) -> NaiveDate {
        self.start
    }

    pub fn end(&self) -> NaiveDate {
        self.end
    }

    /// Number of days in the span, inclusive.
    pub fn n_days(&self) -> usize {
        (self.end - self.start).num_days() as usize + 1
    }

    pub fn days(&self) -> impl Iterator<Item = NaiveDate> {
        self.start.iter_days().take(self.n_days())
    }

    pub fn len(&self) -> usize {
        self.histories.len()
    }

    pub fn is_empty(&self) -> bool {
        self.histories.is_empty()
    }

    pub fn get(&self, bank_id: &str) -> Option<&RatingHistory> {
        self.histories.get(bank_id)
    }

    /// Histories in bank-id order.
    pub fn histories(&self) -> impl Iterator<Item = &RatingHistory> {
        self.histories.values()
    }

    pub fn check_in_span(&self, t: NaiveDate) -> Result<()> {
        if t < self.start || t > self.end {
            return Err(Error::OutsideSpan {
                date: t,
                start: self.start,
                end: self.end,
            });
        }
        Ok(())
    }

    pub(crate) fn check_window(&self, window: &Window) -> Result<()> {
        self.check_in_span(window.start)?;
        self.check_in_span(window.end)
    }

    /// States of every bank rated on day `t`.
    pub fn states_at(&self, t: NaiveDate) -> impl Iterator<Item = RatingState> + '_ {
        self.histories().filter_map(move |h| h.rating_at(t))
    }

    /// Number of banks rated on day `t`.
    pub fn count_rated(&self, t: NaiveDate) -> Result<usize> {
        self.check_in_span(t)?;
        Ok(self.states_at(t).count())
    }

    /// Total number of state changes across all banks.
    pub fn n_transitions(&self) -> usize {
        self.histories().map(RatingHistory::n_transitions).sum()
    }
}

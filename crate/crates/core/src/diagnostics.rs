//! Diagnostics for the two modelling assumptions behind a single generator:
//!
//! * time homogeneity, measured by the transition-count weighted log ratio
//!   between `exp(Q t)` (with `Q` the duration estimate for the window) and
//!   the cohort matrix of the same window;
//! * the Markov property, measured by the spectral norm of the
//!   Chapman–Kolmogorov residual `M(t0, tf) - M(t0, tm) M(tm, tf)` with `tm`
//!   the window midpoint.
//!
//! Both are evaluated on rolling windows starting on the first day of each
//! month.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use chrono::{Months, NaiveDate};
use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::estimation::{
    count_transitions, empirical_transition_matrix, estimate_generator, exposures,
    matrix_exponential, CountMatrix, TransitionMatrix,
};
use crate::format::num;
use crate::model::{Panel, Window};
use crate::stats::{sample_dates, Sampling};

/// Probabilities below this are floored before taking logs.
pub const PROBABILITY_FLOOR: f64 = 1e-12;

/// Count-weighted mean log ratio `sum N_ij (log M_ij - log Me_ij) / sum N_ij`.
///
/// Returns `None` when the window holds no transitions.
pub fn homogeneity_statistic(
    m: &TransitionMatrix,
    m_e: &TransitionMatrix,
    counts: &CountMatrix,
) -> Option<f64> {
    let total = counts.total();
    if total == 0 {
        return None;
    }
    let ln = |p: f64| p.max(PROBABILITY_FLOOR).ln();
    let weighted: f64 = counts
        .nonzero()
        .map(|(i, j, n)| n as f64 * (ln(m.get(i, j)) - ln(m_e.get(i, j))))
        .sum();
    Some(weighted / total as f64)
}

/// Largest singular value.
pub fn l2_norm(a: &DMatrix<f64>) -> Result<f64> {
    if a.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite);
    }
    if a.is_empty() {
        return Ok(0.0);
    }
    Ok(a.singular_values().max())
}

/// `M(t0, tf) - M(t0, tm) * M(tm, tf)` from cohort matrices.
pub fn ck_residual(panel: &Panel, window: Window) -> Result<DMatrix<f64>> {
    if window.days() < 2 {
        return Err(Error::InvalidParameter(format!(
            "Chapman-Kolmogorov window needs at least 2 days, got {}",
            window.days()
        )));
    }
    let mid = window.midpoint();
    let full = empirical_transition_matrix(panel, window)?;
    let first = empirical_transition_matrix(panel, Window::new(window.start, mid)?)?;
    let second = empirical_transition_matrix(panel, Window::new(mid, window.end)?)?;
    Ok(full.matrix() - first.then(&second))
}

/// Spectral norm of the Chapman–Kolmogorov residual over a window.
pub fn ck_deviation(panel: &Panel, window: Window) -> Result<f64> {
    l2_norm(&ck_residual(panel, window)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Statistic {
    Homogeneity,
    ChapmanKolmogorov,
}

impl Statistic {
    pub fn name(self) -> &'static str {
        match self {
            Statistic::Homogeneity => "homogeneity_L",
            Statistic::ChapmanKolmogorov => "ck_l2",
        }
    }
}

impl fmt::Display for Statistic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WindowLength {
    Month,
    Year,
}

impl WindowLength {
    pub fn end_from(self, start: NaiveDate) -> Option<NaiveDate> {
        let months = match self {
            WindowLength::Month => 1,
            WindowLength::Year => 12,
        };
        start.checked_add_months(Months::new(months))
    }
}

impl FromStr for WindowLength {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "month" => Ok(WindowLength::Month),
            "year" => Ok(WindowLength::Year),
            other => Err(Error::InvalidParameter(format!(
                "window must be `month` or `year`, got {other:?}"
            ))),
        }
    }
}

/// Everything computed for the homogeneity statistic on one window.
#[derive(Debug, Clone)]
pub struct HomogeneityWindow {
    pub counts: CountMatrix,
    pub homogeneous: TransitionMatrix,
    pub empirical: TransitionMatrix,
    pub value: Option<f64>,
}

pub fn homogeneity_window(panel: &Panel, window: Window) -> Result<HomogeneityWindow> {
    let counts = count_transitions(panel, window)?;
    let q = estimate_generator(&counts, &exposures(panel, window)?)?;
    let homogeneous = matrix_exponential(&q, window.years())?;
    let empirical = empirical_transition_matrix(panel, window)?;
    let value = homogeneity_statistic(&homogeneous, &empirical, &counts);
    Ok(HomogeneityWindow {
        counts,
        homogeneous,
        empirical,
        value,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestPoint {
    pub window: Window,
    pub value: f64,
    pub n_transitions: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TestSeries {
    pub statistic: Statistic,
    pub window_length: WindowLength,
    pub points: Vec<TestPoint>,
}

impl TestSeries {
    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.value)
    }
}

/// Windows of the given length starting on each month start of the span and
/// ending no later than the span end.
pub fn rolling_windows(panel: &Panel, length: WindowLength) -> Result<Vec<Window>> {
    sample_dates(panel.start(), panel.end(), Sampling::MonthStarts)?
        .into_iter()
        .filter_map(|start| {
            let end = length.end_from(start)?;
            (end <= panel.end()).then(|| Window::new(start, end))
        })
        .collect()
}

fn evaluate(panel: &Panel, statistic: Statistic, window: Window) -> Result<Option<TestPoint>> {
    match statistic {
        Statistic::Homogeneity => {
            let hw = homogeneity_window(panel, window)?;
            Ok(hw.value.map(|value| TestPoint {
                window,
                value,
                n_transitions: hw.counts.total(),
            }))
        }
        Statistic::ChapmanKolmogorov => Ok(Some(TestPoint {
            window,
            value: ck_deviation(panel, window)?,
            n_transitions: count_transitions(panel, window)?.total(),
        })),
    }
}

/// Rolling series of a statistic. Homogeneity windows without transitions
/// are omitted.
pub fn rolling_series(
    panel: &Panel,
    statistic: Statistic,
    window_length: WindowLength,
) -> Result<TestSeries> {
    let windows = rolling_windows(panel, window_length)?;
    let points: Vec<Option<TestPoint>> = windows
        .par_iter()
        .map(|&w| evaluate(panel, statistic, w))
        .collect::<Result<_>>()?;
    Ok(TestSeries {
        statistic,
        window_length,
        points: points.into_iter().flatten().collect(),
    })
}

pub const TEST_SERIES_HEADER: [&str; 6] = [
    "window_start",
    "window_end",
    "statistic",
    "value",
    "abs_value",
    "n_transitions",
];

pub fn write_test_series<W: Write>(sink: W, series: &TestSeries) -> Result<()> {
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(TEST_SERIES_HEADER)?;
    for p in &series.points {
        w.write_record([
            p.window.start.to_string(),
            p.window.end.to_string(),
            series.statistic.name().to_string(),
            num(p.value),
            num(p.value.abs()),
            p.n_transitions.to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::io("test series output", e))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::parse_panel;
    use crate::scale::N_STATES;
    use approx::assert_abs_diff_eq;

    fn d(s: &str) -> NaiveDate {
        s.parse().unwrap()
    }

    fn panel(csv: &str, end: &str) -> Panel {
        let text = format!("bank_id,date,rating\n{csv}");
        parse_panel(text.as_bytes(), d("2007-01-01"), d(end)).unwrap()
    }

    fn year2007() -> Window {
        Window::new(d("2007-01-01"), d("2008-01-01")).unwrap()
    }

    fn stochastic(rows: &[(usize, usize, f64)]) -> TransitionMatrix {
        let mut m = DMatrix::identity(N_STATES, N_STATES);
        for &(i, j, p) in rows {
            m[(i, i)] -= p;
            m[(i, j)] += p;
        }
        TransitionMatrix::new(m).unwrap()
    }

    #[test]
    fn homogeneity_identical_matrices() {
        let m = stochastic(&[(5, 4, 0.3), (9, 10, 0.1)]);
        let mut c = CountMatrix::zeros(year2007());
        c.add(5, 4, 4);
        c.add(9, 10, 1);
        assert_eq!(homogeneity_statistic(&m, &m, &c), Some(0.0));
    }

    #[test]
    fn homogeneity_single_term() {
        let p = 0.1;
        let m = stochastic(&[(5, 4, p * std::f64::consts::E)]);
        let m_e = stochastic(&[(5, 4, p)]);
        let mut c = CountMatrix::zeros(year2007());
        c.add(5, 4, 1);
        assert_abs_diff_eq!(homogeneity_statistic(&m, &m_e, &c).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn homogeneity_ignores_zero_count_cells() {
        let m = stochastic(&[(5, 4, 0.2), (5, 3, 0.4)]);
        let m_e = stochastic(&[(5, 4, 0.2), (5, 3, 0.05), (8, 1, 0.5)]);
        let mut c = CountMatrix::zeros(year2007());
        c.add(5, 4, 3);
        assert_eq!(homogeneity_statistic(&m, &m_e, &c), Some(0.0));
    }

    #[test]
    fn homogeneity_floors_zero_probabilities() {
        let m = stochastic(&[(5, 4, 1e-3)]);
        let m_e = TransitionMatrix::identity(N_STATES);
        let mut c = CountMatrix::zeros(year2007());
        c.add(5, 4, 1);
        let v = homogeneity_statistic(&m, &m_e, &c).unwrap();
        assert_abs_diff_eq!(v, (1e-3f64).ln() - PROBABILITY_FLOOR.ln(), epsilon = 1e-9);
        assert_eq!(homogeneity_statistic(&m, &m_e, &CountMatrix::zeros(year2007())), None);
    }

    #[test]
    fn l2_norm_simple() {
        assert_eq!(l2_norm(&DMatrix::zeros(N_STATES, N_STATES)).unwrap(), 0.0);
        let mut diag = vec![0.0; N_STATES];
        diag[0] = 3.0;
        diag[1] = -2.0;
        let a = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(diag));
        assert_abs_diff_eq!(l2_norm(&a).unwrap(), 3.0, epsilon = 1e-14);
        let mut bad = DMatrix::zeros(2, 2);
        bad[(0, 1)] = f64::INFINITY;
        assert!(matches!(l2_norm(&bad), Err(Error::NonFinite)));
    }

    #[test]
    fn ck_static_panel_is_zero() {
        let p = panel("a,2007-01-01,C\nb,2007-01-01,B\n", "2008-12-31");
        assert_eq!(ck_deviation(&p, year2007()).unwrap(), 0.0);
    }

    #[test]
    fn ck_first_half_only_is_zero() {
        let p = panel(
            "a,2007-01-01,C\na,2007-03-01,C-\nb,2007-01-01,C\nc,2007-01-01,B\nc,2007-02-01,B+\n",
            "2008-12-31",
        );
        assert_eq!(ck_deviation(&p, year2007()).unwrap(), 0.0);
    }

    #[test]
    fn ck_rejects_short_windows() {
        let p = panel("a,2007-01-01,C\n", "2007-12-31");
        let w = Window::new(d("2007-01-01"), d("2007-01-02")).unwrap();
        assert!(ck_deviation(&p, w).is_err());
    }

    #[test]
    fn rolling_window_calendar() {
        let p = panel("a,2007-01-01,C\n", "2013-01-01");
        assert_eq!(rolling_windows(&p, WindowLength::Year).unwrap().len(), 61);
        assert_eq!(rolling_windows(&p, WindowLength::Month).unwrap().len(), 72);
        let short = panel("a,2007-01-01,C\n", "2007-12-31");
        assert_eq!(rolling_windows(&short, WindowLength::Month).unwrap().len(), 11);
    }

    #[test]
    fn rolling_static_panel() {
        let p = panel("a,2007-01-01,C\nb,2007-01-01,B\n", "2009-01-01");
        let ck = rolling_series(&p, Statistic::ChapmanKolmogorov, WindowLength::Month).unwrap();
        assert_eq!(ck.points.len(), 24);
        assert!(ck.values().all(|v| v == 0.0));
        let hom = rolling_series(&p, Statistic::Homogeneity, WindowLength::Month).unwrap();
        assert!(hom.points.is_empty());
    }

    #[test]
    fn window_length_parse() {
        assert_eq!("month".parse::<WindowLength>().unwrap(), WindowLength::Month);
        assert!("week".parse::<WindowLength>().is_err());
    }
}

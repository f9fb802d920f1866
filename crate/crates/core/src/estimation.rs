//! Transition counts, exposures, the duration-based generator estimate,
//! the cohort transition matrix, and the exponential map between them.
//!
//! Time is measured in years of 365 days. Transitions are counted by event
//! date in `(start, end]`; exposures are a daily left-endpoint sum over
//! `[start, end)`, so a transition on day `d` always has its origin state
//! occupied on day `d - 1`.

use std::io::{Read, Write};

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::expm::expm;
use crate::format;
use crate::model::{Panel, Window, DAYS_PER_YEAR};
use crate::scale::{LABELS, N_STATES};

/// Tolerance on generator row sums, relative to the row's exit rate.
pub const GENERATOR_ROW_TOL: f64 = 1e-12;
/// Tolerance on transition-matrix row sums.
pub const STOCHASTIC_ROW_TOL: f64 = 1e-9;
/// Tolerance on transition-matrix entries leaving `[0, 1]`.
pub const STOCHASTIC_ENTRY_TOL: f64 = 1e-12;

/// `N_T^{ij}`: number of `i -> j` state changes inside a window.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountMatrix {
    pub window: Window,
    counts: [[u64; N_STATES]; N_STATES],
}

impl CountMatrix {
    pub fn zeros(window: Window) -> Self {
        CountMatrix {
            window,
            counts: [[0; N_STATES]; N_STATES],
        }
    }

    /// Panics if `from == to`.
    pub fn add(&mut self, from: usize, to: usize, n: u64) {
        assert_ne!(from, to, "transition counts have a zero diagonal");
        self.counts[from][to] += n;
    }

    pub fn get(&self, from: usize, to: usize) -> u64 {
        self.counts[from][to]
    }

    pub fn row_total(&self, from: usize) -> u64 {
        self.counts[from].iter().sum()
    }

    pub fn total(&self) -> u64 {
        (0..N_STATES).map(|i| self.row_total(i)).sum()
    }

    /// Nonzero cells as `(from, to, count)`.
    pub fn nonzero(&self) -> impl Iterator<Item = (usize, usize, u64)> + '_ {
        (0..N_STATES).flat_map(move |i| {
            (0..N_STATES).filter_map(move |j| {
                let c = self.counts[i][j];
                (c > 0).then_some((i, j, c))
            })
        })
    }
}

/// Bank-years spent in each state inside a window.
#[derive(Debug, Clone, PartialEq)]
pub struct ExposureVector {
    pub window: Window,
    pub exposure: [f64; N_STATES],
}

impl ExposureVector {
    pub fn total(&self) -> f64 {
        self.exposure.iter().sum()
    }
}

fn check_finite(m: &DMatrix<f64>) -> Result<()> {
    if m.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite)
    }
}

/// A generator: nonnegative off-diagonal rates per year, zero row sums.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorMatrix(DMatrix<f64>);

impl GeneratorMatrix {
    pub fn new(q: DMatrix<f64>) -> Result<Self> {
        if !q.is_square() {
            return Err(Error::InvalidMatrix("generator must be square".into()));
        }
        check_finite(&q)?;
        for (i, row) in q.row_iter().enumerate() {
            let mut off = 0.0;
            for (j, &x) in row.iter().enumerate() {
                if i != j {
                    if x < 0.0 {
                        return Err(Error::InvalidMatrix(format!(
                            "negative rate {x} at ({i}, {j})"
                        )));
                    }
                    off += x;
                }
            }
            let sum = row.sum();
            if sum.abs() > GENERATOR_ROW_TOL * off.max(1.0) {
                return Err(Error::InvalidMatrix(format!("row {i} sums to {sum}")));
            }
        }
        Ok(GeneratorMatrix(q))
    }

    /// Builds a generator from off-diagonal rates; the diagonal is ignored
    /// and replaced by minus the row sum.
    pub fn from_rates(mut rates: DMatrix<f64>) -> Result<Self> {
        if !rates.is_square() {
            return Err(Error::InvalidMatrix("generator must be square".into()));
        }
        for i in 0..rates.nrows() {
            rates[(i, i)] = 0.0;
            let exit: f64 = rates.row(i).sum();
            rates[(i, i)] = -exit;
        }
        GeneratorMatrix::new(rates)
    }

    pub fn zeros(n: usize) -> Self {
        GeneratorMatrix(DMatrix::zeros(n, n))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<f64> {
        self.0
    }

    /// Every rate multiplied by `factor >= 0`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor >= 0.0 && factor.is_finite()) {
            return Err(Error::InvalidParameter(format!("bad rate factor {factor}")));
        }
        Ok(GeneratorMatrix(&self.0 * factor))
    }

    /// Total exit rate `-Q_ii` of state `i`.
    pub fn exit_rate(&self, i: usize) -> f64 {
        -self.0[(i, i)]
    }

    pub fn rate(&self, from: usize, to: usize) -> f64 {
        self.0[(from, to)]
    }
}

/// A row-stochastic matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionMatrix(DMatrix<f64>);

impl TransitionMatrix {
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::InvalidMatrix("transition matrix must be square".into()));
        }
        check_finite(&m)?;
        for (i, row) in m.row_iter().enumerate() {
            if let Some(x) = row
                .iter()
                .find(|&&x| !(-STOCHASTIC_ENTRY_TOL..=1.0 + STOCHASTIC_ENTRY_TOL).contains(&x))
            {
                return Err(Error::InvalidMatrix(format!("entry {x} in row {i} outside [0, 1]")));
            }
            let sum = row.sum();
            if (sum - 1.0).abs() > STOCHASTIC_ROW_TOL {
                return Err(Error::InvalidMatrix(format!("row {i} sums to {sum}")));
            }
        }
        Ok(TransitionMatrix(m))
    }

    pub fn identity(n: usize) -> Self {
        TransitionMatrix(DMatrix::identity(n, n))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<f64> {
        self.0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[(i, j)]
    }

    /// Matrix product `self * other`, i.e. `self` followed by `other`.
    pub fn then(&self, other: &TransitionMatrix) -> DMatrix<f64> {
        &self.0 * &other.0
    }
}

/// Counts every state change with event date in `(start, end]`.
pub fn count_transitions(panel: &Panel, window: Window) -> Result<CountMatrix> {
    panel.check_window(&window)?;
    let mut counts = CountMatrix::zeros(window);
    for h in panel.histories() {
        for t in h.transitions().filter(|t| window.contains_event(t.date)) {
            counts.add(t.from.index(), t.to.index(), 1);
        }
    }
    Ok(counts)
}

/// Days spent in each state over `[start, end)`, converted to bank-years.
pub fn exposures(panel: &Panel, window: Window) -> Result<ExposureVector> {
    panel.check_window(&window)?;
    let mut days = [0i64; N_STATES];
    for h in panel.histories() {
        for (from, until, state) in h.segments() {
            let lo = from.max(window.start);
            let hi = until.min(window.end);
            if hi > lo {
                days[state.index()] += (hi - lo).num_days();
            }
        }
    }
    Ok(ExposureVector {
        window,
        exposure: days.map(|d| d as f64 / DAYS_PER_YEAR),
    })
}

/// Duration-based generator: `Q_ij = N_ij / exposure_i` off the diagonal,
/// with zero row sums. Unoccupied states get an all-zero row.
pub fn estimate_generator(counts: &CountMatrix, exposures: &ExposureVector) -> Result<GeneratorMatrix> {
    let mut rates = DMatrix::zeros(N_STATES, N_STATES);
    for i in 0..N_STATES {
        let exposure = exposures.exposure[i];
        if exposure <= 0.0 {
            let count = counts.row_total(i);
            if count > 0 {
                return Err(Error::InconsistentCounts { state: i, count });
            }
            continue;
        }
        for j in (0..N_STATES).filter(|&j| j != i) {
            rates[(i, j)] = counts.get(i, j) as f64 / exposure;
        }
    }
    GeneratorMatrix::from_rates(rates)
}

/// `exp(Q t)` for `t` in years.
pub fn matrix_exponential(q: &GeneratorMatrix, t: f64) -> Result<TransitionMatrix> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::InvalidParameter(format!("time must be finite and >= 0, got {t}")));
    }
    check_finite(q.matrix())?;
    let m = expm(&(q.matrix() * t)).ok_or(Error::NonFinite)?;
    TransitionMatrix::new(m)
}

/// Banks in state `i` at `start` and `j` at `end`, over banks rated on both days.
pub fn cohort_counts(panel: &Panel, window: Window) -> Result<[[u64; N_STATES]; N_STATES]> {
    panel.check_window(&window)?;
    let mut cohort = [[0u64; N_STATES]; N_STATES];
    for h in panel.histories() {
        if let (Some(a), Some(b)) = (h.rating_at(window.start), h.rating_at(window.end)) {
            cohort[a.index()][b.index()] += 1;
        }
    }
    Ok(cohort)
}

/// Cohort estimate of the transition matrix over a window. States with an
/// empty cohort get an identity row.
pub fn empirical_transition_matrix(panel: &Panel, window: Window) -> Result<TransitionMatrix> {
    let cohort = cohort_counts(panel, window)?;
    let mut m = DMatrix::zeros(N_STATES, N_STATES);
    for (i, row) in cohort.iter().enumerate() {
        let n: u64 = row.iter().sum();
        if n == 0 {
            m[(i, i)] = 1.0;
            continue;
        }
        for (j, &c) in row.iter().enumerate() {
            m[(i, j)] = c as f64 / n as f64;
        }
    }
    TransitionMatrix::new(m)
}

/// Writes a square matrix with state labels on both axes, 17 significant digits.
pub fn write_matrix<W: Write>(sink: W, m: &DMatrix<f64>) -> Result<()> {
    let n = m.nrows();
    let label = |k: usize| LABELS.get(k).map_or_else(|| k.to_string(), |s| s.to_string());
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(std::iter::once(String::new()).chain((0..n).map(label)))?;
    for i in 0..n {
        let row = (0..m.ncols()).map(|j| format::sig(m[(i, j)], 17));
        w.write_record(std::iter::once(label(i)).chain(row))?;
    }
    w.flush().map_err(|e| Error::io("matrix output", e))?;
    Ok(())
}

/// Reads a matrix written by [`write_matrix`]; row and column labels are skipped.
pub fn read_matrix<R: Read>(source: R) -> Result<DMatrix<f64>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(source);
    let n = reader.headers()?.len().saturating_sub(1);
    let mut values = Vec::with_capacity(n * n);
    let mut rows = 0;
    for (k, rec) in reader.records().enumerate() {
        let rec = rec?;
        if rec.len() != n + 1 {
            return Err(Error::MalformedRow {
                row: k + 2,
                message: format!("expected {} fields", n + 1),
            });
        }
        for field in rec.iter().skip(1) {
            values.push(field.parse::<f64>().map_err(|e| Error::MalformedRow {
                row: k + 2,
                message: format!("bad number {field:?}: {e}"),
            })?);
        }
        rows += 1;
    }
    if rows != n {
        return Err(Error::InvalidMatrix(format!("expected {n} rows, found {rows}")));
    }
    Ok(DMatrix::from_row_slice(n, n, &values))
}

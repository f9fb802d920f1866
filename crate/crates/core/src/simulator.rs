//! Synthetic rating panels from known continuous-time processes.
//!
//! Three process families are supported: a single homogeneous generator, a
//! piecewise-constant generator schedule (regime switches), and an excited
//! variant in which each downgrade multiplies the bank's downgrade rates for
//! a fixed number of days afterwards. The last one has no Markov
//! representation on the rating alone.
//!
//! Each bank draws from its own ChaCha stream `(seed, bank index)`, so the
//! output is independent of thread scheduling.

use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use nalgebra::DMatrix;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use rayon::prelude::*;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::estimation::{read_matrix, GeneratorMatrix};
use crate::model::{add_days, Panel, RatingEvent, RatingHistory, DAYS_PER_YEAR};
use crate::scale::{RatingState, N_STATES};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    Homogeneous,
    RegimeSwitch,
    Excited,
}

/// Downgrade-rate multiplier applied for `days` after each downgrade.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Excitation {
    pub factor: f64,
    pub days: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub kind: ScenarioKind,
    /// Generator schedule; each entry applies from its date until the next.
    pub generators: Vec<(NaiveDate, GeneratorMatrix)>,
    pub excitation: Option<Excitation>,
    pub n_banks: usize,
    pub start: NaiveDate,
    pub end: NaiveDate,
    pub initial_distribution: [f64; N_STATES],
    pub seed: u64,
}

pub const UNIFORM_INITIAL: [f64; N_STATES] = [1.0 / N_STATES as f64; N_STATES];

impl Scenario {
    pub fn homogeneous(q: GeneratorMatrix, n_banks: usize, start: NaiveDate, end: NaiveDate, seed: u64) -> Self {
        Scenario {
            kind: ScenarioKind::Homogeneous,
            generators: vec![(start, q)],
            excitation: None,
            n_banks,
            start,
            end,
            initial_distribution: UNIFORM_INITIAL,
            seed,
        }
    }

    /// `q` until `switch`, `q * factor` afterwards.
    pub fn regime_switch(
        q: GeneratorMatrix,
        switch: NaiveDate,
        factor: f64,
        n_banks: usize,
        start: NaiveDate,
        end: NaiveDate,
        seed: u64,
    ) -> Result<Self> {
        let after = q.scaled(factor)?;
        Ok(Scenario {
            kind: ScenarioKind::RegimeSwitch,
            generators: vec![(start, q), (switch, after)],
            ..Scenario::homogeneous(GeneratorMatrix::zeros(N_STATES), n_banks, start, end, seed)
        })
    }

    pub fn excited(
        q: GeneratorMatrix,
        excitation: Excitation,
        n_banks: usize,
        start: NaiveDate,
        end: NaiveDate,
        seed: u64,
    ) -> Self {
        Scenario {
            kind: ScenarioKind::Excited,
            excitation: Some(excitation),
            ..Scenario::homogeneous(q, n_banks, start, end, seed)
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidScenario(msg));
        if self.end <= self.start {
            return bad(format!("span end {} not after start {}", self.end, self.start));
        }
        let Some((first, _)) = self.generators.first() else {
            return bad("empty generator schedule".into());
        };
        if *first != self.start {
            return bad("generator schedule must begin at the span start".into());
        }
        for pair in self.generators.windows(2) {
            if pair[1].0 <= pair[0].0 {
                return bad("generator schedule dates must increase".into());
            }
        }
        if let Some((last, _)) = self.generators.last().filter(|(d, _)| *d > self.end) {
            return bad(format!("generator date {last} after span end"));
        }
        if let Some((_, q)) = self.generators.iter().find(|(_, q)| q.dim() != N_STATES) {
            return bad(format!("generator is {}x{}, expected {N_STATES}x{N_STATES}", q.dim(), q.dim()));
        }
        let sum: f64 = self.initial_distribution.iter().sum();
        if self.initial_distribution.iter().any(|p| p.is_nan() || *p < 0.0) || (sum - 1.0).abs() > 1e-12 {
            return bad(format!("initial distribution must be nonnegative and sum to 1, sums to {sum}"));
        }
        if let Some(e) = self.excitation {
            if !(e.factor > 0.0 && e.factor.is_finite()) {
                return bad(format!("excitation factor must be positive, got {}", e.factor));
            }
        }
        match self.kind {
            ScenarioKind::Homogeneous if self.generators.len() != 1 || self.excitation.is_some() => {
                bad("homogeneous scenario needs one generator and no excitation".into())
            }
            ScenarioKind::RegimeSwitch if self.generators.len() < 2 => {
                bad("regime switch scenario needs at least two generators".into())
            }
            ScenarioKind::Excited if self.excitation.is_none() => {
                bad("excited scenario needs an excitation".into())
            }
            _ => Ok(()),
        }
    }
}

/// Banded random generator: moves of one notch get weights in `[0.5, 1.5)`,
/// two notches `[0, 0.5)`, nothing further. Weights are normalized to a mean
/// exit rate of one and then multiplied by `rate_scale` (per year).
pub fn random_generator(seed: u64, rate_scale: f64) -> Result<GeneratorMatrix> {
    if !(rate_scale > 0.0 && rate_scale.is_finite()) {
        return Err(Error::InvalidParameter(format!("rate scale must be positive, got {rate_scale}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut w = DMatrix::zeros(N_STATES, N_STATES);
    for i in 0..N_STATES {
        for j in 0..N_STATES {
            w[(i, j)] = match i.abs_diff(j) {
                1 => rng.random_range(0.5..1.5),
                2 => rng.random_range(0.0..0.5),
                _ => 0.0,
            };
        }
    }
    let mean_exit = w.sum() / N_STATES as f64;
    GeneratorMatrix::from_rates(w * (rate_scale / mean_exit))
}

/// Simulates every bank of the scenario over its span.
pub fn simulate(scenario: &Scenario) -> Result<Panel> {
    scenario.validate()?;
    let initial = WeightedIndex::new(scenario.initial_distribution)
        .map_err(|e| Error::InvalidScenario(format!("initial distribution: {e}")))?;
    let horizon = (scenario.end - scenario.start).num_days();
    let boundaries: Vec<f64> = scenario
        .generators
        .iter()
        .map(|(d, _)| (*d - scenario.start).num_days() as f64)
        .collect();
    let histories = (0..scenario.n_banks)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(scenario.seed);
            rng.set_stream(k as u64);
            let path = simulate_bank(scenario, &boundaries, horizon, &initial, &mut rng);
            let events = path
                .into_iter()
                .map(|(day, s)| RatingEvent::new(add_days(scenario.start, day), s))
                .collect();
            RatingHistory::new(format!("bank{k:06}"), events, scenario.end)
        })
        .collect::<Result<Vec<_>>>()?;
    Panel::new(scenario.start, scenario.end, histories)
}

/// Jump path as `(day offset, state)`; time runs in days from the span start.
fn simulate_bank(
    scenario: &Scenario,
    boundaries: &[f64],
    horizon: i64,
    initial: &WeightedIndex<f64>,
    rng: &mut ChaCha8Rng,
) -> Vec<(i64, RatingState)> {
    let end = horizon as f64;
    let mut state = initial.sample(rng);
    let mut path = vec![(0, RatingState::new(state).expect("on scale"))];
    let mut t = 0.0;
    let mut excited_until = f64::NEG_INFINITY;
    let mut rates = [0.0; N_STATES];

    while t < end {
        let regime = boundaries.partition_point(|b| *b <= t) - 1;
        let q = &scenario.generators[regime].1;
        let excited = t < excited_until;
        let mut next_change = boundaries.get(regime + 1).copied().unwrap_or(end).min(end);
        if excited {
            next_change = next_change.min(excited_until);
        }
        let factor = scenario.excitation.map_or(1.0, |e| e.factor);
        for (j, r) in rates.iter_mut().enumerate() {
            *r = if j == state {
                0.0
            } else if excited && j < state {
                q.rate(state, j) * factor
            } else {
                q.rate(state, j)
            };
        }
        let total: f64 = rates.iter().sum();
        if total <= 0.0 {
            t = next_change;
            continue;
        }
        let hold: f64 = rng.sample::<f64, _>(Exp1) / total * DAYS_PER_YEAR;
        if t + hold >= next_change {
            // memoryless: restart the clock under the new rates
            t = next_change;
            continue;
        }
        t += hold;
        let day = t.ceil() as i64;
        if day <= path.last().expect("nonempty").0 {
            // a second jump on the same day is discarded and redrawn from here
            continue;
        }
        let next = WeightedIndex::new(rates).expect("positive total").sample(rng);
        if next < state {
            if let Some(e) = scenario.excitation {
                excited_until = t + e.days as f64;
            }
        }
        state = next;
        path.push((day, RatingState::new(state).expect("on scale")));
    }
    path
}

/// Flat key-value scenario file (TOML syntax).
///
/// ```toml
/// kind = "excited"            # homogeneous | regime_switch | excited
/// n_banks = 1000
/// start = 2007-01-01        # bare TOML dates or quoted strings
/// end = 2013-01-01
/// seed = 42
/// rate_scale = 0.3            # banded random generator, mean exits per year
/// generator_seed = 7
/// # generator_file = "q.csv"  # alternative: labelled matrix CSV
/// switch_date = "2010-01-01"  # regime_switch only
/// switch_factor = 3.0
/// excitation_factor = 5.0     # excited only
/// excitation_days = 90
/// # initial = [ ...15 probabilities... ]   default uniform
/// ```
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub kind: ScenarioKind,
    pub n_banks: usize,
    #[serde(deserialize_with = "toml_date")]
    pub start: NaiveDate,
    #[serde(deserialize_with = "toml_date")]
    pub end: NaiveDate,
    #[serde(default)]
    pub seed: u64,
    pub rate_scale: Option<f64>,
    #[serde(default)]
    pub generator_seed: u64,
    pub generator_file: Option<PathBuf>,
    #[serde(default, deserialize_with = "toml_opt_date")]
    pub switch_date: Option<NaiveDate>,
    pub switch_factor: Option<f64>,
    pub excitation_factor: Option<f64>,
    pub excitation_days: Option<u32>,
    pub initial: Option<Vec<f64>>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum DateField {
    Native(toml::value::Datetime),
    Text(String),
}

fn toml_date<'de, D: serde::Deserializer<'de>>(de: D) -> std::result::Result<NaiveDate, D::Error> {
    use serde::de::Error as _;
    let text = match DateField::deserialize(de)? {
        DateField::Native(dt) if dt.time.is_none() && dt.offset.is_none() => dt.to_string(),
        DateField::Native(dt) => return Err(D::Error::custom(format!("expected a plain date, got {dt}"))),
        DateField::Text(s) => s,
    };
    text.parse().map_err(|e| D::Error::custom(format!("bad date {text:?}: {e}")))
}

fn toml_opt_date<'de, D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Option<NaiveDate>, D::Error> {
    toml_date(de).map(Some)
}

impl ScenarioConfig {
    pub fn parse(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut config = Self::parse(&text)?;
        if let (Some(file), Some(dir)) = (&config.generator_file, path.parent()) {
            config.generator_file = Some(dir.join(file));
        }
        Ok(config)
    }

    fn generator(&self) -> Result<GeneratorMatrix> {
        match (&self.generator_file, self.rate_scale) {
            (Some(path), None) => {
                let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
                GeneratorMatrix::new(read_matrix(file)?)
            }
            (None, Some(scale)) => random_generator(self.generator_seed, scale),
            _ => Err(Error::InvalidScenario(
                "set exactly one of `rate_scale` and `generator_file`".into(),
            )),
        }
    }

    pub fn to_scenario(&self) -> Result<Scenario> {
        let q = self.generator()?;
        let missing = |key: &str| Error::InvalidScenario(format!("missing `{key}` for {:?}", self.kind));
        let mut scenario = match self.kind {
            ScenarioKind::Homogeneous => Scenario::homogeneous(q, self.n_banks, self.start, self.end, self.seed),
            ScenarioKind::RegimeSwitch => Scenario::regime_switch(
                q,
                self.switch_date.ok_or_else(|| missing("switch_date"))?,
                self.switch_factor.ok_or_else(|| missing("switch_factor"))?,
                self.n_banks,
                self.start,
                self.end,
                self.seed,
            )?,
            ScenarioKind::Excited => Scenario::excited(
                q,
                Excitation {
                    factor: self.excitation_factor.ok_or_else(|| missing("excitation_factor"))?,
                    days: self.excitation_days.ok_or_else(|| missing("excitation_days"))?,
                },
                self.n_banks,
                self.start,
                self.end,
                self.seed,
            ),
        };
        if let Some(init) = &self.initial {
            scenario.initial_distribution = init.as_slice().try_into().map_err(|_| {
                Error::InvalidScenario(format!("`initial` needs {N_STATES} entries, got {}", init.len()))
            })?;
        }
        scenario.validate()?;
        Ok(scenario)
    }
}

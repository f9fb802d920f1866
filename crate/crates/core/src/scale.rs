//! The 15-notch bank financial strength scale.
//!
//! States are encoded as integers `0..=14` ordered by credit quality:
//! `0` is `E-` (highest risk) and `14` is `A+` (strongest).

use std::fmt;
use std::str::FromStr;

/// Number of rating states on the scale.
pub const N_STATES: usize = 15;

/// Labels ordered from worst (`E-`) to best (`A+`).
pub const LABELS: [&str; N_STATES] = [
    "E-", "E", "E+", "D-", "D", "D+", "C-", "C", "C+", "B-", "B", "B+", "A-", "A", "A+",
];

/// Sentinel label marking a withdrawn rating in the interchange format.
pub const WITHDRAWN: &str = "WR";

/// A single rating state, stored as its integer encoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RatingState(u8);

impl RatingState {
    pub const WORST: RatingState = RatingState(0);
    pub const BEST: RatingState = RatingState((N_STATES - 1) as u8);

    /// Returns `None` when `index` is off the scale.
    pub fn new(index: usize) -> Option<Self> {
        (index < N_STATES).then_some(RatingState(index as u8))
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn label(self) -> &'static str {
        LABELS[self.index()]
    }

    pub fn all() -> impl Iterator<Item = RatingState> {
        (0..N_STATES).map(|i| RatingState(i as u8))
    }
}

impl fmt::Display for RatingState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownLabel(pub String);

impl fmt::Display for UnknownLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "unknown rating label {:?}", self.0)
    }
}

impl std::error::Error for UnknownLabel {}

impl FromStr for RatingState {
    type Err = UnknownLabel;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        LABELS
            .iter()
            .position(|l| *l == s)
            .map(|i| RatingState(i as u8))
            .ok_or_else(|| UnknownLabel(s.to_string()))
    }
}

/// The ordered label set, for callers that want to treat the scale as a value.
#[derive(Debug, Clone, Copy, Default)]
pub struct RatingScale;

impl RatingScale {
    pub fn len(&self) -> usize {
        N_STATES
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn labels(&self) -> &'static [&'static str; N_STATES] {
        &LABELS
    }

    pub fn encode(&self, label: &str) -> Option<usize> {
        label.parse::<RatingState>().ok().map(RatingState::index)
    }

    pub fn decode(&self, index: usize) -> Option<&'static str> {
        LABELS.get(index).copied()
    }
}

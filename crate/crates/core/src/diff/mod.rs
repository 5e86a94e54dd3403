//! The four line diff algorithms behind one entry point.

pub mod histogram;
pub mod myers;
pub mod patience;

use std::fmt;
use std::str::FromStr;

use crate::script::ChangedLines;
use crate::text::Token;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Algorithm {
    #[default]
    Myers,
    Minimal,
    Patience,
    Histogram,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] =
        [Algorithm::Myers, Algorithm::Minimal, Algorithm::Patience, Algorithm::Histogram];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Myers => "myers",
            Algorithm::Minimal => "minimal",
            Algorithm::Patience => "patience",
            Algorithm::Histogram => "histogram",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown diff algorithm `{0}` (expected myers, minimal, patience or histogram)")]
pub struct UnknownAlgorithm(pub String);

impl FromStr for Algorithm {
    type Err = UnknownAlgorithm;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| UnknownAlgorithm(s.to_string()))
    }
}

/// Raw diff, before any sliding.
pub fn diff(algorithm: Algorithm, old: &[Token], new: &[Token]) -> ChangedLines {
    match algorithm {
        Algorithm::Myers => myers::diff(old, new, myers::Mode::Myers),
        Algorithm::Minimal => myers::diff(old, new, myers::Mode::Minimal),
        Algorithm::Patience => patience::diff_patience(old, new),
        Algorithm::Histogram => histogram::diff_histogram(old, new),
    }
}

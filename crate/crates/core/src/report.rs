//! Verdicts and witnesses shared by every certification routine.

use alloc::string::String;
use alloc::vec::Vec;

/// A concrete value compared against a threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    /// Label key (irrep id or word encoding), or a parameter name.
    pub label: String,
    /// Position in the sequence being certified, if any.
    pub index: Option<usize>,
    pub value: f64,
    pub threshold: f64,
}

impl Witness {
    pub fn new(label: impl Into<String>, index: Option<usize>, value: f64, threshold: f64) -> Self {
        Self { label: label.into(), index, value, threshold }
    }
}

/// Outcome of one condition.
///
/// A failing verdict lists every violation it found. A passing verdict
/// carries at most one witness: the case closest to its threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub condition: String,
    pub pass: bool,
    pub witnesses: Vec<Witness>,
    pub note: String,
}

impl Verdict {
    /// Builds a verdict from violations and the tightest case seen.
    pub fn from_checks(
        condition: impl Into<String>,
        violations: Vec<Witness>,
        tightest: Option<Witness>,
        note: impl Into<String>,
    ) -> Self {
        let pass = violations.is_empty();
        let witnesses = if pass { tightest.into_iter().collect() } else { violations };
        Self { condition: condition.into(), pass, witnesses, note: note.into() }
    }
}

/// Keeps whichever witness has the smallest margin `threshold - value`.
pub(crate) fn tighter(current: Option<Witness>, candidate: Witness) -> Option<Witness> {
    match current {
        Some(c) if c.threshold - c.value <= candidate.threshold - candidate.value => Some(c),
        _ => Some(candidate),
    }
}

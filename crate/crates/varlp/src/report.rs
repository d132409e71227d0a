//! Structured outcomes for hypothesis checkers and empirical certificates.

use serde::Serialize;

/// Three-valued verdict: checkers never claim failure when a sufficient
/// condition is merely inconclusive — that is what `Unknown` is for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    HypothesesMet,
    Violated,
    Unknown,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Verdict::HypothesesMet => write!(f, "HYPOTHESES_MET"),
            Verdict::Violated => write!(f, "VIOLATED"),
            Verdict::Unknown => write!(f, "UNKNOWN"),
        }
    }
}

/// Result of one check: a verdict plus every number that went into it.
///
/// `Violated` reports name the failed inequality with both sides in `notes`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub id: String,
    pub verdict: Verdict,
    /// Named quantities (range endpoints, derived exponents, measured
    /// constants) in evaluation order.
    pub witness: Vec<(String, f64)>,
    pub notes: Vec<String>,
}

impl CheckReport {
    pub fn new(id: impl Into<String>, verdict: Verdict) -> Self {
        CheckReport { id: id.into(), verdict, witness: Vec::new(), notes: Vec::new() }
    }

    pub fn with(mut self, name: impl Into<String>, value: f64) -> Self {
        self.witness.push((name.into(), value));
        self
    }

    pub fn note(mut self, text: impl Into<String>) -> Self {
        self.notes.push(text.into());
        self
    }

    /// Records a named inequality `lhs <= rhs` (or `<` strictly); downgrades
    /// the verdict to `Violated` and writes both sides into notes on failure.
    pub fn require(mut self, name: &str, lhs: f64, rhs: f64, strict: bool) -> Self {
        let ok = if strict { lhs < rhs } else { lhs <= rhs };
        self.witness.push((format!("{name}.lhs"), lhs));
        self.witness.push((format!("{name}.rhs"), rhs));
        if !ok {
            self.verdict = Verdict::Violated;
            let op = if strict { "<" } else { "<=" };
            self.notes.push(format!("violated {name}: {lhs} {op} {rhs} is false"));
        }
        self
    }

    pub fn witness_value(&self, name: &str) -> Option<f64> {
        self.witness.iter().find(|(n, _)| n == name).map(|&(_, v)| v)
    }
}

//! Weak supervision: labeling rules, vote aggregation, evaluation, and the
//! labeling-function ablation.

mod ablate;
mod aggregate;
mod eval;
mod rules;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub use ablate::{ablate, AblationStep};
pub use aggregate::{aggregate, aggregate_majority, aggregate_sme, Aggregator};
pub use eval::{evaluate, evaluate_keyed, EvalMetrics};
pub use rules::{
    apply_rule, vote_vector, AnalyzedSentence, Detector, MatchScope, RuleSet, RuleSpec, DEFAULT_RULES_JSON,
};

/// Output of one labeling function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Vote {
    OutStrong = -1,
    Abstain = 0,
    InWeak = 1,
    InStrong = 2,
}

impl Vote {
    pub const ALL: [Vote; 4] = [Vote::OutStrong, Vote::Abstain, Vote::InWeak, Vote::InStrong];

    pub fn value(self) -> i8 {
        self as i8
    }
}

impl TryFrom<i64> for Vote {
    type Error = Error;

    fn try_from(value: i64) -> Result<Self> {
        match value {
            -1 => Ok(Vote::OutStrong),
            0 => Ok(Vote::Abstain),
            1 => Ok(Vote::InWeak),
            2 => Ok(Vote::InStrong),
            other => Err(Error::invalid("vote", format!("{other} is not one of -1, 0, 1, 2"))),
        }
    }
}

impl Serialize for Vote {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_i8(self.value())
    }
}

impl<'de> Deserialize<'de> for Vote {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = i64::deserialize(deserializer)?;
        Vote::try_from(raw).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ClaimLabel {
    #[serde(rename = "INCLAIM")]
    InClaim,
    #[serde(rename = "OUTOFCLAIM")]
    OutOfClaim,
}

impl fmt::Display for ClaimLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ClaimLabel::InClaim => "INCLAIM",
            ClaimLabel::OutOfClaim => "OUTOFCLAIM",
        })
    }
}

impl FromStr for ClaimLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "INCLAIM" | "IN_CLAIM" => Ok(ClaimLabel::InClaim),
            "OUTOFCLAIM" | "OUT_OF_CLAIM" => Ok(ClaimLabel::OutOfClaim),
            other => Err(Error::invalid("claim label", other.to_string())),
        }
    }
}

/// Aggregator output: a label, or an abstention the baseline refuses to resolve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Prediction {
    #[serde(rename = "INCLAIM")]
    InClaim,
    #[serde(rename = "OUTOFCLAIM")]
    OutOfClaim,
    #[serde(rename = "ABSTAIN")]
    Abstain,
}

impl Prediction {
    pub fn label(self) -> Option<ClaimLabel> {
        match self {
            Prediction::InClaim => Some(ClaimLabel::InClaim),
            Prediction::OutOfClaim => Some(ClaimLabel::OutOfClaim),
            Prediction::Abstain => None,
        }
    }
}

impl From<ClaimLabel> for Prediction {
    fn from(label: ClaimLabel) -> Self {
        match label {
            ClaimLabel::InClaim => Prediction::InClaim,
            ClaimLabel::OutOfClaim => Prediction::OutOfClaim,
        }
    }
}

impl fmt::Display for Prediction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.label() {
            Some(label) => label.fmt(f),
            None => f.write_str("ABSTAIN"),
        }
    }
}

/// Votes and the aggregated decision for one sentence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Labeled {
    pub votes: Vec<Vote>,
    pub prediction: Prediction,
}

/// Runs every rule over `text` and aggregates the votes.
pub fn label_sentence(text: &str, rules: &RuleSet, aggregator: Aggregator) -> Labeled {
    let votes = vote_vector(text, rules);
    let prediction = aggregate(&votes, aggregator).expect("rule sets are never empty");
    Labeled { votes, prediction }
}

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{ClaimLabel, Prediction, Vote};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Aggregator {
    /// Expert hierarchy: any strong out-of-claim vote wins, then any strong
    /// in-claim vote, then a majority of the remaining ballots.
    #[default]
    Sme,
    /// Plain plurality; abstentions are kept as a result.
    Majority,
}

impl fmt::Display for Aggregator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Aggregator::Sme => "sme",
            Aggregator::Majority => "majority",
        })
    }
}

impl FromStr for Aggregator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sme" => Ok(Aggregator::Sme),
            "majority" => Ok(Aggregator::Majority),
            other => Err(Error::invalid("aggregator", other.to_string())),
        }
    }
}

pub fn aggregate(votes: &[Vote], aggregator: Aggregator) -> Result<Prediction> {
    match aggregator {
        Aggregator::Sme => aggregate_sme(votes).map(Prediction::from),
        Aggregator::Majority => aggregate_majority(votes),
    }
}

fn require_votes(votes: &[Vote]) -> Result<()> {
    if votes.is_empty() {
        Err(Error::invalid("votes", "empty vote vector"))
    } else {
        Ok(())
    }
}

/// Ties and all-abstain vectors fall through to out-of-claim: a claim needs
/// affirmative evidence.
pub fn aggregate_sme(votes: &[Vote]) -> Result<ClaimLabel> {
    require_votes(votes)?;
    if votes.contains(&Vote::OutStrong) {
        return Ok(ClaimLabel::OutOfClaim);
    }
    if votes.contains(&Vote::InStrong) {
        return Ok(ClaimLabel::InClaim);
    }
    let in_ballots = votes.iter().filter(|v| **v == Vote::InWeak).count();
    // No strong votes remain, so there are no out-of-claim ballots to count.
    if in_ballots > 0 {
        Ok(ClaimLabel::InClaim)
    } else {
        Ok(ClaimLabel::OutOfClaim)
    }
}

pub fn aggregate_majority(votes: &[Vote]) -> Result<Prediction> {
    require_votes(votes)?;
    let (mut out, mut abstain, mut inside) = (0usize, 0usize, 0usize);
    for v in votes {
        match v {
            Vote::OutStrong => out += 1,
            Vote::Abstain => abstain += 1,
            Vote::InWeak | Vote::InStrong => inside += 1,
        }
    }
    Ok(if inside > out && inside > abstain {
        Prediction::InClaim
    } else if out > inside && out > abstain {
        Prediction::OutOfClaim
    } else {
        Prediction::Abstain
    })
}

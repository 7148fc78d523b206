use serde::{Deserialize, Serialize};

use super::{aggregate_sme, AnalyzedSentence, ClaimLabel, RuleSet, Vote};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AblationStep {
    /// Number of in-claim rules active at this step.
    pub k: usize,
    /// The rule added at this step.
    pub rule_id: String,
    pub accuracy: f64,
}

/// Greedy forward selection over the in-claim rules.
///
/// Out-of-claim rules are always active. Each step adds the candidate that
/// maximizes accuracy under the SME aggregator; ties go to the smallest
/// `rule_id`. Returns one step per in-claim rule.
pub fn ablate(rules: &RuleSet, gold: &[(String, ClaimLabel)]) -> Result<Vec<AblationStep>> {
    if gold.is_empty() {
        return Err(Error::Degenerate("ablation needs at least one gold sentence".into()));
    }
    let matrix: Vec<Vec<Vote>> = gold
        .iter()
        .map(|(text, _)| rules.votes(&AnalyzedSentence::new(text)))
        .collect();
    let specs = rules.specs();
    let fixed: Vec<usize> = (0..specs.len()).filter(|&i| specs[i].is_out_of_claim()).collect();
    let mut candidates: Vec<usize> = (0..specs.len()).filter(|&i| !specs[i].is_out_of_claim()).collect();
    candidates.sort_by(|&a, &b| specs[a].rule_id.cmp(&specs[b].rule_id));

    let correct = |active: &[usize]| -> usize {
        matrix
            .iter()
            .zip(gold)
            .filter(|(row, (_, label))| {
                let votes: Vec<Vote> = active.iter().map(|&i| row[i]).collect();
                aggregate_sme(&votes).map(|l| l == *label).unwrap_or(false)
            })
            .count()
    };

    let mut active = fixed;
    let mut curve = Vec::with_capacity(candidates.len());
    while !candidates.is_empty() {
        let mut best: Option<(usize, usize)> = None;
        for (pos, &cand) in candidates.iter().enumerate() {
            active.push(cand);
            let score = correct(&active);
            active.pop();
            if best.is_none_or(|(_, s)| score > s) {
                best = Some((pos, score));
            }
        }
        let (pos, score) = best.expect("candidates is non-empty");
        let chosen = candidates.remove(pos);
        active.push(chosen);
        curve.push(AblationStep {
            k: curve.len() + 1,
            rule_id: specs[chosen].rule_id.clone(),
            accuracy: score as f64 / gold.len() as f64,
        });
    }
    Ok(curve)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weaklabel::{Detector, MatchScope, RuleSpec};

    fn phrase(id: &str, pattern: &str, emit: Vote) -> RuleSpec {
        RuleSpec {
            rule_id: id.into(),
            detector: Detector::Phrase,
            patterns: vec![pattern.into()],
            emit,
            match_scope: MatchScope::TokenBoundary,
        }
    }

    #[test]
    fn single_perfect_rule() {
        let rules = RuleSet::new(vec![phrase("a", "will", Vote::InStrong)]).unwrap();
        let gold = vec![
            ("sales will rise 5%".to_string(), ClaimLabel::InClaim),
            ("sales rose 5%".to_string(), ClaimLabel::OutOfClaim),
        ];
        let curve = ablate(&rules, &gold).unwrap();
        assert_eq!(
            curve,
            vec![AblationStep {
                k: 1,
                rule_id: "a".into(),
                accuracy: 1.0
            }]
        );
    }

    #[test]
    fn first_pick_has_best_single_rule_accuracy() {
        let rules = RuleSet::new(vec![
            phrase("z_out", "rose", Vote::OutStrong),
            phrase("b_weak", "might", Vote::InWeak),
            phrase("a_strong", "will", Vote::InStrong),
        ])
        .unwrap();
        let gold = vec![
            ("sales will rise 5%".to_string(), ClaimLabel::InClaim),
            ("sales will grow 5%".to_string(), ClaimLabel::InClaim),
            ("sales might grow 5%".to_string(), ClaimLabel::InClaim),
            ("sales rose 5%".to_string(), ClaimLabel::OutOfClaim),
        ];
        let curve = ablate(&rules, &gold).unwrap();
        assert_eq!(curve.len(), 2);
        assert_eq!(curve[0].rule_id, "a_strong");
        assert_eq!(curve[0].accuracy, 0.75);
        assert_eq!(curve[1].accuracy, 1.0);
        assert!(curve.iter().all(|s| (0.0..=1.0).contains(&s.accuracy)));
    }

    #[test]
    fn ties_go_to_smallest_rule_id() {
        let rules = RuleSet::new(vec![
            phrase("b", "alpha", Vote::InStrong),
            phrase("a", "beta", Vote::InStrong),
        ])
        .unwrap();
        let gold = vec![("nothing matches".to_string(), ClaimLabel::OutOfClaim)];
        let curve = ablate(&rules, &gold).unwrap();
        assert_eq!(curve[0].rule_id, "a");
    }

    #[test]
    fn empty_gold_is_error() {
        assert!(ablate(&RuleSet::default_rules(), &[]).is_err());
    }
}

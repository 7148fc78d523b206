use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{ClaimLabel, Prediction};
use crate::corpus::GoldLabel;
use crate::error::{Error, Result};

/// Binary metrics with in-claim as the positive class.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct EvalMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub accuracy: f64,
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
    pub tn: usize,
}

impl EvalMetrics {
    pub fn from_counts(tp: usize, fp: usize, fn_: usize, tn: usize) -> Self {
        let ratio = |num: usize, den: usize| if den == 0 { 0.0 } else { num as f64 / den as f64 };
        let precision = ratio(tp, tp + fp);
        let recall = ratio(tp, tp + fn_);
        let f1 = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        EvalMetrics {
            precision,
            recall,
            f1,
            accuracy: ratio(tp + tn, tp + fp + fn_ + tn),
            tp,
            fp,
            fn_,
            tn,
        }
    }

    pub fn total(&self) -> usize {
        self.tp + self.fp + self.fn_ + self.tn
    }
}

/// Scores (prediction, gold) pairs. An abstention is wrong whatever the gold
/// label: a missed claim on in-claim gold, a false alarm on out-of-claim gold.
pub fn evaluate<I>(pairs: I) -> EvalMetrics
where
    I: IntoIterator<Item = (Prediction, ClaimLabel)>,
{
    let (mut tp, mut fp, mut fn_, mut tn) = (0, 0, 0, 0);
    for (pred, gold) in pairs {
        match (pred, gold) {
            (Prediction::InClaim, ClaimLabel::InClaim) => tp += 1,
            (Prediction::InClaim, ClaimLabel::OutOfClaim) => fp += 1,
            (Prediction::OutOfClaim, ClaimLabel::InClaim) => fn_ += 1,
            (Prediction::OutOfClaim, ClaimLabel::OutOfClaim) => tn += 1,
            (Prediction::Abstain, ClaimLabel::InClaim) => fn_ += 1,
            (Prediction::Abstain, ClaimLabel::OutOfClaim) => fp += 1,
        }
    }
    EvalMetrics::from_counts(tp, fp, fn_, tn)
}

/// Joins predictions to gold on (doc_id, sentence_index).
pub fn evaluate_keyed(predictions: &HashMap<(String, usize), Prediction>, gold: &[GoldLabel]) -> Result<EvalMetrics> {
    let mut pairs = Vec::with_capacity(gold.len());
    for g in gold {
        let pred = predictions.get(&(g.doc_id.clone(), g.sentence_index)).ok_or_else(|| {
            Error::invalid(
                "predictions",
                format!("no prediction for {}#{}", g.doc_id, g.sentence_index),
            )
        })?;
        pairs.push((*pred, g.label));
    }
    Ok(evaluate(pairs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ClaimLabel::*;

    #[test]
    fn hand_counted_cells() {
        let gold = [InClaim, OutOfClaim, InClaim, OutOfClaim];
        let pred = [InClaim, InClaim, InClaim, OutOfClaim];
        let m = evaluate(pred.iter().map(|p| Prediction::from(*p)).zip(gold));
        assert_eq!((m.tp, m.fp, m.fn_, m.tn), (2, 1, 0, 1));
        assert!((m.precision - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(m.recall, 1.0);
        assert!((m.f1 - 0.8).abs() < 1e-15);
        assert_eq!(m.accuracy, 0.75);
    }

    #[test]
    fn identity_and_zero_recall() {
        let gold = [InClaim, OutOfClaim, InClaim];
        let m = evaluate(gold.iter().map(|g| (Prediction::from(*g), *g)));
        assert_eq!(m.f1, 1.0);
        let m = evaluate(gold.iter().map(|g| (Prediction::OutOfClaim, *g)));
        assert_eq!(m.f1, 0.0);
    }

    #[test]
    fn abstain_is_always_wrong() {
        let m = evaluate([(Prediction::Abstain, InClaim), (Prediction::Abstain, OutOfClaim)]);
        assert_eq!((m.tp, m.fp, m.fn_, m.tn), (0, 1, 1, 0));
        assert_eq!(m.accuracy, 0.0);
    }

    #[test]
    fn missing_prediction_is_error() {
        let gold = vec![GoldLabel {
            doc_id: "d".into(),
            sentence_index: 3,
            label: InClaim,
        }];
        assert!(evaluate_keyed(&HashMap::new(), &gold).is_err());
        let mut preds = HashMap::new();
        preds.insert(("d".to_string(), 3), Prediction::InClaim);
        assert_eq!(evaluate_keyed(&preds, &gold).unwrap().f1, 1.0);
    }
}

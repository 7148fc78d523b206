//! Sentence sentiment providers and the document optimism score.
//!
//! Optimism is `100 * (positive in-claim - negative in-claim) / total sentences`,
//! where the denominator counts every segmented sentence of the document.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::{parse_word_list, Sentence};
use crate::error::{Error, Result};
use crate::textproc::{lemma, words};
use crate::weaklabel::ClaimLabel;

pub const DEFAULT_POSITIVE: &str = include_str!("../data/positive.txt");
pub const DEFAULT_NEGATIVE: &str = include_str!("../data/negative.txt");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SentimentLabel {
    #[serde(rename = "POSITIVE")]
    Positive,
    #[serde(rename = "NEGATIVE")]
    Negative,
    #[serde(rename = "NEUTRAL")]
    Neutral,
}

impl fmt::Display for SentimentLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SentimentLabel::Positive => "POSITIVE",
            SentimentLabel::Negative => "NEGATIVE",
            SentimentLabel::Neutral => "NEUTRAL",
        })
    }
}

impl FromStr for SentimentLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "POSITIVE" => Ok(SentimentLabel::Positive),
            "NEGATIVE" => Ok(SentimentLabel::Negative),
            "NEUTRAL" => Ok(SentimentLabel::Neutral),
            other => Err(Error::invalid("sentiment label", other.to_string())),
        }
    }
}

/// Anything that maps a sentence to positive, negative, or neutral.
pub trait SentimentProvider: Send + Sync {
    fn classify(&self, text: &str) -> SentimentLabel;
}

#[derive(Debug, Clone)]
pub struct SentimentLexicon {
    positive: HashSet<String>,
    negative: HashSet<String>,
}

impl SentimentLexicon {
    pub fn new<P, N, S, T>(positive: P, negative: N) -> Result<Self>
    where
        P: IntoIterator<Item = S>,
        N: IntoIterator<Item = T>,
        S: AsRef<str>,
        T: AsRef<str>,
    {
        let normalize = |s: &str| s.trim().to_lowercase();
        let positive: HashSet<String> = positive
            .into_iter()
            .map(|s| normalize(s.as_ref()))
            .filter(|s| !s.is_empty())
            .collect();
        let negative: HashSet<String> = negative
            .into_iter()
            .map(|s| normalize(s.as_ref()))
            .filter(|s| !s.is_empty())
            .collect();
        if positive.is_empty() || negative.is_empty() {
            return Err(Error::invalid(
                "lexicon",
                "positive and negative lists must be non-empty",
            ));
        }
        let shared: BTreeSet<&String> = positive.intersection(&negative).collect();
        if !shared.is_empty() {
            return Err(Error::invalid("lexicon", format!("terms in both lists: {shared:?}")));
        }
        Ok(SentimentLexicon { positive, negative })
    }

    pub fn default_lexicon() -> Self {
        SentimentLexicon::new(parse_word_list(DEFAULT_POSITIVE), parse_word_list(DEFAULT_NEGATIVE))
            .expect("shipped lexicon is valid")
    }

    fn polarity(&self, token: &str) -> i32 {
        let hit = |set: &HashSet<String>| set.contains(token) || set.contains(&lemma(token));
        if hit(&self.positive) {
            1
        } else if hit(&self.negative) {
            -1
        } else {
            0
        }
    }
}

/// Token-count classifier: more positive hits than negative is positive, and vice versa.
pub fn classify_lexicon(text: &str, lexicon: &SentimentLexicon) -> SentimentLabel {
    let lower = text.to_lowercase();
    let (mut pos, mut neg) = (0, 0);
    for token in words(&lower) {
        match lexicon.polarity(token) {
            1 => pos += 1,
            -1 => neg += 1,
            _ => {}
        }
    }
    match pos.cmp(&neg) {
        std::cmp::Ordering::Greater => SentimentLabel::Positive,
        std::cmp::Ordering::Less => SentimentLabel::Negative,
        std::cmp::Ordering::Equal => SentimentLabel::Neutral,
    }
}

impl SentimentProvider for SentimentLexicon {
    fn classify(&self, text: &str) -> SentimentLabel {
        classify_lexicon(text, self)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExternalSentiment {
    pub doc_id: String,
    pub sentence_index: usize,
    pub label: SentimentLabel,
}

pub fn load_sentiment_csv(path: impl AsRef<Path>) -> Result<Vec<ExternalSentiment>> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::invalid("sentiment file", format!("{}: {e}", path.display())))?;
    let mut out = Vec::new();
    for (i, row) in reader.deserialize::<ExternalSentiment>().enumerate() {
        out.push(row.map_err(|e| Error::parse(path, i + 2, e.to_string()))?);
    }
    Ok(out)
}

/// Copies externally produced labels onto `sentences`.
///
/// Every label must refer to a sentence in the slice. Every in-claim sentence
/// must end up labeled; with `default_neutral` unlabeled ones become neutral.
pub fn merge_external_sentiment(
    sentences: &mut [Sentence],
    labels: &[ExternalSentiment],
    default_neutral: bool,
) -> Result<()> {
    let mut positions: HashMap<(&str, usize), usize> = HashMap::new();
    for (pos, s) in sentences.iter().enumerate() {
        positions.insert((s.doc_id.as_str(), s.index), pos);
    }
    let mut assignments = Vec::with_capacity(labels.len());
    for l in labels {
        let pos = positions.get(&(l.doc_id.as_str(), l.sentence_index)).ok_or_else(|| {
            Error::invalid(
                "sentiment file",
                format!("unknown sentence {}#{}", l.doc_id, l.sentence_index),
            )
        })?;
        assignments.push((*pos, l.label));
    }
    for (pos, label) in assignments {
        sentences[pos].flags.sentiment = Some(label);
    }
    for s in sentences.iter_mut() {
        if s.flags.claim == Some(ClaimLabel::InClaim) && s.flags.sentiment.is_none() {
            if default_neutral {
                s.flags.sentiment = Some(SentimentLabel::Neutral);
            } else {
                return Err(Error::invalid(
                    "sentiment file",
                    format!("no label for in-claim sentence {}#{}", s.doc_id, s.index),
                ));
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimismRecord {
    pub key: String,
    pub pos_in_claim: usize,
    pub neg_in_claim: usize,
    pub total_sentences: usize,
    pub optimism: f64,
}

impl OptimismRecord {
    pub fn from_counts(key: impl Into<String>, pos: usize, neg: usize, total: usize) -> Result<Self> {
        let key = key.into();
        if total == 0 {
            return Err(Error::Degenerate(format!("{key}: no sentences")));
        }
        if pos + neg > total {
            return Err(Error::invalid(
                "optimism counts",
                format!("{key}: {pos} positive + {neg} negative exceeds {total} sentences"),
            ));
        }
        let optimism = 100.0 * (pos as f64 - neg as f64) / total as f64;
        Ok(OptimismRecord {
            key,
            pos_in_claim: pos,
            neg_in_claim: neg,
            total_sentences: total,
            optimism,
        })
    }
}

/// Which sentences contribute to the optimism numerator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SentenceSubset {
    Unfiltered,
    Numeric,
    NumericFinancial,
    InClaim,
}

impl SentenceSubset {
    pub const ALL: [SentenceSubset; 4] = [
        SentenceSubset::Unfiltered,
        SentenceSubset::Numeric,
        SentenceSubset::NumericFinancial,
        SentenceSubset::InClaim,
    ];

    pub fn contains(self, s: &Sentence) -> bool {
        match self {
            SentenceSubset::Unfiltered => true,
            SentenceSubset::Numeric => s.flags.is_numeric,
            SentenceSubset::NumericFinancial => s.flags.is_financial,
            SentenceSubset::InClaim => s.flags.claim == Some(ClaimLabel::InClaim),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SentenceSubset::Unfiltered => "unfiltered",
            SentenceSubset::Numeric => "numeric",
            SentenceSubset::NumericFinancial => "numeric_financial",
            SentenceSubset::InClaim => "in_claim",
        }
    }
}

impl FromStr for SentenceSubset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SentenceSubset::ALL
            .into_iter()
            .find(|subset| subset.name() == s)
            .ok_or_else(|| Error::invalid("sentence subset", s.to_string()))
    }
}

fn document_key(sentences: &[Sentence]) -> String {
    sentences.first().map(|s| s.doc_id.clone()).unwrap_or_default()
}

/// Optimism of one document from all of its segmented sentences.
pub fn compute_optimism(sentences: &[Sentence]) -> Result<OptimismRecord> {
    let (mut pos, mut neg) = (0, 0);
    for s in sentences.iter().filter(|s| SentenceSubset::InClaim.contains(s)) {
        match s.flags.sentiment {
            Some(SentimentLabel::Positive) => pos += 1,
            Some(SentimentLabel::Negative) => neg += 1,
            Some(SentimentLabel::Neutral) => {}
            None => {
                return Err(Error::invalid(
                    "sentence",
                    format!("in-claim sentence {}#{} has no sentiment", s.doc_id, s.index),
                ))
            }
        }
    }
    OptimismRecord::from_counts(document_key(sentences), pos, neg, sentences.len())
}

/// Optimism restricted to a sentence subset; the denominator stays the full
/// sentence count. Sentences without a sentiment label count as neutral.
pub fn subset_optimism(sentences: &[Sentence], subset: SentenceSubset) -> Result<OptimismRecord> {
    let (mut pos, mut neg) = (0, 0);
    for s in sentences.iter().filter(|s| subset.contains(s)) {
        match s.flags.sentiment {
            Some(SentimentLabel::Positive) => pos += 1,
            Some(SentimentLabel::Negative) => neg += 1,
            _ => {}
        }
    }
    OptimismRecord::from_counts(document_key(sentences), pos, neg, sentences.len())
}

/// Pools counts across a group's documents and recomputes optimism from the sums.
pub fn aggregate_quarter(key: impl Into<String>, records: &[OptimismRecord]) -> Result<OptimismRecord> {
    let key = key.into();
    if records.is_empty() {
        return Err(Error::Degenerate(format!("{key}: empty group")));
    }
    let pos = records.iter().map(|r| r.pos_in_claim).sum();
    let neg = records.iter().map(|r| r.neg_in_claim).sum();
    let total = records.iter().map(|r| r.total_sentences).sum();
    OptimismRecord::from_counts(key, pos, neg, total)
}

pub fn write_optimism_csv<W: Write>(records: &[OptimismRecord], out: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    for r in records {
        writer
            .serialize(r)
            .map_err(|e| Error::invalid("optimism output", e.to_string()))?;
    }
    writer.flush().map_err(|e| Error::io("<optimism output>", e))
}

pub fn load_optimism_csv(path: impl AsRef<Path>) -> Result<Vec<OptimismRecord>> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::invalid("optimism file", format!("{}: {e}", path.display())))?;
    let mut out: Vec<OptimismRecord> = Vec::new();
    for (i, row) in reader.deserialize::<OptimismRecord>().enumerate() {
        let r = row.map_err(|e| Error::parse(path, i + 2, e.to_string()))?;
        // Recompute so the stored score cannot disagree with its counts.
        let checked = OptimismRecord::from_counts(r.key, r.pos_in_claim, r.neg_in_claim, r.total_sentences)
            .map_err(|e| Error::parse(path, i + 2, e.to_string()))?;
        if (checked.optimism - r.optimism).abs() > 1e-6 * (1.0 + r.optimism.abs()) {
            return Err(Error::parse(path, i + 2, "optimism does not match its counts"));
        }
        out.push(checked);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::SentenceFlags;

    fn sentence(i: usize, claim: Option<ClaimLabel>, sentiment: Option<SentimentLabel>) -> Sentence {
        Sentence {
            doc_id: "d".into(),
            index: i,
            text: format!("s{i}"),
            byte_span: (0, 0),
            flags: SentenceFlags {
                is_numeric: claim.is_some(),
                is_financial: claim.is_some(),
                claim,
                sentiment,
            },
        }
    }

    fn doc(pos: usize, neg: usize, total: usize) -> Vec<Sentence> {
        (0..total)
            .map(|i| {
                let sentiment = if i < pos {
                    SentimentLabel::Positive
                } else if i < pos + neg {
                    SentimentLabel::Negative
                } else {
                    SentimentLabel::Neutral
                };
                let claim = (i < pos + neg).then_some(ClaimLabel::InClaim);
                sentence(i, claim, Some(sentiment))
            })
            .collect()
    }

    #[test]
    fn lexicon_classification() {
        let lex = SentimentLexicon::new(["strong", "growth"], ["decline", "loss"]).unwrap();
        assert_eq!(
            classify_lexicon("we expect strong growth", &lex),
            SentimentLabel::Positive
        );
        assert_eq!(
            classify_lexicon("we expect a decline and a loss", &lex),
            SentimentLabel::Negative
        );
        assert_eq!(
            classify_lexicon("we expect revenue of $5", &lex),
            SentimentLabel::Neutral
        );
        assert_eq!(
            classify_lexicon("Declining margins, STRONG sales", &lex),
            SentimentLabel::Neutral
        );
    }

    #[test]
    fn lexicon_invariants() {
        assert!(SentimentLexicon::new(["up"], Vec::<String>::new()).is_err());
        assert!(SentimentLexicon::new(["up", "gain"], ["gain"]).is_err());
        let lex = SentimentLexicon::default_lexicon();
        assert_eq!(lex.classify("margins improved to 40%"), SentimentLabel::Positive);
        assert_eq!(
            lex.classify("we expect a headwind of $175 million"),
            SentimentLabel::Negative
        );
    }

    #[test]
    fn optimism_hand_cases() {
        assert_eq!(compute_optimism(&doc(2, 1, 10)).unwrap().optimism, 10.0);
        assert_eq!(compute_optimism(&doc(0, 0, 10)).unwrap().optimism, 0.0);
        assert_eq!(compute_optimism(&doc(10, 0, 10)).unwrap().optimism, 100.0);
        assert!(compute_optimism(&[]).is_err());
    }

    #[test]
    fn in_claim_without_sentiment_is_error() {
        let s = vec![sentence(0, Some(ClaimLabel::InClaim), None)];
        assert!(compute_optimism(&s).is_err());
    }

    #[test]
    fn quarter_pooling() {
        let a = OptimismRecord::from_counts("a", 2, 1, 10).unwrap();
        let b = OptimismRecord::from_counts("b", 0, 1, 10).unwrap();
        let pooled = aggregate_quarter("T:2020Q1", &[a.clone(), b.clone()]).unwrap();
        assert_eq!(
            (pooled.pos_in_claim, pooled.neg_in_claim, pooled.total_sentences),
            (2, 2, 20)
        );
        assert_eq!(pooled.optimism, 0.0);
        assert_eq!(aggregate_quarter("x", &[b.clone(), a.clone()]).unwrap().optimism, 0.0);
        let single = aggregate_quarter("a", std::slice::from_ref(&a)).unwrap();
        assert_eq!(single, a);
        assert!(aggregate_quarter("x", &[]).is_err());
    }

    #[test]
    fn subsets() {
        let d = doc(2, 1, 10);
        assert_eq!(
            subset_optimism(&d, SentenceSubset::InClaim).unwrap(),
            compute_optimism(&d).unwrap()
        );
        let neutral: Vec<Sentence> = (0..4)
            .map(|i| sentence(i, None, Some(SentimentLabel::Neutral)))
            .collect();
        assert_eq!(
            subset_optimism(&neutral, SentenceSubset::Unfiltered).unwrap().optimism,
            0.0
        );
        // sentiment only on non-numeric sentences
        let mut mixed = neutral.clone();
        mixed[0].flags.sentiment = Some(SentimentLabel::Positive);
        mixed[1].flags.is_numeric = true;
        assert_eq!(subset_optimism(&mixed, SentenceSubset::Numeric).unwrap().optimism, 0.0);
        assert_eq!(
            subset_optimism(&mixed, SentenceSubset::Unfiltered).unwrap().optimism,
            25.0
        );
        assert_eq!(
            "numeric_financial".parse::<SentenceSubset>().unwrap(),
            SentenceSubset::NumericFinancial
        );
    }

    #[test]
    fn external_merge() {
        let base: Vec<Sentence> = vec![
            sentence(0, Some(ClaimLabel::InClaim), None),
            sentence(1, Some(ClaimLabel::InClaim), None),
            sentence(2, None, None),
        ];
        let label = |i, l| ExternalSentiment {
            doc_id: "d".into(),
            sentence_index: i,
            label: l,
        };

        let mut full = base.clone();
        merge_external_sentiment(
            &mut full,
            &[label(0, SentimentLabel::Positive), label(1, SentimentLabel::Negative)],
            false,
        )
        .unwrap();
        assert_eq!(full[0].flags.sentiment, Some(SentimentLabel::Positive));
        assert_eq!(full[1].flags.sentiment, Some(SentimentLabel::Negative));

        let mut alien = base.clone();
        let bad = ExternalSentiment {
            doc_id: "zzz".into(),
            sentence_index: 0,
            label: SentimentLabel::Neutral,
        };
        assert!(merge_external_sentiment(&mut alien, &[bad], true).is_err());

        let mut partial = base.clone();
        assert!(merge_external_sentiment(&mut partial, &[label(0, SentimentLabel::Positive)], false).is_err());
        let mut partial = base;
        merge_external_sentiment(&mut partial, &[label(0, SentimentLabel::Positive)], true).unwrap();
        assert_eq!(partial[1].flags.sentiment, Some(SentimentLabel::Neutral));
    }

    #[test]
    fn optimism_csv_round_trip() {
        let records = vec![
            OptimismRecord::from_counts("AAPL:2020Q1", 3, 1, 40).unwrap(),
            OptimismRecord::from_counts("MSFT:2020Q1", 0, 2, 7).unwrap(),
        ];
        let mut buf = Vec::new();
        write_optimism_csv(&records, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("key,pos_in_claim,neg_in_claim,total_sentences,optimism\n"));
        let f = tempfile::NamedTempFile::new().unwrap();
        std::fs::write(f.path(), &text).unwrap();
        assert_eq!(load_optimism_csv(f.path()).unwrap(), records);
    }
}

//! Single-threaded labeling latency benchmark.

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};
use std::time::Instant;

use claimforge_core::corpus::Document;
use claimforge_core::weaklabel::{aggregate, AnalyzedSentence, Prediction};
use serde::{Deserialize, Serialize};

use crate::config::Engine;
use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatencyReport {
    pub documents: usize,
    pub sentences_processed: usize,
    pub labeled_sentences: usize,
    pub in_claim: usize,
    pub out_of_claim: usize,
    pub abstain: usize,
    /// Hash of every (doc_id, index, label) in processing order.
    pub label_digest: String,
    pub repetitions: usize,
    /// Median wall time of one timed pass, in seconds.
    pub wall_time_secs: f64,
    pub throughput_sentences_per_sec: f64,
    /// Per-sentence processing time percentiles, in microseconds.
    pub p50_us: f64,
    pub p95_us: f64,
    pub p99_us: f64,
}

impl LatencyReport {
    /// The fields that must not depend on timing.
    pub fn deterministic_fields(&self) -> (usize, usize, usize, usize, usize, usize, &str, usize) {
        (
            self.documents,
            self.sentences_processed,
            self.labeled_sentences,
            self.in_claim,
            self.out_of_claim,
            self.abstain,
            &self.label_digest,
            self.repetitions,
        )
    }
}

struct Pass {
    seconds: f64,
    per_sentence_ns: Vec<u64>,
    sentences: usize,
    predictions: Vec<(usize, usize, Prediction)>,
}

/// Segments, filters and labels every document, timing each sentence.
fn timed_pass(engine: &Engine, docs: &[Document]) -> Pass {
    let mut per_sentence_ns = Vec::new();
    let mut predictions = Vec::new();
    let mut sentences = 0;
    let start = Instant::now();
    for (d, doc) in docs.iter().enumerate() {
        let t0 = Instant::now();
        let annotated = engine.text.annotate(doc);
        let split_ns = t0.elapsed().as_nanos() as u64;
        let share = split_ns / annotated.len().max(1) as u64;
        sentences += annotated.len();
        for s in &annotated {
            let t = Instant::now();
            if engine.text.selects(s) {
                let votes = engine.rules.votes(&AnalyzedSentence::new(&s.text));
                let label = aggregate(&votes, engine.aggregator).expect("rule sets are never empty");
                predictions.push((d, s.index, label));
            }
            per_sentence_ns.push(share + t.elapsed().as_nanos() as u64);
        }
    }
    Pass {
        seconds: start.elapsed().as_secs_f64(),
        per_sentence_ns,
        sentences,
        predictions,
    }
}

fn percentile(sorted: &[u64], q: f64) -> f64 {
    if sorted.is_empty() {
        return 0.0;
    }
    let rank = ((q * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len());
    sorted[rank - 1] as f64 / 1000.0
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / 2.0
    }
}

/// One untimed warm-up pass, then `repetitions` timed passes.
pub fn run_bench(engine: &Engine, docs: &[Document], repetitions: usize) -> Result<LatencyReport, CliError> {
    if docs.is_empty() {
        return Err(CliError::data("bench corpus is empty"));
    }
    if repetitions == 0 {
        return Err(CliError::config("repetitions must be at least 1"));
    }
    let warm = timed_pass(engine, docs);
    if warm.sentences == 0 {
        return Err(CliError::data("bench corpus has no sentences"));
    }
    let mut times = Vec::with_capacity(repetitions);
    let mut latencies = Vec::new();
    let mut last = warm;
    for _ in 0..repetitions {
        let pass = timed_pass(engine, docs);
        times.push(pass.seconds);
        latencies.extend_from_slice(&pass.per_sentence_ns);
        last = pass;
    }
    latencies.sort_unstable();
    let wall = median(&mut times);

    let mut hasher = DefaultHasher::new();
    let (mut in_claim, mut out_of_claim, mut abstain) = (0, 0, 0);
    for (d, index, label) in &last.predictions {
        docs[*d].doc_id.hash(&mut hasher);
        index.hash(&mut hasher);
        label.to_string().hash(&mut hasher);
        match label {
            Prediction::InClaim => in_claim += 1,
            Prediction::OutOfClaim => out_of_claim += 1,
            Prediction::Abstain => abstain += 1,
        }
    }
    Ok(LatencyReport {
        documents: docs.len(),
        sentences_processed: last.sentences,
        labeled_sentences: last.predictions.len(),
        in_claim,
        out_of_claim,
        abstain,
        label_digest: format!("{:016x}", hasher.finish()),
        repetitions,
        wall_time_secs: wall,
        throughput_sentences_per_sec: last.sentences as f64 / wall.max(f64::MIN_POSITIVE),
        p50_us: percentile(&latencies, 0.50),
        p95_us: percentile(&latencies, 0.95),
        p99_us: percentile(&latencies, 0.99),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::EngineConfig;
    use claimforge_core::synth::bench_corpus;

    #[test]
    fn percentiles_are_ordered() {
        let engine = EngineConfig::defaults().build().unwrap();
        let docs = bench_corpus(1200, 20, 5);
        let r = run_bench(&engine, &docs, 2).unwrap();
        assert_eq!(r.sentences_processed, 1200);
        assert!(r.throughput_sentences_per_sec > 0.0);
        assert!(r.p50_us <= r.p95_us && r.p95_us <= r.p99_us);
        assert_eq!(r.in_claim + r.out_of_claim + r.abstain, r.labeled_sentences);
    }

    #[test]
    fn empty_corpus_is_error() {
        let engine = EngineConfig::defaults().build().unwrap();
        assert!(run_bench(&engine, &[], 1).is_err());
    }

    #[test]
    fn percentile_ranks() {
        let v: Vec<u64> = (1..=100).map(|x| x * 1000).collect();
        assert_eq!(percentile(&v, 0.5), 50.0);
        assert_eq!(percentile(&v, 0.99), 99.0);
        assert_eq!(percentile(&[7000], 0.5), percentile(&[7000], 0.99));
    }
}

//! Per-document processing shared by the pipeline-style commands.

use std::collections::BTreeMap;

use claimforge_core::corpus::{Document, Sentence};
use claimforge_core::market::{events_from_documents, EventRecord, FirmQuarter};
use claimforge_core::sentiment::{
    aggregate_quarter, compute_optimism, subset_optimism, OptimismRecord, SentenceSubset, SentimentProvider,
};
use claimforge_core::textproc::FilterStats;
use claimforge_core::weaklabel::{aggregate, AnalyzedSentence, Prediction, Vote};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::Engine;
use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionRecord {
    pub doc_id: String,
    pub sentence_index: usize,
    pub label: Prediction,
    pub votes: Vec<Vote>,
}

/// One processed document: every sentence with its flags, plus the
/// predictions for the sentences that passed the filter.
#[derive(Debug, Clone)]
pub struct ProcessedDocument {
    pub sentences: Vec<Sentence>,
    pub predictions: Vec<PredictionRecord>,
    pub stats: FilterStats,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Segment,
    Filter,
    Label,
    Full,
}

pub fn pool(threads: usize) -> Result<rayon::ThreadPool, CliError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(CliError::internal)
}

pub fn process_document(engine: &Engine, doc: &Document, stage: Stage) -> ProcessedDocument {
    if stage == Stage::Segment {
        let sentences = engine.text.segmenter.segment(&doc.doc_id, &doc.raw_text);
        let stats = FilterStats::from_counts(sentences.len(), 0, 0);
        return ProcessedDocument {
            sentences,
            predictions: Vec::new(),
            stats,
        };
    }
    let mut sentences = engine.text.annotate(doc);
    let stats = claimforge_core::textproc::TextPipeline::stats(&sentences);
    let mut predictions = Vec::new();
    if stage != Stage::Filter {
        for s in sentences.iter_mut() {
            if !engine.text.selects(s) {
                continue;
            }
            let votes = engine.rules.votes(&AnalyzedSentence::new(&s.text));
            let label = aggregate(&votes, engine.aggregator).expect("rule sets are never empty");
            s.flags.claim = label.label();
            predictions.push(PredictionRecord {
                doc_id: s.doc_id.clone(),
                sentence_index: s.index,
                label,
                votes,
            });
        }
    }
    if stage == Stage::Full {
        for s in sentences.iter_mut() {
            s.flags.sentiment = Some(engine.lexicon.classify(&s.text));
        }
    }
    ProcessedDocument {
        sentences,
        predictions,
        stats,
    }
}

/// Processes documents on `engine.threads` workers; output order follows input order.
pub fn process_all(engine: &Engine, docs: &[Document], stage: Stage) -> Result<Vec<ProcessedDocument>, CliError> {
    if engine.threads <= 1 {
        return Ok(docs.iter().map(|d| process_document(engine, d, stage)).collect());
    }
    let pool = pool(engine.threads)?;
    Ok(pool.install(|| docs.par_iter().map(|d| process_document(engine, d, stage)).collect()))
}

pub fn total_stats(processed: &[ProcessedDocument]) -> FilterStats {
    processed
        .iter()
        .fold(FilterStats::default(), |acc, p| acc.merge(&p.stats))
}

/// Per-document optimism, per firm-quarter optimism, and the event dates.
#[derive(Debug, Clone, Default)]
pub struct OptimismTables {
    pub documents: Vec<OptimismRecord>,
    pub quarters: Vec<OptimismRecord>,
    pub events: Vec<EventRecord>,
    /// Firm-quarter optimism for each sentence subset.
    pub subsets: Vec<(SentenceSubset, OptimismRecord)>,
    /// Mean number of subset sentences per document.
    pub subset_sizes: Vec<(SentenceSubset, f64)>,
}

pub fn optimism_tables(docs: &[Document], processed: &[ProcessedDocument]) -> Result<OptimismTables, CliError> {
    let mut tables = OptimismTables::default();
    let mut by_quarter: BTreeMap<FirmQuarter, Vec<usize>> = BTreeMap::new();
    for (i, (doc, p)) in docs.iter().zip(processed).enumerate() {
        if p.sentences.is_empty() {
            continue;
        }
        let record = compute_optimism(&p.sentences).map_err(|e| CliError::from(e).context(&doc.doc_id))?;
        tables.documents.push(record);
        by_quarter
            .entry(FirmQuarter {
                ticker: doc.ticker.clone(),
                quarter: doc.quarter(),
            })
            .or_default()
            .push(i);
    }
    let doc_index: BTreeMap<&str, usize> = tables
        .documents
        .iter()
        .enumerate()
        .map(|(i, r)| (r.key.as_str(), i))
        .collect();
    for (key, members) in &by_quarter {
        let records: Vec<OptimismRecord> = members
            .iter()
            .map(|&i| tables.documents[doc_index[docs[i].doc_id.as_str()]].clone())
            .collect();
        tables.quarters.push(aggregate_quarter(key.to_string(), &records)?);
        for subset in SentenceSubset::ALL {
            let per_doc: Vec<OptimismRecord> = members
                .iter()
                .map(|&i| subset_optimism(&processed[i].sentences, subset))
                .collect::<Result<_, _>>()?;
            tables
                .subsets
                .push((subset, aggregate_quarter(key.to_string(), &per_doc)?));
        }
    }
    let n_docs = processed.iter().filter(|p| !p.sentences.is_empty()).count();
    for subset in SentenceSubset::ALL {
        let count: usize = processed
            .iter()
            .map(|p| p.sentences.iter().filter(|s| subset.contains(s)).count())
            .sum();
        let avg = if n_docs == 0 { 0.0 } else { count as f64 / n_docs as f64 };
        tables.subset_sizes.push((subset, avg));
    }
    tables.events = events_from_documents(
        docs.iter()
            .zip(processed)
            .filter(|(_, p)| !p.sentences.is_empty())
            .map(|(d, _)| (d.ticker.as_str(), d.period)),
    );
    Ok(tables)
}

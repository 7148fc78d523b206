//! Subcommand implementations. Each reads its inputs, runs the core
//! operations and writes its reports into the output directory.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};

use claimforge_core::corpus::{
    load_documents, load_eps, load_gold, load_index, load_labeled_sentences, load_prices, Document, DocumentFormat,
    LabeledSentence, Quarter, Sentence,
};
use claimforge_core::market::{
    backtest, car_outcomes, join_panel, load_events_csv, load_outcomes_csv, optimism_points, run_study,
    run_subset_study, surprise_outcomes, write_confusion_csv, write_outcomes_csv, write_regression_table,
    write_trades_csv, AdjustedBetaRecord, BacktestReport, MarketData, Outcome, OutcomeTable, StudyResult,
};
use claimforge_core::sentiment::{
    load_optimism_csv, load_sentiment_csv, merge_external_sentiment, write_optimism_csv, OptimismRecord,
    SentenceSubset, SentimentProvider,
};
use claimforge_core::synth::{backtest_universe, bench_corpus};
use claimforge_core::weaklabel::{
    ablate, evaluate, evaluate_keyed, label_sentence, Aggregator, ClaimLabel, EvalMetrics, Prediction,
};
use serde::{Deserialize, Serialize};

use crate::bench::{run_bench, LatencyReport};
use crate::config::Engine;
use crate::error::CliError;
use crate::output::OutDir;
use crate::pipeline::{optimism_tables, process_all, total_stats, OptimismTables, PredictionRecord, Stage};

fn read_docs(path: &Path, format: DocumentFormat) -> Result<Vec<Document>, CliError> {
    load_documents(path, format).map_err(|e| CliError::from(e).context(format!("loading {}", path.display())))
}

fn read_jsonl<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>, CliError> {
    let file =
        std::fs::File::open(path).map_err(|e| CliError::config(format!("cannot open {}: {e}", path.display())))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
        if line.trim().is_empty() {
            continue;
        }
        let row =
            serde_json::from_str(&line).map_err(|e| CliError::data(format!("{}:{}: {e}", path.display(), i + 1)))?;
        out.push(row);
    }
    Ok(out)
}

fn read_csv<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::config(format!("cannot open {}: {e}", path.display())))?;
    let mut out = Vec::new();
    for (i, row) in reader.deserialize().enumerate() {
        out.push(row.map_err(|e| CliError::data(format!("{}:{}: {e}", path.display(), i + 2)))?);
    }
    Ok(out)
}

fn f4(v: f64) -> String {
    format!("{v:.4}")
}

fn stats_table(report: &mut String, stats: &claimforge_core::textproc::FilterStats) {
    let _ = writeln!(report, "| stage | sentences | share of all |");
    let _ = writeln!(report, "|---|---:|---:|");
    let _ = writeln!(report, "| segmented | {} | 1.0000 |", stats.total_sentences);
    let _ = writeln!(
        report,
        "| numeric | {} | {} |",
        stats.numeric_sentences,
        f4(stats.retention_numeric)
    );
    let _ = writeln!(
        report,
        "| numeric + financial | {} | {} |",
        stats.numeric_financial_sentences,
        f4(stats.retention_financial)
    );
}

pub fn cmd_segment(
    engine: &Engine,
    documents: &Path,
    format: DocumentFormat,
    out: &mut OutDir,
) -> Result<(), CliError> {
    let docs = read_docs(documents, format)?;
    let processed = process_all(engine, &docs, Stage::Segment)?;
    out.jsonl("sentences.jsonl", processed.iter().flat_map(|p| &p.sentences))?;
    let n: usize = processed.iter().map(|p| p.sentences.len()).sum();
    out.text(
        "report.md",
        &format!("# Segmentation\n\n{} documents, {n} sentences.\n", docs.len()),
    )
}

pub fn cmd_filter(engine: &Engine, documents: &Path, format: DocumentFormat, out: &mut OutDir) -> Result<(), CliError> {
    let docs = read_docs(documents, format)?;
    let processed = process_all(engine, &docs, Stage::Filter)?;
    let kept = processed
        .iter()
        .flat_map(|p| p.sentences.iter().filter(|s| engine.text.selects(s)));
    out.jsonl("sentences.jsonl", kept)?;
    let stats = total_stats(&processed);
    out.json("filter_stats.json", &stats)?;
    let mut report = format!("# Filter\n\n{} documents.\n\n", docs.len());
    stats_table(&mut report, &stats);
    out.text("report.md", &report)
}

fn label_counts(predictions: &[&PredictionRecord]) -> (usize, usize, usize) {
    let count = |p: Prediction| predictions.iter().filter(|r| r.label == p).count();
    (
        count(Prediction::InClaim),
        count(Prediction::OutOfClaim),
        count(Prediction::Abstain),
    )
}

pub fn cmd_label(engine: &Engine, documents: &Path, format: DocumentFormat, out: &mut OutDir) -> Result<(), CliError> {
    let docs = read_docs(documents, format)?;
    let processed = process_all(engine, &docs, Stage::Label)?;
    let predictions: Vec<&PredictionRecord> = processed.iter().flat_map(|p| &p.predictions).collect();
    out.jsonl("predictions.jsonl", &predictions)?;
    out.jsonl("sentences.jsonl", processed.iter().flat_map(|p| &p.sentences))?;
    let (i, o, a) = label_counts(&predictions);
    out.text(
        "report.md",
        &format!(
            "# Labels\n\nAggregator: {}\n\n| label | sentences |\n|---|---:|\n| INCLAIM | {i} |\n| OUTOFCLAIM | {o} |\n| ABSTAIN | {a} |\n",
            engine.aggregator
        ),
    )
}

#[derive(Debug, Serialize, Deserialize)]
struct SubsetOptimismRow {
    key: String,
    subset: SentenceSubset,
    pos: usize,
    neg: usize,
    total_sentences: usize,
    optimism: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct SubsetSizeRow {
    subset: SentenceSubset,
    avg_sentences: f64,
}

fn write_optimism_outputs(tables: &OptimismTables, out: &mut OutDir) -> Result<(), CliError> {
    out.write_with("doc_optimism.csv", |w| write_optimism_csv(&tables.documents, w))?;
    out.write_with("optimism.csv", |w| write_optimism_csv(&tables.quarters, w))?;
    out.write_with("events.csv", |w| {
        claimforge_core::market::write_events_csv(&tables.events, w)
    })?;
    out.csv(
        "subset_optimism.csv",
        tables.subsets.iter().map(|(subset, r)| SubsetOptimismRow {
            key: r.key.clone(),
            subset: *subset,
            pos: r.pos_in_claim,
            neg: r.neg_in_claim,
            total_sentences: r.total_sentences,
            optimism: r.optimism,
        }),
    )?;
    out.csv(
        "subset_sizes.csv",
        tables.subset_sizes.iter().map(|(subset, avg)| SubsetSizeRow {
            subset: *subset,
            avg_sentences: *avg,
        }),
    )
}

fn apply_external_sentiment(
    sentences: &mut [Sentence],
    sentiment: Option<&Path>,
    default_neutral: bool,
) -> Result<(), CliError> {
    if let Some(path) = sentiment {
        let labels = load_sentiment_csv(path)?;
        for s in sentences.iter_mut() {
            s.flags.sentiment = None;
        }
        merge_external_sentiment(sentences, &labels, default_neutral)?;
    }
    Ok(())
}

pub struct PipelineArgs<'a> {
    pub documents: &'a Path,
    pub format: DocumentFormat,
    pub sentiment: Option<&'a Path>,
    pub default_neutral: bool,
}

pub fn cmd_pipeline(engine: &Engine, args: PipelineArgs<'_>, out: &mut OutDir) -> Result<(), CliError> {
    let docs = read_docs(args.documents, args.format)?;
    let mut processed = process_all(engine, &docs, Stage::Full)?;
    if args.sentiment.is_some() {
        let mut all: Vec<Sentence> = processed.iter_mut().flat_map(|p| p.sentences.drain(..)).collect();
        apply_external_sentiment(&mut all, args.sentiment, args.default_neutral)?;
        let mut iter = all.into_iter();
        for (p, doc) in processed.iter_mut().zip(&docs) {
            while let Some(s) = iter.as_slice().first() {
                if s.doc_id != doc.doc_id {
                    break;
                }
                p.sentences.push(iter.next().expect("peeked"));
            }
        }
    }
    let tables = optimism_tables(&docs, &processed)?;
    let predictions: Vec<&PredictionRecord> = processed.iter().flat_map(|p| &p.predictions).collect();
    out.jsonl("sentences.jsonl", processed.iter().flat_map(|p| &p.sentences))?;
    out.jsonl("predictions.jsonl", &predictions)?;
    let stats = total_stats(&processed);
    out.json("filter_stats.json", &stats)?;
    write_optimism_outputs(&tables, out)?;

    let (i, o, a) = label_counts(&predictions);
    let mut report = format!(
        "# Pipeline\n\n{} documents, {} firm-quarters. Aggregator: {}.\n\n## Filter\n\n",
        docs.len(),
        tables.quarters.len(),
        engine.aggregator
    );
    stats_table(&mut report, &stats);
    let _ = writeln!(
        report,
        "\n## Claims\n\n| label | sentences |\n|---|---:|\n| INCLAIM | {i} |\n| OUTOFCLAIM | {o} |\n| ABSTAIN | {a} |"
    );
    let _ = writeln!(
        report,
        "\n## Subset sizes\n\n| subset | mean sentences per document |\n|---|---:|"
    );
    for (subset, avg) in &tables.subset_sizes {
        let _ = writeln!(report, "| {} | {} |", subset.name(), f4(*avg));
    }
    out.text("report.md", &report)
}

pub fn cmd_optimism(
    engine: &Engine,
    documents: &Path,
    format: DocumentFormat,
    sentences: &Path,
    sentiment: Option<&Path>,
    default_neutral: bool,
    out: &mut OutDir,
) -> Result<(), CliError> {
    let docs = read_docs(documents, format)?;
    let mut all: Vec<Sentence> = read_jsonl(sentences)?;
    apply_external_sentiment(&mut all, sentiment, default_neutral)?;
    for s in all.iter_mut().filter(|s| s.flags.sentiment.is_none()) {
        s.flags.sentiment = Some(engine.lexicon.classify(&s.text));
    }
    let mut by_doc: HashMap<String, Vec<Sentence>> = HashMap::new();
    for s in all {
        by_doc.entry(s.doc_id.clone()).or_default().push(s);
    }
    let known: BTreeSet<&str> = docs.iter().map(|d| d.doc_id.as_str()).collect();
    if let Some(alien) = by_doc.keys().find(|k| !known.contains(k.as_str())) {
        return Err(CliError::data(format!(
            "sentence file mentions unknown document {alien}"
        )));
    }
    let processed: Vec<crate::pipeline::ProcessedDocument> = docs
        .iter()
        .map(|d| {
            let mut sentences = by_doc.remove(&d.doc_id).unwrap_or_default();
            sentences.sort_by_key(|s| s.index);
            crate::pipeline::ProcessedDocument {
                stats: claimforge_core::textproc::TextPipeline::stats(&sentences),
                sentences,
                predictions: Vec::new(),
            }
        })
        .collect();
    let tables = optimism_tables(&docs, &processed)?;
    write_optimism_outputs(&tables, out)?;
    let mut report = String::from(
        "# Optimism\n\n| firm-quarter | optimism | in-claim positive | in-claim negative | sentences |\n|---|---:|---:|---:|---:|\n",
    );
    for r in &tables.quarters {
        let _ = writeln!(
            report,
            "| {} | {} | {} | {} | {} |",
            r.key,
            f4(r.optimism),
            r.pos_in_claim,
            r.neg_in_claim,
            r.total_sentences
        );
    }
    out.text("report.md", &report)
}

#[derive(Debug, Serialize)]
struct MetricsRow<'a> {
    aggregator: &'a str,
    precision: f64,
    recall: f64,
    f1: f64,
    accuracy: f64,
    tp: usize,
    fp: usize,
    #[serde(rename = "fn")]
    fn_: usize,
    tn: usize,
}

fn metrics_report(rows: &[(String, EvalMetrics)]) -> String {
    let mut report = String::from(
        "# Evaluation\n\nPositive class: INCLAIM. Abstentions count as wrong for both classes.\n\n| aggregator | precision | recall | F1 | accuracy | TP | FP | FN | TN |\n|---|---:|---:|---:|---:|---:|---:|---:|---:|\n",
    );
    for (name, m) in rows {
        let _ = writeln!(
            report,
            "| {name} | {} | {} | {} | {} | {} | {} | {} | {} |",
            f4(m.precision),
            f4(m.recall),
            f4(m.f1),
            f4(m.accuracy),
            m.tp,
            m.fp,
            m.fn_,
            m.tn
        );
    }
    report
}

pub fn cmd_evaluate(
    engine: &Engine,
    predictions: Option<&Path>,
    gold: Option<&Path>,
    gold_sentences: Option<&Path>,
    out: &mut OutDir,
) -> Result<(), CliError> {
    let rows: Vec<(String, EvalMetrics)> = match (predictions, gold, gold_sentences) {
        (Some(p), Some(g), None) => {
            let preds: Vec<PredictionRecord> = read_jsonl(p)?;
            let mut map = HashMap::new();
            for r in preds {
                if map.insert((r.doc_id.clone(), r.sentence_index), r.label).is_some() {
                    return Err(CliError::data(format!(
                        "duplicate prediction {}#{}",
                        r.doc_id, r.sentence_index
                    )));
                }
            }
            let gold = load_gold(g)?;
            vec![("predictions".to_string(), evaluate_keyed(&map, &gold)?)]
        }
        (None, None, Some(path)) => {
            let gold = load_labeled_sentences(path)?;
            [Aggregator::Sme, Aggregator::Majority]
                .into_iter()
                .map(|agg| {
                    let m = evaluate(
                        gold.iter()
                            .map(|g| (label_sentence(&g.text, &engine.rules, agg).prediction, g.label)),
                    );
                    (agg.to_string(), m)
                })
                .collect()
        }
        _ => {
            return Err(CliError::config(
                "evaluate needs either --predictions with --gold, or --gold-sentences",
            ))
        }
    };
    out.csv(
        "metrics.csv",
        rows.iter().map(|(name, m)| MetricsRow {
            aggregator: name,
            precision: m.precision,
            recall: m.recall,
            f1: m.f1,
            accuracy: m.accuracy,
            tp: m.tp,
            fp: m.fp,
            fn_: m.fn_,
            tn: m.tn,
        }),
    )?;
    out.text("report.md", &metrics_report(&rows))
}

fn gold_from_documents(
    engine: &Engine,
    documents: &Path,
    format: DocumentFormat,
    gold: &Path,
) -> Result<Vec<LabeledSentence>, CliError> {
    let docs = read_docs(documents, format)?;
    let labels = load_gold(gold)?;
    let processed = process_all(engine, &docs, Stage::Segment)?;
    let mut texts: HashMap<(&str, usize), &str> = HashMap::new();
    for p in &processed {
        for s in &p.sentences {
            texts.insert((s.doc_id.as_str(), s.index), s.text.as_str());
        }
    }
    labels
        .iter()
        .map(|g| {
            texts
                .get(&(g.doc_id.as_str(), g.sentence_index))
                .map(|t| LabeledSentence {
                    label: g.label,
                    text: t.to_string(),
                })
                .ok_or_else(|| {
                    CliError::data(format!(
                        "gold label for missing sentence {}#{}",
                        g.doc_id, g.sentence_index
                    ))
                })
        })
        .collect()
}

pub struct GoldSource<'a> {
    pub gold_sentences: Option<&'a Path>,
    pub documents: Option<&'a Path>,
    pub format: DocumentFormat,
    pub gold: Option<&'a Path>,
}

pub fn cmd_ablate(engine: &Engine, source: GoldSource<'_>, out: &mut OutDir) -> Result<(), CliError> {
    let gold = match (source.gold_sentences, source.documents, source.gold) {
        (Some(path), None, None) => load_labeled_sentences(path)?,
        (None, Some(docs), Some(gold)) => gold_from_documents(engine, docs, source.format, gold)?,
        _ => {
            return Err(CliError::config(
                "ablate needs either --gold-sentences, or --documents with --gold",
            ))
        }
    };
    let pairs: Vec<(String, ClaimLabel)> = gold.into_iter().map(|g| (g.text, g.label)).collect();
    let curve = ablate(&engine.rules, &pairs)?;
    out.csv("ablation.csv", &curve)?;
    let mut report = format!(
        "# Labeling-function ablation\n\n{} gold sentences; out-of-claim rules always active.\n\n| k | added rule | accuracy |\n|---:|---|---:|\n",
        pairs.len()
    );
    for s in &curve {
        let _ = writeln!(report, "| {} | {} | {} |", s.k, s.rule_id, f4(s.accuracy));
    }
    out.text("report.md", &report)
}

/// Market inputs shared by study and backtest.
#[derive(Debug, Default, Clone)]
pub struct MarketInputs {
    pub eps: Option<PathBuf>,
    pub prices: Option<PathBuf>,
    pub index: Option<PathBuf>,
    pub events: Option<PathBuf>,
}

struct OutcomeSet {
    tables: Vec<(Outcome, OutcomeTable)>,
    warnings: Vec<String>,
}

fn outcome_tables(inputs: &MarketInputs, wanted: &[Outcome]) -> Result<OutcomeSet, CliError> {
    let mut tables = Vec::new();
    let mut warnings = Vec::new();
    let market = match (&inputs.prices, &inputs.index, &inputs.events) {
        (Some(p), Some(i), Some(e)) => Some((MarketData::new(&load_prices(p)?, &load_index(i)?), load_events_csv(e)?)),
        (None, None, None) => None,
        _ => {
            return Err(CliError::config(
                "--prices, --index and --events must be given together",
            ))
        }
    };
    for &outcome in wanted {
        match outcome.window() {
            None => {
                if let Some(path) = &inputs.eps {
                    tables.push((outcome, surprise_outcomes(&load_eps(path)?)?));
                }
            }
            Some(window) => {
                if let Some((data, events)) = &market {
                    let (table, skipped) = car_outcomes(data, events, window)?;
                    for (key, err) in skipped {
                        log::warn!("{outcome} {key}: {err}");
                        warnings.push(format!("{outcome} {key}: {err}"));
                    }
                    tables.push((outcome, table));
                }
            }
        }
    }
    Ok(OutcomeSet { tables, warnings })
}

fn subset_records(path: &Path) -> Result<Vec<(SentenceSubset, OptimismRecord)>, CliError> {
    let rows: Vec<SubsetOptimismRow> = read_csv(path)?;
    rows.into_iter()
        .map(|r| {
            let rec = OptimismRecord::from_counts(r.key, r.pos, r.neg, r.total_sentences)?;
            Ok((r.subset, rec))
        })
        .collect()
}

pub struct StudyArgs<'a> {
    pub optimism: &'a Path,
    pub market: MarketInputs,
    pub subset_optimism: Option<&'a Path>,
    pub subset_sizes: Option<&'a Path>,
}

pub fn cmd_study(args: StudyArgs<'_>, out: &mut OutDir) -> Result<(), CliError> {
    let optimism = load_optimism_csv(args.optimism)?;
    let outcomes = outcome_tables(&args.market, &Outcome::ALL)?;
    if outcomes.tables.is_empty() {
        return Err(CliError::config(
            "study needs --eps and/or --prices, --index and --events",
        ));
    }
    let mut results: Vec<StudyResult> = Vec::new();
    for (outcome, table) in &outcomes.tables {
        let rows = join_panel(&optimism, table)?;
        results.push(run_study(&rows, *outcome).map_err(|e| CliError::from(e).context(outcome))?);
    }
    out.write_with("regression_table.csv", |w| write_regression_table(&results, w))?;

    let mut adjusted: Vec<AdjustedBetaRecord> = Vec::new();
    match (args.subset_optimism, args.subset_sizes) {
        (Some(so), Some(ss)) => {
            let records = subset_records(so)?;
            let sizes: HashMap<SentenceSubset, f64> = read_csv::<SubsetSizeRow>(ss)?
                .into_iter()
                .map(|r| (r.subset, r.avg_sentences))
                .collect();
            for subset in SentenceSubset::ALL {
                let recs: Vec<OptimismRecord> = records
                    .iter()
                    .filter(|(s, _)| *s == subset)
                    .map(|(_, r)| r.clone())
                    .collect();
                if recs.is_empty() {
                    continue;
                }
                let avg = *sizes
                    .get(&subset)
                    .ok_or_else(|| CliError::data(format!("no average size for subset {}", subset.name())))?;
                for (outcome, table) in &outcomes.tables {
                    let rows = join_panel(&recs, table)?;
                    let rec = run_subset_study(&rows, *outcome, subset, avg)
                        .map_err(|e| CliError::from(e).context(format!("{} / {outcome}", subset.name())))?;
                    adjusted.push(rec);
                }
            }
            out.csv("adjusted_betas.csv", &adjusted)?;
        }
        (None, None) => {}
        _ => {
            return Err(CliError::config(
                "--subset-optimism and --subset-sizes must be given together",
            ))
        }
    }

    let mut report = String::from(
        "# Optimism regressions\n\n`Y = alpha + beta * Optimism + e`, homoskedastic standard errors.\nStars: * p<0.10, ** p<0.05, *** p<0.01.\n\n| outcome | alpha | beta | se(beta) | t(beta) | p(beta) | n | R² |\n|---|---:|---:|---:|---:|---:|---:|---:|\n",
    );
    for r in &results {
        let g = &r.regression;
        let _ = writeln!(
            report,
            "| {} | {}{} | {}{} | {} | {} | {} | {} | {} |",
            r.outcome,
            f4(g.alpha),
            g.stars_alpha,
            f4(g.beta),
            g.stars_beta,
            f4(g.se_beta),
            f4(g.t_beta),
            f4(g.p_beta),
            g.n,
            f4(g.r_squared)
        );
    }
    if !adjusted.is_empty() {
        let _ = writeln!(
            report,
            "\n## Standardized subset optimism\n\nAdjusted beta multiplies the raw beta by the subset's mean sentence count; the per-sentence column divides instead.\n\n| subset | outcome | mean sentences | beta | adjusted beta | per-sentence beta | p | n |\n|---|---|---:|---:|---:|---:|---:|---:|"
        );
        for a in &adjusted {
            let _ = writeln!(
                report,
                "| {} | {} | {} | {}{} | {} | {} | {} | {} |",
                a.subset.name(),
                a.outcome,
                f4(a.avg_sentences),
                f4(a.beta_raw),
                a.stars,
                f4(a.beta_adjusted),
                f4(a.beta_per_sentence),
                f4(a.p_beta),
                a.n
            );
        }
    }
    if !outcomes.warnings.is_empty() {
        let _ = writeln!(report, "\n## Skipped events\n");
        for w in &outcomes.warnings {
            let _ = writeln!(report, "- {w}");
        }
    }
    out.text("report.md", &report)
}

/// `2019Q1..2019Q4` (inclusive) or a comma-separated list of quarters.
pub fn parse_quarters(text: &str) -> Result<BTreeSet<Quarter>, CliError> {
    let bad = |e: claimforge_core::Error| CliError::config(format!("bad quarter list {text:?}: {e}"));
    if let Some((a, b)) = text.split_once("..") {
        let start: Quarter = a.trim().parse().map_err(bad)?;
        let end: Quarter = b.trim().parse().map_err(bad)?;
        if end < start {
            return Err(CliError::config(format!("quarter range {text:?} runs backwards")));
        }
        let mut out = BTreeSet::new();
        let mut q = start;
        while q <= end {
            out.insert(q);
            q = if q.quarter == 4 {
                Quarter {
                    year: q.year + 1,
                    quarter: 1,
                }
            } else {
                Quarter {
                    year: q.year,
                    quarter: q.quarter + 1,
                }
            };
        }
        return Ok(out);
    }
    text.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.trim().parse::<Quarter>().map_err(bad))
        .collect()
}

pub struct BacktestArgs<'a> {
    pub optimism: Option<&'a Path>,
    pub outcomes: Option<&'a Path>,
    pub market: MarketInputs,
    pub outcome: Outcome,
    pub train: Option<&'a str>,
    pub test: Option<&'a str>,
    pub synthetic: bool,
    pub firms: usize,
    pub train_quarters: usize,
    pub test_quarters: usize,
    pub flip_prob: f64,
}

pub fn cmd_backtest(engine: &Engine, args: BacktestArgs<'_>, out: &mut OutDir) -> Result<(), CliError> {
    let (optimism, outcomes, train, test, warnings) = if args.synthetic {
        let u = backtest_universe(
            args.firms,
            args.train_quarters,
            args.test_quarters,
            args.flip_prob,
            engine.seed,
        )?;
        out.write_with("optimism.csv", |w| write_optimism_csv(&u.optimism, w))?;
        out.write_with("outcomes.csv", |w| write_outcomes_csv(&u.outcomes, w))?;
        (u.optimism, u.outcomes, u.train, u.test, Vec::new())
    } else {
        let optimism_path = args
            .optimism
            .ok_or_else(|| CliError::config("backtest needs --optimism (or --synthetic)"))?;
        let optimism = load_optimism_csv(optimism_path)?;
        let train = parse_quarters(args.train.ok_or_else(|| CliError::config("backtest needs --train"))?)?;
        let test = parse_quarters(args.test.ok_or_else(|| CliError::config("backtest needs --test"))?)?;
        let (outcomes, warnings) = match args.outcomes {
            Some(path) => (load_outcomes_csv(path)?, Vec::new()),
            None => {
                let mut set = outcome_tables(&args.market, &[args.outcome])?;
                let table = set.tables.pop().map(|(_, t)| t).ok_or_else(|| {
                    CliError::config("backtest needs --outcomes, --eps, or --prices/--index/--events")
                })?;
                (table, set.warnings)
            }
        };
        (optimism, outcomes, train, test, warnings)
    };
    let points = optimism_points(&optimism)?;
    let report: BacktestReport = backtest(&points, &outcomes, &train, &test)?;
    for w in &report.warnings {
        log::warn!("{w}");
    }
    out.write_with("trades.csv", |w| write_trades_csv(&report.trades, w))?;
    out.write_with("confusion.csv", |w| write_confusion_csv(&report.confusion, w))?;

    let m = &report.confusion;
    let mut md = format!(
        "# Adjusted-optimism backtest\n\nTraining periods: {}. Test periods: {}.\nShort when optimism is above the firm's training mean, long when below.\n\n",
        train.iter().map(|q| q.to_string()).collect::<Vec<_>>().join(", "),
        test.iter().map(|q| q.to_string()).collect::<Vec<_>>().join(", "),
    );
    if m.is_empty() {
        md.push_str("No trades were executed; the confusion matrix is empty.\n");
    } else {
        let total = m.total_percentages().expect("non-empty");
        let row = m.row_percentages();
        let _ = writeln!(
            md,
            "Trades: {}. Accuracy: {}.\n\n| direction | outcome down | outcome up | down % of all | up % of all | down % of row | up % of row |\n|---|---:|---:|---:|---:|---:|---:|",
            m.trades(),
            f4(m.accuracy().expect("non-empty"))
        );
        let cells = [[m.short_down, m.short_up], [m.long_down, m.long_up]];
        for (i, name) in ["short", "long"].iter().enumerate() {
            let _ = writeln!(
                md,
                "| {name} | {} | {} | {:.2} | {:.2} | {:.2} | {:.2} |",
                cells[i][0], cells[i][1], total[i][0], total[i][1], row[i][0], row[i][1]
            );
        }
    }
    let skipped: Vec<&String> = warnings.iter().chain(&report.warnings).collect();
    if !skipped.is_empty() {
        let _ = writeln!(md, "\n## Skipped\n");
        for w in skipped {
            let _ = writeln!(md, "- {w}");
        }
    }
    out.text("report.md", &md)
}

pub fn cmd_bench(
    engine: &Engine,
    documents: Option<&Path>,
    format: DocumentFormat,
    synthetic: Option<usize>,
    repetitions: usize,
    out: &mut OutDir,
) -> Result<LatencyReport, CliError> {
    let docs = match (documents, synthetic) {
        (Some(path), None) => read_docs(path, format)?,
        (None, Some(n)) => {
            if n < 1000 {
                return Err(CliError::config("synthetic bench corpus needs at least 1000 sentences"));
            }
            bench_corpus(n, 25, engine.seed)
        }
        _ => {
            return Err(CliError::config(
                "bench needs exactly one of --documents or --synthetic",
            ))
        }
    };
    let report = run_bench(engine, &docs, repetitions)?;
    out.json("latency.json", &report)?;
    out.text(
        "report.md",
        &format!(
            "# Latency\n\nSingle-threaded segmentation, filtering and labeling; one warm-up pass, median of {} timed passes.\n\n| metric | value |\n|---|---:|\n| sentences | {} |\n| labeled | {} |\n| wall time (s) | {:.4} |\n| throughput (sentences/s) | {:.0} |\n| p50 (µs) | {:.2} |\n| p95 (µs) | {:.2} |\n| p99 (µs) | {:.2} |\n",
            report.repetitions,
            report.sentences_processed,
            report.labeled_sentences,
            report.wall_time_secs,
            report.throughput_sentences_per_sec,
            report.p50_us,
            report.p95_us,
            report.p99_us
        ),
    )?;
    Ok(report)
}

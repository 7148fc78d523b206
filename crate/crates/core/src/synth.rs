//! Seeded generators for synthetic corpora, regression panels and trading universes.
//!
//! Everything here is a deterministic function of its arguments and seed.

use std::collections::BTreeSet;

use chrono::NaiveDate;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::corpus::{Document, Quarter, Sector, SourceKind, TermSet};
use crate::error::{Error, Result};
use crate::market::{FirmQuarter, OutcomeTable};
use crate::sentiment::OptimismRecord;
use crate::textproc::FilterStats;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Financial vocabulary matched by the numeric-financial templates and by none
/// of the other templates.
pub const SYNTHETIC_DICTIONARY: &[&str] = &[
    "revenue",
    "operating income",
    "gross margin",
    "cash flow",
    "dividend",
    "capital",
];

const REGIONS: &[&str] = &[
    "Europe",
    "Asia",
    "Canada",
    "Brazil",
    "Mexico",
    "Japan",
    "Germany",
    "Australia",
];
const TOPICS: &[&str] = &[
    "hiring",
    "product design",
    "customer service",
    "our stores",
    "logistics",
    "research",
];

const PLAIN: &[&str] = &[
    "The team discussed progress on {topic} with partners in {region}.",
    "We remain focused on execution across {region}.",
    "Our team grew to {n} people in {region} this year.",
    "Thank you all for joining the call today.",
    "Customers in {region} responded well to the new lineup.",
    "We opened {n} locations and hired staff for {topic}.",
];

const NUMERIC_OTHER: &[&str] = &[
    "Employee engagement in {region} rose to {p}% this year.",
    "Roughly {p}% of staff now work on {topic}.",
    "We donated ${n} thousand to schools in {region}.",
    "Survey response rates reached {p}% across {region}.",
];

const NUMERIC_FINANCIAL: &[&str] = &[
    "We expect revenue of ${n} million in {region}.",
    "Operating income was ${n} million for the period.",
    "Gross margin improved to {p}% in {region}.",
    "We anticipate free cash flow of ${n} million next year.",
    "The board raised the dividend by {p}% this period.",
    "We plan to return ${n} million of capital to shareholders.",
];

fn fill(rng: &mut ChaCha8Rng, template: &str) -> String {
    let mut out = template.to_string();
    if out.contains("{region}") {
        out = out.replace("{region}", REGIONS[rng.random_range(0..REGIONS.len())]);
    }
    if out.contains("{topic}") {
        out = out.replace("{topic}", TOPICS[rng.random_range(0..TOPICS.len())]);
    }
    if out.contains("{n}") {
        out = out.replace("{n}", &rng.random_range(2..=950).to_string());
    }
    if out.contains("{p}") {
        let p = rng.random_range(10..=990) as f64 / 10.0;
        out = out.replace("{p}", &format!("{p}"));
    }
    out
}

/// A generated corpus whose filter counts are known by construction.
#[derive(Debug, Clone)]
pub struct SyntheticCorpus {
    pub documents: Vec<Document>,
    pub dictionary: TermSet,
    pub expected: FilterStats,
}

fn document(doc_id: String, ticker: String, period: NaiveDate, text: String) -> Document {
    Document {
        doc_id,
        source_kind: SourceKind::EarningsCall,
        ticker,
        sector: Sector::Unknown,
        period,
        raw_text: text,
    }
}

/// `total` sentences of which `numeric` contain a number pattern and
/// `numeric_financial` of those also mention a dictionary term.
pub fn filter_corpus(
    total: usize,
    numeric: usize,
    numeric_financial: usize,
    sentences_per_doc: usize,
    seed: u64,
) -> Result<SyntheticCorpus> {
    if numeric > total || numeric_financial > numeric || sentences_per_doc == 0 {
        return Err(Error::invalid(
            "synthetic composition",
            format!("total {total}, numeric {numeric}, financial {numeric_financial}, per doc {sentences_per_doc}"),
        ));
    }
    let mut rng = rng(seed);
    let mut kinds: Vec<u8> = Vec::with_capacity(total);
    kinds.extend(std::iter::repeat_n(2, numeric_financial));
    kinds.extend(std::iter::repeat_n(1, numeric - numeric_financial));
    kinds.extend(std::iter::repeat_n(0, total - numeric));
    kinds.shuffle(&mut rng);

    let sentences: Vec<String> = kinds
        .iter()
        .map(|kind| {
            let pool = match kind {
                0 => PLAIN,
                1 => NUMERIC_OTHER,
                _ => NUMERIC_FINANCIAL,
            };
            let template = pool[rng.random_range(0..pool.len())];
            fill(&mut rng, template)
        })
        .collect();
    let base = NaiveDate::from_ymd_opt(2020, 1, 15).expect("valid date");
    let documents = sentences
        .chunks(sentences_per_doc)
        .enumerate()
        .map(|(i, chunk)| {
            document(
                format!("syn{i:06}"),
                format!("F{:03}", i % 50),
                base + chrono::Days::new((i % 300) as u64),
                chunk.join(" "),
            )
        })
        .collect();
    Ok(SyntheticCorpus {
        documents,
        dictionary: TermSet::new(SYNTHETIC_DICTIONARY.iter().copied())?,
        expected: FilterStats::from_counts(total, numeric, numeric_financial),
    })
}

const BENCH_SENTENCES: &[&str] = &[
    "We expect revenue growth to be in the range of {p}% to {p}% year on year.",
    "Consolidated total capital was ${n} billion for the quarter.",
    "We are now factoring in an incremental fx headwind of ${n} million across q3 and q4 revenue.",
    "Net sales were ${n} million, an increase of {p}% compared with last year.",
    "We anticipate strong demand and project margins of about {p}% next year.",
    "Management is likely to raise the dividend by {p}% in the coming year.",
    "Operating expenses declined {p}% due to weak volumes in {region}.",
    "The company recorded a loss of ${n} million on the sale of its unit.",
    "Our guidance implies earnings per share of ${n} for the full year.",
    "We remain on track to deliver cost savings of ${n} million by year end.",
    "The team discussed progress on {topic} with partners in {region}.",
    "Thank you all for joining the call today.",
    "Free cash flow is forecast to improve to ${n} million despite headwinds.",
    "Gross margin was {p}% compared with {p}% a year ago.",
];

/// Earnings-call style documents totalling exactly `sentences` sentences.
pub fn bench_corpus(sentences: usize, sentences_per_doc: usize, seed: u64) -> Vec<Document> {
    let mut rng = rng(seed);
    let per_doc = sentences_per_doc.max(1);
    let base = NaiveDate::from_ymd_opt(2019, 1, 10).expect("valid date");
    let texts: Vec<String> = (0..sentences)
        .map(|_| {
            let template = BENCH_SENTENCES[rng.random_range(0..BENCH_SENTENCES.len())];
            fill(&mut rng, template)
        })
        .collect();
    texts
        .chunks(per_doc)
        .enumerate()
        .map(|(i, chunk)| {
            document(
                format!("bench{i:07}"),
                format!("B{:03}", i % 200),
                base + chrono::Days::new((i % 700) as u64),
                chunk.join(" "),
            )
        })
        .collect()
}

/// `n` draws of `y = alpha + beta * x + e` with `x ~ N(0, 1)` and `e ~ N(0, sigma)`.
pub fn linear_panel(n: usize, alpha: f64, beta: f64, sigma: f64, seed: u64) -> Result<(Vec<f64>, Vec<f64>)> {
    let noise = Normal::new(0.0, sigma).map_err(|e| Error::invalid("noise sigma", e.to_string()))?;
    let regressor = Normal::new(0.0, 1.0).expect("unit normal");
    let mut rng = rng(seed);
    let mut x = Vec::with_capacity(n);
    let mut y = Vec::with_capacity(n);
    for _ in 0..n {
        let xi = regressor.sample(&mut rng);
        x.push(xi);
        y.push(alpha + beta * xi + noise.sample(&mut rng));
    }
    Ok((y, x))
}

/// Firm-quarter optimism and outcomes where each test trade succeeds with
/// probability `1 - flip_prob`.
#[derive(Debug, Clone)]
pub struct SyntheticUniverse {
    pub optimism: Vec<OptimismRecord>,
    pub outcomes: OutcomeTable,
    pub train: BTreeSet<Quarter>,
    pub test: BTreeSet<Quarter>,
}

fn quarter_seq(start: Quarter, k: usize) -> Quarter {
    let idx = start.year as i64 * 4 + (start.quarter as i64 - 1) + k as i64;
    Quarter {
        year: (idx / 4) as i32,
        quarter: (idx % 4 + 1) as u8,
    }
}

fn counts_record(key: String, optimism: i64) -> Result<OptimismRecord> {
    // total 100 so optimism equals pos - neg exactly
    let pos = 20 + optimism.max(0) as usize;
    let neg = 20 + (-optimism).max(0) as usize;
    OptimismRecord::from_counts(key, pos, neg, 100)
}

pub fn backtest_universe(
    firms: usize,
    train_quarters: usize,
    test_quarters: usize,
    flip_prob: f64,
    seed: u64,
) -> Result<SyntheticUniverse> {
    if !(0.0..=1.0).contains(&flip_prob) {
        return Err(Error::invalid(
            "flip probability",
            format!("{flip_prob} outside [0, 1]"),
        ));
    }
    if train_quarters == 0 || test_quarters == 0 {
        return Err(Error::invalid(
            "synthetic universe",
            "need at least one train and one test quarter",
        ));
    }
    let mut rng = rng(seed);
    let start = Quarter { year: 2010, quarter: 1 };
    let train: BTreeSet<Quarter> = (0..train_quarters).map(|k| quarter_seq(start, k)).collect();
    let test: BTreeSet<Quarter> = (0..test_quarters)
        .map(|k| quarter_seq(start, train_quarters + k))
        .collect();

    let mut optimism = Vec::with_capacity(firms * (train_quarters + test_quarters));
    let mut outcomes = OutcomeTable::new();
    for f in 0..firms {
        let ticker = format!("S{f:05}");
        let mut sum = 0i64;
        for q in &train {
            let v = rng.random_range(-20..=40);
            sum += v;
            optimism.push(counts_record(format!("{ticker}:{q}"), v)?);
        }
        let mean = sum as f64 / train_quarters as f64;
        for q in &test {
            let step = rng.random_range(1..=20i64);
            let sign = if rng.random_bool(0.5) { 1 } else { -1 };
            let v = mean.round() as i64 + sign * step;
            let adjusted = v as f64 - mean;
            let magnitude = rng.random_range(0.001..0.1);
            let mut outcome = -adjusted.signum() * magnitude;
            if rng.random_bool(flip_prob) {
                outcome = -outcome;
            }
            optimism.push(counts_record(format!("{ticker}:{q}"), v)?);
            outcomes.insert(
                FirmQuarter {
                    ticker: ticker.clone(),
                    quarter: *q,
                },
                outcome,
            );
        }
    }
    Ok(SyntheticUniverse {
        optimism,
        outcomes,
        train,
        test,
    })
}

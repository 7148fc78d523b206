//! Document, dictionary, gold-label and market-data ingestion.
//!
//! Every loader validates the records it reads and returns them in a
//! canonical order, so shuffled inputs produce identical collections.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::str::FromStr;

use chrono::{Datelike, NaiveDate};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::sentiment::SentimentLabel;
use crate::weaklabel::ClaimLabel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SourceKind {
    AnalystReport,
    #[default]
    EarningsCall,
}

/// GSECTOR code (1 through 12) or unknown.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub enum Sector {
    Known(u8),
    #[default]
    Unknown,
}

impl Sector {
    pub fn new(code: i64) -> Result<Self> {
        if (1..=12).contains(&code) {
            Ok(Sector::Known(code as u8))
        } else {
            Err(Error::invalid("sector", format!("{code} is outside 1..=12")))
        }
    }
}

impl fmt::Display for Sector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sector::Known(code) => write!(f, "{code}"),
            Sector::Unknown => f.write_str("unknown"),
        }
    }
}

impl Serialize for Sector {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Sector::Known(code) => serializer.serialize_u8(*code),
            Sector::Unknown => serializer.serialize_str("unknown"),
        }
    }
}

impl<'de> Deserialize<'de> for Sector {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Code(i64),
            Text(String),
        }
        match Option::<Raw>::deserialize(deserializer)? {
            None => Ok(Sector::Unknown),
            Some(Raw::Code(code)) => Sector::new(code).map_err(serde::de::Error::custom),
            Some(Raw::Text(text)) => {
                let text = text.trim();
                if text.is_empty() || text.eq_ignore_ascii_case("unknown") {
                    Ok(Sector::Unknown)
                } else {
                    let code = text.parse::<i64>().map_err(serde::de::Error::custom)?;
                    Sector::new(code).map_err(serde::de::Error::custom)
                }
            }
        }
    }
}

/// Calendar quarter, displayed as `2020Q1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Quarter {
    pub year: i32,
    pub quarter: u8,
}

impl Quarter {
    pub fn of(date: NaiveDate) -> Self {
        Quarter {
            year: date.year(),
            quarter: (date.month0() / 3 + 1) as u8,
        }
    }
}

impl fmt::Display for Quarter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}Q{}", self.year, self.quarter)
    }
}

impl FromStr for Quarter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::invalid("quarter", format!("expected YYYYQn, got {s:?}"));
        let (year, q) = s.trim().split_once(['Q', 'q']).ok_or_else(bad)?;
        let year = year.parse::<i32>().map_err(|_| bad())?;
        let quarter = q.parse::<u8>().map_err(|_| bad())?;
        if !(1..=4).contains(&quarter) {
            return Err(bad());
        }
        Ok(Quarter { year, quarter })
    }
}

pub fn parse_date(text: &str) -> Result<NaiveDate> {
    NaiveDate::parse_from_str(text.trim(), "%Y-%m-%d").map_err(|e| Error::invalid("date", format!("{text:?}: {e}")))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub doc_id: String,
    #[serde(default)]
    pub source_kind: SourceKind,
    pub ticker: String,
    #[serde(default)]
    pub sector: Sector,
    #[serde(rename = "date")]
    pub period: NaiveDate,
    #[serde(rename = "text")]
    pub raw_text: String,
}

impl Document {
    fn validate(&self) -> std::result::Result<(), String> {
        if self.doc_id.trim().is_empty() {
            return Err("doc_id is empty".into());
        }
        if self.ticker.trim().is_empty() {
            return Err("ticker is empty".into());
        }
        if self.raw_text.trim().is_empty() {
            return Err(format!("document {} has empty text", self.doc_id));
        }
        Ok(())
    }

    pub fn quarter(&self) -> Quarter {
        Quarter::of(self.period)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SentenceFlags {
    pub is_numeric: bool,
    pub is_financial: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub claim: Option<ClaimLabel>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sentiment: Option<SentimentLabel>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sentence {
    pub doc_id: String,
    pub index: usize,
    pub text: String,
    /// Byte offsets into the owning document's `raw_text`.
    pub byte_span: (usize, usize),
    #[serde(flatten)]
    pub flags: SentenceFlags,
}

/// Lower-cased financial vocabulary used by the relevance filter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TermSet {
    terms: BTreeSet<String>,
}

impl TermSet {
    pub fn new<I, S>(terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let terms: BTreeSet<String> = terms
            .into_iter()
            .map(|t| t.as_ref().trim().to_lowercase())
            .filter(|t| !t.is_empty())
            .collect();
        if terms.is_empty() {
            return Err(Error::invalid("dictionary", "no terms"));
        }
        Ok(TermSet { terms })
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn contains(&self, term: &str) -> bool {
        self.terms.contains(term)
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.terms.iter().map(String::as_str)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DocumentFormat {
    Jsonl,
    PlaintextDir,
}

impl FromStr for DocumentFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "jsonl" => Ok(DocumentFormat::Jsonl),
            "plaintext_dir" | "dir" => Ok(DocumentFormat::PlaintextDir),
            other => Err(Error::invalid("document format", other.to_string())),
        }
    }
}

pub fn load_documents(path: impl AsRef<Path>, format: DocumentFormat) -> Result<Vec<Document>> {
    let path = path.as_ref();
    let docs = match format {
        DocumentFormat::Jsonl => read_jsonl_documents(path)?,
        DocumentFormat::PlaintextDir => read_plaintext_dir(path)?,
    };
    sort_unique_documents(docs)
}

fn sort_unique_documents(mut docs: Vec<Document>) -> Result<Vec<Document>> {
    docs.sort_by(|a, b| a.doc_id.cmp(&b.doc_id));
    if let Some(pair) = docs.windows(2).find(|w| w[0].doc_id == w[1].doc_id) {
        return Err(Error::Duplicate {
            key: format!("doc_id {}", pair[0].doc_id),
        });
    }
    Ok(docs)
}

fn read_jsonl_documents(path: &Path) -> Result<Vec<Document>> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut docs = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let doc: Document = serde_json::from_str(&line).map_err(|e| Error::parse(path, i + 1, e.to_string()))?;
        doc.validate().map_err(|m| Error::parse(path, i + 1, m))?;
        docs.push(doc);
    }
    Ok(docs)
}

/// Reads `TICKER_YYYY-MM-DD.txt` files; the file stem becomes the doc_id.
fn read_plaintext_dir(path: &Path) -> Result<Vec<Document>> {
    let entries = fs::read_dir(path).map_err(|e| Error::io(path, e))?;
    let mut docs = Vec::new();
    for entry in entries {
        let entry = entry.map_err(|e| Error::io(path, e))?;
        let file_path = entry.path();
        if file_path.extension().and_then(|e| e.to_str()) != Some("txt") {
            continue;
        }
        let stem = file_path
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or_default()
            .to_string();
        let (ticker, date) = stem
            .rsplit_once('_')
            .ok_or_else(|| Error::parse(&file_path, 0, "file name must look like TICKER_YYYY-MM-DD.txt"))?;
        let period = parse_date(date).map_err(|e| Error::parse(&file_path, 0, e.to_string()))?;
        let raw_text = fs::read_to_string(&file_path).map_err(|e| Error::io(&file_path, e))?;
        let doc = Document {
            doc_id: stem.clone(),
            source_kind: SourceKind::EarningsCall,
            ticker: ticker.to_string(),
            sector: Sector::Unknown,
            period,
            raw_text,
        };
        doc.validate().map_err(|m| Error::parse(&file_path, 0, m))?;
        docs.push(doc);
    }
    Ok(docs)
}

pub fn write_documents_jsonl<W: Write>(docs: &[Document], mut out: W) -> Result<()> {
    for doc in docs {
        let line = serde_json::to_string(doc).expect("documents always serialize");
        writeln!(out, "{line}").map_err(|e| Error::io("<output>", e))?;
    }
    Ok(())
}

/// Small bundled financial vocabulary used when no dictionary is configured.
pub const DEFAULT_DICTIONARY: &str = include_str!("../data/dictionary.txt");

pub fn default_dictionary() -> TermSet {
    TermSet::new(parse_word_list(DEFAULT_DICTIONARY)).expect("bundled dictionary is non-empty")
}

pub fn load_dictionary(path: impl AsRef<Path>) -> Result<TermSet> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    TermSet::new(text.lines())
        .map_err(|_| Error::invalid("dictionary", format!("{} contains no terms", path.display())))
}

/// Reads a newline-delimited word list, dropping blanks and `#` comments.
pub fn load_word_list(path: impl AsRef<Path>) -> Result<Vec<String>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(parse_word_list(&text))
}

pub fn parse_word_list(text: &str) -> Vec<String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_string)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GoldLabel {
    pub doc_id: String,
    pub sentence_index: usize,
    pub label: ClaimLabel,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarketBar {
    pub ticker: String,
    pub date: NaiveDate,
    pub close: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexBar {
    pub date: NaiveDate,
    pub close: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpsRecord {
    pub ticker: String,
    pub period_end: NaiveDate,
    pub actual_eps: f64,
    pub median_forecast_eps: f64,
    pub quarter_end_price: f64,
}

/// Deserializes every CSV row, tagging failures with their 1-based line number.
fn read_csv<T, F>(path: &Path, expected_header: &[&str], mut validate: F) -> Result<Vec<T>>
where
    T: DeserializeOwned,
    F: FnMut(&T) -> std::result::Result<(), String>,
{
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| csv_error(path, e))?;
    let header = reader.headers().map_err(|e| csv_error(path, e))?.clone();
    let names: Vec<&str> = header.iter().collect();
    if names != expected_header {
        return Err(Error::parse(
            path,
            1,
            format!(
                "expected header {:?}, found {:?}",
                expected_header.join(","),
                names.join(",")
            ),
        ));
    }
    let mut out = Vec::new();
    for row in reader.deserialize::<T>() {
        let record = match row {
            Ok(r) => r,
            Err(e) => {
                let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
                return Err(Error::parse(path, line, e.to_string()));
            }
        };
        if let Err(message) = validate(&record) {
            return Err(Error::parse(path, out.len() + 2, message));
        }
        out.push(record);
    }
    Ok(out)
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::parse(path, line, format!("{other:?}")),
    }
}

fn positive_price(close: f64) -> std::result::Result<(), String> {
    if close.is_finite() && close > 0.0 {
        Ok(())
    } else {
        Err(format!("price must be positive, got {close}"))
    }
}

pub fn load_prices(path: impl AsRef<Path>) -> Result<Vec<MarketBar>> {
    let mut bars: Vec<MarketBar> = read_csv(path.as_ref(), &["ticker", "date", "close"], |b: &MarketBar| {
        positive_price(b.close)
    })?;
    bars.sort_by(|a, b| a.ticker.cmp(&b.ticker).then(a.date.cmp(&b.date)));
    if let Some(w) = bars
        .windows(2)
        .find(|w| w[0].ticker == w[1].ticker && w[0].date == w[1].date)
    {
        return Err(Error::Duplicate {
            key: format!("price {} {}", w[0].ticker, w[0].date),
        });
    }
    Ok(bars)
}

pub fn load_index(path: impl AsRef<Path>) -> Result<Vec<IndexBar>> {
    let mut bars: Vec<IndexBar> = read_csv(path.as_ref(), &["date", "close"], |b: &IndexBar| {
        positive_price(b.close)
    })?;
    bars.sort_by_key(|b| b.date);
    if let Some(w) = bars.windows(2).find(|w| w[0].date == w[1].date) {
        return Err(Error::Duplicate {
            key: format!("index {}", w[0].date),
        });
    }
    Ok(bars)
}

pub fn load_eps(path: impl AsRef<Path>) -> Result<Vec<EpsRecord>> {
    let header = [
        "ticker",
        "period_end",
        "actual_eps",
        "median_forecast_eps",
        "quarter_end_price",
    ];
    let mut records: Vec<EpsRecord> = read_csv(path.as_ref(), &header, |r: &EpsRecord| {
        if !r.actual_eps.is_finite() || !r.median_forecast_eps.is_finite() {
            return Err("eps values must be finite".into());
        }
        positive_price(r.quarter_end_price)
    })?;
    records.sort_by(|a, b| a.ticker.cmp(&b.ticker).then(a.period_end.cmp(&b.period_end)));
    if let Some(w) = records
        .windows(2)
        .find(|w| w[0].ticker == w[1].ticker && w[0].period_end == w[1].period_end)
    {
        return Err(Error::Duplicate {
            key: format!("eps {} {}", w[0].ticker, w[0].period_end),
        });
    }
    Ok(records)
}

pub fn load_gold(path: impl AsRef<Path>) -> Result<Vec<GoldLabel>> {
    let mut labels: Vec<GoldLabel> = read_csv(path.as_ref(), &["doc_id", "sentence_index", "label"], |_| Ok(()))?;
    labels.sort_by(|a, b| a.doc_id.cmp(&b.doc_id).then(a.sentence_index.cmp(&b.sentence_index)));
    let mut seen = HashSet::new();
    for g in &labels {
        if !seen.insert((g.doc_id.as_str(), g.sentence_index)) {
            return Err(Error::Duplicate {
                key: format!("gold {}#{}", g.doc_id, g.sentence_index),
            });
        }
    }
    Ok(labels)
}

/// Hand-labeled claim sentences shipped with the crate (`LABEL<TAB>sentence`).
pub const CURATED_GOLD_TSV: &str = include_str!("../data/curated_gold.tsv");

/// A standalone sentence with its gold claim label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledSentence {
    pub label: ClaimLabel,
    pub text: String,
}

/// Parses `LABEL<TAB>sentence` lines; blanks and `#` comments are skipped.
pub fn parse_labeled_sentences(text: &str, origin: &Path) -> Result<Vec<LabeledSentence>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let (label, sentence) = trimmed
            .split_once('\t')
            .ok_or_else(|| Error::parse(origin, i + 1, "expected LABEL<TAB>sentence"))?;
        let label: ClaimLabel = label
            .trim()
            .parse()
            .map_err(|e: Error| Error::parse(origin, i + 1, e.to_string()))?;
        let sentence = sentence.trim();
        if sentence.is_empty() {
            return Err(Error::parse(origin, i + 1, "empty sentence"));
        }
        out.push(LabeledSentence {
            label,
            text: sentence.to_string(),
        });
    }
    Ok(out)
}

pub fn load_labeled_sentences(path: impl AsRef<Path>) -> Result<Vec<LabeledSentence>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_labeled_sentences(&text, path)
}

pub fn curated_gold() -> Vec<LabeledSentence> {
    parse_labeled_sentences(CURATED_GOLD_TSV, Path::new("curated_gold.tsv")).expect("bundled gold parses")
}

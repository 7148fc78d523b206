//! Joining optimism to market outcomes and running the optimism regressions.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use super::car::{EventWindow, MarketData};
use super::ols::{ols_univariate, standardize, stars, RegressionResult};
use super::surprise::earnings_surprise;
use crate::corpus::{EpsRecord, Quarter};
use crate::error::{Error, Result};
use crate::sentiment::{OptimismRecord, SentenceSubset};

/// Firm-quarter key used in optimism and event files, e.g. `AAPL:2020Q1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FirmQuarter {
    pub ticker: String,
    pub quarter: Quarter,
}

impl fmt::Display for FirmQuarter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.ticker, self.quarter)
    }
}

impl FromStr for FirmQuarter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (ticker, quarter) = s
            .rsplit_once(':')
            .ok_or_else(|| Error::invalid("firm-quarter key", format!("expected TICKER:YYYYQn, got {s:?}")))?;
        if ticker.is_empty() {
            return Err(Error::invalid("firm-quarter key", format!("empty ticker in {s:?}")));
        }
        Ok(FirmQuarter {
            ticker: ticker.to_string(),
            quarter: quarter.parse()?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Surprise,
    #[serde(rename = "car_2_30")]
    Car2_30,
    #[serde(rename = "car_2_60")]
    Car2_60,
}

impl Outcome {
    pub const ALL: [Outcome; 3] = [Outcome::Surprise, Outcome::Car2_30, Outcome::Car2_60];

    pub fn name(self) -> &'static str {
        match self {
            Outcome::Surprise => "surprise",
            Outcome::Car2_30 => "car_2_30",
            Outcome::Car2_60 => "car_2_60",
        }
    }

    pub fn window(self) -> Option<EventWindow> {
        match self {
            Outcome::Surprise => None,
            Outcome::Car2_30 => Some(EventWindow::POST_2_30),
            Outcome::Car2_60 => Some(EventWindow::POST_2_60),
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Outcome {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Outcome::ALL
            .into_iter()
            .find(|o| o.name() == s)
            .ok_or_else(|| Error::invalid("outcome", s.to_string()))
    }
}

/// Event date of a firm-quarter group (the latest document date in it).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EventRecord {
    pub key: String,
    pub ticker: String,
    pub event_date: NaiveDate,
}

pub fn write_events_csv<W: Write>(events: &[EventRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for e in events {
        w.serialize(e)
            .map_err(|e| Error::invalid("events output", e.to_string()))?;
    }
    w.flush().map_err(|e| Error::io("<events output>", e))
}

pub fn load_events_csv(path: impl AsRef<Path>) -> Result<Vec<EventRecord>> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::invalid("events file", format!("{}: {e}", path.display())))?;
    let mut out = Vec::new();
    for (i, row) in reader.deserialize::<EventRecord>().enumerate() {
        out.push(row.map_err(|e| Error::parse(path, i + 2, e.to_string()))?);
    }
    Ok(out)
}

/// Outcome values keyed by firm-quarter.
pub type OutcomeTable = BTreeMap<FirmQuarter, f64>;

/// Earnings surprise (%) keyed by the calendar quarter of each period end.
pub fn surprise_outcomes(eps: &[EpsRecord]) -> Result<OutcomeTable> {
    let mut out = OutcomeTable::new();
    for r in eps {
        let s = earnings_surprise(r)?;
        out.insert(
            FirmQuarter {
                ticker: r.ticker.clone(),
                quarter: Quarter::of(r.period_end),
            },
            s.surprise_pct,
        );
    }
    Ok(out)
}

/// CAR per event, keyed by the event's firm-quarter. Events whose window is
/// not covered by the price data are returned separately.
pub fn car_outcomes(
    market: &MarketData,
    events: &[EventRecord],
    window: EventWindow,
) -> Result<(OutcomeTable, Vec<(String, Error)>)> {
    let mut table = OutcomeTable::new();
    let mut skipped = Vec::new();
    for e in events {
        let key: FirmQuarter = e.key.parse()?;
        match market.car(&e.ticker, e.event_date, window) {
            Ok(r) => {
                table.insert(key, r.car);
            }
            Err(err @ Error::InsufficientData { .. }) => skipped.push((e.key.clone(), err)),
            Err(other) => return Err(other),
        }
    }
    Ok((table, skipped))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct OutcomeRow {
    key: String,
    outcome: f64,
}

/// `key,outcome` rows, ordered by key.
pub fn write_outcomes_csv<W: Write>(table: &OutcomeTable, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for (key, outcome) in table {
        w.serialize(OutcomeRow {
            key: key.to_string(),
            outcome: *outcome,
        })
        .map_err(|e| Error::invalid("outcomes output", e.to_string()))?;
    }
    w.flush().map_err(|e| Error::io("<outcomes output>", e))
}

pub fn load_outcomes_csv(path: impl AsRef<Path>) -> Result<OutcomeTable> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::invalid("outcomes file", format!("{}: {e}", path.display())))?;
    let mut table = OutcomeTable::new();
    for (i, row) in reader.deserialize::<OutcomeRow>().enumerate() {
        let row = row.map_err(|e| Error::parse(path, i + 2, e.to_string()))?;
        if !row.outcome.is_finite() {
            return Err(Error::parse(path, i + 2, "outcome is not finite"));
        }
        if table.insert(row.key.parse()?, row.outcome).is_some() {
            return Err(Error::Duplicate { key: row.key });
        }
    }
    Ok(table)
}

/// Parses the keys of optimism records into firm-quarters.
pub fn optimism_points(records: &[OptimismRecord]) -> Result<Vec<(FirmQuarter, f64)>> {
    records.iter().map(|r| Ok((r.key.parse()?, r.optimism))).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct PanelRow {
    pub key: FirmQuarter,
    pub optimism: f64,
    pub outcome: f64,
}

/// Inner join of firm-quarter optimism records with an outcome table, ordered by key.
pub fn join_panel(optimism: &[OptimismRecord], outcomes: &OutcomeTable) -> Result<Vec<PanelRow>> {
    let mut rows = Vec::new();
    for r in optimism {
        let key: FirmQuarter = r.key.parse()?;
        if let Some(outcome) = outcomes.get(&key) {
            rows.push(PanelRow {
                key,
                optimism: r.optimism,
                outcome: *outcome,
            });
        }
    }
    rows.sort_by(|a, b| a.key.cmp(&b.key));
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyResult {
    pub outcome: Outcome,
    pub regression: RegressionResult,
}

/// Regresses the outcome on raw optimism.
pub fn run_study(rows: &[PanelRow], outcome: Outcome) -> Result<StudyResult> {
    if rows.len() < 3 {
        return Err(Error::Degenerate(format!(
            "{outcome}: join produced {} observations, need at least 3",
            rows.len()
        )));
    }
    let y: Vec<f64> = rows.iter().map(|r| r.outcome).collect();
    let x: Vec<f64> = rows.iter().map(|r| r.optimism).collect();
    Ok(StudyResult {
        outcome,
        regression: ols_univariate(&y, &x)?,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdjustedBetaRecord {
    pub subset: SentenceSubset,
    pub outcome: Outcome,
    /// Mean number of subset sentences per document.
    pub avg_sentences: f64,
    pub beta_raw: f64,
    /// `beta_raw * avg_sentences`
    pub beta_adjusted: f64,
    /// `beta_raw / avg_sentences`, the other reading of the adjustment.
    pub beta_per_sentence: f64,
    pub p_beta: f64,
    pub stars: String,
    pub n: usize,
}

/// Regresses the outcome on standardized subset optimism and scales the slope
/// by the subset's average sentence count.
pub fn run_subset_study(
    rows: &[PanelRow],
    outcome: Outcome,
    subset: SentenceSubset,
    avg_sentences: f64,
) -> Result<AdjustedBetaRecord> {
    if rows.len() < 3 {
        return Err(Error::Degenerate(format!(
            "{outcome}/{}: join produced {} observations, need at least 3",
            subset.name(),
            rows.len()
        )));
    }
    let x = standardize(&rows.iter().map(|r| r.optimism).collect::<Vec<_>>())?;
    let y: Vec<f64> = rows.iter().map(|r| r.outcome).collect();
    let reg = ols_univariate(&y, &x)?;
    let beta_per_sentence = if avg_sentences > 0.0 {
        reg.beta / avg_sentences
    } else {
        f64::NAN
    };
    Ok(AdjustedBetaRecord {
        subset,
        outcome,
        avg_sentences,
        beta_raw: reg.beta,
        beta_adjusted: reg.beta * avg_sentences,
        beta_per_sentence,
        p_beta: reg.p_beta,
        stars: stars(reg.p_beta).to_string(),
        n: reg.n,
    })
}

/// Latest document date per firm-quarter.
pub fn events_from_documents<'a, I>(docs: I) -> Vec<EventRecord>
where
    I: IntoIterator<Item = (&'a str, NaiveDate)>,
{
    let mut latest: HashMap<FirmQuarter, NaiveDate> = HashMap::new();
    for (ticker, date) in docs {
        let key = FirmQuarter {
            ticker: ticker.to_string(),
            quarter: Quarter::of(date),
        };
        let entry = latest.entry(key).or_insert(date);
        if date > *entry {
            *entry = date;
        }
    }
    let mut events: Vec<EventRecord> = latest
        .into_iter()
        .map(|(key, event_date)| EventRecord {
            key: key.to_string(),
            ticker: key.ticker.clone(),
            event_date,
        })
        .collect();
    events.sort_by(|a, b| a.key.cmp(&b.key));
    events
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(ticker: &str, q: u8, optimism: f64, outcome: f64) -> PanelRow {
        PanelRow {
            key: FirmQuarter {
                ticker: ticker.into(),
                quarter: Quarter { year: 2020, quarter: q },
            },
            optimism,
            outcome,
        }
    }

    #[test]
    fn firm_quarter_keys() {
        let k: FirmQuarter = "BRK:A:2020Q3".parse().unwrap();
        assert_eq!(k.ticker, "BRK:A");
        assert_eq!(k.to_string(), "BRK:A:2020Q3");
        assert!("AAPL".parse::<FirmQuarter>().is_err());
        assert!(":2020Q1".parse::<FirmQuarter>().is_err());
    }

    #[test]
    fn exact_panel_recovers_coefficients() {
        let rows: Vec<PanelRow> = (0..12)
            .map(|i| {
                let opt = i as f64 * 1.5 - 4.0;
                row(&format!("T{i}"), 1, opt, 0.17 - 1.99 * opt)
            })
            .collect();
        let r = run_study(&rows, Outcome::Surprise).unwrap().regression;
        assert!((r.alpha - 0.17).abs() < 1e-12);
        assert!((r.beta + 1.99).abs() < 1e-12);
    }

    #[test]
    fn subset_study_adjusts_beta() {
        let rows: Vec<PanelRow> = (0..10)
            .map(|i| row(&format!("T{i}"), 2, i as f64, 2.0 * i as f64 + ((i * 7) % 3) as f64))
            .collect();
        let rec = run_subset_study(&rows, Outcome::Car2_30, SentenceSubset::InClaim, 3.7).unwrap();
        assert!((rec.beta_adjusted - rec.beta_raw * rec.avg_sentences).abs() < 1e-12);
        assert!((rec.beta_per_sentence - rec.beta_raw / 3.7).abs() < 1e-12);
        let z = standardize(&rows.iter().map(|r| r.optimism).collect::<Vec<_>>()).unwrap();
        let direct = ols_univariate(&rows.iter().map(|r| r.outcome).collect::<Vec<_>>(), &z).unwrap();
        assert_eq!(rec.beta_raw, direct.beta);
    }

    #[test]
    fn small_join_is_error() {
        let rows = vec![row("A", 1, 1.0, 1.0), row("B", 1, 2.0, 3.0)];
        assert!(run_study(&rows, Outcome::Surprise).is_err());
    }

    #[test]
    fn join_and_surprise_table() {
        let eps = vec![EpsRecord {
            ticker: "A".into(),
            period_end: NaiveDate::from_ymd_opt(2020, 3, 31).unwrap(),
            actual_eps: 1.1,
            median_forecast_eps: 1.0,
            quarter_end_price: 50.0,
        }];
        let table = surprise_outcomes(&eps).unwrap();
        let opt = vec![
            OptimismRecord::from_counts("A:2020Q1", 1, 0, 10).unwrap(),
            OptimismRecord::from_counts("A:2020Q2", 1, 0, 10).unwrap(),
        ];
        let rows = join_panel(&opt, &table).unwrap();
        assert_eq!(rows.len(), 1);
        assert!((rows[0].outcome - 0.2).abs() < 1e-12);
        assert_eq!(rows[0].optimism, 10.0);
    }

    #[test]
    fn events_take_latest_date() {
        let d = |m, day| NaiveDate::from_ymd_opt(2020, m, day).unwrap();
        let events = events_from_documents([("A", d(1, 5)), ("A", d(2, 1)), ("B", d(4, 2))]);
        assert_eq!(events.len(), 2);
        assert_eq!(events[0].key, "A:2020Q1");
        assert_eq!(events[0].event_date, d(2, 1));
        assert_eq!(events[1].key, "B:2020Q2");
    }

    #[test]
    fn outcome_names() {
        for o in Outcome::ALL {
            assert_eq!(o.name().parse::<Outcome>().unwrap(), o);
        }
        assert_eq!(Outcome::Car2_60.window(), Some(EventWindow::POST_2_60));
    }
}

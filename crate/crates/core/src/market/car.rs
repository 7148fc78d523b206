use std::collections::{BTreeMap, HashMap};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::corpus::{IndexBar, MarketBar};
use crate::error::{Error, Result};

/// Trading-day offsets relative to the event day (offset 0).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EventWindow {
    pub start: usize,
    pub end: usize,
}

impl EventWindow {
    pub const POST_2_30: EventWindow = EventWindow { start: 2, end: 30 };
    pub const POST_2_60: EventWindow = EventWindow { start: 2, end: 60 };

    pub fn new(start: usize, end: usize) -> Result<Self> {
        if start > end {
            return Err(Error::invalid(
                "event window",
                format!("[{start}, {end}] has start after end"),
            ));
        }
        Ok(EventWindow { start, end })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CarRecord {
    pub ticker: String,
    pub event_date: NaiveDate,
    pub window: EventWindow,
    /// Sum of daily abnormal returns as a fraction (0.015 is 1.5%).
    pub car: f64,
}

/// Stock and benchmark closes indexed for event-window lookups.
#[derive(Debug, Clone, Default)]
pub struct MarketData {
    stocks: HashMap<String, Vec<(NaiveDate, f64)>>,
    index: BTreeMap<NaiveDate, f64>,
}

impl MarketData {
    pub fn new(prices: &[MarketBar], index: &[IndexBar]) -> Self {
        let mut stocks: HashMap<String, Vec<(NaiveDate, f64)>> = HashMap::new();
        for bar in prices {
            stocks
                .entry(bar.ticker.clone())
                .or_default()
                .push((bar.date, bar.close));
        }
        for series in stocks.values_mut() {
            series.sort_by_key(|(d, _)| *d);
        }
        MarketData {
            stocks,
            index: index.iter().map(|b| (b.date, b.close)).collect(),
        }
    }

    /// Market-adjusted CAR: the sum over the window of the stock's simple return
    /// minus the benchmark's simple return over the same pair of dates.
    ///
    /// Offsets count the stock's own trading days. A non-trading event date is
    /// anchored to the next trading day.
    pub fn car(&self, ticker: &str, event_date: NaiveDate, window: EventWindow) -> Result<CarRecord> {
        let insufficient = |message: String| Error::InsufficientData {
            ticker: ticker.to_string(),
            message,
        };
        let series = self
            .stocks
            .get(ticker)
            .ok_or_else(|| insufficient("no prices".into()))?;
        let anchor = series.partition_point(|(d, _)| *d < event_date);
        if anchor >= series.len() {
            return Err(insufficient(format!("no trading day on or after {event_date}")));
        }
        let first = anchor + window.start;
        let last = anchor + window.end;
        if first == 0 {
            return Err(insufficient(format!(
                "offset 0 needs a close before {}",
                series[anchor].0
            )));
        }
        if last >= series.len() {
            let have = series.len() - 1 - anchor;
            return Err(insufficient(format!(
                "need trading days +{}..+{} after {}, only +{have} available",
                window.start, window.end, series[anchor].0
            )));
        }
        let mut car = 0.0;
        for t in first..=last {
            let (d0, p0) = series[t - 1];
            let (d1, p1) = series[t];
            let i0 = self
                .index_close(d0)
                .ok_or_else(|| insufficient(format!("benchmark has no close on {d0}")))?;
            let i1 = self
                .index_close(d1)
                .ok_or_else(|| insufficient(format!("benchmark has no close on {d1}")))?;
            car += (p1 / p0 - 1.0) - (i1 / i0 - 1.0);
        }
        Ok(CarRecord {
            ticker: ticker.to_string(),
            event_date,
            window,
            car,
        })
    }

    fn index_close(&self, date: NaiveDate) -> Option<f64> {
        self.index.get(&date).copied()
    }
}

pub fn car(
    prices: &[MarketBar],
    index: &[IndexBar],
    ticker: &str,
    event_date: NaiveDate,
    window: EventWindow,
) -> Result<CarRecord> {
    MarketData::new(prices, index).car(ticker, event_date, window)
}

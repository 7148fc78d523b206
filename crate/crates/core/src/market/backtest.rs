//! Sign strategy on bias-adjusted optimism: short optimistic firms, buy pessimistic ones.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;

use serde::{Deserialize, Serialize};

use super::study::{FirmQuarter, OutcomeTable};
use crate::corpus::Quarter;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Short,
    Long,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TradeRecord {
    pub ticker: String,
    pub period: String,
    pub adjusted_optimism: f64,
    pub direction: Direction,
    pub outcome_metric: f64,
    pub success: bool,
}

/// Rows are the trade direction, columns the sign of the outcome. A zero
/// outcome is a failed trade and lands in the failing column of its row.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub short_down: usize,
    pub short_up: usize,
    pub long_down: usize,
    pub long_up: usize,
}

impl ConfusionMatrix {
    pub fn from_trades(trades: &[TradeRecord]) -> Self {
        let mut m = ConfusionMatrix::default();
        for t in trades {
            match (t.direction, t.success) {
                (Direction::Short, true) => m.short_down += 1,
                (Direction::Short, false) => m.short_up += 1,
                (Direction::Long, true) => m.long_up += 1,
                (Direction::Long, false) => m.long_down += 1,
            }
        }
        m
    }

    pub fn trades(&self) -> usize {
        self.short_down + self.short_up + self.long_down + self.long_up
    }

    pub fn successes(&self) -> usize {
        self.short_down + self.long_up
    }

    pub fn is_empty(&self) -> bool {
        self.trades() == 0
    }

    /// Share of successful trades; `None` when nothing was traded.
    pub fn accuracy(&self) -> Option<f64> {
        (!self.is_empty()).then(|| self.successes() as f64 / self.trades() as f64)
    }

    fn cells(&self) -> [[usize; 2]; 2] {
        [[self.short_down, self.short_up], [self.long_down, self.long_up]]
    }

    /// Cells as percentages of all trades, row-major (short, long) x (down, up).
    pub fn total_percentages(&self) -> Option<[[f64; 2]; 2]> {
        let n = self.trades();
        if n == 0 {
            return None;
        }
        let c = self.cells();
        Some(c.map(|row| row.map(|v| 100.0 * v as f64 / n as f64)))
    }

    /// Cells as percentages of their row; an empty row is all zeros.
    pub fn row_percentages(&self) -> [[f64; 2]; 2] {
        self.cells().map(|row| {
            let n = row[0] + row[1];
            if n == 0 {
                [0.0, 0.0]
            } else {
                row.map(|v| 100.0 * v as f64 / n as f64)
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BacktestReport {
    pub trades: Vec<TradeRecord>,
    pub confusion: ConfusionMatrix,
    /// Test observations that could not be traded and why.
    pub warnings: Vec<String>,
}

/// Per-firm mean optimism over the training periods.
pub fn training_means(optimism: &[(FirmQuarter, f64)], train: &BTreeSet<Quarter>) -> BTreeMap<String, f64> {
    let mut sums: BTreeMap<String, (f64, usize)> = BTreeMap::new();
    for (key, value) in optimism {
        if train.contains(&key.quarter) {
            let e = sums.entry(key.ticker.clone()).or_insert((0.0, 0));
            e.0 += value;
            e.1 += 1;
        }
    }
    sums.into_iter().map(|(t, (s, n))| (t, s / n as f64)).collect()
}

pub fn backtest(
    optimism: &[(FirmQuarter, f64)],
    outcomes: &OutcomeTable,
    train: &BTreeSet<Quarter>,
    test: &BTreeSet<Quarter>,
) -> Result<BacktestReport> {
    if test.is_empty() {
        return Err(Error::invalid("backtest", "test period set is empty"));
    }
    if let Some(q) = train.intersection(test).next() {
        return Err(Error::invalid(
            "backtest",
            format!("period {q} is in both train and test sets"),
        ));
    }
    let means = training_means(optimism, train);

    let mut test_obs: Vec<&(FirmQuarter, f64)> = optimism.iter().filter(|(k, _)| test.contains(&k.quarter)).collect();
    test_obs.sort_by(|a, b| a.0.cmp(&b.0));
    if test_obs.is_empty() {
        return Err(Error::invalid(
            "backtest",
            "no optimism observations fall in the test periods",
        ));
    }

    let mut trades = Vec::new();
    let mut warnings = Vec::new();
    for (key, value) in test_obs {
        let Some(mean) = means.get(&key.ticker) else {
            warnings.push(format!("{key}: no training history, skipped"));
            continue;
        };
        let Some(&outcome) = outcomes.get(key) else {
            warnings.push(format!("{key}: no outcome, skipped"));
            continue;
        };
        let adjusted = value - mean;
        let direction = if adjusted > 0.0 {
            Direction::Short
        } else if adjusted < 0.0 {
            Direction::Long
        } else {
            continue;
        };
        let success = match direction {
            Direction::Short => outcome < 0.0,
            Direction::Long => outcome > 0.0,
        };
        trades.push(TradeRecord {
            ticker: key.ticker.clone(),
            period: key.quarter.to_string(),
            adjusted_optimism: adjusted,
            direction,
            outcome_metric: outcome,
            success,
        });
    }
    let confusion = ConfusionMatrix::from_trades(&trades);
    Ok(BacktestReport {
        trades,
        confusion,
        warnings,
    })
}

pub fn write_trades_csv<W: Write>(trades: &[TradeRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for t in trades {
        w.serialize(t)
            .map_err(|e| Error::invalid("trades output", e.to_string()))?;
    }
    w.flush().map_err(|e| Error::io("<trades output>", e))
}

/// One row per cell with raw count, share of all trades and share of the row,
/// followed by an accuracy row.
pub fn write_confusion_csv<W: Write>(m: &ConfusionMatrix, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let wrap = |e: csv::Error| Error::invalid("confusion output", e.to_string());
    w.write_record(["direction", "outcome", "count", "pct_total", "pct_row"])
        .map_err(wrap)?;
    let cells = m.cells();
    let total = m.total_percentages();
    let row = m.row_percentages();
    for (i, dir) in ["short", "long"].iter().enumerate() {
        for (j, out) in ["down", "up"].iter().enumerate() {
            let pct_total = total.map(|t| format!("{:.4}", t[i][j])).unwrap_or_default();
            w.write_record([
                dir.to_string(),
                out.to_string(),
                cells[i][j].to_string(),
                pct_total,
                format!("{:.4}", row[i][j]),
            ])
            .map_err(wrap)?;
        }
    }
    let acc = m.accuracy().map(|a| format!("{a:.6}")).unwrap_or_else(|| "NA".into());
    w.write_record(["all", "accuracy", &m.trades().to_string(), "", &acc])
        .map_err(wrap)?;
    w.flush().map_err(|e| Error::io("<confusion output>", e))
}

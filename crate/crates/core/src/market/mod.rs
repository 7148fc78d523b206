//! Earnings surprise, event-window returns, the optimism regressions and the backtest.

pub mod backtest;
pub mod car;
pub mod ols;
pub mod study;
pub mod surprise;

pub use backtest::{
    backtest, training_means, write_confusion_csv, write_trades_csv, BacktestReport, ConfusionMatrix, Direction,
    TradeRecord,
};
pub use car::{car, CarRecord, EventWindow, MarketData};
pub use ols::{ols_univariate, standardize, stars, RegressionResult};
pub use study::{
    car_outcomes, events_from_documents, join_panel, load_events_csv, load_outcomes_csv, optimism_points, run_study,
    run_subset_study, surprise_outcomes, write_events_csv, write_outcomes_csv, AdjustedBetaRecord, EventRecord,
    FirmQuarter, Outcome, OutcomeTable, PanelRow, StudyResult,
};
pub use surprise::{earnings_surprise, SurpriseRecord};

use std::io::Write;

use crate::error::{Error, Result};

/// `outcome,alpha,beta,se_alpha,se_beta,t_beta,p_beta,n,stars`
pub fn write_regression_table<W: Write>(results: &[StudyResult], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let wrap = |e: csv::Error| Error::invalid("regression output", e.to_string());
    w.write_record([
        "outcome", "alpha", "beta", "se_alpha", "se_beta", "t_beta", "p_beta", "n", "stars",
    ])
    .map_err(wrap)?;
    for r in results {
        let g = &r.regression;
        w.write_record([
            r.outcome.name().to_string(),
            format!("{:.10}", g.alpha),
            format!("{:.10}", g.beta),
            format!("{:.10}", g.se_alpha),
            format!("{:.10}", g.se_beta),
            format!("{:.6}", g.t_beta),
            format!("{:.6}", g.p_beta),
            g.n.to_string(),
            g.stars_beta.clone(),
        ])
        .map_err(wrap)?;
    }
    w.flush().map_err(|e| Error::io("<regression output>", e))
}

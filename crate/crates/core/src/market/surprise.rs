use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::corpus::EpsRecord;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurpriseRecord {
    pub ticker: String,
    pub period_end: NaiveDate,
    /// `100 * (actual - median forecast) / quarter-end price`
    pub surprise_pct: f64,
}

pub fn earnings_surprise(eps: &EpsRecord) -> Result<SurpriseRecord> {
    if eps.quarter_end_price.is_nan() || eps.quarter_end_price <= 0.0 {
        return Err(Error::invalid(
            "eps record",
            format!("{} {}: quarter-end price must be positive", eps.ticker, eps.period_end),
        ));
    }
    Ok(SurpriseRecord {
        ticker: eps.ticker.clone(),
        period_end: eps.period_end,
        surprise_pct: 100.0 * (eps.actual_eps - eps.median_forecast_eps) / eps.quarter_end_price,
    })
}

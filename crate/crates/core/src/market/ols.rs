use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};

/// Significance marker: `***` p<0.01, `**` p<0.05, `*` p<0.10.
pub fn stars(p: f64) -> &'static str {
    if p < 0.01 {
        "***"
    } else if p < 0.05 {
        "**"
    } else if p < 0.10 {
        "*"
    } else {
        ""
    }
}

/// Univariate OLS fit `y = alpha + beta * x + e` with homoskedastic inference.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionResult {
    pub alpha: f64,
    pub beta: f64,
    pub se_alpha: f64,
    pub se_beta: f64,
    pub t_alpha: f64,
    pub t_beta: f64,
    pub p_alpha: f64,
    pub p_beta: f64,
    pub n: usize,
    pub r_squared: f64,
    pub stars_alpha: String,
    pub stars_beta: String,
}

impl RegressionResult {
    pub fn residuals(&self, y: &[f64], x: &[f64]) -> Vec<f64> {
        y.iter()
            .zip(x)
            .map(|(yi, xi)| yi - self.alpha - self.beta * xi)
            .collect()
    }
}

fn t_and_p(coef: f64, se: f64, dist: &StudentsT) -> (f64, f64) {
    if se == 0.0 {
        // Perfect fit: any nonzero coefficient is infinitely significant.
        return if coef == 0.0 {
            (0.0, 1.0)
        } else {
            (coef.signum() * f64::INFINITY, 0.0)
        };
    }
    let t = coef / se;
    (t, (2.0 * dist.sf(t.abs())).min(1.0))
}

pub fn ols_univariate(y: &[f64], x: &[f64]) -> Result<RegressionResult> {
    if y.len() != x.len() {
        return Err(Error::invalid(
            "regression input",
            format!("{} outcomes vs {} regressors", y.len(), x.len()),
        ));
    }
    let n = y.len();
    if n < 3 {
        return Err(Error::Degenerate(format!("regression needs n >= 3, got {n}")));
    }
    if y.iter().chain(x).any(|v| !v.is_finite()) {
        return Err(Error::invalid("regression input", "non-finite value"));
    }
    let nf = n as f64;
    let x_mean = x.iter().sum::<f64>() / nf;
    let y_mean = y.iter().sum::<f64>() / nf;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (xi, yi) in x.iter().zip(y) {
        let dx = xi - x_mean;
        let dy = yi - y_mean;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if sxx == 0.0 {
        return Err(Error::Degenerate("regressor is constant".into()));
    }
    let beta = sxy / sxx;
    let alpha = y_mean - beta * x_mean;
    let ssr: f64 = x
        .iter()
        .zip(y)
        .map(|(xi, yi)| {
            let e = yi - alpha - beta * xi;
            e * e
        })
        .sum();
    let sigma2 = ssr / (nf - 2.0);
    let se_beta = (sigma2 / sxx).sqrt();
    let se_alpha = (sigma2 * (1.0 / nf + x_mean * x_mean / sxx)).sqrt();
    let r_squared = if syy == 0.0 {
        0.0
    } else {
        (1.0 - ssr / syy).clamp(0.0, 1.0)
    };

    let dist = StudentsT::new(0.0, 1.0, nf - 2.0).expect("n >= 3 gives positive dof");
    let (t_alpha, p_alpha) = t_and_p(alpha, se_alpha, &dist);
    let (t_beta, p_beta) = t_and_p(beta, se_beta, &dist);
    Ok(RegressionResult {
        alpha,
        beta,
        se_alpha,
        se_beta,
        t_alpha,
        t_beta,
        p_alpha,
        p_beta,
        n,
        r_squared,
        stars_alpha: stars(p_alpha).to_string(),
        stars_beta: stars(p_beta).to_string(),
    })
}

/// Z-scores with the sample (n-1) standard deviation.
pub fn standardize(scores: &[f64]) -> Result<Vec<f64>> {
    if scores.len() < 2 {
        return Err(Error::Degenerate("standardization needs at least two values".into()));
    }
    let n = scores.len() as f64;
    let mean = scores.iter().sum::<f64>() / n;
    let var = scores.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let sd = var.sqrt();
    if sd == 0.0 || !sd.is_finite() {
        return Err(Error::Degenerate("zero variance".into()));
    }
    Ok(scores.iter().map(|s| (s - mean) / sd).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_fit() {
        let r = ols_univariate(&[2.0, 4.0, 6.0], &[1.0, 2.0, 3.0]).unwrap();
        assert!(r.alpha.abs() < 1e-12);
        assert!((r.beta - 2.0).abs() < 1e-12);
        assert_eq!(r.r_squared, 1.0);
        assert_eq!(r.stars_beta, "***");
    }

    #[test]
    fn constant_outcome() {
        let r = ols_univariate(&[5.0, 5.0, 5.0, 5.0], &[1.0, 2.0, 3.0, 7.0]).unwrap();
        assert_eq!(r.beta, 0.0);
        assert_eq!(r.r_squared, 0.0);
        assert_eq!(r.p_beta, 1.0);
        assert_eq!(r.stars_beta, "");
    }

    #[test]
    fn degenerate_inputs() {
        assert!(ols_univariate(&[1.0, 2.0, 3.0], &[4.0, 4.0, 4.0]).is_err());
        assert!(ols_univariate(&[1.0, 2.0], &[1.0, 2.0]).is_err());
        assert!(ols_univariate(&[1.0, 2.0, 3.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn textbook_inference() {
        // y = 1 + 0.5x with residuals (+1, -1, -1, +1): SSR = 4, Sxx = 5, n = 4
        let x = [0.0, 1.0, 2.0, 3.0];
        let y = [2.0, 0.5, 1.0, 3.5];
        let r = ols_univariate(&y, &x).unwrap();
        assert!((r.beta - 0.5).abs() < 1e-12);
        assert!((r.alpha - 1.0).abs() < 1e-12);
        let sigma2: f64 = 4.0 / 2.0;
        assert!((r.se_beta - (sigma2 / 5.0).sqrt()).abs() < 1e-12);
        assert!((r.se_alpha - (sigma2 * (0.25 + 2.25 / 5.0)).sqrt()).abs() < 1e-12);
        // two-sided p for t = 0.5/sqrt(0.4) with 2 dof: 1 - t/sqrt(2 + t^2)
        let t = 0.5 / 0.4f64.sqrt();
        assert!((r.p_beta - (1.0 - t / (2.0 + t * t).sqrt())).abs() < 1e-9);
        let resid_sum: f64 = r.residuals(&y, &x).iter().sum();
        assert!(resid_sum.abs() < 1e-12);
    }

    #[test]
    fn star_thresholds() {
        assert_eq!(stars(0.009), "***");
        assert_eq!(stars(0.01), "**");
        assert_eq!(stars(0.049), "**");
        assert_eq!(stars(0.05), "*");
        assert_eq!(stars(0.0999), "*");
        assert_eq!(stars(0.10), "");
    }

    #[test]
    fn standardize_examples() {
        let z = standardize(&[0.0, 2.0]).unwrap();
        assert!((z[0] + std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        assert!((z[1] - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        let again = standardize(&z).unwrap();
        assert!(again.iter().zip(&z).all(|(a, b)| (a - b).abs() < 1e-12));
        assert!(standardize(&[3.0, 3.0, 3.0]).is_err());
        assert!(standardize(&[1.0]).is_err());
    }
}

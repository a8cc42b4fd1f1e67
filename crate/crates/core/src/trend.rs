//! Linear time trends for the yearly lognormal parameters and point
//! forecasts from them.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::regression::{newey_west_lag, Covariance, SimpleOls};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Response {
    Mu,
    Sigma,
}

impl fmt::Display for Response {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Response::Mu => "mu",
            Response::Sigma => "sigma",
        })
    }
}

impl FromStr for Response {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "mu" => Ok(Response::Mu),
            "sigma" => Ok(Response::Sigma),
            _ => Err(Error::InvalidParameter(format!(
                "unknown trend response `{s}`"
            ))),
        }
    }
}

/// `estimate = α + β · year`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrendModel {
    pub response: Response,
    pub alpha: f64,
    pub beta: f64,
    pub se_alpha: f64,
    pub se_beta: f64,
    pub hac_se_alpha: f64,
    pub hac_se_beta: f64,
    pub hac_lag: usize,
    pub r_squared: f64,
    pub f_stat: f64,
    pub f_p_value: f64,
    pub n: usize,
}

impl TrendModel {
    pub fn predict(&self, year: i32) -> f64 {
        predict(self, year)
    }
}

/// OLS trend with classical and Newey–West standard errors at the default
/// lag. The series is sorted by year first.
pub fn fit_trend(series: &[(i32, f64)], response: Response) -> Result<TrendModel> {
    let n = series.len();
    fit_trend_with_lag(series, response, newey_west_lag(n))
}

pub fn fit_trend_with_lag(
    series: &[(i32, f64)],
    response: Response,
    hac_lag: usize,
) -> Result<TrendModel> {
    let mut sorted = series.to_vec();
    sorted.sort_by_key(|&(y, _)| y);
    if sorted.windows(2).any(|w| w[0].0 == w[1].0) {
        return Err(Error::InvalidParameter(
            "duplicate year in trend series".into(),
        ));
    }
    let x: Vec<f64> = sorted.iter().map(|&(y, _)| f64::from(y)).collect();
    let y: Vec<f64> = sorted.iter().map(|&(_, v)| v).collect();
    let ols = SimpleOls::fit(&x, &y)?;
    let plain = ols.std_errors(Covariance::Ols);
    let hac = ols.std_errors(Covariance::NeweyWest(hac_lag));
    let (f_stat, f_p_value) = ols.f_test();
    Ok(TrendModel {
        response,
        alpha: ols.alpha,
        beta: ols.beta,
        se_alpha: plain.alpha,
        se_beta: plain.beta,
        hac_se_alpha: hac.alpha,
        hac_se_beta: hac.beta,
        hac_lag,
        r_squared: ols.r_squared,
        f_stat,
        f_p_value,
        n: ols.n,
    })
}

pub fn predict(model: &TrendModel, year: i32) -> f64 {
    model.alpha + model.beta * f64::from(year)
}

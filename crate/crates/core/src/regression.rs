//! Simple linear regression `y = α + β x + u` with classical, White (HC0)
//! and Newey–West standard errors.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::special::{f_sf, t_two_sided_p};

/// Which coefficient covariance estimator to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Covariance {
    /// Homoskedastic OLS, residual variance with n − 2 divisor.
    #[default]
    Ols,
    /// White heteroskedasticity-consistent, no small-sample correction.
    Hc0,
    /// Newey–West with Bartlett weights up to the given lag.
    NeweyWest(usize),
}

/// Default Newey–West truncation lag, `floor(4 (n/100)^(2/9))`.
pub fn newey_west_lag(n: usize) -> usize {
    (4.0 * (n as f64 / 100.0).powf(2.0 / 9.0)).floor() as usize
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimpleOls {
    pub n: usize,
    pub alpha: f64,
    pub beta: f64,
    pub r_squared: f64,
    pub sse: f64,
    x: Vec<f64>,
    residuals: Vec<f64>,
    x_mean: f64,
    sxx: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StdErrors {
    pub alpha: f64,
    pub beta: f64,
}

impl SimpleOls {
    pub fn fit(x: &[f64], y: &[f64]) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::CountMismatch {
                expected: x.len(),
                actual: y.len(),
            });
        }
        let n = x.len();
        if n < 3 {
            return Err(Error::InsufficientData {
                required: 3,
                available: n,
            });
        }
        if x.iter().chain(y).any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(
                "non-finite regression input".into(),
            ));
        }
        let nf = n as f64;
        let x_mean = x.iter().sum::<f64>() / nf;
        let y_mean = y.iter().sum::<f64>() / nf;
        let mut sxx = 0.0;
        let mut sxy = 0.0;
        let mut syy = 0.0;
        for (xi, yi) in x.iter().zip(y) {
            let dx = xi - x_mean;
            let dy = yi - y_mean;
            sxx += dx * dx;
            sxy += dx * dy;
            syy += dy * dy;
        }
        if !(sxx > 0.0) {
            return Err(Error::DegenerateRegressor);
        }
        let beta = sxy / sxx;
        let alpha = y_mean - beta * x_mean;
        let residuals: Vec<f64> = x
            .iter()
            .zip(y)
            .map(|(xi, yi)| (yi - y_mean) - beta * (xi - x_mean))
            .collect();
        let sse: f64 = residuals.iter().map(|r| r * r).sum();
        let r_squared = if syy > 0.0 {
            (1.0 - sse / syy).clamp(0.0, 1.0)
        } else {
            1.0
        };
        Ok(Self {
            n,
            alpha,
            beta,
            r_squared,
            sse,
            x: x.to_vec(),
            residuals,
            x_mean,
            sxx,
        })
    }

    pub fn residuals(&self) -> &[f64] {
        &self.residuals
    }

    pub fn predict(&self, x: f64) -> f64 {
        self.alpha + self.beta * x
    }

    fn df(&self) -> f64 {
        (self.n - 2) as f64
    }

    pub fn std_errors(&self, cov: Covariance) -> StdErrors {
        let nf = self.n as f64;
        match cov {
            Covariance::Ols => {
                let s2 = self.sse / self.df();
                StdErrors {
                    alpha: (s2 * (1.0 / nf + self.x_mean * self.x_mean / self.sxx)).sqrt(),
                    beta: (s2 / self.sxx).sqrt(),
                }
            }
            Covariance::Hc0 => self.sandwich(0),
            Covariance::NeweyWest(lag) => self.sandwich(lag),
        }
    }

    /// Sandwich estimator in centred coordinates `[1, x − x̄]`, where the
    /// bread is diagonal; mapped back to `(α, β)` at the end.
    fn sandwich(&self, lag: usize) -> StdErrors {
        let nf = self.n as f64;
        let z: Vec<f64> = self.x.iter().map(|v| v - self.x_mean).collect();
        let u = &self.residuals;
        // meat S = Σ_l w_l Σ_t u_t u_{t−l} (g_t g_{t−l}' + g_{t−l} g_t'), g_t = [1, z_t]
        let (mut s00, mut s01, mut s11) = (0.0, 0.0, 0.0);
        for t in 0..self.n {
            let w = u[t] * u[t];
            s00 += w;
            s01 += w * z[t];
            s11 += w * z[t] * z[t];
        }
        for l in 1..=lag.min(self.n - 1) {
            let weight = 1.0 - l as f64 / (lag as f64 + 1.0);
            for t in l..self.n {
                let w = weight * u[t] * u[t - l];
                s00 += 2.0 * w;
                s01 += w * (z[t] + z[t - l]);
                s11 += 2.0 * w * z[t] * z[t - l];
            }
        }
        // centred coefficients (a, b): var a = s00/n², var b = s11/Sxx², cov = s01/(n Sxx)
        let var_a = s00 / (nf * nf);
        let var_b = s11 / (self.sxx * self.sxx);
        let cov_ab = s01 / (nf * self.sxx);
        // α = a − b x̄
        let var_alpha = var_a - 2.0 * self.x_mean * cov_ab + self.x_mean * self.x_mean * var_b;
        StdErrors {
            alpha: var_alpha.max(0.0).sqrt(),
            beta: var_b.max(0.0).sqrt(),
        }
    }

    /// Two-sided p-value of `β = null` with `n − 2` degrees of freedom.
    pub fn beta_test(&self, null: f64, cov: Covariance) -> (f64, f64) {
        let se = self.std_errors(cov).beta;
        let diff = self.beta - null;
        let t = if se > 0.0 {
            diff / se
        } else if diff == 0.0 {
            0.0
        } else {
            diff.signum() * f64::INFINITY
        };
        (t, t_two_sided_p(t, self.df()))
    }

    /// F statistic for global significance and its p-value, `F(1, n − 2)`.
    pub fn f_test(&self) -> (f64, f64) {
        let ssr = self.sxx * self.beta * self.beta;
        let f = if self.sse > 0.0 {
            ssr / (self.sse / self.df())
        } else if ssr > 0.0 {
            f64::INFINITY
        } else {
            0.0
        };
        (f, f_sf(f, 1.0, self.df()))
    }
}

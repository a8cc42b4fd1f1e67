//! Lognormality tests and plot-data emitters.
//!
//! Every test is applied to `log(data)` and checks normality there. The
//! p-values use the standard published approximations:
//!
//! - SW: Royston's AS R94 coefficients and normalizing transform (3 ≤ n ≤ 5000)
//! - SF: squared correlation with Blom scores, Royston's log-normal transform
//! - LL: Kolmogorov–Smirnov distance with estimated mean and sd,
//!   Dallal–Wilkinson p-values
//! - CVM, AD: Stephens' modified statistics for the case of both parameters
//!   estimated
//! - DP: D'Agostino's skewness and Anscombe–Glynn kurtosis z-scores, K² ~ χ²(2)
//! - JB: n(S²/6 + (K − 3)²/24) ~ χ²(2)

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::Serialize;

use crate::dist::SizeDist;
use crate::error::{Error, Result};
use crate::special::{chi2_2_sf, norm_cdf, norm_log_cdf, norm_quantile, norm_sf};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum TestId {
    #[serde(rename = "SW")]
    ShapiroWilk,
    #[serde(rename = "SF")]
    ShapiroFrancia,
    #[serde(rename = "LL")]
    Lilliefors,
    #[serde(rename = "CVM")]
    CramerVonMises,
    #[serde(rename = "AD")]
    AndersonDarling,
    #[serde(rename = "DP")]
    DagostinoPearson,
    #[serde(rename = "JB")]
    JarqueBera,
}

impl TestId {
    pub const ALL: [TestId; 7] = [
        TestId::ShapiroWilk,
        TestId::ShapiroFrancia,
        TestId::Lilliefors,
        TestId::CramerVonMises,
        TestId::AndersonDarling,
        TestId::DagostinoPearson,
        TestId::JarqueBera,
    ];

    pub fn code(self) -> &'static str {
        match self {
            TestId::ShapiroWilk => "SW",
            TestId::ShapiroFrancia => "SF",
            TestId::Lilliefors => "LL",
            TestId::CramerVonMises => "CVM",
            TestId::AndersonDarling => "AD",
            TestId::DagostinoPearson => "DP",
            TestId::JarqueBera => "JB",
        }
    }

    /// Admissible sample sizes `(min, max)`.
    pub fn valid_range(self) -> (usize, usize) {
        match self {
            TestId::ShapiroWilk => (3, 5000),
            TestId::ShapiroFrancia => (8, 5000),
            TestId::DagostinoPearson => (20, usize::MAX),
            _ => (8, usize::MAX),
        }
    }
}

impl fmt::Display for TestId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for TestId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TestId::ALL
            .into_iter()
            .find(|t| t.code().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidParameter(format!("unknown test `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TestReport {
    pub test: TestId,
    pub statistic: f64,
    pub p_value: f64,
    pub reject_05: bool,
    pub reject_01: bool,
}

impl TestReport {
    fn new(test: TestId, statistic: f64, p_value: f64) -> Self {
        let p_value = p_value.clamp(0.0, 1.0);
        Self {
            test,
            statistic,
            p_value,
            reject_05: p_value < 0.05,
            reject_01: p_value < 0.01,
        }
    }

    pub fn rejects_at(&self, alpha: f64) -> bool {
        self.p_value < alpha
    }
}

/// Runs `test` on `log(data)`.
pub fn test_lognormality(test: TestId, data: &[f64]) -> Result<TestReport> {
    if let Some((index, &value)) = data
        .iter()
        .enumerate()
        .find(|(_, v)| !(**v > 0.0 && v.is_finite()))
    {
        return Err(Error::NonPositive { index, value });
    }
    let logs: Vec<f64> = data.iter().map(|x| x.ln()).collect();
    test_normality(test, &logs)
}

/// Runs every test on `log(data)`; tests whose size range excludes `n` are
/// skipped.
pub fn test_all(data: &[f64]) -> Result<Vec<TestReport>> {
    let mut out = Vec::new();
    for t in TestId::ALL {
        let (lo, hi) = t.valid_range();
        if data.len() >= lo && data.len() <= hi {
            out.push(test_lognormality(t, data)?);
        }
    }
    Ok(out)
}

/// Runs `test` on `values` directly (no log transform).
pub fn test_normality(test: TestId, values: &[f64]) -> Result<TestReport> {
    let n = values.len();
    let (lo, hi) = test.valid_range();
    if n < lo {
        return Err(Error::InsufficientData {
            required: lo,
            available: n,
        });
    }
    if n > hi {
        return Err(Error::InvalidParameter(format!(
            "{test} supports at most {hi} observations, got {n}"
        )));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter("non-finite value".into()));
    }
    let mut x = values.to_vec();
    x.sort_by(f64::total_cmp);
    if x[n - 1] - x[0] <= 0.0 {
        return Err(Error::InvalidParameter("sample has zero spread".into()));
    }
    let (stat, p) = match test {
        TestId::ShapiroWilk => shapiro_wilk(&x),
        TestId::ShapiroFrancia => shapiro_francia(&x),
        TestId::Lilliefors => lilliefors(&x),
        TestId::CramerVonMises => cramer_von_mises(&x),
        TestId::AndersonDarling => anderson_darling(&x),
        TestId::DagostinoPearson => dagostino_pearson(&x),
        TestId::JarqueBera => jarque_bera(&x),
    };
    Ok(TestReport::new(test, stat, p))
}

fn mean_sd(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let var = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Divide-by-n central moments (m2, m3, m4).
fn central_moments(x: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for v in x {
        let d = v - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    (m2 / n, m3 / n, m4 / n)
}

fn poly(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

/// Blom scores Φ⁻¹((i − 3/8)/(n + 1/4)), i = 1..n.
fn blom_scores(n: usize) -> Vec<f64> {
    let an = n as f64 + 0.25;
    (1..=n)
        .map(|i| norm_quantile((i as f64 - 0.375) / an))
        .collect()
}

/// Squared correlation of two vectors, returned as `1 − r²` computed to
/// avoid cancellation when `r²` is close to one.
fn one_minus_r2(a: &[f64], x: &[f64]) -> f64 {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mx = x.iter().sum::<f64>() / n;
    let (mut saa, mut sxx, mut sax) = (0.0, 0.0, 0.0);
    for (ai, xi) in a.iter().zip(x) {
        let da = ai - ma;
        let dx = xi - mx;
        saa += da * da;
        sxx += dx * dx;
        sax += da * dx;
    }
    let root = (saa * sxx).sqrt();
    ((root - sax) * (root + sax) / (saa * sxx)).max(0.0)
}

fn shapiro_wilk(x: &[f64]) -> (f64, f64) {
    const C1: [f64; 6] = [0.0, 0.221157, -0.147981, -2.071190, 4.434685, -2.706056];
    const C2: [f64; 6] = [0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633];
    const C3: [f64; 4] = [0.5440, -0.39978, 0.025054, -6.714e-4];
    const C4: [f64; 4] = [1.3822, -0.77857, 0.062767, -0.0020322];
    const C5: [f64; 4] = [-1.5861, -0.31082, -0.083751, 0.0038915];
    const C6: [f64; 3] = [-0.4803, -0.082676, 0.0030302];
    const G: [f64; 2] = [-2.273, 0.459];

    let n = x.len();
    let nf = n as f64;
    let mut a = vec![0.0; n];
    if n == 3 {
        a[0] = -std::f64::consts::FRAC_1_SQRT_2;
        a[2] = std::f64::consts::FRAC_1_SQRT_2;
    } else {
        let m = blom_scores(n);
        let summ2: f64 = m.iter().map(|v| v * v).sum();
        let ssumm2 = summ2.sqrt();
        let rsn = 1.0 / nf.sqrt();
        let a_n = poly(&C1, rsn) + m[n - 1] / ssumm2;
        let (first_free, fac) = if n > 5 {
            let a_n1 = poly(&C2, rsn) + m[n - 2] / ssumm2;
            a[n - 2] = a_n1;
            let fac = ((summ2 - 2.0 * m[n - 1].powi(2) - 2.0 * m[n - 2].powi(2))
                / (1.0 - 2.0 * a_n.powi(2) - 2.0 * a_n1.powi(2)))
            .sqrt();
            (2, fac)
        } else {
            let fac = ((summ2 - 2.0 * m[n - 1].powi(2)) / (1.0 - 2.0 * a_n.powi(2))).sqrt();
            (1, fac)
        };
        a[n - 1] = a_n;
        for i in first_free..n / 2 {
            a[n - 1 - i] = m[n - 1 - i] / fac;
        }
        for i in 0..n / 2 {
            a[i] = -a[n - 1 - i];
        }
    }
    let w1 = one_minus_r2(&a, x);
    let w = 1.0 - w1;

    if n == 3 {
        // asin(√0.75) = π/3
        let p =
            (6.0 / std::f64::consts::PI * (w.sqrt().asin() - std::f64::consts::FRAC_PI_3)).max(0.0);
        return (w, p);
    }
    let log_w1 = w1.ln();
    let (y, mean, sd) = if n <= 11 {
        let gamma = poly(&G, nf);
        if log_w1 >= gamma {
            return (w, 1e-99);
        }
        (-(gamma - log_w1).ln(), poly(&C3, nf), poly(&C4, nf).exp())
    } else {
        let ln_n = nf.ln();
        (log_w1, poly(&C5, ln_n), poly(&C6, ln_n).exp())
    };
    (w, norm_sf((y - mean) / sd))
}

fn shapiro_francia(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let scores = blom_scores(x.len());
    let w1 = one_minus_r2(&scores, x);
    let u = n.ln();
    let v = u.ln();
    let mu = -1.2725 + 1.0521 * (v - u);
    let sig = 1.0308 - 0.26758 * (v + 2.0 / u);
    (1.0 - w1, norm_sf((w1.ln() - mu) / sig))
}

fn lilliefors(x: &[f64]) -> (f64, f64) {
    let n = x.len();
    let nf = n as f64;
    let (mean, sd) = mean_sd(x);
    let mut d_plus = f64::NEG_INFINITY;
    let mut d_minus = f64::NEG_INFINITY;
    for (i, v) in x.iter().enumerate() {
        let p = norm_cdf((v - mean) / sd);
        d_plus = d_plus.max((i + 1) as f64 / nf - p);
        d_minus = d_minus.max(p - i as f64 / nf);
    }
    let k = d_plus.max(d_minus);
    let (kd, nd) = if n <= 100 {
        (k, nf)
    } else {
        (k * (nf / 100.0).powf(0.49), 100.0)
    };
    let mut p = (-7.01256 * kd * kd * (nd + 2.78019) + 2.99587 * kd * (nd + 2.78019).sqrt()
        - 0.122119
        + 0.974598 / nd.sqrt()
        + 1.67997 / nd)
        .exp();
    if p > 0.1 {
        let kk = (nf.sqrt() - 0.01 + 0.85 / nf.sqrt()) * k;
        p = if kk <= 0.302 {
            1.0
        } else if kk <= 0.5 {
            poly(&[2.76773, -19.828, 80.709, -138.55, 81.218], kk)
        } else if kk <= 0.9 {
            poly(
                &[-4.901232, 40.662806, -97.490286, 94.029866, -32.355711],
                kk,
            )
        } else if kk <= 1.31 {
            poly(&[6.198765, -19.558097, 23.186922, -12.234627, 2.423045], kk)
        } else {
            0.0
        };
    }
    (k, p)
}

fn cramer_von_mises(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let (mean, sd) = mean_sd(x);
    let w: f64 = 1.0 / (12.0 * n)
        + x.iter()
            .enumerate()
            .map(|(i, v)| {
                let p = norm_cdf((v - mean) / sd);
                (p - (2.0 * i as f64 + 1.0) / (2.0 * n)).powi(2)
            })
            .sum::<f64>();
    let ww = (1.0 + 0.5 / n) * w;
    let p = if ww < 0.0275 {
        1.0 - (-13.953 + 775.5 * ww - 12542.61 * ww * ww).exp()
    } else if ww < 0.051 {
        1.0 - (-5.903 + 179.546 * ww - 1515.29 * ww * ww).exp()
    } else if ww < 0.092 {
        (0.886 - 31.62 * ww + 10.897 * ww * ww).exp()
    } else if ww < 1.1 {
        (1.111 - 34.242 * ww + 12.832 * ww * ww).exp()
    } else {
        7.37e-10
    };
    (w, p)
}

fn anderson_darling(x: &[f64]) -> (f64, f64) {
    let n = x.len();
    let nf = n as f64;
    let (mean, sd) = mean_sd(x);
    let z: Vec<f64> = x.iter().map(|v| (v - mean) / sd).collect();
    let h: f64 = (0..n)
        .map(|i| (2.0 * i as f64 + 1.0) * (norm_log_cdf(z[i]) + norm_log_cdf(-z[n - 1 - i])))
        .sum();
    let a = -nf - h / nf;
    let aa = (1.0 + 0.75 / nf + 2.25 / (nf * nf)) * a;
    let p = if aa < 0.2 {
        1.0 - (-13.436 + 101.14 * aa - 223.73 * aa * aa).exp()
    } else if aa < 0.34 {
        1.0 - (-8.318 + 42.796 * aa - 59.938 * aa * aa).exp()
    } else if aa < 0.6 {
        (0.9177 - 4.279 * aa - 1.38 * aa * aa).exp()
    } else if aa < 10.0 {
        (1.2937 - 5.709 * aa + 0.0186 * aa * aa).exp()
    } else {
        3.7e-24
    };
    (a, p)
}

/// D'Agostino's z-score for sample skewness √b₁.
fn skewness_z(sqrt_b1: f64, n: f64) -> f64 {
    let y = sqrt_b1 * ((n + 1.0) * (n + 3.0) / (6.0 * (n - 2.0))).sqrt();
    let beta2 = 3.0 * (n * n + 27.0 * n - 70.0) * (n + 1.0) * (n + 3.0)
        / ((n - 2.0) * (n + 5.0) * (n + 7.0) * (n + 9.0));
    let w2 = -1.0 + (2.0 * (beta2 - 1.0)).sqrt();
    let delta = 1.0 / (0.5 * w2.ln()).sqrt();
    let alpha = (2.0 / (w2 - 1.0)).sqrt();
    let t = y / alpha;
    delta * (t + (t * t + 1.0).sqrt()).ln()
}

/// Anscombe–Glynn z-score for sample kurtosis b₂.
fn kurtosis_z(b2: f64, n: f64) -> f64 {
    let mean = 3.0 * (n - 1.0) / (n + 1.0);
    let var = 24.0 * n * (n - 2.0) * (n - 3.0) / ((n + 1.0).powi(2) * (n + 3.0) * (n + 5.0));
    let x = (b2 - mean) / var.sqrt();
    let moment = 6.0 * (n * n - 5.0 * n + 2.0) / ((n + 7.0) * (n + 9.0))
        * (6.0 * (n + 3.0) * (n + 5.0) / (n * (n - 2.0) * (n - 3.0))).sqrt();
    let a = 6.0 + 8.0 / moment * (2.0 / moment + (1.0 + 4.0 / (moment * moment)).sqrt());
    let term = (1.0 - 2.0 / a) / (1.0 + x * (2.0 / (a - 4.0)).sqrt());
    ((1.0 - 2.0 / (9.0 * a)) - term.cbrt()) / (2.0 / (9.0 * a)).sqrt()
}

fn dagostino_pearson(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let (m2, m3, m4) = central_moments(x);
    let zs = skewness_z(m3 / m2.powf(1.5), n);
    let zk = kurtosis_z(m4 / (m2 * m2), n);
    let k2 = zs * zs + zk * zk;
    (k2, chi2_2_sf(k2))
}

fn jarque_bera(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let (m2, m3, m4) = central_moments(x);
    let s = m3 / m2.powf(1.5);
    let k = m4 / (m2 * m2);
    let jb = n * (s * s / 6.0 + (k - 3.0).powi(2) / 24.0);
    (jb, chi2_2_sf(jb))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PlotKind {
    Qq,
    RankSize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Reference {
    /// `y = intercept + slope · x`
    Line { intercept: f64, slope: f64 },
    /// Fitted lognormal whose scaled survival curve is drawn.
    LogNormal { mu: f64, sigma: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlotPoint {
    pub x: f64,
    pub y: f64,
    pub series: &'static str,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlotSeries {
    pub kind: PlotKind,
    pub points: Vec<PlotPoint>,
    pub reference: Reference,
}

/// Normal Q–Q data for `log(data)`: Blom scores against sorted logs, with
/// the least-squares line through the points as reference.
pub fn qq_plot_data(data: &[f64]) -> Result<PlotSeries> {
    if data.is_empty() {
        return Err(Error::InsufficientData {
            required: 1,
            available: 0,
        });
    }
    if let Some((index, &value)) = data
        .iter()
        .enumerate()
        .find(|(_, v)| !(**v > 0.0 && v.is_finite()))
    {
        return Err(Error::NonPositive { index, value });
    }
    let mut logs: Vec<f64> = data.iter().map(|x| x.ln()).collect();
    logs.sort_by(f64::total_cmp);
    let scores = blom_scores(logs.len());
    let n = logs.len() as f64;
    let mx = scores.iter().sum::<f64>() / n;
    let my = logs.iter().sum::<f64>() / n;
    let sxx: f64 = scores.iter().map(|s| (s - mx).powi(2)).sum();
    let sxy: f64 = scores
        .iter()
        .zip(&logs)
        .map(|(s, l)| (s - mx) * (l - my))
        .sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    Ok(PlotSeries {
        kind: PlotKind::Qq,
        points: scores
            .iter()
            .zip(&logs)
            .map(|(&x, &y)| PlotPoint {
                x,
                y,
                series: "sample",
            })
            .collect(),
        reference: Reference::Line {
            intercept: my - slope * mx,
            slope,
        },
    })
}

/// Number of grid points on the fitted rank-size curve.
pub const RANK_SIZE_GRID: usize = 200;

/// Rank-size data: empirical pairs `(x₍ᵢ₎, N + 1 − i)` and the fitted curve
/// `(x, (N + 1)(1 − F(x)))` on a log-spaced grid over the sample range.
pub fn rank_size_plot_data(data: &[f64], fitted: &SizeDist) -> Result<PlotSeries> {
    let SizeDist::LogNormal { mu, sigma } = *fitted else {
        return Err(Error::InvalidParameter(
            "rank-size reference must be a lognormal fit".into(),
        ));
    };
    if data.is_empty() {
        return Err(Error::InsufficientData {
            required: 1,
            available: 0,
        });
    }
    if let Some((index, &value)) = data
        .iter()
        .enumerate()
        .find(|(_, v)| !(**v > 0.0 && v.is_finite()))
    {
        return Err(Error::NonPositive { index, value });
    }
    let mut x = data.to_vec();
    x.sort_by(f64::total_cmp);
    let n = x.len();
    let scale = (n + 1) as f64;
    let mut points: Vec<PlotPoint> = x
        .iter()
        .enumerate()
        .map(|(i, &v)| PlotPoint {
            x: v,
            y: (n - i) as f64,
            series: "empirical",
        })
        .collect();
    let (lo, hi) = (x[0].ln(), x[n - 1].ln());
    for k in 0..RANK_SIZE_GRID {
        let t = if RANK_SIZE_GRID > 1 {
            k as f64 / (RANK_SIZE_GRID - 1) as f64
        } else {
            0.0
        };
        let v = (lo + t * (hi - lo)).exp();
        points.push(PlotPoint {
            x: v,
            y: scale * fitted.sf(v),
            series: "fitted",
        });
    }
    Ok(PlotSeries {
        kind: PlotKind::RankSize,
        points,
        reference: Reference::LogNormal { mu, sigma },
    })
}

impl PlotSeries {
    /// `x,y,series` CSV.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["x", "y", "series"])?;
        for p in &self.points {
            w.write_record([
                format!("{:?}", p.x),
                format!("{:?}", p.y),
                p.series.to_string(),
            ])?;
        }
        if let Reference::Line { intercept, slope } = self.reference {
            for x in [self.points.first(), self.points.last()]
                .into_iter()
                .flatten()
                .map(|p| p.x)
            {
                w.write_record([
                    format!("{x:?}"),
                    format!("{:?}", intercept + slope * x),
                    "reference".into(),
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    }

    /// Minimal SVG scatter plot; rank-size plots use log–log axes.
    pub fn to_svg(&self) -> String {
        const W: f64 = 480.0;
        const H: f64 = 360.0;
        const PAD: f64 = 40.0;
        let log_axes = self.kind == PlotKind::RankSize;
        let tx = |v: f64| if log_axes { v.log10() } else { v };
        let pts: Vec<(f64, f64, &str)> = self
            .points
            .iter()
            .filter(|p| !log_axes || (p.x > 0.0 && p.y > 0.0))
            .map(|p| (tx(p.x), tx(p.y), p.series))
            .collect();
        let (mut x0, mut x1, mut y0, mut y1) = (
            f64::INFINITY,
            f64::NEG_INFINITY,
            f64::INFINITY,
            f64::NEG_INFINITY,
        );
        for &(x, y, _) in &pts {
            x0 = x0.min(x);
            x1 = x1.max(x);
            y0 = y0.min(y);
            y1 = y1.max(y);
        }
        if x1.is_nan() || x1 <= x0 {
            x1 = x0 + 1.0;
        }
        if y1.is_nan() || y1 <= y0 {
            y1 = y0 + 1.0;
        }
        let sx = |x: f64| PAD + (x - x0) / (x1 - x0) * (W - 2.0 * PAD);
        let sy = |y: f64| H - PAD - (y - y0) / (y1 - y0) * (H - 2.0 * PAD);
        let mut svg = format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\">\n\
             <rect x=\"{PAD}\" y=\"{PAD}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n",
            W - 2.0 * PAD,
            H - 2.0 * PAD
        );
        for &(x, y, series) in &pts {
            let (color, r) = if series == "fitted" {
                ("red", 1.0)
            } else {
                ("black", 2.0)
            };
            svg.push_str(&format!(
                "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"{r}\" fill=\"{color}\"/>\n",
                sx(x),
                sy(y)
            ));
        }
        if let Reference::Line { intercept, slope } = self.reference {
            svg.push_str(&format!(
                "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"red\"/>\n",
                sx(x0),
                sy(intercept + slope * x0),
                sx(x1),
                sy(intercept + slope * x1)
            ));
        }
        svg.push_str("</svg>\n");
        svg
    }
}

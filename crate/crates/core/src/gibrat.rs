//! Gibrat's law of proportionate effect: the four year-on-year regressions
//! and a simulator for the multiplicative growth process.
//!
//! | method | response              | regressor               | null  |
//! |--------|-----------------------|-------------------------|-------|
//! | M1     | log S_t               | log S_{t−1}             | β = 1 |
//! | M2     | S_t / S_{t−1}         | (S_t + S_{t−1}) / 2     | β = 0 |
//! | M3     | S_t / S_{t−1}         | S_{t−1}                 | β = 0 |
//! | M4     | log(S_t / S_{t−1})    | S_{t−1}                 | β = 0 |

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::Serialize;

use crate::dist::SizeDist;
use crate::error::{Error, Result};
use crate::ingest::EmissionsPanel;
use crate::regression::{Covariance, SimpleOls};

/// Paired sizes of the same countries in two consecutive periods.
#[derive(Debug, Clone, PartialEq)]
pub struct GrowthSample {
    pub year_from: i32,
    pub year_to: i32,
    pub countries: Vec<String>,
    pub previous: Vec<f64>,
    pub current: Vec<f64>,
}

impl GrowthSample {
    pub fn from_pairs(
        year_from: i32,
        year_to: i32,
        previous: Vec<f64>,
        current: Vec<f64>,
    ) -> Result<Self> {
        if previous.len() != current.len() {
            return Err(Error::MismatchedSamples);
        }
        if let Some((index, &value)) = previous
            .iter()
            .chain(&current)
            .enumerate()
            .find(|(_, v)| !(**v > 0.0 && v.is_finite()))
        {
            return Err(Error::NonPositive {
                index: index % previous.len().max(1),
                value,
            });
        }
        if previous.len() < 3 {
            return Err(Error::InsufficientData {
                required: 3,
                available: previous.len(),
            });
        }
        let countries = (1..=previous.len()).map(|i| format!("#{i}")).collect();
        Ok(Self {
            year_from,
            year_to,
            countries,
            previous,
            current,
        })
    }

    pub fn len(&self) -> usize {
        self.previous.len()
    }

    pub fn is_empty(&self) -> bool {
        self.previous.is_empty()
    }

    pub fn label(&self) -> String {
        format!("{}-{}", self.year_from, self.year_to)
    }
}

/// Pairs every country observed (and positive) in both years.
pub fn build_growth_sample(
    panel: &EmissionsPanel,
    year_from: i32,
    year_to: i32,
) -> Result<GrowthSample> {
    for y in [year_from, year_to] {
        if panel.year_index(y).is_none() {
            return Err(Error::UnknownYear(y));
        }
    }
    let mut countries = Vec::new();
    let mut previous = Vec::new();
    let mut current = Vec::new();
    for c in panel.countries() {
        if let (Some(a), Some(b)) = (panel.get(c, year_from), panel.get(c, year_to)) {
            countries.push(c.clone());
            previous.push(a);
            current.push(b);
        }
    }
    if countries.len() < 3 {
        return Err(Error::InsufficientData {
            required: 3,
            available: countries.len(),
        });
    }
    Ok(GrowthSample {
        year_from,
        year_to,
        countries,
        previous,
        current,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum GibratMethod {
    M1,
    M2,
    M3,
    M4,
}

impl GibratMethod {
    pub const ALL: [GibratMethod; 4] = [
        GibratMethod::M1,
        GibratMethod::M2,
        GibratMethod::M3,
        GibratMethod::M4,
    ];

    pub fn null_value(self) -> f64 {
        match self {
            GibratMethod::M1 => 1.0,
            _ => 0.0,
        }
    }

    fn variables(self, prev: f64, curr: f64) -> (f64, f64) {
        match self {
            GibratMethod::M1 => (prev.ln(), curr.ln()),
            GibratMethod::M2 => ((curr + prev) / 2.0, curr / prev),
            GibratMethod::M3 => (prev, curr / prev),
            GibratMethod::M4 => (prev, (curr / prev).ln()),
        }
    }
}

impl fmt::Display for GibratMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl FromStr for GibratMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        GibratMethod::ALL
            .into_iter()
            .find(|m| m.to_string().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidParameter(format!("unknown Gibrat method `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GibratFit {
    pub method: GibratMethod,
    pub alpha: f64,
    pub beta: f64,
    pub se_beta: f64,
    pub null_value: f64,
    pub t_stat: f64,
    pub p_value: f64,
    pub n: usize,
}

impl GibratFit {
    pub fn rejects_at(&self, level: f64) -> bool {
        self.p_value < level
    }
}

pub fn fit_gibrat(method: GibratMethod, sample: &GrowthSample) -> Result<GibratFit> {
    fit_gibrat_with(method, sample, Covariance::Ols)
}

/// As [`fit_gibrat`], with a choice of standard-error estimator (e.g.
/// [`Covariance::Hc0`] for a heteroskedasticity check).
pub fn fit_gibrat_with(
    method: GibratMethod,
    sample: &GrowthSample,
    cov: Covariance,
) -> Result<GibratFit> {
    let (x, y): (Vec<f64>, Vec<f64>) = sample
        .previous
        .iter()
        .zip(&sample.current)
        .map(|(&p, &c)| method.variables(p, c))
        .unzip();
    let ols = SimpleOls::fit(&x, &y)?;
    let null_value = method.null_value();
    let (t_stat, p_value) = ols.beta_test(null_value, cov);
    Ok(GibratFit {
        method,
        alpha: ols.alpha,
        beta: ols.beta,
        se_beta: ols.std_errors(cov).beta,
        null_value,
        t_stat,
        p_value,
        n: ols.n,
    })
}

/// Simulates `S_{i,t} = S_{i,t−1} exp(ε_{i,t})`, `ε ~ N(0, shock_sd²)`.
///
/// Countries are named `C0001…`, years run `0..n_years`; `initial` draws the
/// year-0 cross-section. A zero `shock_sd` gives constant trajectories.
pub fn simulate_gibrat(
    n_countries: usize,
    n_years: usize,
    initial: &SizeDist,
    shock_sd: f64,
    seed: u64,
) -> Result<EmissionsPanel> {
    if n_countries == 0 {
        return Err(Error::InvalidParameter("need at least one country".into()));
    }
    if n_years < 2 {
        return Err(Error::InvalidParameter(format!(
            "need at least two years, got {n_years}"
        )));
    }
    if !(shock_sd >= 0.0 && shock_sd.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "shock sd must be finite and non-negative, got {shock_sd}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let start = initial.sample_with(&mut rng, n_countries);
    let shock = Normal::new(0.0, shock_sd).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let mut values = Vec::with_capacity(n_countries);
    for s0 in start {
        let mut log_s = s0.ln();
        let mut row = Vec::with_capacity(n_years);
        row.push(Some(s0));
        for _ in 1..n_years {
            log_s += shock.sample(&mut rng);
            row.push(Some(log_s.exp()));
        }
        values.push(row);
    }
    let width = n_countries.to_string().len().max(4);
    let countries = (1..=n_countries).map(|i| format!("C{i:0width$}")).collect();
    let years = (0..n_years as i32).collect();
    EmissionsPanel::new(countries, years, values)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn proportional(c: f64) -> GrowthSample {
        let prev: Vec<f64> = (0..50).map(|i| 0.3 * 1.37f64.powi(i)).collect();
        let curr = prev.iter().map(|p| c * p).collect();
        GrowthSample::from_pairs(2000, 2001, prev, curr).unwrap()
    }

    #[test]
    fn noiseless_growth_is_exact() {
        let s = proportional(1.03);
        let m1 = fit_gibrat(GibratMethod::M1, &s).unwrap();
        assert!((m1.beta - 1.0).abs() < 1e-12 && (m1.alpha - 1.03f64.ln()).abs() < 1e-12);
        let m3 = fit_gibrat(GibratMethod::M3, &s).unwrap();
        assert!(m3.beta.abs() < 1e-12 && (m3.alpha - 1.03).abs() < 1e-12);
        let m4 = fit_gibrat(GibratMethod::M4, &s).unwrap();
        assert!(m4.beta.abs() < 1e-12 && (m4.alpha - 1.03f64.ln()).abs() < 1e-12);
        let m2 = fit_gibrat(GibratMethod::M2, &s).unwrap();
        assert!(m2.beta.abs() < 1e-12 && (m2.alpha - 1.03).abs() < 1e-12);
    }

    #[test]
    fn growth_sample_from_panel() {
        let panel = EmissionsPanel::new(
            vec!["A".into(), "B".into(), "C".into(), "D".into()],
            vec![1970, 1971],
            vec![
                vec![Some(1.0), Some(1.1)],
                vec![Some(2.0), None],
                vec![Some(3.0), Some(3.3)],
                vec![Some(4.0), Some(4.2)],
            ],
        )
        .unwrap();
        let s = build_growth_sample(&panel, 1970, 1971).unwrap();
        assert_eq!(s.countries, vec!["A", "C", "D"]);
        assert_eq!(s.previous, vec![1.0, 3.0, 4.0]);
        assert!(matches!(
            build_growth_sample(&panel, 1970, 1972),
            Err(Error::UnknownYear(1972))
        ));
        let small = panel.select_years(1970, 1971);
        let two = EmissionsPanel::new(
            small.countries()[..2].to_vec(),
            vec![1970, 1971],
            vec![vec![Some(1.0), Some(1.0)], vec![Some(2.0), None]],
        )
        .unwrap();
        assert!(matches!(
            build_growth_sample(&two, 1970, 1971),
            Err(Error::InsufficientData {
                required: 3,
                available: 1
            })
        ));
    }

    #[test]
    fn simulation_basics() {
        let init = SizeDist::lognormal(2.0, 1.0).unwrap();
        let flat = simulate_gibrat(10, 5, &init, 0.0, 7).unwrap();
        for c in flat.countries() {
            let first = flat.get(c, 0).unwrap();
            assert!((0..5).all(|y| flat.get(c, y) == Some(first)));
        }
        let a = simulate_gibrat(20, 10, &init, 0.1, 3).unwrap();
        let b = simulate_gibrat(20, 10, &init, 0.1, 3).unwrap();
        assert_eq!(a, b);
        assert!(simulate_gibrat(20, 1, &init, 0.1, 3).is_err());
        assert!(simulate_gibrat(20, 3, &init, -0.1, 3).is_err());
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(48))]

        #[test]
        fn rescaling_invariances(seed in 0u64..10_000, c in 1e-3f64..1e3) {
            let init = SizeDist::lognormal(3.0, 1.5).unwrap();
            let panel = simulate_gibrat(40, 2, &init, 0.1, seed).unwrap();
            let s = build_growth_sample(&panel, 0, 1).unwrap();
            let scaled = GrowthSample::from_pairs(
                0, 1,
                s.previous.iter().map(|v| v * c).collect(),
                s.current.iter().map(|v| v * c).collect(),
            ).unwrap();
            let tol = 1e-9;
            let a = fit_gibrat(GibratMethod::M1, &s).unwrap();
            let b = fit_gibrat(GibratMethod::M1, &scaled).unwrap();
            proptest::prop_assert!((a.beta - b.beta).abs() < tol);
            for m in [GibratMethod::M3, GibratMethod::M4] {
                let a = fit_gibrat(m, &s).unwrap();
                let b = fit_gibrat(m, &scaled).unwrap();
                proptest::prop_assert!((a.beta - b.beta * c).abs() <= tol * a.beta.abs().max(1e-300));
                proptest::prop_assert!((a.t_stat - b.t_stat).abs() <= tol * a.t_stat.abs().max(1.0));
                proptest::prop_assert!((a.p_value - b.p_value).abs() <= tol);
            }
        }
    }
}

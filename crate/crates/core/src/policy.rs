//! Lognormal target allocation.
//!
//! Target-year emissions of the country ranked `i` (ascending) are the
//! lognormal quantile `exp(μ_t + σ_t Φ⁻¹(i/(N+1)))`. Summed over countries
//! and divided by base-year world emissions this gives the global ratio `R`;
//! divided by the country's own reference-year emissions it gives its
//! national target `r_i`.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::dist::SizeDist;
use crate::error::{Error, Result};
use crate::numeric::{brent_root, integrate_positive_log_scale};
use crate::special::norm_quantile;

/// Initial bracket for σ when solving for it.
pub const SIGMA_BRACKET: (f64, f64) = (1e-6, 50.0);
const BRACKET_EXPANSIONS: usize = 8;

fn check_positive(values: &[f64]) -> Result<()> {
    if values.is_empty() {
        return Err(Error::InsufficientData {
            required: 1,
            available: 0,
        });
    }
    match values
        .iter()
        .enumerate()
        .find(|(_, v)| !(**v > 0.0 && v.is_finite()))
    {
        Some((index, &value)) => Err(Error::NonPositive { index, value }),
        None => Ok(()),
    }
}

fn check_lognormal(mu: f64, sigma: f64) -> Result<()> {
    if !mu.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "mu must be finite, got {mu}"
        )));
    }
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "sigma must be positive, got {sigma}"
        )));
    }
    Ok(())
}

/// Normal scores Φ⁻¹(i/(N+1)), i = 1..N.
pub fn plotting_scores(n: usize) -> Vec<f64> {
    let denom = (n + 1) as f64;
    (1..=n).map(|i| norm_quantile(i as f64 / denom)).collect()
}

/// log Σ exp(σ zᵢ)
fn log_sum_exp_scaled(scores: &[f64], sigma: f64) -> f64 {
    let max = scores
        .iter()
        .fold(f64::NEG_INFINITY, |m, z| m.max(sigma * z));
    max + scores
        .iter()
        .map(|z| (sigma * z - max).exp())
        .sum::<f64>()
        .ln()
}

fn log_total(base: &[f64]) -> f64 {
    base.iter().sum::<f64>().ln()
}

/// Global ratio `R = Σ exp(μ + σ Φ⁻¹(i/(N+1))) / Σ x_{i1}`.
pub fn compute_r(mu: f64, sigma: f64, base_emissions: &[f64]) -> Result<f64> {
    check_lognormal(mu, sigma)?;
    check_positive(base_emissions)?;
    let scores = plotting_scores(base_emissions.len());
    Ok((mu + log_sum_exp_scaled(&scores, sigma) - log_total(base_emissions)).exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FreeParameter {
    Mu,
    Sigma,
}

impl fmt::Display for FreeParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FreeParameter::Mu => "mu",
            FreeParameter::Sigma => "sigma",
        })
    }
}

impl FromStr for FreeParameter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "mu" => Ok(FreeParameter::Mu),
            "sigma" => Ok(FreeParameter::Sigma),
            _ => Err(Error::InvalidParameter(format!(
                "free parameter must be mu or sigma, got `{s}`"
            ))),
        }
    }
}

/// Value of the free parameter giving `compute_r(..) = r_target`, with the
/// other one held at `fixed_value`.
///
/// μ has a closed form. R is increasing in σ from `N e^μ / Σx` (σ → 0)
/// upwards, so σ is found by Brent's method on `log R`; the bracket starts at
/// [`SIGMA_BRACKET`] and is widened geometrically a few times before giving
/// up with [`Error::NoRootInBracket`].
pub fn solve_parameter(
    free: FreeParameter,
    fixed_value: f64,
    r_target: f64,
    base_emissions: &[f64],
) -> Result<f64> {
    if !(r_target > 0.0 && r_target.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "target ratio must be positive, got {r_target}"
        )));
    }
    check_positive(base_emissions)?;
    let scores = plotting_scores(base_emissions.len());
    let goal = r_target.ln() + log_total(base_emissions);
    match free {
        FreeParameter::Mu => {
            check_lognormal(0.0, fixed_value)?;
            Ok(goal - log_sum_exp_scaled(&scores, fixed_value))
        }
        FreeParameter::Sigma => {
            check_lognormal(fixed_value, 1.0)?;
            let g = |s: f64| fixed_value + log_sum_exp_scaled(&scores, s) - goal;
            let (mut lo, mut hi) = SIGMA_BRACKET;
            let mut last = None;
            for _ in 0..=BRACKET_EXPANSIONS {
                match brent_root(g, lo, hi, 1e-15, 500) {
                    Ok(s) => return Ok(s),
                    Err(e) => last = Some(e),
                }
                lo /= 10.0;
                hi *= 2.0;
            }
            let e = last.expect("at least one attempt");
            Err(Error::NoRootInBracket {
                lower: e.lower,
                upper: e.upper,
                f_lower: e.f_lower,
                f_upper: e.f_upper,
            })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EmissionGroup {
    /// `r_i > 1`: may increase emissions.
    LowEmission,
    /// `R ≤ r_i ≤ 1`
    MiddleEmission,
    /// `r_i < R`: must cut by more than the world as a whole.
    HighEmission,
}

impl EmissionGroup {
    pub fn classify(r_i: f64, r_target: f64) -> Self {
        if r_i > 1.0 {
            EmissionGroup::LowEmission
        } else if r_i >= r_target {
            EmissionGroup::MiddleEmission
        } else {
            EmissionGroup::HighEmission
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            EmissionGroup::LowEmission => "low_emission",
            EmissionGroup::MiddleEmission => "middle_emission",
            EmissionGroup::HighEmission => "high_emission",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolicyScenario {
    pub base_year: i32,
    pub reference_year: i32,
    pub target_year: i32,
    pub base_emissions: Vec<f64>,
    /// Country and reference-year emissions; order is irrelevant.
    pub reference: Vec<(String, f64)>,
    pub mu_t: f64,
    pub sigma_t: f64,
    pub r_target: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CountryTarget {
    pub country: String,
    /// 1 for the largest emitter.
    pub rank: usize,
    pub reference_emissions: f64,
    pub target_emissions: f64,
    pub r_i: f64,
    pub group: EmissionGroup,
}

/// National targets, returned in ascending order of reference emissions.
/// Equal emissions are ordered by country code.
pub fn allocate_targets(scenario: &PolicyScenario) -> Result<Vec<CountryTarget>> {
    check_lognormal(scenario.mu_t, scenario.sigma_t)?;
    check_positive(&scenario.base_emissions)?;
    let n = scenario.base_emissions.len();
    if scenario.reference.len() != n {
        return Err(Error::CountMismatch {
            expected: n,
            actual: scenario.reference.len(),
        });
    }
    let values: Vec<f64> = scenario.reference.iter().map(|(_, v)| *v).collect();
    check_positive(&values)?;
    let mut reference = scenario.reference.clone();
    reference.sort_by(|a, b| a.1.total_cmp(&b.1).then_with(|| a.0.cmp(&b.0)));
    Ok(plotting_scores(n)
        .into_iter()
        .zip(reference)
        .enumerate()
        .map(|(i, (z, (country, x)))| {
            let target = (scenario.mu_t + scenario.sigma_t * z).exp();
            let r_i = target / x;
            CountryTarget {
                country,
                rank: n - i,
                reference_emissions: x,
                target_emissions: target,
                r_i,
                group: EmissionGroup::classify(r_i, scenario.r_target),
            }
        })
        .collect())
}

/// Theil index (equal to the mean log deviation) of a lognormal: σ²/2.
pub fn inequality_index(sigma: f64) -> f64 {
    sigma * sigma / 2.0
}

/// `T_t − T_1` between two lognormal dispersion parameters.
pub fn inequality_change(sigma_1: f64, sigma_t: f64) -> f64 {
    inequality_index(sigma_t) - inequality_index(sigma_1)
}

/// Theil index `E[(X/m) ln(X/m)]` of `LOG(μ, σ)` by quadrature.
pub fn theil_numeric(mu: f64, sigma: f64) -> Result<f64> {
    let dist = SizeDist::lognormal(mu, sigma)?;
    let mean = (mu + sigma * sigma / 2.0).exp();
    Ok(integrate_positive_log_scale(
        |x| {
            let ratio = x / mean;
            if ratio > 0.0 {
                dist.pdf(x) * ratio * ratio.ln()
            } else {
                0.0
            }
        },
        1e-13,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_country_median() {
        assert!((compute_r(0.0, 1.0, &[1.0]).unwrap() - 1.0).abs() < 1e-15);
        let s = PolicyScenario {
            base_year: 1990,
            reference_year: 1990,
            target_year: 2030,
            base_emissions: vec![2.0],
            reference: vec![("X".into(), 2.0)],
            mu_t: 5f64.ln(),
            sigma_t: 1.0,
            r_target: 0.45,
        };
        let t = allocate_targets(&s).unwrap();
        assert!((t[0].r_i - 2.5).abs() < 1e-14);
        assert_eq!(t[0].rank, 1);
        assert_eq!(t[0].group, EmissionGroup::LowEmission);
    }

    #[test]
    fn scale_law() {
        let base = [0.5, 3.0, 10.0, 44.0];
        let a = compute_r(1.0, 2.0, &base).unwrap();
        let b = compute_r(1.0 + 2f64.ln(), 2.0, &base).unwrap();
        assert!((b / a - 2.0).abs() < 1e-14);
    }

    #[test]
    fn self_allocation_is_one() {
        let (mu, sigma) = (1.2, 1.7);
        let refs: Vec<(String, f64)> = plotting_scores(9)
            .iter()
            .enumerate()
            .map(|(i, z)| (format!("K{i}"), (mu + sigma * z).exp()))
            .rev()
            .collect();
        let base: Vec<f64> = refs.iter().map(|r| r.1).collect();
        let s = PolicyScenario {
            base_year: 0,
            reference_year: 0,
            target_year: 1,
            base_emissions: base,
            reference: refs,
            mu_t: mu,
            sigma_t: sigma,
            r_target: 1.0,
        };
        for t in allocate_targets(&s).unwrap() {
            assert!((t.r_i - 1.0).abs() < 1e-14);
            assert_eq!(t.group, EmissionGroup::MiddleEmission);
        }
    }

    #[test]
    fn groups() {
        assert_eq!(
            EmissionGroup::classify(1.2, 0.45),
            EmissionGroup::LowEmission
        );
        assert_eq!(
            EmissionGroup::classify(1.0, 0.45),
            EmissionGroup::MiddleEmission
        );
        assert_eq!(
            EmissionGroup::classify(0.45, 0.45),
            EmissionGroup::MiddleEmission
        );
        assert_eq!(
            EmissionGroup::classify(0.4499, 0.45),
            EmissionGroup::HighEmission
        );
    }

    #[test]
    fn errors() {
        assert!(compute_r(0.0, 1.0, &[]).is_err());
        assert!(compute_r(0.0, 1.0, &[1.0, 0.0]).is_err());
        assert!(compute_r(0.0, 0.0, &[1.0]).is_err());
        // R at σ → 0 is N e^μ / Σx = 3 e^0 / 3 = 1, so R = 0.5 is out of reach
        let e = solve_parameter(FreeParameter::Sigma, 0.0, 0.5, &[1.0, 1.0, 1.0]).unwrap_err();
        assert!(matches!(e, Error::NoRootInBracket { .. }), "{e:?}");
        let s = PolicyScenario {
            base_year: 0,
            reference_year: 0,
            target_year: 1,
            base_emissions: vec![1.0, 2.0],
            reference: vec![("A".into(), 1.0)],
            mu_t: 0.0,
            sigma_t: 1.0,
            r_target: 1.0,
        };
        assert!(matches!(
            allocate_targets(&s),
            Err(Error::CountMismatch {
                expected: 2,
                actual: 1
            })
        ));
    }

    #[test]
    fn ties_ordered_by_country() {
        let s = PolicyScenario {
            base_year: 0,
            reference_year: 0,
            target_year: 1,
            base_emissions: vec![1.0, 1.0, 2.0],
            reference: vec![("B".into(), 1.0), ("C".into(), 2.0), ("A".into(), 1.0)],
            mu_t: 0.0,
            sigma_t: 1.0,
            r_target: 1.0,
        };
        let t = allocate_targets(&s).unwrap();
        let order: Vec<&str> = t.iter().map(|c| c.country.as_str()).collect();
        assert_eq!(order, ["A", "B", "C"]);
        assert_eq!(t.iter().map(|c| c.rank).collect::<Vec<_>>(), [3, 2, 1]);
    }

    #[test]
    fn theil() {
        assert_eq!(inequality_index(2.0), 2.0);
        assert!((inequality_index(2.3474) - 2.7551).abs() < 1e-4);
        assert!((theil_numeric(1.5, 2.3474).unwrap() - inequality_index(2.3474)).abs() < 1e-6);
        assert_eq!(inequality_change(1.0, 2.0), 1.5);
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(64))]

        #[test]
        fn round_trips(seed in 0u64..100_000, r in 0.1f64..3.0, sigma in 0.3f64..3.0) {
            let base = SizeDist::lognormal(2.0, 2.2).unwrap().sample(50, seed);
            let mu = solve_parameter(FreeParameter::Mu, sigma, r, &base).unwrap();
            let back = compute_r(mu, sigma, &base).unwrap();
            proptest::prop_assert!((back - r).abs() <= 1e-10 * r);
            let s = solve_parameter(FreeParameter::Sigma, mu, r, &base).unwrap();
            proptest::prop_assert!((s - sigma).abs() <= 1e-8 * sigma);
            let back = compute_r(mu, s, &base).unwrap();
            proptest::prop_assert!((back - r).abs() <= 1e-10 * r);
        }

        #[test]
        fn monotone_targets(seed in 0u64..100_000, mu in -2.0f64..5.0, sigma in 0.1f64..3.0) {
            let values = SizeDist::lognormal(1.0, 2.0).unwrap().sample(30, seed);
            let reference: Vec<(String, f64)> = values.iter().enumerate().map(|(i, v)| (format!("c{i}"), *v)).collect();
            let s = PolicyScenario {
                base_year: 0, reference_year: 0, target_year: 1,
                base_emissions: values.clone(), reference, mu_t: mu, sigma_t: sigma, r_target: 0.5,
            };
            let t = allocate_targets(&s).unwrap();
            for w in t.windows(2) {
                proptest::prop_assert!(w[0].r_i * w[0].reference_emissions <= w[1].r_i * w[1].reference_emissions * (1.0 + 1e-15));
            }
            let allocated: f64 = t.iter().map(|c| c.r_i * c.reference_emissions).sum();
            let r = compute_r(mu, sigma, &values).unwrap();
            proptest::prop_assert!((allocated / values.iter().sum::<f64>() - r).abs() <= 8.0 * f64::EPSILON * r);
        }
    }
}

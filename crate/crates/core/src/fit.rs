//! Maximum-likelihood fitting of the six candidate models, information
//! criteria and AIC-difference classification.
//!
//! LOG and EXP have closed-form estimators. The other four models minimize
//! the negative log-likelihood with a Nelder–Mead simplex in a
//! log-transformed parameter space, which keeps every shape and scale
//! positive without explicit constraints. Standard errors come from the
//! inverse of the numerically differentiated observed information.

use std::fmt;

use serde::Serialize;

use crate::dist::{ModelId, SizeDist};
use crate::error::{Error, Result};
use crate::numeric::{invert, nelder_mead, newton_polish, numeric_hessian, SimplexOptions};
use crate::special::ln_gamma;

/// Upper bound on every shape parameter. Light-tailed data push the Lomax
/// shape towards infinity; the search stops here and flags the fit.
pub const SHAPE_CAP: f64 = 1e6;
const SHAPE_FLOOR: f64 = 1e-6;
const LOG_SCALE_BOUND: f64 = 700.0;
const RESTARTS: usize = 3;
const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

#[derive(Debug, Clone, Serialize)]
pub struct FitResult {
    pub model: ModelId,
    #[serde(skip)]
    pub dist: SizeDist,
    pub params: Vec<f64>,
    /// Asymptotic standard errors, NaN where the observed information is
    /// not positive definite (e.g. at a boundary).
    pub se: Vec<f64>,
    pub loglik: f64,
    pub aic: f64,
    pub bic: f64,
    pub hqc: f64,
    pub n: usize,
    pub converged: bool,
    pub boundary: bool,
    #[serde(skip)]
    sample_id: u64,
}

impl FitResult {
    fn new(
        dist: SizeDist,
        se: Vec<f64>,
        loglik: f64,
        sample: &Sample,
        converged: bool,
        boundary: bool,
    ) -> Self {
        let k = dist.model().n_params() as f64;
        let n = sample.n as f64;
        Self {
            model: dist.model(),
            dist,
            params: dist.params(),
            se,
            loglik,
            aic: -2.0 * loglik + 2.0 * k,
            bic: -2.0 * loglik + k * n.ln(),
            hqc: -2.0 * loglik + 2.0 * k * n.ln().ln(),
            n: sample.n,
            converged,
            boundary,
            sample_id: sample.id,
        }
    }

    pub fn criterion(&self, c: Criterion) -> f64 {
        match c {
            Criterion::Aic => self.aic,
            Criterion::Bic => self.bic,
            Criterion::Hqc => self.hqc,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Criterion {
    Aic,
    Bic,
    Hqc,
}

/// Log-likelihood of `dist` on `data`.
pub fn log_likelihood(dist: &SizeDist, data: &[f64]) -> f64 {
    data.iter().map(|&x| dist.log_pdf(x)).sum()
}

/// Validated sample with the sufficient statistics the objectives reuse.
struct Sample {
    x: Vec<f64>,
    lx: Vec<f64>,
    n: usize,
    sum_x: f64,
    sum_lx: f64,
    mean_lx: f64,
    // Σ (log x − mean)²
    ss_lx: f64,
    id: u64,
}

fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl Sample {
    fn new(data: &[f64], min_n: usize) -> Result<Self> {
        if data.len() < min_n {
            return Err(Error::InsufficientData {
                required: min_n,
                available: data.len(),
            });
        }
        if let Some((index, &value)) = data
            .iter()
            .enumerate()
            .find(|(_, v)| !(**v > 0.0 && v.is_finite()))
        {
            return Err(Error::NonPositive { index, value });
        }
        let n = data.len();
        let lx: Vec<f64> = data.iter().map(|x| x.ln()).collect();
        let sum_lx: f64 = lx.iter().sum();
        let mean_lx = sum_lx / n as f64;
        let ss_lx = lx.iter().map(|l| (l - mean_lx).powi(2)).sum();
        // order-independent fingerprint
        let id = data
            .iter()
            .fold(mix(n as u64), |acc, x| acc.wrapping_add(mix(x.to_bits())));
        Ok(Self {
            x: data.to_vec(),
            lx,
            n,
            sum_x: data.iter().sum(),
            sum_lx,
            mean_lx,
            ss_lx,
            id,
        })
    }

    fn mean(&self) -> f64 {
        self.sum_x / self.n as f64
    }

    fn var(&self) -> f64 {
        let m = self.mean();
        self.x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (self.n as f64 - 1.0)
    }

    fn sd_lx(&self) -> f64 {
        (self.ss_lx / self.n as f64).sqrt()
    }

    /// Negative log-likelihood in natural parameters.
    fn nll(&self, model: ModelId, theta: &[f64]) -> f64 {
        let n = self.n as f64;
        match model {
            ModelId::Exp => {
                let s = theta[0];
                n * s.ln() + self.sum_x / s
            }
            ModelId::Gam => {
                let (b, s) = (theta[0], theta[1]);
                n * ln_gamma(b) + n * b * s.ln() - (b - 1.0) * self.sum_lx + self.sum_x / s
            }
            ModelId::Log => {
                let (mu, s) = (theta[0], theta[1]);
                let d = self.mean_lx - mu;
                n * (s.ln() + LN_SQRT_2PI) + self.sum_lx + (self.ss_lx + n * d * d) / (2.0 * s * s)
            }
            ModelId::Wei => {
                let (a, s) = (theta[0], theta[1]);
                let ls = s.ln();
                let tail: f64 = self.lx.iter().map(|l| (a * (l - ls)).exp()).sum();
                -n * a.ln() + n * a * ls - (a - 1.0) * self.sum_lx + tail
            }
            ModelId::Fsk => {
                let (b, s) = (theta[0], theta[1]);
                let ls = s.ln();
                let tail: f64 = self
                    .lx
                    .iter()
                    .map(|l| {
                        let t = b * (l - ls);
                        t.max(0.0) + (-t.abs()).exp().ln_1p()
                    })
                    .sum();
                -n * b.ln() + n * ls - (b - 1.0) * (self.sum_lx - n * ls) + 2.0 * tail
            }
            ModelId::Pa2 => {
                let (a, s) = (theta[0], theta[1]);
                let tail: f64 = self.x.iter().map(|x| (x / s).ln_1p()).sum();
                -n * a.ln() + n * s.ln() + (a + 1.0) * tail
            }
        }
    }
}

/// Maps between natural parameters and the unconstrained search space.
///
/// Shapes and scales are searched on the log scale; LOG's `μ` is left as is.
/// The Lomax scale is searched as `log(σ/α)`, the scale of the exponential
/// limit, which decouples the two coordinates when `α` grows large.
fn to_search(model: ModelId, theta: &[f64]) -> Vec<f64> {
    match model {
        ModelId::Exp => vec![theta[0].ln()],
        ModelId::Log => vec![theta[0], theta[1].ln()],
        ModelId::Pa2 => vec![theta[0].ln(), (theta[1] / theta[0]).ln()],
        _ => vec![theta[0].ln(), theta[1].ln()],
    }
}

/// Inverse of [`to_search`], clamped to the admissible box. The flag
/// reports whether any coordinate was clamped.
fn from_search(model: ModelId, u: &[f64]) -> (Vec<f64>, bool) {
    let shape_bounds = (SHAPE_FLOOR.ln(), SHAPE_CAP.ln());
    let clamp = |v: f64, (lo, hi): (f64, f64), hit: &mut bool| {
        if v >= hi {
            *hit = true;
            hi
        } else if v <= lo {
            *hit = true;
            lo
        } else {
            v
        }
    };
    let scale_bounds = (-LOG_SCALE_BOUND, LOG_SCALE_BOUND);
    let mut hit = false;
    let theta = match model {
        ModelId::Exp => vec![clamp(u[0], scale_bounds, &mut hit).exp()],
        ModelId::Log => vec![u[0], clamp(u[1], scale_bounds, &mut hit).exp()],
        ModelId::Pa2 => {
            let la = clamp(u[0], shape_bounds, &mut hit);
            let ls = clamp(u[1] + la, scale_bounds, &mut hit);
            vec![la.exp(), ls.exp()]
        }
        _ => vec![
            clamp(u[0], shape_bounds, &mut hit).exp(),
            clamp(u[1], scale_bounds, &mut hit).exp(),
        ],
    };
    (theta, hit)
}

fn starting_values(model: ModelId, s: &Sample) -> Vec<f64> {
    let mean = s.mean();
    let var = s.var().max(f64::MIN_POSITIVE);
    match model {
        ModelId::Exp => vec![mean],
        ModelId::Log => vec![s.mean_lx + 0.5 * s.sd_lx(), 1.3 * s.sd_lx().max(1e-3)],
        ModelId::Gam => vec![mean * mean / var, var / mean],
        ModelId::Fsk => {
            // log X is logistic with location log σ and scale 1/β
            let sd = s.sd_lx().max(1e-3);
            vec![std::f64::consts::PI / (3f64.sqrt() * sd), s.mean_lx.exp()]
        }
        ModelId::Wei => {
            // least squares of log(−log Ŝ(x₍ᵢ₎)) on log x₍ᵢ₎
            let mut lx = s.lx.clone();
            lx.sort_by(f64::total_cmp);
            let n = lx.len() as f64;
            let ys: Vec<f64> = (1..=lx.len())
                .map(|i| (-(1.0 - i as f64 / (n + 1.0)).ln()).ln())
                .collect();
            let mx = lx.iter().sum::<f64>() / n;
            let my = ys.iter().sum::<f64>() / n;
            let sxy: f64 = lx.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
            let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
            let alpha = if sxx > 0.0 && sxy > 0.0 {
                sxy / sxx
            } else {
                1.0
            };
            let intercept = my - alpha * mx;
            vec![alpha, (-intercept / alpha).exp()]
        }
        ModelId::Pa2 => {
            let cv2 = var / (mean * mean);
            let alpha = if cv2 > 1.0 {
                2.0 * cv2 / (cv2 - 1.0)
            } else {
                1.5
            };
            let alpha = if alpha > 1.0 { alpha } else { 1.5 };
            vec![alpha, mean * (alpha - 1.0)]
        }
    }
    .into_iter()
    .map(|v| if v.is_finite() && v != 0.0 { v } else { 1.0 })
    .collect()
}

fn standard_errors(model: ModelId, s: &Sample, theta: &[f64]) -> Vec<f64> {
    let hess = numeric_hessian(|t| s.nll(model, t), theta);
    match invert(&hess) {
        Some(cov) => (0..theta.len())
            .map(|i| {
                if cov[i][i] > 0.0 {
                    cov[i][i].sqrt()
                } else {
                    f64::NAN
                }
            })
            .collect(),
        None => vec![f64::NAN; theta.len()],
    }
}

fn closed_form(model: ModelId, s: &Sample) -> Option<Vec<f64>> {
    match model {
        ModelId::Exp => Some(vec![s.mean()]),
        ModelId::Log => Some(vec![s.mean_lx, s.sd_lx()]),
        _ => None,
    }
}

fn finish(
    model: ModelId,
    s: &Sample,
    theta: Vec<f64>,
    converged: bool,
    boundary: bool,
) -> Result<FitResult> {
    let dist = SizeDist::from_params(model, &theta)?;
    let se = standard_errors(model, s, &theta);
    let loglik = -s.nll(model, &theta);
    Ok(FitResult::new(dist, se, loglik, s, converged, boundary))
}

/// Maximum-likelihood fit of `model` to strictly positive `data` (n ≥ 3).
pub fn fit_mle(model: ModelId, data: &[f64]) -> Result<FitResult> {
    let s = Sample::new(data, 3)?;
    if let Some(theta) = closed_form(model, &s) {
        if theta.iter().all(|v| v.is_finite()) && theta[theta.len() - 1] > 0.0 {
            return finish(model, &s, theta, true, false);
        }
        return Err(Error::InvalidParameter(format!(
            "{model} estimate is degenerate for this sample (zero spread)"
        )));
    }
    optimize(model, &s)
}

/// Like [`fit_mle`] but always runs the numerical optimizer, even for the
/// models that have closed-form estimators.
pub fn fit_mle_numeric(model: ModelId, data: &[f64]) -> Result<FitResult> {
    let s = Sample::new(data, 3)?;
    optimize(model, &s)
}

fn optimize(model: ModelId, s: &Sample) -> Result<FitResult> {
    let objective = |u: &[f64]| {
        let (theta, _) = from_search(model, u);
        s.nll(model, &theta)
    };
    let opts = SimplexOptions::default();
    let mut current = to_search(model, &starting_values(model, s));
    let mut best = nelder_mead(objective, &current, opts);
    let mut converged = best.converged;
    let mut attempts = 1;
    // Restart from the incumbent until a restart no longer improves it.
    for k in 0..RESTARTS {
        current = best.x.clone();
        let step = SimplexOptions {
            initial_step: 0.1 * (k + 1) as f64,
            ..opts
        };
        let again = nelder_mead(objective, &current, step);
        attempts += 1;
        let improved = again.value < best.value - 1e-9 * (1.0 + best.value.abs());
        if again.value <= best.value {
            best = again;
        }
        converged = best.converged;
        if !improved && converged {
            break;
        }
    }
    if !converged || !best.value.is_finite() {
        return Err(Error::NonConvergence { model, attempts });
    }
    let (_, boundary) = from_search(model, &best.x);
    let polished = if boundary {
        best.x
    } else {
        newton_polish(objective, &best.x, 3)
    };
    let (theta, boundary) = from_search(model, &polished);
    finish(model, s, theta, converged, boundary)
}

/// Fits all six models to the same sample.
pub fn fit_all(data: &[f64]) -> Result<Vec<FitResult>> {
    ModelId::ALL.iter().map(|&m| fit_mle(m, data)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SupportGroup {
    /// Δ ≤ 2
    BestFit,
    /// 2 < Δ ≤ 20
    LittleSupport,
    /// Δ > 20
    NoSupport,
}

impl SupportGroup {
    pub fn from_delta(delta: f64) -> Self {
        if delta <= 2.0 {
            SupportGroup::BestFit
        } else if delta <= 20.0 {
            SupportGroup::LittleSupport
        } else {
            SupportGroup::NoSupport
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            SupportGroup::BestFit => "best_fit",
            SupportGroup::LittleSupport => "little_support",
            SupportGroup::NoSupport => "no_support",
        }
    }
}

impl fmt::Display for SupportGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RankedModel {
    pub model: ModelId,
    pub value: f64,
    pub delta: f64,
    pub group: SupportGroup,
    pub boundary: bool,
}

/// Models ordered by increasing criterion value.
#[derive(Debug, Clone, Serialize)]
pub struct ModelRanking {
    pub criterion: Criterion,
    pub entries: Vec<RankedModel>,
}

impl ModelRanking {
    pub fn best(&self) -> ModelId {
        self.entries[0].model
    }

    pub fn entry(&self, model: ModelId) -> Option<&RankedModel> {
        self.entries.iter().find(|e| e.model == model)
    }

    pub fn group_of(&self, model: ModelId) -> Option<SupportGroup> {
        self.entry(model).map(|e| e.group)
    }
}

/// AIC differences and support groups.
pub fn rank_models(fits: &[FitResult]) -> Result<ModelRanking> {
    rank_models_by(fits, Criterion::Aic)
}

pub fn rank_models_by(fits: &[FitResult], criterion: Criterion) -> Result<ModelRanking> {
    let first = fits.first().ok_or(Error::InsufficientData {
        required: 1,
        available: 0,
    })?;
    if fits
        .iter()
        .any(|f| f.sample_id != first.sample_id || f.n != first.n)
    {
        return Err(Error::MismatchedSamples);
    }
    let min = fits
        .iter()
        .map(|f| f.criterion(criterion))
        .fold(f64::INFINITY, f64::min);
    let mut entries: Vec<RankedModel> = fits
        .iter()
        .map(|f| {
            let value = f.criterion(criterion);
            let delta = value - min;
            RankedModel {
                model: f.model,
                value,
                delta,
                group: SupportGroup::from_delta(delta),
                boundary: f.boundary,
            }
        })
        .collect();
    entries.sort_by(|a, b| a.delta.total_cmp(&b.delta).then(a.model.cmp(&b.model)));
    Ok(ModelRanking { criterion, entries })
}

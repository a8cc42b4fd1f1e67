//! The six candidate size distributions on `(0, ∞)`.
//!
//! | model | parameters      | CDF                         |
//! |-------|-----------------|-----------------------------|
//! | EXP   | σ               | 1 − exp(−x/σ)               |
//! | FSK   | β (shape), σ    | 1 / (1 + (x/σ)^−β)          |
//! | GAM   | β (shape), σ    | γ(β, x/σ) / Γ(β)            |
//! | LOG   | μ, σ            | Φ((log x − μ)/σ)            |
//! | PA2   | α (shape), σ    | 1 − (1 + x/σ)^−α            |
//! | WEI   | α (shape), σ    | 1 − exp(−(x/σ)^α)           |
//!
//! Sampling is by inverse transform for every model, so a single seeded
//! uniform stream drives all six.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Open01;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::{gamma_p, ln_gamma, norm_cdf, norm_quantile, norm_sf, regularized_gamma};

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ModelId {
    #[serde(rename = "EXP")]
    Exp,
    #[serde(rename = "FSK")]
    Fsk,
    #[serde(rename = "GAM")]
    Gam,
    #[serde(rename = "LOG")]
    Log,
    #[serde(rename = "PA2")]
    Pa2,
    #[serde(rename = "WEI")]
    Wei,
}

impl ModelId {
    pub const ALL: [ModelId; 6] = [
        ModelId::Exp,
        ModelId::Fsk,
        ModelId::Gam,
        ModelId::Log,
        ModelId::Pa2,
        ModelId::Wei,
    ];

    pub fn code(self) -> &'static str {
        match self {
            ModelId::Exp => "EXP",
            ModelId::Fsk => "FSK",
            ModelId::Gam => "GAM",
            ModelId::Log => "LOG",
            ModelId::Pa2 => "PA2",
            ModelId::Wei => "WEI",
        }
    }

    /// Number of free parameters `K`.
    pub fn n_params(self) -> usize {
        match self {
            ModelId::Exp => 1,
            _ => 2,
        }
    }

    pub fn param_names(self) -> &'static [&'static str] {
        match self {
            ModelId::Exp => &["sigma"],
            ModelId::Fsk | ModelId::Gam => &["beta", "sigma"],
            ModelId::Log => &["mu", "sigma"],
            ModelId::Pa2 | ModelId::Wei => &["alpha", "sigma"],
        }
    }
}

impl fmt::Display for ModelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for ModelId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ModelId::ALL
            .into_iter()
            .find(|m| m.code().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidParameter(format!("unknown model `{s}`")))
    }
}

/// A fully parameterized candidate distribution.
///
/// Constructed through [`SizeDist::from_params`] or the per-model
/// constructors, which enforce the parameter restrictions (every shape and
/// scale strictly positive, `μ` finite).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SizeDist {
    Exponential { scale: f64 },
    Fisk { shape: f64, scale: f64 },
    Gamma { shape: f64, scale: f64 },
    LogNormal { mu: f64, sigma: f64 },
    Lomax { shape: f64, scale: f64 },
    Weibull { shape: f64, scale: f64 },
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::InvalidParameter(format!(
            "{name} must be positive and finite, got {v}"
        )))
    }
}

/// `log(1 + e^t)` without overflow.
fn softplus(t: f64) -> f64 {
    t.max(0.0) + (-t.abs()).exp().ln_1p()
}

impl SizeDist {
    pub fn exponential(scale: f64) -> Result<Self> {
        Ok(SizeDist::Exponential {
            scale: positive("sigma", scale)?,
        })
    }

    pub fn fisk(shape: f64, scale: f64) -> Result<Self> {
        Ok(SizeDist::Fisk {
            shape: positive("beta", shape)?,
            scale: positive("sigma", scale)?,
        })
    }

    pub fn gamma(shape: f64, scale: f64) -> Result<Self> {
        Ok(SizeDist::Gamma {
            shape: positive("beta", shape)?,
            scale: positive("sigma", scale)?,
        })
    }

    pub fn lognormal(mu: f64, sigma: f64) -> Result<Self> {
        if !mu.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "mu must be finite, got {mu}"
            )));
        }
        Ok(SizeDist::LogNormal {
            mu,
            sigma: positive("sigma", sigma)?,
        })
    }

    pub fn lomax(shape: f64, scale: f64) -> Result<Self> {
        Ok(SizeDist::Lomax {
            shape: positive("alpha", shape)?,
            scale: positive("sigma", scale)?,
        })
    }

    pub fn weibull(shape: f64, scale: f64) -> Result<Self> {
        Ok(SizeDist::Weibull {
            shape: positive("alpha", shape)?,
            scale: positive("sigma", scale)?,
        })
    }

    /// Builds a distribution from its ordered parameter vector (see
    /// [`ModelId::param_names`]).
    pub fn from_params(model: ModelId, theta: &[f64]) -> Result<Self> {
        if theta.len() != model.n_params() {
            return Err(Error::InvalidParameter(format!(
                "{model} takes {} parameters, got {}",
                model.n_params(),
                theta.len()
            )));
        }
        match model {
            ModelId::Exp => Self::exponential(theta[0]),
            ModelId::Fsk => Self::fisk(theta[0], theta[1]),
            ModelId::Gam => Self::gamma(theta[0], theta[1]),
            ModelId::Log => Self::lognormal(theta[0], theta[1]),
            ModelId::Pa2 => Self::lomax(theta[0], theta[1]),
            ModelId::Wei => Self::weibull(theta[0], theta[1]),
        }
    }

    pub fn model(&self) -> ModelId {
        match self {
            SizeDist::Exponential { .. } => ModelId::Exp,
            SizeDist::Fisk { .. } => ModelId::Fsk,
            SizeDist::Gamma { .. } => ModelId::Gam,
            SizeDist::LogNormal { .. } => ModelId::Log,
            SizeDist::Lomax { .. } => ModelId::Pa2,
            SizeDist::Weibull { .. } => ModelId::Wei,
        }
    }

    pub fn params(&self) -> Vec<f64> {
        match *self {
            SizeDist::Exponential { scale } => vec![scale],
            SizeDist::Fisk { shape, scale }
            | SizeDist::Gamma { shape, scale }
            | SizeDist::Lomax { shape, scale }
            | SizeDist::Weibull { shape, scale } => vec![shape, scale],
            SizeDist::LogNormal { mu, sigma } => vec![mu, sigma],
        }
    }

    pub fn pdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        self.log_pdf(x).exp()
    }

    /// Log-density; stays finite where the density itself underflows.
    pub fn log_pdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return f64::NEG_INFINITY;
        }
        match *self {
            SizeDist::Exponential { scale } => -scale.ln() - x / scale,
            SizeDist::Fisk { shape, scale } => {
                let lz = (x / scale).ln();
                shape.ln() - scale.ln() + (shape - 1.0) * lz - 2.0 * softplus(shape * lz)
            }
            SizeDist::Gamma { shape, scale } => {
                let z = x / scale;
                -ln_gamma(shape) - scale.ln() + (shape - 1.0) * z.ln() - z
            }
            SizeDist::LogNormal { mu, sigma } => {
                let lx = x.ln();
                let u = (lx - mu) / sigma;
                -lx - sigma.ln() - LN_SQRT_2PI - 0.5 * u * u
            }
            SizeDist::Lomax { shape, scale } => {
                shape.ln() - scale.ln() - (shape + 1.0) * (x / scale).ln_1p()
            }
            SizeDist::Weibull { shape, scale } => {
                let lz = (x / scale).ln();
                shape.ln() - scale.ln() + (shape - 1.0) * lz - (shape * lz).exp()
            }
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        match *self {
            SizeDist::Exponential { scale } => -(-x / scale).exp_m1(),
            SizeDist::Fisk { shape, scale } => 1.0 / (1.0 + (-shape * (x / scale).ln()).exp()),
            SizeDist::Gamma { shape, scale } => gamma_p(shape, x / scale),
            SizeDist::LogNormal { mu, sigma } => norm_cdf((x.ln() - mu) / sigma),
            SizeDist::Lomax { shape, scale } => -(-shape * (x / scale).ln_1p()).exp_m1(),
            SizeDist::Weibull { shape, scale } => -(-(x / scale).powf(shape)).exp_m1(),
        }
    }

    /// Survival function `1 − F(x)`, computed directly in the upper tail.
    pub fn sf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 1.0;
        }
        match *self {
            SizeDist::Exponential { scale } => (-x / scale).exp(),
            SizeDist::Fisk { shape, scale } => 1.0 / (1.0 + (shape * (x / scale).ln()).exp()),
            SizeDist::Gamma { shape, scale } => regularized_gamma(shape, x / scale).1,
            SizeDist::LogNormal { mu, sigma } => norm_sf((x.ln() - mu) / sigma),
            SizeDist::Lomax { shape, scale } => (-shape * (x / scale).ln_1p()).exp(),
            SizeDist::Weibull { shape, scale } => (-(x / scale).powf(shape)).exp(),
        }
    }

    /// Inverse CDF. Closed form for every model except GAM, which uses a
    /// safeguarded Newton iteration on the regularized incomplete gamma.
    pub fn quantile(&self, q: f64) -> Result<f64> {
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::InvalidProbability(q));
        }
        Ok(self.quantile_unchecked(q))
    }

    fn quantile_unchecked(&self, q: f64) -> f64 {
        match *self {
            SizeDist::Exponential { scale } => -scale * (-q).ln_1p(),
            SizeDist::Fisk { shape, scale } => scale * ((q.ln() - (-q).ln_1p()) / shape).exp(),
            SizeDist::Gamma { shape, scale } => scale * gamma_quantile(shape, q),
            SizeDist::LogNormal { mu, sigma } => (mu + sigma * norm_quantile(q)).exp(),
            SizeDist::Lomax { shape, scale } => scale * (-(-q).ln_1p() / shape).exp_m1(),
            SizeDist::Weibull { shape, scale } => scale * (-(-q).ln_1p()).powf(1.0 / shape),
        }
    }

    /// `n` draws by inverse transform from a ChaCha stream seeded with `seed`.
    pub fn sample(&self, n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        self.sample_with(&mut rng, n)
    }

    pub fn sample_with<R: Rng + ?Sized>(&self, rng: &mut R, n: usize) -> Vec<f64> {
        (0..n)
            .map(|_| {
                let u: f64 = rng.sample(Open01);
                self.quantile_unchecked(u)
            })
            .collect()
    }
}

/// Solves `P(shape, z) = q` for `z`.
fn gamma_quantile(shape: f64, q: f64) -> f64 {
    // Work on whichever tail is smaller so the target keeps its precision.
    let upper = q > 0.5;
    let target = if upper { 1.0 - q } else { q };
    let residual = |z: f64| {
        let (p, qq) = regularized_gamma(shape, z);
        if upper {
            target - qq
        } else {
            p - target
        }
    };
    let log_density = |z: f64| (shape - 1.0) * z.ln() - z - ln_gamma(shape);

    // Wilson–Hilferty start, falling back to the small-z power law.
    let zq = norm_quantile(q);
    let wh = shape * (1.0 - 1.0 / (9.0 * shape) + zq / (3.0 * shape.sqrt())).powi(3);
    let small = ((q.ln() + ln_gamma(shape + 1.0)) / shape).exp();
    let mut z = if wh > 0.0 { wh } else { small };
    if !(z > 0.0 && z.is_finite()) {
        z = shape.max(1e-300);
    }

    let mut lo = 0.0;
    let mut hi = f64::INFINITY;
    for _ in 0..200 {
        let r = residual(z);
        if r == 0.0 {
            return z;
        }
        if r > 0.0 {
            hi = z;
        } else {
            lo = z;
        }
        let step = r / log_density(z).exp();
        let mut next = z - step;
        if !(next > lo && next < hi) || !next.is_finite() {
            next = if hi.is_finite() {
                0.5 * (lo + hi)
            } else {
                2.0 * z.max(lo) + 1.0
            };
        }
        if (next - z).abs() <= 1e-15 * z.abs() || (hi.is_finite() && hi - lo <= 1e-15 * hi) {
            return next;
        }
        z = next;
    }
    z
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::integrate_positive_log_scale;
    use proptest::prelude::*;

    fn all_models() -> Vec<SizeDist> {
        vec![
            SizeDist::exponential(2.0).unwrap(),
            SizeDist::fisk(1.7, 3.0).unwrap(),
            SizeDist::gamma(2.5, 1.3).unwrap(),
            SizeDist::lognormal(0.4, 1.1).unwrap(),
            SizeDist::lomax(2.0, 1.0).unwrap(),
            SizeDist::weibull(0.8, 4.0).unwrap(),
        ]
    }

    #[test]
    fn closed_form_examples() {
        let ln = SizeDist::lognormal(0.0, 1.0).unwrap();
        assert!((ln.quantile(0.5).unwrap() - 1.0).abs() < 1e-15);
        let ex = SizeDist::exponential(2.0).unwrap();
        assert!((ex.cdf(2.0) - (1.0 - (-1f64).exp())).abs() < 1e-15);
        assert!((ex.cdf(2.0) - 0.632_121).abs() < 1e-6);
        let fsk = SizeDist::fisk(1.0, 1.0).unwrap();
        assert_eq!(fsk.cdf(1.0), 0.5);
        let pa2 = SizeDist::lomax(2.0, 1.0).unwrap();
        assert!((pa2.quantile(0.75).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn invalid_parameters_are_rejected() {
        assert!(SizeDist::exponential(0.0).is_err());
        assert!(SizeDist::gamma(-1.0, 1.0).is_err());
        assert!(SizeDist::lognormal(f64::NAN, 1.0).is_err());
        assert!(SizeDist::lognormal(-3.0, 1.0).is_ok());
        assert!(SizeDist::from_params(ModelId::Wei, &[1.0]).is_err());
        let ln = SizeDist::lognormal(0.0, 1.0).unwrap();
        assert!(matches!(
            ln.quantile(0.0),
            Err(Error::InvalidProbability(_))
        ));
        assert!(ln.quantile(1.0).is_err());
    }

    #[test]
    fn model_codes_round_trip() {
        for m in ModelId::ALL {
            assert_eq!(m.code().parse::<ModelId>().unwrap(), m);
            assert_eq!(m.param_names().len(), m.n_params());
        }
    }

    #[test]
    fn gamma_quantile_round_trip() {
        let g = SizeDist::gamma(2.5, 1.3).unwrap();
        for i in 1..=99 {
            let q = i as f64 / 100.0;
            let x = g.quantile(q).unwrap();
            assert!((g.cdf(x) - q).abs() < 1e-10, "q={q}");
        }
    }

    #[test]
    fn gamma_quantile_extreme_shapes() {
        for shape in [0.05, 0.3, 1.0, 40.0, 5000.0] {
            let g = SizeDist::gamma(shape, 1.0).unwrap();
            for q in [1e-8, 0.001, 0.3, 0.999, 1.0 - 1e-9] {
                let x = g.quantile(q).unwrap();
                let back = if q > 0.5 { 1.0 - g.sf(x) } else { g.cdf(x) };
                assert!(
                    (back - q).abs() < 1e-10 * q.max(1e-3),
                    "shape={shape} q={q} x={x}"
                );
            }
        }
    }

    #[test]
    fn densities_integrate_to_one() {
        for d in all_models() {
            let total = integrate_positive_log_scale(|x| d.pdf(x), 1e-10);
            assert!((total - 1.0).abs() < 1e-6, "{:?}: {total}", d);
        }
    }

    #[test]
    fn log_pdf_stays_finite_in_far_tails() {
        for d in all_models() {
            for x in [1e-200, 1e200] {
                let lp = d.log_pdf(x);
                assert!(lp.is_finite(), "{:?} at {x}: {lp}", d);
            }
        }
    }

    #[test]
    fn sampling_is_deterministic_per_seed() {
        let d = SizeDist::weibull(0.8, 4.0).unwrap();
        assert_eq!(d.sample(50, 7), d.sample(50, 7));
        assert_ne!(d.sample(50, 7), d.sample(50, 8));
        assert!(d.sample(1000, 1).iter().all(|&x| x > 0.0));
    }

    fn arb_dist() -> impl Strategy<Value = SizeDist> {
        (0usize..6, 0.2f64..6.0, 0.05f64..20.0, -3.0f64..3.0).prop_map(|(m, shape, scale, mu)| {
            match m {
                0 => SizeDist::exponential(scale),
                1 => SizeDist::fisk(shape, scale),
                2 => SizeDist::gamma(shape, scale),
                3 => SizeDist::lognormal(mu, shape.min(3.0)),
                4 => SizeDist::lomax(shape, scale),
                _ => SizeDist::weibull(shape, scale),
            }
            .unwrap()
        })
    }

    proptest! {
        #[test]
        fn cdf_inverts_quantile(d in arb_dist(), q in 0.001f64..0.999) {
            let x = d.quantile(q).unwrap();
            prop_assert!(x > 0.0);
            prop_assert!((d.cdf(x) - q).abs() < 1e-9);
        }

        #[test]
        fn log_pdf_matches_pdf(d in arb_dist(), q in 0.001f64..0.999) {
            let x = d.quantile(q).unwrap();
            let p = d.pdf(x);
            prop_assume!(p > 1e-300);
            prop_assert!((d.log_pdf(x) - p.ln()).abs() < 1e-12 * (1.0 + p.ln().abs()));
        }

        #[test]
        fn cdf_is_monotone(d in arb_dist(), a in 1e-3f64..1e3, b in 1e-3f64..1e3) {
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            prop_assert!(d.cdf(lo) <= d.cdf(hi));
            prop_assert!((d.cdf(lo) + d.sf(lo) - 1.0).abs() < 1e-12);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn random_densities_integrate_to_one(d in arb_dist()) {
            let total = integrate_positive_log_scale(|x| d.pdf(x), 1e-10);
            prop_assert!((total - 1.0).abs() < 1e-6, "{:?}: {}", d, total);
        }
    }
}

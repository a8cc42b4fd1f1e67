//! Acceptance suite: one line per criterion, non-zero exit if any fails.
//!
//! Criterion 10 needs the EDGAR v7.0 country panel; point `CO2DIST_EDGAR_CSV`
//! at it (and `CO2DIST_EDGAR_FORMAT=long|wide`, default `wide`) to run it.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use co2dist::dist::{ModelId, SizeDist};
use co2dist::fit::{fit_all, fit_mle, fit_mle_numeric, rank_models, SupportGroup};
use co2dist::gibrat::{fit_gibrat, simulate_gibrat, GibratMethod, GrowthSample};
use co2dist::ingest::{load_panel, PanelFormat};
use co2dist::normtest::{test_lognormality, TestId};
use co2dist::policy::{
    allocate_targets, compute_r, solve_parameter, theil_numeric, FreeParameter, PolicyScenario,
};
use co2dist::trend::{fit_trend, Response};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

enum Outcome {
    Pass(String),
    Fail(String),
    Skip(String),
}

use Outcome::{Fail, Pass, Skip};

fn verdict(ok: bool, detail: String) -> Outcome {
    if ok {
        Pass(detail)
    } else {
        Fail(detail)
    }
}

fn sd(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let m = values.iter().sum::<f64>() / n;
    (values.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
}

fn c1_closed_form() -> Outcome {
    let data = [1.0, std::f64::consts::E, std::f64::consts::E.powi(2)];
    let closed = fit_mle(ModelId::Log, &data).unwrap();
    let numeric = fit_mle_numeric(ModelId::Log, &data).unwrap();
    let sigma = (2.0f64 / 3.0).sqrt();
    let e_closed = (closed.params[0] - 1.0)
        .abs()
        .max((closed.params[1] - sigma).abs());
    let e_num = (numeric.params[0] - closed.params[0])
        .abs()
        .max((numeric.params[1] - closed.params[1]).abs());
    verdict(
        e_closed <= 1e-12 && e_num <= 1e-8,
        format!("closed-form err {e_closed:.1e}, numeric gap {e_num:.1e}"),
    )
}

fn c2_fisher_information() -> Outcome {
    let truth = SizeDist::lognormal(2.5, 2.4).unwrap();
    let (mut mus, mut sigmas) = (Vec::new(), Vec::new());
    for r in 0..2000 {
        let fit = fit_mle(ModelId::Log, &truth.sample(2000, 20_000 + r)).unwrap();
        mus.push(fit.params[0]);
        sigmas.push(fit.params[1]);
    }
    let a = sd(&mus) / (2.4 / 2000f64.sqrt());
    let b = sd(&sigmas) / (2.4 / 4000f64.sqrt());
    let ok = (0.95..=1.05).contains(&a) && (0.95..=1.05).contains(&b);
    verdict(ok, format!("sd ratio mu {a:.4}, sigma {b:.4}"))
}

/// EXP is GAM and WEI at shape 1 and the Lomax limit, so whenever the
/// likelihood-ratio statistic against one of them exceeds 4 (≈4.5% under χ²₁
/// for each) EXP drops out of the ΔAIC ≤ 2 group. Expect roughly 93–94%
/// recovery for EXP; a red line here is that, not a fitting bug.
fn c3_model_recovery() -> Outcome {
    let truths = [
        SizeDist::exponential(50.0).unwrap(),
        SizeDist::fisk(1.5, 20.0).unwrap(),
        SizeDist::gamma(2.5, 1.3).unwrap(),
        SizeDist::lognormal(2.5, 2.4).unwrap(),
        SizeDist::lomax(2.0, 10.0).unwrap(),
        SizeDist::weibull(0.7, 30.0).unwrap(),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for t in truths {
        let hits = (0..100u64)
            .filter(|r| {
                let data = t.sample(10_000, 30_000 + r);
                let ranking = rank_models(&fit_all(&data).unwrap()).unwrap();
                ranking.group_of(t.model()) == Some(SupportGroup::BestFit)
            })
            .count();
        ok &= hits >= 95;
        parts.push(format!("{} {hits}/100", t.model()));
    }
    verdict(ok, parts.join(", "))
}

fn c4_test_size() -> Outcome {
    let truth = SizeDist::lognormal(2.0, 2.3).unwrap();
    let mut rejections = [0usize; 7];
    let reps = 2000;
    for r in 0..reps {
        let data = truth.sample(200, 40_000 + r as u64);
        for (k, t) in TestId::ALL.into_iter().enumerate() {
            if test_lognormality(t, &data).unwrap().reject_05 {
                rejections[k] += 1;
            }
        }
    }
    let mut ok = true;
    let parts: Vec<String> = TestId::ALL
        .iter()
        .zip(rejections)
        .map(|(t, k)| {
            let rate = k as f64 / reps as f64;
            ok &= (0.03..=0.07).contains(&rate);
            format!("{t} {rate:.4}")
        })
        .collect();
    verdict(ok, parts.join(", "))
}

fn c5_gibrat_algebra() -> Outcome {
    let c = 1.03;
    let prev: Vec<f64> = (0..60).map(|i| 0.01 * 1.31f64.powi(i)).collect();
    let curr = prev.iter().map(|p| c * p).collect();
    let s = GrowthSample::from_pairs(0, 1, prev, curr).unwrap();
    let m1 = fit_gibrat(GibratMethod::M1, &s).unwrap();
    let m3 = fit_gibrat(GibratMethod::M3, &s).unwrap();
    let err = [
        (m1.beta - 1.0),
        (m1.alpha - c.ln()),
        m3.beta,
        (m3.alpha - c),
    ]
    .iter()
    .fold(0.0f64, |m, e| m.max(e.abs()));
    verdict(err <= 1e-12, format!("max deviation {err:.1e}"))
}

fn c6_gibrat_lognormality() -> Outcome {
    let (countries, years, reps, shock) = (500, 100, 200, 0.1);
    let sigma0 = 1.0;
    let init = SizeDist::lognormal(3.0, sigma0).unwrap();
    let mut passes = 0;
    let mut var_sum = vec![0.0; years];
    for r in 0..reps {
        let panel = simulate_gibrat(countries, years, &init, shock, 60_000 + r).unwrap();
        for (t, acc) in var_sum.iter_mut().enumerate() {
            let logs: Vec<f64> = panel
                .cross_section_values(t as i32)
                .unwrap()
                .iter()
                .map(|v| v.ln())
                .collect();
            *acc += sd(&logs).powi(2);
        }
        let last = panel.cross_section_values(years as i32 - 1).unwrap();
        if !test_lognormality(TestId::ShapiroWilk, &last)
            .unwrap()
            .reject_05
        {
            passes += 1;
        }
    }
    let worst = var_sum
        .iter()
        .enumerate()
        .map(|(t, s)| {
            let expected = sigma0 * sigma0 + t as f64 * shock * shock;
            (s / reps as f64 / expected - 1.0).abs()
        })
        .fold(0.0, f64::max);
    let rate = passes as f64 / reps as f64;
    verdict(
        rate >= 0.9 && worst <= 0.05,
        format!(
            "SW pass rate {rate:.3}, worst variance deviation {:.2}%",
            100.0 * worst
        ),
    )
}

fn c7_scale_law() -> Outcome {
    let direct = (2.7850f64 - 1.5053).exp();
    let ratio = 1.6180 / 0.45;
    let base = SizeDist::lognormal(1.0, 2.3).unwrap().sample(208, 7);
    let via_r =
        compute_r(2.7850, 2.3474, &base).unwrap() / compute_r(1.5053, 2.3474, &base).unwrap();
    let rel = (via_r / ratio - 1.0).abs();
    let consistent = (via_r / direct - 1.0).abs() < 1e-12;
    verdict(
        rel <= 0.0025 && consistent,
        format!(
            "exp(dmu) {via_r:.4} vs 1.6180/0.45 = {ratio:.4}, rel {:.4}%",
            100.0 * rel
        ),
    )
}

fn c8_policy_round_trip() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst_r: f64 = 0.0;
    let mut worst_agg: f64 = 0.0;
    for k in 0..200 {
        let base = SizeDist::lognormal(0.5, 2.4)
            .unwrap()
            .sample(208, 80_000 + k);
        let target: f64 = rng.gen_range(0.1..3.0);
        let sigma: f64 = rng.gen_range(0.5..3.0);
        let mu = solve_parameter(FreeParameter::Mu, sigma, target, &base).unwrap();
        worst_r = worst_r.max((compute_r(mu, sigma, &base).unwrap() / target - 1.0).abs());
        let s = solve_parameter(FreeParameter::Sigma, mu, target, &base).unwrap();
        worst_r = worst_r.max((compute_r(mu, s, &base).unwrap() / target - 1.0).abs());

        let reference = base
            .iter()
            .enumerate()
            .map(|(i, v)| (format!("c{i:03}"), *v))
            .collect();
        let scenario = PolicyScenario {
            base_year: 1990,
            reference_year: 1990,
            target_year: 2030,
            base_emissions: base.clone(),
            reference,
            mu_t: mu,
            sigma_t: sigma,
            r_target: target,
        };
        let allocated: f64 = allocate_targets(&scenario)
            .unwrap()
            .iter()
            .map(|c| c.r_i * c.reference_emissions)
            .sum();
        let r = compute_r(mu, sigma, &base).unwrap();
        worst_agg = worst_agg.max((allocated / base.iter().sum::<f64>() / r - 1.0).abs());
    }
    // summation order differs between the two sides, so "exact" means a few ulps
    verdict(
        worst_r <= 1e-10 && worst_agg <= 1e-14,
        format!("round-trip rel err {worst_r:.1e}, aggregate identity rel err {worst_agg:.1e}"),
    )
}

fn c9_theil() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let mu: f64 = rng.gen_range(-3.0..6.0);
        let sigma: f64 = rng.gen_range(0.2..3.0);
        worst = worst.max((theil_numeric(mu, sigma).unwrap() - sigma * sigma / 2.0).abs());
    }
    verdict(
        worst <= 1e-6,
        format!("max |numeric - sigma^2/2| {worst:.1e}"),
    )
}

fn c10_edgar() -> Outcome {
    let Ok(path) = std::env::var("CO2DIST_EDGAR_CSV") else {
        return Skip("CO2DIST_EDGAR_CSV not set".into());
    };
    let format: PanelFormat = match std::env::var("CO2DIST_EDGAR_FORMAT")
        .as_deref()
        .unwrap_or("wide")
        .parse()
    {
        Ok(f) => f,
        Err(e) => return Fail(e.to_string()),
    };
    let panel = match load_panel(&path, format) {
        Ok(p) => p,
        Err(e) => return Fail(format!("cannot load {path}: {e}")),
    };
    let mut failures = Vec::new();

    // Table 1: (year, N, max, min, mean, sd, skew, kurt)
    let table1 = [
        (1970, 208, 4693.3, 0.0008, 75.0, 365.1, 10.3, 121.8),
        (2000, 208, 6004.4, 0.0017, 120.1, 518.7, 8.8, 88.1),
        (2019, 208, 11771.1, 0.0020, 176.4, 915.7, 10.6, 124.6),
    ];
    for (year, n, max, min, mean, sdv, skew, kurt) in table1 {
        match panel.summarize_year(year) {
            Ok(s) => {
                let close = |a: f64, b: f64, digits: f64| {
                    (a - b).abs() <= 0.5 * 10f64.powf(-digits) + 1e-12
                };
                let ok = s.n == n
                    && close(s.max, max, 1.0)
                    && close(s.min, min, 4.0)
                    && close(s.mean, mean, 1.0)
                    && close(s.sd, sdv, 1.0)
                    && s.skewness.is_some_and(|v| close(v, skew, 1.0))
                    && s.kurtosis.is_some_and(|v| (v / kurt - 1.0).abs() <= 0.02);
                if !ok {
                    failures.push(format!("Table 1 {year}: {s:?}"));
                }
            }
            Err(e) => failures.push(format!("Table 1 {year}: {e}")),
        }
    }

    let mut mu_series = Vec::new();
    let mut sigma_series = Vec::new();
    let mut not_best = Vec::new();
    let mut rejections = [0usize; 3];
    for year in 1970..=2021 {
        let data = match panel.cross_section_values(year) {
            Ok(d) => d,
            Err(e) => {
                failures.push(format!("{year}: {e}"));
                continue;
            }
        };
        match fit_all(&data).and_then(|f| rank_models(&f).map(|r| (f, r))) {
            Ok((fits, ranking)) => {
                if ranking.group_of(ModelId::Log) != Some(SupportGroup::BestFit) {
                    not_best.push(year);
                }
                let log = fits.iter().find(|f| f.model == ModelId::Log).unwrap();
                mu_series.push((year, log.params[0]));
                sigma_series.push((year, log.params[1]));
            }
            Err(e) => failures.push(format!("{year} fit: {e}")),
        }
        for (k, t) in [
            TestId::ShapiroWilk,
            TestId::ShapiroFrancia,
            TestId::JarqueBera,
        ]
        .into_iter()
        .enumerate()
        {
            if test_lognormality(t, &data)
                .map(|r| r.reject_05)
                .unwrap_or(true)
            {
                rejections[k] += 1;
            }
        }
    }
    if !not_best.is_empty() {
        failures.push(format!("LOG outside best fit in {not_best:?}"));
    }
    if rejections != [0, 0, 0] {
        failures.push(format!("SW/SF/JB rejections {rejections:?}"));
    }

    let rel = |a: f64, b: f64| (a / b - 1.0).abs();
    match (
        fit_trend(&mu_series, Response::Mu),
        fit_trend(&sigma_series, Response::Sigma),
    ) {
        (Ok(mu), Ok(sigma)) => {
            if rel(mu.alpha, -55.3221) > 0.01
                || rel(mu.beta, 0.0286) > 0.01
                || rel(mu.r_squared, 0.9829) > 0.01
            {
                failures.push(format!(
                    "mu trend {:.4} + {:.4} year, R2 {:.4}",
                    mu.alpha, mu.beta, mu.r_squared
                ));
            }
            if rel(sigma.alpha, 27.5025) > 0.01
                || rel(sigma.beta, -0.0124) > 0.01
                || rel(sigma.r_squared, 0.9049) > 0.01
            {
                failures.push(format!(
                    "sigma trend {:.4} + {:.4} year, R2 {:.4}",
                    sigma.alpha, sigma.beta, sigma.r_squared
                ));
            }
            for (year, m, s) in [
                (2025, 2.6418, 2.4094),
                (2030, 2.7850, 2.3474),
                (2035, 2.9281, 2.2854),
            ] {
                let (pm, ps) = (mu.predict(year), sigma.predict(year));
                if (pm - m).abs() > 0.02 || (ps - s).abs() > 0.02 {
                    failures.push(format!("Table 6 {year}: mu {pm:.4}, sigma {ps:.4}"));
                }
            }
        }
        (Err(e), _) | (_, Err(e)) => failures.push(format!("trend: {e}")),
    }

    match panel
        .cross_section_values(1990)
        .and_then(|base| solve_parameter(FreeParameter::Mu, 2.3474, 0.45, &base))
    {
        Ok(mu) if (mu - 1.5053).abs() <= 0.005 => {}
        Ok(mu) => failures.push(format!("policy mu_t {mu:.4}")),
        Err(e) => failures.push(format!("policy: {e}")),
    }

    verdict(
        failures.is_empty(),
        if failures.is_empty() {
            "all EDGAR checks".into()
        } else {
            failures.join("; ")
        },
    )
}

type Criterion = (u32, &'static str, Duration, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        (
            1,
            "closed-form lognormal MLE",
            Duration::from_secs(1),
            c1_closed_form,
        ),
        (
            2,
            "Fisher information of lognormal MLE",
            Duration::from_secs(60),
            c2_fisher_information,
        ),
        (
            3,
            "model-selection recovery",
            Duration::from_secs(300),
            c3_model_recovery,
        ),
        (
            4,
            "normality test size at 0.05",
            Duration::from_secs(120),
            c4_test_size,
        ),
        (
            5,
            "Gibrat exact algebra",
            Duration::from_secs(60),
            c5_gibrat_algebra,
        ),
        (
            6,
            "Gibrat asymptotic lognormality",
            Duration::from_secs(300),
            c6_gibrat_lognormality,
        ),
        (7, "policy scale law", Duration::from_secs(60), c7_scale_law),
        (
            8,
            "policy round trip",
            Duration::from_secs(5),
            c8_policy_round_trip,
        ),
        (9, "Theil identity", Duration::from_secs(60), c9_theil),
        (
            10,
            "EDGAR reproduction",
            Duration::from_secs(300),
            c10_edgar,
        ),
    ];
    let only: Vec<u32> = std::env::var("ACCEPTANCE_ONLY")
        .ok()
        .map(|s| s.split(',').filter_map(|v| v.trim().parse().ok()).collect())
        .unwrap_or_default();
    let mut failed = 0;
    for (id, title, budget, run) in criteria {
        if !only.is_empty() && !only.contains(&id) {
            continue;
        }
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let (label, detail) = match outcome {
            Pass(d) if elapsed <= budget => ("PASS", d),
            Pass(d) => ("FAIL", format!("{d}; over time budget {budget:?}")),
            Fail(d) => ("FAIL", d),
            Skip(d) => ("SKIP", d),
        };
        if label == "FAIL" {
            failed += 1;
        }
        println!(
            "criterion {id:>2} {label} {title}: {detail} [{:.2}s]",
            elapsed.as_secs_f64()
        );
    }
    if failed > 0 {
        println!("{failed} criterion(s) failed");
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}

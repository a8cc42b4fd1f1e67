use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{bail, Context, Result};
use co2dist::dist::{ModelId, SizeDist};
use co2dist::fit::{fit_all, fit_mle, rank_models, SupportGroup};
use co2dist::gibrat::{build_growth_sample, fit_gibrat_with, simulate_gibrat, GibratMethod};
use co2dist::ingest::{load_panel, EmissionsPanel, PanelFormat};
use co2dist::normtest::{test_lognormality, TestId};
use co2dist::policy::{
    allocate_targets, compute_r, inequality_change, inequality_index, solve_parameter,
    FreeParameter, PolicyScenario,
};
use co2dist::regression::Covariance;
use co2dist::trend::{fit_trend, Response, TrendModel};

use crate::report::{heatmap_svg, num, p_class, sci1, Outputs, Table};
use crate::scenario::{Fixed, FixedSource, Scenario};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Dataset {
    Edgar,
    Gcb,
    Cdiac,
}

impl Dataset {
    pub fn label(self) -> &'static str {
        match self {
            Dataset::Edgar => "EDGAR",
            Dataset::Gcb => "GCB",
            Dataset::Cdiac => "CDIAC-FF",
        }
    }

    fn key(self) -> &'static str {
        match self {
            Dataset::Edgar => "edgar",
            Dataset::Gcb => "gcb",
            Dataset::Cdiac => "cdiac",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct YearRange {
    pub from: i32,
    pub to: i32,
}

impl std::str::FromStr for YearRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (a, b) = s
            .split_once(':')
            .ok_or_else(|| format!("expected A:B, got `{s}`"))?;
        let from = a.trim().parse().map_err(|_| format!("bad year `{a}`"))?;
        let to = b.trim().parse().map_err(|_| format!("bad year `{b}`"))?;
        Ok(YearRange { from, to })
    }
}

/// Options shared by every data-driven command.
#[derive(Debug, Clone, clap::Args)]
pub struct DataArgs {
    /// Emissions panel CSV.
    #[arg(long)]
    pub input: std::path::PathBuf,
    #[arg(long, value_enum, default_value = "edgar")]
    pub dataset: Dataset,
    /// `wide` (country,1970,1971,...) or `long` (country,year,emissions).
    #[arg(long, default_value = "wide", value_parser = parse_format)]
    pub format: PanelFormat,
    /// Inclusive year range `A:B`; defaults to every year in the file.
    #[arg(long)]
    pub years: Option<YearRange>,
    /// Input is in carbon mass; multiply by 3.664 to get CO2.
    #[arg(long)]
    pub convert_carbon: bool,
    #[arg(long, default_value = "out")]
    pub out: std::path::PathBuf,
}

fn parse_format(s: &str) -> Result<PanelFormat, String> {
    s.parse().map_err(|e: co2dist::Error| e.to_string())
}

pub struct Loaded {
    pub panel: EmissionsPanel,
    /// Years selected by `--years` (all panel years if absent).
    pub years: Vec<i32>,
}

pub fn load(args: &DataArgs) -> Result<Loaded> {
    if args.convert_carbon && args.dataset == Dataset::Edgar {
        bail!("EDGAR is already reported in CO2; --convert-carbon applies to gcb and cdiac inputs");
    }
    let mut panel = load_panel(&args.input, args.format)
        .with_context(|| format!("loading {}", args.input.display()))?;
    if args.convert_carbon {
        panel = panel.convert_carbon_to_co2();
    }
    let years = match args.years {
        Some(r) => panel
            .years()
            .iter()
            .copied()
            .filter(|y| (r.from..=r.to).contains(y))
            .collect(),
        None => panel.years().to_vec(),
    };
    Ok(Loaded { panel, years })
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_else(|| "NA".into())
}

pub fn summarize(args: &DataArgs) -> Result<Outputs> {
    let data = load(args)?;
    let mut table = Table::new([
        "dataset", "year", "n", "max", "min", "mean", "sd", "skewness", "kurtosis",
    ]);
    for &year in &data.years {
        let s = data
            .panel
            .summarize_year(year)
            .with_context(|| format!("year {year}"))?;
        table.push(vec![
            args.dataset.label().into(),
            year.to_string(),
            s.n.to_string(),
            num(s.max),
            num(s.min),
            num(s.mean),
            num(s.sd),
            opt(s.skewness),
            opt(s.kurtosis),
        ]);
    }
    let mut out = Outputs::new(&args.out);
    out.add_table("summary.csv", &table)?;
    Ok(out)
}

pub fn rank(args: &DataArgs) -> Result<Outputs> {
    let data = load(args)?;
    let mut table = Table::new([
        "dataset", "year", "model", "n", "loglik", "aic", "delta", "group", "boundary", "param1",
        "param2", "se1", "se2",
    ]);
    let mut counts: BTreeMap<ModelId, [usize; 3]> =
        ModelId::ALL.iter().map(|&m| (m, [0; 3])).collect();
    for &year in &data.years {
        let values = data.panel.cross_section_values(year)?;
        let fits = fit_all(&values).with_context(|| format!("fitting year {year}"))?;
        let ranking = rank_models(&fits)?;
        for entry in &ranking.entries {
            let fit = fits
                .iter()
                .find(|f| f.model == entry.model)
                .expect("ranked fit");
            let slot = match entry.group {
                SupportGroup::BestFit => 0,
                SupportGroup::LittleSupport => 1,
                SupportGroup::NoSupport => 2,
            };
            counts.get_mut(&entry.model).expect("model")[slot] += 1;
            let p = |i: usize| opt(fit.params.get(i).copied());
            let se = |i: usize| opt(fit.se.get(i).copied());
            table.push(vec![
                args.dataset.label().into(),
                year.to_string(),
                entry.model.to_string(),
                fit.n.to_string(),
                num(fit.loglik),
                num(entry.value),
                num(entry.delta),
                entry.group.label().into(),
                entry.boundary.to_string(),
                p(0),
                p(1),
                se(0),
                se(1),
            ]);
        }
    }
    let mut summary = Table::new([
        "dataset",
        "model",
        "best_fit",
        "little_support",
        "no_support",
        "years",
    ]);
    for (model, c) in counts {
        summary.push(vec![
            args.dataset.label().into(),
            model.to_string(),
            c[0].to_string(),
            c[1].to_string(),
            c[2].to_string(),
            data.years.len().to_string(),
        ]);
    }
    let mut out = Outputs::new(&args.out);
    out.add_table("rank.csv", &table)?;
    out.add_table("rank_summary.csv", &summary)?;
    Ok(out)
}

pub fn test(args: &DataArgs, alphas: (f64, f64)) -> Result<Outputs> {
    let data = load(args)?;
    let mut table = Table::new([
        "dataset",
        "year",
        "n",
        "test",
        "statistic",
        "p_value",
        "class",
    ]);
    let mut grid: Vec<Vec<&str>> = vec![Vec::new(); TestId::ALL.len()];
    let mut rejections = [[0usize; 2]; 7];
    let mut applicable = [0usize; 7];
    for &year in &data.years {
        let values = data.panel.cross_section_values(year)?;
        for (k, t) in TestId::ALL.into_iter().enumerate() {
            let (lo, hi) = t.valid_range();
            let (stat, p) = if (lo..=hi).contains(&values.len()) {
                let r = test_lognormality(t, &values).with_context(|| format!("{t} in {year}"))?;
                applicable[k] += 1;
                rejections[k][0] += usize::from(r.rejects_at(alphas.0));
                rejections[k][1] += usize::from(r.rejects_at(alphas.1));
                (r.statistic, r.p_value)
            } else {
                (f64::NAN, f64::NAN)
            };
            let class = p_class(p, alphas);
            grid[k].push(class);
            table.push(vec![
                args.dataset.label().into(),
                year.to_string(),
                values.len().to_string(),
                t.to_string(),
                num(stat),
                num(p),
                class.into(),
            ]);
        }
    }
    let mut counts = Table::new(["dataset", "test", "alpha", "rejections", "years"]);
    for (k, t) in TestId::ALL.into_iter().enumerate() {
        for (j, a) in [alphas.0, alphas.1].into_iter().enumerate() {
            counts.push(vec![
                args.dataset.label().into(),
                t.to_string(),
                num(a),
                rejections[k][j].to_string(),
                applicable[k].to_string(),
            ]);
        }
    }
    let rows: Vec<String> = TestId::ALL.iter().map(|t| t.to_string()).collect();
    let cols: Vec<String> = data.years.iter().map(|y| y.to_string()).collect();
    let mut out = Outputs::new(&args.out);
    out.add_table("tests.csv", &table)?;
    out.add_table("test_counts.csv", &counts)?;
    out.add("tests.svg", heatmap_svg(&rows, &cols, &grid).into_bytes());
    Ok(out)
}

pub fn gibrat(args: &DataArgs, alphas: (f64, f64), robust: bool) -> Result<Outputs> {
    let data = load(args)?;
    let cov = if robust {
        Covariance::Hc0
    } else {
        Covariance::Ols
    };
    let mut betas = Table::new(["period", "dataset", "M1", "M2", "M3", "M4"]);
    let mut detail = Table::new([
        "period", "dataset", "method", "n", "alpha", "beta", "se_beta", "t", "p_value", "class",
    ]);
    let mut grid: Vec<Vec<&str>> = vec![Vec::new(); 4];
    let mut cols = Vec::new();
    for pair in data.years.windows(2) {
        let sample = build_growth_sample(&data.panel, pair[0], pair[1])?;
        let period = sample.label();
        let mut row = vec![period.clone(), args.dataset.label().into()];
        for (k, m) in GibratMethod::ALL.into_iter().enumerate() {
            let fit =
                fit_gibrat_with(m, &sample, cov).with_context(|| format!("{m} for {period}"))?;
            row.push(if m == GibratMethod::M1 {
                format!("{:.2}", fit.beta)
            } else {
                sci1(fit.beta)
            });
            let class = p_class(fit.p_value, alphas);
            grid[k].push(class);
            detail.push(vec![
                period.clone(),
                args.dataset.label().into(),
                m.to_string(),
                fit.n.to_string(),
                num(fit.alpha),
                num(fit.beta),
                num(fit.se_beta),
                num(fit.t_stat),
                num(fit.p_value),
                class.into(),
            ]);
        }
        betas.push(row);
        cols.push(pair[1].to_string());
    }
    let rows: Vec<String> = GibratMethod::ALL.iter().map(|m| m.to_string()).collect();
    let mut out = Outputs::new(&args.out);
    out.add_table("gibrat_beta.csv", &betas)?;
    out.add_table("gibrat_pvalues.csv", &detail)?;
    out.add("gibrat.svg", heatmap_svg(&rows, &cols, &grid).into_bytes());
    Ok(out)
}

/// `(year, mu, sigma, n)`
type ParamSeries = Vec<(i32, f64, f64, usize)>;

/// Lognormal MLE per year.
fn lognormal_series(data: &Loaded) -> Result<ParamSeries> {
    data.years
        .iter()
        .map(|&year| {
            let values = data.panel.cross_section_values(year)?;
            let fit = fit_mle(ModelId::Log, &values)
                .with_context(|| format!("lognormal fit for {year}"))?;
            Ok((year, fit.params[0], fit.params[1], fit.n))
        })
        .collect()
}

fn trends(series: &[(i32, f64, f64, usize)]) -> Result<(TrendModel, TrendModel)> {
    let mu: Vec<(i32, f64)> = series.iter().map(|s| (s.0, s.1)).collect();
    let sigma: Vec<(i32, f64)> = series.iter().map(|s| (s.0, s.2)).collect();
    Ok((
        fit_trend(&mu, Response::Mu)?,
        fit_trend(&sigma, Response::Sigma)?,
    ))
}

pub fn trend(args: &DataArgs, predict_years: &[i32], base_year: i32) -> Result<Outputs> {
    let data = load(args)?;
    let series = lognormal_series(&data)?;
    let (mu, sigma) = trends(&series).context("fitting trends")?;
    let base = data
        .panel
        .cross_section_values(base_year)
        .with_context(|| format!("base year {base_year} for R"))?;

    let mut params = Table::new(["dataset", "year", "n", "mu", "sigma"]);
    for (year, m, s, n) in &series {
        params.push(vec![
            args.dataset.label().into(),
            year.to_string(),
            n.to_string(),
            num(*m),
            num(*s),
        ]);
    }
    let mut t5 = Table::new(["statistic", "mu", "sigma"]);
    type Row = (&'static str, fn(&TrendModel) -> String);
    let rows: [Row; 11] = [
        ("alpha", |m| num(m.alpha)),
        ("se_alpha", |m| num(m.se_alpha)),
        ("se_alpha_hac", |m| num(m.hac_se_alpha)),
        ("beta", |m| num(m.beta)),
        ("se_beta", |m| num(m.se_beta)),
        ("se_beta_hac", |m| num(m.hac_se_beta)),
        ("r_squared", |m| num(m.r_squared)),
        ("f_statistic", |m| num(m.f_stat)),
        ("f_p_value", |m| num(m.f_p_value)),
        ("n", |m| m.n.to_string()),
        ("hac_lag", |m| m.hac_lag.to_string()),
    ];
    for (name, get) in rows {
        t5.push(vec![name.into(), get(&mu), get(&sigma)]);
    }
    let mut t6 = Table::new(["year", "mu", "sigma", "R"]);
    for &year in predict_years {
        let (m, s) = (mu.predict(year), sigma.predict(year));
        let r = if s > 0.0 {
            num(compute_r(m, s, &base)?)
        } else {
            "NA".into()
        };
        t6.push(vec![year.to_string(), num(m), num(s), r]);
    }
    let mut out = Outputs::new(&args.out);
    out.add_table("lognormal_params.csv", &params)?;
    out.add_table("trend_table5.csv", &t5)?;
    out.add_table("trend_table6.csv", &t6)?;
    Ok(out)
}

pub fn policy(args: &DataArgs, scenario_path: &Path) -> Result<Outputs> {
    let scenario = Scenario::load(scenario_path)?;
    if let Some(d) = &scenario.dataset {
        if !d.eq_ignore_ascii_case(args.dataset.key()) {
            bail!(
                "scenario is for dataset `{d}` but --dataset is {}",
                args.dataset.key()
            );
        }
    }
    let data = load(args)?;
    let fixed_value = match scenario.source()? {
        FixedSource::Value(v) => v,
        FixedSource::Trend => {
            let (mu, sigma) =
                trends(&lognormal_series(&data)?).context("fitting trends for from_trend")?;
            match scenario.fix {
                Fixed::Mu => mu.predict(scenario.target_year),
                Fixed::Sigma => sigma.predict(scenario.target_year),
            }
        }
    };
    let base = data.panel.cross_section_values(scenario.base_year)?;
    let reference: Vec<(String, f64)> = data
        .panel
        .cross_section(scenario.reference_year)?
        .into_iter()
        .map(|(c, v)| (c.to_string(), v))
        .collect();
    let free = scenario.fix.free();
    let solved = solve_parameter(free, fixed_value, scenario.r_target, &base)
        .context("solving for the free parameter")?;
    let (mu_t, sigma_t) = match free {
        FreeParameter::Mu => (solved, fixed_value),
        FreeParameter::Sigma => (fixed_value, solved),
    };
    let plan = PolicyScenario {
        base_year: scenario.base_year,
        reference_year: scenario.reference_year,
        target_year: scenario.target_year,
        base_emissions: base.clone(),
        reference,
        mu_t,
        sigma_t,
        r_target: scenario.r_target,
    };
    let targets = allocate_targets(&plan).context("allocating targets")?;
    let achieved = compute_r(mu_t, sigma_t, &base)?;
    let sigma_1 = fit_mle(ModelId::Log, &base)?.params[1];
    let mut sorted: Vec<f64> = plan.reference.iter().map(|r| r.1).collect();
    sorted.sort_by(f64::total_cmp);
    let ties = sorted.windows(2).filter(|w| w[0] == w[1]).count();

    let mut t = Table::new(["country", "rank", "reference_emissions", "r_i", "group"]);
    let mut plot = Table::new(["x", "y", "series"]);
    for c in &targets {
        t.push(vec![
            c.country.clone(),
            c.rank.to_string(),
            num(c.reference_emissions),
            num(c.r_i),
            c.group.label().into(),
        ]);
        plot.push(vec![c.rank.to_string(), num(c.r_i), "r_i".into()]);
    }
    for rank in [1, targets.len()] {
        plot.push(vec![
            rank.to_string(),
            num(scenario.r_target),
            "R_target".into(),
        ]);
    }
    let group_count = |label: &str| {
        targets
            .iter()
            .filter(|c| c.group.label() == label)
            .count()
            .to_string()
    };
    let mut summary = Table::new(["key", "value"]);
    let fixed_name = match scenario.fix {
        Fixed::Mu => "mu",
        Fixed::Sigma => "sigma",
    };
    for (k, v) in [
        ("dataset", args.dataset.label().to_string()),
        ("base_year", scenario.base_year.to_string()),
        ("reference_year", scenario.reference_year.to_string()),
        ("target_year", scenario.target_year.to_string()),
        ("N", base.len().to_string()),
        ("fixed", fixed_name.to_string()),
        ("R_target", num(scenario.r_target)),
        ("R_achieved", num(achieved)),
        ("mu_t", num(mu_t)),
        ("sigma_t", num(sigma_t)),
        ("theil_t", num(inequality_index(sigma_t))),
        ("sigma_base", num(sigma_1)),
        ("theil_base", num(inequality_index(sigma_1))),
        ("delta_theil", num(inequality_change(sigma_1, sigma_t))),
        ("low_emission", group_count("low_emission")),
        ("middle_emission", group_count("middle_emission")),
        ("high_emission", group_count("high_emission")),
        ("tied_reference_pairs", ties.to_string()),
    ] {
        summary.push(vec![k.into(), v]);
    }
    let mut out = Outputs::new(&args.out);
    out.add_table("policy_targets.csv", &t)?;
    out.add_table("policy_summary.csv", &summary)?;
    out.add_table("policy_plot.csv", &plot)?;
    Ok(out)
}

#[derive(Debug, Clone, clap::Args)]
pub struct SimulateArgs {
    #[arg(long, default_value_t = 200)]
    pub countries: usize,
    #[arg(long, default_value_t = 52)]
    pub periods: usize,
    #[arg(long, default_value_t = 1970)]
    pub first_year: i32,
    /// Lognormal parameters of the first cross-section.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub mu0: f64,
    #[arg(long, default_value_t = 2.3)]
    pub sigma0: f64,
    /// Standard deviation of the yearly log growth shock.
    #[arg(long, default_value_t = 0.05)]
    pub shock_sd: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "out")]
    pub out: std::path::PathBuf,
}

pub fn simulate(args: &SimulateArgs) -> Result<Outputs> {
    let init = SizeDist::lognormal(args.mu0, args.sigma0)?;
    let sim = simulate_gibrat(
        args.countries,
        args.periods,
        &init,
        args.shock_sd,
        args.seed,
    )?;
    let years: Vec<i32> = sim.years().iter().map(|y| y + args.first_year).collect();
    let values = sim
        .countries()
        .iter()
        .map(|c| sim.years().iter().map(|&y| sim.get(c, y)).collect())
        .collect();
    let panel = EmissionsPanel::new(sim.countries().to_vec(), years, values)?;
    let mut bytes = Vec::new();
    panel.write_long(&mut bytes)?;
    let mut out = Outputs::new(&args.out);
    out.add("simulated.csv", bytes);
    Ok(out)
}

//! Statistical size distributions for national fossil CO₂ emissions.
//!
//! The crate fits six candidate distributions to country-level emission
//! cross-sections, ranks them by information criteria, tests the lognormal
//! hypothesis, checks Gibrat's law of proportionate growth, extrapolates the
//! lognormal parameters over time and turns a global emissions ratio into
//! per-country targets.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` deliberately also catches NaN

pub mod dist;
pub mod error;
pub mod fit;
pub mod gibrat;
pub mod ingest;
pub mod normtest;
pub mod numeric;
pub mod policy;
pub mod regression;
pub mod special;
pub mod trend;

pub use dist::{ModelId, SizeDist};
pub use error::{Error, Result};
pub use fit::{fit_all, fit_mle, rank_models, FitResult, ModelRanking, SupportGroup};
pub use gibrat::{
    build_growth_sample, fit_gibrat, simulate_gibrat, GibratFit, GibratMethod, GrowthSample,
};
pub use ingest::{EmissionsPanel, PanelFormat, YearSummary};
pub use normtest::{
    qq_plot_data, rank_size_plot_data, test_lognormality, PlotSeries, TestId, TestReport,
};
pub use policy::{
    allocate_targets, compute_r, solve_parameter, CountryTarget, EmissionGroup, FreeParameter,
    PolicyScenario,
};
pub use trend::{fit_trend, predict, Response, TrendModel};

//! Policy scenario files (TOML).
//!
//! ```toml
//! dataset = "edgar"
//! base_year = 1990
//! reference_year = 1990
//! target_year = 2030
//! R_target = 0.45
//! fix = "sigma"        # held fixed; the other parameter is solved for
//! fixed_value = 2.3474 # or: from_trend = true
//! ```

use std::path::Path;

use anyhow::{bail, Context, Result};
use co2dist::policy::FreeParameter;
use serde::Deserialize;

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub dataset: Option<String>,
    pub base_year: i32,
    pub reference_year: i32,
    pub target_year: i32,
    #[serde(rename = "R_target")]
    pub r_target: f64,
    pub fix: Fixed,
    pub fixed_value: Option<f64>,
    #[serde(default)]
    pub from_trend: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Fixed {
    Mu,
    Sigma,
}

impl Fixed {
    /// The parameter left to solve for.
    pub fn free(self) -> FreeParameter {
        match self {
            Fixed::Mu => FreeParameter::Sigma,
            Fixed::Sigma => FreeParameter::Mu,
        }
    }
}

/// Where the fixed parameter's value comes from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FixedSource {
    Value(f64),
    Trend,
}

impl Scenario {
    pub fn parse(text: &str) -> Result<Self> {
        let s: Scenario = toml::from_str(text)?;
        s.source()?;
        if !(s.r_target > 0.0 && s.r_target.is_finite()) {
            bail!("R_target must be positive, got {}", s.r_target);
        }
        Ok(s)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("parsing scenario {}", path.display()))
    }

    pub fn source(&self) -> Result<FixedSource> {
        match (self.fixed_value, self.from_trend) {
            (Some(v), false) => Ok(FixedSource::Value(v)),
            (None, true) => Ok(FixedSource::Trend),
            (Some(_), true) => bail!("give either fixed_value or from_trend, not both"),
            (None, false) => bail!("missing fixed_value (or set from_trend = true)"),
        }
    }
}

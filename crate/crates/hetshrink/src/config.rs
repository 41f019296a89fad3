//! TOML scenario files.
//!
//! ```toml
//! name = "group3"
//! variance_config = "group3"        # or an explicit list of variances
//! prior = "Zero"                    # "HomoscedasticInfinity", { gamma = [...] },
//!                                   # { homoscedastic = g } or { proportional = g }
//! n_rep = 100000
//! seed = 1
//! output_path = "group3.csv"
//!
//! [curve]
//! kind = ["homoscedastic", "heteroscedastic", "axis1"]
//! eta_max = 16.0
//! eta_steps = 17
//!
//! [[estimators]]
//! name = "MB"
//! label = "MB(gammaI)"
//! prior = { homoscedastic = 25.6 }
//! factor_version = "alternative"
//! ```
//!
//! The scenario prior is handed to every estimator that takes one unless the
//! entry sets its own.

use std::path::{Path, PathBuf};

use hetshrink_core::risk::{eta_grid, variance_config, DirectionKind, DEFAULT_N_REP};
use hetshrink_core::{EstimatorKind, EstimatorSpec, FactorVersion, PriorSpec};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum VarianceSource {
    Named(String),
    Explicit(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PriorConfig {
    Spec(PriorSpec),
    Homoscedastic { homoscedastic: f64 },
    Proportional { proportional: f64 },
}

impl Default for PriorConfig {
    fn default() -> Self {
        PriorConfig::Spec(PriorSpec::Zero)
    }
}

impl PriorConfig {
    pub fn resolve(&self, d: &[f64]) -> Result<PriorSpec, CliError> {
        let prior = match self {
            PriorConfig::Spec(PriorSpec::Explicit(g)) if g.len() != d.len() => {
                return Err(CliError::Config(format!(
                    "prior has {} entries but p = {}",
                    g.len(),
                    d.len()
                )))
            }
            PriorConfig::Spec(p) => p.clone(),
            PriorConfig::Homoscedastic { homoscedastic } => {
                PriorSpec::homoscedastic(*homoscedastic, d.len())?
            }
            PriorConfig::Proportional { proportional } => {
                PriorSpec::proportional(*proportional, d)?
            }
        };
        Ok(prior)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimatorEntry {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default)]
    pub factor_version: FactorVersion,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prior: Option<PriorConfig>,
}

impl EstimatorEntry {
    pub fn resolve(
        &self,
        d: &[f64],
        scenario_prior: &PriorSpec,
    ) -> Result<NamedEstimator, CliError> {
        let kind = EstimatorKind::from_name(&self.name)?;
        let mut spec = EstimatorSpec::new(kind).with_version(self.factor_version)?;
        if let Some(c) = self.c {
            spec = spec.with_param("c", c)?;
        }
        if let Some(s) = self.sigma2 {
            spec = spec.with_param("sigma2", s)?;
        }
        match &self.prior {
            Some(p) => spec = spec.with_prior(p.resolve(d)?)?,
            None if kind.uses_prior() => spec = spec.with_prior(scenario_prior.clone())?,
            None => {}
        }
        let label = self.label.clone().unwrap_or_else(|| spec.label());
        Ok(NamedEstimator { label, spec })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany {
    One(String),
    Many(Vec<String>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveConfig {
    #[serde(default = "default_kinds")]
    pub kind: OneOrMany,
    #[serde(default = "default_eta_max")]
    pub eta_max: f64,
    #[serde(default = "default_eta_steps")]
    pub eta_steps: usize,
}

fn default_kinds() -> OneOrMany {
    OneOrMany::Many(vec![
        "homoscedastic".into(),
        "heteroscedastic".into(),
        "axis1".into(),
    ])
}

fn default_eta_max() -> f64 {
    16.0
}

fn default_eta_steps() -> usize {
    17
}

impl Default for CurveConfig {
    fn default() -> Self {
        CurveConfig {
            kind: default_kinds(),
            eta_max: default_eta_max(),
            eta_steps: default_eta_steps(),
        }
    }
}

/// Which directions and scale factors the bounds table evaluates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsConfig {
    /// Any of `"dagger"`, `"identity"`, `"inverse_variance"`.
    #[serde(default = "default_directions")]
    pub directions: Vec<String>,
    /// Values of alpha; empty means the floor, the midpoint to 1, and 1.
    #[serde(default)]
    pub alphas: Vec<f64>,
}

fn default_directions() -> Vec<String> {
    vec![
        "dagger".into(),
        "identity".into(),
        "inverse_variance".into(),
    ]
}

impl Default for BoundsConfig {
    fn default() -> Self {
        BoundsConfig {
            directions: default_directions(),
            alphas: Vec::new(),
        }
    }
}

fn default_n_rep() -> usize {
    DEFAULT_N_REP
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub variance_config: VarianceSource,
    #[serde(default)]
    pub prior: PriorConfig,
    pub estimators: Vec<EstimatorEntry>,
    #[serde(default)]
    pub curve: CurveConfig,
    #[serde(default = "default_n_rep")]
    pub n_rep: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_path: Option<PathBuf>,
    #[serde(default)]
    pub bounds: BoundsConfig,
}

/// An estimator spec with the label used in output files.
#[derive(Debug, Clone, PartialEq)]
pub struct NamedEstimator {
    pub label: String,
    pub spec: EstimatorSpec,
}

/// A validated scenario with every default filled in.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub d: Vec<f64>,
    pub prior: PriorSpec,
    pub estimators: Vec<NamedEstimator>,
    pub kinds: Vec<DirectionKind>,
    pub eta_grid: Vec<f64>,
    pub n_rep: usize,
    pub seed: u64,
    pub output_path: Option<PathBuf>,
    pub bounds: BoundsConfig,
}

impl ScenarioConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario configs always serialize")
    }

    pub fn resolve(&self) -> Result<Scenario, CliError> {
        let (name, d) = match &self.variance_config {
            VarianceSource::Named(n) => {
                let v = variance_config(n)?;
                (self.name.clone().unwrap_or(v.name), v.d)
            }
            VarianceSource::Explicit(d) => {
                let v = hetshrink_core::risk::VarianceConfig::explicit(d.clone())?;
                (self.name.clone().unwrap_or(v.name), v.d)
            }
        };
        let prior = self.prior.resolve(&d)?;
        if self.estimators.is_empty() {
            return Err(CliError::Config(
                "at least one estimator is required".into(),
            ));
        }
        let estimators = self
            .estimators
            .iter()
            .map(|e| e.resolve(&d, &prior))
            .collect::<Result<Vec<_>, _>>()?;
        let kinds = match &self.curve.kind {
            OneOrMany::One(k) => vec![DirectionKind::parse(k)?],
            OneOrMany::Many(ks) => ks
                .iter()
                .map(|k| DirectionKind::parse(k))
                .collect::<Result<Vec<_>, _>>()?,
        };
        if kinds.is_empty() {
            return Err(CliError::Config(
                "curve.kind must name at least one direction".into(),
            ));
        }
        if let Some(j) = kinds.iter().find_map(|k| match k {
            DirectionKind::Axis(j) if *j >= d.len() => Some(*j),
            _ => None,
        }) {
            return Err(CliError::Config(format!(
                "axis{} exceeds p = {}",
                j + 1,
                d.len()
            )));
        }
        let eta_grid = eta_grid(self.curve.eta_max, self.curve.eta_steps)?;
        if self.n_rep < 2 {
            return Err(CliError::Config("n_rep must be at least 2".into()));
        }
        for dir in &self.bounds.directions {
            if !matches!(dir.as_str(), "dagger" | "identity" | "inverse_variance") {
                return Err(CliError::Config(format!(
                    "unknown bounds direction `{dir}`"
                )));
            }
        }
        Ok(Scenario {
            name,
            d,
            prior,
            estimators,
            kinds,
            eta_grid,
            n_rep: self.n_rep,
            seed: self.seed,
            output_path: self.output_path.clone(),
            bounds: self.bounds.clone(),
        })
    }
}

/// Scenario files shipped with the crate.
pub const PRESETS: &[(&str, &str)] = &[
    ("group3", include_str!("../presets/group3.toml")),
    ("group3_alt", include_str!("../presets/group3_alt.toml")),
    ("eq5", include_str!("../presets/eq5.toml")),
    ("group22", include_str!("../presets/group22.toml")),
    ("invchisq8df3", include_str!("../presets/invchisq8df3.toml")),
    (
        "invchisq24df5",
        include_str!("../presets/invchisq24df5.toml"),
    ),
    ("bayes_group3", include_str!("../presets/bayes_group3.toml")),
];

pub fn preset(name: &str) -> Result<ScenarioConfig, CliError> {
    let text = PRESETS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, t)| *t)
        .ok_or_else(|| CliError::Config(format!("unknown preset `{name}`")))?;
    ScenarioConfig::from_toml(text)
}

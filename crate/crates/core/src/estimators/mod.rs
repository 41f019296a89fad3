//! Estimators of the normal mean, each a pure map from `X` to an estimate.
//!
//! Free functions take the data and every ingredient explicitly. The
//! [`Estimator`] type compiles an [`EstimatorSpec`] against fixed variances
//! once, so repeated application (as in Monte Carlo loops) skips the setup.

mod block;
mod classical;
mod empirical;
mod linear;

use alloc::vec::Vec;

use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

pub use block::{block_shrink, BlockPlan};
pub use classical::{
    bayes_rule, berger_b, james_stein, minimax_mb, minimax_range_s, robust_rb, spherical_s,
    spherical_s_fn, MbPlan, MbVariant,
};
pub use empirical::{eb_morris, sure_printed, xkb_sure};
pub use linear::{
    linear_shrink, positive_part_canonical, positive_part_general, Magnitude, PositivePartGeneral,
};

use crate::direction::solve_direction;
use crate::model::{
    check_variances, effective_gamma, EffectiveGamma, EstimatorKind, EstimatorSpec, PriorSpec,
};
use crate::{Error, FactorVersion, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(untagged)]
pub enum MetaValue {
    Real(f64),
    Count(u64),
    Flag(bool),
}

fn serialize_meta<S: Serializer>(
    meta: &[(&'static str, MetaValue)],
    s: S,
) -> core::result::Result<S::Ok, S::Error> {
    let mut map = s.serialize_map(Some(meta.len()))?;
    for (k, v) in meta {
        map.serialize_entry(k, v)?;
    }
    map.end()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Estimate {
    pub value: Vec<f64>,
    /// Per-coordinate multipliers with `value_j = shrink_factors_j * x_j`,
    /// present for coordinatewise estimators.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shrink_factors: Option<Vec<f64>>,
    #[serde(serialize_with = "serialize_meta")]
    pub meta: Vec<(&'static str, MetaValue)>,
}

impl Estimate {
    pub(crate) fn from_factors(x: &[f64], factors: Vec<f64>) -> Self {
        let value = x.iter().zip(&factors).map(|(x, f)| f * x).collect();
        Estimate {
            value,
            shrink_factors: Some(factors),
            meta: Vec::new(),
        }
    }

    pub(crate) fn with(mut self, key: &'static str, value: MetaValue) -> Self {
        self.meta.push((key, value));
        self
    }

    pub fn meta(&self, key: &str) -> Option<MetaValue> {
        self.meta.iter().find(|(k, _)| *k == key).map(|(_, v)| *v)
    }

    pub fn meta_real(&self, key: &str) -> Option<f64> {
        match self.meta(key)? {
            MetaValue::Real(v) => Some(v),
            MetaValue::Count(v) => Some(v as f64),
            MetaValue::Flag(_) => None,
        }
    }
}

pub(crate) fn check_len(x: &[f64], p: usize) -> Result<()> {
    if x.len() != p {
        return Err(Error::LengthMismatch {
            expected: p,
            got: x.len(),
        });
    }
    Ok(())
}

pub(crate) fn norm2(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

/// Anything that maps data to an estimate; implemented by [`Estimator`].
pub trait PointEstimator: Sync {
    fn dim(&self) -> usize;
    fn estimate(&self, x: &[f64]) -> Estimate;
}

#[derive(Debug, Clone)]
enum Plan {
    Identity,
    Factors(Vec<f64>),
    JamesStein { c: f64, sigma2: f64, plus: bool },
    Spherical { c: f64 },
    Berger { c: f64, d: Vec<f64>, plus: bool },
    RobustBayes { gamma: Vec<f64>, f: f64 },
    Mb(MbPlan),
    Eb,
    Xkb,
    Dagger { a: Vec<f64>, c: f64 },
    DaggerPlus { a: Vec<f64>, f: f64 },
    Block(BlockPlan),
}

/// An [`EstimatorSpec`] compiled against fixed canonical variances.
#[derive(Debug, Clone)]
pub struct Estimator {
    spec: EstimatorSpec,
    d: Vec<f64>,
    plan: Plan,
}

fn dagger_direction(d: &[f64], prior: &PriorSpec) -> Result<(Vec<f64>, f64)> {
    let sol = solve_direction(d, prior)?;
    Ok((sol.a_dag, sol.c_star))
}

impl Estimator {
    /// Compiles `spec` for variances `d`.
    ///
    /// Defaults: `c = (p-2)_+` for JS, JS+, B and B+; `c = (tr D - 2 max d)_+`
    /// for S; `sigma2` is the common variance when all `d_j` agree (JS
    /// requires it explicitly otherwise); the prior is `Gamma = 0`. The
    /// alternative factor version doubles the shrinkage constant, including
    /// an explicit `c`.
    pub fn new(spec: &EstimatorSpec, d: &[f64]) -> Result<Self> {
        use EstimatorKind::*;
        spec.validate()?;
        check_variances(d)?;
        let p = d.len();
        let pm2 = (p as f64 - 2.0).max(0.0);
        let mult = spec.factor_version.multiplier();
        let prior = spec.prior.clone().unwrap_or(PriorSpec::Zero);
        let gamma = effective_gamma(&prior, d)?;
        let c = spec.param("c");
        let plan = match spec.kind {
            Identity => Plan::Identity,
            Bayes => match &gamma {
                EffectiveGamma::HomoscedasticInfinity => Plan::Identity,
                EffectiveGamma::Finite(g) => {
                    Plan::Factors(d.iter().zip(g).map(|(d, g)| g / (d + g)).collect())
                }
            },
            JamesStein | JamesSteinPlus => {
                let sigma2 = match spec.param("sigma2") {
                    Some(s) => s,
                    None if d.iter().all(|v| *v == d[0]) => d[0],
                    None => {
                        return Err(Error::param(
                            "sigma2",
                            "required when the variances are not all equal",
                        ))
                    }
                };
                Plan::JamesStein {
                    c: c.unwrap_or(pm2),
                    sigma2,
                    plus: spec.kind == JamesSteinPlus,
                }
            }
            Spherical => {
                let tr: f64 = d.iter().sum();
                let max = d.iter().copied().fold(0.0, f64::max);
                Plan::Spherical {
                    c: c.unwrap_or((tr - 2.0 * max).max(0.0)),
                }
            }
            Berger | BergerPlus => Plan::Berger {
                c: mult * c.unwrap_or(pm2),
                d: d.to_vec(),
                plus: spec.kind == BergerPlus,
            },
            RobustBayes => match gamma {
                EffectiveGamma::HomoscedasticInfinity => Plan::Identity,
                EffectiveGamma::Finite(g) => Plan::RobustBayes {
                    gamma: g,
                    f: mult * pm2,
                },
            },
            MinimaxBerger | MinimaxBergerSimplified => {
                let variant = match (spec.kind, spec.factor_version) {
                    (MinimaxBergerSimplified, _) => MbVariant::Simplified,
                    (_, FactorVersion::Usual) => MbVariant::Standard,
                    (_, FactorVersion::Alternative) => MbVariant::Alternative,
                };
                match MbPlan::new(d, &gamma, variant)? {
                    Some(plan) => Plan::Mb(plan),
                    None => Plan::Identity,
                }
            }
            EmpiricalBayes => Plan::Eb,
            Sure => Plan::Xkb,
            Dagger => {
                let (a, c) = dagger_direction(d, &prior)?;
                Plan::Dagger { a, c }
            }
            DaggerPlus | DaggerPlusZero | DaggerPlusInfinity => {
                let prior = match spec.kind {
                    DaggerPlusZero => PriorSpec::Zero,
                    DaggerPlusInfinity => PriorSpec::HomoscedasticInfinity,
                    _ => prior,
                };
                let (a, c) = dagger_direction(d, &prior)?;
                Plan::DaggerPlus { a, f: mult * c }
            }
            Block => Plan::Block(BlockPlan::new(d, &gamma)?),
        };
        Ok(Estimator {
            spec: spec.clone(),
            d: d.to_vec(),
            plan,
        })
    }

    pub fn spec(&self) -> &EstimatorSpec {
        &self.spec
    }

    pub fn label(&self) -> alloc::string::String {
        self.spec.label()
    }

    /// The shrinkage direction used by the `Adag` and `A+` kinds.
    pub fn direction(&self) -> Option<&[f64]> {
        match &self.plan {
            Plan::Dagger { a, .. } | Plan::DaggerPlus { a, .. } => Some(a),
            _ => None,
        }
    }

    pub fn apply(&self, x: &[f64]) -> Result<Estimate> {
        check_len(x, self.d.len())?;
        Ok(self.run(x))
    }

    fn run(&self, x: &[f64]) -> Estimate {
        match &self.plan {
            Plan::Identity => Estimate::from_factors(x, alloc::vec![1.0; x.len()]),
            Plan::Factors(f) => Estimate::from_factors(x, f.clone()),
            Plan::JamesStein { c, sigma2, plus } => {
                classical::james_stein_raw(x, *sigma2, *c, *plus)
            }
            Plan::Spherical { c } => classical::spherical_raw(x, |_| *c),
            Plan::Berger { c, d, plus } => classical::berger_raw(x, d, *c, *plus),
            Plan::RobustBayes { gamma, f } => classical::robust_rb_raw(x, &self.d, gamma, *f),
            Plan::Mb(plan) => plan.apply(x),
            Plan::Eb => empirical::eb_raw(x, &self.d),
            Plan::Xkb => empirical::xkb_raw(x, &self.d),
            Plan::Dagger { a, c } => linear::diagonal_linear_raw(x, a, *c),
            Plan::DaggerPlus { a, f } => linear::positive_part_raw(x, a, *f),
            Plan::Block(plan) => plan.apply(x),
        }
    }
}

impl PointEstimator for Estimator {
    fn dim(&self) -> usize {
        self.d.len()
    }

    fn estimate(&self, x: &[f64]) -> Estimate {
        self.run(x)
    }
}

#[cfg(test)]
mod tests;

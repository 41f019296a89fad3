//! The work behind each subcommand, independent of argument parsing.

use hetshrink_core::bounds::{self, BoundReport};
use hetshrink_core::direction::{self, DirectionSolution};
use hetshrink_core::estimators::{Estimate, Estimator};
use hetshrink_core::model::{effective_gamma, EffectiveGamma};
use hetshrink_core::risk::{risk_curve_with, RiskCurve};
use hetshrink_core::{EstimatorSpec, PriorSpec};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::Scenario;
use crate::parallel::Parallel;
use crate::CliError;

pub fn solve_direction(s: &Scenario) -> Result<DirectionSolution, CliError> {
    Ok(direction::solve_direction(&s.d, &s.prior)?)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimateRecord {
    pub estimator: String,
    pub spec: EstimatorSpec,
    #[serde(flatten)]
    pub estimate: Estimate,
}

pub fn estimate(s: &Scenario, x: &[f64]) -> Result<Vec<EstimateRecord>, CliError> {
    if x.len() != s.d.len() {
        return Err(CliError::Config(format!(
            "x has {} entries but p = {}",
            x.len(),
            s.d.len()
        )));
    }
    s.estimators
        .iter()
        .map(|e| {
            let estimate = Estimator::new(&e.spec, &s.d)?.apply(x)?;
            Ok(EstimateRecord {
                estimator: e.label.clone(),
                spec: e.spec.clone(),
                estimate,
            })
        })
        .collect()
}

/// One curve per (estimator, direction kind), estimators outermost.
pub fn risk_curves(s: &Scenario) -> Result<Vec<RiskCurve>, CliError> {
    let compiled = s
        .estimators
        .iter()
        .map(|e| Ok((e, Estimator::new(&e.spec, &s.d)?)))
        .collect::<Result<Vec<_>, CliError>>()?;
    let jobs: Vec<_> = compiled
        .iter()
        .flat_map(|(e, est)| s.kinds.iter().map(move |k| (*e, est, *k)))
        .collect();
    jobs.par_iter()
        .map(|(named, est, kind)| {
            let mut curve =
                risk_curve_with(&Parallel, est, *kind, &s.d, &s.eta_grid, s.n_rep, s.seed)?;
            curve.estimator = named.label.clone();
            Ok(curve)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundRow {
    pub bound: String,
    /// Direction the bound is evaluated at, if it depends on one.
    pub direction: String,
    /// `None` when the bound does not apply.
    pub value: Option<f64>,
    /// Conditions of validity, or the reason the bound does not apply.
    pub assumptions: String,
}

impl BoundRow {
    fn from_result(bound: &str, direction: &str, r: hetshrink_core::Result<BoundReport>) -> Self {
        match r {
            Ok(rep) => BoundRow {
                bound: rep.name,
                direction: direction.into(),
                value: Some(rep.value),
                assumptions: rep.assumptions.join("; "),
            },
            Err(e) => BoundRow {
                bound: bound.into(),
                direction: direction.into(),
                value: None,
                assumptions: format!("inapplicable: {e}"),
            },
        }
    }

    fn value(
        bound: &str,
        direction: &str,
        r: hetshrink_core::Result<f64>,
        assumptions: &str,
    ) -> Self {
        Self::from_result(
            bound,
            direction,
            r.map(|v| BoundReport {
                name: bound.into(),
                value: v,
                assumptions: vec![assumptions.into()],
            }),
        )
    }

    pub fn applicable(&self) -> bool {
        self.value.is_some()
    }
}

type DirectionBound = fn(&[f64], &[f64], &[f64]) -> hetshrink_core::Result<BoundReport>;

fn named_direction(name: &str, d: &[f64], prior: &PriorSpec) -> hetshrink_core::Result<Vec<f64>> {
    match name {
        "dagger" => Ok(direction::solve_direction(d, prior)?.a_dag),
        "identity" => Ok(vec![1.0; d.len()]),
        _ => Ok(d.iter().map(|v| 1.0 / v).collect()),
    }
}

/// Every bound for the scenario's `(D, Gamma)`, with inapplicable rows kept
/// and marked.
pub fn bounds_table(s: &Scenario) -> Result<Vec<BoundRow>, CliError> {
    let d = &s.d;
    let gamma = match effective_gamma(&s.prior, d)? {
        EffectiveGamma::Finite(g) => g,
        EffectiveGamma::HomoscedasticInfinity => {
            return Err(CliError::Config(
                "bounds need a finite prior variance".into(),
            ));
        }
    };
    let mut rows = Vec::new();
    rows.push(BoundRow::value(
        "bayes_rule_risk",
        "",
        bounds::bayes_rule_risk(d, &gamma),
        "Bayes rule, prior N(0, Gamma)",
    ));
    for name in &s.bounds.directions {
        let a = named_direction(name, d, &s.prior);
        let c = a
            .as_ref()
            .map(|a| bounds::c_star_canonical(d, a))
            .map_err(Clone::clone);
        rows.push(BoundRow::value(
            "c_star",
            name,
            c,
            "tr(DA) - 2 max_j d_j a_j",
        ));
        let with_a = |f: DirectionBound| a.clone().and_then(|a| f(d, &gamma, &a));
        rows.push(BoundRow::from_result(
            "bayes_upper_bound",
            name,
            with_a(bounds::bayes_upper_bound),
        ));
        rows.push(BoundRow::from_result(
            "worst_case_bound",
            name,
            with_a(bounds::worst_case_bound),
        ));
        let inv = a
            .clone()
            .and_then(|a| bounds::inverse_moment_lower_bound(d, &gamma, &a));
        rows.push(BoundRow::value(
            "inverse_moment_lower_bound",
            name,
            inv,
            "lower bound on E[1 / X^T A^2 X], X ~ N(0, D + Gamma)",
        ));
    }
    let pair = |r: hetshrink_core::Result<bounds::BoundPair>,
                name: &str,
                rows: &mut Vec<BoundRow>| match r {
        Ok(p) => {
            rows.push(BoundRow::from_result("", "dagger", Ok(p.tight)));
            rows.push(BoundRow::from_result("", "dagger", Ok(p.loose)));
        }
        Err(e) => {
            rows.push(BoundRow::from_result(
                &format!("{name}_tight"),
                "dagger",
                Err(e.clone()),
            ));
            rows.push(BoundRow::from_result(
                &format!("{name}_loose"),
                "dagger",
                Err(e),
            ));
        }
    };
    pair(bounds::theorem3_bounds(d, &gamma), "theorem3", &mut rows);
    pair(bounds::theorem4_bounds(d, &gamma), "theorem4", &mut rows);
    rows.push(BoundRow::from_result(
        "bayes_proximity_bound",
        "dagger",
        bounds::bayes_proximity_bound(d, &gamma),
    ));
    let floor = bounds::alpha_floor(d, &gamma);
    let mut alphas = if s.bounds.alphas.is_empty() {
        vec![floor, (floor + 1.0) / 2.0, 1.0]
    } else {
        s.bounds.alphas.clone()
    };
    alphas.dedup();
    for alpha in alphas {
        let mut row = BoundRow::from_result(
            "corollary4_bound",
            "dagger",
            bounds::corollary4_bound(d, &gamma, alpha),
        );
        row.assumptions = format!("alpha = {alpha}; {}", row.assumptions);
        rows.push(row);
    }
    rows.push(BoundRow::value(
        "mb2_bayes_risk",
        "",
        bounds::mb2_bayes_risk(d, &gamma),
        "exact Bayes risk of MB2, prior N(0, Gamma)",
    ));
    Ok(rows)
}

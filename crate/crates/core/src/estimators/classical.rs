//! Bayes rule, James-Stein, spherical, Berger and robust/minimax Bayes
//! estimators for the canonical problem.

use alloc::vec;
use alloc::vec::Vec;

use super::{check_len, norm2, Estimate, MetaValue};
use crate::direction::descending_order;
use crate::model::{check_gamma, check_variances, EffectiveGamma};
use crate::{Error, FactorVersion, Result};

fn check_pair(x: &[f64], d: &[f64], gamma: &[f64]) -> Result<()> {
    check_variances(d)?;
    check_len(x, d.len())?;
    check_gamma(gamma)?;
    check_len(gamma, d.len())
}

fn check_c(c: f64) -> Result<()> {
    if !(c >= 0.0 && c.is_finite()) {
        return Err(Error::param("c", "must be finite and >= 0"));
    }
    Ok(())
}

/// `delta_j = (1 - d_j / (d_j + gamma_j)) X_j`.
pub fn bayes_rule(x: &[f64], d: &[f64], gamma: &[f64]) -> Result<Estimate> {
    check_pair(x, d, gamma)?;
    Ok(Estimate::from_factors(
        x,
        d.iter().zip(gamma).map(|(d, g)| g / (d + g)).collect(),
    ))
}

pub(crate) fn james_stein_raw(x: &[f64], sigma2: f64, c: f64, plus: bool) -> Estimate {
    let n2 = norm2(x);
    let mut f = if n2 > 0.0 { 1.0 - c * sigma2 / n2 } else { 0.0 };
    if plus {
        f = f.max(0.0);
    }
    Estimate::from_factors(x, vec![f; x.len()])
}

/// `(1 - c sigma^2 / ||X||^2) X`, optionally clipped at zero.
pub fn james_stein(x: &[f64], sigma2: f64, c: f64, positive_part: bool) -> Result<Estimate> {
    check_c(c)?;
    if !(sigma2 > 0.0 && sigma2.is_finite()) {
        return Err(Error::param("sigma2", "must be positive"));
    }
    Ok(james_stein_raw(x, sigma2, c, positive_part))
}

pub(crate) fn spherical_raw(x: &[f64], r: impl Fn(f64) -> f64) -> Estimate {
    let n2 = norm2(x);
    let f = if n2 > 0.0 { 1.0 - r(n2) / n2 } else { 0.0 };
    Estimate::from_factors(x, vec![f; x.len()])
}

/// `(1 - c / ||X||^2) X`.
pub fn spherical_s(x: &[f64], c: f64) -> Result<Estimate> {
    check_c(c)?;
    Ok(spherical_raw(x, |_| c))
}

/// `(1 - r(||X||^2) / ||X||^2) X` for a nonnegative `r`.
pub fn spherical_s_fn(x: &[f64], r: impl Fn(f64) -> f64) -> Estimate {
    spherical_raw(x, r)
}

/// Range `[0, 2 (tr D - 2 max_j d_j)]` of constants `c` for which the
/// spherical estimator is minimax, or `None` when it is empty.
pub fn minimax_range_s(d: &[f64]) -> Option<(f64, f64)> {
    let tr: f64 = d.iter().sum();
    let max = d.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let hi = 2.0 * (tr - 2.0 * max);
    (hi >= 0.0).then_some((0.0, hi))
}

pub(crate) fn berger_raw(x: &[f64], d: &[f64], c: f64, plus: bool) -> Estimate {
    let q: f64 = x.iter().zip(d).map(|(x, d)| x * x / (d * d)).sum();
    let factors = d
        .iter()
        .map(|d| {
            let f = if q > 0.0 { 1.0 - c / (d * q) } else { 0.0 };
            if plus {
                f.max(0.0)
            } else {
                f
            }
        })
        .collect();
    Estimate::from_factors(x, factors)
}

/// `delta_j = (1 - c d_j^{-1} / (X^T D^{-2} X)) X_j`, optionally clipped
/// coordinatewise at zero.
pub fn berger_b(x: &[f64], d: &[f64], c: f64, positive_part: bool) -> Result<Estimate> {
    check_variances(d)?;
    check_len(x, d.len())?;
    check_c(c)?;
    Ok(berger_raw(x, d, c, positive_part))
}

pub(crate) fn robust_rb_raw(x: &[f64], d: &[f64], gamma: &[f64], f: f64) -> Estimate {
    let s: f64 = x
        .iter()
        .zip(d)
        .zip(gamma)
        .map(|((x, d), g)| x * x / (d + g))
        .sum();
    let m = if s > 0.0 { (f / s).min(1.0) } else { 1.0 };
    let factors = d
        .iter()
        .zip(gamma)
        .map(|(d, g)| 1.0 - m * d / (d + g))
        .collect();
    Estimate::from_factors(x, factors).with("shrink_magnitude", MetaValue::Real(m))
}

/// `[I - min{1, f / X^T (D+Gamma)^{-1} X} D (D+Gamma)^{-1}] X` with
/// `f = (p-2)_+`, doubled in the alternative version. The
/// homoscedastic-infinity prior gives `X`.
pub fn robust_rb(
    x: &[f64],
    d: &[f64],
    gamma: &EffectiveGamma,
    version: FactorVersion,
) -> Result<Estimate> {
    check_variances(d)?;
    check_len(x, d.len())?;
    match gamma {
        EffectiveGamma::HomoscedasticInfinity => Ok(Estimate::from_factors(x, vec![1.0; x.len()])),
        EffectiveGamma::Finite(g) => {
            check_pair(x, d, g)?;
            let f = version.multiplier() * (d.len() as f64 - 2.0).max(0.0);
            Ok(robust_rb_raw(x, d, g, f))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MbVariant {
    /// `min{1, (k-2)_+ / S_k}`.
    Standard,
    /// `min{1, 2(k-2)_+ / S_k}`.
    Alternative,
    /// `(k-2)_+ / S_k` without truncation.
    Simplified,
}

/// Precomputed sort order and weights for the minimax Berger estimator.
///
/// With importances `d*` sorted nonincreasing and
/// `S_k = sum_{l<=k} X_l^2 / (d_l + gamma_l)`, the estimate is
/// `delta_j = X_j - (1/d_j) sum_{k>=j} (d*_k - d*_{k+1}) g_k(S_k) X_j`.
#[derive(Debug, Clone)]
pub struct MbPlan {
    perm: Vec<usize>,
    d_sorted: Vec<f64>,
    /// `d*_k - d*_{k+1}` with `d*_{p+1} = 0`.
    steps: Vec<f64>,
    /// `1 / (d_l + gamma_l)`, or `1` in the homoscedastic-infinity limit.
    weights: Vec<f64>,
    variant: MbVariant,
}

impl MbPlan {
    /// Returns `None` when the estimator reduces to `X` (the
    /// homoscedastic-infinity prior with a truncated variant).
    pub fn new(d: &[f64], gamma: &EffectiveGamma, variant: MbVariant) -> Result<Option<Self>> {
        check_variances(d)?;
        if let EffectiveGamma::Finite(g) = gamma {
            check_gamma(g)?;
            check_len(g, d.len())?;
        } else if variant != MbVariant::Simplified {
            return Ok(None);
        }
        let d_star = gamma.importance(d);
        let perm = descending_order(&d_star);
        let sorted: Vec<f64> = perm.iter().map(|&i| d_star[i]).collect();
        let steps = (0..sorted.len())
            .map(|k| sorted[k] - sorted.get(k + 1).copied().unwrap_or(0.0))
            .collect();
        let weights = perm.iter().map(|&i| d_star[i] / (d[i] * d[i])).collect();
        let d_sorted = perm.iter().map(|&i| d[i]).collect();
        Ok(Some(MbPlan {
            perm,
            d_sorted,
            steps,
            weights,
            variant,
        }))
    }

    pub fn apply(&self, x: &[f64]) -> Estimate {
        let p = self.perm.len();
        let mut g = vec![0.0; p];
        let mut s = 0.0;
        for k in 0..p {
            let xk = x[self.perm[k]];
            s += xk * xk * self.weights[k];
            let km2 = (k as f64 + 1.0 - 2.0).max(0.0);
            g[k] = match self.variant {
                MbVariant::Standard => (km2 / s).min(1.0),
                MbVariant::Alternative => (2.0 * km2 / s).min(1.0),
                MbVariant::Simplified => km2 / s,
            };
            if km2 == 0.0 {
                g[k] = 0.0;
            }
        }
        let mut factors = vec![0.0; p];
        let mut inner = 0.0;
        for k in (0..p).rev() {
            if self.steps[k] != 0.0 {
                inner += self.steps[k] * g[k];
            }
            let f = 1.0 - inner / self.d_sorted[k];
            let i = self.perm[k];
            factors[i] = if f.is_finite() { f } else { 0.0 };
        }
        Estimate::from_factors(x, factors)
    }
}

/// Berger's minimax estimator with the requested variant; indices are
/// sorted by importance internally and the result is returned in input
/// order.
pub fn minimax_mb(
    x: &[f64],
    d: &[f64],
    gamma: &EffectiveGamma,
    variant: MbVariant,
) -> Result<Estimate> {
    check_variances(d)?;
    check_len(x, d.len())?;
    Ok(match MbPlan::new(d, gamma, variant)? {
        Some(plan) => plan.apply(x),
        None => Estimate::from_factors(x, vec![1.0; x.len()]),
    })
}

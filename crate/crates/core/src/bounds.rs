//! Closed-form risk quantities and upper bounds.
//!
//! All functions take a finite diagonal prior variance `gamma` (use zeros
//! for `Gamma = 0`). Bounds come back as a [`BoundReport`] listing the
//! conditions under which the value is valid.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

pub use crate::canonical::c_star_canonical;
use crate::direction::{bayes_importance, find_cutoff_from_importance};
use crate::model::check_variances;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub name: String,
    pub value: f64,
    pub assumptions: Vec<String>,
}

impl BoundReport {
    fn new(name: &str, value: f64, assumptions: &[&str]) -> Self {
        BoundReport {
            name: name.into(),
            value,
            assumptions: assumptions.iter().map(|s| s.to_string()).collect(),
        }
    }
}

/// Tight and loose forms of a two-level bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundPair {
    pub nu: usize,
    pub tight: BoundReport,
    pub loose: BoundReport,
}

fn check_inputs(d: &[f64], gamma: &[f64]) -> Result<()> {
    check_variances(d)?;
    crate::model::check_gamma(gamma)?;
    if gamma.len() != d.len() {
        return Err(Error::LengthMismatch {
            expected: d.len(),
            got: gamma.len(),
        });
    }
    Ok(())
}

fn check_direction(d: &[f64], a: &[f64]) -> Result<()> {
    if a.len() != d.len() {
        return Err(Error::LengthMismatch {
            expected: d.len(),
            got: a.len(),
        });
    }
    if let Some(index) = a.iter().position(|v| !(*v >= 0.0 && v.is_finite())) {
        return Err(Error::NegativeDirection {
            index,
            value: a[index],
        });
    }
    Ok(())
}

fn sorted_importance(d: &[f64], gamma: &[f64]) -> Result<Vec<f64>> {
    check_inputs(d, gamma)?;
    let (ds, perm) = bayes_importance(d, gamma)?;
    Ok(perm.iter().map(|&i| ds[i]).collect())
}

fn trace(d: &[f64]) -> f64 {
    d.iter().sum()
}

fn weighted_norm(d: &[f64], gamma: &[f64], a: &[f64]) -> f64 {
    d.iter()
        .zip(gamma)
        .zip(a)
        .map(|((d, g), a)| (d + g) * a * a)
        .sum()
}

/// Bayes risk of the Bayes rule, `tr(D) - sum_j d*_j`.
pub fn bayes_rule_risk(d: &[f64], gamma: &[f64]) -> Result<f64> {
    Ok(trace(d) - sorted_importance(d, gamma)?.iter().sum::<f64>())
}

/// Bayes risk bound for `delta_A`: `tr(D) - p/(p-2) c*^2 / sum_j (d_j+gamma_j) a_j^2`.
pub fn bayes_upper_bound(d: &[f64], gamma: &[f64], a: &[f64]) -> Result<BoundReport> {
    check_inputs(d, gamma)?;
    check_direction(d, a)?;
    let p = d.len();
    if p <= 2 {
        return Err(Error::DimensionTooSmall { p, min: 3 });
    }
    let c = c_star_canonical(d, a);
    if c < 0.0 {
        return Err(Error::NegativeCStar(c));
    }
    let den = weighted_norm(d, gamma, a);
    let pf = p as f64;
    let value = if den > 0.0 {
        trace(d) - pf / (pf - 2.0) * c * c / den
    } else {
        trace(d)
    };
    Ok(BoundReport::new(
        "bayes_upper_bound",
        value,
        &[
            "estimator delta_A with c = c*(D,A)",
            "prior N(0, Gamma)",
            "c*(D,A) >= 0",
            "p > 2",
        ],
    ))
}

/// Bounds on the Bayes risk of `delta_{A†(Gamma)}` under `N(0, Gamma)`,
/// branch chosen by the cutoff `nu`.
pub fn theorem3_bounds(d: &[f64], gamma: &[f64]) -> Result<BoundPair> {
    let ds = sorted_importance(d, gamma)?;
    let nu = find_cutoff_from_importance(&ds)?;
    let p = ds.len();
    let pf = p as f64;
    let base = trace(d) - ds[2..].iter().sum::<f64>();
    let common = ["estimator delta_A†(Gamma)", "prior N(0, Gamma)"];
    if nu == 3 {
        let tail: f64 = ds[3..].iter().sum();
        let tight = base + ds[2] - 2.0 / (pf - 2.0) * tail - pf / (pf - 2.0) * ds[2] / 3.0;
        let loose = base + 2.0 / 3.0 * ds[2];
        Ok(BoundPair {
            nu,
            tight: BoundReport::new(
                "theorem3_tight",
                tight,
                &[common[0], common[1], "nu = 3 branch"],
            ),
            loose: BoundReport::new(
                "theorem3_loose",
                loose,
                &[common[0], common[1], "nu = 3 branch"],
            ),
        })
    } else {
        let tail: f64 = ds[4..].iter().sum();
        let tight = base + ds[2] + ds[3]
            - 2.0 / (pf - 2.0) * tail
            - 4.0 * pf / (pf - 2.0) * ds[nu - 1] / nu as f64;
        let loose = base + ds[2] + ds[3];
        Ok(BoundPair {
            nu,
            tight: BoundReport::new(
                "theorem3_tight",
                tight,
                &[common[0], common[1], "nu >= 4 branch"],
            ),
            loose: BoundReport::new(
                "theorem3_loose",
                loose,
                &[common[0], common[1], "nu >= 4 branch"],
            ),
        })
    }
}

/// Bounds on the worst-case risk of `delta_{A†(Gamma)}` over the
/// hyper-rectangle `theta_j^2 <= gamma_j`. For `nu = 3` both forms agree.
pub fn theorem4_bounds(d: &[f64], gamma: &[f64]) -> Result<BoundPair> {
    let ds = sorted_importance(d, gamma)?;
    let nu = find_cutoff_from_importance(&ds)?;
    let base = trace(d) - ds[2..].iter().sum::<f64>();
    let common = [
        "estimator delta_A†(Gamma)",
        "theta_j^2 <= gamma_j for all j",
    ];
    let (tight, loose, branch) = if nu == 3 {
        let v = base + 2.0 / 3.0 * ds[2];
        (v, v, "nu = 3 branch")
    } else {
        let loose = base + ds[2] + ds[3];
        (
            loose - 4.0 * ds[nu - 1] / nu as f64,
            loose,
            "nu >= 4 branch",
        )
    };
    Ok(BoundPair {
        nu,
        tight: BoundReport::new("theorem4_tight", tight, &[common[0], common[1], branch]),
        loose: BoundReport::new("theorem4_loose", loose, &[common[0], common[1], branch]),
    })
}

fn top4(ds: &[f64]) -> Result<f64> {
    if ds.len() < 4 {
        return Err(Error::DimensionTooSmall {
            p: ds.len(),
            min: 4,
        });
    }
    Ok(ds[..4].iter().sum())
}

/// `tr(D) - sum_j d*_j + (d*_1 + d*_2 + d*_3 + d*_4)`.
pub fn bayes_proximity_bound(d: &[f64], gamma: &[f64]) -> Result<BoundReport> {
    let ds = sorted_importance(d, gamma)?;
    let value = trace(d) - ds.iter().sum::<f64>() + top4(&ds)?;
    Ok(BoundReport::new(
        "bayes_proximity_bound",
        value,
        &[
            "estimator delta_A†(Gamma)",
            "prior N(0, Gamma) or theta_j^2 <= gamma_j",
            "p >= 4",
        ],
    ))
}

/// `tr(D) - c*^2 / sum_j (d_j+gamma_j) a_j^2`, a bound on the risk of
/// `delta_A` at every `theta` with `theta_j^2 <= gamma_j`.
pub fn worst_case_bound(d: &[f64], gamma: &[f64], a: &[f64]) -> Result<BoundReport> {
    check_inputs(d, gamma)?;
    check_direction(d, a)?;
    let c = c_star_canonical(d, a);
    if c <= 0.0 {
        return Err(Error::NegativeCStar(c));
    }
    let value = trace(d) - c * c / weighted_norm(d, gamma, a);
    Ok(BoundReport::new(
        "worst_case_bound",
        value,
        &[
            "estimator delta_A with c = c*(D,A)",
            "theta_j^2 <= gamma_j for all j",
            "c*(D,A) > 0",
        ],
    ))
}

/// `alpha_0 = max_j d_j / (d_j + gamma_j)`.
pub fn alpha_floor(d: &[f64], gamma: &[f64]) -> f64 {
    d.iter()
        .zip(gamma)
        .map(|(d, g)| d / (d + g))
        .fold(0.0, f64::max)
}

/// `Gamma_alpha = alpha (D + Gamma) - D`, clamped at 0 against rounding.
pub fn gamma_alpha(d: &[f64], gamma: &[f64], alpha: f64) -> Vec<f64> {
    d.iter()
        .zip(gamma)
        .map(|(d, g)| (alpha * (d + g) - d).max(0.0))
        .collect()
}

/// `tr(D) - sum_j d*_j / alpha + (d*_1 + ... + d*_4) / alpha`, valid for
/// `delta_{A†(Gamma)}` under `N(0, Gamma_alpha)` and over `H_{Gamma_alpha}`.
pub fn corollary4_bound(d: &[f64], gamma: &[f64], alpha: f64) -> Result<BoundReport> {
    let ds = sorted_importance(d, gamma)?;
    let floor = alpha_floor(d, gamma);
    if alpha < floor || !alpha.is_finite() {
        return Err(Error::AlphaBelowFloor { alpha, floor });
    }
    let value = trace(d) + (top4(&ds)? - ds.iter().sum::<f64>()) / alpha;
    Ok(BoundReport::new(
        "corollary4_bound",
        value,
        &[
            "estimator delta_A†(Gamma)",
            "prior N(0, Gamma_alpha) or theta_j^2 <= (Gamma_alpha)_j",
            "alpha >= max_j d_j/(d_j+gamma_j)",
            "p >= 4",
        ],
    ))
}

/// Exact Bayes risk of the simplified minimax Berger estimator.
pub fn mb2_bayes_risk(d: &[f64], gamma: &[f64]) -> Result<f64> {
    let ds = sorted_importance(d, gamma)?;
    let p = ds.len();
    if p < 3 {
        return Err(Error::DimensionTooSmall { p, min: 3 });
    }
    let mut inv: f64 = ds[..2].iter().map(|v| 1.0 / v).sum();
    let mut risk = trace(d);
    for j in 3..=p {
        let dj = ds[j - 1];
        let jf = j as f64;
        risk -= dj + 2.0 * dj / jf * (1.0 - dj / (jf - 1.0) * inv);
        inv += 1.0 / dj;
    }
    Ok(risk)
}

/// `L_1, ..., L_p` from importances sorted nonincreasing.
pub fn block_l_sequence_from_importance(d_star: &[f64]) -> Vec<f64> {
    let p = d_star.len();
    let mut total_w: f64 = d_star.iter().map(|v| 1.0 / v).sum();
    let mut head_w = 0.0;
    let mut out = Vec::with_capacity(p);
    for k in 1..=p {
        let w = 1.0 / d_star[k - 1];
        head_w += w;
        total_w -= w;
        let first = if k <= 2 {
            0.0
        } else {
            (k - 2) as f64 / (head_w / k as f64)
        };
        let second = if k + 2 >= p {
            0.0
        } else {
            (p - k - 2) as f64 / (total_w.max(0.0) / (p - k) as f64)
        };
        out.push(first + second);
    }
    out
}

/// `L_1, ..., L_p` for inputs sorted by nonincreasing importance.
pub fn block_l_sequence(d: &[f64], gamma: &[f64]) -> Result<Vec<f64>> {
    check_inputs(d, gamma)?;
    let (ds, _) = bayes_importance(d, gamma)?;
    if ds.windows(2).any(|w| w[0] < w[1]) {
        return Err(Error::NotSorted);
    }
    Ok(block_l_sequence_from_importance(&ds))
}

/// Smallest maximizer of `L_k` (1-based).
pub fn block_cutoff(l_seq: &[f64]) -> usize {
    let mut best = 0;
    for (k, v) in l_seq.iter().enumerate() {
        if *v > l_seq[best] {
            best = k;
        }
    }
    best + 1
}

/// `(p/(p-2)) / sum_j (d_j+gamma_j) a_j^2`, a lower bound on the marginal
/// expectation of `1 / (X^T A^T A X)`.
pub fn inverse_moment_lower_bound(d: &[f64], gamma: &[f64], a: &[f64]) -> Result<f64> {
    check_inputs(d, gamma)?;
    check_direction(d, a)?;
    let p = d.len();
    if p <= 2 {
        return Err(Error::DimensionTooSmall { p, min: 3 });
    }
    let pf = p as f64;
    Ok(pf / (pf - 2.0) / weighted_norm(d, gamma, a))
}

//! Exact optimal shrinkage direction.
//!
//! Among diagonal directions `a >= 0` on the surface
//! `sum_j (d_j + gamma_j) a_j^2 = sum_j d*_j`, the direction maximizing
//! `c*(D, A)` is available in closed form. With `d*_j = d_j^2 / (d_j + gamma_j)`
//! sorted nonincreasing, the leading `nu` coordinates are shrunk so that
//! `d_j a_j` is constant and the rest get `a_j = d*_j / d_j`. In that scaling
//! `c*(D, A) = M_nu`.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::canonical::c_star_canonical;
use crate::model::{check_gamma, check_variances, effective_gamma, Direction, PriorSpec};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectionSolution {
    /// Optimal direction in input order.
    pub a_dag: Vec<f64>,
    pub nu: usize,
    /// `M_3, ..., M_p`.
    pub m_seq: Vec<f64>,
    pub c_star: f64,
    /// `perm[k]` is the input index with the `k`-th largest importance.
    pub perm: Vec<usize>,
    /// Bayes importance in input order. Under the homoscedastic-infinity
    /// prior this is `d_j^2`.
    pub d_star: Vec<f64>,
}

impl DirectionSolution {
    pub fn direction(&self) -> Direction {
        Direction::Diagonal(self.a_dag.clone())
    }

    /// Importance in sorted order.
    pub fn sorted_importance(&self) -> Vec<f64> {
        self.perm.iter().map(|&i| self.d_star[i]).collect()
    }
}

/// Stable permutation sorting `v` nonincreasing; ties keep input order.
pub fn descending_order(v: &[f64]) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..v.len()).collect();
    perm.sort_by(|&a, &b| v[b].total_cmp(&v[a]));
    perm
}

/// `d*_j = d_j^2 / (d_j + gamma_j)` and the permutation sorting it.
pub fn bayes_importance(d: &[f64], gamma: &[f64]) -> Result<(Vec<f64>, Vec<usize>)> {
    check_variances(d)?;
    check_gamma(gamma)?;
    if gamma.len() != d.len() {
        return Err(Error::LengthMismatch {
            expected: d.len(),
            got: gamma.len(),
        });
    }
    let d_star: Vec<f64> = d.iter().zip(gamma).map(|(d, g)| d * d / (d + g)).collect();
    let perm = descending_order(&d_star);
    Ok((d_star, perm))
}

fn check_sorted(d_star: &[f64]) -> Result<()> {
    if d_star.windows(2).any(|w| w[0] < w[1]) {
        return Err(Error::NotSorted);
    }
    Ok(())
}

fn sorted_importance(d: &[f64], gamma: &[f64]) -> Result<Vec<f64>> {
    let (d_star, _) = bayes_importance(d, gamma)?;
    check_sorted(&d_star)?;
    Ok(d_star)
}

/// `M_3, ..., M_p` from importances sorted nonincreasing:
/// `M_k = (k-2)^2 / sum_{j<=k} 1/d*_j + sum_{j>k} d*_j`.
pub fn m_sequence_from_importance(d_star: &[f64]) -> Result<Vec<f64>> {
    let p = d_star.len();
    if p < 3 {
        return Err(Error::DimensionTooSmall { p, min: 3 });
    }
    check_sorted(d_star)?;
    let mut tail: f64 = d_star[3..].iter().sum();
    let mut inv: f64 = d_star[..3].iter().map(|v| 1.0 / v).sum();
    let mut out = Vec::with_capacity(p - 2);
    for k in 3..=p {
        if k > 3 {
            inv += 1.0 / d_star[k - 1];
            tail -= d_star[k - 1];
        }
        let kk = (k - 2) as f64;
        out.push(kk * kk / inv + tail.max(0.0));
    }
    Ok(out)
}

/// Sorted-input form of [`m_sequence_from_importance`].
pub fn m_sequence(d: &[f64], gamma: &[f64]) -> Result<Vec<f64>> {
    m_sequence_from_importance(&sorted_importance(d, gamma)?)
}

/// Smallest `k` in `3..p` with `(k-2) / sum_{j<=k} 1/d*_j > d*_{k+1}`, else `p`.
pub fn find_cutoff_from_importance(d_star: &[f64]) -> Result<usize> {
    let p = d_star.len();
    if p < 3 {
        return Err(Error::DimensionTooSmall { p, min: 3 });
    }
    check_sorted(d_star)?;
    let mut inv: f64 = d_star[..2].iter().map(|v| 1.0 / v).sum();
    for k in 3..p {
        inv += 1.0 / d_star[k - 1];
        if (k - 2) as f64 / inv > d_star[k] {
            return Ok(k);
        }
    }
    Ok(p)
}

/// Sorted-input form of [`find_cutoff_from_importance`].
pub fn find_cutoff(d: &[f64], gamma: &[f64]) -> Result<usize> {
    find_cutoff_from_importance(&sorted_importance(d, gamma)?)
}

/// Solves for the optimal direction in the rescaled form with `c* = M_nu`.
///
/// `PriorSpec::Zero` yields `a_j = 1` beyond the cutoff and
/// `PriorSpec::HomoscedasticInfinity` yields `a_j = d_j` there.
pub fn solve_direction(d: &[f64], prior: &PriorSpec) -> Result<DirectionSolution> {
    check_variances(d)?;
    let p = d.len();
    if p < 3 {
        return Err(Error::DimensionTooSmall { p, min: 3 });
    }
    let d_star = effective_gamma(prior, d)?.importance(d);
    let perm = descending_order(&d_star);
    let sorted: Vec<f64> = perm.iter().map(|&i| d_star[i]).collect();
    let nu = find_cutoff_from_importance(&sorted)?;
    let m_seq = m_sequence_from_importance(&sorted)?;
    let inv: f64 = sorted[..nu].iter().map(|v| 1.0 / v).sum();
    let level = (nu - 2) as f64 / inv;
    let mut a_dag = alloc::vec![0.0; p];
    for (rank, &i) in perm.iter().enumerate() {
        a_dag[i] = if rank < nu {
            level / d[i]
        } else {
            d_star[i] / d[i]
        };
    }
    Ok(DirectionSolution {
        a_dag,
        nu,
        c_star: m_seq[nu - 3],
        m_seq,
        perm,
        d_star,
    })
}

/// Recomputes `c*(D, A†)` from the direction itself.
pub fn max_value_diagnostic(sol: &DirectionSolution, d: &[f64]) -> f64 {
    c_star_canonical(d, &sol.a_dag)
}

/// `K_nu = sqrt(sum_j d*_j / M_nu)`, the factor rescaling the solution onto
/// the constraint surface. Diagnostic only.
pub fn k_nu(sol: &DirectionSolution) -> f64 {
    libm::sqrt(sol.d_star.iter().sum::<f64>() / sol.c_star)
}

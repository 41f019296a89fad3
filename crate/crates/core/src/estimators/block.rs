//! Two-block Berger estimator with a data-independent cutoff.

use alloc::vec::Vec;

use super::{check_len, Estimate, MetaValue};
use crate::bounds::{block_cutoff, block_l_sequence_from_importance};
use crate::direction::descending_order;
use crate::model::{check_variances, EffectiveGamma};
use crate::Result;

/// Sort order and cutoff `tau` for [`block_shrink`].
#[derive(Debug, Clone)]
pub struct BlockPlan {
    perm: Vec<usize>,
    d_sorted: Vec<f64>,
    tau: usize,
}

impl BlockPlan {
    pub fn new(d: &[f64], gamma: &EffectiveGamma) -> Result<Self> {
        check_variances(d)?;
        if let EffectiveGamma::Finite(g) = gamma {
            crate::model::check_gamma(g)?;
            check_len(g, d.len())?;
        }
        let d_star = gamma.importance(d);
        let perm = descending_order(&d_star);
        let sorted: Vec<f64> = perm.iter().map(|&i| d_star[i]).collect();
        let tau = block_cutoff(&block_l_sequence_from_importance(&sorted));
        Ok(BlockPlan {
            d_sorted: perm.iter().map(|&i| d[i]).collect(),
            perm,
            tau,
        })
    }

    pub fn tau(&self) -> usize {
        self.tau
    }

    pub fn apply(&self, x: &[f64]) -> Estimate {
        let p = self.perm.len();
        let mut factors = alloc::vec![1.0; p];
        for (lo, hi) in [(0, self.tau), (self.tau, p)] {
            let dim = hi - lo;
            if dim <= 2 {
                continue;
            }
            let c = dim as f64 - 2.0;
            let q: f64 = (lo..hi)
                .map(|k| {
                    let v = x[self.perm[k]] / self.d_sorted[k];
                    v * v
                })
                .sum();
            for k in lo..hi {
                factors[self.perm[k]] = if q > 0.0 {
                    1.0 - c / (self.d_sorted[k] * q)
                } else {
                    0.0
                };
            }
        }
        Estimate::from_factors(x, factors).with("tau", MetaValue::Count(self.tau as u64))
    }
}

/// Berger's estimator applied separately to the `tau` most important
/// coordinates and to the rest, with `tau` the smallest maximizer of the
/// block Bayes-risk reduction bound. Blocks of dimension at most 2 are left
/// unchanged.
pub fn block_shrink(x: &[f64], d: &[f64], gamma: &EffectiveGamma) -> Result<Estimate> {
    check_len(x, d.len())?;
    Ok(BlockPlan::new(d, gamma)?.apply(x))
}

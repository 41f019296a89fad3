//! Empirical Bayes estimators with a data-driven homoscedastic prior
//! variance.

use alloc::vec::Vec;

use super::{check_len, Estimate, MetaValue};
use crate::model::check_variances;
use crate::Result;

const EB_MAX_ITER: u32 = 100;
const EB_TOL: f64 = 1e-4;

pub(crate) fn eb_raw(x: &[f64], d: &[f64]) -> Estimate {
    let p = d.len() as f64;
    let floor = -0.99 * d.iter().copied().fold(f64::INFINITY, f64::min);
    let mut gamma = (x.iter().zip(d).map(|(x, d)| x * x - d).sum::<f64>() / p).max(0.0);
    let mut converged = false;
    let mut iterations = 0;
    while iterations < EB_MAX_ITER {
        iterations += 1;
        let (mut num, mut den) = (0.0, 0.0);
        for (x, d) in x.iter().zip(d) {
            let w = 1.0 / ((d + gamma) * (d + gamma));
            num += (x * x - d) * w;
            den += w;
        }
        let next = (num / den).max(floor);
        let step = (next - gamma).abs();
        gamma = next;
        if step <= EB_TOL {
            converged = true;
            break;
        }
    }
    let factors: Vec<f64> = if converged {
        let g = gamma.max(0.0);
        d.iter()
            .map(|d| 1.0 - (p - 2.0) / p * d / (d + g))
            .collect()
    } else {
        gamma = f64::INFINITY;
        alloc::vec![1.0; d.len()]
    };
    Estimate::from_factors(x, factors)
        .with("gamma_hat", MetaValue::Real(gamma))
        .with("converged", MetaValue::Flag(converged))
        .with("iterations", MetaValue::Count(iterations as u64))
}

/// Morris's empirical Bayes estimator with the maximum likelihood prior
/// variance from fixed-point iteration.
///
/// Iterates start at `(sum_j (X_j^2 - d_j) / p)_+` and are kept above
/// `-0.99 min_j d_j`. Without convergence in 100 steps the prior variance
/// is infinite and the estimate is `X`.
pub fn eb_morris(x: &[f64], d: &[f64]) -> Result<Estimate> {
    check_variances(d)?;
    check_len(x, d.len())?;
    Ok(eb_raw(x, d))
}

/// `X^T D (D + gamma I)^{-1} X + 2 gamma tr{D (D + gamma I)^{-1}} - tr D`,
/// with the limit `tr D` at `gamma = infinity`.
pub fn sure_printed(x: &[f64], d: &[f64], gamma: f64) -> f64 {
    let tr: f64 = d.iter().sum();
    if gamma.is_infinite() {
        return tr;
    }
    let mut s = -tr;
    for (x, d) in x.iter().zip(d) {
        s += d * x * x / (d + gamma) + 2.0 * gamma * d / (d + gamma);
    }
    s
}

const GRID: usize = 1024;
const GOLDEN_TOL: f64 = 1e-10;

fn median(d: &[f64]) -> f64 {
    let mut v = d.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn golden_section(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> (f64, f64) {
    let r = 0.5 * (libm::sqrt(5.0) - 1.0);
    let mut a = hi - r * (hi - lo);
    let mut b = lo + r * (hi - lo);
    let (mut fa, mut fb) = (f(a), f(b));
    while hi - lo > GOLDEN_TOL {
        if fa <= fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - r * (hi - lo);
            fa = f(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + r * (hi - lo);
            fb = f(b);
        }
    }
    if fa <= fb {
        (a, fa)
    } else {
        (b, fb)
    }
}

pub(crate) fn xkb_raw(x: &[f64], d: &[f64]) -> Estimate {
    let m = median(d);
    let gamma_of = |t: f64| m * t / (1.0 - t);
    let sure_t = |t: f64| sure_printed(x, d, gamma_of(t));
    let mut best_i = 0;
    let mut best = sure_t(0.0);
    for i in 1..GRID {
        let v = sure_t(i as f64 / GRID as f64);
        if v < best {
            best = v;
            best_i = i;
        }
    }
    let lo = best_i.saturating_sub(1) as f64 / GRID as f64;
    let hi = (best_i + 1) as f64 / GRID as f64;
    let (t, v) = golden_section(sure_t, lo, hi);
    let (mut gamma, mut sure) = if v < best {
        (gamma_of(t), v)
    } else {
        (gamma_of(best_i as f64 / GRID as f64), best)
    };
    let at_zero = sure_t(0.0);
    if at_zero <= sure {
        gamma = 0.0;
        sure = at_zero;
    }
    let at_inf = sure_printed(x, d, f64::INFINITY);
    let factors = if at_inf < sure {
        gamma = f64::INFINITY;
        sure = at_inf;
        alloc::vec![1.0; d.len()]
    } else {
        d.iter().map(|d| gamma / (d + gamma)).collect()
    };
    Estimate::from_factors(x, factors)
        .with("gamma_tilde", MetaValue::Real(gamma))
        .with("sure", MetaValue::Real(sure))
}

/// Xie-Kou-Brown estimator `(1 - d_j / (d_j + gamma)) X_j` with `gamma`
/// minimizing [`sure_printed`] over `[0, infinity]`.
///
/// The search runs over `t = gamma / (gamma + median d)` on a 1024-point
/// grid, refines by golden section to `|dt| < 1e-10`, and takes
/// `gamma = infinity` only if its value `tr D` is strictly smaller.
pub fn xkb_sure(x: &[f64], d: &[f64]) -> Result<Estimate> {
    check_variances(d)?;
    check_len(x, d.len())?;
    Ok(xkb_raw(x, d))
}

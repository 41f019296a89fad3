//! Estimators `X - lambda A X` along a fixed direction `A`, and their
//! positive-part versions.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DVector;

use super::{check_len, Estimate, MetaValue};
use crate::canonical::{self, c_star_canonical, Factorization};
use crate::linalg::Matrix;
use crate::model::{Direction, ProblemSpec};
use crate::{Error, FactorVersion, Result};

/// Shrinkage magnitude `m` in `X - m / (X^T A^T Q A X) A X`.
pub enum Magnitude<'a> {
    Constant(f64),
    /// `m = r(X^T A^T Q A X)` for a nonnegative nondecreasing `r`.
    Function(&'a dyn Fn(f64) -> f64),
    /// `m = c*(Sigma, Q, A)`.
    AutoCStar,
}

pub(crate) fn diagonal_linear_raw(x: &[f64], a: &[f64], c: f64) -> Estimate {
    let q: f64 = x.iter().zip(a).map(|(x, a)| a * a * x * x).sum();
    let lambda = if q > 0.0 { c / q } else { 0.0 };
    Estimate::from_factors(x, a.iter().map(|a| 1.0 - lambda * a).collect())
        .with("lambda", MetaValue::Real(lambda))
}

pub(crate) fn positive_part_raw(x: &[f64], a: &[f64], f: f64) -> Estimate {
    let q: f64 = x.iter().zip(a).map(|(x, a)| a * a * x * x).sum();
    let factors = if q > 0.0 {
        a.iter().map(|a| (1.0 - f * a / q).max(0.0)).collect()
    } else {
        vec![1.0; x.len()]
    };
    Estimate::from_factors(x, factors)
}

/// `X - m / (X^T A^T Q A X) A X`.
///
/// Requires `A Sigma` nonnegative definite. A vanishing quadratic form
/// (including `X = 0`) leaves `X` unchanged. `meta.lambda` records
/// `m / (X^T A^T Q A X)`.
pub fn linear_shrink(
    x: &[f64],
    problem: &ProblemSpec,
    a: &Direction,
    magnitude: Magnitude<'_>,
) -> Result<Estimate> {
    let p = problem.p();
    check_len(x, p)?;
    if a.p() != p {
        return Err(Error::LengthMismatch {
            expected: p,
            got: a.p(),
        });
    }
    if let Direction::Diagonal(av) = a {
        if let Some(index) = av.iter().position(|v| *v < 0.0) {
            return Err(Error::NegativeDirection {
                index,
                value: av[index],
            });
        }
    }
    let sigma = problem.sigma();
    if !canonical::check_condition_a(&sigma, a) {
        return Err(Error::ConditionAViolated);
    }
    let (ax, q) = match (problem, a) {
        (ProblemSpec::Canonical { .. }, Direction::Diagonal(av)) => {
            let ax: Vec<f64> = x.iter().zip(av).map(|(x, a)| a * x).collect();
            let q = ax.iter().map(|v| v * v).sum::<f64>();
            (ax, q)
        }
        _ => {
            let ax = a.to_matrix() * DVector::from_column_slice(x);
            let q = (problem.q() * &ax).dot(&ax);
            (ax.as_slice().to_vec(), q)
        }
    };
    let m = match magnitude {
        Magnitude::Constant(c) => {
            if !(c >= 0.0 && c.is_finite()) {
                return Err(Error::param("c", "must be finite and >= 0"));
            }
            c
        }
        Magnitude::Function(r) => r(q),
        Magnitude::AutoCStar => {
            let c = canonical::c_star(problem, a)?;
            if c < 0.0 {
                return Err(Error::NegativeCStar(c));
            }
            c
        }
    };
    let lambda = if q > 0.0 { m / q } else { 0.0 };
    let value: Vec<f64> = x.iter().zip(&ax).map(|(x, ax)| x - lambda * ax).collect();
    let shrink_factors = match a {
        Direction::Diagonal(av) if problem.mode() == crate::model::Mode::Canonical => {
            Some(av.iter().map(|a| 1.0 - lambda * a).collect())
        }
        _ => None,
    };
    Ok(Estimate {
        value,
        shrink_factors,
        meta: vec![
            ("lambda", MetaValue::Real(lambda)),
            ("magnitude", MetaValue::Real(m)),
        ],
    })
}

/// `{1 - f a_j / (X^T A^T A X)}_+ X_j` with `f = c*(D, A)`, doubled in the
/// alternative version.
pub fn positive_part_canonical(
    x: &[f64],
    d: &[f64],
    a: &[f64],
    version: FactorVersion,
) -> Result<Estimate> {
    crate::model::check_variances(d)?;
    check_len(x, d.len())?;
    check_len(a, d.len())?;
    if let Some(index) = a.iter().position(|v| !(*v >= 0.0 && v.is_finite())) {
        return Err(Error::NegativeDirection {
            index,
            value: a[index],
        });
    }
    let c = c_star_canonical(d, a);
    if c < 0.0 {
        return Err(Error::NegativeCStar(c));
    }
    Ok(positive_part_raw(x, a, version.multiplier() * c).with("c_star", MetaValue::Real(c)))
}

/// Positive-part estimator for a general problem, prepared once.
///
/// The problem is transformed by `B` with `B A B^{-1} = diag(a*)`, the
/// canonical positive-part rule is applied to `B X`, and the result is
/// mapped back by `B^{-1}`.
#[derive(Debug, Clone)]
pub struct PositivePartGeneral {
    fact: Factorization,
    a_star: Vec<f64>,
    f: f64,
    c_star: f64,
}

impl PositivePartGeneral {
    pub fn new(problem: &ProblemSpec, a: &Direction, version: FactorVersion) -> Result<Self> {
        if a.p() != problem.p() {
            return Err(Error::LengthMismatch {
                expected: problem.p(),
                got: a.p(),
            });
        }
        let (fact, a_star) = match (problem, a) {
            (ProblemSpec::Canonical { .. }, Direction::Diagonal(av)) => {
                (canonical::factor(problem)?, av.clone())
            }
            _ => canonical::factor_with_direction(&problem.sigma(), &problem.q(), &a.to_matrix())?,
        };
        let c_star = c_star_canonical(&fact.d, &a_star);
        if c_star < 0.0 {
            return Err(Error::NegativeCStar(c_star));
        }
        Ok(PositivePartGeneral {
            fact,
            a_star,
            f: version.multiplier() * c_star,
            c_star,
        })
    }

    pub fn c_star(&self) -> f64 {
        self.c_star
    }

    pub fn factorization(&self) -> &Factorization {
        &self.fact
    }

    pub fn a_star(&self) -> &[f64] {
        &self.a_star
    }

    pub fn apply(&self, x: &[f64]) -> Result<Estimate> {
        check_len(x, self.fact.p())?;
        let y = self.fact.forward(x);
        let canon = positive_part_raw(&y, &self.a_star, self.f);
        let value = self.fact.backward(&canon.value);
        let identity = self.fact.b == Matrix::identity(x.len(), x.len());
        Ok(Estimate {
            value,
            shrink_factors: if identity { canon.shrink_factors } else { None },
            meta: vec![("c_star", MetaValue::Real(self.c_star))],
        })
    }
}

/// One-shot form of [`PositivePartGeneral`].
pub fn positive_part_general(
    x: &[f64],
    problem: &ProblemSpec,
    a: &Direction,
    version: FactorVersion,
) -> Result<Estimate> {
    PositivePartGeneral::new(problem, a, version)?.apply(x)
}

//! Reduction of a general problem `(Sigma, Q)` to canonical form.
//!
//! A factorization `B = O R` with `R = Q^{1/2}` and `O` orthogonal gives
//! `B Sigma B^T = diag(d)` and `B^T B = Q`, so `Y = B X` is a canonical
//! problem with identity loss.

use alloc::vec::Vec;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::linalg::{self, serde_rows, Matrix};
use crate::model::{Direction, ProblemSpec};
use crate::{Error, Result};

/// Relative tolerance under which two canonical variances count as equal.
pub const TIE_TOL: f64 = 1e-8;
/// Relative tolerance for the commutation checks of [`check_condition_a2`].
pub const COMMUTE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Factorization {
    #[serde(with = "serde_rows")]
    pub b: Matrix,
    #[serde(with = "serde_rows")]
    pub b_inv: Matrix,
    /// Canonical variances, `B Sigma B^T = diag(d)`.
    pub d: Vec<f64>,
}

impl Factorization {
    pub fn p(&self) -> usize {
        self.d.len()
    }

    /// `B x`.
    pub fn forward(&self, x: &[f64]) -> Vec<f64> {
        (&self.b * DVector::from_column_slice(x))
            .as_slice()
            .to_vec()
    }

    /// `B^{-1} y`.
    pub fn backward(&self, y: &[f64]) -> Vec<f64> {
        (&self.b_inv * DVector::from_column_slice(y))
            .as_slice()
            .to_vec()
    }

    /// Relative reconstruction errors `(||Q - B^T B|| / ||Q||, ||B Sigma B^T - D|| / ||Sigma||)`.
    pub fn reconstruction_error(&self, sigma: &Matrix, q: &Matrix) -> (f64, f64) {
        let eq = (q - self.b.transpose() * &self.b).norm() / q.norm();
        let d = Matrix::from_diagonal(&DVector::from_column_slice(&self.d));
        let es = (&self.b * sigma * self.b.transpose() - d).norm() / sigma.norm();
        (eq, es)
    }
}

fn from_orthogonal(o: &Matrix, r: &Matrix, r_inv: &Matrix, d: Vec<f64>) -> Factorization {
    Factorization {
        b: o * r,
        b_inv: r_inv * o.transpose(),
        d,
    }
}

/// Factorizes a general problem; `Sigma` and `Q` must be SPD.
pub fn factor_problem(sigma: &Matrix, q: &Matrix) -> Result<Factorization> {
    linalg::check_spd(sigma, "sigma")?;
    linalg::check_spd(q, "q")?;
    if sigma.nrows() != q.nrows() {
        return Err(Error::LengthMismatch {
            expected: sigma.nrows(),
            got: q.nrows(),
        });
    }
    let r = linalg::sym_sqrt(q);
    let r_inv = linalg::sym_sqrt_inv(q);
    let eig = linalg::sym_eigen(&(&r * sigma * &r));
    Ok(from_orthogonal(
        &eig.vectors.transpose(),
        &r,
        &r_inv,
        eig.values,
    ))
}

/// Factorization of a problem spec; canonical problems use `B = I`.
pub fn factor(spec: &ProblemSpec) -> Result<Factorization> {
    match spec {
        ProblemSpec::Canonical { d } => {
            crate::model::check_variances(d)?;
            let n = d.len();
            Ok(Factorization {
                b: Matrix::identity(n, n),
                b_inv: Matrix::identity(n, n),
                d: d.clone(),
            })
        }
        ProblemSpec::General { sigma, q } => factor_problem(sigma, q),
    }
}

/// Groups of consecutive indices whose values agree within [`TIE_TOL`].
fn tie_clusters(d: &[f64]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=d.len() {
        if i == d.len() || (d[i] - d[start]).abs() > TIE_TOL * d[start].abs().max(d[i].abs()) {
            out.push((start, i));
            start = i;
        }
    }
    out
}

/// Factorizes `(Sigma, Q)` so that `B A B^{-1}` is diagonal, returning the
/// factorization and that diagonal `a*`.
///
/// Requires [`check_condition_a2`]. Within each group of equal canonical
/// variances the orthogonal factor is rotated to diagonalize `A`.
pub fn factor_with_direction(
    sigma: &Matrix,
    q: &Matrix,
    a: &Matrix,
) -> Result<(Factorization, Vec<f64>)> {
    let base = factor_problem(sigma, q)?;
    if a.nrows() != sigma.nrows() || !a.is_square() {
        return Err(Error::LengthMismatch {
            expected: sigma.nrows(),
            got: a.nrows(),
        });
    }
    if !check_condition_a2(sigma, q, a) {
        return Err(Error::ConditionA2Violated);
    }
    let r = linalg::sym_sqrt(q);
    let r_inv = linalg::sym_sqrt_inv(q);
    let mut o = &base.b * &r_inv;
    let a_rot = &o * (&r * a * &r_inv) * o.transpose();
    for (lo, hi) in tie_clusters(&base.d) {
        let n = hi - lo;
        if n < 2 {
            continue;
        }
        let block = a_rot.view((lo, lo), (n, n)).into_owned();
        let w = linalg::sym_eigen(&block).vectors;
        let rows = w.transpose() * o.rows(lo, n);
        o.rows_mut(lo, n).copy_from(&rows);
    }
    let fact = from_orthogonal(&o, &r, &r_inv, base.d);
    let a_star = (&fact.b * a * &fact.b_inv).diagonal().as_slice().to_vec();
    Ok((fact, a_star))
}

/// `AΣ` has a nonnegative definite symmetric part, within a relative
/// tolerance of `1e-10 ||AΣ||`. Mismatched shapes give `false`.
pub fn check_condition_a(sigma: &Matrix, a: &Direction) -> bool {
    let a = a.to_matrix();
    if a.shape() != sigma.shape() {
        return false;
    }
    let prod = a * sigma;
    let scale = prod.norm();
    if scale == 0.0 {
        return true;
    }
    linalg::lambda_min_sym(&linalg::symmetrize(&prod)) >= -linalg::MATRIX_TOL * scale
}

/// Both `AΣ = ΣA^T` and `QA = A^TQ`, each within [`COMMUTE_TOL`] relative
/// to the norms of the factors. Mismatched shapes give `false`.
pub fn check_condition_a2(sigma: &Matrix, q: &Matrix, a: &Matrix) -> bool {
    if a.shape() != sigma.shape() || q.shape() != sigma.shape() {
        return false;
    }
    let a_norm = a.norm();
    if a_norm == 0.0 {
        return true;
    }
    let s = a * sigma;
    let t = q * a;
    (&s - s.transpose()).norm() <= COMMUTE_TOL * a_norm * sigma.norm()
        && (&t - t.transpose()).norm() <= COMMUTE_TOL * a_norm * q.norm()
}

/// `c*(D, A) = sum_j d_j a_j - 2 max_j d_j a_j` for a diagonal direction.
pub fn c_star_canonical(d: &[f64], a: &[f64]) -> f64 {
    let mut sum = 0.0;
    let mut max = f64::NEG_INFINITY;
    for (d, a) in d.iter().zip(a) {
        sum += d * a;
        max = max.max(d * a);
    }
    if d.is_empty() {
        0.0
    } else {
        sum - 2.0 * max
    }
}

/// `c*(Σ, Q, A) = tr(AΣQ) - λ_max(AΣQ + ΣA^TQ)`.
///
/// `(AΣ + ΣA^T) Q` is similar to the symmetric `R (AΣ + ΣA^T) R` with
/// `R = Q^{1/2}`, whose largest eigenvalue is used.
pub fn c_star_general(sigma: &Matrix, q: &Matrix, a: &Matrix) -> Result<f64> {
    let p = sigma.nrows();
    if q.shape() != (p, p) || a.shape() != (p, p) {
        return Err(Error::LengthMismatch {
            expected: p,
            got: if q.nrows() != p { q.nrows() } else { a.nrows() },
        });
    }
    let a_sigma = a * sigma;
    let s = &a_sigma + a_sigma.transpose();
    let r = linalg::sym_sqrt(q);
    Ok(linalg::trace(&(&a_sigma * q)) - linalg::lambda_max_sym(&(&r * s * &r)))
}

/// Dispatches to [`c_star_canonical`] when both problem and direction are
/// diagonal and to [`c_star_general`] otherwise.
pub fn c_star(problem: &ProblemSpec, a: &Direction) -> Result<f64> {
    if a.p() != problem.p() {
        return Err(Error::LengthMismatch {
            expected: problem.p(),
            got: a.p(),
        });
    }
    match (problem, a) {
        (ProblemSpec::Canonical { d }, Direction::Diagonal(a)) => Ok(c_star_canonical(d, a)),
        _ => c_star_general(&problem.sigma(), &problem.q(), &a.to_matrix()),
    }
}

/// `A = B^{-1} diag(a*) B`.
pub fn map_direction(fact: &Factorization, a_star: &Direction) -> Result<Direction> {
    let a = a_star
        .as_diagonal()
        .ok_or(Error::param("a_star", "must be a diagonal direction"))?;
    if a.len() != fact.p() {
        return Err(Error::LengthMismatch {
            expected: fact.p(),
            got: a.len(),
        });
    }
    let diag = Matrix::from_diagonal(&DVector::from_column_slice(a));
    Direction::general(&fact.b_inv * diag * &fact.b)
}

//! Small dense linear-algebra helpers on top of `nalgebra`.

use alloc::vec::Vec;

use nalgebra::DMatrix;

use crate::{Error, Result};

pub type Matrix = DMatrix<f64>;

/// Relative tolerance for symmetry and definiteness checks.
pub const MATRIX_TOL: f64 = 1e-10;

pub fn from_rows(rows: &[Vec<f64>], which: &'static str) -> Result<Matrix> {
    let n = rows.len();
    if n == 0 {
        return Err(Error::EmptyDimension);
    }
    if rows.iter().any(|r| r.len() != n) {
        return Err(Error::NotSquare { which });
    }
    Ok(Matrix::from_fn(n, n, |i, j| rows[i][j]))
}

pub fn to_rows(m: &Matrix) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| m.row(i).iter().copied().collect())
        .collect()
}

fn scale_of(m: &Matrix) -> f64 {
    m.norm().max(f64::MIN_POSITIVE)
}

pub fn is_symmetric(m: &Matrix, rel_tol: f64) -> bool {
    m.is_square() && (m - m.transpose()).norm() <= rel_tol * scale_of(m)
}

pub fn symmetrize(m: &Matrix) -> Matrix {
    (m + m.transpose()) * 0.5
}

/// Eigen-decomposition of a symmetric matrix with eigenvalues sorted in
/// nonincreasing order. Ties keep the order returned by the solver's index.
#[derive(Debug, Clone)]
pub struct SymEigen {
    pub values: Vec<f64>,
    /// Eigenvectors as columns, in the order of `values`.
    pub vectors: Matrix,
}

pub fn sym_eigen(m: &Matrix) -> SymEigen {
    let eig = nalgebra::SymmetricEigen::new(symmetrize(m));
    let n = m.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    // stable: equal eigenvalues stay in ascending index order
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = Matrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    SymEigen { values, vectors }
}

pub fn lambda_max_sym(m: &Matrix) -> f64 {
    sym_eigen(m).values[0]
}

pub fn lambda_min_sym(m: &Matrix) -> f64 {
    *sym_eigen(m).values.last().expect("non-empty matrix")
}

/// Checks that `m` is symmetric and positive definite within [`MATRIX_TOL`].
pub fn check_spd(m: &Matrix, which: &'static str) -> Result<()> {
    if m.nrows() == 0 {
        return Err(Error::EmptyDimension);
    }
    if !m.is_square() {
        return Err(Error::NotSquare { which });
    }
    if m.iter().any(|v| !v.is_finite()) || !is_symmetric(m, MATRIX_TOL) {
        return Err(Error::NotSymmetric { which });
    }
    if lambda_min_sym(m) <= MATRIX_TOL * scale_of(m) {
        return Err(Error::NotPositiveDefinite { which });
    }
    Ok(())
}

/// The unique symmetric positive definite square root of an SPD matrix.
pub fn sym_sqrt(m: &Matrix) -> Matrix {
    let SymEigen { values, vectors } = sym_eigen(m);
    let roots = nalgebra::DVector::from_iterator(
        values.len(),
        values.iter().map(|&v| libm::sqrt(v.max(0.0))),
    );
    &vectors * Matrix::from_diagonal(&roots) * vectors.transpose()
}

/// Inverse of [`sym_sqrt`], computed from the same eigen-decomposition.
pub fn sym_sqrt_inv(m: &Matrix) -> Matrix {
    let SymEigen { values, vectors } = sym_eigen(m);
    let inv =
        nalgebra::DVector::from_iterator(values.len(), values.iter().map(|&v| 1.0 / libm::sqrt(v)));
    &vectors * Matrix::from_diagonal(&inv) * vectors.transpose()
}

pub fn trace(m: &Matrix) -> f64 {
    m.diagonal().sum()
}

/// `serde(with = ...)` adapter storing a square matrix as a list of rows.
pub mod serde_rows {
    use super::*;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(m: &Matrix, s: S) -> core::result::Result<S::Ok, S::Error> {
        to_rows(m).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> core::result::Result<Matrix, D::Error> {
        let rows = Vec::<Vec<f64>>::deserialize(d)?;
        from_rows(&rows, "matrix").map_err(serde::de::Error::custom)
    }
}

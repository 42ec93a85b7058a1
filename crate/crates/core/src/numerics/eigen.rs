//! Dense real-symmetric eigensolver (nalgebra's implicit QL behind a
//! symmetry check and an ascending-order contract).

use nalgebra::{DMatrix, DVector};

use crate::{Error, Result};

/// Eigen-decomposition with ascending eigenvalues; column `k` of `vectors`
/// belongs to `values[k]`.
#[derive(Debug, Clone)]
pub struct EigResult {
    pub values: Vec<f64>,
    pub vectors: DMatrix<f64>,
}

impl EigResult {
    pub fn vector(&self, k: usize) -> DVector<f64> {
        self.vectors.column(k).into_owned()
    }
}

/// Elementwise symmetry tolerance, relative to `max(1, max|A_ij|)`.
pub const SYMMETRY_TOL: f64 = 1e-12;

pub fn check_symmetric(a: &DMatrix<f64>) -> Result<()> {
    if a.nrows() != a.ncols() {
        return Err(Error::Invalid(format!("matrix is {}x{}, not square", a.nrows(), a.ncols())));
    }
    let scale = a.amax().max(1.0);
    let n = a.nrows();
    for j in 0..n {
        for i in (j + 1)..n {
            let diff = (a[(i, j)] - a[(j, i)]).abs();
            if diff > SYMMETRY_TOL * scale {
                return Err(Error::Asymmetric { i, j, diff });
            }
        }
    }
    Ok(())
}

/// Full spectrum and orthonormal eigenvectors of a symmetric matrix.
pub fn sym_eig(a: &DMatrix<f64>) -> Result<EigResult> {
    check_symmetric(a)?;
    let eig = a.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(a.nrows(), order.len(), |r, c| eig.eigenvectors[(r, order[c])]);
    Ok(EigResult { values, vectors })
}

/// Ascending eigenvalues only.
pub fn sym_eigenvalues(a: &DMatrix<f64>) -> Result<Vec<f64>> {
    check_symmetric(a)?;
    let mut values: Vec<f64> = a.clone().symmetric_eigenvalues().iter().copied().collect();
    values.sort_by(f64::total_cmp);
    Ok(values)
}

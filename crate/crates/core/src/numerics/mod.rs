//! Dense symmetric linear algebra, seeded Gaussian sampling and a small SDP solver.

mod eigen;
mod matrix;
mod rng;
mod sdp;

pub use eigen::{eigensystem_symmetric, eigensystem_warm, EigenSystem};
pub use matrix::{dot, norm, SymMatrix};
pub use rng::{derive_seed, gaussian_matrix, GaussianStream};
pub use sdp::{sdp_solve, LinearConstraint, SdpOptions, SdpProblem, SdpResiduals, SdpSolution};

use crate::error::{Error, Result};

/// Factor a PSD matrix as a Gram matrix: returns rows `g_i` with
/// `<g_i, g_j> ~= a[i][j]`.
///
/// Eigenvalues in `[-tol, 0)` are clipped to zero, so the Gram error is at most
/// `tol` plus eigensolver round-off. Anything below `-tol` is rejected.
pub fn psd_factor(a: &SymMatrix, tol: f64) -> Result<Vec<Vec<f64>>> {
    let es = eigensystem_symmetric(a)?;
    let lambda_min = es.min_value();
    if lambda_min < -tol {
        return Err(Error::NotPsd { lambda_min, tol });
    }
    let n = a.dim();
    let roots: Vec<f64> = es.values.iter().map(|&l| l.max(0.0).sqrt()).collect();
    Ok((0..n)
        .map(|i| (0..n).map(|j| es.vectors[i * n + j] * roots[j]).collect())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gram_error(a: &SymMatrix, rows: &[Vec<f64>]) -> f64 {
        let g = SymMatrix::gram(rows);
        let mut worst: f64 = 0.0;
        for i in 0..a.dim() {
            for j in 0..a.dim() {
                worst = worst.max((g.get(i, j) - a.get(i, j)).abs());
            }
        }
        worst
    }

    #[test]
    fn identity_factors_orthonormally() {
        let rows = psd_factor(&SymMatrix::identity(2), 1e-9).unwrap();
        assert!((dot(&rows[0], &rows[1])).abs() < 1e-15);
        assert!((norm(&rows[0]) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rank_one_gives_antipodal_vectors() {
        let a = SymMatrix::from_row_major(2, vec![1.0, -1.0, -1.0, 1.0]).unwrap();
        let rows = psd_factor(&a, 1e-9).unwrap();
        assert!((dot(&rows[0], &rows[1]) + 1.0).abs() < 1e-14);
        assert!((norm(&rows[0]) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn slightly_negative_is_clipped() {
        // PSD rank-2 matrix pushed down by 1e-9 along a null direction.
        let base = SymMatrix::gram(&[
            vec![1.0, 0.0],
            vec![0.0, 1.0],
            vec![
                std::f64::consts::FRAC_1_SQRT_2,
                std::f64::consts::FRAC_1_SQRT_2,
            ],
        ]);
        let null = [1.0, 1.0, -std::f64::consts::SQRT_2];
        let nn: f64 = null.iter().map(|x| x * x).sum();
        let a = SymMatrix::from_fn(3, |i, j| base.get(i, j) - 1e-9 * null[i] * null[j] / nn);
        let tol = 1e-7;
        let rows = psd_factor(&a, tol).unwrap();
        assert!(gram_error(&a, &rows) <= 2.0 * tol);
        assert!(gram_error(&base, &rows) <= 1e-12);

        let err = psd_factor(&a, 1e-10).unwrap_err();
        assert!(
            matches!(err, Error::NotPsd { lambda_min, .. } if (lambda_min + 1e-9).abs() < 1e-12)
        );
    }
}

//! Cyclic Jacobi eigensolver for small dense symmetric matrices.

use super::matrix::{dot, SymMatrix};
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 100;

/// Eigenvalues in ascending order with matching orthonormal eigenvectors.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    pub values: Vec<f64>,
    /// Row-major `dim x dim`; column `j` is the eigenvector of `values[j]`.
    pub vectors: Vec<f64>,
}

impl EigenSystem {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn vector(&self, j: usize) -> Vec<f64> {
        let n = self.dim();
        (0..n).map(|i| self.vectors[i * n + j]).collect()
    }

    pub fn min_value(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn max_value(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    /// Rebuilds `V diag(f(lambda)) V^T`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> SymMatrix {
        let n = self.dim();
        let scaled: Vec<f64> = self.values.iter().map(|&l| f(l)).collect();
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            let vi = &self.vectors[i * n..(i + 1) * n];
            for j in i..n {
                let vj = &self.vectors[j * n..(j + 1) * n];
                let mut s = 0.0;
                for k in 0..n {
                    s += vi[k] * scaled[k] * vj[k];
                }
                out[i * n + j] = s;
                out[j * n + i] = s;
            }
        }
        SymMatrix::from_raw(n, out)
    }
}

/// Full eigendecomposition `a = V diag(values) V^T`.
pub fn eigensystem_symmetric(a: &SymMatrix) -> Result<EigenSystem> {
    a.check_finite()?;
    let n = a.dim();
    let mut work = a.as_slice().to_vec();
    let mut v = identity(n);
    jacobi_in_place(n, &mut work, &mut v)?;
    Ok(sorted(n, &work, v))
}

/// Eigendecomposition starting from an approximate eigenbasis `guess`
/// (row-major, orthonormal columns). When `a` is close to diagonal in that
/// basis, only a sweep or two is needed.
pub fn eigensystem_warm(a: &SymMatrix, guess: &[f64]) -> Result<EigenSystem> {
    let n = a.dim();
    debug_assert_eq!(guess.len(), n * n);
    // B = G^T A G
    let ag = matmul(n, a.as_slice(), guess);
    let mut b = matmul_tn(n, guess, &ag);
    symmetrize(n, &mut b);
    let mut w = identity(n);
    jacobi_in_place(n, &mut b, &mut w)?;
    let v = matmul(n, guess, &w);
    Ok(sorted(n, &b, v))
}

fn identity(n: usize) -> Vec<f64> {
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    v
}

fn symmetrize(n: usize, a: &mut [f64]) {
    for i in 0..n {
        for j in i + 1..n {
            let avg = 0.5 * (a[i * n + j] + a[j * n + i]);
            a[i * n + j] = avg;
            a[j * n + i] = avg;
        }
    }
}

fn matmul(n: usize, a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut c = vec![0.0; n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k];
            if aik == 0.0 {
                continue;
            }
            let (row_b, row_c) = (&b[k * n..(k + 1) * n], &mut c[i * n..(i + 1) * n]);
            for (cj, bj) in row_c.iter_mut().zip(row_b) {
                *cj += aik * bj;
            }
        }
    }
    c
}

/// `a^T b`
fn matmul_tn(n: usize, a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut c = vec![0.0; n * n];
    for k in 0..n {
        for i in 0..n {
            let aki = a[k * n + i];
            if aki == 0.0 {
                continue;
            }
            let (row_b, row_c) = (&b[k * n..(k + 1) * n], &mut c[i * n..(i + 1) * n]);
            for (cj, bj) in row_c.iter_mut().zip(row_b) {
                *cj += aki * bj;
            }
        }
    }
    c
}

fn off_diagonal_sq(n: usize, a: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            s += a[i * n + j] * a[i * n + j];
        }
    }
    s
}

fn jacobi_in_place(n: usize, a: &mut [f64], v: &mut [f64]) -> Result<()> {
    let total = dot(a, a);
    if total == 0.0 {
        return Ok(());
    }
    let target = (f64::EPSILON * f64::EPSILON) * total;
    for _ in 0..MAX_SWEEPS {
        let off = off_diagonal_sq(n, a);
        if off <= target {
            return Ok(());
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                // Skip rotations that cannot change the diagonal at working precision.
                if apq.abs() < f64::EPSILON * 1e-3 * (app.abs() + aqq.abs()) {
                    a[p * n + q] = 0.0;
                    a[q * n + p] = 0.0;
                    continue;
                }
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    if k == p || k == q {
                        continue;
                    }
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    let new_p = c * akp - s * akq;
                    let new_q = s * akp + c * akq;
                    a[k * n + p] = new_p;
                    a[p * n + k] = new_p;
                    a[k * n + q] = new_q;
                    a[q * n + k] = new_q;
                }
                a[p * n + p] = app - t * apq;
                a[q * n + q] = aqq + t * apq;
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let off = off_diagonal_sq(n, a);
    if off <= 1e3 * target {
        Ok(())
    } else {
        Err(Error::EigenNotConverged {
            iterations: MAX_SWEEPS,
            residual: off.sqrt(),
        })
    }
}

fn sorted(n: usize, diag_source: &[f64], v: Vec<f64>) -> EigenSystem {
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| diag_source[i * n + i].total_cmp(&diag_source[j * n + j]));
    let values = order.iter().map(|&i| diag_source[i * n + i]).collect();
    let mut vectors = vec![0.0; n * n];
    for (new_col, &old_col) in order.iter().enumerate() {
        for row in 0..n {
            vectors[row * n + new_col] = v[row * n + old_col];
        }
    }
    EigenSystem { values, vectors }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn check_decomposition(a: &SymMatrix, es: &EigenSystem) {
        let n = a.dim();
        let rec = es.reconstruct_with(|l| l);
        let scale = 1.0 + a.max_abs();
        for i in 0..n {
            for j in 0..n {
                assert!((rec.get(i, j) - a.get(i, j)).abs() <= 1e-10 * scale);
                let vtv: f64 = (0..n)
                    .map(|k| es.vectors[k * n + i] * es.vectors[k * n + j])
                    .sum();
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((vtv - expect).abs() <= 1e-10);
            }
        }
        assert!(es.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn identity_eigenvalues() {
        let es = eigensystem_symmetric(&SymMatrix::identity(3)).unwrap();
        assert_eq!(es.values, vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn two_by_two() {
        let a = SymMatrix::from_row_major(2, vec![1.0, 0.5, 0.5, 1.0]).unwrap();
        let es = eigensystem_symmetric(&a).unwrap();
        assert!((es.values[0] - 0.5).abs() < 1e-15);
        assert!((es.values[1] - 1.5).abs() < 1e-15);
        check_decomposition(&a, &es);
    }

    #[test]
    fn rejects_nan() {
        let mut a = SymMatrix::identity(2);
        a.set(0, 1, f64::NAN);
        assert!(matches!(
            eigensystem_symmetric(&a),
            Err(Error::NonFinite { .. })
        ));
    }

    #[test]
    fn warm_start_matches_cold() {
        let a = SymMatrix::from_fn(5, |i, j| ((i * 7 + j * 3) % 5) as f64 - 2.0);
        let cold = eigensystem_symmetric(&a).unwrap();
        let b = SymMatrix::from_fn(5, |i, j| a.get(i, j) + 1e-3 * (i + j) as f64);
        let warm = eigensystem_warm(&b, &cold.vectors).unwrap();
        let fresh = eigensystem_symmetric(&b).unwrap();
        for (x, y) in warm.values.iter().zip(&fresh.values) {
            assert!((x - y).abs() < 1e-12);
        }
        check_decomposition(&b, &warm);
    }

    proptest! {
        #[test]
        fn random_reconstruction(entries in proptest::collection::vec(-10.0f64..10.0, 36)) {
            let a = SymMatrix::from_row_major(6, entries).unwrap();
            let es = eigensystem_symmetric(&a).unwrap();
            check_decomposition(&a, &es);
        }
    }
}

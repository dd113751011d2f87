//! Dense SDP solver for
//!
//! ```text
//!   maximize  <C, X>
//!   s.t.      <A_i, X> = b_i,   i = 1..k
//!             X PSD
//! ```
//!
//! by ADMM on the splitting `X = Z`, with `X` confined to the PSD cone and `Z`
//! to the affine set:
//!
//! ```text
//!   X <- Proj_psd(Z - U + C / rho)        (eigenvalue clipping)
//!   Z <- Proj_aff(X + U)                  (least-squares correction)
//!   U <- U + X - Z
//! ```
//!
//! After each `Z` step, `rho * U` lies in the range of `A^*`, which gives dual
//! multipliers `y` for free; the run stops once the primal residual
//! `|X - Z|_F`, the dual residual `rho |Z - Z_prev|_F` and the duality gap
//! `b.y - <C, Z>` are all within tolerance. `rho` is rebalanced every few
//! iterations when the two residuals drift apart.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::eigen::{eigensystem_symmetric, eigensystem_warm};
use super::matrix::SymMatrix;
use crate::error::{Error, Result};

/// Largest matrix dimension the dense solver accepts.
pub const MAX_DIM: usize = 200;

/// `sum_t coef_t * X[i_t][j_t] = rhs`, read on the symmetric matrix `X`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearConstraint {
    pub terms: Vec<(usize, usize, f64)>,
    pub rhs: f64,
}

impl LinearConstraint {
    pub fn new(terms: Vec<(usize, usize, f64)>, rhs: f64) -> Self {
        Self { terms, rhs }
    }

    /// `X[i][j] = rhs`
    pub fn entry(i: usize, j: usize, rhs: f64) -> Self {
        Self::new(vec![(i, j, 1.0)], rhs)
    }

    /// `<A, X> = rhs` for a dense symmetric `A`.
    pub fn from_matrix(a: &SymMatrix, rhs: f64) -> Self {
        let mut terms = Vec::new();
        for i in 0..a.dim() {
            for j in i..a.dim() {
                let w = a.get(i, j);
                if w != 0.0 {
                    terms.push((i, j, if i == j { w } else { 2.0 * w }));
                }
            }
        }
        Self::new(terms, rhs)
    }

    /// Merged upper-triangle coefficients keyed by `(i, j)`, `i <= j`.
    fn canonical(&self) -> BTreeMap<(usize, usize), f64> {
        let mut map = BTreeMap::new();
        for &(i, j, c) in &self.terms {
            *map.entry((i.min(j), i.max(j))).or_insert(0.0) += c;
        }
        map.retain(|_, c| *c != 0.0);
        map
    }

    pub fn evaluate(&self, x: &SymMatrix) -> f64 {
        self.terms.iter().map(|&(i, j, c)| c * x.get(i, j)).sum()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SdpProblem {
    pub dim: usize,
    pub objective: SymMatrix,
    pub constraints: Vec<LinearConstraint>,
}

impl SdpProblem {
    pub fn new(objective: SymMatrix, constraints: Vec<LinearConstraint>) -> Result<Self> {
        let dim = objective.dim();
        for c in &constraints {
            for &(i, j, _) in &c.terms {
                if i >= dim || j >= dim {
                    return Err(Error::DimensionMismatch {
                        expected: dim,
                        actual: i.max(j) + 1,
                    });
                }
            }
        }
        Ok(Self {
            dim,
            objective,
            constraints,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SdpOptions {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SdpOptions {
    fn default() -> Self {
        Self {
            tol: 1e-7,
            max_iter: 200_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SdpResiduals {
    /// max_i |<A_i, X> - b_i|
    pub affine: f64,
    /// max(0, -lambda_min(X))
    pub psd: f64,
    /// |X_psd - X_aff|_F at the last iterate
    pub primal: f64,
    pub dual: f64,
    /// b.y - <C, X>
    pub gap: f64,
    pub iterations: usize,
}

impl SdpResiduals {
    /// Largest feasibility violation of the returned matrix.
    pub fn max_violation(&self) -> f64 {
        self.affine.max(self.psd)
    }
}

#[derive(Debug, Clone)]
pub struct SdpSolution {
    pub x: SymMatrix,
    pub value: f64,
    /// Dual multipliers, one per constraint.
    pub y: Vec<f64>,
    pub residuals: SdpResiduals,
}

/// Sparse symmetric operator `A_i` in the Frobenius geometry: diagonal
/// coefficient `c` contributes `c` at `(i, i)`, off-diagonal `c` contributes
/// `c / 2` at both `(i, j)` and `(j, i)`.
struct ConstraintOperator {
    rows: Vec<Vec<(usize, usize, f64)>>,
    rhs: Vec<f64>,
    /// Moore-Penrose inverse of the constraint Gram matrix `[<A_i, A_j>]`.
    gram_pinv: Vec<f64>,
    inconsistency: f64,
}

impl ConstraintOperator {
    fn new(constraints: &[LinearConstraint]) -> Result<Self> {
        let rows: Vec<Vec<(usize, usize, f64)>> = constraints
            .iter()
            .map(|c| {
                c.canonical()
                    .into_iter()
                    .map(|((i, j), v)| (i, j, v))
                    .collect()
            })
            .collect();
        let k = rows.len();
        let mut by_position: BTreeMap<(usize, usize), Vec<(usize, f64)>> = BTreeMap::new();
        for (r, row) in rows.iter().enumerate() {
            for &(i, j, c) in row {
                by_position.entry((i, j)).or_default().push((r, c));
            }
        }
        let mut gram = SymMatrix::zeros(k);
        for ((i, j), list) in &by_position {
            let weight = if i == j { 1.0 } else { 0.5 };
            for &(a, ca) in list {
                for &(b, cb) in list {
                    if a <= b {
                        gram.set(a, b, gram.get(a, b) + weight * ca * cb);
                    }
                }
            }
        }
        let es = eigensystem_symmetric(&gram)?;
        let cutoff = 1e-12 * es.max_value().max(1.0);
        let gram_pinv = es
            .reconstruct_with(|l| if l > cutoff { 1.0 / l } else { 0.0 })
            .as_slice()
            .to_vec();
        let rhs: Vec<f64> = constraints.iter().map(|c| c.rhs).collect();

        // b must lie in range(G); otherwise no X satisfies the constraints.
        let mut op = Self {
            rows,
            rhs,
            gram_pinv,
            inconsistency: 0.0,
        };
        let y = op.solve_gram(&op.rhs);
        let mut worst: f64 = 0.0;
        for a in 0..k {
            let gy: f64 = (0..k).map(|b| gram.get(a, b) * y[b]).sum();
            worst = worst.max((gy - op.rhs[a]).abs());
        }
        op.inconsistency = worst;
        Ok(op)
    }

    fn apply(&self, x: &SymMatrix) -> Vec<f64> {
        self.rows
            .iter()
            .map(|row| row.iter().map(|&(i, j, c)| c * x.get(i, j)).sum())
            .collect()
    }

    fn solve_gram(&self, r: &[f64]) -> Vec<f64> {
        let k = r.len();
        (0..k)
            .map(|a| {
                let row = &self.gram_pinv[a * k..(a + 1) * k];
                row.iter().zip(r).map(|(g, v)| g * v).sum()
            })
            .collect()
    }

    /// `x -= sum_i y_i A_i`
    fn subtract_adjoint(&self, x: &mut SymMatrix, y: &[f64]) {
        for (row, &yi) in self.rows.iter().zip(y) {
            if yi == 0.0 {
                continue;
            }
            for &(i, j, c) in row {
                if i == j {
                    let v = x.get(i, i) - yi * c;
                    x.set(i, i, v);
                } else {
                    let v = x.get(i, j) - 0.5 * yi * c;
                    x.set(i, j, v);
                }
            }
        }
    }

    /// Projects `v` onto the affine set in place and returns the multipliers.
    fn project(&self, v: &mut SymMatrix) -> Vec<f64> {
        let mut r = self.apply(v);
        for (ri, bi) in r.iter_mut().zip(&self.rhs) {
            *ri -= bi;
        }
        let y = self.solve_gram(&r);
        self.subtract_adjoint(v, &y);
        y
    }

    fn max_violation(&self, x: &SymMatrix) -> f64 {
        self.apply(x)
            .iter()
            .zip(&self.rhs)
            .fold(0.0, |acc, (a, b)| acc.max((a - b).abs()))
    }
}

struct PsdProjector {
    basis: Option<Vec<f64>>,
}

impl PsdProjector {
    fn project(&mut self, w: &SymMatrix) -> Result<SymMatrix> {
        let es = match &self.basis {
            Some(b) => eigensystem_warm(w, b)?,
            None => eigensystem_symmetric(w)?,
        };
        let out = es.reconstruct_with(|l| l.max(0.0));
        self.basis = Some(es.vectors);
        Ok(out)
    }
}

fn frobenius_diff(a: &SymMatrix, b: &SymMatrix) -> f64 {
    a.as_slice()
        .iter()
        .zip(b.as_slice())
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

const RHO_UPDATE_EVERY: usize = 20;
const RHO_BALANCE: f64 = 10.0;

/// Solves `p` to tolerance `opts.tol` on the primal residual, dual residual and
/// relative duality gap. The returned `x` satisfies the equality constraints to
/// round-off; its PSD violation is bounded by the final primal residual.
pub fn sdp_solve(p: &SdpProblem, opts: SdpOptions) -> Result<SdpSolution> {
    let n = p.dim;
    if n == 0 || n > MAX_DIM {
        return Err(Error::Domain(format!(
            "SDP dimension {n} outside supported range 1..={MAX_DIM}"
        )));
    }
    p.objective.check_finite()?;
    let op = ConstraintOperator::new(&p.constraints)?;
    if op.inconsistency > opts.tol {
        return Err(Error::SdpNotConverged {
            iterations: 0,
            primal: op.inconsistency,
            dual: 0.0,
            gap: f64::NAN,
        });
    }

    let c = &p.objective;
    let c_norm = c.frobenius().max(1.0);
    let mut rho = c_norm / (n as f64).sqrt();
    let mut psd = PsdProjector { basis: None };

    let mut z = SymMatrix::identity(n);
    op.project(&mut z);
    let mut u = SymMatrix::zeros(n);
    let mut y = vec![0.0; p.constraints.len()];
    let (mut primal, mut dual, mut gap) = (f64::INFINITY, f64::INFINITY, f64::INFINITY);

    for iter in 1..=opts.max_iter {
        // X step
        let mut w = z.clone();
        {
            let (wd, ud, cd) = (w.data_mut(), u.as_slice(), c.as_slice());
            for k in 0..wd.len() {
                wd[k] += cd[k] / rho - ud[k];
            }
        }
        let x = psd.project(&w)?;

        // Z step
        let z_prev = std::mem::replace(&mut z, x.clone());
        {
            let (zd, ud) = (z.data_mut(), u.as_slice());
            for k in 0..zd.len() {
                zd[k] += ud[k];
            }
        }
        let multipliers = op.project(&mut z);

        // U step
        {
            let (ud, xd, zd) = (u.data_mut(), x.as_slice(), z.as_slice());
            for k in 0..ud.len() {
                ud[k] += xd[k] - zd[k];
            }
        }

        primal = frobenius_diff(&x, &z);
        dual = rho * frobenius_diff(&z, &z_prev);
        for (yi, m) in y.iter_mut().zip(&multipliers) {
            *yi = rho * m;
        }
        let value = c.inner(&z);
        let dual_value: f64 = y.iter().zip(&op.rhs).map(|(a, b)| a * b).sum();
        gap = dual_value - value;

        if primal <= opts.tol && dual <= opts.tol && gap.abs() <= opts.tol * (1.0 + value.abs()) {
            let lambda_min = eigensystem_symmetric(&z)?.min_value();
            let residuals = SdpResiduals {
                affine: op.max_violation(&z),
                psd: (-lambda_min).max(0.0),
                primal,
                dual,
                gap,
                iterations: iter,
            };
            return Ok(SdpSolution {
                x: z,
                value,
                y,
                residuals,
            });
        }

        if iter % RHO_UPDATE_EVERY == 0 {
            let scale = if primal > RHO_BALANCE * dual {
                2.0
            } else if dual > RHO_BALANCE * primal {
                0.5
            } else {
                1.0
            };
            if scale != 1.0 {
                rho *= scale;
                for v in u.data_mut() {
                    *v /= scale;
                }
            }
        }
    }
    Err(Error::SdpNotConverged {
        iterations: opts.max_iter,
        primal,
        dual,
        gap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trace_with_fixed_diagonal() {
        let problem = SdpProblem::new(
            SymMatrix::identity(2),
            vec![
                LinearConstraint::entry(0, 0, 1.0),
                LinearConstraint::entry(1, 1, 1.0),
            ],
        )
        .unwrap();
        let sol = sdp_solve(&problem, SdpOptions::default()).unwrap();
        assert!((sol.value - 2.0).abs() < 1e-6);
        assert!(sol.residuals.max_violation() < 1e-6);
    }

    #[test]
    fn fully_pinned_gives_identity() {
        let problem = SdpProblem::new(
            SymMatrix::identity(2),
            vec![
                LinearConstraint::entry(0, 0, 1.0),
                LinearConstraint::entry(1, 1, 1.0),
                LinearConstraint::entry(0, 1, 0.0),
            ],
        )
        .unwrap();
        let sol = sdp_solve(&problem, SdpOptions::default()).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((sol.x.get(i, j) - expect).abs() < 1e-7);
            }
        }
    }

    #[test]
    fn max_cut_relaxation_of_triangle() {
        // maximize sum over edges (1 - X_uv)/2 with unit diagonal: optimum 9/4.
        let mut c = SymMatrix::zeros(3);
        for (u, v) in [(0, 1), (1, 2), (0, 2)] {
            c.set(u, v, -0.25);
        }
        let constraints = (0..3).map(|i| LinearConstraint::entry(i, i, 1.0)).collect();
        let sol = sdp_solve(
            &SdpProblem::new(c, constraints).unwrap(),
            SdpOptions::default(),
        )
        .unwrap();
        assert!((sol.value - 0.75).abs() < 1e-6, "{}", sol.value);
        assert!((sol.x.get(0, 1) + 0.5).abs() < 1e-5);
    }

    #[test]
    fn inconsistent_constraints_fail() {
        let problem = SdpProblem::new(
            SymMatrix::identity(2),
            vec![
                LinearConstraint::entry(0, 0, 1.0),
                LinearConstraint::entry(0, 0, 2.0),
            ],
        )
        .unwrap();
        assert!(matches!(
            sdp_solve(&problem, SdpOptions::default()),
            Err(Error::SdpNotConverged { .. })
        ));
    }

    #[test]
    fn infeasible_cone_hits_iteration_cap() {
        let problem = SdpProblem::new(
            SymMatrix::identity(2),
            vec![LinearConstraint::entry(0, 0, -1.0)],
        )
        .unwrap();
        let opts = SdpOptions {
            tol: 1e-7,
            max_iter: 2_000,
        };
        assert!(matches!(
            sdp_solve(&problem, opts),
            Err(Error::SdpNotConverged {
                iterations: 2_000,
                ..
            })
        ));
    }

    #[test]
    fn constraint_from_matrix_matches_entries() {
        let mut a = SymMatrix::zeros(3);
        a.set(0, 1, 0.5);
        a.set(2, 2, 2.0);
        let lc = LinearConstraint::from_matrix(&a, 0.0);
        let x = SymMatrix::from_fn(3, |i, j| (i + j + 1) as f64);
        assert!((lc.evaluate(&x) - a.inner(&x)).abs() < 1e-14);
        assert!(SdpProblem::new(
            SymMatrix::zeros(2),
            vec![LinearConstraint::entry(2, 0, 1.0)]
        )
        .is_err());
    }
}

//! Moment-matrix relaxation of quantum Max Cut and its rank-3 rounding.
//!
//! The relaxation ranges over real symmetric `3n x 3n` matrices `M` indexed by
//! `(vertex i, Pauli k)` at flat index `3i + k` (`k = 0, 1, 2` for `X, Y, Z`),
//! with unit diagonal, `M(ik, il) = 0` for `k != l`, and `M` PSD. Its objective
//! is `(1/4) sum_{uv} (1 - M(uX,vX) - M(uY,vY) - M(uZ,vZ))`.
//!
//! Rounding factors `M = V V^T`, stacks the three rows of each vertex into one
//! vector in `R^{9n}`, normalizes, and projects through a Gaussian `3 x 9n`
//! matrix to get one Bloch vector per vertex.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::numerics::{
    eigensystem_symmetric, psd_factor, sdp_solve, LinearConstraint, SdpOptions, SdpProblem,
    SdpResiduals, SymMatrix,
};
use crate::rounding::{estimate_expected_energy, Model, ProductState, RoundingEstimate};
use crate::spectrum;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MomentMatrix {
    pub n: usize,
    pub m3: SymMatrix,
}

impl MomentMatrix {
    pub fn new(n: usize, m3: SymMatrix) -> Result<Self> {
        if m3.dim() != 3 * n {
            return Err(Error::DimensionMismatch {
                expected: 3 * n,
                actual: m3.dim(),
            });
        }
        Ok(Self { n, m3 })
    }

    /// Two-point Pauli expectations of a product state: `y_ik y_jl` across
    /// sites, the identity within a site.
    pub fn from_product_state(s: &ProductState) -> Self {
        let n = s.len();
        let ys: Vec<[f64; 3]> = s.bloch.iter().map(|b| b.as_array()).collect();
        let m3 = SymMatrix::from_fn(3 * n, |a, b| {
            let (i, k, j, l) = (a / 3, a % 3, b / 3, b % 3);
            if i == j {
                if k == l {
                    1.0
                } else {
                    0.0
                }
            } else {
                ys[i][k] * ys[j][l]
            }
        });
        Self { n, m3 }
    }

    pub fn entry(&self, i: usize, k: usize, j: usize, l: usize) -> f64 {
        self.m3.get(3 * i + k, 3 * j + l)
    }

    /// Largest violation of unit diagonal, vanishing same-site cross entries
    /// and PSD-ness.
    pub fn violation(&self) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for i in 0..self.n {
            for k in 0..3 {
                for l in 0..3 {
                    let target = if k == l { 1.0 } else { 0.0 };
                    worst = worst.max((self.entry(i, k, i, l) - target).abs());
                }
            }
        }
        let lambda_min = eigensystem_symmetric(&self.m3)?.min_value();
        Ok(worst.max(-lambda_min))
    }

    pub fn validate(&self, tol: f64) -> Result<()> {
        let v = self.violation()?;
        if v > tol {
            return Err(Error::Domain(format!(
                "moment matrix violates its constraints by {v:.3e} (tol {tol:.1e})"
            )));
        }
        Ok(())
    }

    /// `(1/4) sum_{uv} (1 - sum_k M(uk, vk))`.
    pub fn qmc_objective(&self, g: &Graph) -> f64 {
        g.edges()
            .iter()
            .map(|&(u, v)| 0.25 * (1.0 - (0..3).map(|k| self.entry(u, k, v, k)).sum::<f64>()))
            .sum()
    }
}

#[derive(Debug, Clone)]
pub struct GpRelaxation {
    pub moment: MomentMatrix,
    pub value: f64,
    pub residuals: SdpResiduals,
}

pub fn gp_sdp_solve(g: &Graph, tol: f64) -> Result<GpRelaxation> {
    if g.m() == 0 {
        return Err(Error::NoEdges);
    }
    let n = g.n();
    let mut objective = SymMatrix::zeros(3 * n);
    for &(u, v) in g.edges() {
        for k in 0..3 {
            objective.set(3 * u + k, 3 * v + k, -0.125);
        }
    }
    let mut constraints = Vec::with_capacity(6 * n);
    for i in 0..n {
        for k in 0..3 {
            constraints.push(LinearConstraint::entry(3 * i + k, 3 * i + k, 1.0));
            for l in k + 1..3 {
                constraints.push(LinearConstraint::entry(3 * i + k, 3 * i + l, 0.0));
            }
        }
    }
    let problem = SdpProblem::new(objective, constraints)?;
    let sol = sdp_solve(
        &problem,
        SdpOptions {
            tol,
            ..SdpOptions::default()
        },
    )?;
    Ok(GpRelaxation {
        moment: MomentMatrix { n, m3: sol.x },
        value: g.m() as f64 / 4.0 + sol.value,
        residuals: sol.residuals,
    })
}

/// Unit vectors `x_i = u_i / |u_i|` in `R^{9n}`, where
/// `u_i = (v_iX; v_iY; v_iZ)` stacks the factor rows of vertex `i`.
pub fn stack_and_normalize(m: &MomentMatrix, tol: f64) -> Result<Vec<Vec<f64>>> {
    m.validate(tol)?;
    let rows = psd_factor(&m.m3, tol)?;
    Ok((0..m.n)
        .map(|i| {
            let mut u: Vec<f64> = rows[3 * i..3 * i + 3].concat();
            let len = u.iter().map(|x| x * x).sum::<f64>().sqrt();
            u.iter_mut().for_each(|x| *x /= len);
            u
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Denominator {
    /// Largest eigenvalue of the QMC Hamiltonian.
    ExactQmc,
    /// Relaxation value, an upper bound on the exact value; the ratio is then a
    /// lower bound on the true ratio.
    UpperBound,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GpOutcome {
    pub relaxation_value: f64,
    pub relaxation_violation: f64,
    pub estimate: RoundingEstimate,
    pub denominator: Denominator,
    pub denominator_value: f64,
    /// Mean rounded energy over the denominator.
    pub ratio: f64,
    pub ratio_stderr: f64,
}

/// Solve, stack, round with `r = 3` over `trials` seeded trials and compare the
/// mean QMC energy with exact `qmc(g)` when `n <= max_exact_n`, otherwise with
/// the relaxation value.
pub fn gp_pipeline(
    g: &Graph,
    trials: usize,
    master_seed: u64,
    tol: f64,
    max_exact_n: usize,
) -> Result<GpOutcome> {
    let relax = gp_sdp_solve(g, tol)?;
    let violation = relax.moment.violation()?;
    let xs = stack_and_normalize(&relax.moment, (10.0 * tol).max(violation))?;
    let estimate = estimate_expected_energy(g, &xs, Model::Qmc, trials, master_seed)?;
    let (denominator, denominator_value) = if g.n() <= max_exact_n.min(spectrum::MAX_QUBITS) {
        let exact = spectrum::max_eigenvalue(g, Model::Qmc, 1e-10, master_seed)?;
        (Denominator::ExactQmc, exact.value)
    } else {
        (Denominator::UpperBound, relax.value)
    };
    Ok(GpOutcome {
        relaxation_value: relax.value,
        relaxation_violation: violation,
        ratio: estimate.mean / denominator_value,
        ratio_stderr: estimate.stderr / denominator_value,
        estimate,
        denominator,
        denominator_value,
    })
}

//! Lovász theta of the complement graph and the vector chromatic number.
//!
//! Both are the least `kappa >= 2` admitting unit vectors with
//! `<x_u, x_v> = -1/(kappa - 1)` (theta of the complement) or
//! `<x_u, x_v> <= -1/(kappa - 1)` (vector chromatic number) on every edge `uv`
//! of `g`. Writing `t = -1/(kappa - 1)`, minimizing `kappa` is minimizing the
//! common edge inner product `t` over Gram matrices with unit diagonal, which is
//! a single SDP: `t` is the reference-edge entry of the Gram matrix and every
//! other edge entry is tied to it by an equality constraint.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::numerics::{
    dot, eigensystem_symmetric, norm, psd_factor, sdp_solve, LinearConstraint, SdpOptions,
    SdpProblem, SymMatrix,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeMode {
    /// `<x_u, x_v> = t` on edges: theta of the complement.
    Equality,
    /// `<x_u, x_v> <= t` on edges: vector chromatic number.
    Inequality,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ThetaCertificate {
    pub kappa: f64,
    /// Common edge inner product, `-1/(kappa - 1)`.
    pub t: f64,
    pub mode: EdgeMode,
    /// Gram matrix of the witness, unit diagonal.
    pub gram: SymMatrix,
    /// One unit vector per vertex, each of length `n`.
    pub vectors: Vec<Vec<f64>>,
    /// Largest violation among the Gram-matrix constraints and PSD-ness.
    pub residual: f64,
    pub iterations: usize,
}

impl ThetaCertificate {
    /// Worst deviation of any certificate invariant, to be compared against a
    /// multiple of the solver tolerance.
    pub fn invariant_violation(&self, g: &Graph) -> Result<f64> {
        let n = g.n();
        let mut worst: f64 = 0.0;
        for u in 0..n {
            worst = worst.max((self.gram.get(u, u) - 1.0).abs());
            worst = worst.max((norm(&self.vectors[u]) - 1.0).abs());
        }
        for &(u, v) in g.edges() {
            let gap = self.gram.get(u, v) - self.t;
            worst = worst.max(match self.mode {
                EdgeMode::Equality => gap.abs(),
                EdgeMode::Inequality => gap.max(0.0),
            });
        }
        let lambda_min = eigensystem_symmetric(&self.gram)?.min_value();
        worst = worst.max((-lambda_min).max(0.0));
        for u in 0..n {
            for v in u..n {
                let ip = dot(&self.vectors[u], &self.vectors[v]);
                worst = worst.max((ip - self.gram.get(u, v)).abs());
            }
        }
        Ok(worst)
    }
}

/// `kappa = 1 - 1/t` for the edge inner product `t < 0`.
pub fn kappa_from_t(t: f64) -> f64 {
    1.0 - 1.0 / t
}

fn solve(g: &Graph, mode: EdgeMode, opts: SdpOptions) -> Result<ThetaCertificate> {
    let edges = g.edges();
    let Some(&(r0, s0)) = edges.first() else {
        return Err(Error::NoEdges);
    };
    let n = g.n();
    // Inequality mode carries one slack per edge on the diagonal after the
    // n x n Gram block: <x_u, x_v> + s_uv = t with s_uv >= 0.
    let dim = match mode {
        EdgeMode::Equality => n,
        EdgeMode::Inequality => n + edges.len(),
    };
    let slack = |e: usize| n + e;

    let mut constraints: Vec<LinearConstraint> =
        (0..n).map(|u| LinearConstraint::entry(u, u, 1.0)).collect();
    for (e, &(u, v)) in edges.iter().enumerate().skip(1) {
        let mut terms = vec![(u, v, 1.0), (r0, s0, -1.0)];
        if mode == EdgeMode::Inequality {
            terms.push((slack(e), slack(e), 1.0));
            terms.push((slack(0), slack(0), -1.0));
        }
        constraints.push(LinearConstraint::new(terms, 0.0));
    }
    // maximize -t
    let mut objective = SymMatrix::zeros(dim);
    objective.set(r0, s0, -0.5);
    if mode == EdgeMode::Inequality {
        objective.set(slack(0), slack(0), -1.0);
    }
    let problem = SdpProblem::new(objective, constraints)?;
    // kappa = 1 - 1/t moves by about |dt| / t^2, so the solve is repeated at a
    // tighter tolerance until kappa itself is accurate to `opts.tol`.
    let mut sdp_opts = opts;
    let sol = loop {
        let sol = sdp_solve(&problem, sdp_opts)?;
        let t = -sol.value;
        let needed = (opts.tol * t * t / 4.0).max(1e-13);
        if t >= 0.0 || sdp_opts.tol <= 2.0 * needed {
            break sol;
        }
        sdp_opts.tol = needed;
    };

    let gram = SymMatrix::from_fn(n, |i, j| sol.x.get(i, j));
    let t = -sol.value;
    // Two unit vectors cannot have inner product below -1, so kappa >= 2 up to
    // solver tolerance whenever the graph has an edge.
    debug_assert!(
        t >= -1.0 - 1e3 * opts.tol,
        "edge inner product {t} below -1"
    );
    if t >= 0.0 {
        return Err(Error::Domain(format!(
            "solver returned non-negative edge inner product {t}"
        )));
    }
    let factor_tol = (10.0 * opts.tol).max(sol.residuals.psd);
    let vectors = psd_factor(&gram, factor_tol)?
        .into_iter()
        .map(|mut row| {
            let len = norm(&row);
            if len > 0.0 {
                row.iter_mut().for_each(|x| *x /= len);
            }
            row
        })
        .collect();

    let mut cert = ThetaCertificate {
        kappa: kappa_from_t(t),
        t,
        mode,
        gram,
        vectors,
        residual: 0.0,
        iterations: sol.residuals.iterations,
    };
    cert.residual = cert.invariant_violation(g)?;
    Ok(cert)
}

/// Lovász theta of the complement of `g`, with its unit-vector witness.
pub fn lovasz_theta_complement(g: &Graph, opts: SdpOptions) -> Result<ThetaCertificate> {
    solve(g, EdgeMode::Equality, opts)
}

/// Vector chromatic number of `g`: the same program with edge constraints relaxed
/// to `<x_u, x_v> <= t`. Never exceeds `lovasz_theta_complement(g).kappa`.
pub fn vector_chromatic(g: &Graph, opts: SdpOptions) -> Result<ThetaCertificate> {
    solve(g, EdgeMode::Inequality, opts)
}

/// Gram matrix of `n` unit vectors forming a regular simplex: pairwise inner
/// product `-1/(n-1)`.
pub fn simplex_gram(n: usize) -> SymMatrix {
    let off = -1.0 / (n as f64 - 1.0);
    SymMatrix::from_fn(n, |i, j| if i == j { 1.0 } else { off })
}

/// Lovász theta of `g` itself via the standard program
/// `max <J, B>` s.t. `tr B = 1`, `B_uv = 0` on edges, `B` PSD.
/// Only used to cross-check the complement value.
pub fn lovasz_theta_standard(g: &Graph, opts: SdpOptions) -> Result<f64> {
    let n = g.n();
    let objective = SymMatrix::from_fn(n, |_, _| 1.0);
    let mut constraints = vec![LinearConstraint::new(
        (0..n).map(|u| (u, u, 1.0)).collect(),
        1.0,
    )];
    constraints.extend(
        g.edges()
            .iter()
            .map(|&(u, v)| LinearConstraint::entry(u, v, 0.0)),
    );
    let problem = SdpProblem::new(objective, constraints)?;
    Ok(sdp_solve(&problem, opts)?.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{named_graph, Family};

    fn opts() -> SdpOptions {
        SdpOptions::default()
    }

    #[test]
    fn single_edge() {
        let g = named_graph(Family::Complete, &[2], 0).unwrap();
        let cert = lovasz_theta_complement(&g, opts()).unwrap();
        assert!((cert.kappa - 2.0).abs() < 1e-5, "{}", cert.kappa);
        assert!((cert.t + 1.0).abs() < 1e-6);
        assert!((dot(&cert.vectors[0], &cert.vectors[1]) + 1.0).abs() < 1e-6);
        assert!(cert.residual <= 10.0 * opts().tol);
    }

    #[test]
    fn complete_graphs_are_simplices() {
        for n in 3..=6 {
            let g = named_graph(Family::Complete, &[n], 0).unwrap();
            let cert = lovasz_theta_complement(&g, opts()).unwrap();
            assert!(
                (cert.kappa - n as f64).abs() < 1e-4,
                "n={n} kappa={}",
                cert.kappa
            );
            // The simplex Gram matrix is feasible and attains the optimum.
            let simplex = simplex_gram(n);
            assert!(eigensystem_symmetric(&simplex).unwrap().min_value() > -1e-12);
            for u in 0..n {
                for v in 0..n {
                    assert!((cert.gram.get(u, v) - simplex.get(u, v)).abs() < 1e-4);
                }
            }
        }
    }

    #[test]
    fn five_cycle() {
        let g = named_graph(Family::Cycle, &[5], 0).unwrap();
        let cert = lovasz_theta_complement(&g, opts()).unwrap();
        assert!((cert.kappa - 5f64.sqrt()).abs() < 1e-4, "{}", cert.kappa);
        // C5 is self-complementary and vertex-transitive: theta(C5) theta(C5-bar) = 5.
        let direct = lovasz_theta_standard(&g, opts()).unwrap();
        assert!((direct * cert.kappa - 5.0).abs() < 1e-4);
    }

    #[test]
    fn edgeless_is_rejected() {
        let g = Graph::empty(4).unwrap();
        assert!(matches!(
            lovasz_theta_complement(&g, opts()),
            Err(Error::NoEdges)
        ));
        assert!(matches!(vector_chromatic(&g, opts()), Err(Error::NoEdges)));
    }

    #[test]
    fn bipartite_vector_chromatic_is_two() {
        for g in [
            named_graph(Family::Complete, &[2], 0).unwrap(),
            named_graph(Family::Path, &[4], 0).unwrap(),
            named_graph(Family::Cycle, &[6], 0).unwrap(),
            named_graph(Family::CompleteBipartite, &[2, 3], 0).unwrap(),
        ] {
            let cert = vector_chromatic(&g, opts()).unwrap();
            assert!((cert.kappa - 2.0).abs() < 1e-5, "{g}: {}", cert.kappa);
            assert!(cert.residual <= 10.0 * opts().tol, "{}", cert.residual);
        }
    }

    #[test]
    fn inequality_never_exceeds_equality() {
        let g = named_graph(Family::Path, &[3], 0).unwrap();
        let eq = lovasz_theta_complement(&g, opts()).unwrap();
        let ineq = vector_chromatic(&g, opts()).unwrap();
        assert!(ineq.kappa <= eq.kappa + 1e-6);
    }
}

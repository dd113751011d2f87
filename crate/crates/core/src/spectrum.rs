//! Exact reference values: largest eigenvalues of the spin Hamiltonians,
//! brute-force Max Cut, and a dense density-matrix oracle for product-state
//! energies.
//!
//! Qubit `u` is bit `u` of a computational-basis index; bit 0 is `|0>`, the
//! `Z = +1` eigenstate. Every edge term has a real matrix in this basis:
//!
//! ```text
//!   QMC: (I - XX - YY - ZZ)/4 = (I - SWAP)/2
//!        |00>,|11> -> 0        |01> -> (|01> - |10>)/2
//!   XX:  (I - XX - YY)/4
//!        |00>,|11> -> 1/4 |.>  |01> -> |01>/4 - |10>/2
//!   MC:  (I - ZZ)/2            diagonal, 1 on anti-aligned pairs
//! ```
//!
//! so the matrix-free operator works on real amplitudes.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::numerics::{dot, eigensystem_symmetric, GaussianStream, SymMatrix};
use crate::rounding::{Model, ProductState};

/// Matrix-free operator and brute-force cut limit.
pub const MAX_QUBITS: usize = 24;
/// Dense diagonalization limit.
pub const MAX_DENSE_QUBITS: usize = 10;
/// Dense density-matrix oracle limit.
pub const MAX_ORACLE_QUBITS: usize = 8;

const PARALLEL_MIN_DIM: usize = 1 << 12;

fn check_size(g: &Graph, cap: usize, what: &'static str) -> Result<()> {
    if g.n() > cap {
        Err(Error::TooLarge {
            what,
            cap,
            n: g.n(),
        })
    } else {
        Ok(())
    }
}

/// Real amplitudes over the `2^n` computational basis.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: Vec<f64>,
}

impl StateVector {
    pub fn from_amplitudes(amplitudes: Vec<f64>) -> Result<Self> {
        if !amplitudes.len().is_power_of_two() {
            return Err(Error::Domain(format!(
                "state length {} is not a power of two",
                amplitudes.len()
            )));
        }
        Ok(Self { amplitudes })
    }

    pub fn basis(n: usize, index: usize) -> Self {
        let mut amplitudes = vec![0.0; 1 << n];
        amplitudes[index] = 1.0;
        Self { amplitudes }
    }

    /// Normalized standard Gaussian vector.
    pub fn random(n: usize, seed: u64) -> Self {
        let mut amplitudes = vec![0.0; 1 << n];
        GaussianStream::new(seed).fill(&mut amplitudes);
        let mut s = Self { amplitudes };
        s.normalize();
        s
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        dot(&self.amplitudes, &self.amplitudes).sqrt()
    }

    pub fn normalize(&mut self) {
        let len = self.norm();
        if len > 0.0 {
            self.amplitudes.iter_mut().for_each(|a| *a /= len);
        }
    }

    pub fn qubits(&self) -> usize {
        self.amplitudes.len().trailing_zeros() as usize
    }
}

struct EdgeMasks {
    pairs: Vec<(usize, usize, usize)>,
}

impl EdgeMasks {
    fn new(g: &Graph) -> Self {
        Self {
            pairs: g
                .edges()
                .iter()
                .map(|&(u, v)| (u, v, (1 << u) | (1 << v)))
                .collect(),
        }
    }

    /// `(H v)[s]`, summed over edges in a fixed order.
    #[inline]
    fn row(&self, model: Model, v: &[f64], s: usize) -> f64 {
        let mut acc = 0.0;
        for &(a, b, mask) in &self.pairs {
            let anti = ((s >> a) ^ (s >> b)) & 1 == 1;
            match model {
                Model::Qmc => {
                    if anti {
                        acc += 0.5 * (v[s] - v[s ^ mask]);
                    }
                }
                Model::Xx => {
                    acc += 0.25 * v[s];
                    if anti {
                        acc -= 0.5 * v[s ^ mask];
                    }
                }
                Model::Mc => {
                    if anti {
                        acc += v[s];
                    }
                }
            }
        }
        acc
    }
}

fn apply_into(masks: &EdgeMasks, model: Model, v: &[f64], out: &mut [f64]) {
    #[cfg(feature = "parallel")]
    if out.len() >= PARALLEL_MIN_DIM {
        use rayon::prelude::*;
        const CHUNK: usize = 1 << 10;
        out.par_chunks_mut(CHUNK)
            .enumerate()
            .for_each(|(c, chunk)| {
                for (k, w) in chunk.iter_mut().enumerate() {
                    *w = masks.row(model, v, c * CHUNK + k);
                }
            });
        return;
    }
    #[cfg(not(feature = "parallel"))]
    let _ = PARALLEL_MIN_DIM;
    for (s, w) in out.iter_mut().enumerate() {
        *w = masks.row(model, v, s);
    }
}

/// `H v`, computed matrix-free. Each output amplitude is a fixed-order sum over
/// edges, so the parallel and serial paths agree bit for bit.
pub fn apply_hamiltonian(g: &Graph, model: Model, v: &StateVector) -> Result<StateVector> {
    check_size(g, MAX_QUBITS, "matrix-free Hamiltonian")?;
    if v.amplitudes.len() != 1 << g.n() {
        return Err(Error::DimensionMismatch {
            expected: 1 << g.n(),
            actual: v.amplitudes.len(),
        });
    }
    let masks = EdgeMasks::new(g);
    let mut out = vec![0.0; v.amplitudes.len()];
    apply_into(&masks, model, &v.amplitudes, &mut out);
    Ok(StateVector { amplitudes: out })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenEstimate {
    pub value: f64,
    /// `|H v - value v|` for the returned Ritz vector.
    pub residual: f64,
    pub matvecs: usize,
    pub seed: u64,
}

const MAX_RESTARTS: usize = 500;

fn krylov_size(dim: usize) -> usize {
    ((1usize << 26) / dim).clamp(6, 40).min(dim)
}

/// Largest eigenvalue by explicitly restarted Lanczos with full
/// reorthogonalization, started from a seeded random vector. Converged when
/// `|H v - lambda v| <= tol * max(1, lambda)`.
pub fn max_eigenvalue(g: &Graph, model: Model, tol: f64, seed: u64) -> Result<EigenEstimate> {
    check_size(g, MAX_QUBITS, "Lanczos eigensolver")?;
    if g.m() == 0 {
        return Ok(EigenEstimate {
            value: 0.0,
            residual: 0.0,
            matvecs: 0,
            seed,
        });
    }
    let dim = 1usize << g.n();
    let k = krylov_size(dim);
    let masks = EdgeMasks::new(g);
    let mut start = StateVector::random(g.n(), seed).amplitudes;
    let mut matvecs = 0;
    let mut last_residual = f64::INFINITY;
    let mut w = vec![0.0; dim];

    for _ in 0..MAX_RESTARTS {
        let mut basis: Vec<Vec<f64>> = Vec::with_capacity(k);
        let mut alpha = Vec::with_capacity(k);
        let mut beta: Vec<f64> = Vec::with_capacity(k);
        basis.push(start.clone());
        loop {
            let j = basis.len() - 1;
            apply_into(&masks, model, &basis[j], &mut w);
            matvecs += 1;
            let a = dot(&basis[j], &w);
            alpha.push(a);
            // two passes of Gram-Schmidt against the whole basis
            for _ in 0..2 {
                for q in &basis {
                    let c = dot(q, &w);
                    w.iter_mut().zip(q).for_each(|(wi, qi)| *wi -= c * qi);
                }
            }
            let b = dot(&w, &w).sqrt();
            if basis.len() == k || b <= 1e-12 * a.abs().max(1.0) {
                break;
            }
            beta.push(b);
            basis.push(w.iter().map(|x| x / b).collect());
        }
        let size = alpha.len();
        let tri = SymMatrix::from_fn(size, |i, j| {
            if i == j {
                alpha[i]
            } else if i + 1 == j {
                beta[i]
            } else if j + 1 == i {
                beta[j]
            } else {
                0.0
            }
        });
        let es = eigensystem_symmetric(&tri)?;
        let coeffs = es.vector(size - 1);
        let mut ritz = vec![0.0; dim];
        for (q, c) in basis.iter().zip(&coeffs) {
            ritz.iter_mut().zip(q).for_each(|(r, qi)| *r += c * qi);
        }
        let len = dot(&ritz, &ritz).sqrt();
        ritz.iter_mut().for_each(|r| *r /= len);

        apply_into(&masks, model, &ritz, &mut w);
        matvecs += 1;
        let value = dot(&ritz, &w);
        let residual = w
            .iter()
            .zip(&ritz)
            .map(|(hv, v)| (hv - value * v).powi(2))
            .sum::<f64>()
            .sqrt();
        if residual <= tol * value.abs().max(1.0) {
            return Ok(EigenEstimate {
                value,
                residual,
                matvecs,
                seed,
            });
        }
        last_residual = residual;
        start = ritz;
    }
    Err(Error::EigenNotConverged {
        iterations: matvecs,
        residual: last_residual,
    })
}

/// Dense real matrix of `H`, built column by column from the matrix-free operator.
pub fn dense_hamiltonian(g: &Graph, model: Model) -> Result<DMatrix<f64>> {
    check_size(g, MAX_DENSE_QUBITS, "dense Hamiltonian")?;
    let dim = 1usize << g.n();
    let masks = EdgeMasks::new(g);
    let mut h = DMatrix::zeros(dim, dim);
    let mut col = vec![0.0; dim];
    let mut e = vec![0.0; dim];
    for j in 0..dim {
        e[j] = 1.0;
        apply_into(&masks, model, &e, &mut col);
        e[j] = 0.0;
        for i in 0..dim {
            h[(i, j)] = col[i];
        }
    }
    Ok(h)
}

/// All eigenvalues of `H` by dense diagonalization, ascending.
pub fn dense_spectrum(g: &Graph, model: Model) -> Result<Vec<f64>> {
    let h = dense_hamiltonian(g, model)?;
    let mut values: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    values.sort_by(f64::total_cmp);
    Ok(values)
}

pub fn max_eigenvalue_dense(g: &Graph, model: Model) -> Result<f64> {
    Ok(dense_spectrum(g, model)?.last().copied().unwrap_or(0.0))
}

/// Maximum cut by exhaustive search over the `2^(n-1)` bipartitions that keep
/// the last vertex on side 0, visited in Gray-code order.
pub fn max_cut_bruteforce(g: &Graph) -> Result<usize> {
    check_size(g, MAX_QUBITS, "brute-force Max Cut")?;
    let n = g.n();
    if n < 2 {
        return Ok(0);
    }
    let mut adjacency = vec![Vec::new(); n];
    for &(u, v) in g.edges() {
        adjacency[u].push(v);
        adjacency[v].push(u);
    }
    let mut side = vec![false; n];
    let mut cut: i64 = 0;
    let mut best: i64 = 0;
    for step in 1u64..(1u64 << (n - 1)) {
        let flip = step.trailing_zeros() as usize;
        let mut delta = 0;
        for &w in &adjacency[flip] {
            delta += if side[w] == side[flip] { 1 } else { -1 };
        }
        side[flip] = !side[flip];
        cut += delta;
        best = best.max(cut);
    }
    Ok(best as usize)
}

fn pauli(k: usize) -> [[Complex64; 2]; 2] {
    let (z, o, i) = (
        Complex64::new(0.0, 0.0),
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, 1.0),
    );
    match k {
        0 => [[z, o], [o, z]],
        1 => [[z, -i], [i, z]],
        _ => [[o, z], [z, -o]],
    }
}

/// Dense complex `H` assembled from Pauli tensor products, independent of the
/// real edge blocks used by [`apply_hamiltonian`].
pub fn dense_hamiltonian_complex(g: &Graph, model: Model) -> Result<Vec<Complex64>> {
    check_size(g, MAX_ORACLE_QUBITS, "dense complex Hamiltonian")?;
    let n = g.n();
    let dim = 1usize << n;
    let (paulis, identity_weight, pair_weight): (&[usize], f64, f64) = match model {
        Model::Qmc => (&[0, 1, 2], 0.25, -0.25),
        Model::Xx => (&[0, 1], 0.25, -0.25),
        Model::Mc => (&[2], 0.5, -0.5),
    };
    let mut h = vec![Complex64::new(0.0, 0.0); dim * dim];
    for &(u, v) in g.edges() {
        let others = !((1usize << u) | (1usize << v)) & (dim - 1);
        for s in 0..dim {
            h[s * dim + s] += identity_weight;
            for t in 0..dim {
                if (s ^ t) & others != 0 {
                    continue;
                }
                let (su, sv, tu, tv) = ((s >> u) & 1, (s >> v) & 1, (t >> u) & 1, (t >> v) & 1);
                for &k in paulis {
                    let p = pauli(k);
                    h[s * dim + t] += pair_weight * p[su][tu] * p[sv][tv];
                }
            }
        }
    }
    Ok(h)
}

/// `tr(H rho)` with `rho` the full `2^n x 2^n` tensor product of the
/// one-qubit states `(I + y . sigma)/2`.
pub fn dense_product_energy_oracle(g: &Graph, s: &ProductState, model: Model) -> Result<f64> {
    check_size(g, MAX_ORACLE_QUBITS, "dense product-energy oracle")?;
    if s.len() != g.n() {
        return Err(Error::DimensionMismatch {
            expected: g.n(),
            actual: s.len(),
        });
    }
    let n = g.n();
    let dim = 1usize << n;
    let one = Complex64::new(1.0, 0.0);
    let singles: Vec<[[Complex64; 2]; 2]> = s
        .bloch
        .iter()
        .map(|b| {
            let mut m = [[Complex64::new(0.0, 0.0); 2]; 2];
            for (k, &c) in [b.x, b.y, b.z].iter().enumerate() {
                let p = pauli(k);
                for i in 0..2 {
                    for j in 0..2 {
                        m[i][j] += 0.5 * c * p[i][j];
                    }
                }
            }
            m[0][0] += 0.5 * one;
            m[1][1] += 0.5 * one;
            m
        })
        .collect();
    let mut rho = vec![Complex64::new(0.0, 0.0); dim * dim];
    for a in 0..dim {
        for b in 0..dim {
            let mut entry = one;
            for (q, m) in singles.iter().enumerate() {
                entry *= m[(a >> q) & 1][(b >> q) & 1];
            }
            rho[a * dim + b] = entry;
        }
    }
    let h = dense_hamiltonian_complex(g, model)?;
    let mut trace = Complex64::new(0.0, 0.0);
    for a in 0..dim {
        for b in 0..dim {
            trace += h[a * dim + b] * rho[b * dim + a];
        }
    }
    Ok(trace.re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{named_graph, Family};
    use crate::rounding::{energy_product, product_state_from_bloch};
    use std::f64::consts::FRAC_1_SQRT_2;

    fn k2() -> Graph {
        named_graph(Family::Complete, &[2], 0).unwrap()
    }

    #[test]
    fn singlet_and_triplet() {
        // |01> is index 2 (qubit 0 = 0, qubit 1 = 1), |10> is index 1.
        let singlet =
            StateVector::from_amplitudes(vec![0.0, -FRAC_1_SQRT_2, FRAC_1_SQRT_2, 0.0]).unwrap();
        let hs = apply_hamiltonian(&k2(), Model::Qmc, &singlet).unwrap();
        for (a, b) in hs.as_slice().iter().zip(singlet.as_slice()) {
            assert!((a - b).abs() < 1e-15);
        }
        let up = StateVector::basis(2, 0);
        let h_up = apply_hamiltonian(&k2(), Model::Qmc, &up).unwrap();
        assert!(h_up.as_slice().iter().all(|&x| x == 0.0));
        let triplet0 =
            StateVector::from_amplitudes(vec![0.0, FRAC_1_SQRT_2, FRAC_1_SQRT_2, 0.0]).unwrap();
        let h_t = apply_hamiltonian(&k2(), Model::Qmc, &triplet0).unwrap();
        assert!(h_t.as_slice().iter().all(|&x| x.abs() < 1e-15));
    }

    #[test]
    fn edgeless_is_zero_operator() {
        let g = Graph::empty(3).unwrap();
        let v = StateVector::random(3, 1);
        for model in [Model::Qmc, Model::Xx, Model::Mc] {
            let hv = apply_hamiltonian(&g, model, &v).unwrap();
            assert!(hv.as_slice().iter().all(|&x| x == 0.0));
            assert_eq!(max_eigenvalue(&g, model, 1e-9, 0).unwrap().value, 0.0);
        }
    }

    #[test]
    fn real_blocks_match_pauli_construction() {
        let g = named_graph(Family::Cycle, &[4], 0).unwrap();
        for model in [Model::Qmc, Model::Xx, Model::Mc] {
            let real = dense_hamiltonian(&g, model).unwrap();
            let complex = dense_hamiltonian_complex(&g, model).unwrap();
            let dim = 16;
            for i in 0..dim {
                for j in 0..dim {
                    let c = complex[i * dim + j];
                    assert!((c.re - real[(i, j)]).abs() < 1e-14, "{model:?} ({i},{j})");
                    assert!(c.im.abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn single_edge_spectrum() {
        assert_eq!(
            dense_spectrum(&k2(), Model::Qmc).unwrap(),
            vec![0.0, 0.0, 0.0, 1.0]
        );
        let est = max_eigenvalue(&k2(), Model::Qmc, 1e-10, 3).unwrap();
        assert!((est.value - 1.0).abs() < 1e-12);
        let xx = dense_spectrum(&k2(), Model::Xx).unwrap();
        assert!((xx[0] + 0.25).abs() < 1e-14 && (xx[3] - 0.75).abs() < 1e-14);
    }

    #[test]
    fn lanczos_matches_dense_on_small_graphs() {
        for g in [
            named_graph(Family::Cycle, &[5], 0).unwrap(),
            named_graph(Family::Complete, &[4], 0).unwrap(),
            named_graph(Family::ErdosRenyi, &[7, 500], 4).unwrap(),
        ] {
            for model in [Model::Qmc, Model::Xx, Model::Mc] {
                let dense = max_eigenvalue_dense(&g, model).unwrap();
                let lanczos = max_eigenvalue(&g, model, 1e-10, 9).unwrap();
                assert!(
                    (dense - lanczos.value).abs() < 1e-8,
                    "{g} {model:?}: {dense} vs {}",
                    lanczos.value
                );
            }
        }
    }

    #[test]
    fn brute_force_cuts() {
        assert_eq!(
            max_cut_bruteforce(&named_graph(Family::Complete, &[4], 0).unwrap()).unwrap(),
            4
        );
        assert_eq!(
            max_cut_bruteforce(&named_graph(Family::Cycle, &[5], 0).unwrap()).unwrap(),
            4
        );
        assert_eq!(
            max_cut_bruteforce(&named_graph(Family::CompleteBipartite, &[3, 4], 0).unwrap())
                .unwrap(),
            12
        );
        assert_eq!(max_cut_bruteforce(&Graph::empty(1).unwrap()).unwrap(), 0);
        // agrees with the diagonal MC Hamiltonian
        let g = named_graph(Family::Petersen, &[], 0).unwrap();
        let mc = max_cut_bruteforce(&g).unwrap();
        assert_eq!(mc, 12);
        assert!((max_eigenvalue_dense(&g, Model::Mc).unwrap() - mc as f64).abs() < 1e-9);
    }

    #[test]
    fn oracle_agrees_on_k2() {
        let s = product_state_from_bloch(&[[0.0, 0.0, 1.0], [0.0, 0.0, -1.0]]).unwrap();
        assert!((dense_product_energy_oracle(&k2(), &s, Model::Qmc).unwrap() - 0.5).abs() < 1e-14);
        let s = product_state_from_bloch(&[[0.6, 0.8, 0.0], [0.0, 0.6, -0.8]]).unwrap();
        for model in [Model::Qmc, Model::Xx, Model::Mc] {
            let a = dense_product_energy_oracle(&k2(), &s, model).unwrap();
            let b = energy_product(&k2(), &s, model).unwrap();
            assert!((a - b).abs() < 1e-14, "{model:?}");
        }
    }

    #[test]
    fn size_caps() {
        let big = named_graph(Family::Path, &[25], 0).unwrap();
        assert!(matches!(
            max_cut_bruteforce(&big),
            Err(Error::TooLarge { .. })
        ));
        assert!(matches!(
            max_eigenvalue(&big, Model::Qmc, 1e-9, 0),
            Err(Error::TooLarge { .. })
        ));
        let mid = named_graph(Family::Path, &[11], 0).unwrap();
        assert!(dense_spectrum(&mid, Model::Qmc).is_err());
        let s = product_state_from_bloch(&[[0.0, 0.0, 1.0]; 9]).unwrap();
        assert!(dense_product_energy_oracle(
            &named_graph(Family::Path, &[9], 0).unwrap(),
            &s,
            Model::Qmc
        )
        .is_err());
        assert!(apply_hamiltonian(&k2(), Model::Qmc, &StateVector::basis(3, 0)).is_err());
    }
}

//! Gaussian projection rounding of vector solutions to product states.
//!
//! A single `r x d` standard Gaussian matrix `Z` is drawn per trial and shared
//! by all vertices; each vector `x_u` maps to `y_u = Z x_u / |Z x_u|`. With
//! `r = 3` the `y_u` are Bloch vectors of a product state, with `r = 2` they
//! lie in the XY plane, and with `r = 1` they are the signs of a cut.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::numerics::{derive_seed, dot, gaussian_matrix};
use crate::specialfn::rounding_coefficient;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    /// Quantum Max Cut, `1/4 sum (I - XX - YY - ZZ)`.
    Qmc,
    /// `1/4 sum (I - XX - YY)`.
    Xx,
    /// Classical Max Cut, `1/2 sum (I - ZZ)`.
    Mc,
}

impl Model {
    /// Rounding rank: output dimension of the projection.
    pub fn rank(self) -> u32 {
        match self {
            Model::Qmc => 3,
            Model::Xx => 2,
            Model::Mc => 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Model::Qmc => "qmc",
            Model::Xx => "xx",
            Model::Mc => "mc",
        }
    }

    /// Symbolic form of the rounding coefficient used by the bound.
    pub fn constant_symbol(self) -> &'static str {
        match self {
            Model::Qmc => "8/(3*pi)",
            Model::Xx => "pi/4",
            Model::Mc => "2/pi",
        }
    }
}

impl std::str::FromStr for Model {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "qmc" => Ok(Model::Qmc),
            "xx" => Ok(Model::Xx),
            "mc" => Ok(Model::Mc),
            other => Err(Error::Domain(format!("unknown model `{other}`"))),
        }
    }
}

const UNIT_INPUT_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    /// Accepts vectors within `1e-8` of unit length and renormalizes them.
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let len = (x * x + y * y + z * z).sqrt();
        if !len.is_finite() || (len - 1.0).abs() > UNIT_INPUT_TOL {
            return Err(Error::NotUnit {
                index: 0,
                norm: len,
            });
        }
        Ok(Self {
            x: x / len,
            y: y / len,
            z: z / len,
        })
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn dot(&self, other: &BlochVector) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }
}

/// Product of pure one-qubit states `(1 + y . sigma) / 2`, one per vertex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductState {
    pub bloch: Vec<BlochVector>,
}

impl ProductState {
    pub fn len(&self) -> usize {
        self.bloch.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bloch.is_empty()
    }
}

pub fn product_state_from_bloch(ys: &[[f64; 3]]) -> Result<ProductState> {
    let bloch = ys
        .iter()
        .enumerate()
        .map(|(index, y)| {
            BlochVector::new(y[0], y[1], y[2]).map_err(|e| match e {
                Error::NotUnit { norm, .. } => Error::NotUnit { index, norm },
                other => other,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ProductState { bloch })
}

/// Embeds rank-`r` rounding output as Bloch vectors: `r = 3` as is,
/// `r = 2` into the XY plane, `r = 1` onto the Z axis.
pub fn embed_as_bloch(ys: &[Vec<f64>]) -> Result<ProductState> {
    let arrays: Vec<[f64; 3]> = ys
        .iter()
        .map(|y| match y.len() {
            3 => Ok([y[0], y[1], y[2]]),
            2 => Ok([y[0], y[1], 0.0]),
            1 => Ok([0.0, 0.0, y[0]]),
            d => Err(Error::DimensionMismatch {
                expected: 3,
                actual: d,
            }),
        })
        .collect::<Result<_>>()?;
    product_state_from_bloch(&arrays)
}

/// `tr(H rho)` for a product state, in closed form:
/// QMC `1/4 sum (1 - y_u . y_v)`, XX `1/4 sum (1 - y_u^x y_v^x - y_u^y y_v^y)`,
/// MC `1/2 sum (1 - y_u^z y_v^z)`.
pub fn energy_product(g: &Graph, s: &ProductState, model: Model) -> Result<f64> {
    if s.len() != g.n() {
        return Err(Error::DimensionMismatch {
            expected: g.n(),
            actual: s.len(),
        });
    }
    let b = &s.bloch;
    let total: f64 = g
        .edges()
        .iter()
        .map(|&(u, v)| match model {
            Model::Qmc => 0.25 * (1.0 - b[u].dot(&b[v])),
            Model::Xx => 0.25 * (1.0 - b[u].x * b[v].x - b[u].y * b[v].y),
            Model::Mc => 0.5 * (1.0 - b[u].z * b[v].z),
        })
        .sum();
    Ok(total)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Rounded {
    /// Unit vectors in `R^r`, one per input.
    pub vectors: Vec<Vec<f64>>,
    /// Times `Z` had to be redrawn because some `|Z x|` vanished.
    pub resamples: u32,
}

const MAX_RESAMPLES: u32 = 64;

fn check_unit(xs: &[Vec<f64>]) -> Result<usize> {
    let d = xs.first().map_or(0, Vec::len);
    for (index, x) in xs.iter().enumerate() {
        if x.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                actual: x.len(),
            });
        }
        let len = dot(x, x).sqrt();
        if (len - 1.0).abs() > UNIT_INPUT_TOL {
            return Err(Error::NotUnit { index, norm: len });
        }
    }
    Ok(d)
}

/// `y_u = Z x_u / |Z x_u|` with one Gaussian `Z` in `R^{r x d}` drawn from `seed`.
pub fn round_vectors(xs: &[Vec<f64>], r: u32, seed: u64) -> Result<Rounded> {
    if r == 0 {
        return Err(Error::Domain("rounding rank must be at least 1".into()));
    }
    let d = check_unit(xs)?;
    let r = r as usize;
    for attempt in 0..MAX_RESAMPLES {
        let draw_seed = if attempt == 0 {
            seed
        } else {
            derive_seed(seed, u64::MAX - attempt as u64)
        };
        let z = gaussian_matrix(r, d, draw_seed);
        let mut out = Vec::with_capacity(xs.len());
        for x in xs {
            let mut y: Vec<f64> = (0..r)
                .map(|i| (0..d).map(|j| z[(i, j)] * x[j]).sum())
                .collect();
            let len = dot(&y, &y).sqrt();
            if len < 1e-300 {
                break;
            }
            y.iter_mut().for_each(|v| *v /= len);
            out.push(y);
        }
        if out.len() == xs.len() {
            return Ok(Rounded {
                vectors: out,
                resamples: attempt,
            });
        }
    }
    Err(Error::Domain(format!(
        "projection vanished in {MAX_RESAMPLES} consecutive draws"
    )))
}

/// Sign rounding (`r = 1`): returns `z_u = +-1` and the number of cut edges.
pub fn classical_cut_from_rounding(
    g: &Graph,
    xs: &[Vec<f64>],
    seed: u64,
) -> Result<(Vec<i8>, usize)> {
    if xs.len() != g.n() {
        return Err(Error::DimensionMismatch {
            expected: g.n(),
            actual: xs.len(),
        });
    }
    let rounded = round_vectors(xs, 1, seed)?;
    let signs: Vec<i8> = rounded
        .vectors
        .iter()
        .map(|y| if y[0] >= 0.0 { 1 } else { -1 })
        .collect();
    let cut = g
        .edges()
        .iter()
        .filter(|&&(u, v)| signs[u] != signs[v])
        .count();
    Ok((signs, cut))
}

/// Lower bound implied by theta of the complement:
/// `(m/4)(1 + (8/3pi)/(kappa-1))` for QMC, `(m/4)(1 + (pi/4)/(kappa-1))` for XX,
/// `(m/2)(1 + (2/pi)/(kappa-1))` for MC.
pub fn theta_lower_bound(g: &Graph, kappa: f64, model: Model) -> Result<f64> {
    if g.m() == 0 {
        return Err(Error::NoEdges);
    }
    if kappa.is_nan() || kappa <= 1.0 {
        return Err(Error::Domain(format!("kappa must exceed 1, got {kappa}")));
    }
    let c = rounding_coefficient(model.rank())?;
    let m = g.m() as f64;
    let base = match model {
        Model::Qmc | Model::Xx => m / 4.0,
        Model::Mc => m / 2.0,
    };
    Ok(base * (1.0 + c / (kappa - 1.0)))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RoundingEstimate {
    pub mean: f64,
    /// Sample standard deviation over `sqrt(trials)`; 0 for a single trial.
    pub stderr: f64,
    pub trials: usize,
    pub single_trial: bool,
    pub best_energy: f64,
    pub best_trial: usize,
    pub best_state: ProductState,
    pub master_seed: u64,
    pub resamples: u64,
}

/// Seed of trial `index` under `master_seed`.
pub fn trial_seed(master_seed: u64, index: usize) -> u64 {
    derive_seed(master_seed, index as u64)
}

fn run_trial(
    g: &Graph,
    xs: &[Vec<f64>],
    model: Model,
    seed: u64,
) -> Result<(f64, ProductState, u32)> {
    let rounded = round_vectors(xs, model.rank(), seed)?;
    let state = embed_as_bloch(&rounded.vectors)?;
    let energy = energy_product(g, &state, model)?;
    Ok((energy, state, rounded.resamples))
}

#[cfg(feature = "parallel")]
fn map_trials<T: Send>(trials: usize, f: impl Fn(usize) -> T + Sync + Send) -> Vec<T> {
    use rayon::prelude::*;
    (0..trials).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn map_trials<T>(trials: usize, f: impl Fn(usize) -> T) -> Vec<T> {
    (0..trials).map(f).collect()
}

/// Monte-Carlo estimate of the expected energy of rounded product states.
///
/// Trial `i` uses `trial_seed(master_seed, i)`, and results are reduced in
/// index order, so serial and parallel runs agree bit for bit.
pub fn estimate_expected_energy(
    g: &Graph,
    xs: &[Vec<f64>],
    model: Model,
    trials: usize,
    master_seed: u64,
) -> Result<RoundingEstimate> {
    if trials == 0 {
        return Err(Error::Domain("need at least one trial".into()));
    }
    if xs.len() != g.n() {
        return Err(Error::DimensionMismatch {
            expected: g.n(),
            actual: xs.len(),
        });
    }
    let results = map_trials(trials, |i| {
        run_trial(g, xs, model, trial_seed(master_seed, i)).map(|(e, _, r)| (e, r))
    });
    let mut energies = Vec::with_capacity(trials);
    let mut resamples = 0u64;
    for res in results {
        let (e, r) = res?;
        energies.push(e);
        resamples += r as u64;
    }
    let n = trials as f64;
    let mean = energies.iter().sum::<f64>() / n;
    let stderr = if trials > 1 {
        let var = energies.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (n - 1.0);
        (var / n).sqrt()
    } else {
        0.0
    };
    let (best_trial, best_energy) =
        energies
            .iter()
            .copied()
            .enumerate()
            .fold(
                (0, f64::NEG_INFINITY),
                |acc, (i, e)| if e > acc.1 { (i, e) } else { acc },
            );
    let (_, best_state, _) = run_trial(g, xs, model, trial_seed(master_seed, best_trial))?;
    Ok(RoundingEstimate {
        mean,
        stderr,
        trials,
        single_trial: trials == 1,
        best_energy,
        best_trial,
        best_state,
        master_seed,
        resamples,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpectationCheck {
    pub empirical: f64,
    pub closed_form: f64,
    pub stderr: f64,
    pub z_score: f64,
}

const EXPECTATION_BATCH: usize = 10_000;

/// Monte-Carlo check of `E[y_u . y_v] = c(r) F(r, t)` for two unit vectors in
/// `R^n` with inner product `t`, using `samples` independent `r x n` draws.
pub fn verify_expected_inner_product(
    n: usize,
    t: f64,
    r: u32,
    samples: usize,
    seed: u64,
) -> Result<ExpectationCheck> {
    if n < 2 {
        return Err(Error::Domain("need n >= 2 to place two vectors".into()));
    }
    if samples < 2 {
        return Err(Error::Domain("need at least two samples".into()));
    }
    if t.is_nan() || t.abs() > 1.0 {
        return Err(Error::Domain(format!("|t| must be <= 1, got {t}")));
    }
    let closed_form = crate::specialfn::expected_inner_product(r, t, 1e-13)?;
    let mut u = vec![0.0; n];
    let mut v = vec![0.0; n];
    u[0] = 1.0;
    v[0] = t;
    v[1] = (1.0 - t * t).max(0.0).sqrt();
    let xs = [u, v];

    let batches = samples.div_ceil(EXPECTATION_BATCH);
    let partials = map_trials(batches, |b| -> Result<(f64, f64)> {
        let count = EXPECTATION_BATCH.min(samples - b * EXPECTATION_BATCH);
        let (mut sum, mut sum_sq) = (0.0, 0.0);
        for i in 0..count {
            let seed = derive_seed(derive_seed(seed, b as u64), i as u64);
            let out = round_vectors(&xs, r, seed)?;
            let p = dot(&out.vectors[0], &out.vectors[1]);
            sum += p;
            sum_sq += p * p;
        }
        Ok((sum, sum_sq))
    });
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for p in partials {
        let (s, q) = p?;
        sum += s;
        sum_sq += q;
    }
    let count = samples as f64;
    let empirical = sum / count;
    let var = ((sum_sq - count * empirical * empirical) / (count - 1.0)).max(0.0);
    let stderr = (var / count).sqrt();
    let diff = (empirical - closed_form).abs();
    let z_score = if stderr > 0.0 {
        diff / stderr
    } else if diff < 1e-12 {
        0.0
    } else {
        f64::INFINITY
    };
    Ok(ExpectationCheck {
        empirical,
        closed_form,
        stderr,
        z_score,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{named_graph, Family};
    use std::f64::consts::PI;

    #[test]
    fn rounding_basics() {
        let e1 = vec![1.0, 0.0, 0.0];
        for r in 1..=3 {
            let out = round_vectors(std::slice::from_ref(&e1), r, 5).unwrap();
            assert_eq!(out.vectors[0].len(), r as usize);
            assert!((dot(&out.vectors[0], &out.vectors[0]) - 1.0).abs() < 1e-14);
        }
        let v = vec![0.6, 0.8, 0.0];
        let neg: Vec<f64> = v.iter().map(|x| -x).collect();
        let same = round_vectors(&[v.clone(), v.clone()], 3, 11).unwrap();
        assert_eq!(same.vectors[0], same.vectors[1]);
        let anti = round_vectors(&[v.clone(), neg], 3, 11).unwrap();
        for (a, b) in anti.vectors[0].iter().zip(&anti.vectors[1]) {
            assert_eq!(*a, -*b);
        }
        assert_eq!(
            round_vectors(std::slice::from_ref(&v), 3, 11).unwrap(),
            round_vectors(&[v], 3, 11).unwrap()
        );
        assert!(matches!(
            round_vectors(&[vec![1.0, 1.0]], 3, 0),
            Err(Error::NotUnit { index: 0, .. })
        ));
        assert!(round_vectors(&[vec![1.0], vec![1.0, 0.0]], 3, 0).is_err());
    }

    #[test]
    fn bloch_states() {
        let s = product_state_from_bloch(&[[0.0, 0.0, 1.0], [1.0, 0.0, 0.0]]).unwrap();
        assert_eq!(s.bloch[0].z, 1.0);
        assert_eq!(s.bloch[1].x, 1.0);
        assert!(matches!(
            product_state_from_bloch(&[[0.0, 0.0, 1.0], [0.5, 0.0, 0.0]]),
            Err(Error::NotUnit { index: 1, .. })
        ));
        let b = BlochVector::new(0.0, 0.6, 0.8 + 5e-9).unwrap();
        assert!((b.dot(&b) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn closed_form_energies() {
        let k2 = named_graph(Family::Complete, &[2], 0).unwrap();
        let anti = product_state_from_bloch(&[[0.0, 0.0, 1.0], [0.0, 0.0, -1.0]]).unwrap();
        assert_eq!(energy_product(&k2, &anti, Model::Qmc).unwrap(), 0.5);
        assert_eq!(energy_product(&k2, &anti, Model::Mc).unwrap(), 1.0);
        assert_eq!(energy_product(&k2, &anti, Model::Xx).unwrap(), 0.25);
        let c5 = named_graph(Family::Cycle, &[5], 0).unwrap();
        let aligned = product_state_from_bloch(&[[0.6, 0.0, 0.8]; 5]).unwrap();
        assert_eq!(energy_product(&c5, &aligned, Model::Qmc).unwrap(), 0.0);
        assert!(energy_product(&c5, &anti, Model::Qmc).is_err());
    }

    #[test]
    fn bounds() {
        let k2 = named_graph(Family::Complete, &[2], 0).unwrap();
        let b = theta_lower_bound(&k2, 2.0, Model::Qmc).unwrap();
        assert!((b - 0.25 * (1.0 + 8.0 / (3.0 * PI))).abs() < 1e-15);
        assert!((b - 0.46221).abs() < 1e-5);
        let c5 = named_graph(Family::Cycle, &[5], 0).unwrap();
        let b = theta_lower_bound(&c5, 5f64.sqrt(), Model::Qmc).unwrap();
        // (5/4)(1 + (8/3pi)/(sqrt5 - 1)), evaluated independently
        assert!((b - 2.108_393_691_334).abs() < 1e-9, "{b}");
        assert!(
            (theta_lower_bound(&k2, 2.0, Model::Mc).unwrap() - 0.5 * (1.0 + 2.0 / PI)).abs()
                < 1e-15
        );
        assert!(
            (theta_lower_bound(&k2, 2.0, Model::Xx).unwrap() - 0.25 * (1.0 + PI / 4.0)).abs()
                < 1e-15
        );
        let far = theta_lower_bound(&c5, 1e12, Model::Qmc).unwrap();
        assert!((far - 1.25).abs() < 1e-11);
        assert!(theta_lower_bound(&c5, 1.0, Model::Qmc).is_err());
        assert!(theta_lower_bound(&Graph::empty(3).unwrap(), 3.0, Model::Qmc).is_err());
    }

    #[test]
    fn single_edge_cut_is_always_one() {
        let k2 = named_graph(Family::Complete, &[2], 0).unwrap();
        let xs = vec![vec![1.0, 0.0], vec![-1.0, 0.0]];
        for seed in 0..50 {
            let (signs, cut) = classical_cut_from_rounding(&k2, &xs, seed).unwrap();
            assert_eq!(cut, 1);
            assert_eq!(signs[0], -signs[1]);
        }
    }

    #[test]
    fn estimate_is_deterministic() {
        let c5 = named_graph(Family::Cycle, &[5], 0).unwrap();
        let xs: Vec<Vec<f64>> = (0..5)
            .map(|k| {
                let a = 4.0 * PI * k as f64 / 5.0;
                vec![a.cos(), a.sin()]
            })
            .collect();
        let a = estimate_expected_energy(&c5, &xs, Model::Qmc, 500, 3).unwrap();
        let b = estimate_expected_energy(&c5, &xs, Model::Qmc, 500, 3).unwrap();
        assert_eq!(a.mean.to_bits(), b.mean.to_bits());
        assert_eq!(a.best_state, b.best_state);
        assert!(a.best_energy >= a.mean);
        assert!(a.best_energy <= 2.5);
        let one = estimate_expected_energy(&c5, &xs, Model::Qmc, 1, 3).unwrap();
        assert!(one.single_trial);
        assert_eq!(one.stderr, 0.0);
        assert_eq!(one.mean, one.best_energy);
        assert!(estimate_expected_energy(&c5, &xs, Model::Qmc, 0, 3).is_err());
    }

    #[test]
    fn orthogonal_inputs_have_zero_correlation() {
        let check = verify_expected_inner_product(4, 0.0, 3, 100_000, 1).unwrap();
        assert_eq!(check.closed_form, 0.0);
        assert!(check.z_score <= 4.0, "{check:?}");
        let same = verify_expected_inner_product(3, 1.0, 2, 1_000, 1).unwrap();
        assert!((same.empirical - 1.0).abs() < 1e-12);
        assert_eq!(same.z_score, 0.0);
    }
}

//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Three operations are exported: the expected-inner-product curve of Gaussian
//! rounding for a chosen rank, a full bound report for a named graph, and a
//! histogram of rounded energies. Each has a plain Rust counterpart so the
//! logic is testable off the browser.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use qmc_theta::graph::{named_graph, parse_family_spec};
use qmc_theta::numerics::SdpOptions;
use qmc_theta::report::{cmd_verify, RunOptions};
use qmc_theta::rounding::{
    embed_as_bloch, energy_product, round_vectors, theta_lower_bound, trial_seed, Model,
};
use qmc_theta::specialfn::expected_inner_product;
use qmc_theta::theta::lovasz_theta_complement;
use qmc_theta::{spectrum, Graph};

/// Largest graph the page will diagonalize exactly.
pub const MAX_DEMO_N: usize = 12;
pub const MAX_DEMO_TRIALS: usize = 200_000;

fn demo_graph(spec: &str, seed: u64) -> Result<Graph, String> {
    let (family, params) = parse_family_spec(spec).map_err(|e| e.to_string())?;
    let g = named_graph(family, &params, seed).map_err(|e| e.to_string())?;
    if g.n() > MAX_DEMO_N {
        return Err(format!("the demo handles at most {MAX_DEMO_N} vertices"));
    }
    if g.m() == 0 {
        return Err("bound = 0 (no edges)".into());
    }
    Ok(g)
}

fn check_trials(trials: usize) -> Result<(), String> {
    if trials == 0 || trials > MAX_DEMO_TRIALS {
        Err(format!("trials must be in 1..={MAX_DEMO_TRIALS}"))
    } else {
        Ok(())
    }
}

/// `E[y_u . y_v]` as a function of `t = <x_u, x_v>` on `points` equally spaced
/// values in `[-1, 1]`.
pub fn rounding_curve_values(r: u32, points: usize) -> Result<Vec<f64>, String> {
    if !(2..=2001).contains(&points) {
        return Err("points must be in 2..=2001".into());
    }
    (0..points)
        .map(|i| {
            let t = -1.0 + 2.0 * i as f64 / (points - 1) as f64;
            expected_inner_product(r, t, 1e-9).map_err(|e| e.to_string())
        })
        .collect()
}

pub fn analyze_json(spec: &str, model: &str, trials: usize, seed: u64) -> Result<String, String> {
    check_trials(trials)?;
    let model: Model = model.parse().map_err(|e: qmc_theta::Error| e.to_string())?;
    let g = demo_graph(spec, seed)?;
    let opts = RunOptions {
        model,
        trials,
        seed,
        max_exact_n: MAX_DEMO_N,
        ..RunOptions::default()
    };
    let report = cmd_verify(&g, spec, opts).map_err(|e| e.to_string())?;
    serde_json::to_string(&report).map_err(|e| e.to_string())
}

#[derive(Debug, Serialize)]
pub struct Histogram {
    pub lo: f64,
    pub hi: f64,
    pub counts: Vec<u32>,
    pub mean: f64,
    pub bound: f64,
    pub exact: f64,
    pub m: usize,
}

pub fn rounding_histogram_data(
    spec: &str,
    model: &str,
    trials: usize,
    seed: u64,
    bins: usize,
) -> Result<Histogram, String> {
    check_trials(trials)?;
    if !(1..=200).contains(&bins) {
        return Err("bins must be in 1..=200".into());
    }
    let model: Model = model.parse().map_err(|e: qmc_theta::Error| e.to_string())?;
    let g = demo_graph(spec, seed)?;
    let err = |e: qmc_theta::Error| e.to_string();
    let cert = lovasz_theta_complement(&g, SdpOptions::default()).map_err(err)?;
    let bound = theta_lower_bound(&g, cert.kappa, model).map_err(err)?;
    let exact = match model {
        Model::Mc => spectrum::max_cut_bruteforce(&g).map_err(err)? as f64,
        _ => {
            spectrum::max_eigenvalue(&g, model, 1e-10, seed)
                .map_err(err)?
                .value
        }
    };
    let energies = (0..trials)
        .map(|i| {
            let rounded = round_vectors(&cert.vectors, model.rank(), trial_seed(seed, i))?;
            energy_product(&g, &embed_as_bloch(&rounded.vectors)?, model)
        })
        .collect::<Result<Vec<f64>, _>>()
        .map_err(err)?;
    let m = g.m();
    // Axis from the smallest possible energy of the model to the exact optimum.
    let lo = if model == Model::Xx {
        -(m as f64) / 4.0
    } else {
        0.0
    };
    let hi = exact.max(lo + 1e-12);
    let mut counts = vec![0u32; bins];
    for &e in &energies {
        let k = (((e - lo) / (hi - lo)) * bins as f64).floor();
        counts[(k.max(0.0) as usize).min(bins - 1)] += 1;
    }
    Ok(Histogram {
        lo,
        hi,
        counts,
        mean: energies.iter().sum::<f64>() / trials as f64,
        bound,
        exact,
        m,
    })
}

/// `c(r) F(r, t)` sampled on `[-1, 1]`.
#[wasm_bindgen(js_name = roundingCurve)]
pub fn rounding_curve(r: u32, points: usize) -> Result<Vec<f64>, JsError> {
    rounding_curve_values(r, points).map_err(|e| JsError::new(&e))
}

/// JSON bound report (theta, bounds, rounding, exact value, checks) for a
/// family spec such as `cycle:7`.
#[wasm_bindgen]
pub fn analyze(spec: &str, model: &str, trials: usize, seed: u32) -> Result<String, JsError> {
    analyze_json(spec, model, trials, seed as u64).map_err(|e| JsError::new(&e))
}

/// JSON histogram of rounded energies between the model's minimum and the exact
/// optimum, with the bound and the mean for reference lines.
#[wasm_bindgen(js_name = roundingHistogram)]
pub fn rounding_histogram(
    spec: &str,
    model: &str,
    trials: usize,
    seed: u32,
    bins: usize,
) -> Result<String, JsError> {
    rounding_histogram_data(spec, model, trials, seed as u64, bins)
        .and_then(|h| serde_json::to_string(&h).map_err(|e| e.to_string()))
        .map_err(|e| JsError::new(&e))
}

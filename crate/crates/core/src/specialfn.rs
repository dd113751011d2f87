//! The odd hypergeometric series behind Gaussian projection rounding.
//!
//! For unit vectors with inner product `t`, projecting through an `r x n`
//! standard Gaussian matrix and renormalizing gives
//!
//! ```text
//!   E[y_u . y_v] = c(r) * F(r, t)
//!   c(r)    = (2/r) * (Gamma((r+1)/2) / Gamma(r/2))^2
//!   F(r, t) = t * 2F1(1/2, 1/2; r/2 + 1; t^2)
//!           = sum_k [(1*3*..*(2k-1))^2 / ((2*4*..*2k) * ((r+2)(r+4)..(r+2k)))] t^(2k+1)
//! ```
//!
//! `F(1, t) = arcsin t`, which makes the `r = 1` case the arcsine law for sign
//! rounding.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Hard cap on series terms.
pub const TERM_CAP: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesEval {
    pub value: f64,
    pub terms_used: usize,
    /// Upper bound on the magnitude of the omitted tail.
    pub truncation_bound: f64,
}

/// Rising factorial `(a)_n = a (a+1) ... (a+n-1)`, with `(a)_0 = 1`.
pub fn pochhammer(a: f64, n: usize) -> f64 {
    (0..n).fold(1.0, |acc, k| acc * (a + k as f64))
}

/// Partial sum of `2F1(a, b; c; z) = sum_j (a)_j (b)_j / ((c)_j j!) z^j` over
/// its first `terms` terms, for any `a, b, c` with `c` not a non-positive
/// integer. Consecutive terms are formed by their Pochhammer ratio
/// `(a+j)(b+j) / ((c+j)(j+1)) z` so large `j` does not overflow.
pub fn hypergeometric_2f1_partial(a: f64, b: f64, c: f64, z: f64, terms: usize) -> f64 {
    let mut sum = 0.0;
    let mut term = 1.0;
    for j in 0..terms {
        sum += term;
        let jf = j as f64;
        term *= (a + jf) * (b + jf) / ((c + jf) * (jf + 1.0)) * z;
    }
    sum
}

/// `Gamma((r+1)/2) / Gamma(r/2)` for integer `r >= 1`, via
/// `Gamma(1/2) = sqrt(pi)`, `Gamma(1) = 1` and `Gamma(x+1) = x Gamma(x)`:
/// the ratio obeys `R(r+2) = R(r) (r+1) / r`.
fn half_gamma_ratio(r: u32) -> f64 {
    let sqrt_pi = std::f64::consts::PI.sqrt();
    let (mut ratio, mut k) = if r % 2 == 1 {
        (1.0 / sqrt_pi, 1)
    } else {
        (sqrt_pi / 2.0, 2)
    };
    while k < r {
        ratio *= (k + 1) as f64 / k as f64;
        k += 2;
    }
    ratio
}

/// `c(r) = (2/r) (Gamma((r+1)/2) / Gamma(r/2))^2`: `2/pi`, `pi/4`, `8/(3 pi)` for `r = 1, 2, 3`.
pub fn rounding_coefficient(r: u32) -> Result<f64> {
    if r == 0 {
        return Err(Error::Domain("rounding rank must be at least 1".into()));
    }
    let ratio = half_gamma_ratio(r);
    Ok(2.0 / r as f64 * ratio * ratio)
}

/// Bound on `sum_{k > last} c_k |t|^(2k+1)` given the first omitted term
/// `next = c_{last+1} |t|^(2 last + 3)`.
///
/// Two bounds, whichever is smaller: the geometric one, since consecutive
/// terms shrink by at least `t^2`; and a power-law one from
/// `c_k / c_{k-1} <= exp(-s/k)` with `s = 1 + r/2 - r^2 / (8 (last + 2))`,
/// which gives `c_k <= c_{last+1} ((last+2)/(k+1))^s` and a tail of at most
/// `next * (1 + (last+2)/(s-1))` when `s > 1`.
fn tail_bound(next: f64, t2: f64, r: u32, last: usize) -> f64 {
    let geometric = if t2 < 1.0 {
        next / (1.0 - t2)
    } else {
        f64::INFINITY
    };
    let k0 = (last + 2) as f64;
    let rf = r as f64;
    let s = 1.0 + rf / 2.0 - rf * rf / (8.0 * k0);
    let power = if s > 1.0 {
        next * (1.0 + k0 / (s - 1.0))
    } else {
        f64::INFINITY
    };
    geometric.min(power)
}

/// `F(r, t)` by its odd power series with the running-product recurrence
/// `c_k = c_{k-1} (2k-1)^2 / (2k (r + 2k))`, summed until the tail bound
/// drops to `tol`.
///
/// At `|t| = 1` the series converges like `k^-(r/2)` and is far too slow to
/// sum, so the endpoint uses Gauss's summation
/// `F(r, +-1) = +-(r/2) (Gamma(r/2) / Gamma((r+1)/2))^2`, exact for `r >= 1`.
pub fn f_hat(r: u32, t: f64, tol: f64) -> Result<SeriesEval> {
    if !t.is_finite() || t.abs() > 1.0 {
        return Err(Error::Domain(format!("|t| must be <= 1, got {t}")));
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::Domain(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    if t.abs() == 1.0 {
        if r == 0 {
            return Err(Error::SlowConvergence {
                terms: 0,
                tail: f64::INFINITY,
                tol,
            });
        }
        let ratio = half_gamma_ratio(r);
        return Ok(SeriesEval {
            value: t * (r as f64 / 2.0) / (ratio * ratio),
            terms_used: 0,
            truncation_bound: 0.0,
        });
    }
    let t2 = t * t;
    let rf = r as f64;
    let mut coef = 1.0;
    let mut power = t;
    let mut sum = 0.0;
    for k in 0..TERM_CAP {
        sum += coef * power;
        let next_k = (k + 1) as f64;
        coef *= (2.0 * next_k - 1.0).powi(2) / (2.0 * next_k * (rf + 2.0 * next_k));
        power *= t2;
        let bound = tail_bound((coef * power).abs(), t2, r, k);
        if bound <= tol {
            return Ok(SeriesEval {
                value: sum,
                terms_used: k + 1,
                truncation_bound: bound,
            });
        }
    }
    let tail = tail_bound((coef * power).abs(), t2, r, TERM_CAP - 1);
    Err(Error::SlowConvergence {
        terms: TERM_CAP,
        tail,
        tol,
    })
}

/// `E[y_u . y_v] = c(r) F(r, t)` for rank-`r` Gaussian projection rounding.
pub fn expected_inner_product(r: u32, t: f64, tol: f64) -> Result<f64> {
    Ok(rounding_coefficient(r)? * f_hat(r, t, tol)?.value)
}

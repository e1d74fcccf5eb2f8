//! Limits of noisy sequences.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mc::MCEstimate;

/// Weights `w_j` with `Σ_j w_j P(x_j) = P(0)` for every polynomial `P` of
/// degree `< xs.len()` (Lagrange interpolation evaluated at zero).
pub fn lagrange_weights_at_zero(xs: &[f64]) -> Vec<f64> {
    (0..xs.len())
        .map(|j| {
            xs.iter()
                .enumerate()
                .filter(|&(i, _)| i != j)
                .map(|(_, &xi)| xi / (xi - xs[j]))
                .product()
        })
        .collect()
}

/// How an [`Extrapolation`] was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExtrapolationMethod {
    /// Fitted `a + b·r^q` through the last three points.
    PowerFit,
    /// Differences were not resolvable above the noise (or not consistent
    /// with a convergent power law); the last value is reported.
    LastValue,
}

/// A limit estimate as the abscissa goes to zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Extrapolation {
    pub limit: f64,
    pub stderr: f64,
    /// Fitted exponent `q` when `method` is `PowerFit`.
    pub exponent: Option<f64>,
    pub method: ExtrapolationMethod,
}

/// Solves `(r1^q − r2^q)/(r2^q − r3^q) = ratio` for `q > 0`.
fn solve_exponent(r: [f64; 3], ratio: f64) -> Option<f64> {
    let g = |q: f64| (r[0].powf(q) - r[1].powf(q)) / (r[1].powf(q) - r[2].powf(q));
    // g increases from ln(r1/r2)/ln(r2/r3) at q → 0⁺
    let g0 = (r[0] / r[1]).ln() / (r[1] / r[2]).ln();
    if !(ratio > g0) {
        return None;
    }
    let (mut lo, mut hi) = (1e-9, 1.0);
    while g(hi) < ratio {
        hi *= 2.0;
        if hi > 200.0 {
            return None;
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) < ratio {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

fn power_fit(r: [f64; 3], v: [f64; 3]) -> Option<(f64, f64)> {
    let (d1, d2) = (v[0] - v[1], v[1] - v[2]);
    if d2 == 0.0 || d1 == 0.0 || d1.signum() != d2.signum() {
        return None;
    }
    let q = solve_exponent(r, d1 / d2)?;
    let b = d2 / (r[1].powf(q) - r[2].powf(q));
    Some((v[2] - b * r[2].powf(q), q))
}

/// Extrapolates `values` (taken at strictly decreasing positive `radii`) to
/// `r → 0` by fitting `a + b·r^q` with `q > 0` free through the last three
/// points. Falls back to the last value when the successive differences are
/// within `2σ` of zero or do not describe a convergent power law.
pub fn extrapolate_to_zero(radii: &[f64], values: &[MCEstimate]) -> Result<Extrapolation> {
    if radii.len() != values.len() || radii.is_empty() {
        return Err(Error::domain("extrapolate", "need one value per radius"));
    }
    if radii.windows(2).any(|w| !(w[0] > w[1])) || radii.iter().any(|&r| !(r > 0.0)) {
        return Err(Error::domain(
            "extrapolate",
            "radii must be positive and strictly decreasing",
        ));
    }
    let last = values[values.len() - 1];
    let fallback = Extrapolation {
        limit: last.mean,
        stderr: last.stderr,
        exponent: None,
        method: ExtrapolationMethod::LastValue,
    };
    if radii.len() < 3 {
        return Ok(fallback);
    }
    let i = radii.len() - 3;
    let r = [radii[i], radii[i + 1], radii[i + 2]];
    let v = [values[i].mean, values[i + 1].mean, values[i + 2].mean];
    let se = [values[i].stderr, values[i + 1].stderr, values[i + 2].stderr];
    let resolvable = |a: usize, b: usize| (v[a] - v[b]).abs() > 2.0 * se[a].hypot(se[b]);
    if !(resolvable(0, 1) && resolvable(1, 2)) {
        return Ok(fallback);
    }
    let Some((limit, q)) = power_fit(r, v) else {
        return Ok(fallback);
    };
    // first-order propagation of the three independent errors
    let mut var = 0.0;
    for j in 0..3 {
        let h = 1e-4 * se[j].max(1e-12 * v[j].abs()).max(f64::MIN_POSITIVE);
        let mut vp = v;
        let mut vm = v;
        vp[j] += h;
        vm[j] -= h;
        match (power_fit(r, vp), power_fit(r, vm)) {
            (Some((lp, _)), Some((lm, _))) => {
                let d = (lp - lm) / (2.0 * h);
                var += (d * se[j]).powi(2);
            }
            _ => return Ok(fallback),
        }
    }
    Ok(Extrapolation {
        limit,
        stderr: var.sqrt(),
        exponent: Some(q),
        method: ExtrapolationMethod::PowerFit,
    })
}

//! Finite-difference commutator oracle for the Lie bracket report.
//!
//! The frame is written out here independently of the core crate, so the
//! comparison checks the analytic bracket against first principles.

use plap_core::{Point, Polynomial, SpaceParams};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

const STEP: f64 = 1e-4;

/// t-coefficient of the horizontal field with 0-based index `i`.
fn t_coefficient(params: &SpaceParams, i: usize, x: &[f64]) -> f64 {
    let n = params.n();
    let y: Vec<f64> = x.iter().zip(params.x0()).map(|(a, b)| a - b).collect();
    let sigma: f64 = y[..2 * n].iter().map(|v| v * v).sum();
    let lead = 2.0 * params.k() * params.c() * sigma.powf(params.k() - 1.0);
    if i < n {
        lead * y[i + n]
    } else {
        -lead * y[i - n]
    }
}

fn partial(x: &[f64], axis: usize, g: &dyn Fn(&[f64]) -> f64) -> f64 {
    let mut up = x.to_vec();
    let mut dn = x.to_vec();
    up[axis] += STEP;
    dn[axis] -= STEP;
    (g(&up) - g(&dn)) / (2.0 * STEP)
}

fn apply(params: &SpaceParams, i: usize, x: &[f64], g: &dyn Fn(&[f64]) -> f64) -> f64 {
    partial(x, i, g) + t_coefficient(params, i, x) * partial(x, x.len() - 1, g)
}

fn cubic(rng: &mut ChaCha8Rng, d: usize) -> Polynomial {
    let mut terms = Vec::new();
    for _ in 0..8 {
        let mut e = vec![0u32; d];
        let mut left = 3;
        while left > 0 {
            let take = rng.random_range(1..=left);
            e[rng.random_range(0..d)] += take;
            left -= take;
        }
        terms.push((rng.random_range(-1.0..1.0), e));
    }
    let mut e = vec![0u32; d];
    e[d - 1] = 1;
    terms.push((4.0, e));
    Polynomial::new(terms)
}

/// One random cubic per point, redrawn until `|∂φ/∂t| ≥ 1` there so the
/// bracket coefficient can be read off `[X_i, X_j]φ = λ ∂φ/∂t`.
pub fn cubics_for(points: &[Point], seed: u64) -> Vec<Polynomial> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    points
        .iter()
        .map(|pt| loop {
            let phi = cubic(&mut rng, pt.dim());
            let dt = partial(pt.coords(), pt.dim() - 1, &|z| phi.eval(z));
            if dt.abs() >= 1.0 {
                break phi;
            }
        })
        .collect()
}

/// `([X_i, X_j]φ)(P) / ∂φ/∂t(P)` by nested central differences.
pub fn commutator_coefficient(params: &SpaceParams, i: usize, j: usize, point: &Point, phi: &Polynomial) -> f64 {
    let f = |z: &[f64]| phi.eval(z);
    let xj = |z: &[f64]| apply(params, j, z, &f);
    let xi = |z: &[f64]| apply(params, i, z, &f);
    let x = point.coords();
    let comm = apply(params, i, x, &xj) - apply(params, j, x, &xi);
    comm / partial(x, x.len() - 1, &f)
}

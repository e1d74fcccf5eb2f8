//! Capacity of gauge annuli: closed form, radial minimizer and Monte Carlo.

mod common;

use common::*;
use plap_core::mc::within_sigma;
use plap_core::{
    closed_form_capacity, exponents, gauge, horizontal_gradient, mc_capacity, minimize_radial, p_laplacian,
    radial_energy, AnnulusPotential, Point, RadialProfile, SpaceParams,
};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// 1-D oracle: `Q ∫_r^R |η′|^p ρ^{Q−1} dρ` for the optimal profile, by
/// composite Simpson on a fine grid.
fn capacity_by_quadrature(params: &SpaceParams, p: f64, r: f64, big_r: f64) -> f64 {
    let q = params.homogeneous_dim();
    let slope = |rho: f64| match exponents(params, p).unwrap().alpha {
        Some(a) => a * rho.powf(a - 1.0) / (r.powf(a) - big_r.powf(a)),
        None => -1.0 / (rho * (big_r / r).ln()),
    };
    let f = |rho: f64| q * slope(rho).abs().powf(p) * rho.powf(q - 1.0);
    let n = 20_000;
    let h = (big_r - r) / n as f64;
    let mut acc = f(r) + f(big_r);
    for i in 1..n {
        acc += f(r + h * i as f64) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    acc * h / 3.0
}

fn cases() -> Vec<(&'static str, SpaceParams, f64)> {
    let mut out = Vec::new();
    for (name, params) in [("A", setup_a()), ("B", setup_b())] {
        let q = params.homogeneous_dim();
        for p in [2.0, 3.0, q, q + 2.0] {
            out.push((name, params.clone(), p));
        }
    }
    out
}

#[test]
fn closed_form_matches_quadrature() {
    for (name, params, p) in cases() {
        for (r, big_r) in [(1.0, 2.0), (0.3, 0.9), (0.5, 3.0)] {
            let c = closed_form_capacity(&params, p, r, big_r).unwrap().value;
            let o = capacity_by_quadrature(&params, p, r, big_r);
            assert!((c - o).abs() <= 1e-9 * o, "{name} p={p} ({r},{big_r}): {c} vs {o}");
        }
    }
    let a = closed_form_capacity(&setup_a(), 2.0, 1.0, 2.0).unwrap().value;
    assert!((a - 32.0 / 3.0).abs() < 1e-12);
}

#[test]
fn three_methods_agree() {
    for (name, params, p) in cases() {
        let closed = closed_form_capacity(&params, p, 1.0, 2.0).unwrap().value;
        let radial = minimize_radial(&params, p, 1.0, 2.0, 400).unwrap().energy;
        assert!(
            (radial - closed).abs() <= 0.005 * closed,
            "{name} p={p}: radial {radial} vs {closed}"
        );
        assert!(radial >= closed * (1.0 - 1e-12));
        let mc = mc_capacity(&params, p, 1.0, 2.0, 1_000_000, 41).unwrap();
        assert!(
            (mc.value - closed).abs() <= 3.0 * mc.stderr + 0.01 * closed,
            "{name} p={p}: mc {} ± {} vs {closed}",
            mc.value,
            mc.stderr
        );
        for (a, b) in [(closed, radial), (closed, mc.value), (radial, mc.value)] {
            assert!((a - b).abs() <= 0.02 * a.abs().max(b.abs()));
        }
    }
}

#[test]
fn capacity_is_monotone_in_the_annulus() {
    for (name, params, p) in cases() {
        let inner = [0.5, 0.8, 1.1];
        let outer = [1.5, 2.0, 3.0];
        let grid: Vec<Vec<f64>> = inner
            .iter()
            .map(|&r| {
                outer
                    .iter()
                    .map(|&big_r| closed_form_capacity(&params, p, r, big_r).unwrap().value)
                    .collect()
            })
            .collect();
        for i in 0..3 {
            for j in 0..3 {
                if i + 1 < 3 {
                    assert!(grid[i + 1][j] > grid[i][j], "{name} p={p}: not increasing in r");
                }
                if j + 1 < 3 {
                    assert!(grid[i][j + 1] < grid[i][j], "{name} p={p}: not decreasing in R");
                }
            }
        }
    }
}

#[test]
fn perturbed_profiles_cost_more() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xca9);
    for (name, params, p) in cases() {
        let cap = closed_form_capacity(&params, p, 1.0, 2.0).unwrap().value;
        let alpha = exponents(&params, p).unwrap().alpha;
        let eta = move |rho: f64| match alpha {
            Some(a) => (rho.powf(a) - 2f64.powf(a)) / (1.0 - 2f64.powf(a)),
            None => (2.0 / rho).ln() / 2f64.ln(),
        };
        for _ in 0..20 {
            let amp = rng.random_range(-0.2..0.2);
            let freq = rng.random_range(1..6) as f64;
            let prof = RadialProfile::sampled(1.0, 2.0, 400, |rho| {
                eta(rho) + amp * (std::f64::consts::PI * freq * (rho - 1.0)).sin()
            })
            .unwrap();
            let e = radial_energy(&params, p, &prof, 1.0);
            assert!(e >= cap * (1.0 - 1e-12), "{name} p={p}: {e} < {cap}");
        }
    }
}

#[test]
fn potential_is_p_harmonic_in_the_annulus() {
    for (name, params) in setups() {
        let q = params.homogeneous_dim();
        for p in [1.5, 2.0, 3.0, q, q + 2.0] {
            let u = AnnulusPotential::new(&params, p, 0.4, 1.4).unwrap();
            let pts: Vec<Point> = regular_points(&params, 3000, 51)
                .into_iter()
                .filter(|pt| {
                    let psi = gauge(&params, pt).unwrap().psi;
                    psi > 0.4 && psi < 1.4
                })
                .take(100)
                .collect();
            assert_eq!(pts.len(), 100);
            for pt in &pts {
                let lap = p_laplacian(&params, &u, pt, p).unwrap();
                let psi = gauge(&params, pt).unwrap().psi;
                let n = horizontal_gradient(&params, &u, pt).unwrap().norm();
                let scale = 1.0 + n.powf(p - 1.0) / psi;
                assert!(lap.abs() <= 1e-8 * scale, "{name} p={p}: {lap}");
            }
        }
    }
}

#[test]
fn mc_capacity_is_consistent_across_seeds() {
    let params = setup_a();
    let a = mc_capacity(&params, 3.0, 1.0, 2.0, 200_000, 1).unwrap();
    let b = mc_capacity(&params, 3.0, 1.0, 2.0, 200_000, 2).unwrap();
    assert_ne!(a.value, b.value);
    assert!(within_sigma(a.value, b.value, a.stderr.hypot(b.stderr), 4.0));
}

#[test]
fn minimizer_converges_below_p_two() {
    for (name, params) in setups() {
        for p in [1.2, 1.5, 1.8] {
            let closed = closed_form_capacity(&params, p, 1.0, 2.0).unwrap().value;
            let m = minimize_radial(&params, p, 1.0, 2.0, 400).unwrap();
            assert!(
                (m.energy - closed).abs() <= 0.005 * closed,
                "{name} p={p}: {} vs {closed}",
                m.energy
            );
        }
    }
}

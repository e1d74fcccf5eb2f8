#![allow(dead_code)]

use plap_core::mc::{uniform_points, SampleBox};
use plap_core::{gauge, Jet, Point, ScalarField, SpaceParams};

pub fn setup_a() -> SpaceParams {
    SpaceParams::at_origin(1, 1.0, 1.0).unwrap()
}

pub fn setup_b() -> SpaceParams {
    SpaceParams::at_origin(1, 2.0, 1.0).unwrap()
}

/// n = 2, k = 3/2, c = −2 with a base point off the origin.
pub fn setup_c() -> SpaceParams {
    SpaceParams::new(2, 1.5, -2.0, vec![0.3, -0.2, 0.1, 0.4, -0.5]).unwrap()
}

pub fn setups() -> Vec<(&'static str, SpaceParams)> {
    vec![("A", setup_a()), ("B", setup_b()), ("C", setup_c())]
}

/// `count` deterministic points around x0 with ψ ≥ 0.2 and Σ ≥ 1e−3.
pub fn regular_points(params: &SpaceParams, count: usize, seed: u64) -> Vec<Point> {
    let bx = SampleBox::new(params.x0().to_vec(), vec![1.5; params.dim()]);
    let mut out = Vec::with_capacity(count);
    let mut batch = 0;
    while out.len() < count {
        for x in uniform_points(&bx, 4 * count as u64, seed.wrapping_add(batch)) {
            let pt = Point::new(x);
            let g = gauge(params, &pt).unwrap();
            if g.psi >= 0.2 && g.sigma >= 1e-3 && out.len() < count {
                out.push(pt);
            }
        }
        batch += 1;
    }
    out
}

pub fn shifted(pt: &Point, axis: usize, by: f64) -> Point {
    let mut x = pt.coords().to_vec();
    x[axis] += by;
    Point::new(x)
}

pub fn step(pt: &Point) -> f64 {
    let s = pt.coords().iter().fold(1.0, |m: f64, v| m.max(v.abs()));
    1e-5 * s
}

/// Central-difference gradient of the field value.
pub fn fd_gradient(field: &dyn ScalarField, params: &SpaceParams, pt: &Point) -> Vec<f64> {
    let h = step(pt);
    (0..pt.dim())
        .map(|a| {
            let up = field.jet1(params, &shifted(pt, a, h)).unwrap().value();
            let dn = field.jet1(params, &shifted(pt, a, -h)).unwrap().value();
            (up - dn) / (2.0 * h)
        })
        .collect()
}

/// Central differences of the exact gradient; row-major.
pub fn fd_hessian(field: &dyn ScalarField, params: &SpaceParams, pt: &Point) -> Vec<f64> {
    let h = step(pt);
    let d = pt.dim();
    let mut out = vec![0.0; d * d];
    for a in 0..d {
        let up = field.jet1(params, &shifted(pt, a, h)).unwrap().grad().to_vec();
        let dn = field.jet1(params, &shifted(pt, a, -h)).unwrap().grad().to_vec();
        for b in 0..d {
            out[a * d + b] = (up[b] - dn[b]) / (2.0 * h);
        }
    }
    out
}

pub fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m: f64, x| m.max(x.abs()))
}

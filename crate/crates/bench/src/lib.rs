//! Shared fixtures for the criterion benchmarks.

use plap_core::{Point, SpaceParams};

/// (label, params, a regular evaluation point).
pub fn fixtures() -> Vec<(&'static str, SpaceParams, Point)> {
    vec![
        (
            "n1-k1",
            SpaceParams::at_origin(1, 1.0, 1.0).unwrap(),
            Point::from([0.7, -0.4, 0.3]),
        ),
        (
            "n1-k2",
            SpaceParams::at_origin(1, 2.0, 1.0).unwrap(),
            Point::from([1.0, 2.0, 5.0]),
        ),
        (
            "n2-k1.5",
            SpaceParams::new(2, 1.5, -2.0, vec![0.3, -0.2, 0.1, 0.4, -0.5]).unwrap(),
            Point::from([0.9, 0.1, -0.6, 0.2, 0.8]),
        ),
    ]
}

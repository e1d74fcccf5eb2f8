//! Space parameters, the gauge `h`/`ψ`, derived exponents and the
//! fundamental-solution profiles.
//!
//! Coordinates are `(x_1, …, x_{2n}, t)` with the distinguished point
//! `x0 = (a_1, …, a_{2n}, s)`. Writing `Σ = Σ_l (x_l − a_l)²` and
//! `τ = t − s`, the gauge is
//!
//! ```text
//! h = c² Σ^{2k} + τ²,    ψ = h^{1/(4k)}
//! ```
//!
//! and the fundamental solution is `ψ^α` (or `log ψ` when `p = Q`).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance used to decide that `p` coincides with `Q`.
pub const LOG_CASE_RTOL: f64 = 1e-12;

/// `Σ^q` for `Σ ≥ 0`, with `0^q := 0` for `q > 0` and `0^0 := 1`.
pub fn sigma_pow(sigma: f64, q: f64) -> f64 {
    if sigma == 0.0 {
        if q == 0.0 {
            1.0
        } else if q > 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        (q * sigma.ln()).exp()
    }
}

/// The environment fixing the vector fields and the gauge.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpaceParams {
    n: usize,
    k: f64,
    c: f64,
    x0: Vec<f64>,
}

impl SpaceParams {
    pub fn new(n: usize, k: f64, c: f64, x0: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParams("n must be at least 1".into()));
        }
        if !(k.is_finite() && k > 0.0) {
            return Err(Error::InvalidParams(format!("k must be positive, got {k}")));
        }
        if !c.is_finite() || c == 0.0 {
            return Err(Error::InvalidParams(format!("c must be finite and nonzero, got {c}")));
        }
        if x0.len() != 2 * n + 1 {
            return Err(Error::DimensionMismatch {
                expected: 2 * n + 1,
                got: x0.len(),
            });
        }
        if x0.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParams("base point must be finite".into()));
        }
        Ok(Self { n, k, c, x0 })
    }

    /// Parameters with the base point at the origin.
    pub fn at_origin(n: usize, k: f64, c: f64) -> Result<Self> {
        Self::new(n, k, c, vec![0.0; 2 * n + 1])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn x0(&self) -> &[f64] {
        &self.x0
    }

    /// Ambient dimension `2n + 1`.
    pub fn dim(&self) -> usize {
        2 * self.n + 1
    }

    /// Number of horizontal fields, `2n`.
    pub fn horizontal_dim(&self) -> usize {
        2 * self.n
    }

    /// Homogeneous dimension `Q = 2n + 2k`.
    pub fn homogeneous_dim(&self) -> f64 {
        2.0 * self.n as f64 + 2.0 * self.k
    }

    /// Whether `p` is treated as the log case `p = Q`.
    pub fn is_log_case(&self, p: f64) -> bool {
        let q = self.homogeneous_dim();
        (p - q).abs() <= LOG_CASE_RTOL * q.max(1.0)
    }

    pub(crate) fn check_point(&self, point: &Point) -> Result<()> {
        if point.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: point.dim(),
            });
        }
        Ok(())
    }

    /// Offsets `x_l − a_l` for `l = 1..=2n` and `τ = t − s`.
    pub fn offsets(&self, point: &Point) -> Result<(Vec<f64>, f64)> {
        self.check_point(point)?;
        let m = self.horizontal_dim();
        let y = (0..m).map(|l| point[l] - self.x0[l]).collect();
        Ok((y, point[m] - self.x0[m]))
    }
}

/// A point `(x_1, …, x_{2n}, t)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Self {
        Self(coords)
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// The last coordinate.
    pub fn t(&self) -> f64 {
        self.0[self.0.len() - 1]
    }
}

impl From<Vec<f64>> for Point {
    fn from(v: Vec<f64>) -> Self {
        Self(v)
    }
}

impl<const N: usize> From<[f64; N]> for Point {
    fn from(v: [f64; N]) -> Self {
        Self(v.to_vec())
    }
}

impl std::ops::Index<usize> for Point {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// Constants derived from `p` for a fixed space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Exponents {
    pub p: f64,
    pub q: f64,
    /// `w = (Q − p)/((1 − p)·4k)`; `None` in the log case.
    pub w: Option<f64>,
    /// `α = (Q − p)/(1 − p)`; `None` in the log case.
    pub alpha: Option<f64>,
}

impl Exponents {
    pub fn is_log_case(&self) -> bool {
        self.alpha.is_none()
    }
}

/// `Σ`, `h` and `ψ` at a point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaugeValues {
    pub sigma: f64,
    pub h: f64,
    pub psi: f64,
}

pub fn gauge(params: &SpaceParams, point: &Point) -> Result<GaugeValues> {
    let (y, tau) = params.offsets(point)?;
    let sigma: f64 = y.iter().map(|v| v * v).sum();
    let c = params.c();
    let h = c * c * sigma_pow(sigma, 2.0 * params.k()) + tau * tau;
    let psi = if h == 0.0 {
        0.0
    } else {
        h.powf(1.0 / (4.0 * params.k()))
    };
    Ok(GaugeValues { sigma, h, psi })
}

/// The regularized gauge `h_ε = c²(Σ + ε²)^{2k} + τ²`.
pub fn gauge_regularized(params: &SpaceParams, point: &Point, eps: f64) -> Result<f64> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::domain(
            "gauge_regularized",
            format!("eps must be positive, got {eps}"),
        ));
    }
    let (y, tau) = params.offsets(point)?;
    let sigma: f64 = y.iter().map(|v| v * v).sum();
    let c = params.c();
    Ok(c * c * (sigma + eps * eps).powf(2.0 * params.k()) + tau * tau)
}

pub fn exponents(params: &SpaceParams, p: f64) -> Result<Exponents> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::domain("exponents", format!("p must lie in (1, ∞), got {p}")));
    }
    let q = params.homogeneous_dim();
    if params.is_log_case(p) {
        return Ok(Exponents {
            p,
            q,
            w: None,
            alpha: None,
        });
    }
    let alpha = (q - p) / (1.0 - p);
    Ok(Exponents {
        p,
        q,
        w: Some(alpha / (4.0 * params.k())),
        alpha: Some(alpha),
    })
}

/// `ψ^α` for `p ≠ Q`, `log ψ` for `p = Q`.
pub fn fundamental_profile(params: &SpaceParams, point: &Point, p: f64) -> Result<f64> {
    let ex = exponents(params, p)?;
    if point.coords() == params.x0() {
        return Err(Error::Singular("fundamental profile at x0".into()));
    }
    let g = gauge(params, point)?;
    Ok(match ex.alpha {
        Some(alpha) => g.psi.powf(alpha),
        None => g.psi.ln(),
    })
}

/// Normalizing constant for the fundamental solution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Normalization {
    /// `C₁ = α⁻¹ (Qσ_p)^{1/(1−p)}`, multiplies `ψ^α`.
    Power(f64),
    /// `C₂ = (Qσ_Q)^{1/(1−Q)}`, multiplies `log ψ`.
    Log(f64),
}

impl Normalization {
    pub fn value(&self) -> f64 {
        match *self {
            Normalization::Power(v) | Normalization::Log(v) => v,
        }
    }
}

pub fn normalization(params: &SpaceParams, p: f64, sigma_p: f64) -> Result<Normalization> {
    if !(sigma_p > 0.0 && sigma_p.is_finite()) {
        return Err(Error::domain(
            "normalization",
            format!("sigma_p must be positive, got {sigma_p}"),
        ));
    }
    let ex = exponents(params, p)?;
    let q_sigma = ex.q * sigma_p;
    Ok(match ex.alpha {
        Some(alpha) => Normalization::Power(power_constant(alpha, q_sigma, p)),
        None => Normalization::Log(q_sigma.powf(1.0 / (1.0 - p))),
    })
}

fn power_constant(alpha: f64, q_sigma: f64, p: f64) -> f64 {
    q_sigma.powf(1.0 / (1.0 - p)) / alpha
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup_a() -> SpaceParams {
        SpaceParams::at_origin(1, 1.0, 1.0).unwrap()
    }

    fn setup_b() -> SpaceParams {
        SpaceParams::at_origin(1, 2.0, 1.0).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + b.abs())
    }

    #[test]
    fn rejects_bad_params() {
        assert!(SpaceParams::at_origin(0, 1.0, 1.0).is_err());
        assert!(SpaceParams::at_origin(1, 0.0, 1.0).is_err());
        assert!(SpaceParams::at_origin(1, -1.0, 1.0).is_err());
        assert!(SpaceParams::at_origin(1, 1.0, 0.0).is_err());
        assert!(matches!(
            SpaceParams::new(1, 1.0, 1.0, vec![0.0; 4]),
            Err(Error::DimensionMismatch { expected: 3, got: 4 })
        ));
    }

    #[test]
    fn gauge_examples() {
        let g = gauge(&setup_a(), &Point::from([0.0, 0.0, 0.0])).unwrap();
        assert_eq!((g.sigma, g.h, g.psi), (0.0, 0.0, 0.0));

        let g = gauge(&setup_a(), &Point::from([1.0, 1.0, 2.0])).unwrap();
        assert_eq!(g.sigma, 2.0);
        assert!(close(g.h, 8.0, 1e-15));
        assert!(close(g.psi, 1.681_792_830_507_429, 1e-14));

        let g = gauge(&setup_b(), &Point::from([1.0, 0.0, 0.0])).unwrap();
        assert_eq!(g.sigma, 1.0);
        assert!(close(g.h, 1.0, 1e-15));
        assert!(close(g.psi, 1.0, 1e-15));
    }

    #[test]
    fn gauge_dimension_mismatch() {
        assert!(matches!(
            gauge(&setup_a(), &Point::from([1.0, 2.0])),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn regularized_gauge_examples() {
        let x0 = Point::from([0.0, 0.0, 0.0]);
        assert!(close(gauge_regularized(&setup_a(), &x0, 1.0).unwrap(), 1.0, 1e-15));
        assert!(close(
            gauge_regularized(&setup_b(), &x0, 0.5).unwrap(),
            0.003_906_25,
            1e-15
        ));
        let p = Point::from([1.0, 1.0, 2.0]);
        assert!(close(gauge_regularized(&setup_a(), &p, 1e-9).unwrap(), 8.0, 1e-12));
        assert!(gauge_regularized(&setup_a(), &p, 0.0).is_err());
        assert!(gauge_regularized(&setup_a(), &p, -1.0).is_err());
    }

    #[test]
    fn exponent_examples() {
        let e = exponents(&setup_a(), 2.0).unwrap();
        assert_eq!((e.q, e.alpha, e.w), (4.0, Some(-2.0), Some(-0.5)));
        let e = exponents(&setup_b(), 2.0).unwrap();
        assert_eq!((e.q, e.alpha, e.w), (6.0, Some(-4.0), Some(-0.5)));
        let e = exponents(&setup_a(), 4.0).unwrap();
        assert!(e.is_log_case());
        assert!(exponents(&setup_a(), 1.0).is_err());
        assert!(exponents(&setup_a(), 0.5).is_err());
    }

    #[test]
    fn profile_examples() {
        let p = Point::from([1.0, 1.0, 2.0]);
        let a = setup_a();
        assert!(close(
            fundamental_profile(&a, &p, 2.0).unwrap(),
            0.353_553_390_593_273_8,
            1e-14
        ));
        assert!(close(
            fundamental_profile(&a, &p, 3.0).unwrap(),
            8f64.powf(-0.125),
            1e-14
        ));
        assert!(close(
            fundamental_profile(&a, &p, 3.0).unwrap(),
            0.771_105_412_703_970_4,
            1e-14
        ));
        assert!(close(
            fundamental_profile(&a, &p, 4.0).unwrap(),
            0.519_860_385_419_959,
            1e-14
        ));
        assert!(matches!(
            fundamental_profile(&a, &Point::from([0.0, 0.0, 0.0]), 2.0),
            Err(Error::Singular(_))
        ));
    }

    #[test]
    fn normalization_examples() {
        let a = setup_a();
        assert_eq!(normalization(&a, 2.0, 1.0).unwrap(), Normalization::Power(-0.125));
        let c2 = normalization(&a, 4.0, 1.0).unwrap();
        assert!(matches!(c2, Normalization::Log(_)));
        assert!(close(c2.value(), 0.629_960_524_947_436_6, 1e-14));
        assert!(normalization(&a, 2.0, 0.0).is_err());
        assert!(normalization(&a, 2.0, -1.0).is_err());
        assert_eq!(power_constant(1.0, 1.0, 2.5), 1.0);
    }

    #[test]
    fn log_case_detection() {
        let a = setup_a();
        assert!(a.is_log_case(4.0));
        assert!(a.is_log_case(4.0 + 1e-13));
        assert!(!a.is_log_case(4.0 + 1e-9));
    }
}

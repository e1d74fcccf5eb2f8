//! Scalar fields on `R^{2n+1}` that can be evaluated to a jet.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{exponents, Point, SpaceParams};
use crate::jet::{Jet, Jet1, Jet2};

/// Tag identifying how a field is built.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FieldKind {
    GaugeH,
    GaugePsi,
    ProfilePower,
    ProfileLog,
    Polynomial,
    TestBump,
    UserComposite,
}

/// A map `Point → Jet`.
///
/// `jet1` defaults to truncating `jet2`; fields with a cheaper first-order
/// path override it.
pub trait ScalarField: Send + Sync {
    fn kind(&self) -> FieldKind;

    fn jet2(&self, params: &SpaceParams, point: &Point) -> Result<Jet2>;

    fn jet1(&self, params: &SpaceParams, point: &Point) -> Result<Jet1> {
        Ok(self.jet2(params, point)?.to_jet1())
    }
}

/// Second-order jet of `field` at `point`.
pub fn jet_of(field: &dyn ScalarField, params: &SpaceParams, point: &Point) -> Result<Jet2> {
    params.check_point(point)?;
    field.jet2(params, point)
}

/// Coordinate jets `y_l = x_l − a_l` and `τ = t − s`.
pub(crate) fn offset_jets<J: Jet>(params: &SpaceParams, point: &Point) -> Result<(Vec<J>, J)> {
    let (y, tau) = params.offsets(point)?;
    let d = params.dim();
    let ys = y.iter().enumerate().map(|(l, &v)| J::variable(v, l, d)).collect();
    Ok((ys, J::variable(tau, d - 1, d)))
}

pub(crate) fn sigma_jet<J: Jet>(ys: &[J]) -> J {
    let mut it = ys.iter();
    let first = it.next().expect("at least one horizontal coordinate");
    it.fold(first.mul(first), |acc, y| acc.add(&y.mul(y)))
}

/// `Σ^q`, with the jet at `Σ = 0` taken as the limit along `Σ → 0⁺`.
///
/// `Σ^q` is `C²` at the origin only for `q ≥ 1` (for `q > 1` the whole jet
/// vanishes, for `q = 1` it is `Σ` itself).
pub(crate) fn sigma_power_jet<J: Jet>(sigma: &J, q: f64) -> Result<J> {
    if q == 0.0 {
        return Ok(J::constant(1.0, sigma.dim()));
    }
    let s = sigma.value();
    if s > 0.0 {
        let v = (q * s.ln()).exp();
        return Ok(sigma.compose(v, q * v / s, q * (q - 1.0) * v / (s * s)));
    }
    if q == 1.0 {
        Ok(sigma.clone())
    } else if q > 1.0 {
        Ok(sigma.compose(0.0, 0.0, 0.0))
    } else {
        Err(Error::Degenerate(format!("Σ^{q} is not twice differentiable on Σ = 0")))
    }
}

pub(crate) fn h_jet<J: Jet>(params: &SpaceParams, point: &Point) -> Result<J> {
    let (ys, tau) = offset_jets::<J>(params, point)?;
    let sigma = sigma_jet(&ys);
    let c = params.c();
    Ok(sigma_power_jet(&sigma, 2.0 * params.k())?
        .scale(c * c)
        .add(&tau.mul(&tau)))
}

fn positive_h<J: Jet>(params: &SpaceParams, point: &Point) -> Result<J> {
    let h = h_jet::<J>(params, point)?;
    if h.value() <= 0.0 {
        return Err(Error::Singular("gauge vanishes at x0".into()));
    }
    Ok(h)
}

/// The gauge `h`, `ψ` and the fundamental-solution profiles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum GaugeField {
    H,
    Psi,
    /// `ψ^α`.
    Power {
        alpha: f64,
    },
    /// `log ψ`.
    Log,
}

impl GaugeField {
    /// `ψ^α` for `p ≠ Q`, `log ψ` for `p = Q`.
    pub fn fundamental(params: &SpaceParams, p: f64) -> Result<Self> {
        Ok(match exponents(params, p)?.alpha {
            Some(alpha) => GaugeField::Power { alpha },
            None => GaugeField::Log,
        })
    }

    pub(crate) fn eval_jet<J: Jet>(&self, params: &SpaceParams, point: &Point) -> Result<J> {
        let four_k = 4.0 * params.k();
        match *self {
            GaugeField::H => h_jet(params, point),
            GaugeField::Psi => positive_h::<J>(params, point)?.powf(1.0 / four_k),
            GaugeField::Power { alpha } => positive_h::<J>(params, point)?.powf(alpha / four_k),
            GaugeField::Log => Ok(positive_h::<J>(params, point)?.ln()?.scale(1.0 / four_k)),
        }
    }
}

impl ScalarField for GaugeField {
    fn kind(&self) -> FieldKind {
        match self {
            GaugeField::H => FieldKind::GaugeH,
            GaugeField::Psi => FieldKind::GaugePsi,
            GaugeField::Power { .. } => FieldKind::ProfilePower,
            GaugeField::Log => FieldKind::ProfileLog,
        }
    }

    fn jet2(&self, params: &SpaceParams, point: &Point) -> Result<Jet2> {
        self.eval_jet(params, point)
    }

    fn jet1(&self, params: &SpaceParams, point: &Point) -> Result<Jet1> {
        self.eval_jet(params, point)
    }
}

/// `factor · inner`.
#[derive(Debug, Clone, PartialEq)]
pub struct Scaled<F> {
    pub factor: f64,
    pub inner: F,
}

impl<F: ScalarField> ScalarField for Scaled<F> {
    fn kind(&self) -> FieldKind {
        self.inner.kind()
    }

    fn jet2(&self, params: &SpaceParams, point: &Point) -> Result<Jet2> {
        Ok(self.inner.jet2(params, point)?.scale(self.factor))
    }

    fn jet1(&self, params: &SpaceParams, point: &Point) -> Result<Jet1> {
        Ok(self.inner.jet1(params, point)?.scale(self.factor))
    }
}

/// A polynomial in the absolute coordinates `(x_1, …, x_{2n}, t)`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Polynomial {
    terms: Vec<(f64, Vec<u32>)>,
}

impl Polynomial {
    /// Each term is `(coefficient, exponents)` with one exponent per coordinate.
    pub fn new(terms: Vec<(f64, Vec<u32>)>) -> Self {
        Self { terms }
    }

    pub fn constant(value: f64, dim: usize) -> Self {
        Self::new(vec![(value, vec![0; dim])])
    }

    /// The coordinate function `x_index` (0-based; `dim − 1` is `t`).
    pub fn coordinate(index: usize, dim: usize) -> Self {
        Self::monomial(1.0, index, 1, dim)
    }

    pub fn monomial(coef: f64, index: usize, power: u32, dim: usize) -> Self {
        let mut e = vec![0; dim];
        e[index] = power;
        Self::new(vec![(coef, e)])
    }

    pub fn terms(&self) -> &[(f64, Vec<u32>)] {
        &self.terms
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(c, e)| c * e.iter().zip(x).map(|(&p, v)| v.powi(p as i32)).product::<f64>())
            .sum()
    }

    fn eval_jet<J: Jet>(&self, point: &Point) -> Result<J> {
        let d = point.dim();
        let vars: Vec<J> = (0..d).map(|i| J::variable(point[i], i, d)).collect();
        let mut acc = J::constant(0.0, d);
        for (coef, exps) in &self.terms {
            if exps.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: exps.len(),
                });
            }
            let mut term = J::constant(*coef, d);
            for (v, &e) in vars.iter().zip(exps) {
                if e > 0 {
                    term = term.mul(&v.powf(e as f64)?);
                }
            }
            acc = acc.add(&term);
        }
        Ok(acc)
    }
}

impl ScalarField for Polynomial {
    fn kind(&self) -> FieldKind {
        FieldKind::Polynomial
    }

    fn jet2(&self, params: &SpaceParams, point: &Point) -> Result<Jet2> {
        params.check_point(point)?;
        self.eval_jet(point)
    }

    fn jet1(&self, params: &SpaceParams, point: &Point) -> Result<Jet1> {
        params.check_point(point)?;
        self.eval_jet(point)
    }
}

/// A field assembled by a closure from the coordinate jets.
pub struct Composite<F> {
    build: F,
}

impl<F> Composite<F>
where
    F: Fn(&SpaceParams, &[Jet2]) -> Result<Jet2> + Send + Sync,
{
    pub fn new(build: F) -> Self {
        Self { build }
    }
}

impl<F> fmt::Debug for Composite<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("Composite")
    }
}

impl<F> ScalarField for Composite<F>
where
    F: Fn(&SpaceParams, &[Jet2]) -> Result<Jet2> + Send + Sync,
{
    fn kind(&self) -> FieldKind {
        FieldKind::UserComposite
    }

    fn jet2(&self, params: &SpaceParams, point: &Point) -> Result<Jet2> {
        params.check_point(point)?;
        let d = point.dim();
        let vars: Vec<Jet2> = (0..d).map(|i| Jet2::variable(point[i], i, d)).collect();
        (self.build)(params, &vars)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup_a() -> SpaceParams {
        SpaceParams::at_origin(1, 1.0, 1.0).unwrap()
    }

    #[test]
    fn h_jet_examples() {
        let a = setup_a();
        let j = jet_of(&GaugeField::H, &a, &Point::from([1.0, 1.0, 2.0])).unwrap();
        assert_eq!(j.value(), 8.0);
        assert_eq!(j.grad()[2], 4.0);
        // ∂h/∂x1 = 4 Σ x1 = 8
        assert_eq!(j.grad()[0], 8.0);

        let j = jet_of(&GaugeField::H, &a, &Point::from([0.0, 0.0, 0.0])).unwrap();
        assert_eq!(j.value(), 0.0);
        assert!(j.grad().iter().all(|&g| g == 0.0));
        // h = (x1² + x2²)² + t² has Hessian diag(0, 0, 2) at the origin
        assert_eq!(j.hess(), &[0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 2.0]);
    }

    #[test]
    fn psi_jet_example() {
        let j = jet_of(&GaugeField::Psi, &setup_a(), &Point::from([1.0, 0.0, 0.0])).unwrap();
        assert!((j.value() - 1.0).abs() < 1e-15);
        assert!((j.grad()[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn singular_fields_at_x0() {
        let a = setup_a();
        let x0 = Point::from([0.0, 0.0, 0.0]);
        for f in [GaugeField::Psi, GaugeField::Power { alpha: -2.0 }, GaugeField::Log] {
            assert!(matches!(jet_of(&f, &a, &x0), Err(Error::Singular(_))));
        }
    }

    #[test]
    fn t_axis_is_regular_for_k_at_least_half() {
        // Σ = 0 with t ≠ s: h = t² is smooth
        let b = SpaceParams::at_origin(1, 2.0, 1.0).unwrap();
        let j = jet_of(&GaugeField::Psi, &b, &Point::from([0.0, 0.0, 1.0])).unwrap();
        assert!((j.value() - 1.0).abs() < 1e-15);
        let k_small = SpaceParams::at_origin(1, 0.25, 1.0).unwrap();
        assert!(matches!(
            jet_of(&GaugeField::H, &k_small, &Point::from([0.0, 0.0, 1.0])),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn polynomial_jet() {
        // x1² x3 + 2 at (1, 2, 3)
        let p = Polynomial::new(vec![(1.0, vec![2, 0, 1]), (2.0, vec![0, 0, 0])]);
        let j = p.jet2(&setup_a(), &Point::from([1.0, 2.0, 3.0])).unwrap();
        assert_eq!(j.value(), 5.0);
        assert_eq!(j.grad(), &[6.0, 0.0, 1.0]);
        assert_eq!(j.hess(), &[6.0, 0.0, 2.0, 0.0, 0.0, 0.0, 2.0, 0.0, 0.0]);
        assert_eq!(p.eval(&[1.0, 2.0, 3.0]), 5.0);
    }

    #[test]
    fn composite_field() {
        let f = Composite::new(|_: &SpaceParams, v: &[Jet2]| Ok(v[0].mul(&v[2]).exp()));
        let j = f.jet2(&setup_a(), &Point::from([1.0, 5.0, 0.0])).unwrap();
        assert_eq!(f.kind(), FieldKind::UserComposite);
        assert_eq!(j.value(), 1.0);
        assert_eq!(j.grad(), &[0.0, 0.0, 1.0]);
    }

    #[test]
    fn fundamental_selects_log_case() {
        let a = setup_a();
        assert_eq!(GaugeField::fundamental(&a, 4.0).unwrap(), GaugeField::Log);
        assert_eq!(
            GaugeField::fundamental(&a, 2.0).unwrap(),
            GaugeField::Power { alpha: -2.0 }
        );
    }
}

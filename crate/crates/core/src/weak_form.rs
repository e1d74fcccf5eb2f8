//! Distributional check of `Δ_p(C ψ^α) = δ_{x0}` (and the `p = Q` log case).
//!
//! For a test function `φ` supported in `B_R`, the annulus pairing
//!
//! ```text
//! ∫_{r<ψ<R} ‖∇₀u‖^{p−2} ⟨∇₀u, ∇₀φ⟩ dL
//! ```
//!
//! tends to `−φ(x0)` as `r → 0` when `u` is the normalized fundamental
//! solution.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extrapolate::{extrapolate_to_zero, Extrapolation};
use crate::fields::{h_jet, FieldKind, GaugeField, ScalarField};
use crate::geometry::{exponents, normalization, Point, SpaceParams};
use crate::horizontal::Frame;
use crate::jet::{Jet, Jet1, Jet2};
use crate::mc::{derive_seed, integrate, MCEstimate};
use crate::measure::{sigma_p, BallSpec, SIGMA_SEED_TAG};

/// `amplitude · exp(−h/(R₀^{4k} − h))` on `h < R₀^{4k}`, zero outside.
///
/// Built from `h` rather than `ψ` so it is smooth through `x0`, where it
/// takes the value `amplitude`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestBump {
    pub support_radius: f64,
    pub amplitude: f64,
}

impl TestBump {
    pub fn new(support_radius: f64) -> Result<Self> {
        Self::with_amplitude(support_radius, 1.0)
    }

    pub fn with_amplitude(support_radius: f64, amplitude: f64) -> Result<Self> {
        if !(support_radius > 0.0 && support_radius.is_finite()) {
            return Err(Error::domain(
                "test_bump",
                format!("support radius must be positive, got {support_radius}"),
            ));
        }
        Ok(Self {
            support_radius,
            amplitude,
        })
    }

    fn eval<J: Jet>(&self, params: &SpaceParams, point: &Point) -> Result<J> {
        let h = h_jet::<J>(params, point)?;
        let cap = self.support_radius.powf(4.0 * params.k());
        let v = h.value();
        if v >= cap {
            return Ok(J::constant(0.0, params.dim()));
        }
        // g(h) = −h/(cap − h): g' = −cap/(cap − h)², g'' = −2cap/(cap − h)³
        let gap = cap - v;
        let g = h.compose(-v / gap, -cap / (gap * gap), -2.0 * cap / (gap * gap * gap));
        Ok(g.exp().scale(self.amplitude))
    }
}

/// A test function with known support and central value.
pub trait TestFunction: ScalarField {
    /// `φ` vanishes outside `B_{support_radius}`.
    fn support_radius(&self) -> f64;

    /// `φ(x0)`.
    fn center_value(&self) -> f64;
}

impl ScalarField for TestBump {
    fn kind(&self) -> FieldKind {
        FieldKind::TestBump
    }

    fn jet2(&self, params: &SpaceParams, point: &Point) -> Result<Jet2> {
        self.eval(params, point)
    }

    fn jet1(&self, params: &SpaceParams, point: &Point) -> Result<Jet1> {
        self.eval(params, point)
    }
}

impl TestFunction for TestBump {
    fn support_radius(&self) -> f64 {
        self.support_radius
    }

    fn center_value(&self) -> f64 {
        self.amplitude
    }
}

/// `Σ_j c_j φ_j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BumpCombination {
    pub terms: Vec<(f64, TestBump)>,
}

impl ScalarField for BumpCombination {
    fn kind(&self) -> FieldKind {
        FieldKind::TestBump
    }

    fn jet2(&self, params: &SpaceParams, point: &Point) -> Result<Jet2> {
        let mut acc = Jet2::constant(0.0, params.dim());
        for (c, b) in &self.terms {
            acc = acc.add(&b.eval::<Jet2>(params, point)?.scale(*c));
        }
        Ok(acc)
    }

    fn jet1(&self, params: &SpaceParams, point: &Point) -> Result<Jet1> {
        let mut acc = Jet1::constant(0.0, params.dim());
        for (c, b) in &self.terms {
            acc = acc.add(&b.eval::<Jet1>(params, point)?.scale(*c));
        }
        Ok(acc)
    }
}

impl TestFunction for BumpCombination {
    fn support_radius(&self) -> f64 {
        self.terms.iter().map(|(_, b)| b.support_radius).fold(0.0, f64::max)
    }

    fn center_value(&self) -> f64 {
        self.terms.iter().map(|(c, b)| c * b.amplitude).sum()
    }
}

/// The potential `u` in the pairing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PairingPotential {
    /// `ψ^α` (`p ≠ Q`).
    Power,
    /// `C₁ ψ^α` with `C₁` from the given `σ_p`.
    NormalizedPower { sigma_p: f64 },
    /// `log ψ` (`p = Q`).
    Log,
    /// `C₂ log ψ` with `C₂` from the given `σ_Q`.
    NormalizedLog { sigma_p: f64 },
}

impl PairingPotential {
    /// The normalized potential appropriate for `p`.
    pub fn normalized(params: &SpaceParams, p: f64, sigma_p: f64) -> Self {
        if params.is_log_case(p) {
            PairingPotential::NormalizedLog { sigma_p }
        } else {
            PairingPotential::NormalizedPower { sigma_p }
        }
    }

    /// `(field, scale)` with `u = scale · field`.
    fn resolve(&self, params: &SpaceParams, p: f64) -> Result<(GaugeField, f64)> {
        let ex = exponents(params, p)?;
        let unsupported = |what: &str| {
            Err(Error::domain(
                "weak_pairing",
                format!("{what} is not defined for p = {p} (Q = {})", ex.q),
            ))
        };
        match (*self, ex.alpha) {
            (PairingPotential::Power, Some(alpha)) => Ok((GaugeField::Power { alpha }, 1.0)),
            (PairingPotential::NormalizedPower { sigma_p }, Some(alpha)) => {
                Ok((GaugeField::Power { alpha }, normalization(params, p, sigma_p)?.value()))
            }
            (PairingPotential::Log, None) => Ok((GaugeField::Log, 1.0)),
            (PairingPotential::NormalizedLog { sigma_p }, None) => {
                Ok((GaugeField::Log, normalization(params, p, sigma_p)?.value()))
            }
            (PairingPotential::Power | PairingPotential::NormalizedPower { .. }, None) => unsupported("ψ^α"),
            (PairingPotential::Log | PairingPotential::NormalizedLog { .. }, Some(_)) => unsupported("log ψ"),
        }
    }
}

/// `‖∇₀u‖^{p−2} ⟨∇₀u, ∇₀φ⟩` at a point.
fn pairing_density(
    params: &SpaceParams,
    p: f64,
    field: GaugeField,
    scale: f64,
    phi: &dyn ScalarField,
    point: &Point,
) -> Option<f64> {
    let frame = Frame::at(params, point).ok()?;
    let du = frame.horizontal_gradient(field.jet1(params, point).ok()?.scale(scale).grad());
    let dphi = frame.horizontal_gradient(phi.jet1(params, point).ok()?.grad());
    let n2 = du.norm_squared();
    if n2 == 0.0 {
        return Some(0.0);
    }
    Some(n2.powf(0.5 * (p - 2.0)) * du.dot(&dphi))
}

/// `∫_{r<ψ<R} ‖∇₀u‖^{p−2} ⟨∇₀u, ∇₀φ⟩ dL`, sampled in the box of `B_R`.
#[allow(clippy::too_many_arguments)]
pub fn weak_pairing(
    params: &SpaceParams,
    p: f64,
    u: PairingPotential,
    phi: &dyn TestFunction,
    inner: f64,
    outer: f64,
    samples: u64,
    seed: u64,
) -> Result<MCEstimate> {
    if !(inner > 0.0 && inner < outer) {
        return Err(Error::domain(
            "weak_pairing",
            format!("need 0 < r < R, got r = {inner}, R = {outer}"),
        ));
    }
    if phi.support_radius() > outer {
        return Err(Error::domain(
            "weak_pairing",
            format!(
                "test function support radius {} exceeds R = {outer}",
                phi.support_radius()
            ),
        ));
    }
    let (field, scale) = u.resolve(params, p)?;
    let ball = BallSpec::new(params, outer)?;
    integrate(&ball.sample_box(params), samples, seed, |x| {
        let point = Point::new(x.to_vec());
        let Ok(g) = crate::geometry::gauge(params, &point) else {
            return 0.0;
        };
        if g.psi <= inner || g.psi >= outer {
            return 0.0;
        }
        pairing_density(params, p, field, scale, phi, &point).unwrap_or(0.0)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiracRow {
    pub inner_radius: f64,
    /// Pairing for the normalized potential.
    pub value: f64,
    /// Joint error of the pairing and the `σ_p` used to normalize.
    pub stderr: f64,
    /// The raw Monte Carlo pairing.
    pub pairing: MCEstimate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiracTable {
    pub p: f64,
    pub log_case: bool,
    pub sigma_p: MCEstimate,
    /// `C₁` or `C₂`.
    pub normalization: f64,
    pub rows: Vec<DiracRow>,
    pub limit: Extrapolation,
    /// `−φ(x0)`.
    pub expected: f64,
}

/// Pairings of the normalized fundamental solution against `φ` on annuli
/// `r < ψ < R₀` for each `r` in `radii`, with `R₀` the support radius of
/// `φ`, and their extrapolated `r → 0` limit.
pub fn dirac_limit(
    params: &SpaceParams,
    p: f64,
    phi: &dyn TestFunction,
    radii: &[f64],
    samples: u64,
    seed: u64,
) -> Result<DiracTable> {
    let outer = phi.support_radius();
    if radii.is_empty() || radii.windows(2).any(|w| !(w[0] > w[1])) {
        return Err(Error::domain(
            "dirac_limit",
            "radii must be non-empty and strictly decreasing",
        ));
    }
    if radii[0] >= outer {
        return Err(Error::domain(
            "dirac_limit",
            format!("radii must lie below the support radius {outer}"),
        ));
    }
    let sigma = sigma_p(params, p, samples, derive_seed(seed, SIGMA_SEED_TAG))?;
    let u = PairingPotential::normalized(params, p, sigma.mean);
    let norm = u.resolve(params, p)?.1;
    let rows = radii
        .iter()
        .enumerate()
        .map(|(i, &r)| {
            let est = weak_pairing(params, p, u, phi, r, outer, samples, derive_seed(seed, i as u64 + 1))?;
            // the normalized pairing scales as 1/σ_p
            let rel = est.relative_stderr().hypot(sigma.relative_stderr());
            Ok(DiracRow {
                inner_radius: r,
                value: est.mean,
                stderr: est.mean.abs() * rel,
                pairing: est,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let as_est: Vec<MCEstimate> = rows
        .iter()
        .map(|row| MCEstimate {
            mean: row.value,
            stderr: row.stderr,
            samples,
            seed,
        })
        .collect();
    Ok(DiracTable {
        p,
        log_case: params.is_log_case(p),
        sigma_p: sigma,
        normalization: norm,
        limit: extrapolate_to_zero(radii, &as_est)?,
        rows,
        expected: -phi.center_value(),
    })
}

/// `−|α|^{p−2} α Q σ_p φ(x0)` (or `−Qσ_Q φ(x0)` in the log case): the
/// `r → 0` limit of the pairing for the unnormalized potential.
pub fn unnormalized_limit(params: &SpaceParams, p: f64, sigma_p: f64, center_value: f64) -> Result<f64> {
    let ex = exponents(params, p)?;
    let a = ex.alpha.unwrap_or(1.0);
    Ok(-a.abs().powf(p - 2.0) * a * ex.q * sigma_p * center_value)
}

//! Monte Carlo estimates of the measure `d𝒱 = ‖∇₀ψ‖^p dL` on gauge balls,
//! its thin-shell surface counterpart `𝒮`, and the density limit at `x0`.
//!
//! Gauge balls `B_R = {ψ < R}` sit inside the anisotropic box
//! `|x_l − a_l| ≤ R |c|^{−1/(2k)}`, `|t − s| ≤ R^{2k}`, and the dilation
//! `(x − a, t − s) ↦ (λ(x − a), λ^{2k}(t − s))` maps `B_R` onto `B_{λR}`.
//! For `k ≥ 1/2` the density is bounded by `|c|^{p/(2k)}`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extrapolate::{extrapolate_to_zero, lagrange_weights_at_zero, Extrapolation};
use crate::fields::{GaugeField, ScalarField};
use crate::geometry::{Point, SpaceParams};
use crate::horizontal::Frame;
use crate::jet::Jet;
use crate::mc::{derive_seed, integrate, integrate_many, MCEstimate, SampleBox};

/// Shell half-widths, as fractions of `R`, used by the extrapolated shell integral.
pub const SHELL_WIDTHS: [f64; 3] = [0.1, 0.05, 0.025];

/// Default shell half-width as a fraction of `R`.
pub const DEFAULT_SHELL_WIDTH: f64 = 0.05;

/// The box enclosing a gauge ball.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallSpec {
    pub radius: f64,
    pub horizontal_half_width: f64,
    pub vertical_half_width: f64,
}

impl BallSpec {
    pub fn new(params: &SpaceParams, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::domain("ball", format!("radius must be positive, got {radius}")));
        }
        let k = params.k();
        Ok(Self {
            radius,
            horizontal_half_width: radius * params.c().abs().powf(-1.0 / (2.0 * k)),
            vertical_half_width: radius.powf(2.0 * k),
        })
    }

    pub fn sample_box(&self, params: &SpaceParams) -> SampleBox {
        let m = params.horizontal_dim();
        let mut hw = vec![self.horizontal_half_width; m];
        hw.push(self.vertical_half_width);
        SampleBox::new(params.x0().to_vec(), hw)
    }
}

/// `(ψ, ‖∇₀ψ‖^p)` at a point, via the first-order jet of `ψ`.
///
/// Returns `None` on the measure-zero sets where `ψ` or the frame has no
/// derivative (`x0`, and `Σ = 0` when `k < 1`).
pub fn gauge_density(params: &SpaceParams, p: f64, point: &Point) -> Option<(f64, f64)> {
    let jet = GaugeField::Psi.jet1(params, point).ok()?;
    let frame = Frame::at(params, point).ok()?;
    let g = frame.horizontal_gradient(jet.grad());
    Some((jet.value(), g.norm_squared().powf(0.5 * p)))
}

fn check_p(p: f64) -> Result<()> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::domain("measure", format!("p must lie in (1, ∞), got {p}")));
    }
    Ok(())
}

/// `𝒱(B_R) = ∫_{B_R} ‖∇₀ψ‖^p dL`.
pub fn ball_measure(params: &SpaceParams, p: f64, radius: f64, samples: u64, seed: u64) -> Result<MCEstimate> {
    check_p(p)?;
    let ball = BallSpec::new(params, radius)?;
    integrate(&ball.sample_box(params), samples, seed, |x| {
        match gauge_density(params, p, &Point::new(x.to_vec())) {
            Some((psi, w)) if psi < radius => w,
            _ => 0.0,
        }
    })
}

/// `σ_p = 𝒱(B_1)`.
pub fn sigma_p(params: &SpaceParams, p: f64, samples: u64, seed: u64) -> Result<MCEstimate> {
    ball_measure(params, p, 1.0, samples, seed)
}

/// Fraction of box samples that land in `B_R`.
pub fn acceptance_ratio(params: &SpaceParams, radius: f64, samples: u64, seed: u64) -> Result<MCEstimate> {
    let ball = BallSpec::new(params, radius)?;
    let bx = ball.sample_box(params);
    let vol = bx.volume();
    let est = integrate(&bx, samples, seed, |x| {
        let psi = crate::geometry::gauge(params, &Point::new(x.to_vec())).map(|g| g.psi);
        match psi {
            Ok(psi) if psi < radius => 1.0,
            _ => 0.0,
        }
    })?;
    Ok(est.scale(1.0 / vol))
}

fn check_shell(radius: f64, delta: f64) -> Result<()> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::domain(
            "shell_integral",
            format!("radius must be positive, got {radius}"),
        ));
    }
    if !(delta > 0.0 && delta < 0.5 * radius) {
        return Err(Error::domain(
            "shell_integral",
            format!("delta must lie in (0, R/2) = (0, {}), got {delta}", 0.5 * radius),
        ));
    }
    Ok(())
}

/// `∫_{∂B_R} φ d𝒮 ≈ (1/2δ) ∫_{R−δ<ψ<R+δ} φ ‖∇₀ψ‖^p dL`.
#[allow(clippy::too_many_arguments)]
pub fn shell_integral(
    params: &SpaceParams,
    p: f64,
    radius: f64,
    delta: f64,
    phi: &dyn ScalarField,
    samples: u64,
    seed: u64,
) -> Result<MCEstimate> {
    check_p(p)?;
    check_shell(radius, delta)?;
    let ball = BallSpec::new(params, radius + delta)?;
    integrate(&ball.sample_box(params), samples, seed, |x| {
        let point = Point::new(x.to_vec());
        match gauge_density(params, p, &point) {
            Some((psi, w)) if (psi - radius).abs() < delta => {
                phi.jet1(params, &point).map(|j| j.value()).unwrap_or(0.0) * w / (2.0 * delta)
            }
            _ => 0.0,
        }
    })
}

/// Shell integral extrapolated to zero width: the shells with half-widths
/// [`SHELL_WIDTHS`]`·R` share one set of samples and are combined per sample
/// with Lagrange weights in `δ²`, which cancels the `δ²` and `δ⁴` bias terms.
pub fn shell_integral_extrapolated(
    params: &SpaceParams,
    p: f64,
    radius: f64,
    phi: &dyn ScalarField,
    samples: u64,
    seed: u64,
) -> Result<MCEstimate> {
    check_p(p)?;
    let deltas: Vec<f64> = SHELL_WIDTHS.iter().map(|f| f * radius).collect();
    for &d in &deltas {
        check_shell(radius, d)?;
    }
    let sq: Vec<f64> = deltas.iter().map(|d| d * d).collect();
    let weights = lagrange_weights_at_zero(&sq);
    let ball = BallSpec::new(params, radius + deltas[0])?;
    integrate(&ball.sample_box(params), samples, seed, |x| {
        let point = Point::new(x.to_vec());
        let Some((psi, w)) = gauge_density(params, p, &point) else {
            return 0.0;
        };
        let gap = (psi - radius).abs();
        if gap >= deltas[0] {
            return 0.0;
        }
        let phi_v = phi.jet1(params, &point).map(|j| j.value()).unwrap_or(0.0);
        deltas
            .iter()
            .zip(&weights)
            .filter(|(d, _)| gap < **d)
            .map(|(d, wt)| wt / (2.0 * d))
            .sum::<f64>()
            * phi_v
            * w
    })
}

/// Shell integrals at several radii from independent sample sets, each at
/// the extrapolated zero width.
pub fn shell_profile(
    params: &SpaceParams,
    p: f64,
    radii: &[f64],
    phi: &dyn ScalarField,
    samples: u64,
    seed: u64,
) -> Result<Vec<MCEstimate>> {
    radii
        .iter()
        .enumerate()
        .map(|(i, &r)| shell_integral_extrapolated(params, p, r, phi, samples, derive_seed(seed, i as u64 + 1)))
        .collect()
}

/// One row of a density table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityRow {
    pub radius: f64,
    /// `R^{1−Q}/(Qσ_p) ∫_{∂B_R} φ d𝒮`.
    pub value: f64,
    /// Joint error of the shell integral and `σ_p`.
    pub stderr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityTable {
    pub sigma_p: MCEstimate,
    pub rows: Vec<DensityRow>,
    pub limit: Extrapolation,
}

/// Seed tag under which `σ_p` is re-estimated inside composite estimators.
pub const SIGMA_SEED_TAG: u64 = 0x5167_6d61;

/// The normalized shell averages `R^{1−Q}/(Qσ_p) ∫_{∂B_R} φ d𝒮` for each
/// radius, and their extrapolated limit (which should equal `φ(x0)`).
pub fn density_limit(
    params: &SpaceParams,
    p: f64,
    phi: &dyn ScalarField,
    radii: &[f64],
    samples: u64,
    seed: u64,
) -> Result<DensityTable> {
    if radii.windows(2).any(|w| !(w[0] > w[1])) {
        return Err(Error::domain("density_limit", "radii must be strictly decreasing"));
    }
    let sigma = sigma_p(params, p, samples, derive_seed(seed, SIGMA_SEED_TAG))?;
    let q = params.homogeneous_dim();
    let shells = shell_profile(params, p, radii, phi, samples, seed)?;
    let rows: Vec<DensityRow> = radii
        .iter()
        .zip(&shells)
        .map(|(&r, s)| {
            let value = r.powf(1.0 - q) / (q * sigma.mean) * s.mean;
            let rel = (s.stderr / s.mean.abs()).hypot(sigma.relative_stderr());
            let stderr = if s.mean == 0.0 {
                r.powf(1.0 - q) / (q * sigma.mean) * s.stderr
            } else {
                value.abs() * rel
            };
            DensityRow {
                radius: r,
                value,
                stderr,
            }
        })
        .collect();
    let as_est: Vec<MCEstimate> = rows
        .iter()
        .map(|row| MCEstimate {
            mean: row.value,
            stderr: row.stderr,
            samples,
            seed,
        })
        .collect();
    let limit = extrapolate_to_zero(radii, &as_est)?;
    Ok(DensityTable {
        sigma_p: sigma,
        rows,
        limit,
    })
}

/// Ball measures for several radii on shared samples drawn in the box of the
/// largest radius. Used to check that `𝒱(B_R)/R^Q` is constant.
pub fn nested_ball_measures(
    params: &SpaceParams,
    p: f64,
    radii: &[f64],
    samples: u64,
    seed: u64,
) -> Result<Vec<MCEstimate>> {
    check_p(p)?;
    let rmax = radii.iter().cloned().fold(f64::NAN, f64::max);
    let ball = BallSpec::new(params, rmax)?;
    integrate_many(&ball.sample_box(params), samples, seed, radii.len(), |x, out| {
        if let Some((psi, w)) = gauge_density(params, p, &Point::new(x.to_vec())) {
            for (o, &r) in out.iter_mut().zip(radii) {
                if psi < r {
                    *o = w;
                }
            }
        }
    })
}

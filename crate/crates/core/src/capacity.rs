//! p-capacity of gauge annuli `B_R ∖ B_r` centred at `x0`.
//!
//! Three routes, all reported in units of `σ_p`:
//!
//! * the closed form `|α|^{p−1} Q |r^α − R^α|^{1−p}` (`Q (log R − log r)^{1−Q}`
//!   when `p = Q`);
//! * minimization of the radial energy `Q ∫_r^R |η′(ρ)|^p ρ^{Q−1} dρ` over
//!   piecewise-linear profiles `η` with `η(r) = 1`, `η(R) = 0`;
//! * Monte Carlo energy of the explicit potential `u = η∘ψ`, divided by an
//!   independent estimate of `σ_p`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{FieldKind, GaugeField, ScalarField};
use crate::geometry::{exponents, gauge, Exponents, Point, SpaceParams};
use crate::jet::{Jet, Jet1, Jet2};
use crate::mc::{derive_seed, integrate, MCEstimate};
use crate::measure::{gauge_density, sigma_p, BallSpec, SIGMA_SEED_TAG};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CapacityMethod {
    ClosedForm,
    RadialVariational,
    MonteCarloEnergy,
}

/// Where the `σ_p` unit of a capacity comes from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SigmaUnit {
    /// The value is exact in units of `σ_p`.
    Symbolic,
    /// The value was divided by this estimate of `σ_p`.
    Estimated(MCEstimate),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CapacityResult {
    pub method: CapacityMethod,
    /// Capacity in units of `σ_p`.
    pub value: f64,
    /// Monte Carlo error of `value`; zero for the deterministic methods.
    pub stderr: f64,
    pub sigma_p_used: SigmaUnit,
}

fn check_annulus(inner: f64, outer: f64) -> Result<()> {
    if !(inner > 0.0 && inner < outer && outer.is_finite()) {
        return Err(Error::domain(
            "capacity",
            format!("need 0 < r < R, got r = {inner}, R = {outer}"),
        ));
    }
    Ok(())
}

/// Radial profile of the capacity potential and its derivative.
#[derive(Debug, Clone, Copy)]
struct OptimalProfile {
    ex: Exponents,
    inner: f64,
    outer: f64,
}

impl OptimalProfile {
    fn new(params: &SpaceParams, p: f64, inner: f64, outer: f64) -> Result<Self> {
        check_annulus(inner, outer)?;
        Ok(Self {
            ex: exponents(params, p)?,
            inner,
            outer,
        })
    }

    fn value(&self, rho: f64) -> f64 {
        match self.ex.alpha {
            Some(a) => (rho.powf(a) - self.outer.powf(a)) / (self.inner.powf(a) - self.outer.powf(a)),
            None => (rho.ln() - self.outer.ln()) / (self.inner.ln() - self.outer.ln()),
        }
    }

    fn slope(&self, rho: f64) -> f64 {
        match self.ex.alpha {
            Some(a) => a * rho.powf(a - 1.0) / (self.inner.powf(a) - self.outer.powf(a)),
            None => 1.0 / (rho * (self.inner.ln() - self.outer.ln())),
        }
    }
}

/// Closed-form capacity in units of `σ_p`.
pub fn closed_form_capacity(params: &SpaceParams, p: f64, inner: f64, outer: f64) -> Result<CapacityResult> {
    check_annulus(inner, outer)?;
    let ex = exponents(params, p)?;
    let value = match ex.alpha {
        // |r^α − R^α| covers both p < Q (α < 0) and p > Q (α > 0)
        Some(a) => a.abs().powf(p - 1.0) * ex.q * (inner.powf(a) - outer.powf(a)).abs().powf(1.0 - p),
        None => ex.q * (outer.ln() - inner.ln()).powf(1.0 - ex.q),
    };
    Ok(CapacityResult {
        method: CapacityMethod::ClosedForm,
        value,
        stderr: 0.0,
        sigma_p_used: SigmaUnit::Symbolic,
    })
}

/// The Dirichlet potential: `1` on `ψ = r`, `0` on `ψ = R`, `p`-harmonic between.
pub fn annulus_potential(params: &SpaceParams, p: f64, inner: f64, outer: f64, point: &Point) -> Result<f64> {
    let prof = OptimalProfile::new(params, p, inner, outer)?;
    let psi = gauge(params, point)?.psi;
    if psi < inner || psi > outer {
        return Err(Error::domain(
            "annulus_potential",
            format!("ψ = {psi} lies outside [{inner}, {outer}]"),
        ));
    }
    Ok(prof.value(psi))
}

/// [`annulus_potential`] as a field, for operator checks.
#[derive(Debug, Clone, Copy)]
pub struct AnnulusPotential {
    profile: OptimalProfile,
}

impl AnnulusPotential {
    pub fn new(params: &SpaceParams, p: f64, inner: f64, outer: f64) -> Result<Self> {
        Ok(Self {
            profile: OptimalProfile::new(params, p, inner, outer)?,
        })
    }

    fn eval<J: Jet>(&self, params: &SpaceParams, point: &Point) -> Result<J> {
        let OptimalProfile { ex, inner, outer } = self.profile;
        Ok(match ex.alpha {
            Some(a) => {
                let f: J = GaugeField::Power { alpha: a }.eval_jet(params, point)?;
                let den = inner.powf(a) - outer.powf(a);
                f.add_const(-outer.powf(a)).scale(1.0 / den)
            }
            None => {
                let f: J = GaugeField::Log.eval_jet(params, point)?;
                f.add_const(-outer.ln()).scale(1.0 / (inner.ln() - outer.ln()))
            }
        })
    }
}

impl ScalarField for AnnulusPotential {
    fn kind(&self) -> FieldKind {
        FieldKind::UserComposite
    }

    fn jet2(&self, params: &SpaceParams, point: &Point) -> Result<Jet2> {
        self.eval(params, point)
    }

    fn jet1(&self, params: &SpaceParams, point: &Point) -> Result<Jet1> {
        self.eval(params, point)
    }
}

/// Piecewise-linear `η` on knots `r = ρ_0 < … < ρ_m = R`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    knots: Vec<f64>,
    values: Vec<f64>,
}

impl RadialProfile {
    pub fn new(knots: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if knots.len() != values.len() {
            return Err(Error::domain("radial_profile", "one value per knot"));
        }
        if knots.len() < 3 {
            return Err(Error::domain("radial_profile", "need at least two segments"));
        }
        if knots.windows(2).any(|w| !(w[0] < w[1])) || !(knots[0] > 0.0) {
            return Err(Error::domain("radial_profile", "knots must be positive and increasing"));
        }
        if values[0] != 1.0 || values[values.len() - 1] != 0.0 {
            return Err(Error::domain("radial_profile", "need η(r) = 1 and η(R) = 0"));
        }
        Ok(Self { knots, values })
    }

    /// The linear profile `(R − ρ)/(R − r)` on `segments` equal segments.
    pub fn linear(inner: f64, outer: f64, segments: usize) -> Result<Self> {
        let knots = uniform_knots(inner, outer, segments);
        let values = knots.iter().map(|rho| (outer - rho) / (outer - inner)).collect();
        Self::pinned(knots, values)
    }

    /// Samples `eta` at uniform knots (boundary values are pinned).
    pub fn sampled(inner: f64, outer: f64, segments: usize, eta: impl Fn(f64) -> f64) -> Result<Self> {
        let knots = uniform_knots(inner, outer, segments);
        let values = knots.iter().map(|&rho| eta(rho)).collect();
        Self::pinned(knots, values)
    }

    fn pinned(knots: Vec<f64>, mut values: Vec<f64>) -> Result<Self> {
        let last = values.len() - 1;
        values[0] = 1.0;
        values[last] = 0.0;
        Self::new(knots, values)
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn segments(&self) -> usize {
        self.knots.len() - 1
    }

    /// Replaces the interior values, keeping the pinned ends.
    pub fn with_interior(&self, interior: &[f64]) -> Result<Self> {
        let mut values = self.values.clone();
        let m = values.len() - 1;
        if interior.len() != m - 1 {
            return Err(Error::domain("radial_profile", "wrong number of interior values"));
        }
        values[1..m].copy_from_slice(interior);
        Self::new(self.knots.clone(), values)
    }
}

fn uniform_knots(inner: f64, outer: f64, segments: usize) -> Vec<f64> {
    let h = (outer - inner) / segments as f64;
    let mut k: Vec<f64> = (0..=segments).map(|i| inner + h * i as f64).collect();
    k[segments] = outer;
    k
}

/// `∫_{ρ_s}^{ρ_{s+1}} ρ^{Q−1} dρ · Q σ_p = σ_p (ρ_{s+1}^Q − ρ_s^Q)` per segment.
fn segment_weights(knots: &[f64], q: f64, sigma: f64) -> Vec<f64> {
    knots
        .windows(2)
        .map(|w| sigma * (w[1].powf(q) - w[0].powf(q)))
        .collect()
}

/// `Q σ_p ∫_r^R |η′|^p ρ^{Q−1} dρ`, exact for piecewise-linear `η`.
pub fn radial_energy(params: &SpaceParams, p: f64, profile: &RadialProfile, sigma: f64) -> f64 {
    let q = params.homogeneous_dim();
    let k = profile.knots();
    let v = profile.values();
    segment_weights(k, q, sigma)
        .iter()
        .enumerate()
        .map(|(s, w)| w * ((v[s + 1] - v[s]) / (k[s + 1] - k[s])).abs().powf(p))
        .sum()
}

/// Result of [`minimize_radial`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialMinimum {
    pub profile: RadialProfile,
    /// Minimal energy in units of `σ_p`.
    pub energy: f64,
    pub iterations: usize,
    /// Max-norm of the final gradient.
    pub residual: f64,
}

impl RadialMinimum {
    pub fn as_capacity(&self) -> CapacityResult {
        CapacityResult {
            method: CapacityMethod::RadialVariational,
            value: self.energy,
            stderr: 0.0,
            sigma_p_used: SigmaUnit::Symbolic,
        }
    }
}

/// Solves a tridiagonal system in place (Thomas algorithm); `sub[0]` and
/// `sup[n−1]` are ignored.
pub fn solve_tridiagonal(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    for i in 0..n {
        let a = if i > 0 { sub[i] } else { 0.0 };
        let denom = diag[i] - if i > 0 { a * c[i - 1] } else { 0.0 };
        if denom == 0.0 || !denom.is_finite() {
            return Err(Error::domain("tridiagonal", "singular pivot"));
        }
        c[i] = if i + 1 < n { sup[i] / denom } else { 0.0 };
        d[i] = (rhs[i] - if i > 0 { a * d[i - 1] } else { 0.0 }) / denom;
    }
    for i in (0..n.saturating_sub(1)).rev() {
        d[i] -= c[i] * d[i + 1];
    }
    Ok(d)
}

const MAX_NEWTON_ITERATIONS: usize = 200;

/// Minimizes [`radial_energy`] over the interior knot values of a uniform
/// `segments`-piece profile by damped Newton on the tridiagonal Hessian.
pub fn minimize_radial(params: &SpaceParams, p: f64, inner: f64, outer: f64, segments: usize) -> Result<RadialMinimum> {
    check_annulus(inner, outer)?;
    exponents(params, p)?;
    if segments < 8 {
        return Err(Error::domain(
            "minimize_radial",
            format!("need at least 8 segments, got {segments}"),
        ));
    }
    let q = params.homogeneous_dim();
    let mut profile = RadialProfile::linear(inner, outer, segments)?;
    let knots = profile.knots().to_vec();
    let dx: Vec<f64> = knots.windows(2).map(|w| w[1] - w[0]).collect();
    let weights = segment_weights(&knots, q, 1.0);
    let n = segments - 1;

    let energy_of = |v: &[f64]| -> f64 {
        (0..segments)
            .map(|s| weights[s] * ((v[s + 1] - v[s]) / dx[s]).abs().powf(p))
            .sum()
    };

    let mut values = profile.values().to_vec();
    let mut energy = energy_of(&values);
    let mut residual = f64::INFINITY;
    for iter in 0..MAX_NEWTON_ITERATIONS {
        // per-segment first and second derivatives with respect to the slope
        let mut d1 = vec![0.0; segments];
        let mut d2 = vec![0.0; segments];
        for s in 0..segments {
            let slope = (values[s + 1] - values[s]) / dx[s];
            let a = slope.abs().max(1e-300);
            d1[s] = weights[s] * p * a.powf(p - 1.0) * slope.signum() / dx[s];
            d2[s] = weights[s] * p * (p - 1.0) * a.powf(p - 2.0) / (dx[s] * dx[s]);
        }
        // interior node j = 1..=n sits between segments j−1 and j
        let grad: Vec<f64> = (1..=n).map(|j| d1[j - 1] - d1[j]).collect();
        residual = grad.iter().fold(0.0, |m, g| f64::max(m, g.abs()));
        // gradient entries are differences of the per-segment fluxes d1
        let flux_scale = d1.iter().fold(0.0, |m: f64, g| m.max(g.abs()));
        if residual <= 1e-10 * flux_scale {
            for (slot, v) in profile.values.iter_mut().zip(&values) {
                *slot = *v;
            }
            return Ok(RadialMinimum {
                profile,
                energy,
                iterations: iter,
                residual,
            });
        }
        let diag: Vec<f64> = (1..=n).map(|j| d2[j - 1] + d2[j]).collect();
        let off: Vec<f64> = (1..=n).map(|j| -d2[j]).collect();
        let sub: Vec<f64> = (1..=n).map(|j| -d2[j - 1]).collect();
        let neg: Vec<f64> = grad.iter().map(|g| -g).collect();
        let step = solve_tridiagonal(&sub, &diag, &off, &neg)?;
        let slope_dot: f64 = step.iter().zip(&grad).map(|(s, g)| s * g).sum();
        // keep every slope on its side of zero: the minimizer is monotone and
        // the Hessian blows up (p < 2) or degenerates (p > 2) at zero slope
        let mut t: f64 = 1.0;
        for s in 0..segments {
            let slope = (values[s + 1] - values[s]) / dx[s];
            let ds_hi = if s < n { step[s] } else { 0.0 };
            let ds_lo = if s >= 1 { step[s - 1] } else { 0.0 };
            let dslope = (ds_hi - ds_lo) / dx[s];
            if slope * dslope < 0.0 {
                t = t.min(0.9 * (slope / dslope).abs());
            }
        }
        loop {
            let mut trial = values.clone();
            for j in 1..=n {
                trial[j] += t * step[j - 1];
            }
            let e = energy_of(&trial);
            if e <= energy + 1e-4 * t * slope_dot || t < 1e-12 {
                if t < 1e-12 && e >= energy {
                    // no further decrease is representable
                    if residual <= 1e-7 * flux_scale {
                        for (slot, v) in profile.values.iter_mut().zip(&values) {
                            *slot = *v;
                        }
                        return Ok(RadialMinimum {
                            profile,
                            energy,
                            iterations: iter,
                            residual,
                        });
                    }
                    return Err(Error::OptimizationFailure {
                        iterations: iter,
                        residual,
                    });
                }
                let stalled = energy - e <= 1e-15 * energy;
                values = trial;
                energy = e;
                // the energy is flat to rounding; accept a small gradient
                if stalled && residual <= 1e-5 * flux_scale {
                    for (slot, v) in profile.values.iter_mut().zip(&values) {
                        *slot = *v;
                    }
                    return Ok(RadialMinimum {
                        profile,
                        energy,
                        iterations: iter + 1,
                        residual,
                    });
                }
                break;
            }
            t *= 0.5;
        }
    }
    Err(Error::OptimizationFailure {
        iterations: MAX_NEWTON_ITERATIONS,
        residual,
    })
}

/// `∫_{r<ψ<R} ‖∇₀u‖^p dL` for the annulus potential, with
/// `‖∇₀u‖ = |η′(ψ)| ‖∇₀ψ‖`.
pub fn mc_energy(params: &SpaceParams, p: f64, inner: f64, outer: f64, samples: u64, seed: u64) -> Result<MCEstimate> {
    let prof = OptimalProfile::new(params, p, inner, outer)?;
    let ball = BallSpec::new(params, outer)?;
    integrate(&ball.sample_box(params), samples, seed, |x| {
        match gauge_density(params, p, &Point::new(x.to_vec())) {
            Some((psi, w)) if psi > inner && psi < outer => prof.slope(psi).abs().powf(p) * w,
            _ => 0.0,
        }
    })
}

/// [`mc_energy`] in units of an independently estimated `σ_p`.
pub fn mc_capacity(
    params: &SpaceParams,
    p: f64,
    inner: f64,
    outer: f64,
    samples: u64,
    seed: u64,
) -> Result<CapacityResult> {
    let energy = mc_energy(params, p, inner, outer, samples, seed)?;
    let sigma = sigma_p(params, p, samples, derive_seed(seed, SIGMA_SEED_TAG))?;
    let (value, stderr) = energy.ratio(&sigma);
    Ok(CapacityResult {
        method: CapacityMethod::MonteCarloEnergy,
        value,
        stderr,
        sigma_p_used: SigmaUnit::Estimated(sigma),
    })
}

//! The frame `X_1, …, X_{2n}` and the operators built on it.
//!
//! Each field is `X_i = ∂/∂x_i + b_i ∂/∂t` with
//!
//! ```text
//! b_i =  2kc (x_{i+n} − a_{i+n}) Σ^{k−1}   for i ≤ n
//! b_i = −2kc (x_{i−n} − a_{i−n}) Σ^{k−1}   for i > n
//! ```
//!
//! The `b_i` do not depend on `t`, so every `X_i` is divergence free and
//! `X_i b_j = ∂b_j/∂x_i`. Second derivatives along the frame are therefore
//! `X_i X_j f = v_iᵀ D²f v_j + (∂b_j/∂x_i) ∂f/∂t` with `v_i = e_i + b_i e_t`.
//!
//! Frame indices are 1-based in the public API, matching `X_1 … X_{2n}`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::ScalarField;
use crate::geometry::{sigma_pow, Point, SpaceParams};
use crate::jet::{Jet, Jet1, Jet2};

/// Components of `∇₀f` with respect to `X_1, …, X_{2n}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HorizontalVector(pub Vec<f64>);

impl HorizontalVector {
    pub fn components(&self) -> &[f64] {
        &self.0
    }

    pub fn norm_squared(&self) -> f64 {
        self.0.iter().map(|v| v * v).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_squared().sqrt()
    }

    pub fn dot(&self, other: &HorizontalVector) -> f64 {
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }
}

/// Euclidean description of a single `X_i` at a point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameCoefficients {
    /// 1-based frame index.
    pub index: usize,
    /// Coefficients with respect to `∂/∂x_1, …, ∂/∂x_{2n}, ∂/∂t`.
    pub coefficients: Vec<f64>,
    /// Euclidean gradient of the `∂/∂t` coefficient `b_i`.
    pub t_coefficient_grad: Vec<f64>,
}

/// All frame coefficients at one point.
#[derive(Debug, Clone)]
pub struct Frame {
    m: usize,
    /// `b_i`, 0-based.
    b: Vec<f64>,
    /// `∂b_i/∂x_l`, row `i`, length `2n + 1` (the `t` entry is zero).
    db: Vec<Vec<f64>>,
}

impl Frame {
    pub fn at(params: &SpaceParams, point: &Point) -> Result<Self> {
        let (y, _) = params.offsets(point)?;
        let n = params.n();
        let m = 2 * n;
        let k = params.k();
        let c = params.c();
        let sigma: f64 = y.iter().map(|v| v * v).sum();
        if sigma == 0.0 && k < 1.0 {
            return Err(Error::Degenerate(format!(
                "frame coefficients are not differentiable on Σ = 0 for k = {k} < 1"
            )));
        }
        let s_km1 = sigma_pow(sigma, k - 1.0);
        let mut b = Vec::with_capacity(m);
        let mut db = Vec::with_capacity(m);
        for i in 0..m {
            let (partner, sign) = if i < n { (i + n, 1.0) } else { (i - n, -1.0) };
            let amp = sign * 2.0 * k * c;
            b.push(amp * y[partner] * s_km1);
            let mut row = vec![0.0; m + 1];
            // ∂/∂x_l [y_p Σ^{k−1}] = δ_{lp} Σ^{k−1} + 2(k−1) y_p y_l Σ^{k−2}
            for (l, slot) in row.iter_mut().take(m).enumerate() {
                let mut v = if l == partner { s_km1 } else { 0.0 };
                if sigma > 0.0 && k != 1.0 {
                    v += 2.0 * (k - 1.0) * y[partner] * y[l] * sigma_pow(sigma, k - 2.0);
                }
                *slot = amp * v;
            }
            db.push(row);
        }
        Ok(Self { m, b, db })
    }

    pub fn horizontal_dim(&self) -> usize {
        self.m
    }

    /// `b_i` for 0-based `i`.
    pub fn t_coefficient(&self, i: usize) -> f64 {
        self.b[i]
    }

    /// `∇b_i` for 0-based `i`.
    pub fn t_coefficient_grad(&self, i: usize) -> &[f64] {
        &self.db[i]
    }

    /// `X_i b_j`, 0-based.
    pub fn derivative_of_coefficient(&self, i: usize, j: usize) -> f64 {
        self.db[j][i]
    }

    /// `X_i` applied to a function with Euclidean gradient `grad`.
    pub fn apply(&self, i: usize, grad: &[f64]) -> f64 {
        grad[i] + self.b[i] * grad[self.m]
    }

    pub fn horizontal_gradient(&self, grad: &[f64]) -> HorizontalVector {
        HorizontalVector((0..self.m).map(|i| self.apply(i, grad)).collect())
    }

    /// `½(X_iX_j f + X_jX_i f)` from a second-order jet.
    #[allow(clippy::needless_range_loop)]
    pub fn symmetric_hessian(&self, jet: &Jet2) -> Vec<Vec<f64>> {
        let m = self.m;
        let g = jet.grad();
        let ft = g[m];
        let mut out = vec![vec![0.0; m]; m];
        for i in 0..m {
            for j in i..m {
                // v_iᵀ H v_j with v_i = e_i + b_i e_t
                let core = jet.hess_at(i, j)
                    + self.b[j] * jet.hess_at(i, m)
                    + self.b[i] * jet.hess_at(m, j)
                    + self.b[i] * self.b[j] * jet.hess_at(m, m);
                let drift = 0.5 * (self.derivative_of_coefficient(i, j) + self.derivative_of_coefficient(j, i)) * ft;
                out[i][j] = core + drift;
                out[j][i] = core + drift;
            }
        }
        out
    }
}

fn check_index(params: &SpaceParams, i: usize) -> Result<()> {
    let m = params.horizontal_dim();
    if i == 0 || i > m {
        return Err(Error::IndexOutOfRange { index: i, max: m });
    }
    Ok(())
}

/// Euclidean coefficients of `X_i` (1-based) and the gradient of its
/// `∂/∂t` coefficient.
pub fn field_coefficients(params: &SpaceParams, i: usize, point: &Point) -> Result<FrameCoefficients> {
    check_index(params, i)?;
    let frame = Frame::at(params, point)?;
    let m = params.horizontal_dim();
    let mut coefficients = vec![0.0; m + 1];
    coefficients[i - 1] = 1.0;
    coefficients[m] = frame.t_coefficient(i - 1);
    Ok(FrameCoefficients {
        index: i,
        coefficients,
        t_coefficient_grad: frame.t_coefficient_grad(i - 1).to_vec(),
    })
}

pub fn horizontal_gradient(params: &SpaceParams, field: &dyn ScalarField, point: &Point) -> Result<HorizontalVector> {
    let jet: Jet1 = field.jet1(params, point)?;
    Ok(Frame::at(params, point)?.horizontal_gradient(jet.grad()))
}

/// The `2n × 2n` matrix `½(X_iX_j f + X_jX_i f)`.
pub fn horizontal_hessian_sym(params: &SpaceParams, field: &dyn ScalarField, point: &Point) -> Result<Vec<Vec<f64>>> {
    let jet = field.jet2(params, point)?;
    Ok(Frame::at(params, point)?.symmetric_hessian(&jet))
}

/// Horizontal first- and second-order data of a field at a point.
#[derive(Debug, Clone)]
pub struct HorizontalJet {
    pub gradient: HorizontalVector,
    pub hessian: Vec<Vec<f64>>,
}

impl HorizontalJet {
    pub fn new(params: &SpaceParams, field: &dyn ScalarField, point: &Point) -> Result<Self> {
        let jet = field.jet2(params, point)?;
        let frame = Frame::at(params, point)?;
        Ok(Self::from_parts(&frame, &jet))
    }

    pub fn from_parts(frame: &Frame, jet: &Jet2) -> Self {
        Self {
            gradient: frame.horizontal_gradient(jet.grad()),
            hessian: frame.symmetric_hessian(jet),
        }
    }

    pub fn trace(&self) -> f64 {
        (0..self.hessian.len()).map(|i| self.hessian[i][i]).sum()
    }

    /// `⟨∇₀f, (D²f)* ∇₀f⟩`.
    pub fn infinity_laplacian(&self) -> f64 {
        let g = self.gradient.components();
        let mut acc = 0.0;
        for (i, row) in self.hessian.iter().enumerate() {
            for (j, h) in row.iter().enumerate() {
                acc += g[i] * g[j] * h;
            }
        }
        acc
    }

    /// `‖∇₀f‖^{p−2} tr D²f + (p−2)‖∇₀f‖^{p−4} Δ_∞ f`.
    pub fn p_laplacian(&self, p: f64) -> Result<f64> {
        let n2 = self.gradient.norm_squared();
        if n2 == 0.0 {
            return if p > 2.0 {
                Ok(0.0)
            } else if p == 2.0 {
                Ok(self.trace())
            } else {
                Err(Error::Degenerate(format!(
                    "Δ_p with p = {p} < 2 at a horizontal critical point"
                )))
            };
        }
        let lead = n2.powf(0.5 * (p - 2.0));
        Ok(lead * self.trace() + (p - 2.0) * lead / n2 * self.infinity_laplacian())
    }
}

pub fn p_laplacian(params: &SpaceParams, field: &dyn ScalarField, point: &Point, p: f64) -> Result<f64> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::domain("p_laplacian", format!("p must lie in (1, ∞), got {p}")));
    }
    HorizontalJet::new(params, field, point)?.p_laplacian(p)
}

/// `Σ_i X_i(‖∇₀f‖^{p−2} X_i f)` by the product rule on the flux components,
/// without passing through the symmetrized Hessian.
pub fn p_laplacian_divergence_form(
    params: &SpaceParams,
    field: &dyn ScalarField,
    point: &Point,
    p: f64,
) -> Result<f64> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::domain(
            "p_laplacian_divergence_form",
            format!("p must lie in (1, ∞), got {p}"),
        ));
    }
    let jet = field.jet2(params, point)?;
    let frame = Frame::at(params, point)?;
    let m = frame.horizontal_dim();
    let d = m + 1;
    let g = jet.grad();

    // X_i f and its Euclidean gradient H v_i + f_t ∇b_i
    let mut xf = vec![0.0; m];
    let mut grad_xf = vec![vec![0.0; d]; m];
    for i in 0..m {
        xf[i] = frame.apply(i, g);
        let bi = frame.t_coefficient(i);
        let dbi = frame.t_coefficient_grad(i);
        for l in 0..d {
            grad_xf[i][l] = jet.hess_at(l, i) + bi * jet.hess_at(l, m) + g[m] * dbi[l];
        }
    }
    let n2: f64 = xf.iter().map(|v| v * v).sum();
    if n2 == 0.0 {
        return HorizontalJet::from_parts(&frame, &jet).p_laplacian(p);
    }
    let mut grad_n2 = vec![0.0; d];
    for i in 0..m {
        for l in 0..d {
            grad_n2[l] += 2.0 * xf[i] * grad_xf[i][l];
        }
    }
    let w = n2.powf(0.5 * (p - 2.0));
    let dw = 0.5 * (p - 2.0) * w / n2;
    let mut div = 0.0;
    for i in 0..m {
        let flux_grad: Vec<f64> = (0..d).map(|l| w * grad_xf[i][l] + dw * grad_n2[l] * xf[i]).collect();
        div += frame.apply(i, &flux_grad);
    }
    Ok(div)
}

pub fn infinity_laplacian(params: &SpaceParams, field: &dyn ScalarField, point: &Point) -> Result<f64> {
    Ok(HorizontalJet::new(params, field, point)?.infinity_laplacian())
}

fn check_pair(params: &SpaceParams, i: usize, j: usize) -> Result<()> {
    check_index(params, i)?;
    check_index(params, j)?;
    if i >= j {
        return Err(Error::domain(
            "lie_bracket",
            format!("requires i < j, got i = {i}, j = {j}"),
        ));
    }
    Ok(())
}

/// Euclidean coefficients of `[X_i, X_j] = (X_i b_j − X_j b_i) ∂/∂t`.
pub fn lie_bracket(params: &SpaceParams, i: usize, j: usize, point: &Point) -> Result<Vec<f64>> {
    check_pair(params, i, j)?;
    let frame = Frame::at(params, point)?;
    let m = params.horizontal_dim();
    let mut out = vec![0.0; m + 1];
    out[m] = frame.derivative_of_coefficient(i - 1, j - 1) - frame.derivative_of_coefficient(j - 1, i - 1);
    Ok(out)
}

/// An alternative three-case closed form for `[X_i, X_j]`, evaluated term by term.
///
/// It disagrees with [`lie_bracket`] when `k ≠ 1`; the function exists to
/// report that comparison.
pub fn lie_bracket_printed(params: &SpaceParams, i: usize, j: usize, point: &Point) -> Result<Vec<f64>> {
    check_pair(params, i, j)?;
    let (y, _) = params.offsets(point)?;
    let n = params.n();
    let (k, c) = (params.k(), params.c());
    let sigma: f64 = y.iter().map(|v| v * v).sum();
    if sigma == 0.0 && k < 1.0 {
        return Err(Error::Degenerate(format!("bracket undefined on Σ = 0 for k = {k} < 1")));
    }
    // 1-based coordinate offsets
    let yy = |l: usize| y[l - 1];
    let cross = if i <= n && j <= n {
        yy(j + n) * yy(i) - yy(i + n) * yy(j)
    } else if i > n && j > n {
        yy(i - n) * yy(j) - yy(j - n) * yy(i)
    } else {
        yy(i + n) * yy(j) - yy(j - n) * yy(i)
    };
    let lead = if sigma == 0.0 {
        0.0
    } else {
        8.0 * k * c * (k - 1.0) * sigma_pow(sigma, k - 2.0) * cross
    };
    let tail = if i <= n && j > n && i == j - n {
        -4.0 * k * c * sigma_pow(sigma, k - 1.0)
    } else {
        0.0
    };
    let mut out = vec![0.0; 2 * n + 1];
    out[2 * n] = lead + tail;
    Ok(out)
}

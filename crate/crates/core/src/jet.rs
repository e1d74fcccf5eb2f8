//! Forward-mode jets on `R^d`.
//!
//! [`Jet2`] carries a value, the Euclidean gradient and the full (dense,
//! symmetric) Hessian; [`Jet1`] drops the Hessian for integrands that only
//! need first derivatives. Both implement [`Jet`], so scalar fields are
//! written once and evaluated at either order.

use std::fmt;

use crate::error::{Error, Result};

/// Arithmetic shared by first- and second-order jets.
pub trait Jet: Clone + fmt::Debug {
    fn constant(value: f64, dim: usize) -> Self;

    /// The coordinate function `x_index` evaluated at `value`.
    fn variable(value: f64, index: usize, dim: usize) -> Self;

    fn value(&self) -> f64;

    fn grad(&self) -> &[f64];

    fn dim(&self) -> usize {
        self.grad().len()
    }

    /// Chain rule for a scalar function `g` with `g(v) = d0`, `g'(v) = d1`,
    /// `g''(v) = d2` at `v = self.value()`.
    fn compose(&self, d0: f64, d1: f64, d2: f64) -> Self;

    fn add(&self, other: &Self) -> Self;

    fn mul(&self, other: &Self) -> Self;

    fn scale(&self, s: f64) -> Self;

    fn add_const(&self, s: f64) -> Self {
        self.compose(self.value() + s, 1.0, 0.0)
    }

    fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1.0))
    }

    fn neg(&self) -> Self {
        self.scale(-1.0)
    }

    fn exp(&self) -> Self {
        let e = self.value().exp();
        self.compose(e, e, e)
    }

    fn ln(&self) -> Result<Self> {
        let v = self.value();
        if !(v > 0.0) {
            return Err(Error::ArithmeticDomain {
                op: "log",
                detail: format!("argument {v} is not positive"),
            });
        }
        Ok(self.compose(v.ln(), 1.0 / v, -1.0 / (v * v)))
    }

    fn sqrt(&self) -> Result<Self> {
        let v = self.value();
        if !(v > 0.0) {
            return Err(Error::ArithmeticDomain {
                op: "sqrt",
                detail: format!("argument {v} is not positive"),
            });
        }
        let r = v.sqrt();
        Ok(self.compose(r, 0.5 / r, -0.25 / (r * v)))
    }

    fn recip(&self) -> Result<Self> {
        let v = self.value();
        if v == 0.0 {
            return Err(Error::ArithmeticDomain {
                op: "div",
                detail: "division by zero".into(),
            });
        }
        let r = 1.0 / v;
        Ok(self.compose(r, -r * r, 2.0 * r * r * r))
    }

    fn div(&self, other: &Self) -> Result<Self> {
        Ok(self.mul(&other.recip()?))
    }

    /// `self^e`. Integer exponents accept any base (nonnegative integers
    /// accept zero); other exponents need a positive base.
    fn powf(&self, e: f64) -> Result<Self> {
        let v = self.value();
        if e == 0.0 {
            return Ok(Self::constant(1.0, self.dim()));
        }
        if e.fract() == 0.0 && e.abs() < i32::MAX as f64 {
            let m = e as i32;
            if m < 0 && v == 0.0 {
                return Err(Error::ArithmeticDomain {
                    op: "pow",
                    detail: format!("zero base with negative exponent {e}"),
                });
            }
            let d1 = if m == 1 { 1.0 } else { e * v.powi(m - 1) };
            let d2 = match m {
                1 => 0.0,
                2 => 2.0,
                _ => e * (e - 1.0) * v.powi(m - 2),
            };
            return Ok(self.compose(v.powi(m), d1, d2));
        }
        if !(v > 0.0) {
            return Err(Error::ArithmeticDomain {
                op: "pow",
                detail: format!("non-integer exponent {e} needs a positive base, got {v}"),
            });
        }
        let r = v.powf(e);
        Ok(self.compose(r, e * r / v, e * (e - 1.0) * r / (v * v)))
    }
}

/// Value and gradient.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet1 {
    value: f64,
    grad: Vec<f64>,
}

impl Jet1 {
    pub fn from_parts(value: f64, grad: Vec<f64>) -> Self {
        Self { value, grad }
    }
}

impl Jet for Jet1 {
    fn constant(value: f64, dim: usize) -> Self {
        Self {
            value,
            grad: vec![0.0; dim],
        }
    }

    fn variable(value: f64, index: usize, dim: usize) -> Self {
        let mut grad = vec![0.0; dim];
        grad[index] = 1.0;
        Self { value, grad }
    }

    fn value(&self) -> f64 {
        self.value
    }

    fn grad(&self) -> &[f64] {
        &self.grad
    }

    fn compose(&self, d0: f64, d1: f64, _d2: f64) -> Self {
        Self {
            value: d0,
            grad: self.grad.iter().map(|g| d1 * g).collect(),
        }
    }

    fn add(&self, other: &Self) -> Self {
        Self {
            value: self.value + other.value,
            grad: self.grad.iter().zip(&other.grad).map(|(a, b)| a + b).collect(),
        }
    }

    fn mul(&self, other: &Self) -> Self {
        let (a, b) = (self.value, other.value);
        Self {
            value: a * b,
            grad: self
                .grad
                .iter()
                .zip(&other.grad)
                .map(|(ga, gb)| a * gb + b * ga)
                .collect(),
        }
    }

    fn scale(&self, s: f64) -> Self {
        Self {
            value: s * self.value,
            grad: self.grad.iter().map(|g| s * g).collect(),
        }
    }
}

/// Value, gradient and symmetric Hessian (row-major, full storage).
#[derive(Debug, Clone, PartialEq)]
pub struct Jet2 {
    value: f64,
    grad: Vec<f64>,
    hess: Vec<f64>,
}

impl Jet2 {
    /// Builds a jet from explicit parts; the Hessian is symmetrized on write.
    pub fn from_parts(value: f64, grad: Vec<f64>, hess: Vec<f64>) -> Self {
        let d = grad.len();
        assert_eq!(hess.len(), d * d, "hessian must be {d}x{d}");
        let mut h = hess;
        for i in 0..d {
            for j in i + 1..d {
                let m = 0.5 * (h[i * d + j] + h[j * d + i]);
                h[i * d + j] = m;
                h[j * d + i] = m;
            }
        }
        Self { value, grad, hess: h }
    }

    pub fn hess(&self) -> &[f64] {
        &self.hess
    }

    /// Hessian entry `∂²f/∂x_i∂x_j`.
    pub fn hess_at(&self, i: usize, j: usize) -> f64 {
        self.hess[i * self.grad.len() + j]
    }

    /// Drops the second-order part.
    pub fn to_jet1(&self) -> Jet1 {
        Jet1::from_parts(self.value, self.grad.clone())
    }
}

impl Jet for Jet2 {
    fn constant(value: f64, dim: usize) -> Self {
        Self {
            value,
            grad: vec![0.0; dim],
            hess: vec![0.0; dim * dim],
        }
    }

    fn variable(value: f64, index: usize, dim: usize) -> Self {
        let mut j = Self::constant(value, dim);
        j.grad[index] = 1.0;
        j
    }

    fn value(&self) -> f64 {
        self.value
    }

    fn grad(&self) -> &[f64] {
        &self.grad
    }

    fn compose(&self, d0: f64, d1: f64, d2: f64) -> Self {
        let d = self.grad.len();
        let grad: Vec<f64> = self.grad.iter().map(|g| d1 * g).collect();
        let mut hess = vec![0.0; d * d];
        for i in 0..d {
            for j in i..d {
                let v = d1 * self.hess[i * d + j] + d2 * self.grad[i] * self.grad[j];
                hess[i * d + j] = v;
                hess[j * d + i] = v;
            }
        }
        Self { value: d0, grad, hess }
    }

    fn add(&self, other: &Self) -> Self {
        Self {
            value: self.value + other.value,
            grad: self.grad.iter().zip(&other.grad).map(|(a, b)| a + b).collect(),
            hess: self.hess.iter().zip(&other.hess).map(|(a, b)| a + b).collect(),
        }
    }

    fn mul(&self, other: &Self) -> Self {
        let d = self.grad.len();
        let (a, b) = (self.value, other.value);
        let (ga, gb) = (&self.grad, &other.grad);
        let grad = ga.iter().zip(gb).map(|(x, y)| a * y + b * x).collect();
        let mut hess = vec![0.0; d * d];
        for i in 0..d {
            for j in i..d {
                let v = a * other.hess[i * d + j] + b * self.hess[i * d + j] + ga[i] * gb[j] + gb[i] * ga[j];
                hess[i * d + j] = v;
                hess[j * d + i] = v;
            }
        }
        Self {
            value: a * b,
            grad,
            hess,
        }
    }

    fn scale(&self, s: f64) -> Self {
        Self {
            value: s * self.value,
            grad: self.grad.iter().map(|g| s * g).collect(),
            hess: self.hess.iter().map(|h| s * h).collect(),
        }
    }
}

/// The jet operations exposed as a single dispatch point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JetOp {
    Add,
    Mul,
    Div,
    Pow,
    Log,
    Exp,
    Sqrt,
}

/// Second operand of [`jet_arith`].
#[derive(Debug, Clone)]
pub enum Operand<'a, J> {
    Jet(&'a J),
    Real(f64),
}

/// Applies `op` to `a` (and `b` for binary operations). Unary operations
/// ignore `b`; `Pow` requires a real exponent.
pub fn jet_arith<J: Jet>(op: JetOp, a: &J, b: Operand<'_, J>) -> Result<J> {
    let lift = |b: Operand<'_, J>| match b {
        Operand::Jet(j) => j.clone(),
        Operand::Real(v) => J::constant(v, a.dim()),
    };
    match op {
        JetOp::Add => Ok(a.add(&lift(b))),
        JetOp::Mul => Ok(a.mul(&lift(b))),
        JetOp::Div => a.div(&lift(b)),
        JetOp::Pow => match b {
            Operand::Real(e) => a.powf(e),
            Operand::Jet(e) => {
                // a^b = exp(b·ln a)
                Ok(e.mul(&a.ln()?).exp())
            }
        },
        JetOp::Log => a.ln(),
        JetOp::Exp => Ok(a.exp()),
        JetOp::Sqrt => a.sqrt(),
    }
}

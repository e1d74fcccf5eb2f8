//! Numerics for the fundamental solution of the p-Laplacian in a class of
//! step-two Hörmander vector fields on `R^{2n+1}`.
//!
//! The frame is `X_i = ∂/∂x_i ± 2kc (x_{i±n} − a_{i±n}) Σ^{k−1} ∂/∂t` and
//! the gauge `ψ = (c²Σ^{2k} + (t − s)²)^{1/(4k)}`. The crate evaluates the
//! horizontal operators exactly through forward-mode jets, estimates the
//! measures `‖∇₀ψ‖^p dL` of gauge balls and spheres by Monte Carlo, checks
//! the distributional identity `Δ_p(C ψ^α) = δ_{x0}` through the annulus
//! pairing, and computes capacities of gauge annuli three ways.

// `!(x > 0.0)` style guards are intentional: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod capacity;
pub mod error;
pub mod extrapolate;
pub mod fields;
pub mod geometry;
pub mod horizontal;
pub mod jet;
pub mod mc;
pub mod measure;
pub mod weak_form;

pub use capacity::{
    annulus_potential, closed_form_capacity, mc_capacity, mc_energy, minimize_radial, radial_energy, AnnulusPotential,
    CapacityMethod, CapacityResult, RadialMinimum, RadialProfile, SigmaUnit,
};
pub use error::{Error, Result};
pub use extrapolate::{extrapolate_to_zero, Extrapolation, ExtrapolationMethod};
pub use fields::{jet_of, Composite, FieldKind, GaugeField, Polynomial, ScalarField, Scaled};
pub use geometry::{
    exponents, fundamental_profile, gauge, gauge_regularized, normalization, Exponents, GaugeValues, Normalization,
    Point, SpaceParams,
};
pub use horizontal::{
    field_coefficients, horizontal_gradient, horizontal_hessian_sym, infinity_laplacian, lie_bracket,
    lie_bracket_printed, p_laplacian, p_laplacian_divergence_form, FrameCoefficients, HorizontalJet, HorizontalVector,
};
pub use jet::{jet_arith, Jet, Jet1, Jet2, JetOp, Operand};
pub use mc::{MCEstimate, SampleBox};
pub use measure::{
    acceptance_ratio, ball_measure, density_limit, shell_integral, shell_integral_extrapolated, sigma_p, BallSpec,
    DensityRow, DensityTable,
};
pub use weak_form::{
    dirac_limit, weak_pairing, BumpCombination, DiracRow, DiracTable, PairingPotential, TestBump, TestFunction,
};

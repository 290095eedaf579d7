//! Numerical certification toolkit for the Willmore conjecture on 2-tori.
//!
//! A metric on the torus can be written as `g = e^{2u} g0` with `g0` flat, so it
//! is determined by a conformal class `(x, y)` in the moduli space `M` and a
//! periodic scaling function `u`. This crate computes the scale-invariant
//! quantities of such a metric (curvature functionals `K_p`, systole ratio `V`,
//! oscillation of `u`), evaluates the closed-form oscillation bounds `S` and
//! `Q = exp(2S)`, and decides whether the known sufficient conditions certify
//! `W(F) >= 2 pi^2` for every isometric immersion `F` of the torus:
//!
//! * `y <= 1` (the Li-Yau region of moduli space),
//! * `(x - 1/2)^2 + (y - 1)^2 <= 1/4` (the Montiel-Ros region),
//! * `sys^2 >= area` (the systole rule),
//! * `e^{-2 osc u} pi^2 (y + 1/y) >= 2 pi^2` (direct oscillation),
//! * `K_p < tau(y, p)` or `K_p < sigma(V, p)` (curvature-smallness thresholds).
//!
//! It also evaluates Willmore energies of explicit immersed tori (conformal
//! grid parametrizations in `R^n` and tori of revolution) so the certified
//! lower bounds can be checked against true energies, and it generates the
//! classical cylindrical and conical counterexample metrics whose oscillation
//! is unbounded at fixed `L^1` curvature, area and systole.
//!
//! The `examples/` directory is the guided tour; each example exercises one
//! capability end to end. The `willmore` binary exposes the same pipeline as
//! subcommands (`certify`, `bound`, `tau`, `sigma`, `moduli-map`, `generate`,
//! `willmore`, `validate`).
//!
//! # Quick start
//!
//! ```
//! use willmore::{bounds, geometry, generators, moduli::ModuliPoint};
//!
//! // A random small perturbation of the flat torus with y = 2.
//! let lattice = ModuliPoint::new(0.0, 2.0, 1.0).unwrap();
//! let metric = generators::random_trig_metric(lattice, 64, 96, 3, 0.1, 7);
//! let cert = bounds::certify(&metric, 2.0).unwrap();
//! assert!(cert.is_certified());
//! assert!(cert.lower_bound >= 2.0 * std::f64::consts::PI.powi(2) - 1e-9);
//! ```
//!
//! # Conventions
//!
//! * The Laplacian has nonnegative spectrum: `lap(cos(2 pi <xi, w>)) =
//!   +4 pi^2 |xi|^2 cos(2 pi <xi, w>)`. Gaussian curvature of `e^{2u} g0` is
//!   `K = e^{-2u} lap(u)`.
//! * All fields live on an `n1 x n2` sample grid over the lattice spanned by
//!   `scale*(1,0)` and `scale*(x,y)`; differentiation is spectral
//!   (trigonometric interpolation), quadrature is the exact cell-sum rule.
//! * Systoles of non-flat metrics are measured on a weighted grid graph. The
//!   search direction set overestimates continuous lengths by at most a
//!   computable anisotropy factor, and every certification rule that consumes
//!   a systole is evaluated under the worst-case error, so certificates stay
//!   sound.

pub mod bounds;
pub mod cli;
pub mod fields;
pub mod generators;
pub mod geometry;
pub mod immersions;
pub mod moduli;
mod quad;
mod systole;
pub mod validate;

use thiserror::Error;

/// Unified error type for every fallible operation in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate lattice")]
    DegenerateLattice,
    #[error("invalid moduli point: {0}")]
    InvalidModuli(String),
    #[error("p must exceed 1 (got {0})")]
    InvalidP(f64),
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("S undefined at or above 4*pi (K = {0})")]
    SUndefined(f64),
    #[error("use region rules: tau is unconstrained for y <= 1 (y = {0})")]
    TauUnconstrained(f64),
    #[error("use systole rule for V <= 1 (V = {0})")]
    SigmaUnconstrained(f64),
    #[error("disk bound requires K+_p < 2*pi (got {0})")]
    DiskBoundDomain(f64),
    #[error("cone does not fit: support disk of radius {support} exceeds half the flat systole {limit}")]
    ConeDoesNotFit { support: f64, limit: f64 },
    #[error("hypothesis not met: level set {0} carries no noncontractible loop")]
    LevelSetHypothesis(&'static str),
    #[error("parametrization not conformal (relative defect {0:.3e} exceeds {1:.1e})")]
    NotConformal(f64, f64),
    #[error("self-intersecting profile: need R > r > 0 (R = {r_major}, r = {r_minor})")]
    SelfIntersecting { r_major: f64, r_minor: f64 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

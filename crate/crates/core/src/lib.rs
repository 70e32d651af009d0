//! Finite-difference solver for the one-dimensional fractional
//! Ginzburg–Landau equation
//!
//! ```text
//! u_t + (υ + iη)(−Δ)^{α/2} u + (κ + iζ)|u|² u − γ u = 0,   1 < α ≤ 2,
//! ```
//!
//! truncated to an interval `(a, b)` with the solution held at zero on the
//! whole exterior. Space is discretized with the second-order weighted and
//! shifted Grünwald difference (WSGD) operator, time with the implicit
//! midpoint rule; the nonlinear midpoint system is solved by a linearized
//! fixed-point iteration against a single LU factorization.
//!
//! Module map:
//!
//! * [`wsgd`]: Grünwald/WSGD coefficients, the operator matrix, and the
//!   Fourier symbol of the discrete operator.
//! * [`linalg`]: grid functions, discrete norms, Cholesky and complex LU.
//! * [`spectral`]: semi-discrete Fourier transform and fractional Sobolev
//!   norms, with checks of the norm inequalities the scheme relies on.
//! * [`stepper`]: time integration and per-step diagnostics.
//! * [`experiments`]: convergence, decay and inviscid-limit studies.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod experiments;
pub mod linalg;
pub mod quadrature;
pub mod spectral;
pub mod stepper;
pub mod wsgd;

pub use error::{Error, Result};
pub use linalg::{ComplexField, FactorizedSystem, SquareMatrix};
pub use num_complex::Complex64;
pub use stepper::{GridSpec, ModelParams, SolverSettings, StepDiagnostics, TimeGrid};
pub use wsgd::{OperatorMatrix, WsgdWeights};

//! Numerics for generalized time-fractional evolution equations
//! u(t,x) = u0(x) + ∫₀ᵗ k(t,s) L u(s,x) ds.
//!
//! Two independent solution routes are built and cross-validated against
//! each other:
//!
//! * a deterministic Fourier-multiplier solver driven by the series
//!   Φ(t,λ) = Σ c_n(t) λⁿ attached to the time kernel, and
//! * Monte Carlo simulation of stochastic solutions — randomly scaled Lévy
//!   processes, linear fractional stable motion, time changes by inverse
//!   subordinators — whose marginals reproduce Φ(t,-ψ(p)) as a
//!   characteristic function.
//!
//! Modules mirror that split: `specfun` and `quad` carry the scalar
//! machinery, `kernels`/`symbols`/`phi` the deterministic side,
//! `randvar`/`processes` the stochastic side, and `solvers` the field-level
//! estimators plus the validation harness.

pub mod error;
pub mod kernels;
pub mod laplace;
pub mod phi;
pub mod processes;
pub mod quad;
pub mod randvar;
pub mod rng;
pub mod solvers;
pub mod specfun;
pub mod stats;
pub mod symbols;

pub use error::{Error, Result};


//! Numerical toolkit for the noncommutative 2-torus.
//!
//! The algebra is generated by two unitaries `U`, `V` obeying
//! `UV = e^{2πiθ} VU` for a deformation parameter `θ ∈ (0,1)`. Elements are
//! truncated Fourier series `Σ c_{m,n} U^m V^n` with finitely supported
//! coefficients; every operation of the toolkit acts on those coefficients:
//!
//! * [`element`] — the coefficient algebra: twisted product, adjoint, trace,
//!   derivations, Laplacian, Cauchy-Riemann operators, and norms.
//! * [`representation`] — finite clock-and-shift matrix models at rational
//!   approximants of θ, for spectra and positivity evidence.
//! * [`calculus`] — exponentials, their directional derivatives, and inverses
//!   in the ℓ¹-truncated algebra.
//! * [`linear`] — diagonal Fourier-multiplier solvers (Helmholtz, Poisson,
//!   ∂̄) and the Cauchy-Riemann kernel scanner.
//! * [`nonlinear`] — Liouville-type equations Δu = μeᵘ − a via continuation
//!   and Newton refinement, plus variational functionals and
//!   nonexistence certificates.
//! * [`flow`] — gradient flow for the unitary energy functional and probes
//!   of harmonicity of the monomial unitaries.
//! * [`harness`] — config-driven experiment runner behind the `nctorus` CLI.

pub mod calculus;
pub mod config;
pub mod element;
pub mod error;
pub mod fileio;
pub mod flow;
pub mod harness;
pub mod linear;
pub mod nonlinear;
pub mod random;
pub mod representation;

pub use element::{GrowthMode, TorusElement, TruncationPolicy};
pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

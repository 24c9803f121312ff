//! Numerics for a resonantly driven quantum van der Pol oscillator.
//!
//! The oscillator mode is subject to one-particle gain at rate γ₁⁺,
//! one-particle loss at rate γ₁⁻, two-particle loss at rate γ₂, and a
//! resonant drive of amplitude Ω (phase fixed so Ω is real). In the rotating
//! frame the density matrix evolves under the Lindblad generator
//!
//! ```text
//! ρ̇ = [Ω(a† − a), ρ] + γ₁⁺ D[a†]ρ + γ₁⁻ D[a]ρ + γ₂ D[a²]ρ ,
//! D[x]ρ = x ρ x† − {x†x, ρ}/2 .
//! ```
//!
//! The crate provides:
//!
//! - [`model`]: the generator in a truncated Fock basis, both as a sparse
//!   superoperator and as a matrix-free action.
//! - [`steady`]: the unique trace-one steady state via a sparse constrained
//!   linear solve, with adaptive truncation, plus an independent RK4
//!   time-evolution cross-check and a null-space degeneracy detector.
//! - [`observables`]: response ⟨a⟩, number statistics, phase-space noise
//!   σ = √(⟨n⟩ + 1/2 − |⟨a⟩|²), SNR, finite-difference susceptibility
//!   χ = d⟨a⟩/dΩ, and the sensitivity gain over a passive oscillator.
//! - [`analytic`]: closed-form classical steady state and the asymptotic
//!   weak-drive formulas (two-level, three-level, critical Gaussian,
//!   limit-cycle) used as oracles throughout the test suite.
//! - [`wigner`]: the Wigner quasiprobability function of a truncated density
//!   matrix and its inverse, built on stable associated-Laguerre recurrences.
//!
//! All rates are interpreted in units of a common reference rate; every
//! formula carries its own γ₂ so any consistent unit system works.

pub mod analytic;
pub mod error;
pub mod model;
pub mod observables;
pub mod steady;
pub mod wigner;

pub use error::{Error, Result};
pub use model::{DensityMatrix, Liouvillian, Truncation, VdpParams};
pub use observables::{ResponsePoint, Susceptibility};
pub use steady::SteadyStateResult;
pub use wigner::{GridKind, GridSpec, WignerGrid};

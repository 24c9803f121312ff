//! Error type shared by all modules of the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Parameter or argument validation failure; names the offending field.
    #[error("invalid {field}: {reason}")]
    InvalidInput { field: &'static str, reason: String },

    /// The requested truncation would overflow the superoperator dimension.
    #[error("Fock dimension {n_levels} exceeds solver capacity")]
    CapacityExceeded { n_levels: usize },

    /// The Liouvillian null space has dimension > 1, so no unique steady
    /// state exists (e.g. Ω = 0 with γ₁⁺ = γ₁⁻ = 0, where both |0⟩ and |1⟩
    /// are steady).
    #[error("degenerate steady manifold (null-space dimension {nullspace_dim})")]
    DegenerateSteadyState { nullspace_dim: usize },

    /// Adaptive truncation hit its cap with too much population in the top
    /// Fock levels.
    #[error("truncation cap {n_max} reached with tail mass {tail_mass:.3e} > {tail_tol:.3e}")]
    TruncationExceeded {
        n_max: usize,
        tail_mass: f64,
        tail_tol: f64,
    },

    /// The trace-constrained linear system was numerically singular.
    #[error("constrained steady-state system is numerically singular")]
    SolverSingular,

    /// Time evolution did not reach the requested derivative norm by t_max.
    #[error("time evolution not converged at t = {t_max}: |rho_dot| = {residual:.3e}")]
    NotConverged { t_max: f64, residual: f64 },

    /// Integration step lost trace conservation, indicating instability.
    #[error("integration unstable: trace drifted by {trace_drift:.3e}")]
    StepUnstable { trace_drift: f64 },

    /// ⟨a⟩ acquired an imaginary part, violating the real-drive phase
    /// convention.
    #[error("response has imaginary part {imag:.3e} beyond tolerance")]
    NonRealResponse { imag: f64 },

    /// Passive susceptibility χ_p = 2/γ₁⁻ is undefined for γ₁⁻ = 0.
    #[error("sensitivity gain undefined: passive susceptibility requires gamma1_minus > 0")]
    PassiveUndefined,

    /// Wigner evaluation overflowed intermediate scaling.
    #[error("Wigner evaluation overflow at n_levels = {n_levels} (capacity bound ~300)")]
    OverflowGuard { n_levels: usize },

    /// Inverse Wigner quadrature failed its probe round trip.
    #[error("Wigner inversion grid under-resolved: probe round-trip residual {residual:.3e}")]
    QuadratureUnderResolved { residual: f64 },

    /// Operands have incompatible dimensions.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

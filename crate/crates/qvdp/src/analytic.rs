//! Closed-form classical steady state and the asymptotic weak-drive
//! formulas. Everything here is algebraic; the numerical solvers are tested
//! against these expressions in their trusted regimes.
//!
//! Asymptotic formulas deliberately never raise out-of-regime errors (they
//! are routinely plotted beyond strict validity); callers annotate regimes
//! instead.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Classical mean-field parameters: ⍺̇ = γ₁α − γ₂|α|²α + Ω with
/// γ₁ = (γ₁⁺ − γ₁⁻)/2 (may be negative).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassicalParams {
    pub gamma1: f64,
    pub gamma2: f64,
    pub omega_drive: f64,
}

impl ClassicalParams {
    pub fn new(gamma1: f64, gamma2: f64, omega_drive: f64) -> Result<Self> {
        if !(gamma2 > 0.0) || !gamma2.is_finite() {
            return Err(Error::InvalidInput {
                field: "gamma2",
                reason: format!("must be > 0, got {gamma2}"),
            });
        }
        if !gamma1.is_finite() || !omega_drive.is_finite() || omega_drive < 0.0 {
            return Err(Error::InvalidInput {
                field: "omega_drive",
                reason: "gamma1 must be finite and omega_drive finite and >= 0".into(),
            });
        }
        Ok(Self {
            gamma1,
            gamma2,
            omega_drive,
        })
    }
}

/// Scaled steady-state amplitude: the stable root of x f − f³ + 1 = 0 on the
/// branch with f(0) = 1,
///
/// ```text
/// f(x) = (1/2 + √(1/4 − x³/27))^{1/3} + sgn(x)^{2/3} (1/2 − √(1/4 − x³/27))^{1/3},
/// ```
///
/// with principal-value complex powers. The imaginary parts cancel to
/// rounding; f is positive and continuous, f(x) → √x + 1/(2x) for x ≫ 1 and
/// f(x) → 1/|x| for x ≪ −1.
pub fn classical_f(x: f64) -> f64 {
    // With t = x³/27 and the principal values, the sgn(x)^{2/3} factor
    // reduces the real-discriminant branch to cube roots of
    // p = 1/2 + √(1/4 − t) and t/p (the rationalized form of
    // 1/2 − √(1/4 − t), which cancels catastrophically near x = 0).
    let t = x * x * x / 27.0;
    if t < 0.0 {
        // f = A − B with A = p^{1/3}, B = (−t/p)^{1/3}; A³ − B³ = p + t/p = 1
        // exactly, so f = 1/(A² + AB + B²) — stable where A ≈ B (x ≪ −1)
        let p = 0.5 + (0.25 - t).sqrt();
        let a = p.cbrt();
        let b = (-t / p).cbrt();
        1.0 / (a * a + a * b + b * b)
    } else if t <= 0.25 {
        let p = 0.5 + (0.25 - t).sqrt();
        p.cbrt() + (t / p).cbrt()
    } else {
        // complex-conjugate pair: 2 Re (1/2 + i√(t − 1/4))^{1/3}
        let root = (Complex64::new(0.5, (t - 0.25).sqrt())).powf(1.0 / 3.0);
        2.0 * root.re
    }
}

/// Cubic residual of `f` at `x`, scaled by the term magnitudes (the raw
/// monomials reach ~3·10⁴ over |x| ≤ 10³, so an absolute residual is not
/// meaningful in f64).
pub fn classical_f_residual(x: f64) -> f64 {
    let f = classical_f(x);
    let scale = (x * f).abs().max(f * f * f).max(1.0);
    (x * f - f * f * f + 1.0).abs() / scale
}

/// Classical steady-state response.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClassicalResponse {
    /// Ω > 0: unique phase-locked amplitude α = Ω̃^{1/3} f(γ̃₁/Ω̃^{2/3}).
    Locked(f64),
    /// Ω = 0, γ₁ ≤ 0: fully damped, response exactly 0.
    Quiescent,
    /// Ω = 0, γ₁ > 0: free limit cycle of radius √(γ₁/γ₂); the phase is
    /// undetermined, so only the magnitude is meaningful.
    FreeLimitCycle(f64),
}

impl ClassicalResponse {
    pub fn amplitude(&self) -> f64 {
        match *self {
            ClassicalResponse::Locked(a) => a,
            ClassicalResponse::Quiescent => 0.0,
            ClassicalResponse::FreeLimitCycle(r) => r,
        }
    }

    pub fn is_phase_locked(&self) -> bool {
        !matches!(self, ClassicalResponse::FreeLimitCycle(_))
    }
}

pub fn classical_response(p: &ClassicalParams) -> ClassicalResponse {
    if p.omega_drive == 0.0 {
        return if p.gamma1 > 0.0 {
            ClassicalResponse::FreeLimitCycle((p.gamma1 / p.gamma2).sqrt())
        } else {
            ClassicalResponse::Quiescent
        };
    }
    let om = p.omega_drive / p.gamma2;
    let x = (p.gamma1 / p.gamma2) / om.powf(2.0 / 3.0);
    ClassicalResponse::Locked(om.cbrt() * classical_f(x))
}

/// Classical susceptibility dα/dΩ for Ω > 0, from implicit differentiation
/// of the cubic: f' = f/(3f² − x), dα/dΩ = Ω̃^{−2/3}(f − 2xf')/(3γ₂).
pub fn classical_susceptibility(p: &ClassicalParams) -> Result<f64> {
    if !(p.omega_drive > 0.0) {
        return Err(Error::InvalidInput {
            field: "omega_drive",
            reason: "classical susceptibility needs omega_drive > 0".into(),
        });
    }
    let om = p.omega_drive / p.gamma2;
    let x = (p.gamma1 / p.gamma2) / om.powf(2.0 / 3.0);
    let f = classical_f(x);
    let fp = f / (3.0 * f * f - x);
    Ok(om.powf(-2.0 / 3.0) * (f - 2.0 * x * fp) / (3.0 * p.gamma2))
}

/// Two-level (damped, weak-drive) steady response
/// ⟨a⟩ = 2Ωγ₁⁻ / ((γ₁⁻)² + 8Ω²); peaks at 1/(2√2) at Ω = γ₁⁻/(2√2).
pub fn two_level_response(gamma1_minus: f64, omega: f64) -> f64 {
    2.0 * omega * gamma1_minus / (gamma1_minus * gamma1_minus + 8.0 * omega * omega)
}

/// Three-level weak-drive response, lowest order in γ₁±/γ₂ and Ω/γ₂:
/// ⟨a⟩ = (2Ω/γ₂)·[((γ₁⁺+γ₁⁻)γ₂ + 8Ω²)/((3γ₁⁺+γ₁⁻)² + 8Ω²)].
pub fn three_level_response(
    gamma1_plus: f64,
    gamma1_minus: f64,
    gamma2: f64,
    omega: f64,
) -> f64 {
    let num = (gamma1_plus + gamma1_minus) * gamma2 + 8.0 * omega * omega;
    let den = {
        let s = 3.0 * gamma1_plus + gamma1_minus;
        s * s + 8.0 * omega * omega
    };
    2.0 * omega / gamma2 * num / den
}

/// Zero-drive slope of the three-level response,
/// χ = 2(γ₁⁺+γ₁⁻)/(3γ₁⁺+γ₁⁻)².
pub fn three_level_chi(gamma1_plus: f64, gamma1_minus: f64) -> f64 {
    let s = 3.0 * gamma1_plus + gamma1_minus;
    2.0 * (gamma1_plus + gamma1_minus) / (s * s)
}

/// Linear susceptibility at the critical condition γ₁⁺ = γ₁⁻ = Γ₁ ≫ γ₂:
/// χ ≈ 2/√(πΓ₁γ₂).
pub fn critical_chi(big_gamma1: f64, gamma2: f64) -> f64 {
    2.0 / (std::f64::consts::PI * big_gamma1 * gamma2).sqrt()
}

/// Limit-cycle linear susceptibility, (γ₁⁺ − γ₁⁻) ≫ γ₂:
/// χ ≈ (2/(3γ₂))(1 − 2γ₁⁻/(3γ₁⁺)).
pub fn limitcycle_chi(gamma1_plus: f64, gamma1_minus: f64, gamma2: f64) -> f64 {
    2.0 / (3.0 * gamma2) * (1.0 - 2.0 * gamma1_minus / (3.0 * gamma1_plus))
}

/// Gaussian number statistics of the undriven limit cycle:
/// mean (γ₁⁺−γ₁⁻)/(2γ₂), std √((3γ₁⁺−γ₁⁻)/(4γ₂)).
pub fn limitcycle_gaussian(gamma1_plus: f64, gamma1_minus: f64, gamma2: f64) -> (f64, f64) {
    let mean = (gamma1_plus - gamma1_minus) / (2.0 * gamma2);
    let std = ((3.0 * gamma1_plus - gamma1_minus) / (4.0 * gamma2)).sqrt();
    (mean, std)
}

/// Half-Gaussian occupation profile at criticality:
/// p_n = (2ε/√π) e^{−(nε)²} with ε = √(γ₂/Γ₁).
pub fn critical_population_profile(big_gamma1: f64, gamma2: f64, n: usize) -> f64 {
    let eps = (gamma2 / big_gamma1).sqrt();
    let x = n as f64 * eps;
    2.0 * eps / std::f64::consts::PI.sqrt() * (-x * x).exp()
}

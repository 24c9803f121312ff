//! Physical quantities extracted from steady states: response, number
//! statistics, phase-space noise, SNR, susceptibility, and sensitivity gain.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::model::{DensityMatrix, Truncation, VdpParams};
use crate::steady::{solve_steady, SteadyStateResult};

/// Residual tolerance used by the internal solves of [`susceptibility`] and
/// [`gain0`]; leaves ≥ 6 significant digits after the finite-difference
/// division.
pub const DEFAULT_SOLVE_TOL: f64 = 1e-10;

/// Imaginary part of ⟨a⟩ beyond this flags a phase-convention violation.
const RESPONSE_IMAG_TOL: f64 = 1e-10;

/// Steady-state response ⟨a⟩ = Σ √n ρ_{n,n−1}, real by the drive phase
/// convention. Errors with [`Error::NonRealResponse`] if the imaginary part
/// exceeds 1e−10.
pub fn response(rho: &DensityMatrix) -> Result<f64> {
    let a = rho.expect_a();
    if a.im.abs() > RESPONSE_IMAG_TOL {
        return Err(Error::NonRealResponse { imag: a.im });
    }
    Ok(a.re)
}

/// Phase-space spread σ = √(⟨n⟩ + 1/2 − |⟨a⟩|²).
///
/// The radicand is non-negative for physical states; values below −1e−10
/// are clamped to zero with a warning.
pub fn noise_sigma(rho: &DensityMatrix) -> f64 {
    let arg = rho.mean_n() + 0.5 - rho.expect_a().norm_sqr();
    if arg < 0.0 {
        if arg < -1e-10 {
            log::warn!("noise variance {arg:.3e} < 0 clamped to 0 (unphysical state?)");
        }
        return 0.0;
    }
    arg.sqrt()
}

/// SNR = ⟨a⟩/σ; zero when the response is zero.
pub fn snr(rho: &DensityMatrix) -> Result<f64> {
    let r = response(rho)?;
    if r == 0.0 {
        return Ok(0.0);
    }
    let sigma = noise_sigma(rho);
    Ok(if sigma > 0.0 { r / sigma } else { 0.0 })
}

/// Number distribution p_n = ρ_{n,n}.
pub fn number_distribution(rho: &DensityMatrix) -> Vec<f64> {
    rho.populations()
}

/// Response, number, noise, and SNR of one steady state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResponsePoint {
    pub omega_drive: f64,
    pub response: f64,
    pub mean_n: f64,
    pub sigma: f64,
    pub snr: f64,
    pub n_levels: usize,
}

pub fn response_point(params: &VdpParams, res: &SteadyStateResult) -> Result<ResponsePoint> {
    Ok(ResponsePoint {
        omega_drive: params.omega_drive,
        response: response(&res.rho)?,
        mean_n: res.rho.mean_n(),
        sigma: noise_sigma(&res.rho),
        snr: snr(&res.rho)?,
        n_levels: res.n_levels,
    })
}

/// Finite-difference susceptibility χ = d⟨a⟩/dΩ with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Susceptibility {
    pub chi: f64,
    pub omega_at: f64,
    /// Base central-difference step δ.
    pub step: f64,
    /// Richardson comparison of the δ and δ/2 differences.
    pub estimate_error: f64,
}

/// Richardson-extrapolated central difference: combines D(δ) and D(δ/2)
/// into (4·D(δ/2) − D(δ))/3 and reports |D(δ/2) − D(δ)|/3 as the error
/// estimate of the leading correction.
pub(crate) fn central_richardson<F>(mut f: F, at: f64, delta: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut central = |h: f64| -> Result<f64> { Ok((f(at + h)? - f(at - h)?) / (2.0 * h)) };
    let d1 = central(delta)?;
    let d2 = central(0.5 * delta)?;
    Ok(((4.0 * d2 - d1) / 3.0, (d2 - d1).abs() / 3.0))
}

/// Susceptibility at drive `omega_at` (the drive stored in `params` is
/// ignored). Central differences with δ = max(10⁻³·Ω, 10⁻⁴·γ₂); the exact
/// oddness ⟨a⟩(−Ω) = −⟨a⟩(Ω) extends the stencil across zero, so the
/// degenerate Ω = 0 solve is never attempted and χ(0) costs one solve per
/// difference.
pub fn susceptibility(
    params: &VdpParams,
    omega_at: f64,
    trunc: &Truncation,
) -> Result<Susceptibility> {
    if !(omega_at >= 0.0) {
        return Err(Error::InvalidInput {
            field: "omega_at",
            reason: format!("must be >= 0, got {omega_at}"),
        });
    }
    let delta = (1e-3 * omega_at).max(1e-4 * params.gamma2);

    let mut cache: HashMap<u64, f64> = HashMap::new();
    let mut resp = |om: f64| -> Result<f64> {
        if om == 0.0 {
            // odd limit Ω → 0 of the unique branch
            return Ok(0.0);
        }
        let mag = om.abs();
        let sign = om.signum();
        if let Some(&v) = cache.get(&mag.to_bits()) {
            return Ok(sign * v);
        }
        let res = solve_steady(&params.with_drive(mag), trunc, DEFAULT_SOLVE_TOL)?;
        let v = response(&res.rho)?;
        cache.insert(mag.to_bits(), v);
        Ok(sign * v)
    };

    let (chi, estimate_error) = central_richardson(&mut resp, omega_at, delta)?;
    Ok(Susceptibility {
        chi,
        omega_at,
        step: delta,
        estimate_error,
    })
}

/// Weak-drive sensitivity gain over a passive (damped-only) oscillator,
/// G₀ = χ(Ω→0)/χ_p with χ_p = 2/γ₁⁻. Requires γ₁⁻ > 0.
pub fn gain0(params: &VdpParams, trunc: &Truncation) -> Result<f64> {
    if !(params.gamma1_minus > 0.0) {
        return Err(Error::PassiveUndefined);
    }
    let chi0 = susceptibility(params, 0.0, trunc)?.chi;
    Ok(chi0 * params.gamma1_minus / 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn params(gp: f64, gm: f64, g2: f64, om: f64) -> VdpParams {
        VdpParams::new(gp, gm, g2, om).unwrap()
    }

    #[test]
    fn response_of_diagonal_state_is_zero() {
        let mut rho = DensityMatrix::zeros(4);
        rho.set(0, 0, Complex64::new(0.4, 0.0));
        rho.set(1, 1, Complex64::new(0.6, 0.0));
        assert_eq!(response(&rho).unwrap(), 0.0);
    }

    #[test]
    fn response_reads_first_coherence() {
        let mut rho = DensityMatrix::zeros(4);
        rho.set(0, 0, Complex64::new(0.5, 0.0));
        rho.set(1, 1, Complex64::new(0.5, 0.0));
        rho.set(1, 0, Complex64::new(0.1, 0.0));
        rho.set(0, 1, Complex64::new(0.1, 0.0));
        assert!((response(&rho).unwrap() - 0.1).abs() < 1e-15);
    }

    #[test]
    fn response_of_coherent_state() {
        let rho = DensityMatrix::coherent(20, Complex64::new(0.5, 0.0));
        assert!((response(&rho).unwrap() - 0.5).abs() < 1e-8);
    }

    #[test]
    fn imaginary_coherence_is_rejected() {
        let mut rho = DensityMatrix::zeros(4);
        rho.set(0, 0, Complex64::ONE);
        rho.set(1, 0, Complex64::new(0.0, 0.1));
        rho.set(0, 1, Complex64::new(0.0, -0.1));
        assert!(matches!(
            response(&rho),
            Err(Error::NonRealResponse { .. })
        ));
    }

    #[test]
    fn sigma_of_reference_states() {
        let isqrt2 = std::f64::consts::FRAC_1_SQRT_2;
        assert!((noise_sigma(&DensityMatrix::vacuum(5)) - isqrt2).abs() < 1e-15);
        assert!((noise_sigma(&DensityMatrix::fock(5, 1)) - 1.224744871391589).abs() < 1e-15);
        // coherent states keep the vacuum spread
        let rho = DensityMatrix::coherent(20, Complex64::new(0.5, 0.0));
        assert!((noise_sigma(&rho) - isqrt2).abs() < 1e-6);
    }

    #[test]
    fn snr_of_reference_states() {
        assert_eq!(snr(&DensityMatrix::vacuum(5)).unwrap(), 0.0);
        let rho = DensityMatrix::coherent(20, Complex64::new(0.5, 0.0));
        assert!((snr(&rho).unwrap() - 0.7071067811865475).abs() < 1e-5);
    }

    #[test]
    fn moments_invariant_under_padding() {
        let p = params(0.0, 0.1, 1.0, 0.3);
        let res = solve_steady(&p, &Truncation::default(), 1e-10).unwrap();
        let padded = res.rho.padded(res.n_levels + 7);
        assert_eq!(response(&res.rho).unwrap(), response(&padded).unwrap());
        assert_eq!(res.rho.mean_n(), padded.mean_n());
        assert_eq!(noise_sigma(&res.rho), noise_sigma(&padded));
    }

    #[test]
    fn number_distribution_of_vacuum() {
        let p = number_distribution(&DensityMatrix::vacuum(4));
        assert_eq!(p, vec![1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn number_distribution_of_steady_state_is_physical() {
        let p = params(0.5, 0.2, 1.0, 0.4);
        let res = solve_steady(&p, &Truncation::default(), 1e-10).unwrap();
        let dist = number_distribution(&res.rho);
        let total: f64 = dist.iter().sum();
        assert!((total - 1.0).abs() < 1e-10);
        assert!(dist.iter().all(|&x| x >= -1e-10));
    }

    #[test]
    fn critical_zero_drive_susceptibility_saturates_at_two() {
        let p = params(0.0, 0.0, 1.0, 0.0);
        let s = susceptibility(&p, 0.0, &Truncation::default()).unwrap();
        assert!(
            (s.chi - 2.0).abs() <= 0.02 * 2.0,
            "χ·γ₂ = {} (error estimate {})",
            s.chi,
            s.estimate_error
        );
    }

    #[test]
    fn damped_zero_drive_susceptibility_diverges_as_passive() {
        let p = params(0.0, 0.01, 1.0, 0.0);
        let s = susceptibility(&p, 0.0, &Truncation::default()).unwrap();
        assert!(
            (s.chi - 200.0).abs() <= 0.03 * 200.0,
            "χ₀ = {} vs 2/γ₁⁻ = 200",
            s.chi
        );
    }

    #[test]
    fn richardson_estimate_bounds_extrapolation_error() {
        // analytic two-level curve as the function under differentiation
        let g = 0.02;
        let true_chi = |om: f64| {
            // d/dΩ of 2Ωγ/(γ² + 8Ω²)
            let den = g * g + 8.0 * om * om;
            2.0 * g * (g * g - 8.0 * om * om) / (den * den)
        };
        for om in [0.0f64, 0.005, 0.02, 0.1] {
            let delta = f64::max(1e-3 * om, 1e-4);
            let (chi, err) = central_richardson(
                |x| Ok(crate::analytic::two_level_response(g, x)),
                om,
                delta,
            )
            .unwrap();
            let actual = (chi - true_chi(om)).abs();
            assert!(
                actual <= 2.0 * err.max(1e-12),
                "at Ω = {om}: extrapolation error {actual:e} vs estimate {err:e}"
            );
        }
    }

    #[test]
    fn nonmonotonic_response_dip_location() {
        // γ₁⁺ = 0, γ₁⁻/γ₂ = 0.02: local max then local min, the min within
        // ±20% of √(γ₁⁻γ₂)/(2√2) = 0.05; the max within 15% of the
        // two-level ceiling 1/(2√2)
        let g = 0.02;
        let n_pts = 25;
        let (lo, hi) = (1e-3f64, 0.3f64);
        let mut values = Vec::new();
        for i in 0..n_pts {
            let om = lo * (hi / lo).powf(i as f64 / (n_pts - 1) as f64);
            let p = params(0.0, g, 1.0, om);
            let res = solve_steady(&p, &Truncation::default(), 1e-10).unwrap();
            values.push((om, response(&res.rho).unwrap()));
        }
        let mut max_idx = None;
        for i in 1..n_pts - 1 {
            if values[i].1 > values[i - 1].1 && values[i].1 > values[i + 1].1 {
                max_idx = Some(i);
                break;
            }
        }
        let max_idx = max_idx.expect("no local maximum found");
        let mut min_idx = None;
        for i in max_idx + 1..n_pts - 1 {
            if values[i].1 < values[i - 1].1 && values[i].1 < values[i + 1].1 {
                min_idx = Some(i);
                break;
            }
        }
        let min_idx = min_idx.expect("no local minimum found");
        let om_min = values[min_idx].0;
        let expected = (g * 1.0f64).sqrt() / (2.0 * 2f64.sqrt());
        assert!(
            (om_min / expected - 1.0).abs() <= 0.2,
            "dip at Ω = {om_min}, expected near {expected}"
        );
        let peak = values[max_idx].1;
        let ceiling = 1.0 / (2.0 * 2f64.sqrt());
        assert!(
            (peak / ceiling - 1.0).abs() <= 0.15,
            "peak {peak} vs two-level ceiling {ceiling}"
        );
    }

    #[test]
    fn gain_requires_damping() {
        let p = params(1.0, 0.0, 1.0, 0.0);
        assert!(matches!(
            gain0(&p, &Truncation::default()),
            Err(Error::PassiveUndefined)
        ));
    }

    #[test]
    fn gain_matches_chi_ratio() {
        let p = params(0.0, 0.05, 1.0, 0.0);
        let g0 = gain0(&p, &Truncation::default()).unwrap();
        let chi0 = susceptibility(&p, 0.0, &Truncation::default()).unwrap().chi;
        assert!((g0 - chi0 * 0.05 / 2.0).abs() < 1e-12);
        // a purely damped oscillator has no gain: G₀ ≈ 1 only as γ₂ → 0;
        // with γ₂ comparable it is below 1
        assert!(g0 <= 1.0 + 1e-6);
    }
}

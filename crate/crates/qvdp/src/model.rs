//! Physical parameters and the Lindblad generator in a truncated Fock basis.
//!
//! In the Fock basis the generator acts elementwise as
//!
//! ```text
//! ρ̇_{n,n'} = Ω (√n ρ_{n-1,n'} − √(n+1) ρ_{n+1,n'} + √n' ρ_{n,n'-1} − √(n'+1) ρ_{n,n'+1})
//!          + γ₁⁺ [√(n n') ρ_{n-1,n'-1} − ((n+n')/2 + 1) ρ_{n,n'}]
//!          + γ₁⁻ [√((n+1)(n'+1)) ρ_{n+1,n'+1} − (n+n')/2 ρ_{n,n'}]
//!          + γ₂ [√((n+2)(n+1)(n'+2)(n'+1)) ρ_{n+2,n'+2} − (n(n-1)+n'(n'-1))/2 ρ_{n,n'}] .
//! ```
//!
//! The drive couples neighboring elements; the dissipators couple only
//! elements on the same diagonal n − n' = const. All coefficients are real,
//! so the generator maps real matrices to real matrices and the steady state
//! is real and symmetric.
//!
//! Truncation keeps |0⟩..|N−1⟩ and is applied at the operator level: ladder
//! matrices are clipped to the N-dimensional space, so terms that would reach
//! |N⟩ are dropped with no reflection. The clipped operators still form an
//! exact Lindblad generator on the truncated space; in particular the gain
//! dissipator cannot pump out of the top level, which keeps the generator
//! exactly trace-annihilating. The truncation error is controlled by the
//! occupation of the top levels (the tail test in `steady`).

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Superoperator dimension N² is kept well below index-arithmetic limits;
/// dense diagnostics and the Wigner scaling bound break down long before.
const MAX_LEVELS: usize = 4096;

/// The four rates defining the driven van der Pol oscillator.
///
/// `omega_drive` may carry a sign: the drive phase is fixed so that Ω ≥ 0 is
/// the physical convention, and a negative value represents a π phase flip
/// (used by the drive-antisymmetry identity ⟨a⟩(−Ω) = −⟨a⟩(Ω)).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VdpParams {
    /// One-particle gain rate γ₁⁺ ≥ 0.
    pub gamma1_plus: f64,
    /// One-particle loss rate γ₁⁻ ≥ 0.
    pub gamma1_minus: f64,
    /// Two-particle loss rate γ₂ > 0.
    pub gamma2: f64,
    /// Resonant drive amplitude Ω (real; sign = π phase flip).
    pub omega_drive: f64,
}

impl VdpParams {
    pub fn new(
        gamma1_plus: f64,
        gamma1_minus: f64,
        gamma2: f64,
        omega_drive: f64,
    ) -> Result<Self> {
        let p = Self {
            gamma1_plus,
            gamma1_minus,
            gamma2,
            omega_drive,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let check = |field: &'static str, v: f64, positive: bool| -> Result<()> {
            if !v.is_finite() {
                return Err(Error::InvalidInput {
                    field,
                    reason: format!("must be finite, got {v}"),
                });
            }
            if positive && v <= 0.0 {
                return Err(Error::InvalidInput {
                    field,
                    reason: format!("must be > 0, got {v}"),
                });
            }
            if !positive && v < 0.0 {
                return Err(Error::InvalidInput {
                    field,
                    reason: format!("must be >= 0, got {v}"),
                });
            }
            Ok(())
        };
        check("gamma1_plus", self.gamma1_plus, false)?;
        check("gamma1_minus", self.gamma1_minus, false)?;
        check("gamma2", self.gamma2, true)?;
        if !self.omega_drive.is_finite() {
            return Err(Error::InvalidInput {
                field: "omega_drive",
                reason: format!("must be finite, got {}", self.omega_drive),
            });
        }
        Ok(())
    }

    /// Net linear (anti)damping γ₁ = (γ₁⁺ − γ₁⁻)/2.
    pub fn gamma1(&self) -> f64 {
        0.5 * (self.gamma1_plus - self.gamma1_minus)
    }

    /// Average one-particle rate Γ₁ = (γ₁⁺ + γ₁⁻)/2.
    pub fn big_gamma1(&self) -> f64 {
        0.5 * (self.gamma1_plus + self.gamma1_minus)
    }

    /// Same parameters with the drive replaced.
    pub fn with_drive(&self, omega_drive: f64) -> Self {
        Self {
            omega_drive,
            ..*self
        }
    }
}

/// Fock-space truncation policy for adaptive steady-state solves.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Truncation {
    /// Initial Fock dimension N (states |0⟩..|N−1⟩), at least 3.
    pub n_levels: usize,
    /// Maximum allowed population of the top two levels.
    pub tail_tol: f64,
    /// Cap for adaptive growth.
    pub n_max: usize,
}

impl Truncation {
    pub fn new(n_levels: usize, tail_tol: f64, n_max: usize) -> Result<Self> {
        let t = Self {
            n_levels,
            tail_tol,
            n_max,
        };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_levels < 3 {
            return Err(Error::InvalidInput {
                field: "n_levels",
                reason: format!("must be >= 3, got {}", self.n_levels),
            });
        }
        if !(self.tail_tol > 0.0 && self.tail_tol < 1.0) {
            return Err(Error::InvalidInput {
                field: "tail_tol",
                reason: format!("must be in (0, 1), got {}", self.tail_tol),
            });
        }
        if self.n_max < self.n_levels {
            return Err(Error::InvalidInput {
                field: "n_max",
                reason: format!("must be >= n_levels, got {}", self.n_max),
            });
        }
        Ok(())
    }
}

impl Default for Truncation {
    fn default() -> Self {
        Self {
            n_levels: 15,
            tail_tol: 1e-10,
            n_max: 400,
        }
    }
}

/// Dense complex matrix in the truncated Fock basis, row-major.
///
/// Used for density matrices and their derivatives. Physical states are
/// Hermitian with unit trace and eigenvalues ≥ −1e−8 (up to solver noise);
/// validation helpers let callers check these when needed.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl DensityMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![Complex64::ZERO; dim * dim],
        }
    }

    /// |0⟩⟨0|.
    pub fn vacuum(dim: usize) -> Self {
        Self::fock(dim, 0)
    }

    /// |n⟩⟨n|.
    pub fn fock(dim: usize, n: usize) -> Self {
        assert!(n < dim, "Fock index {n} out of range for dim {dim}");
        let mut rho = Self::zeros(dim);
        rho.set(n, n, Complex64::ONE);
        rho
    }

    /// Truncated coherent state |α⟩⟨α| with c_n = e^{−|α|²/2} αⁿ/√(n!).
    pub fn coherent(dim: usize, alpha: Complex64) -> Self {
        let mut amp = Vec::with_capacity(dim);
        let mut c = Complex64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
        amp.push(c);
        for n in 1..dim {
            c *= alpha / (n as f64).sqrt();
            amp.push(c);
        }
        let mut rho = Self::zeros(dim);
        for n in 0..dim {
            for m in 0..dim {
                rho.set(n, m, amp[n] * amp[m].conj());
            }
        }
        rho
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, n: usize, m: usize) -> Complex64 {
        self.data[n * self.dim + m]
    }

    #[inline]
    pub fn set(&mut self, n: usize, m: usize, v: Complex64) {
        self.data[n * self.dim + m] = v;
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|n| self.get(n, n)).sum()
    }

    /// max |ρ_{n,n'} − conj(ρ_{n',n})|.
    pub fn hermiticity_error(&self) -> f64 {
        let mut err = 0.0f64;
        for n in 0..self.dim {
            for m in n..self.dim {
                err = err.max((self.get(n, m) - self.get(m, n).conj()).norm());
            }
        }
        err
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// ⟨n̂⟩ = Σ n ρ_{n,n}.
    pub fn mean_n(&self) -> f64 {
        (0..self.dim).map(|n| n as f64 * self.get(n, n).re).sum()
    }

    /// ⟨a⟩ = Σ √n ρ_{n,n−1}.
    pub fn expect_a(&self) -> Complex64 {
        (1..self.dim)
            .map(|n| (n as f64).sqrt() * self.get(n, n - 1))
            .sum()
    }

    /// ⟨a†aa⟩ = Σ √n (n−1) ρ_{n,n−1}.
    pub fn expect_adag_a_a(&self) -> Complex64 {
        (1..self.dim)
            .map(|n| (n as f64).sqrt() * (n as f64 - 1.0) * self.get(n, n - 1))
            .sum()
    }

    /// Diagonal populations p_n = Re ρ_{n,n}.
    pub fn populations(&self) -> Vec<f64> {
        (0..self.dim).map(|n| self.get(n, n).re).collect()
    }

    /// Population of the top two levels, the truncation-quality measure.
    pub fn tail_mass(&self) -> f64 {
        if self.dim < 2 {
            return self.get(self.dim - 1, self.dim - 1).re;
        }
        self.get(self.dim - 1, self.dim - 1).re + self.get(self.dim - 2, self.dim - 2).re
    }

    /// Same state embedded in a larger space with zero-filled new levels.
    pub fn padded(&self, new_dim: usize) -> Self {
        assert!(new_dim >= self.dim);
        let mut out = Self::zeros(new_dim);
        for n in 0..self.dim {
            for m in 0..self.dim {
                out.set(n, m, self.get(n, m));
            }
        }
        out
    }

    /// Entrywise infinity norm of the difference.
    pub fn max_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Smallest eigenvalue of the Hermitian part; physical states satisfy
    /// λ_min ≥ −1e−8 up to solver tolerance.
    pub fn min_eigenvalue(&self) -> f64 {
        use faer::Side;
        let h = faer::Mat::<faer::c64>::from_fn(self.dim, self.dim, |i, j| {
            0.5 * (self.get(i, j) + self.get(j, i).conj())
        });
        let evs = h
            .self_adjoint_eigenvalues(Side::Lower)
            .expect("hermitian eigensolve");
        evs.into_iter().fold(f64::INFINITY, f64::min)
    }
}

/// Real coefficient c_k of a†a-like number factors under operator clipping:
/// the gain dissipator cannot pump out of the top level.
#[inline]
fn gain_number(k: usize, n_levels: usize) -> f64 {
    if k + 1 < n_levels {
        (k + 1) as f64
    } else {
        0.0
    }
}

/// Enumerates every nonzero coefficient of the generator: for each target
/// element (n, n') and source element (a, b), calls `emit(n, n', a, b, c)`
/// meaning ρ̇_{n,n'} += c · ρ_{a,b}. Deterministic order.
pub(crate) fn for_each_coefficient<F: FnMut(usize, usize, usize, usize, f64)>(
    params: &VdpParams,
    n_levels: usize,
    mut emit: F,
) {
    let nl = n_levels;
    let (gp, gm, g2, om) = (
        params.gamma1_plus,
        params.gamma1_minus,
        params.gamma2,
        params.omega_drive,
    );
    for n in 0..nl {
        for np in 0..nl {
            let (nf, npf) = (n as f64, np as f64);
            // drive
            if om != 0.0 {
                if n >= 1 {
                    emit(n, np, n - 1, np, om * nf.sqrt());
                }
                if n + 1 < nl {
                    emit(n, np, n + 1, np, -om * (nf + 1.0).sqrt());
                }
                if np >= 1 {
                    emit(n, np, n, np - 1, om * npf.sqrt());
                }
                if np + 1 < nl {
                    emit(n, np, n, np + 1, -om * (npf + 1.0).sqrt());
                }
            }
            // one-particle gain (clipped at the top level)
            if gp != 0.0 {
                if n >= 1 && np >= 1 {
                    emit(n, np, n - 1, np - 1, gp * (nf * npf).sqrt());
                }
                let c = 0.5 * (gain_number(n, nl) + gain_number(np, nl));
                if c != 0.0 {
                    emit(n, np, n, np, -gp * c);
                }
            }
            // one-particle loss
            if gm != 0.0 {
                if n + 1 < nl && np + 1 < nl {
                    emit(n, np, n + 1, np + 1, gm * ((nf + 1.0) * (npf + 1.0)).sqrt());
                }
                if n + np > 0 {
                    emit(n, np, n, np, -gm * 0.5 * (nf + npf));
                }
            }
            // two-particle loss
            if g2 != 0.0 {
                if n + 2 < nl && np + 2 < nl {
                    let c = ((nf + 2.0) * (nf + 1.0) * (npf + 2.0) * (npf + 1.0)).sqrt();
                    emit(n, np, n + 2, np + 2, g2 * c);
                }
                let c = 0.5 * (nf * (nf - 1.0) + npf * (npf - 1.0));
                if c != 0.0 {
                    emit(n, np, n, np, -g2 * c);
                }
            }
        }
    }
}

/// Sparse superoperator L with vec(ρ̇) = L·vec(ρ), row-major vectorization
/// idx(n, n') = n·N + n'. Coefficients are real (real-drive phase
/// convention); stored CSR with deterministic entry ordering.
#[derive(Debug, Clone)]
pub struct Liouvillian {
    n_levels: usize,
    params: VdpParams,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl Liouvillian {
    pub fn n_levels(&self) -> usize {
        self.n_levels
    }

    pub fn params(&self) -> &VdpParams {
        &self.params
    }

    /// Superoperator dimension N².
    pub fn dim(&self) -> usize {
        self.n_levels * self.n_levels
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// y = L x over a complex vectorized matrix.
    pub fn apply_vec(&self, x: &[Complex64], y: &mut [Complex64]) {
        assert_eq!(x.len(), self.dim());
        assert_eq!(y.len(), self.dim());
        for (row, y_r) in y.iter_mut().enumerate() {
            let mut acc = Complex64::ZERO;
            for k in self.row_ptr[row]..self.row_ptr[row + 1] {
                acc += self.values[k] * x[self.col_idx[k]];
            }
            *y_r = acc;
        }
    }

    /// ρ̇ = L ρ via the sparse matrix action.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if rho.dim() != self.n_levels {
            return Err(Error::DimensionMismatch {
                expected: self.n_levels,
                got: rho.dim(),
            });
        }
        let mut out = DensityMatrix::zeros(self.n_levels);
        let (x, y) = (rho.as_slice().to_vec(), out.as_mut_slice());
        self.apply_vec(&x, y);
        Ok(out)
    }

    /// Row-sum (infinity) norm.
    pub fn norm_inf(&self) -> f64 {
        (0..self.dim())
            .map(|r| {
                self.values[self.row_ptr[r]..self.row_ptr[r + 1]]
                    .iter()
                    .map(|v| v.abs())
                    .sum()
            })
            .fold(0.0, f64::max)
    }

    /// Entries as (row, col, value) triplets in CSR order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.dim()).flat_map(move |r| {
            (self.row_ptr[r]..self.row_ptr[r + 1]).map(move |k| (r, self.col_idx[k], self.values[k]))
        })
    }

    /// Dense copy, for small-dimension diagnostics (null-space SVD).
    pub fn to_dense(&self) -> faer::Mat<f64> {
        let d = self.dim();
        let mut m = faer::Mat::<f64>::zeros(d, d);
        for (r, c, v) in self.triplets() {
            m[(r, c)] += v;
        }
        m
    }
}

/// Builds the sparse generator for `params` on `n_levels` Fock states.
pub fn build_liouvillian(params: &VdpParams, n_levels: usize) -> Result<Liouvillian> {
    params.validate()?;
    if n_levels < 3 {
        return Err(Error::InvalidInput {
            field: "n_levels",
            reason: format!("must be >= 3, got {n_levels}"),
        });
    }
    if n_levels > MAX_LEVELS || n_levels.checked_mul(n_levels).is_none() {
        return Err(Error::CapacityExceeded { n_levels });
    }
    let dim = n_levels * n_levels;
    let idx = |n: usize, np: usize| n * n_levels + np;

    let mut trips: Vec<(usize, usize, f64)> = Vec::with_capacity(8 * dim);
    for_each_coefficient(params, n_levels, |n, np, a, b, c| {
        trips.push((idx(n, np), idx(a, b), c));
    });
    // CSR with sorted, merged duplicates: deterministic entry ordering.
    trips.sort_unstable_by_key(|&(r, c, _)| (r, c));
    let mut row_ptr = vec![0usize; dim + 1];
    let mut col_idx = Vec::with_capacity(trips.len());
    let mut values = Vec::with_capacity(trips.len());
    let mut last = None;
    for (r, c, v) in trips {
        if last == Some((r, c)) {
            *values.last_mut().unwrap() += v;
        } else {
            row_ptr[r + 1] += 1;
            col_idx.push(c);
            values.push(v);
            last = Some((r, c));
        }
    }
    // prefix-sum row counts
    for r in 0..dim {
        row_ptr[r + 1] += row_ptr[r];
    }
    Ok(Liouvillian {
        n_levels,
        params: *params,
        row_ptr,
        col_idx,
        values,
    })
}

/// ρ̇ evaluated matrix-free, directly from the Fock-basis equation of motion.
///
/// Independent of [`build_liouvillian`]; the two agree elementwise to 1e−13,
/// which the tests use as a construction cross-check.
pub fn apply_liouvillian(params: &VdpParams, rho: &DensityMatrix) -> Result<DensityMatrix> {
    params.validate()?;
    let nl = rho.dim();
    if nl < 3 {
        return Err(Error::InvalidInput {
            field: "rho",
            reason: format!("needs dim >= 3, got {nl}"),
        });
    }
    let (gp, gm, g2, om) = (
        params.gamma1_plus,
        params.gamma1_minus,
        params.gamma2,
        params.omega_drive,
    );
    let mut out = DensityMatrix::zeros(nl);
    for n in 0..nl {
        for np in 0..nl {
            let (nf, npf) = (n as f64, np as f64);
            let mut acc = Complex64::ZERO;

            let mut drive = Complex64::ZERO;
            if n >= 1 {
                drive += nf.sqrt() * rho.get(n - 1, np);
            }
            if n + 1 < nl {
                drive -= (nf + 1.0).sqrt() * rho.get(n + 1, np);
            }
            if np >= 1 {
                drive += npf.sqrt() * rho.get(n, np - 1);
            }
            if np + 1 < nl {
                drive -= (npf + 1.0).sqrt() * rho.get(n, np + 1);
            }
            acc += om * drive;

            let mut gain = -0.5 * (gain_number(n, nl) + gain_number(np, nl)) * rho.get(n, np);
            if n >= 1 && np >= 1 {
                gain += (nf * npf).sqrt() * rho.get(n - 1, np - 1);
            }
            acc += gp * gain;

            let mut loss = -0.5 * (nf + npf) * rho.get(n, np);
            if n + 1 < nl && np + 1 < nl {
                loss += ((nf + 1.0) * (npf + 1.0)).sqrt() * rho.get(n + 1, np + 1);
            }
            acc += gm * loss;

            let mut two = -0.5 * (nf * (nf - 1.0) + npf * (npf - 1.0)) * rho.get(n, np);
            if n + 2 < nl && np + 2 < nl {
                two += ((nf + 2.0) * (nf + 1.0) * (npf + 2.0) * (npf + 1.0)).sqrt()
                    * rho.get(n + 2, np + 2);
            }
            acc += g2 * two;

            out.set(n, np, acc);
        }
    }
    Ok(out)
}

/// Difference between the two routes to d⟨a⟩/dt: the generator action
/// Tr(a·Lρ) versus the mode equation γ₁⟨a⟩ − γ₂⟨a†aa⟩ + Ω.
///
/// Vanishes (to ~1e−10) whenever the truncation tail is negligible; a large
/// value flags either a generator bug or an invalid truncation. Logs a
/// warning when the top-level occupation is big enough to spoil the identity.
pub fn mode_equation_residual(params: &VdpParams, rho: &DensityMatrix) -> Result<Complex64> {
    let rho_dot = apply_liouvillian(params, rho)?;
    let lhs = rho_dot.expect_a();
    let rhs = params.gamma1() * rho.expect_a() - params.gamma2 * rho.expect_adag_a_a()
        + params.omega_drive;
    let top = rho.get(rho.dim() - 1, rho.dim() - 1).re.abs();
    if top > 1e-8 {
        log::warn!(
            "mode-equation check with top-level occupation {top:.3e}: truncation may spoil the identity"
        );
    }
    Ok(lhs - rhs)
}

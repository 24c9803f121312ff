//! Wigner quasiprobability representation of truncated density matrices.
//!
//! In polar coordinates α = r e^{iφ} the forward map is
//!
//! ```text
//! W(r,φ) = (2/π) e^{−2r²} [ Σ_n (−1)^n L_n(4r²) ρ_{n,n}
//!        + Σ_{j≥1} (2r)^j Σ_n (−1)^n L_n^{(j)}(4r²)/√((n+1)_j)
//!          (e^{−ijφ} ρ_{n+j,n} + e^{ijφ} ρ_{n,n+j}) ] ,
//! ```
//!
//! real by Hermiticity, bounded by |W| ≤ 2/π, normalized as ∫W d²α = 1, and
//! angle-independent for diagonal ρ. Its inverse is
//!
//! ```text
//! ρ_{n,n'} = (−1)^{n'} √(n'!/n!) ∫dφ e^{i(n−n')φ}
//!            ∫dr e^{−2r²} (2r)^{n−n'+1} L_{n'}^{(n−n')}(4r²) W(r,φ) .
//! ```
//!
//! The j-th off-diagonal carries exactly the ±j angular harmonics, so the
//! angular integral is done by the periodic trapezoid rule (exact once the
//! harmonic content is resolved) and the radial integral by Gauss–Legendre
//! on [0, r_max]. Factorial ratios and the (2r)^j e^{−2r²} factor combine in
//! log space, which keeps intermediates finite up to a few hundred levels.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::DensityMatrix;

const TWO_OVER_PI: f64 = 2.0 / std::f64::consts::PI;

/// Associated Laguerre polynomial L_n^{(j)}(x) by the three-term upward
/// recurrence in n; relative accuracy ~1e−15 for n ≤ 200, x ≤ 400.
pub fn laguerre_assoc(n: usize, j: usize, x: f64) -> f64 {
    let mut col = vec![0.0; n + 1];
    laguerre_column(n, j, x, &mut col);
    col[n]
}

/// Fills `out[k] = L_k^{(j)}(x)` for k = 0..=n_max.
fn laguerre_column(n_max: usize, j: usize, x: f64, out: &mut [f64]) {
    debug_assert!(out.len() > n_max);
    out[0] = 1.0;
    if n_max == 0 {
        return;
    }
    out[1] = 1.0 + j as f64 - x;
    for k in 1..n_max {
        let kf = k as f64;
        out[k + 1] =
            ((2.0 * kf + j as f64 + 1.0 - x) * out[k] - (kf + j as f64) * out[k - 1]) / (kf + 1.0);
    }
}

/// ln(n!) table, built once per evaluation batch.
struct LnFact(Vec<f64>);

impl LnFact {
    fn up_to(n: usize) -> Self {
        let mut v = Vec::with_capacity(n + 1);
        v.push(0.0);
        let mut acc = 0.0;
        for k in 1..=n {
            acc += (k as f64).ln();
            v.push(acc);
        }
        LnFact(v)
    }

    #[inline]
    fn get(&self, n: usize) -> f64 {
        self.0[n]
    }

    /// ln (n+1)_j = ln((n+j)!/n!).
    #[inline]
    fn ln_pochhammer(&self, n: usize, j: usize) -> f64 {
        self.get(n + j) - self.get(n)
    }
}

/// Angular harmonic decomposition of W at one radius:
/// W(r,φ) = (2/π)(h[0] + Σ_{j≥1} 2 Re(h[j] e^{−ijφ})).
struct RadialHarmonics {
    h: Vec<Complex64>,
}

fn radial_harmonics(rho: &DensityMatrix, r: f64, lnfact: &LnFact) -> Result<RadialHarmonics> {
    let nl = rho.dim();
    let x = 4.0 * r * r;
    let ln_2r = (2.0 * r).ln(); // −inf at r = 0; exp(j·(−inf)) = 0 below
    let mut lag = vec![0.0; nl];
    let mut h = vec![Complex64::ZERO; nl];

    for j in 0..nl {
        let n_count = nl - j;
        laguerre_column(n_count - 1, j, x, &mut lag[..n_count]);
        let mut acc = Complex64::ZERO;
        for n in 0..n_count {
            let l = lag[n];
            if !l.is_finite() {
                return Err(Error::OverflowGuard { n_levels: nl });
            }
            let elem = if j == 0 {
                Complex64::new(rho.get(n, n).re, 0.0)
            } else {
                // symmetrized lower-triangle element of a Hermitian ρ
                0.5 * (rho.get(n + j, n) + rho.get(n, n + j).conj())
            };
            if elem == Complex64::ZERO {
                continue;
            }
            // j = 0 carries no (2r)^j factor; skipping it avoids 0·ln(0)
            let radial_power = if j == 0 { 0.0 } else { j as f64 * ln_2r };
            let log_w = -2.0 * r * r + radial_power - 0.5 * lnfact.ln_pochhammer(n, j);
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            acc += sign * l * log_w.exp() * elem;
        }
        h[j] = acc;
    }
    Ok(RadialHarmonics { h })
}

impl RadialHarmonics {
    fn eval(&self, phi: f64) -> f64 {
        let mut w = self.h[0].re;
        for (j, hj) in self.h.iter().enumerate().skip(1) {
            if hj.norm_sqr() == 0.0 {
                continue;
            }
            let phase = Complex64::from_polar(1.0, -(j as f64) * phi);
            w += 2.0 * (hj * phase).re;
        }
        TWO_OVER_PI * w
    }
}

/// W(α) at a single phase-space point α = r e^{iφ}.
pub fn wigner_at(rho: &DensityMatrix, r: f64, phi: f64) -> Result<f64> {
    if !(r >= 0.0) {
        return Err(Error::InvalidInput {
            field: "r",
            reason: format!("must be >= 0, got {r}"),
        });
    }
    let lnfact = LnFact::up_to(rho.dim());
    Ok(radial_harmonics(rho, r, &lnfact)?.eval(phi))
}

/// Default phase-space radius covering the state: 2 + 3√(⟨n⟩+1).
pub fn auto_r_max(rho: &DensityMatrix) -> f64 {
    2.0 + 3.0 * (rho.mean_n() + 1.0).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridKind {
    Polar,
    Cartesian,
}

/// Requested sampling layout. `None` sizes default to [`auto_r_max`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GridSpec {
    Polar {
        n_radial: usize,
        n_angular: usize,
        r_max: Option<f64>,
    },
    Cartesian {
        n_x: usize,
        n_y: usize,
        half_width: Option<f64>,
    },
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec::Polar {
            n_radial: 200,
            n_angular: 256,
            r_max: None,
        }
    }
}

/// Sampled Wigner values with the quadrature data needed for the integral
/// functionals (normalization, center of mass, second moment).
#[derive(Debug, Clone)]
pub struct WignerGrid {
    pub kind: GridKind,
    /// Radii (polar, Gauss–Legendre nodes) or x nodes (cartesian, uniform).
    pub nodes_a: Vec<f64>,
    /// Angles in [0, 2π) (polar, uniform) or y nodes (cartesian, uniform).
    pub nodes_b: Vec<f64>,
    /// Row-major over (a, b): `values[ia * nodes_b.len() + ib]`.
    pub values: Vec<f64>,
    pub r_max: f64,
    weights_a: Vec<f64>,
}

impl WignerGrid {
    #[inline]
    pub fn value(&self, ia: usize, ib: usize) -> f64 {
        self.values[ia * self.nodes_b.len() + ib]
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Weighted sum of g(α)·W(α) over the grid measure d²α.
    fn functional<G: Fn(f64, f64) -> Complex64>(&self, g: G) -> Complex64 {
        let nb = self.nodes_b.len();
        let mut acc = Complex64::ZERO;
        match self.kind {
            GridKind::Polar => {
                let dphi = 2.0 * std::f64::consts::PI / nb as f64;
                for (ia, (&r, &wr)) in self.nodes_a.iter().zip(&self.weights_a).enumerate() {
                    let mut inner = Complex64::ZERO;
                    for (ib, &phi) in self.nodes_b.iter().enumerate() {
                        inner += g(r, phi) * self.value(ia, ib);
                    }
                    acc += wr * r * dphi * inner;
                }
            }
            GridKind::Cartesian => {
                let wy = trapezoid_weights(&self.nodes_b);
                for (ia, (&x, &wx)) in self.nodes_a.iter().zip(&self.weights_a).enumerate() {
                    for (ib, &y) in self.nodes_b.iter().enumerate() {
                        let (r, phi) = ((x * x + y * y).sqrt(), y.atan2(x));
                        acc += wx * wy[ib] * g(r, phi) * self.value(ia, ib);
                    }
                }
            }
        }
        acc
    }

    /// ∫ W d²α, equal to 1 when r_max covers the state.
    pub fn integral(&self) -> f64 {
        self.functional(|_, _| Complex64::ONE).re
    }

    /// ∫ α W d²α, which equals ⟨a⟩.
    pub fn center_of_mass(&self) -> Complex64 {
        self.functional(|r, phi| Complex64::from_polar(r, phi))
    }

    /// ∫ |α|² W d²α, which equals ⟨n⟩ + 1/2.
    pub fn second_moment(&self) -> f64 {
        self.functional(|r, _| Complex64::new(r * r, 0.0)).re
    }

    /// Largest angular variation max_φ W − min_φ W over any radius row;
    /// zero (to rounding) for diagonal density matrices.
    pub fn max_angular_spread(&self) -> f64 {
        match self.kind {
            GridKind::Cartesian => f64::NAN,
            GridKind::Polar => {
                let nb = self.nodes_b.len();
                (0..self.nodes_a.len())
                    .map(|ia| {
                        let row = &self.values[ia * nb..(ia + 1) * nb];
                        let hi = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                        let lo = row.iter().copied().fold(f64::INFINITY, f64::min);
                        hi - lo
                    })
                    .fold(0.0, f64::max)
            }
        }
    }
}

fn trapezoid_weights(nodes: &[f64]) -> Vec<f64> {
    let n = nodes.len();
    if n < 2 {
        return vec![0.0; n];
    }
    let h = (nodes[n - 1] - nodes[0]) / (n - 1) as f64;
    let mut w = vec![h; n];
    w[0] = 0.5 * h;
    w[n - 1] = 0.5 * h;
    w
}

/// Gauss–Legendre nodes and weights on [a, b] by Newton iteration on P_n.
fn gauss_legendre(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Chebyshev-like initial guess
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // evaluate P_n(x) and P_n'(x) by recurrence
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
    for i in 0..n {
        nodes[i] = mid + half * nodes[i];
        weights[i] *= half;
    }
    (nodes, weights)
}

/// Samples W(α) on the requested grid.
pub fn wigner_grid(rho: &DensityMatrix, spec: &GridSpec) -> Result<WignerGrid> {
    let lnfact = LnFact::up_to(rho.dim());
    match *spec {
        GridSpec::Polar {
            n_radial,
            n_angular,
            r_max,
        } => {
            if n_radial < 2 || n_angular < 2 {
                return Err(Error::InvalidInput {
                    field: "grid",
                    reason: "polar grid needs at least 2 radii and 2 angles".into(),
                });
            }
            let r_max = r_max.unwrap_or_else(|| auto_r_max(rho));
            let (radii, weights) = gauss_legendre(n_radial, 0.0, r_max);
            let angles: Vec<f64> = (0..n_angular)
                .map(|k| 2.0 * std::f64::consts::PI * k as f64 / n_angular as f64)
                .collect();
            let mut values = vec![0.0; n_radial * n_angular];
            for (ia, &r) in radii.iter().enumerate() {
                let harm = radial_harmonics(rho, r, &lnfact)?;
                for (ib, &phi) in angles.iter().enumerate() {
                    values[ia * n_angular + ib] = harm.eval(phi);
                }
            }
            Ok(WignerGrid {
                kind: GridKind::Polar,
                nodes_a: radii,
                nodes_b: angles,
                values,
                r_max,
                weights_a: weights,
            })
        }
        GridSpec::Cartesian { n_x, n_y, half_width } => {
            if n_x < 2 || n_y < 2 {
                return Err(Error::InvalidInput {
                    field: "grid",
                    reason: "cartesian grid needs at least 2×2 nodes".into(),
                });
            }
            let hw = half_width.unwrap_or_else(|| auto_r_max(rho));
            let xs: Vec<f64> = (0..n_x)
                .map(|i| -hw + 2.0 * hw * i as f64 / (n_x - 1) as f64)
                .collect();
            let ys: Vec<f64> = (0..n_y)
                .map(|i| -hw + 2.0 * hw * i as f64 / (n_y - 1) as f64)
                .collect();
            let mut values = vec![0.0; n_x * n_y];
            for (ia, &x) in xs.iter().enumerate() {
                for (ib, &y) in ys.iter().enumerate() {
                    let (r, phi) = ((x * x + y * y).sqrt(), y.atan2(x));
                    values[ia * n_y + ib] = radial_harmonics(rho, r, &lnfact)?.eval(phi);
                }
            }
            let weights_a = trapezoid_weights(&xs);
            Ok(WignerGrid {
                kind: GridKind::Cartesian,
                nodes_a: xs,
                nodes_b: ys,
                values,
                r_max: hw,
                weights_a,
            })
        }
    }
}

/// Inverse map on a polar grid, without the probe validation.
fn invert_polar(
    radii: &[f64],
    weights: &[f64],
    angles: &[f64],
    values: &[f64],
    n_levels: usize,
) -> DensityMatrix {
    let (n_r, n_phi) = (radii.len(), angles.len());
    let dphi = 2.0 * std::f64::consts::PI / n_phi as f64;
    let lnfact = LnFact::up_to(n_levels);

    // angular transform per radius: A_j(r) = Σ_φ Δφ e^{ijφ} W(r,φ)
    let mut angular = vec![Complex64::ZERO; n_r * n_levels];
    for ir in 0..n_r {
        let row = &values[ir * n_phi..(ir + 1) * n_phi];
        for j in 0..n_levels {
            let mut acc = Complex64::ZERO;
            for (ib, &phi) in angles.iter().enumerate() {
                acc += Complex64::from_polar(1.0, j as f64 * phi) * row[ib];
            }
            angular[ir * n_levels + j] = dphi * acc;
        }
    }

    let mut rho = DensityMatrix::zeros(n_levels);
    let mut lag = vec![0.0; n_levels];
    for j in 0..n_levels {
        // radial inner products against e^{−2r²}(2r)^{j+1} L_{n'}^{(j)}(4r²)
        let mut sums = vec![Complex64::ZERO; n_levels - j];
        for (ir, (&r, &wr)) in radii.iter().zip(weights).enumerate() {
            let x = 4.0 * r * r;
            let n_count = n_levels - j;
            laguerre_column(n_count - 1, j, x, &mut lag[..n_count]);
            let pref = wr * (-2.0 * r * r + (j as f64 + 1.0) * (2.0 * r).ln()).exp();
            let aj = angular[ir * n_levels + j];
            for (np, s) in sums.iter_mut().enumerate() {
                *s += pref * lag[np] * aj;
            }
        }
        for np in 0..n_levels - j {
            let n = np + j;
            let sign = if np % 2 == 0 { 1.0 } else { -1.0 };
            let ratio = (0.5 * (lnfact.get(np) - lnfact.get(n))).exp();
            let v = sign * ratio * sums[np];
            rho.set(n, np, v);
            rho.set(np, n, v.conj());
        }
    }
    rho
}

/// Reconstructs ρ from a polar Wigner grid via the orthogonality quadrature.
///
/// The grid must resolve the target dimension: the quadrature is validated
/// by a probe round trip (|0⟩+|N−1⟩)/√2 on the same nodes and rejected with
/// [`Error::QuadratureUnderResolved`] if the probe misses by more than 1e−6.
pub fn density_from_wigner(grid: &WignerGrid, n_levels: usize) -> Result<DensityMatrix> {
    if grid.kind != GridKind::Polar {
        return Err(Error::InvalidInput {
            field: "grid",
            reason: "inverse map requires a polar grid".into(),
        });
    }
    if n_levels == 0 {
        return Err(Error::InvalidInput {
            field: "n_levels",
            reason: "must be >= 1".into(),
        });
    }
    // probe state with the highest radial and angular content of the target
    // space, forward-mapped on the same nodes
    let mut probe = DensityMatrix::zeros(n_levels);
    let half = Complex64::new(0.5, 0.0);
    probe.set(0, 0, half);
    probe.set(n_levels - 1, n_levels - 1, half);
    probe.set(n_levels - 1, 0, half);
    probe.set(0, n_levels - 1, half);
    let lnfact = LnFact::up_to(n_levels);
    let n_phi = grid.nodes_b.len();
    let mut probe_values = vec![0.0; grid.nodes_a.len() * n_phi];
    for (ia, &r) in grid.nodes_a.iter().enumerate() {
        let harm = radial_harmonics(&probe, r, &lnfact)?;
        for (ib, &phi) in grid.nodes_b.iter().enumerate() {
            probe_values[ia * n_phi + ib] = harm.eval(phi);
        }
    }
    let probe_back = invert_polar(
        &grid.nodes_a,
        &grid.weights_a,
        &grid.nodes_b,
        &probe_values,
        n_levels,
    );
    let residual = probe_back.max_diff(&probe);
    if !(residual <= 1e-6) {
        return Err(Error::QuadratureUnderResolved { residual });
    }

    Ok(invert_polar(
        &grid.nodes_a,
        &grid.weights_a,
        &grid.nodes_b,
        &grid.values,
        n_levels,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// A A†/Tr(A A†) for random complex A: physical by construction.
    fn random_physical(dim: usize, rng: &mut impl Rng) -> DensityMatrix {
        let a: Vec<Complex64> = (0..dim * dim)
            .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let mut rho = DensityMatrix::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                let mut acc = Complex64::ZERO;
                for k in 0..dim {
                    acc += a[i * dim + k] * a[j * dim + k].conj();
                }
                rho.set(i, j, acc);
            }
        }
        let tr = rho.trace().re;
        for v in rho.as_mut_slice() {
            *v /= tr;
        }
        rho
    }

    #[test]
    fn laguerre_low_orders() {
        for (j, x) in [(0, 0.3), (2, 1.7), (5, 10.0)] {
            assert_eq!(laguerre_assoc(0, j, x), 1.0);
        }
        for x in [0.0, 0.5, 2.0, 10.0] {
            assert!((laguerre_assoc(1, 0, x) - (1.0 - x)).abs() < 1e-15);
        }
        // L_2^{(1)}(2) = (x² − 6x + 6)/2 at x = 2
        assert!((laguerre_assoc(2, 1, 2.0) - (-1.0)).abs() < 1e-15);
    }

    #[test]
    fn laguerre_against_high_precision_references() {
        // 50-digit references; the recurrence holds ~1e−15 relative here,
        // asserted at the contractual 1e−10
        let cases: [(usize, usize, f64, f64); 12] = [
            (5, 3, 10.0, -10.666666666666666667),
            (10, 0, 7.5, -6.421207427978515625),
            (25, 4, 1.0, -168.43269729868130962),
            (50, 2, 40.0, -30476695.327440576503),
            (100, 10, 133.7, 1.4945774299053851906e27),
            (150, 1, 250.0, 5.3594264900294595009e52),
            (200, 0, 400.0, 1.4021524186666358754e85),
            (200, 40, 17.3, -5.2777713760089086199e24),
            (75, 120, 60.0, -1.4786278149617682354e32),
            (40, 7, 0.1, 37464389.994709998070),
            (120, 2, 55.5, 157990516152.08927814),
            (150, 30, 300.0, -5.7486482857377349893e59),
        ];
        for (n, j, x, expected) in cases {
            let got = laguerre_assoc(n, j, x);
            let rel = ((got - expected) / expected).abs();
            assert!(rel <= 1e-10, "L({n},{j},{x}): rel error {rel:e}");
        }
    }

    #[test]
    fn wigner_values_at_reference_points() {
        let two_over_pi = 0.6366197723675814;
        assert!((wigner_at(&DensityMatrix::vacuum(5), 0.0, 0.0).unwrap() - two_over_pi).abs() < 1e-14);
        // 1-Fock state is maximally negative at the origin
        assert!(
            (wigner_at(&DensityMatrix::fock(5, 1), 0.0, 1.3).unwrap() + two_over_pi).abs() < 1e-14
        );
        // vacuum at r = 1: prefactor only
        let expected = two_over_pi * (-2.0f64).exp();
        assert!((wigner_at(&DensityMatrix::vacuum(5), 1.0, 0.0).unwrap() - expected).abs() < 1e-14);
    }

    #[test]
    fn vacuum_grid_center_of_mass_vanishes() {
        let grid = wigner_grid(&DensityMatrix::vacuum(6), &GridSpec::default()).unwrap();
        assert!(grid.center_of_mass().norm() < 1e-12);
        assert!((grid.integral() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn coherent_state_moments() {
        let alpha = c(0.7, -0.3);
        let rho = DensityMatrix::coherent(25, alpha);
        let grid = wigner_grid(&rho, &GridSpec::default()).unwrap();
        assert!((grid.integral() - 1.0).abs() < 1e-6);
        assert!((grid.center_of_mass() - alpha).norm() < 1e-6);
        assert!((grid.second_moment() - (rho.mean_n() + 0.5)).abs() < 1e-6);
    }

    #[test]
    fn diagonal_state_has_no_angular_variation() {
        let mut rho = DensityMatrix::zeros(8);
        rho.set(0, 0, c(0.3, 0.0));
        rho.set(2, 2, c(0.45, 0.0));
        rho.set(5, 5, c(0.25, 0.0));
        let grid = wigner_grid(&rho, &GridSpec::default()).unwrap();
        assert!(grid.max_angular_spread() <= 1e-10);
    }

    #[test]
    fn bounded_by_two_over_pi() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let bound = TWO_OVER_PI + 1e-9;
        for dim in [2usize, 5, 9] {
            let rho = random_physical(dim, &mut rng);
            let grid = wigner_grid(&rho, &GridSpec::default()).unwrap();
            assert!(grid.max_value() <= bound, "max {}", grid.max_value());
            assert!(grid.min_value() >= -bound, "min {}", grid.min_value());
        }
    }

    #[test]
    fn off_diagonal_populates_matching_harmonics_only() {
        // ρ with only the j = 3 off-diagonal (plus a diagonal to stay
        // Hermitian-ish): angular Fourier content sits at m ∈ {0, ±3}
        let mut rho = DensityMatrix::zeros(8);
        rho.set(0, 0, c(0.5, 0.0));
        rho.set(5, 5, c(0.5, 0.0));
        rho.set(4, 1, c(0.2, 0.1));
        rho.set(1, 4, c(0.2, -0.1));
        let n_phi = 32;
        let grid = wigner_grid(
            &rho,
            &GridSpec::Polar {
                n_radial: 60,
                n_angular: n_phi,
                r_max: Some(6.0),
            },
        )
        .unwrap();
        for (ia, _) in grid.nodes_a.iter().enumerate() {
            for m in 0..=n_phi / 2 {
                let mut acc = Complex64::ZERO;
                for (ib, &phi) in grid.nodes_b.iter().enumerate() {
                    acc += Complex64::from_polar(1.0, -(m as f64) * phi) * grid.value(ia, ib);
                }
                acc /= n_phi as f64;
                if m != 0 && m != 3 {
                    assert!(
                        acc.norm() <= 1e-10,
                        "harmonic m = {m} has weight {:e}",
                        acc.norm()
                    );
                }
            }
        }
    }

    #[test]
    fn forward_map_is_linear() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let r1 = random_physical(6, &mut rng);
        let r2 = random_physical(6, &mut rng);
        let mut mix = DensityMatrix::zeros(6);
        for i in 0..6 {
            for j in 0..6 {
                mix.set(i, j, 0.3 * r1.get(i, j) + 0.7 * r2.get(i, j));
            }
        }
        for (r, phi) in [(0.0, 0.0), (0.8, 1.1), (2.5, -2.0)] {
            let w = wigner_at(&mix, r, phi).unwrap();
            let w1 = wigner_at(&r1, r, phi).unwrap();
            let w2 = wigner_at(&r2, r, phi).unwrap();
            assert!((w - 0.3 * w1 - 0.7 * w2).abs() < 1e-13);
        }
    }

    #[test]
    fn round_trip_vacuum() {
        let rho = DensityMatrix::vacuum(4);
        let grid = wigner_grid(&rho, &GridSpec::default()).unwrap();
        let back = density_from_wigner(&grid, 4).unwrap();
        assert!(back.max_diff(&rho) <= 1e-8, "residual {:e}", back.max_diff(&rho));
    }

    #[test]
    fn round_trip_superposition() {
        // (|0⟩+|1⟩)/√2 recovers ρ₁₀ = 0.5
        let mut rho = DensityMatrix::zeros(6);
        let half = c(0.5, 0.0);
        rho.set(0, 0, half);
        rho.set(1, 1, half);
        rho.set(1, 0, half);
        rho.set(0, 1, half);
        let grid = wigner_grid(&rho, &GridSpec::default()).unwrap();
        let back = density_from_wigner(&grid, 6).unwrap();
        assert!((back.get(1, 0) - half).norm() <= 1e-8);
        assert!(back.max_diff(&rho) <= 1e-8);
    }

    #[test]
    fn round_trip_random_physical_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for _ in 0..5 {
            let rho = random_physical(8, &mut rng);
            let grid = wigner_grid(&rho, &GridSpec::default()).unwrap();
            let back = density_from_wigner(&grid, 8).unwrap();
            assert!(
                back.max_diff(&rho) <= 1e-8,
                "round-trip residual {:e}",
                back.max_diff(&rho)
            );
        }
    }

    #[test]
    fn under_resolved_grid_is_rejected() {
        let rho = DensityMatrix::coherent(12, c(1.0, 0.0));
        // 8 angles cannot carry 12 levels of angular content
        let grid = wigner_grid(
            &rho,
            &GridSpec::Polar {
                n_radial: 30,
                n_angular: 8,
                r_max: Some(6.0),
            },
        )
        .unwrap();
        match density_from_wigner(&grid, 12) {
            Err(Error::QuadratureUnderResolved { .. }) => {}
            other => panic!("expected under-resolved error, got {other:?}"),
        }
        // cartesian grids have no inverse quadrature
        let cart = wigner_grid(
            &rho,
            &GridSpec::Cartesian {
                n_x: 21,
                n_y: 21,
                half_width: None,
            },
        )
        .unwrap();
        assert!(density_from_wigner(&cart, 6).is_err());
    }

    #[test]
    fn cartesian_grid_integrates_too() {
        let rho = DensityMatrix::coherent(15, c(0.5, 0.2));
        let grid = wigner_grid(
            &rho,
            &GridSpec::Cartesian {
                n_x: 161,
                n_y: 161,
                half_width: Some(6.0),
            },
        )
        .unwrap();
        assert!((grid.integral() - 1.0).abs() < 1e-4);
        assert!((grid.center_of_mass() - c(0.5, 0.2)).norm() < 1e-3);
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(12, 0.0, 2.0);
        let integral: f64 = x.iter().zip(&w).map(|(&xi, &wi)| wi * xi * xi).sum();
        assert!((integral - 8.0 / 3.0).abs() < 1e-13);
        let total: f64 = w.iter().sum();
        assert!((total - 2.0).abs() < 1e-13);
    }
}

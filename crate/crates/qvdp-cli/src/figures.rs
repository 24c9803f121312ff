//! Figure presets: canned parameter sets emitting the standard datasets
//! (response and susceptibility curves, zero-drive divergences, Wigner
//! panels, critical and limit-cycle profiles, SNR maps) with the analytic
//! oracle columns alongside the numerics.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;

use qvdp::analytic::{
    classical_response, critical_chi, critical_population_profile, limitcycle_chi,
    ClassicalParams,
};
use qvdp::observables::{noise_sigma, number_distribution, response, susceptibility};
use qvdp::steady::solve_steady;
use qvdp::wigner::GridSpec;
use qvdp::{Truncation, VdpParams};

use crate::emit::{fmt_f, fmt_opt, write_csv};
use crate::sweep::{
    drive_row, rate_row, wigner_comments, wigner_panel, wigner_rows, with_pool, RunError,
    RunOutcome, DRIVE_HEADER, RATE_HEADER,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FigureName {
    Fig1,
    Fig2,
    Fig3,
    Fig4,
    Fig5,
    FigS1,
    FigS2,
    FigS4,
    FigS5,
}

impl FromStr for FigureName {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "fig1" => Ok(FigureName::Fig1),
            "fig2" => Ok(FigureName::Fig2),
            "fig3" => Ok(FigureName::Fig3),
            "fig4" => Ok(FigureName::Fig4),
            "fig5" => Ok(FigureName::Fig5),
            "figS1" | "figs1" => Ok(FigureName::FigS1),
            "figS2" | "figs2" => Ok(FigureName::FigS2),
            "figS4" | "figs4" => Ok(FigureName::FigS4),
            "figS5" | "figs5" => Ok(FigureName::FigS5),
            other => Err(format!(
                "unknown figure {other:?}; expected fig1|fig2|fig3|fig4|fig5|figS1|figS2|figS4|figS5"
            )),
        }
    }
}

impl FigureName {
    pub const ALL: &'static [&'static str] = &[
        "fig1", "fig2", "fig3", "fig4", "fig5", "figS1", "figS2", "figS4", "figS5",
    ];
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64))
        .collect()
}

fn preset_trunc() -> Truncation {
    Truncation::default()
}

const PRESET_TOL: f64 = 1e-10;

fn preset_comments(name: &str, extra: &[String]) -> Vec<String> {
    let t = preset_trunc();
    let mut lines = vec![
        format!("preset: {name}"),
        format!(
            "truncation: n_levels={} tail_tol={} n_max={}",
            t.n_levels,
            fmt_f(t.tail_tol),
            t.n_max
        ),
        format!("tol: {}", fmt_f(PRESET_TOL)),
    ];
    lines.extend_from_slice(extra);
    lines
}

struct PresetSink {
    out_dir: PathBuf,
    files: Vec<PathBuf>,
    failures: usize,
}

impl PresetSink {
    fn new(out_dir: &Path) -> Self {
        Self {
            out_dir: out_dir.to_path_buf(),
            files: Vec::new(),
            failures: 0,
        }
    }

    fn write(
        &mut self,
        file: &str,
        comments: &[String],
        header: &[&str],
        rows: Vec<Vec<String>>,
    ) -> Result<(), RunError> {
        let err_col = header.len() - 1;
        if header[err_col] == "error" {
            self.failures += rows.iter().filter(|r| !r[err_col].is_empty()).count();
        }
        let path = self.out_dir.join(file);
        write_csv(&path, comments, header, &rows)?;
        self.files.push(path);
        Ok(())
    }

    fn done(self) -> RunOutcome {
        RunOutcome {
            files: self.files,
            point_failures: self.failures,
        }
    }
}

fn drive_rows_par(
    workers: usize,
    gp: f64,
    gm: f64,
    omegas: &[f64],
) -> Result<Vec<Vec<String>>, RunError> {
    let t = preset_trunc();
    with_pool(workers, || {
        omegas
            .par_iter()
            .map(|&om| drive_row(gp, gm, 1.0, om, &t, PRESET_TOL))
            .collect()
    })
}

fn prefixed(branch: &str, rows: Vec<Vec<String>>) -> Vec<Vec<String>> {
    rows.into_iter()
        .map(|mut r| {
            r.insert(0, branch.to_string());
            r
        })
        .collect()
}

fn wigner_panel_file(
    sink: &mut PresetSink,
    file: &str,
    preset: &str,
    gp: f64,
    gm: f64,
    om: f64,
) -> Result<(f64, f64, f64), RunError> {
    let p = VdpParams::new(gp, gm, 1.0, om).map_err(|e| RunError::Setup(e.to_string()))?;
    let (grid, a, n_levels) = wigner_panel(&p, &preset_trunc(), PRESET_TOL, &GridSpec::default())
        .map_err(|e| RunError::Point {
            index: 0,
            label: format!("{preset} panel omega={om}"),
            message: e.to_string(),
        })?;
    let com = grid.center_of_mass();
    let mut comments = preset_comments(
        preset,
        &[format!(
            "params: gamma1_plus={} gamma1_minus={} gamma2={} omega={}",
            fmt_f(gp),
            fmt_f(gm),
            fmt_f(1.0),
            fmt_f(om)
        )],
    );
    comments.extend(wigner_comments(&grid, a, n_levels));
    let (header, rows) = wigner_rows(&grid);
    sink.write(file, &comments, &header, rows)?;
    Ok((com.re, com.im, a))
}

/// Susceptibility and response of the undamped critical oscillator vs drive.
fn fig1(out_dir: &Path, workers: usize) -> Result<RunOutcome, RunError> {
    let mut sink = PresetSink::new(out_dir);
    let omegas = log_grid(1e-4, 10.0, 33);
    let rows = drive_rows_par(workers, 0.0, 0.0, &omegas)?;
    sink.write(
        "fig1_response.csv",
        &preset_comments("fig1", &["params: gamma1_plus=0 gamma1_minus=0 gamma2=1".into()]),
        DRIVE_HEADER,
        rows,
    )?;
    Ok(sink.done())
}

/// Zero-drive susceptibility across the transition, both branches.
fn fig2(out_dir: &Path, workers: usize) -> Result<RunOutcome, RunError> {
    let mut sink = PresetSink::new(out_dir);
    let t = preset_trunc();
    let gammas = log_grid(1e-3, 1.0, 13);
    let damped: Vec<Vec<String>> = with_pool(workers, || {
        gammas
            .par_iter()
            .map(|&g| rate_row(0.0, g, 1.0, 0.0, &t, PRESET_TOL))
            .collect()
    })?;
    let pumped: Vec<Vec<String>> = with_pool(workers, || {
        gammas
            .par_iter()
            .map(|&g| rate_row(g, 0.0, 1.0, 0.0, &t, PRESET_TOL))
            .collect()
    })?;
    let mut rows = prefixed("damped", damped);
    rows.extend(prefixed("pumped", pumped));
    let mut header = vec!["branch"];
    header.extend_from_slice(RATE_HEADER);
    sink.write(
        "fig2_chi0.csv",
        &preset_comments(
            "fig2",
            &["branches: damped (gamma1_plus=0), pumped (gamma1_minus=0); omega -> 0".into()],
        ),
        &header,
        rows,
    )?;
    Ok(sink.done())
}

/// Nonmonotonic response at gamma1-/g2 = 0.02 plus Wigner panels in the
/// linear-peak, dip, and classical regimes.
fn fig3(out_dir: &Path, workers: usize) -> Result<RunOutcome, RunError> {
    let mut sink = PresetSink::new(out_dir);
    let gm = 0.02;
    let omegas = log_grid(1e-4, 10.0, 33);
    let rows = drive_rows_par(workers, 0.0, gm, &omegas)?;
    sink.write(
        "fig3_response.csv",
        &preset_comments("fig3", &[format!("params: gamma1_plus=0 gamma1_minus={gm} gamma2=1")]),
        DRIVE_HEADER,
        rows,
    )?;
    // panel drives: two-level peak, three-level dip, classical
    for (suffix, om) in [("a", 0.007), ("b", 0.05), ("c", 2.0)] {
        wigner_panel_file(
            &mut sink,
            &format!("fig3_wigner_{suffix}.csv"),
            "fig3",
            0.0,
            gm,
            om,
        )?;
    }
    Ok(sink.done())
}

/// Critical response for Gamma1/g2 in {5, 50, 1000} plus the G0 inset.
fn fig4(out_dir: &Path, workers: usize) -> Result<RunOutcome, RunError> {
    let mut sink = PresetSink::new(out_dir);
    let omegas = log_grid(1e-2, 100.0, 11);
    let mut rows = Vec::new();
    for big in [5.0, 50.0, 1000.0] {
        let branch = drive_rows_par(workers, big, big, &omegas)?;
        rows.extend(prefixed(&format!("Gamma1={big}"), branch));
    }
    let mut header = vec!["branch"];
    header.extend_from_slice(DRIVE_HEADER);
    sink.write(
        "fig4_response.csv",
        &preset_comments("fig4", &["critical condition gamma1_plus = gamma1_minus = Gamma1".into()]),
        &header,
        rows,
    )?;

    let t = preset_trunc();
    let inset: Vec<Vec<String>> = with_pool(workers, || {
        log_grid(1.0, 1000.0, 7)
            .par_iter()
            .map(|&big| {
                let computed = (|| -> qvdp::Result<Vec<String>> {
                    let p = VdpParams::new(big, big, 1.0, 0.0)?;
                    let chi = susceptibility(&p, 0.0, &t)?;
                    Ok(vec![
                        fmt_f(big),
                        fmt_f(chi.chi),
                        fmt_f(chi.estimate_error),
                        fmt_f(chi.chi * big / 2.0),
                        fmt_f((big / std::f64::consts::PI).sqrt()),
                        fmt_f(critical_chi(big, 1.0)),
                        String::new(),
                    ])
                })();
                computed.unwrap_or_else(|e| {
                    vec![
                        fmt_f(big),
                        String::new(),
                        String::new(),
                        String::new(),
                        String::new(),
                        String::new(),
                        e.to_string().replace(',', ";"),
                    ]
                })
            })
            .collect()
    })?;
    sink.write(
        "fig4_gain0.csv",
        &preset_comments("fig4", &["inset: weak-drive gain over the passive oscillator".into()]),
        &["gamma1", "chi0", "chi0_error", "g0", "g0_sqrt_law", "chi0_critical", "error"],
        inset,
    )?;
    Ok(sink.done())
}

/// Wigner panels across the limit-cycle to classical crossover at
/// gamma1+/g2 = 50, gamma1-/g2 = 20, with quantum and classical responses.
fn fig5(out_dir: &Path, _workers: usize) -> Result<RunOutcome, RunError> {
    let mut sink = PresetSink::new(out_dir);
    let (gp, gm) = (50.0, 20.0);
    let gamma1 = 0.5 * (gp - gm);
    let mut dots = Vec::new();
    for (suffix, om) in [("a", 0.5), ("b", 3.0), ("c", 15.0)] {
        let (com_re, com_im, a) = wigner_panel_file(
            &mut sink,
            &format!("fig5_wigner_{suffix}.csv"),
            "fig5",
            gp,
            gm,
            om,
        )?;
        let cl = ClassicalParams::new(gamma1, 1.0, om).expect("valid");
        dots.push(vec![
            fmt_f(om),
            fmt_f(a),
            fmt_f(com_re),
            fmt_f(com_im),
            fmt_f(classical_response(&cl).amplitude()),
        ]);
    }
    sink.write(
        "fig5_dots.csv",
        &preset_comments(
            "fig5",
            &[format!("params: gamma1_plus={gp} gamma1_minus={gm} gamma2=1")],
        ),
        &["omega", "response", "com_re", "com_im", "classical_amp"],
        dots,
    )?;
    Ok(sink.done())
}

/// Classical steady-state scaling function f(x).
fn fig_s1(out_dir: &Path, _workers: usize) -> Result<RunOutcome, RunError> {
    let mut sink = PresetSink::new(out_dir);
    let n = 401;
    let rows: Vec<Vec<String>> = (0..n)
        .map(|i| {
            let x = -10.0 + 20.0 * i as f64 / (n - 1) as f64;
            let f = qvdp::analytic::classical_f(x);
            let asym = if x >= 3.0 {
                Some(x.sqrt() + 0.5 / x)
            } else if x <= -3.0 {
                Some(1.0 / x.abs())
            } else {
                None
            };
            vec![
                fmt_f(x),
                fmt_f(f),
                fmt_f(qvdp::analytic::classical_f_residual(x)),
                fmt_opt(asym),
            ]
        })
        .collect();
    sink.write(
        "figS1_classical_f.csv",
        &preset_comments("figS1", &[]),
        &["x", "f", "cubic_residual_scaled", "asymptote"],
        rows,
    )?;
    Ok(sink.done())
}

/// Critical-regime profiles (populations and coherences at Gamma1/g2 = 1000)
/// and the zero-drive susceptibility crossover with its asymptotes.
fn fig_s2(out_dir: &Path, workers: usize) -> Result<RunOutcome, RunError> {
    let mut sink = PresetSink::new(out_dir);
    let t = preset_trunc();
    let big = 1000.0;
    let om_lin = 1e-3;

    let undriven = solve_steady(&VdpParams::new(big, big, 1.0, 0.0).unwrap(), &t, PRESET_TOL)
        .map_err(|e| RunError::Setup(e.to_string()))?;
    let driven = solve_steady(&VdpParams::new(big, big, 1.0, om_lin).unwrap(), &t, PRESET_TOL)
        .map_err(|e| RunError::Setup(e.to_string()))?;
    let pn = number_distribution(&undriven.rho);
    let eps = (1.0 / big).sqrt();
    let eta = om_lin / big;
    let rows: Vec<Vec<String>> = (0..undriven.n_levels.min(driven.n_levels))
        .map(|n| {
            let x = n as f64 * eps;
            let q_num = if n >= 1 {
                (n as f64).sqrt() * driven.rho.get(n, n - 1).re
            } else {
                0.0
            };
            let q_formula = 4.0 * eta / std::f64::consts::PI.sqrt() * x * (-x * x).exp();
            vec![
                n.to_string(),
                fmt_f(pn[n]),
                fmt_f(critical_population_profile(big, 1.0, n)),
                fmt_f(q_num),
                fmt_f(q_formula),
            ]
        })
        .collect();
    sink.write(
        "figS2_profiles.csv",
        &preset_comments(
            "figS2",
            &[format!(
                "params: Gamma1={big} gamma2=1; coherences from omega={om_lin}"
            )],
        ),
        &["n", "p_num", "p_formula", "q_num", "q_formula"],
        rows,
    )?;

    let chi_rows: Vec<Vec<String>> = with_pool(workers, || {
        log_grid(0.01, 1000.0, 13)
            .par_iter()
            .map(|&g| {
                let computed = (|| -> qvdp::Result<Vec<String>> {
                    let p = VdpParams::new(g, g, 1.0, 0.0)?;
                    let chi = susceptibility(&p, 0.0, &t)?;
                    Ok(vec![
                        fmt_f(g),
                        fmt_f(chi.chi),
                        fmt_f(critical_chi(g, 1.0)),
                        fmt_f(1.0 / (4.0 * g)),
                        String::new(),
                    ])
                })();
                computed.unwrap_or_else(|e| {
                    vec![
                        fmt_f(g),
                        String::new(),
                        String::new(),
                        String::new(),
                        e.to_string().replace(',', ";"),
                    ]
                })
            })
            .collect()
    })?;
    sink.write(
        "figS2_chi.csv",
        &preset_comments("figS2", &["zero-drive susceptibility vs Gamma1 with asymptotes".into()]),
        &["gamma1", "chi0", "asym_critical", "asym_small", "error"],
        chi_rows,
    )?;
    Ok(sink.done())
}

/// Limit-cycle profiles at (gamma1+, gamma1-) = (200, 20) gamma2 and the
/// coarse gain surface over the pump ratio and damping.
fn fig_s4(out_dir: &Path, workers: usize) -> Result<RunOutcome, RunError> {
    let mut sink = PresetSink::new(out_dir);
    let t = preset_trunc();
    let (gp, gm) = (200.0, 20.0);
    let om_lin = 0.01;

    let undriven = solve_steady(&VdpParams::new(gp, gm, 1.0, 0.0).unwrap(), &t, PRESET_TOL)
        .map_err(|e| RunError::Setup(e.to_string()))?;
    let driven = solve_steady(&VdpParams::new(gp, gm, 1.0, om_lin).unwrap(), &t, PRESET_TOL)
        .map_err(|e| RunError::Setup(e.to_string()))?;
    let pn = number_distribution(&undriven.rho);
    let (eps, zeta) = ((1.0 / gp).sqrt(), gm / gp);
    let (beta, eta) = (0.5 * (1.0 - zeta), om_lin / gp);
    let width = 3.0 - zeta;
    let rows: Vec<Vec<String>> = (0..undriven.n_levels.min(driven.n_levels))
        .map(|n| {
            let y = n as f64 * eps - beta / eps;
            let gauss = (-2.0 * y * y / width).exp();
            let p_formula = eps * (2.0 / (width * std::f64::consts::PI)).sqrt() * gauss;
            let chi_num = if n >= 1 { driven.rho.get(n, n - 1).re } else { 0.0 };
            let chi_formula =
                4.0 * eta * width.powf(-1.5) * ((1.0 - zeta) / std::f64::consts::PI).sqrt() * gauss;
            vec![
                n.to_string(),
                fmt_f(pn[n]),
                fmt_f(p_formula),
                fmt_f(chi_num),
                fmt_f(chi_formula),
            ]
        })
        .collect();
    sink.write(
        "figS4_profiles.csv",
        &preset_comments(
            "figS4",
            &[format!(
                "params: gamma1_plus={gp} gamma1_minus={gm} gamma2=1; coherences from omega={om_lin}"
            )],
        ),
        &["n", "p_num", "p_formula", "chi_num", "chi_formula"],
        rows,
    )?;

    let mut points = Vec::new();
    for &gm in &[1.0, 5.0, 30.0] {
        for &ratio in &[2.0, 5.0, 10.0] {
            points.push((ratio * gm, gm));
        }
    }
    let gain_rows: Vec<Vec<String>> = with_pool(workers, || {
        points
            .par_iter()
            .map(|&(gp, gm)| {
                let computed = (|| -> qvdp::Result<Vec<String>> {
                    let p = VdpParams::new(gp, gm, 1.0, 0.0)?;
                    let chi = susceptibility(&p, 0.0, &t)?;
                    Ok(vec![
                        fmt_f(gp),
                        fmt_f(gm),
                        fmt_f(chi.chi),
                        fmt_f(chi.chi * gm / 2.0),
                        fmt_f(limitcycle_chi(gp, gm, 1.0) * gm / 2.0),
                        String::new(),
                    ])
                })();
                computed.unwrap_or_else(|e| {
                    vec![
                        fmt_f(gp),
                        fmt_f(gm),
                        String::new(),
                        String::new(),
                        String::new(),
                        e.to_string().replace(',', ";"),
                    ]
                })
            })
            .collect()
    })?;
    sink.write(
        "figS4_gain.csv",
        &preset_comments("figS4", &["gain surface over pump ratio and damping".into()]),
        &["gamma1_plus", "gamma1_minus", "chi0", "gain", "gain_formula", "error"],
        gain_rows,
    )?;
    Ok(sink.done())
}

/// Coarse response/SNR maps vs drive and one-particle rates; the
/// susceptibility column is differenced along the drive axis of the grid.
fn fig_s5(out_dir: &Path, workers: usize, full: bool) -> Result<RunOutcome, RunError> {
    let mut sink = PresetSink::new(out_dir);
    let n = if full { 61 } else { 25 };
    let t = preset_trunc();

    let panels: [(&str, Vec<f64>, Vec<f64>, Box<dyn Fn(f64) -> (f64, f64) + Sync>); 2] = [
        (
            "figS5_a.csv",
            log_grid(1e-3, 10.0, n),
            log_grid(1e-3, 10.0, n),
            Box::new(|g: f64| (0.0, g)),
        ),
        (
            "figS5_b.csv",
            log_grid(0.1, 30.0, n),
            log_grid(1.0, 120.0, n),
            Box::new(|g: f64| (g, 30.0)),
        ),
    ];

    for (file, omegas, rates, to_params) in panels {
        // solve the grid rate-major; chi is differenced along omega
        let mut grid_points = Vec::with_capacity(rates.len() * omegas.len());
        for &g in &rates {
            for &om in &omegas {
                grid_points.push((g, om));
            }
        }
        let solved: Vec<Result<(f64, f64, f64, usize), String>> = with_pool(workers, || {
            grid_points
                .par_iter()
                .map(|&(g, om)| {
                    let (gp, gm) = to_params(g);
                    let p = VdpParams::new(gp, gm, 1.0, om).map_err(|e| e.to_string())?;
                    let res = solve_steady(&p, &t, PRESET_TOL).map_err(|e| e.to_string())?;
                    let a = response(&res.rho).map_err(|e| e.to_string())?;
                    let sigma = noise_sigma(&res.rho);
                    let snr = if sigma > 0.0 { a / sigma } else { 0.0 };
                    Ok((a, sigma, snr, res.n_levels))
                })
                .collect()
        })?;

        let mut rows = Vec::with_capacity(grid_points.len());
        for (ig, &g) in rates.iter().enumerate() {
            for (io, &om) in omegas.iter().enumerate() {
                let (gp, gm) = to_params(g);
                let at = |k: usize| &solved[ig * omegas.len() + k];
                match at(io) {
                    Err(e) => rows.push(vec![
                        fmt_f(om),
                        fmt_f(gp),
                        fmt_f(gm),
                        String::new(),
                        String::new(),
                        String::new(),
                        String::new(),
                        String::new(),
                        e.replace(',', ";"),
                    ]),
                    Ok(&(a, sigma, snr, n_levels)) => {
                        // centered difference on the log grid, one-sided at edges
                        let (lo, hi) = (io.saturating_sub(1), (io + 1).min(omegas.len() - 1));
                        let chi = match (at(lo), at(hi)) {
                            (Ok(&(alo, ..)), Ok(&(ahi, ..))) if hi > lo => {
                                Some((ahi - alo) / (omegas[hi] - omegas[lo]))
                            }
                            _ => None,
                        };
                        rows.push(vec![
                            fmt_f(om),
                            fmt_f(gp),
                            fmt_f(gm),
                            fmt_f(a),
                            fmt_f(sigma),
                            fmt_f(snr),
                            fmt_opt(chi),
                            n_levels.to_string(),
                            String::new(),
                        ]);
                    }
                }
            }
        }
        sink.write(
            file,
            &preset_comments(
                "figS5",
                &[format!("grid: {n}x{n} points; chi differenced along the drive axis")],
            ),
            &["omega", "gamma1_plus", "gamma1_minus", "response", "sigma", "snr", "chi_grid", "n_levels", "error"],
            rows,
        )?;
    }
    Ok(sink.done())
}

/// Runs a named preset, writing its dataset files under `out_dir`.
pub fn figure_preset(
    name: FigureName,
    out_dir: &Path,
    workers: usize,
    full: bool,
) -> Result<RunOutcome, RunError> {
    match name {
        FigureName::Fig1 => fig1(out_dir, workers),
        FigureName::Fig2 => fig2(out_dir, workers),
        FigureName::Fig3 => fig3(out_dir, workers),
        FigureName::Fig4 => fig4(out_dir, workers),
        FigureName::Fig5 => fig5(out_dir, workers),
        FigureName::FigS1 => fig_s1(out_dir, workers),
        FigureName::FigS2 => fig_s2(out_dir, workers),
        FigureName::FigS4 => fig_s4(out_dir, workers),
        FigureName::FigS5 => fig_s5(out_dir, workers, full),
    }
}

//! Sweep execution: points run concurrently on a bounded worker pool,
//! results gathered in parameter order, one row per point. Numeric output
//! is independent of the worker count; per-point solver failures land in an
//! `error` column unless strict mode aborts the run.

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

use qvdp::analytic::{
    classical_response, classical_susceptibility, three_level_response, ClassicalParams,
};
use qvdp::observables::{response, response_point, susceptibility};
use qvdp::steady::solve_steady;
use qvdp::wigner::{wigner_grid, GridSpec, WignerGrid};
use qvdp::{Truncation, VdpParams};

use crate::config::{Mode, OutputFormat, SweepConfig, SweepParameter};
use crate::emit::{fmt_f, fmt_opt, write_dataset};

#[derive(Debug, Error)]
pub enum RunError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("point {index} ({label}) failed: {message}")]
    Point {
        index: usize,
        label: String,
        message: String,
    },
    #[error("{0}")]
    Setup(String),
}

#[derive(Debug)]
pub struct RunOutcome {
    pub files: Vec<PathBuf>,
    pub point_failures: usize,
}

/// Runs `f` on a dedicated pool of `workers` threads (0 = rayon default).
pub(crate) fn with_pool<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T, RunError> {
    if workers == 0 {
        return Ok(f());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| RunError::Setup(format!("worker pool: {e}")))?;
    Ok(pool.install(f))
}

pub(crate) const DRIVE_HEADER: &[&str] = &[
    "omega",
    "gamma1_plus",
    "gamma1_minus",
    "gamma2",
    "response",
    "mean_n",
    "sigma",
    "snr",
    "chi",
    "chi_error",
    "n_levels",
    "residual",
    "tail_mass",
    "classical_amp",
    "classical_chi",
    "three_level",
    "regime",
    "error",
];

pub(crate) const RATE_HEADER: &[&str] = &[
    "gamma1_plus",
    "gamma1_minus",
    "gamma2",
    "omega",
    "response",
    "mean_n",
    "chi0",
    "chi0_error",
    "gain0",
    "passive_chi",
    "three_level_chi",
    "critical_chi",
    "limitcycle_chi",
    "n_levels",
    "residual",
    "error",
];

const CLASSICAL_HEADER: &[&str] = &[
    "omega",
    "x",
    "f",
    "alpha",
    "chi_classical",
    "cubic_residual_scaled",
];

/// Drive-scale classification: linear below the one-particle rates, then the
/// negative-susceptibility window up to √((γ₁⁺+γ₁⁻)γ₂), then the extended
/// quantum region below γ₂, classical beyond.
pub(crate) fn regime_label(gp: f64, gm: f64, g2: f64, om: f64) -> &'static str {
    let s1 = gp + gm;
    if s1 > 0.0 && om < s1 {
        "linear"
    } else if s1 > 0.0 && om < (s1 * g2).sqrt() {
        "negative"
    } else if om < g2 {
        "quantum"
    } else {
        "classical"
    }
}

fn error_row(template: &[&str], inputs: &[(usize, String)], message: &str) -> Vec<String> {
    let mut row = vec![String::new(); template.len()];
    for (i, v) in inputs {
        row[*i] = v.clone();
    }
    *row.last_mut().unwrap() = message.replace(',', ";");
    row
}

/// One drive-sweep row at drive `om`.
pub(crate) fn drive_row(
    gp: f64,
    gm: f64,
    g2: f64,
    om: f64,
    trunc: &Truncation,
    tol: f64,
) -> Vec<String> {
    let inputs = [
        (0, fmt_f(om)),
        (1, fmt_f(gp)),
        (2, fmt_f(gm)),
        (3, fmt_f(g2)),
    ];
    let computed = (|| -> qvdp::Result<Vec<String>> {
        let p = VdpParams::new(gp, gm, g2, om)?;
        let res = solve_steady(&p, trunc, tol)?;
        let point = response_point(&p, &res)?;
        let chi = susceptibility(&p, om, trunc)?;
        let cl = ClassicalParams::new(0.5 * (gp - gm), g2, om)?;
        let classical_amp = classical_response(&cl).amplitude();
        let classical_chi = if om > 0.0 {
            Some(classical_susceptibility(&cl)?)
        } else {
            None
        };
        Ok(vec![
            fmt_f(om),
            fmt_f(gp),
            fmt_f(gm),
            fmt_f(g2),
            fmt_f(point.response),
            fmt_f(point.mean_n),
            fmt_f(point.sigma),
            fmt_f(point.snr),
            fmt_f(chi.chi),
            fmt_f(chi.estimate_error),
            point.n_levels.to_string(),
            fmt_f(res.residual),
            fmt_f(res.tail_mass),
            fmt_f(classical_amp),
            fmt_opt(classical_chi),
            fmt_f(three_level_response(gp, gm, g2, om)),
            regime_label(gp, gm, g2, om).to_string(),
            String::new(),
        ])
    })();
    computed.unwrap_or_else(|e| error_row(DRIVE_HEADER, &inputs, &e.to_string()))
}

/// One rate-sweep row: zero-drive (or configured-drive) susceptibility and
/// the applicable asymptotic oracles at rates (gp, gm).
pub(crate) fn rate_row(
    gp: f64,
    gm: f64,
    g2: f64,
    om: f64,
    trunc: &Truncation,
    tol: f64,
) -> Vec<String> {
    let inputs = [
        (0, fmt_f(gp)),
        (1, fmt_f(gm)),
        (2, fmt_f(g2)),
        (3, fmt_f(om)),
    ];
    let computed = (|| -> qvdp::Result<Vec<String>> {
        let p = VdpParams::new(gp, gm, g2, om)?;
        let res = solve_steady(&p, trunc, tol)?;
        let point = response_point(&p, &res)?;
        let chi = susceptibility(&p, om, trunc)?;
        let s1 = 3.0 * gp + gm;
        let big_g1 = 0.5 * (gp + gm);
        Ok(vec![
            fmt_f(gp),
            fmt_f(gm),
            fmt_f(g2),
            fmt_f(om),
            fmt_f(point.response),
            fmt_f(point.mean_n),
            fmt_f(chi.chi),
            fmt_f(chi.estimate_error),
            fmt_opt((gm > 0.0).then(|| chi.chi * gm / 2.0)),
            fmt_opt((gm > 0.0).then(|| 2.0 / gm)),
            fmt_opt((s1 > 0.0).then(|| 2.0 * (gp + gm) / (s1 * s1))),
            fmt_opt((big_g1 > 0.0).then(|| qvdp::analytic::critical_chi(big_g1, g2))),
            fmt_opt((gp > gm && gp > 0.0).then(|| qvdp::analytic::limitcycle_chi(gp, gm, g2))),
            point.n_levels.to_string(),
            fmt_f(res.residual),
            String::new(),
        ])
    })();
    computed.unwrap_or_else(|e| error_row(RATE_HEADER, &inputs, &e.to_string()))
}

fn count_failures(header: &[&str], rows: &[Vec<String>]) -> usize {
    let err_col = header.len() - 1;
    rows.iter().filter(|r| !r[err_col].is_empty()).count()
}

fn strict_check(
    header: &[&str],
    rows: &[Vec<String>],
    labels: &[String],
) -> Result<(), RunError> {
    let err_col = header.len() - 1;
    if let Some((i, row)) = rows.iter().enumerate().find(|(_, r)| !r[err_col].is_empty()) {
        return Err(RunError::Point {
            index: i,
            label: labels[i].clone(),
            message: row[err_col].clone(),
        });
    }
    Ok(())
}

/// Wigner grid of the steady state at `params`, with summary functionals.
pub(crate) fn wigner_panel(
    params: &VdpParams,
    trunc: &Truncation,
    tol: f64,
    spec: &GridSpec,
) -> qvdp::Result<(WignerGrid, f64, usize)> {
    let res = solve_steady(params, trunc, tol)?;
    let grid = wigner_grid(&res.rho, spec)?;
    let a = response(&res.rho)?;
    Ok((grid, a, res.n_levels))
}

pub(crate) fn wigner_rows(grid: &WignerGrid) -> (Vec<&'static str>, Vec<Vec<String>>) {
    let header = match grid.kind {
        qvdp::GridKind::Polar => vec!["r", "phi", "w"],
        qvdp::GridKind::Cartesian => vec!["x", "y", "w"],
    };
    let mut rows = Vec::with_capacity(grid.nodes_a.len() * grid.nodes_b.len());
    for (ia, &a) in grid.nodes_a.iter().enumerate() {
        for (ib, &b) in grid.nodes_b.iter().enumerate() {
            rows.push(vec![fmt_f(a), fmt_f(b), fmt_f(grid.value(ia, ib))]);
        }
    }
    (header, rows)
}

pub(crate) fn wigner_comments(grid: &WignerGrid, response: f64, n_levels: usize) -> Vec<String> {
    let com = grid.center_of_mass();
    vec![
        format!(
            "grid: kind={} n_a={} n_b={} r_max={}",
            match grid.kind {
                qvdp::GridKind::Polar => "polar",
                qvdp::GridKind::Cartesian => "cartesian",
            },
            grid.nodes_a.len(),
            grid.nodes_b.len(),
            fmt_f(grid.r_max)
        ),
        format!(
            "summary: com_re={} com_im={} response={} integral={} n_levels={n_levels}",
            fmt_f(com.re),
            fmt_f(com.im),
            fmt_f(response),
            fmt_f(grid.integral())
        ),
    ]
}

/// Executes a parsed configuration, writing its dataset under `out_dir`.
pub fn run_config(cfg: &SweepConfig, out_dir: &Path) -> Result<RunOutcome, RunError> {
    let path = out_dir.join(&cfg.output);
    match cfg.mode {
        Mode::DriveSweep => {
            let omegas = cfg.range.as_ref().expect("validated").values();
            let labels: Vec<String> = omegas.iter().map(|o| format!("omega={o}")).collect();
            let rows: Vec<Vec<String>> = with_pool(cfg.workers, || {
                omegas
                    .par_iter()
                    .map(|&om| {
                        drive_row(cfg.gamma1_plus, cfg.gamma1_minus, cfg.gamma2, om, &cfg.trunc, cfg.tol)
                    })
                    .collect()
            })?;
            if cfg.strict {
                strict_check(DRIVE_HEADER, &rows, &labels)?;
            }
            write_dataset(&path, cfg.format, &cfg.echo_lines(), DRIVE_HEADER, &rows)?;
            Ok(RunOutcome {
                files: vec![path],
                point_failures: count_failures(DRIVE_HEADER, &rows),
            })
        }
        Mode::RateSweep => {
            let rates = cfg.range.as_ref().expect("validated").values();
            let labels: Vec<String> = rates
                .iter()
                .map(|g| format!("{}={g}", cfg.sweep_parameter.as_str()))
                .collect();
            let rows: Vec<Vec<String>> = with_pool(cfg.workers, || {
                rates
                    .par_iter()
                    .map(|&g| {
                        let (gp, gm) = match cfg.sweep_parameter {
                            SweepParameter::Gamma1Plus => (g, cfg.gamma1_minus),
                            SweepParameter::Gamma1Minus => (cfg.gamma1_plus, g),
                            SweepParameter::Omega => unreachable!("validated"),
                        };
                        rate_row(gp, gm, cfg.gamma2, cfg.omega, &cfg.trunc, cfg.tol)
                    })
                    .collect()
            })?;
            if cfg.strict {
                strict_check(RATE_HEADER, &rows, &labels)?;
            }
            write_dataset(&path, cfg.format, &cfg.echo_lines(), RATE_HEADER, &rows)?;
            Ok(RunOutcome {
                files: vec![path],
                point_failures: count_failures(RATE_HEADER, &rows),
            })
        }
        Mode::Wigner => {
            let p = VdpParams::new(cfg.gamma1_plus, cfg.gamma1_minus, cfg.gamma2, cfg.omega)
                .map_err(|e| RunError::Setup(e.to_string()))?;
            let spec = GridSpec::Polar {
                n_radial: cfg.n_radial,
                n_angular: cfg.n_angular,
                r_max: cfg.r_max,
            };
            let (grid, a, n_levels) = wigner_panel(&p, &cfg.trunc, cfg.tol, &spec)
                .map_err(|e| RunError::Point {
                    index: 0,
                    label: "wigner".into(),
                    message: e.to_string(),
                })?;
            let (header, rows) = wigner_rows(&grid);
            let mut comments = cfg.echo_lines();
            comments.extend(wigner_comments(&grid, a, n_levels));
            write_dataset(&path, cfg.format, &comments, &header, &rows)?;
            Ok(RunOutcome {
                files: vec![path],
                point_failures: 0,
            })
        }
        Mode::Classical => {
            let omegas = cfg.range.as_ref().expect("validated").values();
            let gamma1 = 0.5 * (cfg.gamma1_plus - cfg.gamma1_minus);
            let g2 = cfg.gamma2;
            let rows: Vec<Vec<String>> = omegas
                .iter()
                .map(|&om| {
                    let cl = ClassicalParams::new(gamma1, g2, om).expect("validated");
                    let x = if om > 0.0 {
                        (gamma1 / g2) / (om / g2).powf(2.0 / 3.0)
                    } else {
                        f64::NAN
                    };
                    let alpha = classical_response(&cl).amplitude();
                    vec![
                        fmt_f(om),
                        fmt_opt(x.is_finite().then_some(x)),
                        fmt_opt(x.is_finite().then(|| qvdp::analytic::classical_f(x))),
                        fmt_f(alpha),
                        fmt_opt(
                            (om > 0.0).then(|| classical_susceptibility(&cl).expect("om > 0")),
                        ),
                        fmt_opt(
                            x.is_finite().then(|| qvdp::analytic::classical_f_residual(x)),
                        ),
                    ]
                })
                .collect();
            write_dataset(&path, cfg.format, &cfg.echo_lines(), CLASSICAL_HEADER, &rows)?;
            Ok(RunOutcome {
                files: vec![path],
                point_failures: 0,
            })
        }
    }
}

//! Strict parsing of flat key-value (JSON) run configurations.

use serde::Deserialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config parse error: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid {field}: {reason}")]
    Invalid { field: &'static str, reason: String },
}

fn invalid(field: &'static str, reason: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        field,
        reason: reason.into(),
    }
}

/// Flat document accepted from disk; unknown keys are rejected.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    mode: String,
    #[serde(default)]
    gamma1_plus: f64,
    #[serde(default)]
    gamma1_minus: f64,
    #[serde(default = "default_gamma2")]
    gamma2: f64,
    #[serde(default)]
    omega: f64,
    #[serde(default)]
    sweep_parameter: Option<String>,
    #[serde(default)]
    sweep_start: Option<f64>,
    #[serde(default)]
    sweep_stop: Option<f64>,
    #[serde(default)]
    sweep_count: Option<usize>,
    #[serde(default = "default_scale")]
    sweep_scale: String,
    #[serde(default = "default_n_levels")]
    n_levels: usize,
    #[serde(default = "default_tail_tol")]
    tail_tol: f64,
    #[serde(default = "default_n_max")]
    n_max: usize,
    #[serde(default = "default_tol")]
    tol: f64,
    #[serde(default = "default_n_radial")]
    n_radial: usize,
    #[serde(default = "default_n_angular")]
    n_angular: usize,
    #[serde(default)]
    r_max: Option<f64>,
    #[serde(default)]
    output: Option<String>,
    #[serde(default = "default_format")]
    format: String,
    #[serde(default)]
    workers: usize,
    #[serde(default)]
    strict: bool,
}

fn default_gamma2() -> f64 {
    1.0
}
fn default_scale() -> String {
    "log".into()
}
fn default_n_levels() -> usize {
    15
}
fn default_tail_tol() -> f64 {
    1e-10
}
fn default_n_max() -> usize {
    400
}
fn default_tol() -> f64 {
    1e-10
}
fn default_n_radial() -> usize {
    200
}
fn default_n_angular() -> usize {
    256
}
fn default_format() -> String {
    "csv".into()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    DriveSweep,
    RateSweep,
    Wigner,
    Classical,
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::DriveSweep => "drive-sweep",
            Mode::RateSweep => "rate-sweep",
            Mode::Wigner => "wigner",
            Mode::Classical => "classical",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParameter {
    Omega,
    Gamma1Plus,
    Gamma1Minus,
}

impl SweepParameter {
    pub fn as_str(&self) -> &'static str {
        match self {
            SweepParameter::Omega => "omega",
            SweepParameter::Gamma1Plus => "gamma1_plus",
            SweepParameter::Gamma1Minus => "gamma1_minus",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    Log,
    Linear,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    pub fn extension(&self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Range {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    pub scale: Scale,
}

impl Range {
    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        (0..self.count)
            .map(|i| {
                let t = i as f64 / (self.count - 1) as f64;
                match self.scale {
                    Scale::Linear => self.start + (self.stop - self.start) * t,
                    Scale::Log => self.start * (self.stop / self.start).powf(t),
                }
            })
            .collect()
    }
}

/// Validated run configuration.
#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub mode: Mode,
    pub gamma1_plus: f64,
    pub gamma1_minus: f64,
    pub gamma2: f64,
    pub omega: f64,
    pub sweep_parameter: SweepParameter,
    pub range: Option<Range>,
    pub trunc: qvdp::Truncation,
    pub tol: f64,
    pub n_radial: usize,
    pub n_angular: usize,
    pub r_max: Option<f64>,
    pub output: String,
    pub format: OutputFormat,
    pub workers: usize,
    pub strict: bool,
}

/// Parses and validates a flat JSON configuration document.
pub fn parse_config(text: &str) -> Result<SweepConfig, ConfigError> {
    let raw: RawConfig = serde_json::from_str(text)?;

    let mode = match raw.mode.as_str() {
        "drive-sweep" => Mode::DriveSweep,
        "rate-sweep" => Mode::RateSweep,
        "wigner" => Mode::Wigner,
        "classical" => Mode::Classical,
        other => {
            return Err(invalid(
                "mode",
                format!("unknown mode {other:?}; expected drive-sweep | rate-sweep | wigner | classical"),
            ))
        }
    };

    for (field, v, positive) in [
        ("gamma1_plus", raw.gamma1_plus, false),
        ("gamma1_minus", raw.gamma1_minus, false),
        ("gamma2", raw.gamma2, true),
        ("omega", raw.omega, false),
    ] {
        if !v.is_finite() {
            return Err(invalid(field, format!("must be finite, got {v}")));
        }
        if positive && v <= 0.0 {
            return Err(invalid(field, format!("must be > 0, got {v}")));
        }
        if !positive && v < 0.0 {
            return Err(invalid(field, format!("must be >= 0, got {v}")));
        }
    }

    let sweep_parameter = match (&raw.sweep_parameter, mode) {
        (None, Mode::DriveSweep | Mode::Classical) => SweepParameter::Omega,
        (None, Mode::RateSweep) => {
            return Err(invalid(
                "sweep_parameter",
                "rate-sweep requires sweep_parameter = gamma1_plus | gamma1_minus",
            ))
        }
        (None, Mode::Wigner) => SweepParameter::Omega,
        (Some(s), _) => match s.as_str() {
            "omega" => SweepParameter::Omega,
            "gamma1_plus" => SweepParameter::Gamma1Plus,
            "gamma1_minus" => SweepParameter::Gamma1Minus,
            other => {
                return Err(invalid(
                    "sweep_parameter",
                    format!("unknown parameter {other:?}"),
                ))
            }
        },
    };
    match mode {
        Mode::DriveSweep | Mode::Classical => {
            if sweep_parameter != SweepParameter::Omega {
                return Err(invalid(
                    "sweep_parameter",
                    format!("{} sweeps omega only", mode.as_str()),
                ));
            }
        }
        Mode::RateSweep => {
            if sweep_parameter == SweepParameter::Omega {
                return Err(invalid(
                    "sweep_parameter",
                    "rate-sweep varies gamma1_plus or gamma1_minus, not omega",
                ));
            }
        }
        Mode::Wigner => {}
    }

    let scale = match raw.sweep_scale.as_str() {
        "log" => Scale::Log,
        "linear" => Scale::Linear,
        other => {
            return Err(invalid(
                "sweep_scale",
                format!("expected \"log\" or \"linear\", got {other:?}"),
            ))
        }
    };

    let range = if mode == Mode::Wigner {
        None
    } else {
        let start = raw
            .sweep_start
            .ok_or_else(|| invalid("sweep_start", "required for sweep modes"))?;
        let stop = raw
            .sweep_stop
            .ok_or_else(|| invalid("sweep_stop", "required for sweep modes"))?;
        let count = raw
            .sweep_count
            .ok_or_else(|| invalid("sweep_count", "required for sweep modes"))?;
        if count < 1 {
            return Err(invalid("sweep_count", "must be >= 1 (empty range)"));
        }
        if !start.is_finite() || !stop.is_finite() {
            return Err(invalid("sweep_start", "range endpoints must be finite"));
        }
        if scale == Scale::Log && (start <= 0.0 || stop <= 0.0) {
            return Err(invalid(
                "sweep_scale",
                format!("log range requires positive endpoints, got [{start}, {stop}]"),
            ));
        }
        Some(Range {
            start,
            stop,
            count,
            scale,
        })
    };

    let trunc = qvdp::Truncation::new(raw.n_levels, raw.tail_tol, raw.n_max).map_err(|e| {
        invalid("n_levels", e.to_string())
    })?;
    if !(raw.tol > 0.0) {
        return Err(invalid("tol", format!("must be > 0, got {}", raw.tol)));
    }
    if let Some(r) = raw.r_max {
        if !(r > 0.0) {
            return Err(invalid("r_max", format!("must be > 0, got {r}")));
        }
    }

    let format = match raw.format.as_str() {
        "csv" => OutputFormat::Csv,
        "json" => OutputFormat::Json,
        other => {
            return Err(invalid(
                "format",
                format!("expected \"csv\" or \"json\", got {other:?}"),
            ))
        }
    };

    let output = raw.output.unwrap_or_else(|| {
        format!("{}.{}", mode.as_str().replace('-', "_"), format.extension())
    });

    Ok(SweepConfig {
        mode,
        gamma1_plus: raw.gamma1_plus,
        gamma1_minus: raw.gamma1_minus,
        gamma2: raw.gamma2,
        omega: raw.omega,
        sweep_parameter,
        range,
        trunc,
        tol: raw.tol,
        n_radial: raw.n_radial,
        n_angular: raw.n_angular,
        r_max: raw.r_max,
        output,
        format,
        workers: raw.workers,
        strict: raw.strict,
    })
}

impl SweepConfig {
    /// Header-comment echo of the dataset-defining fields (execution knobs
    /// like `workers`/`strict` are excluded: they never change the data).
    pub fn echo_lines(&self) -> Vec<String> {
        use crate::emit::fmt_f;
        let mut lines = vec![
            format!("mode: {}", self.mode.as_str()),
            format!(
                "params: gamma1_plus={} gamma1_minus={} gamma2={} omega={}",
                fmt_f(self.gamma1_plus),
                fmt_f(self.gamma1_minus),
                fmt_f(self.gamma2),
                fmt_f(self.omega)
            ),
        ];
        if let Some(r) = &self.range {
            lines.push(format!(
                "sweep: parameter={} start={} stop={} count={} scale={}",
                self.sweep_parameter.as_str(),
                fmt_f(r.start),
                fmt_f(r.stop),
                r.count,
                match r.scale {
                    Scale::Log => "log",
                    Scale::Linear => "linear",
                }
            ));
        }
        lines.push(format!(
            "truncation: n_levels={} tail_tol={} n_max={}",
            self.trunc.n_levels,
            fmt_f(self.trunc.tail_tol),
            self.trunc.n_max
        ));
        lines.push(format!("tol: {}", fmt_f(self.tol)));
        if self.mode == Mode::Wigner {
            lines.push(format!(
                "grid: n_radial={} n_angular={} r_max={}",
                self.n_radial,
                self.n_angular,
                self.r_max.map_or("auto".into(), fmt_f)
            ));
        }
        lines
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_drive_sweep_gets_defaults() {
        let cfg = parse_config(
            r#"{"mode": "drive-sweep", "sweep_start": 1e-4, "sweep_stop": 10.0, "sweep_count": 5}"#,
        )
        .unwrap();
        assert_eq!(cfg.mode, Mode::DriveSweep);
        assert_eq!(cfg.gamma2, 1.0);
        assert_eq!(cfg.trunc.n_levels, 15);
        assert_eq!(cfg.trunc.tail_tol, 1e-10);
        assert_eq!(cfg.format, OutputFormat::Csv);
        assert_eq!(cfg.output, "drive_sweep.csv");
        assert_eq!(cfg.range.unwrap().values().len(), 5);
    }

    #[test]
    fn negative_gamma2_names_the_field() {
        let err = parse_config(
            r#"{"mode": "drive-sweep", "gamma2": -1.0, "sweep_start": 0.1, "sweep_stop": 1.0, "sweep_count": 2}"#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("gamma2"), "{err}");
    }

    #[test]
    fn log_range_rejects_zero_endpoint() {
        let err = parse_config(
            r#"{"mode": "drive-sweep", "sweep_start": 0.0, "sweep_stop": 1.0, "sweep_count": 3}"#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("log range"), "{err}");
    }

    #[test]
    fn empty_range_is_rejected() {
        let err = parse_config(
            r#"{"mode": "drive-sweep", "sweep_start": 0.1, "sweep_stop": 1.0, "sweep_count": 0}"#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("sweep_count"), "{err}");
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = parse_config(r#"{"mode": "wigner", "bogus": 1}"#).unwrap_err();
        assert!(err.to_string().contains("bogus"), "{err}");
    }

    #[test]
    fn rate_sweep_needs_a_rate_parameter() {
        let err = parse_config(
            r#"{"mode": "rate-sweep", "sweep_start": 0.001, "sweep_stop": 1.0, "sweep_count": 4}"#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("sweep_parameter"), "{err}");
        let cfg = parse_config(
            r#"{"mode": "rate-sweep", "sweep_parameter": "gamma1_minus",
                "sweep_start": 0.001, "sweep_stop": 1.0, "sweep_count": 4}"#,
        )
        .unwrap();
        assert_eq!(cfg.sweep_parameter, SweepParameter::Gamma1Minus);
    }

    #[test]
    fn linear_scale_range_values() {
        let r = Range {
            start: 0.0,
            stop: 1.0,
            count: 5,
            scale: Scale::Linear,
        };
        assert_eq!(r.values(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    }
}

//! Batch front end for the `qvdp` library: JSON-configured parameter sweeps
//! executed on a bounded worker pool, Wigner grid exports, the closed-form
//! classical curve, and figure presets bundling the standard datasets.
//!
//! Outputs are reproducible by construction: fixed column orders, 17
//! significant digits, `#`-prefixed header comments echoing the generating
//! configuration, no timestamps, and numeric results independent of the
//! worker count.

pub mod config;
pub mod emit;
pub mod figures;
pub mod sweep;

pub use config::{parse_config, ConfigError, Mode, OutputFormat, SweepConfig};
pub use figures::{figure_preset, FigureName};
pub use sweep::run_config;

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "QVDP_OUT_DIR";

//! Deterministic dataset writers: CSV with `#` header comments, or JSON.

use std::fs;
use std::io::Write;
use std::path::Path;

/// 17 significant digits, fixed exponent form; round-trips f64 exactly and
/// never varies between runs.
pub fn fmt_f(x: f64) -> String {
    format!("{x:.16e}")
}

/// Optional cell: empty when the quantity is undefined at this point.
pub fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f).unwrap_or_default()
}

const TOOL_LINE: &str = concat!("qvdp ", env!("CARGO_PKG_VERSION"));

/// Writes a CSV dataset: `#` comments (tool line, caller-provided echo,
/// column list), then the header row and data rows.
pub fn write_csv(
    path: &Path,
    comments: &[String],
    header: &[&str],
    rows: &[Vec<String>],
) -> std::io::Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir)?;
        }
    }
    let mut out = String::new();
    out.push_str(&format!("# {TOOL_LINE}\n"));
    for c in comments {
        out.push_str(&format!("# {c}\n"));
    }
    out.push_str(&format!("# columns: {}\n", header.join(",")));
    out.push_str(&header.join(","));
    out.push('\n');
    for row in rows {
        debug_assert_eq!(row.len(), header.len());
        out.push_str(&row.join(","));
        out.push('\n');
    }
    let mut f = fs::File::create(path)?;
    f.write_all(out.as_bytes())
}

/// Writes the same dataset as a JSON document: metadata, column names, and
/// rows as arrays of (string) cells, preserving the CSV cell formatting so
/// the two formats carry identical numbers.
pub fn write_json(
    path: &Path,
    comments: &[String],
    header: &[&str],
    rows: &[Vec<String>],
) -> std::io::Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir)?;
        }
    }
    let doc = serde_json::json!({
        "tool": TOOL_LINE,
        "config": comments,
        "columns": header,
        "rows": rows,
    });
    let mut f = fs::File::create(path)?;
    serde_json::to_writer_pretty(&mut f, &doc)?;
    f.write_all(b"\n")
}

pub fn write_dataset(
    path: &Path,
    format: crate::config::OutputFormat,
    comments: &[String],
    header: &[&str],
    rows: &[Vec<String>],
) -> std::io::Result<()> {
    match format {
        crate::config::OutputFormat::Csv => write_csv(path, comments, header, rows),
        crate::config::OutputFormat::Json => write_json(path, comments, header, rows),
    }
}

//! Writing sweep rows as CSV or JSON, plus a metadata sidecar.

use std::fmt::Write as _;
use std::io;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use super::config::{config_to_toml, OutputFormat, SweepConfig};
use super::run::{SweepRow, COLUMNS};

fn num(v: f64) -> String {
    format!("{v:.8e}")
}

fn opt_num(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// CSV with a header line. Floats carry nine significant digits; missing values
/// are empty fields.
pub fn to_csv(rows: &[SweepRow]) -> String {
    let mut out = COLUMNS.join(",");
    out.push('\n');
    for r in rows {
        let fields = [
            r.axis.as_str().to_string(),
            num(r.axis_value),
            r.curve.as_str().to_string(),
            num(r.temperature_k),
            opt_num(r.n_bar),
            opt_num(r.delta_m_kg),
            opt_num(r.delta_m_display),
            r.display_unit.label().to_string(),
            opt_num(r.delta_omega),
            opt_num(r.e_noise_j),
            opt_num(r.c11),
            r.stable.map(|b| b.to_string()).unwrap_or_default(),
            r.method.as_str().to_string(),
            r.status.as_str().to_string(),
            csv_field(&r.message),
        ];
        let _ = writeln!(out, "{}", fields.join(","));
    }
    out
}

pub fn to_json(rows: &[SweepRow]) -> String {
    let mut s = serde_json::to_string_pretty(rows).expect("rows serialise");
    s.push('\n');
    s
}

/// Sidecar path for a data file: `<output>.meta`.
pub fn metadata_path(output: &Path) -> PathBuf {
    let mut s = output.as_os_str().to_owned();
    s.push(".meta");
    PathBuf::from(s)
}

/// Config in canonical form plus a `[run]` table. Valid input for
/// [`parse_config`](super::config::parse_config).
pub fn metadata(cfg: &SweepConfig, rows: &[SweepRow]) -> String {
    let mut t = config_to_toml(cfg);
    let mut run = toml::Table::new();
    run.insert("version".into(), toml::Value::String(env!("CARGO_PKG_VERSION").into()));
    let secs = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs() as i64)
        .unwrap_or(0);
    run.insert("unix_time".into(), toml::Value::Integer(secs));
    run.insert("rows".into(), toml::Value::Integer(rows.len() as i64));
    run.insert(
        "failed_rows".into(),
        toml::Value::Integer(rows.iter().filter(|r| !r.is_ok()).count() as i64),
    );
    t.insert("run".into(), toml::Value::Table(run));
    toml::to_string(&t).expect("config serialises")
}

/// Write the data file and its sidecar. Returns the sidecar path.
pub fn emit(rows: &[SweepRow], cfg: &SweepConfig, path: &Path, format: OutputFormat) -> io::Result<PathBuf> {
    let body = match format {
        OutputFormat::Csv => to_csv(rows),
        OutputFormat::Json => to_json(rows),
    };
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(path, body)?;
    let meta = metadata_path(path);
    std::fs::write(&meta, metadata(cfg, rows))?;
    Ok(meta)
}

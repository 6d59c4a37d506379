//! Artifact writing: atomic file output, the config-echo envelope and
//! fixed-dialect CSV (comma delimiter, `.` decimal, header row, LF endings,
//! six significant digits unless full precision is requested).

use std::fs;
use std::io::Write;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use serde_json::{json, Map, Value};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Shared per-invocation output settings.
#[derive(Debug, Clone)]
pub struct OutputOptions {
    pub no_timestamp: bool,
    pub full_precision: bool,
}

/// Envelope metadata embedded in every artifact.
#[derive(Debug, Clone)]
pub struct Envelope {
    pub command: String,
    /// The resolved parameter bag the command actually ran with.
    pub config: Value,
    pub timestamp_unix: Option<u64>,
}

impl Envelope {
    pub fn new(command: &str, config: Value, opts: &OutputOptions) -> Self {
        let timestamp_unix = (!opts.no_timestamp).then(|| {
            SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0)
        });
        Envelope {
            command: command.to_string(),
            config,
            timestamp_unix,
        }
    }
}

/// Format a value to six significant digits, trimming trailing zeros.
pub fn sig6(x: f64) -> String {
    format_sig(x, 6)
}

pub fn format_sig(x: f64, digits: i32) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0".to_string();
    }
    let exponent = x.abs().log10().floor() as i32;
    let decimals = digits - 1 - exponent;
    let factor = 10f64.powi(decimals);
    let mut rounded = (x * factor).round() / factor;
    if rounded == 0.0 {
        rounded = 0.0; // normalize -0
    }
    format!("{rounded}")
}

/// Format by output options: six significant digits or shortest round trip.
pub fn fmt_value(x: f64, opts: &OutputOptions) -> String {
    if opts.full_precision {
        format!("{x}")
    } else {
        sig6(x)
    }
}

fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)
        .with_context(|| format!("creating temp file in {}", dir.display()))?;
    tmp.write_all(bytes)?;
    tmp.flush()?;
    tmp.persist(path)
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

/// Write a CSV artifact with the envelope as leading comment lines.
pub fn write_csv(
    path: &Path,
    envelope: &Envelope,
    header: &str,
    rows: &[Vec<String>],
) -> Result<()> {
    let mut text = String::new();
    text.push_str(&format!("# igmrf {VERSION}\n"));
    text.push_str(&format!("# command: {}\n", envelope.command));
    text.push_str(&format!(
        "# config: {}\n",
        serde_json::to_string(&envelope.config)?
    ));
    if let Some(ts) = envelope.timestamp_unix {
        text.push_str(&format!("# timestamp_unix: {ts}\n"));
    }
    text.push_str(header);
    text.push('\n');
    for row in rows {
        text.push_str(&row.join(","));
        text.push('\n');
    }
    atomic_write(path, text.as_bytes())
}

/// Write a JSON artifact with envelope fields merged into the top level.
pub fn write_json(path: &Path, envelope: &Envelope, payload: Value) -> Result<()> {
    let mut map = Map::new();
    map.insert("tool".into(), json!("igmrf"));
    map.insert("version".into(), json!(VERSION));
    map.insert("command".into(), json!(envelope.command));
    map.insert("config".into(), envelope.config.clone());
    if let Some(ts) = envelope.timestamp_unix {
        map.insert("timestamp_unix".into(), json!(ts));
    }
    match payload {
        Value::Object(fields) => {
            for (k, v) in fields {
                map.insert(k, v);
            }
        }
        other => {
            map.insert("result".into(), other);
        }
    }
    let text = serde_json::to_string_pretty(&Value::Object(map))? + "\n";
    atomic_write(path, text.as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_significant_digits() {
        assert_eq!(sig6(2.909693151), "2.90969");
        assert_eq!(sig6(0.0001234567), "0.000123457");
        assert_eq!(sig6(-41.390321), "-41.3903");
        assert_eq!(sig6(1234567.89), "1234570");
        assert_eq!(sig6(0.0), "0");
        assert_eq!(sig6(2.0), "2");
    }
}

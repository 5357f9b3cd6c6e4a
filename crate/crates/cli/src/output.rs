//! CSV and JSON writers. Every CSV starts with one `#` line carrying the
//! tool version, command and a UTC timestamp; the remaining payload is a
//! deterministic function of the configuration.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use chrono::{SecondsFormat, Utc};
use csv::{QuoteStyle, Writer, WriterBuilder};

use crate::CliError;

pub fn timestamp() -> String {
    Utc::now().to_rfc3339_opts(SecondsFormat::Secs, true)
}

pub fn create_csv(dir: &Path, name: &str, command: &str, header: &[&str]) -> Result<Writer<BufWriter<File>>, CliError> {
    fs::create_dir_all(dir)?;
    let mut file = BufWriter::new(File::create(dir.join(name))?);
    writeln!(file, "# badapprox {} {command} generated {}", env!("CARGO_PKG_VERSION"), timestamp())?;
    let mut writer = WriterBuilder::new().quote_style(QuoteStyle::NonNumeric).from_writer(file);
    writer.write_record(header)?;
    Ok(writer)
}

pub fn write_json(dir: &Path, name: &str, value: &serde_json::Value) -> Result<PathBuf, CliError> {
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.into()))?;
    text.push('\n');
    fs::write(&path, text)?;
    Ok(path)
}

/// Values joined by single spaces.
pub fn join<T: ToString>(values: &[T]) -> String {
    values.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")
}

/// File contents without `#` comment lines.
pub fn payload(path: &Path) -> Result<String, CliError> {
    Ok(fs::read_to_string(path)?
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| format!("{l}\n"))
        .collect())
}

/// JSON number, or its text (`inf`, `NaN`) when not finite.
pub fn json_f64(x: f64) -> serde_json::Value {
    if x.is_finite() {
        serde_json::json!(x)
    } else {
        serde_json::json!(x.to_string())
    }
}

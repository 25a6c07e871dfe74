use std::io::Write;
use std::path::{Path, PathBuf};

use domecast::{parse_catalog, Catalog, Error, Result};
use serde::Serialize;
use serde_json::Value;

/// Writes `bytes` to `dir/name` through a temporary file and a rename.
pub fn write_atomic(dir: &Path, name: &str, bytes: &[u8]) -> Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.flush()?;
    let path = dir.join(name);
    tmp.persist(&path).map_err(|e| Error::Io(e.error))?;
    Ok(path)
}

pub fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<PathBuf> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_atomic(dir, name, text.as_bytes())
}

pub fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

/// Loads a catalog, converting durations from days when `days` is set.
pub fn read_catalog(path: &Path, days: bool) -> Result<Catalog> {
    let catalog = parse_catalog(&read_text(path)?)?;
    Ok(if days { catalog.durations_in_days_to_years() } else { catalog })
}

pub fn read_json(path: &Path) -> Result<Value> {
    let value: Value = serde_json::from_str(&read_text(path)?)?;
    match value.get("schema").and_then(Value::as_str) {
        Some(domecast::SCHEMA) => Ok(value),
        Some(other) => Err(Error::InvalidRecord(format!(
            "{} has schema {other:?}, expected {:?}",
            path.display(),
            domecast::SCHEMA
        ))),
        None => Err(Error::InvalidRecord(format!("{} has no schema field", path.display()))),
    }
}

pub fn csv_bytes<F>(write: F) -> Result<Vec<u8>>
where
    F: FnOnce(&mut csv::Writer<&mut Vec<u8>>) -> Result<()>,
{
    let mut buf = Vec::new();
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        write(&mut w)?;
        w.flush()?;
    }
    Ok(buf)
}

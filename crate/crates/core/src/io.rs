//! CSV export and JSON sidecars.

use crate::constants::{BOHR_MAGNETON, HBAR};
use crate::error::Result;
use crate::spectrum::SpectrumGrid;
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

/// Hex SHA-256 digest of the given bytes.
pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Metadata written next to every output file.
#[derive(Clone, Debug, Serialize)]
pub struct Sidecar {
    pub file: String,
    pub config_hash: String,
    pub method: String,
    pub achieved_tolerance: f64,
    pub constants: Value,
    pub details: Value,
    pub warnings: Vec<String>,
}

impl Sidecar {
    pub fn new(file: &Path, config_hash: &str, method: &str, achieved_tolerance: f64) -> Self {
        Sidecar {
            file: file.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default(),
            config_hash: config_hash.to_string(),
            method: method.to_string(),
            achieved_tolerance,
            constants: json!({ "hbar": HBAR, "bohr_magneton": BOHR_MAGNETON }),
            details: Value::Null,
            warnings: vec![],
        }
    }

    pub fn with_details(mut self, details: Value) -> Self {
        self.details = details;
        self
    }

    pub fn with_warnings(mut self, warnings: &[String]) -> Self {
        self.warnings = warnings.to_vec();
        self
    }

    /// Path of the sidecar belonging to `data`: `name.csv` → `name.csv.json`.
    pub fn path_for(data: &Path) -> PathBuf {
        let mut s = data.as_os_str().to_owned();
        s.push(".json");
        PathBuf::from(s)
    }

    pub fn write_for(&self, data: &Path) -> Result<PathBuf> {
        let p = Self::path_for(data);
        write_json(&p, self)?;
        Ok(p)
    }
}

pub fn write_json<T: Serialize>(path: &Path, v: &T) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, v)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

/// Writes a CSV with the given header; numbers use the shortest
/// round-trip decimal form so outputs are reproducible byte for byte.
pub fn write_csv(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(row.iter().map(|v| format!("{v:e}")))?;
    }
    w.flush()?;
    Ok(())
}

/// Spectrum as `omega_T,re,im,abs`; points without a value are `NaN`.
pub fn write_spectrum_csv(path: &Path, grid: &SpectrumGrid) -> Result<()> {
    let rows = grid.omega_t.iter().zip(&grid.values).zip(&grid.valid).map(|((&x, v), &ok)| {
        if ok {
            vec![x, v.re, v.im, v.norm()]
        } else {
            vec![x, f64::NAN, f64::NAN, f64::NAN]
        }
    });
    write_csv(path, &["omega_T", "re", "im", "abs"], rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::Method;
    use num_complex::Complex64;

    #[test]
    fn hash_is_stable() {
        assert_eq!(sha256_hex(b"abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    }

    #[test]
    fn spectrum_csv_layout() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.csv");
        let mut g = SpectrumGrid::new(vec![1.0, 2.0], vec![Complex64::new(3.0, 4.0); 2], Method::Numeric);
        g.valid[1] = false;
        write_spectrum_csv(&path, &g).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "omega_T,re,im,abs");
        assert_eq!(lines[1], "1e0,3e0,4e0,5e0");
        assert_eq!(lines[2], "2e0,NaN,NaN,NaN");
        let sc = Sidecar::new(&path, "h", "numeric", 1e-9);
        let p = sc.write_for(&path).unwrap();
        assert!(p.to_string_lossy().ends_with("s.csv.json"));
    }
}

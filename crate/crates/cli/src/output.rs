use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use qubit_retro::mat::{CMat, PauliCoeffs};
use serde::Serialize;

pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn real_matrix<const N: usize>(out: &mut dyn Write, label: &str, rows: &[[f64; N]]) -> Result<()> {
    writeln!(out, "{label}:")?;
    for row in rows {
        let cells: Vec<String> = row.iter().map(|x| format!("{:>24}", num(*x))).collect();
        writeln!(out, "  {}", cells.join(" "))?;
    }
    Ok(())
}

pub fn complex_matrix<const N: usize>(out: &mut dyn Write, label: &str, m: &CMat<N>) -> Result<()> {
    writeln!(out, "{label}:")?;
    for row in &m.0 {
        let cells: Vec<String> = row.iter().map(|z| format!("({}, {})", num(z.re), num(z.im))).collect();
        writeln!(out, "  {}", cells.join("  "))?;
    }
    Ok(())
}

pub fn coeffs(out: &mut dyn Write, a: &PauliCoeffs) -> Result<()> {
    real_matrix(out, "a_ij (a_00 = 1)", &a.0)
}

pub fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create output directory {}", dir.display()))
}

pub fn write_bytes(dir: &Path, name: &str, bytes: &[u8]) -> Result<PathBuf> {
    ensure_dir(dir)?;
    let path = dir.join(name);
    fs::write(&path, bytes).with_context(|| format!("cannot write {}", path.display()))?;
    Ok(path)
}

pub fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<PathBuf> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_bytes(dir, name, text.as_bytes())
}

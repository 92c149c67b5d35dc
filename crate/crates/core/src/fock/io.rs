//! Portable vector files.
//!
//! Binary layout, all integers and floats little-endian:
//!
//! | offset | size | content                                   |
//! |--------|------|-------------------------------------------|
//! | 0      | 8    | magic `PHI4FOCK`                          |
//! | 8      | 4    | format version, `u32` = 1                 |
//! | 12     | 4    | number of modes M, `u32`                  |
//! | 16     | 4    | truncation N_max, `u32`                   |
//! | 20     | 4    | basis order tag, `u32` (1 = graded lex)   |
//! | 24     | 8    | dimension, `u64`                          |
//! | 32     | 16·n | coefficients as `(re: f64, im: f64)` pairs |
//!
//! The text form carries the same header as `key value` lines followed by
//! one `re im` line per coefficient, 17 significant digits.

use std::io::{BufRead, Read, Write};

use super::{FockBasis, FockVector};
use crate::error::{Error, Result};
use crate::C64;

const MAGIC: &[u8; 8] = b"PHI4FOCK";
const VERSION: u32 = 1;
pub const ORDER_TAG_GRADED_LEX: u32 = 1;

pub fn write_binary<W: Write>(mut w: W, basis: &FockBasis, v: &FockVector) -> Result<()> {
    check(basis, v)?;
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&(basis.modes() as u32).to_le_bytes())?;
    w.write_all(&(basis.n_max() as u32).to_le_bytes())?;
    w.write_all(&ORDER_TAG_GRADED_LEX.to_le_bytes())?;
    w.write_all(&(v.len() as u64).to_le_bytes())?;
    for c in v.iter() {
        w.write_all(&c.re.to_le_bytes())?;
        w.write_all(&c.im.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_binary<R: Read>(mut r: R, basis: &FockBasis) -> Result<FockVector> {
    let mut header = [0u8; 32];
    r.read_exact(&mut header)?;
    if &header[..8] != MAGIC {
        return Err(Error::Format("bad magic, not a fock vector file".into()));
    }
    let word = |at: usize| u32::from_le_bytes(header[at..at + 4].try_into().unwrap());
    if word(8) != VERSION {
        return Err(Error::Format(format!(
            "unsupported format version {}",
            word(8)
        )));
    }
    let dim = u64::from_le_bytes(header[24..32].try_into().unwrap());
    check_header(basis, word(12) as usize, word(16) as usize, word(20), dim)?;
    let mut coeffs = Vec::with_capacity(basis.dim());
    let mut buf = [0u8; 16];
    for _ in 0..basis.dim() {
        r.read_exact(&mut buf)?;
        let re = f64::from_le_bytes(buf[..8].try_into().unwrap());
        let im = f64::from_le_bytes(buf[8..].try_into().unwrap());
        coeffs.push(C64::new(re, im));
    }
    Ok(FockVector::from_coeffs(coeffs))
}

pub fn write_text<W: Write>(mut w: W, basis: &FockBasis, v: &FockVector) -> Result<()> {
    check(basis, v)?;
    writeln!(w, "# phi4lab fock vector")?;
    writeln!(w, "modes {}", basis.modes())?;
    writeln!(w, "n_max {}", basis.n_max())?;
    writeln!(w, "order {ORDER_TAG_GRADED_LEX}")?;
    writeln!(w, "dimension {}", v.len())?;
    for c in v.iter() {
        writeln!(w, "{:.16e} {:.16e}", c.re, c.im)?;
    }
    Ok(())
}

pub fn read_text<R: BufRead>(r: R, basis: &FockBasis) -> Result<FockVector> {
    let mut header: Vec<(String, u64)> = Vec::new();
    let mut coeffs = Vec::new();
    for line in r.lines() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split_whitespace();
        let (a, b) = match (parts.next(), parts.next(), parts.next()) {
            (Some(a), Some(b), None) => (a, b),
            _ => return Err(Error::Format(format!("expected two fields: {line:?}"))),
        };
        if header.len() < 4 {
            let value = b
                .parse::<u64>()
                .map_err(|e| Error::Format(format!("header {a}: {e}")))?;
            header.push((a.to_string(), value));
            continue;
        }
        let parse = |s: &str| {
            s.parse::<f64>()
                .map_err(|e| Error::Format(format!("coefficient {s:?}: {e}")))
        };
        coeffs.push(C64::new(parse(a)?, parse(b)?));
    }
    let keys: Vec<&str> = header.iter().map(|(k, _)| k.as_str()).collect();
    if keys != ["modes", "n_max", "order", "dimension"] {
        return Err(Error::Format(format!("unexpected header keys {keys:?}")));
    }
    check_header(
        basis,
        header[0].1 as usize,
        header[1].1 as usize,
        header[2].1 as u32,
        header[3].1,
    )?;
    if coeffs.len() != basis.dim() {
        return Err(Error::Format(format!(
            "expected {} coefficients, found {}",
            basis.dim(),
            coeffs.len()
        )));
    }
    Ok(FockVector::from_coeffs(coeffs))
}

fn check(basis: &FockBasis, v: &FockVector) -> Result<()> {
    if v.len() != basis.dim() {
        return Err(Error::BasisMismatch(format!(
            "vector length {} vs basis dimension {}",
            v.len(),
            basis.dim()
        )));
    }
    Ok(())
}

fn check_header(basis: &FockBasis, modes: usize, n_max: usize, order: u32, dim: u64) -> Result<()> {
    if order != ORDER_TAG_GRADED_LEX {
        return Err(Error::Format(format!("unknown basis order tag {order}")));
    }
    if modes != basis.modes() || n_max != basis.n_max() || dim != basis.dim() as u64 {
        return Err(Error::BasisMismatch(format!(
            "file has M = {modes}, N_max = {n_max}, dim = {dim}; basis has M = {}, N_max = {}, dim = {}",
            basis.modes(),
            basis.n_max(),
            basis.dim()
        )));
    }
    Ok(())
}

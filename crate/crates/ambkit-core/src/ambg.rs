//! The AMBG binary grid format.
//!
//! Little-endian layout:
//!
//! ```text
//! offset  size  field
//! 0       4     magic bytes "AMBG"
//! 4       4     u32 version (must be 1)
//! 8       4     u32 n_tau
//! 12      4     u32 n_nu
//! 16      8     f64 tau0
//! 24      8     f64 dtau
//! 32      8     f64 nu0
//! 40      8     f64 dnu
//! 48      ...   n_tau * n_nu complex values as interleaved f64 (re, im),
//!               row-major with τ as the row index
//! ```
//!
//! Readers reject unknown versions, bad magic, and length mismatches.
//! Write → read → write reproduces a file byte for byte.

use num_complex::Complex64;
use std::io::{Read, Write};
use std::path::Path;

use crate::ambiguity::{AmbiguityGrid, GridSpec};
use crate::error::{Error, Result};

const MAGIC: &[u8; 4] = b"AMBG";
const VERSION: u32 = 1;
const HEADER_LEN: usize = 48;

pub fn to_bytes(grid: &AmbiguityGrid) -> Vec<u8> {
    let spec = grid.spec();
    let mut out = Vec::with_capacity(HEADER_LEN + 16 * grid.values().len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(spec.n_tau as u32).to_le_bytes());
    out.extend_from_slice(&(spec.n_nu as u32).to_le_bytes());
    for v in [spec.tau0, spec.dtau, spec.nu0, spec.dnu] {
        out.extend_from_slice(&v.to_le_bytes());
    }
    for v in grid.values() {
        out.extend_from_slice(&v.re.to_le_bytes());
        out.extend_from_slice(&v.im.to_le_bytes());
    }
    out
}

pub fn from_bytes(bytes: &[u8]) -> Result<AmbiguityGrid> {
    if bytes.len() < HEADER_LEN {
        return Err(Error::Format(format!(
            "AMBG header needs {HEADER_LEN} bytes, file has {}",
            bytes.len()
        )));
    }
    if &bytes[0..4] != MAGIC {
        return Err(Error::Format("bad magic, expected \"AMBG\"".to_string()));
    }
    let read_u32 = |at: usize| u32::from_le_bytes(bytes[at..at + 4].try_into().unwrap());
    let read_f64 = |at: usize| f64::from_le_bytes(bytes[at..at + 8].try_into().unwrap());
    let version = read_u32(4);
    if version != VERSION {
        return Err(Error::Format(format!(
            "unsupported AMBG version {version}, expected {VERSION}"
        )));
    }
    let n_tau = read_u32(8) as usize;
    let n_nu = read_u32(12) as usize;
    let spec = GridSpec::new(
        read_f64(16),
        read_f64(24),
        n_tau,
        read_f64(32),
        read_f64(40),
        n_nu,
    )
    .map_err(|e| Error::Format(format!("invalid grid geometry: {e}")))?;
    let expected = n_tau
        .checked_mul(n_nu)
        .and_then(|cells| cells.checked_mul(16))
        .and_then(|payload| payload.checked_add(HEADER_LEN))
        .ok_or_else(|| Error::Format("grid dimensions overflow".to_string()))?;
    if bytes.len() != expected {
        return Err(Error::Format(format!(
            "expected {expected} bytes for a {n_tau}x{n_nu} grid, file has {}",
            bytes.len()
        )));
    }
    let values = bytes[HEADER_LEN..]
        .chunks_exact(16)
        .map(|chunk| {
            Complex64::new(
                f64::from_le_bytes(chunk[0..8].try_into().unwrap()),
                f64::from_le_bytes(chunk[8..16].try_into().unwrap()),
            )
        })
        .collect();
    AmbiguityGrid::new(spec, values).map_err(|e| Error::Format(format!("invalid grid data: {e}")))
}

pub fn write(path: impl AsRef<Path>, grid: &AmbiguityGrid) -> Result<()> {
    let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
    file.write_all(&to_bytes(grid))?;
    file.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(())
}

pub fn read(path: impl AsRef<Path>) -> Result<AmbiguityGrid> {
    let mut bytes = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut bytes)?;
    from_bytes(&bytes)
}

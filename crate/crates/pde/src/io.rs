//! Field export. Binary dump layout (little-endian):
//! `"VXFD" | version u32 | n u64 | L f64 | t f64 | n² f64 row-major | crc32 u32`.

use crate::{GridSpec, VorticityField};
use std::io::{self, Write};
use thiserror::Error;

const MAGIC: &[u8; 4] = b"VXFD";
pub const FIELD_DUMP_VERSION: u32 = 1;

#[derive(Debug, Error, PartialEq)]
pub enum FieldIoError {
    #[error("not a field dump")]
    BadMagic,
    #[error("unsupported field dump version {0}")]
    Version(u32),
    #[error("truncated field dump")]
    Truncated,
    #[error("checksum mismatch")]
    Checksum,
}

pub fn write_field_csv<W: Write>(w: &mut W, f: &VorticityField) -> io::Result<()> {
    writeln!(w, "x1,x2,value")?;
    for (i, v) in f.values.iter().enumerate() {
        let (a, b) = f.grid.point(i);
        writeln!(w, "{a},{b},{v}")?;
    }
    Ok(())
}

pub fn write_field_dump(f: &VorticityField) -> Vec<u8> {
    let mut out = Vec::with_capacity(32 + 8 * f.values.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&FIELD_DUMP_VERSION.to_le_bytes());
    out.extend_from_slice(&(f.grid.n as u64).to_le_bytes());
    out.extend_from_slice(&f.grid.half_width.to_le_bytes());
    out.extend_from_slice(&f.t.to_le_bytes());
    for v in &f.values {
        out.extend_from_slice(&v.to_le_bytes());
    }
    let crc = crc32fast::hash(&out);
    out.extend_from_slice(&crc.to_le_bytes());
    out
}

pub fn read_field_dump(b: &[u8]) -> Result<VorticityField, FieldIoError> {
    if b.len() < 36 {
        return Err(FieldIoError::Truncated);
    }
    if &b[..4] != MAGIC {
        return Err(FieldIoError::BadMagic);
    }
    let version = u32::from_le_bytes(b[4..8].try_into().unwrap());
    if version != FIELD_DUMP_VERSION {
        return Err(FieldIoError::Version(version));
    }
    let f64_at = |at: usize| f64::from_le_bytes(b[at..at + 8].try_into().unwrap());
    let n = u64::from_le_bytes(b[8..16].try_into().unwrap()) as usize;
    let need = n.checked_mul(n).and_then(|v| v.checked_mul(8)).and_then(|v| v.checked_add(36)).ok_or(FieldIoError::Truncated)?;
    if b.len() != need {
        return Err(FieldIoError::Truncated);
    }
    if crc32fast::hash(&b[..need - 4]) != u32::from_le_bytes(b[need - 4..].try_into().unwrap()) {
        return Err(FieldIoError::Checksum);
    }
    let grid = GridSpec::new(f64_at(16), n);
    let t = f64_at(24);
    let values = (0..n * n).map(|i| f64_at(32 + 8 * i)).collect();
    Ok(VorticityField { grid, t, values })
}

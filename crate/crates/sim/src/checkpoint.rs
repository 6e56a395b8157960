//! Little-endian binary checkpoint:
//! `"VXCK" | version u32 | N u64 | t f64 | σ f64 | step u64 | seed u64 |
//!  M[N] f64 | X[N] (x1,x2) f64 | crc32 u32` (crc over all preceding bytes).

use crate::ParticleEnsemble;
use thiserror::Error;
use vx_kernel::Vec2;

pub const CHECKPOINT_VERSION: u32 = 1;
const MAGIC: &[u8; 4] = b"VXCK";
const HEADER: usize = 4 + 4 + 8 * 5;

#[derive(Debug, Error, PartialEq)]
pub enum CheckpointError {
    #[error("not a checkpoint (bad magic)")]
    BadMagic,
    #[error("unsupported checkpoint version {0} (expected {CHECKPOINT_VERSION})")]
    Version(u32),
    #[error("truncated checkpoint: need {need} bytes, have {have}")]
    Truncated { need: usize, have: usize },
    #[error("checksum mismatch")]
    Checksum,
    #[error("corrupt checkpoint: {0}")]
    Corrupt(String),
}

pub fn checkpoint(ens: &ParticleEnsemble) -> Vec<u8> {
    let n = ens.len();
    let mut out = Vec::with_capacity(HEADER + 24 * n + 4);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&CHECKPOINT_VERSION.to_le_bytes());
    out.extend_from_slice(&(n as u64).to_le_bytes());
    out.extend_from_slice(&ens.t.to_le_bytes());
    out.extend_from_slice(&ens.sigma.to_le_bytes());
    out.extend_from_slice(&ens.step.to_le_bytes());
    out.extend_from_slice(&ens.seed.to_le_bytes());
    for m in ens.circulations() {
        out.extend_from_slice(&m.to_le_bytes());
    }
    for x in &ens.positions {
        out.extend_from_slice(&x.x1.to_le_bytes());
        out.extend_from_slice(&x.x2.to_le_bytes());
    }
    let crc = crc32fast::hash(&out);
    out.extend_from_slice(&crc.to_le_bytes());
    out
}

struct Reader<'a> {
    b: &'a [u8],
    at: usize,
}

impl Reader<'_> {
    fn u64(&mut self) -> u64 {
        let v = u64::from_le_bytes(self.b[self.at..self.at + 8].try_into().unwrap());
        self.at += 8;
        v
    }

    fn f64(&mut self) -> f64 {
        f64::from_bits(self.u64())
    }
}

pub fn restore(bytes: &[u8]) -> Result<ParticleEnsemble, CheckpointError> {
    if bytes.len() < 8 {
        return Err(CheckpointError::Truncated { need: HEADER + 4, have: bytes.len() });
    }
    if &bytes[..4] != MAGIC {
        return Err(CheckpointError::BadMagic);
    }
    let version = u32::from_le_bytes(bytes[4..8].try_into().unwrap());
    if version != CHECKPOINT_VERSION {
        return Err(CheckpointError::Version(version));
    }
    if bytes.len() < HEADER + 4 {
        return Err(CheckpointError::Truncated { need: HEADER + 4, have: bytes.len() });
    }
    let n = u64::from_le_bytes(bytes[8..16].try_into().unwrap());
    let need = (n as usize)
        .checked_mul(24)
        .and_then(|v| v.checked_add(HEADER + 4))
        .ok_or_else(|| CheckpointError::Corrupt(format!("particle count {n} overflows")))?;
    if bytes.len() < need {
        return Err(CheckpointError::Truncated { need, have: bytes.len() });
    }
    if bytes.len() > need {
        return Err(CheckpointError::Corrupt(format!("{} trailing bytes", bytes.len() - need)));
    }
    let stored = u32::from_le_bytes(bytes[need - 4..].try_into().unwrap());
    if crc32fast::hash(&bytes[..need - 4]) != stored {
        return Err(CheckpointError::Checksum);
    }
    if n == 0 {
        return Err(CheckpointError::Corrupt("zero particles".into()));
    }
    let mut r = Reader { b: bytes, at: 16 };
    let t = r.f64();
    let sigma = r.f64();
    let step = r.u64();
    let seed = r.u64();
    let m: Vec<f64> = (0..n).map(|_| r.f64()).collect();
    let x: Vec<Vec2> = (0..n).map(|_| Vec2::new(r.f64(), r.f64())).collect();
    Ok(ParticleEnsemble::from_parts(x, m, t, sigma, seed, step))
}

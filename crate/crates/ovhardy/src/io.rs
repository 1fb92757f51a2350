//! OVF1 field files: a 16-byte magic, a length-prefixed JSON header, then
//! raw little-endian complex128 samples (row-major over axes, then matrix
//! rows).  Round-trips are bit-exact.

use crate::field::{FieldError, GridSpec, SampledField};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::io::{Read, Write};
use std::path::Path;
use thiserror::Error;

/// First 16 bytes of every field file: tag, three reserved zero bytes, and
/// the format version.
pub const MAGIC: [u8; 16] = *b"OVHARDYFIELD\0\0\0\x01";
pub const VERSION: u8 = 1;

#[derive(Debug, Error)]
pub enum OvfError {
    #[error("not an OVF1 field file (bad magic)")]
    BadMagic,
    #[error("unsupported OVF1 version {0}")]
    BadVersion(u8),
    #[error("header truncated or unreadable: {0}")]
    TruncatedHeader(String),
    #[error("malformed JSON header: {0}")]
    BadHeader(String),
    #[error("unsupported dtype {0:?} (only \"c128\")")]
    BadDtype(String),
    #[error("payload holds {got} samples, header implies {expected}")]
    PayloadLength { expected: usize, got: usize },
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Serialize, Deserialize)]
struct Header {
    d: usize,
    n: usize,
    #[serde(rename = "L")]
    l: f64,
    #[serde(rename = "N")]
    nsamp: usize,
    dtype: String,
}

/// Serialize a field to the OVF1 byte layout.
pub fn encode(f: &SampledField) -> Vec<u8> {
    let header = Header {
        d: f.grid.d,
        n: f.grid.n,
        l: f.grid.l,
        nsamp: f.grid.nsamp,
        dtype: "c128".to_string(),
    };
    let hjson = serde_json::to_vec(&header).expect("header serializes");
    let mut out = Vec::with_capacity(16 + 8 + hjson.len() + 16 * f.data.len());
    out.extend_from_slice(&MAGIC);
    out.extend_from_slice(&(hjson.len() as u64).to_le_bytes());
    out.extend_from_slice(&hjson);
    for z in &f.data {
        out.extend_from_slice(&z.re.to_le_bytes());
        out.extend_from_slice(&z.im.to_le_bytes());
    }
    out
}

/// Parse OVF1 bytes back into a field, validating magic, version, header,
/// and payload length separately.
pub fn decode(bytes: &[u8]) -> Result<SampledField, OvfError> {
    if bytes.len() < 16 || bytes[..12] != MAGIC[..12] || bytes[12..15] != [0, 0, 0] {
        return Err(OvfError::BadMagic);
    }
    if bytes[15] != VERSION {
        return Err(OvfError::BadVersion(bytes[15]));
    }
    let rest = &bytes[16..];
    if rest.len() < 8 {
        return Err(OvfError::TruncatedHeader("missing length prefix".into()));
    }
    let hlen = u64::from_le_bytes(rest[..8].try_into().unwrap()) as usize;
    let rest = &rest[8..];
    if rest.len() < hlen {
        return Err(OvfError::TruncatedHeader(format!(
            "header claims {hlen} bytes, {} available",
            rest.len()
        )));
    }
    let header: Header =
        serde_json::from_slice(&rest[..hlen]).map_err(|e| OvfError::BadHeader(e.to_string()))?;
    if header.dtype != "c128" {
        return Err(OvfError::BadDtype(header.dtype));
    }
    let grid = GridSpec::new(header.d, header.n, header.l, header.nsamp)?;
    let payload = &rest[hlen..];
    let want = grid.sites() * grid.mat_len();
    if payload.len() != 16 * want {
        return Err(OvfError::PayloadLength {
            expected: want,
            got: payload.len() / 16,
        });
    }
    let data: Vec<Complex64> = payload
        .chunks_exact(16)
        .map(|c| {
            Complex64::new(
                f64::from_le_bytes(c[..8].try_into().unwrap()),
                f64::from_le_bytes(c[8..].try_into().unwrap()),
            )
        })
        .collect();
    Ok(SampledField { grid, data })
}

pub fn write_field(path: &Path, f: &SampledField) -> Result<(), OvfError> {
    let mut file = std::fs::File::create(path)?;
    file.write_all(&encode(f))?;
    Ok(())
}

pub fn read_field(path: &Path) -> Result<SampledField, OvfError> {
    let mut bytes = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut bytes)?;
    decode(&bytes)
}

//! Binary parameter files:
//!
//! ```text
//! "RBM1" | version u16 | D u32 | P u32 | b (D × f64) | c (P × f64) | W (D·P × f64, row-major) | CRC32
//! ```
//!
//! All integers and floats are little-endian; the CRC covers every byte
//! before it.

use std::path::Path;

use pianorbm::RbmParams;

use crate::error::{CliError, CliResult};

pub const MAGIC: &[u8; 4] = b"RBM1";
pub const VERSION: u16 = 1;
const HEADER_LEN: usize = 4 + 2 + 4 + 4;

pub fn encode(params: &RbmParams) -> Vec<u8> {
    let (d, p) = (params.visible_units(), params.hidden_units());
    let mut out = Vec::with_capacity(HEADER_LEN + 8 * (d + p + d * p) + 4);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(d as u32).to_le_bytes());
    out.extend_from_slice(&(p as u32).to_le_bytes());
    for x in params.visible_bias().iter().chain(params.hidden_bias()).chain(params.weights()) {
        out.extend_from_slice(&x.to_le_bytes());
    }
    let crc = crc32fast::hash(&out);
    out.extend_from_slice(&crc.to_le_bytes());
    out
}

fn bad(msg: impl Into<String>) -> CliError {
    CliError::Data(format!("checkpoint: {}", msg.into()))
}

pub fn decode(bytes: &[u8]) -> CliResult<RbmParams> {
    if bytes.len() < HEADER_LEN + 4 {
        return Err(bad("file too short"));
    }
    if &bytes[..4] != MAGIC {
        return Err(bad("bad magic"));
    }
    let (payload, crc_bytes) = bytes.split_at(bytes.len() - 4);
    let stored = u32::from_le_bytes(crc_bytes.try_into().expect("four bytes"));
    if crc32fast::hash(payload) != stored {
        return Err(bad("CRC mismatch"));
    }
    let version = u16::from_le_bytes([bytes[4], bytes[5]]);
    if version != VERSION {
        return Err(bad(format!("unsupported version {version}")));
    }
    let d = u32::from_le_bytes(bytes[6..10].try_into().expect("four bytes")) as usize;
    let p = u32::from_le_bytes(bytes[10..14].try_into().expect("four bytes")) as usize;
    let count = d
        .checked_mul(p)
        .and_then(|w| w.checked_add(d + p))
        .ok_or_else(|| bad("dimensions overflow"))?;
    if count.checked_mul(8) != Some(payload.len() - HEADER_LEN) {
        return Err(bad(format!(
            "{} payload bytes do not match D = {d}, P = {p}",
            payload.len() - HEADER_LEN
        )));
    }
    let values: Vec<f64> = payload[HEADER_LEN..]
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("eight bytes")))
        .collect();
    let b = values[..d].to_vec();
    let c = values[d..d + p].to_vec();
    let w = values[d + p..].to_vec();
    RbmParams::new(d, p, w, b, c).map_err(|e| bad(e.to_string()))
}

pub fn save(path: &Path, params: &RbmParams) -> CliResult<()> {
    std::fs::write(path, encode(params)).map_err(|e| CliError::io(path, e))
}

pub fn load(path: &Path) -> CliResult<RbmParams> {
    let bytes = std::fs::read(path).map_err(|e| CliError::io(path, e))?;
    decode(&bytes).map_err(|e| e.context(path.display()))
}

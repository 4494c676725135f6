//! Serialization helpers shared by the file formats.

use crate::numeric::C64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// A complex number written either as a plain real or as `[re, im]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ComplexRepr {
    Real(f64),
    Pair([f64; 2]),
}

impl Default for ComplexRepr {
    fn default() -> Self {
        ComplexRepr::Real(0.0)
    }
}

impl From<ComplexRepr> for C64 {
    fn from(c: ComplexRepr) -> C64 {
        match c {
            ComplexRepr::Real(x) => C64::new(x, 0.0),
            ComplexRepr::Pair([re, im]) => C64::new(re, im),
        }
    }
}

impl From<C64> for ComplexRepr {
    fn from(z: C64) -> Self {
        ComplexRepr::Pair([z.re, z.im])
    }
}

pub fn pair(z: C64) -> [f64; 2] {
    [z.re, z.im]
}

pub fn tool_version() -> String {
    format!("resonance {}", env!("CARGO_PKG_VERSION"))
}

/// Hex SHA-256 of arbitrary bytes.
pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// Provenance block written at the top of every output file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Header {
    pub tool: String,
    pub config_sha256: String,
}

impl Header {
    pub fn new(config_sha256: impl Into<String>) -> Self {
        Header {
            tool: tool_version(),
            config_sha256: config_sha256.into(),
        }
    }

    /// Comment lines for CSV output.
    pub fn csv_lines(&self) -> String {
        format!("# tool: {}\n# config-sha256: {}\n", self.tool, self.config_sha256)
    }
}

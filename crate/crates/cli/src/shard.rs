//! On-disk shard format.
//!
//! ```text
//! offset  size  field
//!      0     4  magic "DETC"
//!      4     4  format version (1)
//!      8     4  scheme tag (0 plain, 1 type1, 2 type2)
//!     12     4  q
//!     16     4  n
//!     20     4  d
//!     24     4  m
//!     28     4  ell
//!     32     4  node id (1-based)
//!     36     4  payload symbol count
//!     40     4  seed present (0/1)
//!     44     4  original file length in bytes
//!     48     4  padding symbols
//!     52   2·k  payload, u16 per symbol
//! ```
//!
//! All integers are little-endian.

use std::fs;
use std::io::Write;
use std::path::Path;

use detcode::{Scheme, SecureParams, SystemParams};

use crate::error::CliError;

pub const MAGIC: &[u8; 4] = b"DETC";
pub const VERSION: u32 = 1;
pub const HEADER_LEN: usize = 52;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ShardHeader {
    pub scheme: Scheme,
    pub q: u32,
    pub n: u32,
    pub d: u32,
    pub m: u32,
    pub ell: u32,
    pub node_id: u32,
    pub payload_symbols: u32,
    pub seed_present: bool,
    pub original_len: u32,
    pub padding_symbols: u32,
}

impl ShardHeader {
    pub fn params(&self) -> Result<SecureParams, CliError> {
        let base = SystemParams::new(self.n as usize, self.d as usize, self.m as usize, Some(self.q))?;
        Ok(SecureParams::new(base, self.ell as usize, self.scheme)?)
    }

    pub fn stripe_count(&self) -> usize {
        let alpha = detcode::binom(self.d as i64, self.m as i64) as usize;
        self.payload_symbols as usize / alpha
    }

    /// Equal in everything except the node id.
    pub fn same_code(&self, other: &ShardHeader) -> Result<(), CliError> {
        let checks = [
            (self.scheme == other.scheme, "scheme"),
            (
                (self.q, self.n, self.d, self.m) == (other.q, other.n, other.d, other.m),
                "code parameters",
            ),
            (self.ell == other.ell, "ell"),
            (self.payload_symbols == other.payload_symbols, "payload length"),
            (self.seed_present == other.seed_present, "seed flag"),
            (self.original_len == other.original_len, "original length"),
            (self.padding_symbols == other.padding_symbols, "padding"),
        ];
        match checks.iter().find(|c| !c.0) {
            Some(c) => Err(CliError::HeaderMismatch(c.1)),
            None => Ok(()),
        }
    }

    fn to_bytes(self) -> [u8; HEADER_LEN] {
        let mut out = [0u8; HEADER_LEN];
        out[..4].copy_from_slice(MAGIC);
        let fields = [
            VERSION,
            self.scheme.tag(),
            self.q,
            self.n,
            self.d,
            self.m,
            self.ell,
            self.node_id,
            self.payload_symbols,
            self.seed_present as u32,
            self.original_len,
            self.padding_symbols,
        ];
        for (i, f) in fields.iter().enumerate() {
            out[4 + 4 * i..8 + 4 * i].copy_from_slice(&f.to_le_bytes());
        }
        out
    }

    fn from_bytes(b: &[u8]) -> Result<Self, CliError> {
        if b.len() < HEADER_LEN {
            return Err(CliError::BadLength(format!(
                "{} bytes, header needs {HEADER_LEN}",
                b.len()
            )));
        }
        if &b[..4] != MAGIC {
            return Err(CliError::BadMagic);
        }
        let f = |i: usize| u32::from_le_bytes(b[4 + 4 * i..8 + 4 * i].try_into().unwrap());
        if f(0) != VERSION {
            return Err(CliError::BadVersion(f(0)));
        }
        let scheme = Scheme::from_tag(f(1))
            .ok_or_else(|| CliError::BadHeader(format!("unknown scheme tag {}", f(1))))?;
        let seed_present = match f(9) {
            0 => false,
            1 => true,
            x => return Err(CliError::BadHeader(format!("seed flag {x}"))),
        };
        let h = ShardHeader {
            scheme,
            q: f(2),
            n: f(3),
            d: f(4),
            m: f(5),
            ell: f(6),
            node_id: f(7),
            payload_symbols: f(8),
            seed_present,
            original_len: f(10),
            padding_symbols: f(11),
        };
        h.validate()?;
        Ok(h)
    }

    fn validate(&self) -> Result<(), CliError> {
        let p = self.params()?;
        let base = p.base();
        if self.node_id == 0 || self.node_id as usize > base.n() {
            return Err(CliError::BadHeader(format!(
                "node id {} outside [1, {}]",
                self.node_id,
                base.n()
            )));
        }
        if !(self.payload_symbols as usize).is_multiple_of(base.alpha()) {
            return Err(CliError::BadHeader(format!(
                "payload of {} symbols is not a multiple of alpha = {}",
                self.payload_symbols,
                base.alpha()
            )));
        }
        let stripes = self.stripe_count();
        if stripes == 0 {
            return Err(CliError::BadHeader("no stripes".into()));
        }
        let capacity = stripes * p.secret_count();
        let w = crate::pack::bits_per_symbol(self.q) as usize;
        let data_symbols = (self.original_len as usize * 8).div_ceil(w);
        if data_symbols + self.padding_symbols as usize != capacity {
            return Err(CliError::BadHeader(format!(
                "{data_symbols} data + {} padding symbols do not fill {capacity}",
                self.padding_symbols
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Shard {
    pub header: ShardHeader,
    pub payload: Vec<u16>,
}

impl Shard {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HEADER_LEN + 2 * self.payload.len());
        out.extend_from_slice(&self.header.to_bytes());
        for s in &self.payload {
            out.extend_from_slice(&s.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(b: &[u8]) -> Result<Self, CliError> {
        let header = ShardHeader::from_bytes(b)?;
        let want = HEADER_LEN + 2 * header.payload_symbols as usize;
        if b.len() != want {
            return Err(CliError::BadLength(format!(
                "{} bytes, header implies {want}",
                b.len()
            )));
        }
        let payload: Vec<u16> = b[HEADER_LEN..]
            .chunks_exact(2)
            .map(|c| u16::from_le_bytes([c[0], c[1]]))
            .collect();
        if let Some(s) = payload.iter().find(|&&s| s as u32 >= header.q) {
            return Err(CliError::BadHeader(format!(
                "payload symbol {s} is not in GF({})",
                header.q
            )));
        }
        Ok(Shard { header, payload })
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        let bytes = fs::read(path).map_err(|source| CliError::Io {
            path: path.into(),
            source,
        })?;
        Shard::from_bytes(&bytes)
    }

    /// Writes to a temporary file in the same directory, then renames.
    pub fn write_atomic(&self, path: &Path) -> Result<(), CliError> {
        let io = |source| CliError::Io {
            path: path.into(),
            source,
        };
        let name = path
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default();
        let tmp = path.with_file_name(format!(".{name}.tmp{}", std::process::id()));
        let mut f = fs::File::create(&tmp).map_err(io)?;
        f.write_all(&self.to_bytes()).map_err(io)?;
        f.sync_all().map_err(io)?;
        drop(f);
        fs::rename(&tmp, path).map_err(io)
    }

    pub fn file_name(node: usize) -> String {
        format!("shard_{node}.detc")
    }
}

//! Binary checkpoint: magic, little-endian u32 header length, JSON header
//! (config, seed, block names and shapes), then every parameter as little-endian f64
//! in header order.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::params::{LstmConfig, LstmParams, BLOCK_NAMES};
use crate::error::{Error, Result};

const MAGIC: &[u8; 8] = b"OILCKPT1";

#[derive(Debug, Clone, PartialEq)]
pub struct LstmModel {
    pub config: LstmConfig,
    pub params: LstmParams,
    pub seed: u64,
}

#[derive(Serialize, Deserialize)]
struct BlockHeader {
    name: String,
    shape: [usize; 2],
}

#[derive(Serialize, Deserialize)]
struct Header {
    config: LstmConfig,
    seed: u64,
    blocks: Vec<BlockHeader>,
}

impl LstmModel {
    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let header = Header {
            config: self.config,
            seed: self.seed,
            blocks: self
                .params
                .blocks()
                .iter()
                .zip(self.params.shapes())
                .map(|((name, _), (r, c))| BlockHeader { name: name.to_string(), shape: [r, c] })
                .collect(),
        };
        let json = serde_json::to_vec(&header)?;
        let mut out = Vec::with_capacity(12 + json.len() + 8 * self.params.scalar_count());
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&(json.len() as u32).to_le_bytes());
        out.extend_from_slice(&json);
        for (_, block) in self.params.blocks() {
            for v in block {
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
        Ok(out)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let bad = |m: &str| Error::Checkpoint(m.to_string());
        if bytes.len() < 12 || &bytes[..8] != MAGIC {
            return Err(bad("not a checkpoint (bad magic)"));
        }
        let hlen = u32::from_le_bytes(bytes[8..12].try_into().expect("4 bytes")) as usize;
        let body = bytes.get(12..12 + hlen).ok_or_else(|| bad("truncated header"))?;
        let header: Header = serde_json::from_slice(body)?;
        header.config.validate()?;
        let mut params = LstmParams::zeros(&header.config);
        if header.blocks.len() != BLOCK_NAMES.len() {
            return Err(bad("unexpected block count"));
        }
        let shapes = params.shapes();
        let mut offset = 12 + hlen;
        for (((name, block), bh), shape) in params.blocks_mut().into_iter().zip(&header.blocks).zip(shapes) {
            if bh.name != name || bh.shape != [shape.0, shape.1] {
                return Err(Error::Checkpoint(format!("block `{}` does not match the declared config", bh.name)));
            }
            for v in block.iter_mut() {
                let raw = bytes.get(offset..offset + 8).ok_or_else(|| bad("truncated parameter data"))?;
                *v = f64::from_le_bytes(raw.try_into().expect("8 bytes"));
                offset += 8;
            }
        }
        if offset != bytes.len() {
            return Err(bad("trailing bytes after parameter data"));
        }
        Ok(LstmModel { config: header.config, params, seed: header.seed })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        crate::io::write_atomic(path, &self.to_bytes()?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        LstmModel::from_bytes(&bytes)
    }
}

//! `EQCK`: model checkpoints.
//!
//! Layout (little-endian): magic `EQCK`, `u16` version, `u8` variant code,
//! `u32` matrix count, then for each matrix (encoder, decoder,
//! intermediates) `u32` rows and cols followed by row-major `(re, im)` `f64`
//! pairs. A JSON sidecar records the training configuration, its hash, and
//! a summary of the optimizer state.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::formats::bytes::{read_file, write_atomic, Decoder, Encoder};
use crate::models::{Model, ModelParams, ModelVariant, TrainConfig};
use crate::numkit::{AdamSummary, ComplexMatrix};

pub const CHECKPOINT_MAGIC: &[u8; 4] = b"EQCK";
pub const CHECKPOINT_VERSION: u16 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckpointSidecar {
    pub format: String,
    pub version: u16,
    pub config: TrainConfig,
    pub config_hash: String,
    pub optimizer: AdamSummary,
    pub best_epoch: usize,
    pub sha256: String,
}

pub fn sidecar_path(checkpoint: &Path) -> PathBuf {
    checkpoint.with_extension("json")
}

pub fn encode_checkpoint(params: &ModelParams) -> Vec<u8> {
    let mut e = Encoder::default();
    e.magic(CHECKPOINT_MAGIC, CHECKPOINT_VERSION);
    e.u8(params.variant.code());
    let mats = params.matrices();
    e.u32(mats.len());
    for m in mats {
        e.u32(m.rows());
        e.u32(m.cols());
        for (re, im) in m.re().iter().zip(m.im().iter()) {
            e.f64(*re);
            e.f64(*im);
        }
    }
    e.buf
}

pub fn decode_checkpoint(bytes: &[u8]) -> Result<ModelParams> {
    let mut d = Decoder::new(bytes);
    d.magic(CHECKPOINT_MAGIC, CHECKPOINT_VERSION)?;
    let at = d.offset();
    let variant = ModelVariant::from_code(d.u8("variant")?)
        .ok_or_else(|| Error::parse(at, "unknown model variant"))?;
    let count = d.u32("matrix count")?;
    if count < 2 {
        return Err(Error::parse(at + 1, format!("{count} matrices; need encoder and decoder")));
    }
    let mut mats = Vec::with_capacity(count);
    for _ in 0..count {
        let (r, c) = (d.u32("rows")?, d.u32("cols")?);
        let mut m = ComplexMatrix::zeros(r, c);
        {
            let (re, im) = m.parts_mut();
            for (a, b) in re.iter_mut().zip(im.iter_mut()) {
                *a = d.f64("entry")?;
                *b = d.f64("entry")?;
            }
        }
        mats.push(m);
    }
    d.finish()?;
    let mut it = mats.into_iter();
    let params = ModelParams {
        variant,
        encoder: it.next().unwrap(),
        decoder: it.next().unwrap(),
        intermediates: it.collect(),
    };
    params.validate().map_err(|e| Error::parse(0, e.to_string()))?;
    Ok(params)
}

/// Writes the checkpoint and its sidecar atomically.
pub fn write_checkpoint(
    path: &Path,
    model: &Model,
    optimizer: AdamSummary,
    best_epoch: usize,
) -> Result<CheckpointSidecar> {
    let bytes = encode_checkpoint(&model.params);
    let sidecar = CheckpointSidecar {
        format: "EQCK".into(),
        version: CHECKPOINT_VERSION,
        config: model.config.clone(),
        config_hash: model.config.hash(),
        optimizer,
        best_epoch,
        sha256: hex::encode(Sha256::digest(&bytes)),
    };
    write_atomic(path, &bytes)?;
    write_atomic(&sidecar_path(path), serde_json::to_string_pretty(&sidecar)?.as_bytes())?;
    Ok(sidecar)
}

/// Reads a checkpoint and rebuilds the model from its sidecar config.
pub fn read_checkpoint(path: &Path) -> Result<(Model, CheckpointSidecar)> {
    let bytes = read_file(path)?;
    let sidecar: CheckpointSidecar = serde_json::from_slice(&read_file(&sidecar_path(path))?)?;
    if hex::encode(Sha256::digest(&bytes)) != sidecar.sha256 {
        return Err(Error::Inconsistent(format!(
            "{} does not match the hash in its sidecar",
            path.display()
        )));
    }
    let params = decode_checkpoint(&bytes)?;
    let model = Model::new(params, sidecar.config.clone())?;
    Ok((model, sidecar))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::GroupConfig;
    use crate::numkit::AdamState;

    #[test]
    fn round_trip() {
        let cfg = TrainConfig::new(ModelVariant::Stacked, GroupConfig::direct(vec![5, 5]), 25);
        let m = Model::init(cfg, 36).unwrap();
        let bytes = encode_checkpoint(&m.params);
        assert_eq!(&bytes[..4], b"EQCK");
        assert_eq!(decode_checkpoint(&bytes).unwrap(), m.params);

        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("m.eqck");
        let opt = AdamState::for_matrices(&m.params.matrices(), 1e-3).summary();
        write_checkpoint(&p, &m, opt, 3).unwrap();
        let (back, side) = read_checkpoint(&p).unwrap();
        assert_eq!(back.params, m.params);
        assert_eq!(side.best_epoch, 3);
        assert_eq!(side.config_hash, m.config.hash());
    }

    #[test]
    fn rejects_corruption() {
        let cfg = TrainConfig::new(ModelVariant::Shift, GroupConfig::cyclic(2), 4);
        let m = Model::init(cfg, 4).unwrap();
        let b = encode_checkpoint(&m.params);
        assert!(decode_checkpoint(&b[..b.len() - 1]).is_err());
        assert!(matches!(decode_checkpoint(b"EQCX\x01\x00"), Err(Error::Parse { offset: 0, .. })));
    }
}

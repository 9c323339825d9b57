//! `EQDS`: paired datasets.
//!
//! Layout (little-endian): magic `EQDS`, `u16` version, `u32` train, val and
//! test counts, `u32` height and width, `u8` factor count and `u32` factor
//! orders of the label group; then per pair (train, val, test in order) a
//! `u32` base index, one `u16` per label index, and the `f32` pixels of `x1`
//! and `x2`. A JSON manifest next to the container records provenance and
//! the container's SHA-256.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::formats::bytes::{read_file, write_atomic, Decoder, Encoder};
use crate::group::{GroupElement, GroupSpec};
use crate::imaging::{DatasetBundle, ImageGrid, PairSample, Provenance};

pub const DATASET_MAGIC: &[u8; 4] = b"EQDS";
pub const DATASET_VERSION: u16 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub format: String,
    pub version: u16,
    pub provenance: Provenance,
    pub group_orders: Vec<usize>,
    pub counts: SplitCounts,
    pub height: usize,
    pub width: usize,
    pub sha256: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitCounts {
    pub train: usize,
    pub val: usize,
    pub test: usize,
}

/// Path of the JSON manifest belonging to a container.
pub fn manifest_path(container: &Path) -> PathBuf {
    container.with_extension("json")
}

pub fn encode_dataset(data: &DatasetBundle) -> Result<Vec<u8>> {
    let first = data
        .train
        .iter()
        .chain(&data.val)
        .chain(&data.test)
        .next()
        .ok_or_else(|| Error::Validation("cannot store an empty dataset".into()))?;
    let (h, w) = (first.x1.height(), first.x1.width());
    let factors = data.spec.factors();
    let mut e = Encoder::default();
    e.magic(DATASET_MAGIC, DATASET_VERSION);
    for n in [data.train.len(), data.val.len(), data.test.len(), h, w] {
        e.u32(n);
    }
    e.u8(factors.len() as u8);
    factors.iter().for_each(|&k| e.u32(k));
    for s in data.train.iter().chain(&data.val).chain(&data.test) {
        if s.x1.height() != h || s.x1.width() != w || s.x2.height() != h || s.x2.width() != w {
            return Err(Error::Dimension("dataset mixes image sizes".into()));
        }
        if s.param.indices().len() != factors.len() {
            return Err(Error::Dimension(format!("pair label {} does not fit the group", s.param)));
        }
        e.u32(s.base);
        s.param.indices().iter().for_each(|&i| e.u16(i as u16));
        s.x1.pixels().iter().for_each(|&v| e.f32(v));
        s.x2.pixels().iter().for_each(|&v| e.f32(v));
    }
    Ok(e.buf)
}

/// Decodes the container; the provenance comes from the manifest.
pub fn decode_dataset(bytes: &[u8], provenance: Provenance) -> Result<DatasetBundle> {
    let mut d = Decoder::new(bytes);
    d.magic(DATASET_MAGIC, DATASET_VERSION)?;
    let counts = [d.u32("train count")?, d.u32("val count")?, d.u32("test count")?];
    let (h, w) = (d.u32("height")?, d.u32("width")?);
    let n_factors = d.u8("factor count")? as usize;
    let factors = (0..n_factors).map(|_| d.u32("factor order")).collect::<Result<Vec<_>>>()?;
    let spec = if factors.len() == 1 {
        GroupSpec::cyclic(factors[0])
    } else {
        GroupSpec::direct(factors.clone())
    }
    .map_err(|e| Error::parse(d.offset(), e.to_string()))?;
    let read_image = |d: &mut Decoder| -> Result<ImageGrid> {
        let at = d.offset();
        let px = (0..h * w).map(|_| d.f32("pixel")).collect::<Result<Vec<_>>>()?;
        ImageGrid::new(h, w, px).map_err(|e| Error::parse(at, e.to_string()))
    };
    let mut splits: Vec<Vec<PairSample>> = Vec::with_capacity(3);
    for &n in &counts {
        let mut v = Vec::with_capacity(n);
        for _ in 0..n {
            let base = d.u32("base index")?;
            let at = d.offset();
            let idx = (0..n_factors)
                .map(|_| d.u16("label").map(usize::from))
                .collect::<Result<Vec<_>>>()?;
            let param = GroupElement::new(idx);
            spec.validate(&param).map_err(|e| Error::parse(at, e.to_string()))?;
            let x1 = read_image(&mut d)?;
            let x2 = read_image(&mut d)?;
            v.push(PairSample { x1, x2, param, base });
        }
        splits.push(v);
    }
    d.finish()?;
    let test = splits.pop().unwrap();
    let val = splits.pop().unwrap();
    let train = splits.pop().unwrap();
    Ok(DatasetBundle {
        train,
        val,
        test,
        spec,
        provenance,
    })
}

/// Writes the container and its manifest; returns the manifest.
pub fn write_dataset(data: &DatasetBundle, path: &Path) -> Result<DatasetManifest> {
    let bytes = encode_dataset(data)?;
    let first = &data.train.iter().chain(&data.val).chain(&data.test).next().unwrap().x1;
    let manifest = DatasetManifest {
        format: "EQDS".into(),
        version: DATASET_VERSION,
        provenance: data.provenance.clone(),
        group_orders: data.spec.factors().to_vec(),
        counts: SplitCounts {
            train: data.train.len(),
            val: data.val.len(),
            test: data.test.len(),
        },
        height: first.height(),
        width: first.width(),
        sha256: hex::encode(Sha256::digest(&bytes)),
    };
    write_atomic(path, &bytes)?;
    write_atomic(&manifest_path(path), serde_json::to_string_pretty(&manifest)?.as_bytes())?;
    Ok(manifest)
}

pub fn read_manifest(path: &Path) -> Result<DatasetManifest> {
    let mp = manifest_path(path);
    Ok(serde_json::from_slice(&read_file(&mp)?)?)
}

/// Reads a dataset, checking the manifest hash and every pair's transform.
pub fn read_dataset(path: &Path) -> Result<DatasetBundle> {
    let manifest = read_manifest(path)?;
    let bytes = read_file(path)?;
    let digest = hex::encode(Sha256::digest(&bytes));
    if digest != manifest.sha256 {
        return Err(Error::Inconsistent(format!(
            "{} does not match the hash in its manifest",
            path.display()
        )));
    }
    let data = decode_dataset(&bytes, manifest.provenance)?;
    data.verify()?;
    Ok(data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imaging::{gen_shapes, PairMode, TransformSpec};
    use crate::par::Execution;

    fn bundle() -> DatasetBundle {
        let prov = Provenance {
            source: "shapes".into(),
            seed: 3,
            base_count: 6,
            size: 28,
            transforms: TransformSpec::new(4, 3, 1).unwrap(),
            pair_mode: PairMode::Orbit,
            cap: Some(40),
        };
        let base = gen_shapes(6, 3, 28, Execution::Parallel).unwrap();
        DatasetBundle::assemble(&base, prov, Execution::Parallel).unwrap()
    }

    #[test]
    fn round_trip_is_exact() {
        let data = bundle();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("d.eqds");
        let m = write_dataset(&data, &p).unwrap();
        assert_eq!(m.counts.train + m.counts.val + m.counts.test, 40);
        let back = read_dataset(&p).unwrap();
        assert_eq!(back, data);
    }

    #[test]
    fn tampering_is_detected() {
        let data = bundle();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("d.eqds");
        write_dataset(&data, &p).unwrap();
        let mut b = std::fs::read(&p).unwrap();
        let n = b.len();
        b[n - 1] ^= 1;
        std::fs::write(&p, &b).unwrap();
        assert!(matches!(read_dataset(&p), Err(Error::Inconsistent(_))));
        assert!(decode_dataset(&b[..n - 3], data.provenance.clone()).is_err());
    }
}

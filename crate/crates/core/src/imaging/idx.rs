//! IDX files (the MNIST distribution format).

use std::path::Path;

use crate::error::{Error, Result};
use crate::imaging::ImageGrid;

pub const IMAGES_MAGIC: u32 = 0x0000_0803;
pub const LABELS_MAGIC: u32 = 0x0000_0801;

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn u32(&mut self, what: &str) -> Result<u32> {
        let end = self.pos + 4;
        let chunk = self
            .bytes
            .get(self.pos..end)
            .ok_or_else(|| Error::parse(self.pos as u64, format!("truncated while reading {what}")))?;
        self.pos = end;
        Ok(u32::from_be_bytes(chunk.try_into().unwrap()))
    }

    fn take(&mut self, n: usize, what: &str) -> Result<&'a [u8]> {
        let end = self.pos + n;
        let chunk = self.bytes.get(self.pos..end).ok_or_else(|| {
            Error::parse(
                self.bytes.len() as u64,
                format!("truncated {what}: need {n} bytes from offset {}", self.pos),
            )
        })?;
        self.pos = end;
        Ok(chunk)
    }

    fn magic(&mut self, want: u32) -> Result<()> {
        let got = self.u32("magic number")?;
        if got != want {
            return Err(Error::parse(0, format!("bad magic 0x{got:08x}, expected 0x{want:08x}")));
        }
        Ok(())
    }
}

/// Parses an IDX image file; bytes are scaled to `[0, 1]` by `/255`.
pub fn parse_idx_images(bytes: &[u8]) -> Result<Vec<ImageGrid>> {
    let mut rd = Reader { bytes, pos: 0 };
    rd.magic(IMAGES_MAGIC)?;
    let count = rd.u32("image count")? as usize;
    let rows = rd.u32("row count")? as usize;
    let cols = rd.u32("column count")? as usize;
    let data = rd.take(count * rows * cols, "pixel data")?;
    if rows == 0 || cols == 0 {
        return Err(Error::parse(8, format!("image size {rows}x{cols} is empty")));
    }
    data.chunks_exact(rows * cols)
        .map(|px| ImageGrid::new(rows, cols, px.iter().map(|&b| b as f64 / 255.0).collect()))
        .collect()
}

pub fn parse_idx_labels(bytes: &[u8]) -> Result<Vec<u8>> {
    let mut rd = Reader { bytes, pos: 0 };
    rd.magic(LABELS_MAGIC)?;
    let count = rd.u32("label count")? as usize;
    Ok(rd.take(count, "label data")?.to_vec())
}

/// Loads images and, optionally, labels aligned by index.
pub fn load_idx(images: &Path, labels: Option<&Path>) -> Result<(Vec<ImageGrid>, Option<Vec<u8>>)> {
    let read = |p: &Path| std::fs::read(p).map_err(|e| Error::io(p, e));
    let imgs = parse_idx_images(&read(images)?)?;
    let labels = match labels {
        Some(p) => {
            let l = parse_idx_labels(&read(p)?)?;
            if l.len() != imgs.len() {
                return Err(Error::parse(
                    4,
                    format!("{} labels for {} images", l.len(), imgs.len()),
                ));
            }
            Some(l)
        }
        None => None,
    };
    Ok((imgs, labels))
}

/// Encodes images as an IDX file, quantizing with `round(255·v)`.
pub fn encode_idx_images(images: &[ImageGrid]) -> Vec<u8> {
    let (rows, cols) = images.first().map_or((0, 0), |i| (i.height(), i.width()));
    let mut out = Vec::with_capacity(16 + images.len() * rows * cols);
    for v in [IMAGES_MAGIC, images.len() as u32, rows as u32, cols as u32] {
        out.extend_from_slice(&v.to_be_bytes());
    }
    for img in images {
        out.extend(img.pixels().iter().map(|&p| (p * 255.0).round() as u8));
    }
    out
}

pub fn encode_idx_labels(labels: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(8 + labels.len());
    out.extend_from_slice(&LABELS_MAGIC.to_be_bytes());
    out.extend_from_slice(&(labels.len() as u32).to_be_bytes());
    out.extend_from_slice(labels);
    out
}

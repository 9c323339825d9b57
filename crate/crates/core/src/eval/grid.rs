//! PGM (P5) image grids.

use std::path::Path;

use crate::error::{Error, Result};
use crate::formats::write_atomic;
use crate::imaging::ImageGrid;

/// Gap between tiles, in pixels.
pub const SEPARATOR: usize = 2;
const SEPARATOR_VALUE: u8 = 255;

/// `round(255·clamp(v, 0, 1))`, halves rounded away from zero.
pub fn quantize(v: f64) -> u8 {
    (255.0 * v.clamp(0.0, 1.0)).round() as u8
}

/// Encodes `images` row by row into a `rows × cols` grid of equal tiles.
pub fn encode_grid(images: &[ImageGrid], rows: usize, cols: usize) -> Result<Vec<u8>> {
    let first = images
        .first()
        .ok_or_else(|| Error::Validation("no images to export".into()))?;
    if rows * cols < images.len() {
        return Err(Error::Validation(format!(
            "{} images do not fit a {rows}x{cols} grid",
            images.len()
        )));
    }
    let (h, w) = (first.height(), first.width());
    if images.iter().any(|i| i.height() != h || i.width() != w) {
        return Err(Error::Dimension("grid images differ in size".into()));
    }
    let gh = rows * h + (rows - 1) * SEPARATOR;
    let gw = cols * w + (cols - 1) * SEPARATOR;
    let mut px = vec![SEPARATOR_VALUE; gh * gw];
    for (n, img) in images.iter().enumerate() {
        let (r0, c0) = ((n / cols) * (h + SEPARATOR), (n % cols) * (w + SEPARATOR));
        for r in 0..h {
            for c in 0..w {
                px[(r0 + r) * gw + c0 + c] = quantize(img.get(r, c));
            }
        }
    }
    // blank cells stay black
    for n in images.len()..rows * cols {
        let (r0, c0) = ((n / cols) * (h + SEPARATOR), (n % cols) * (w + SEPARATOR));
        for r in 0..h {
            px[(r0 + r) * gw + c0..(r0 + r) * gw + c0 + w].fill(0);
        }
    }
    let mut out = format!("P5\n{gw} {gh}\n255\n").into_bytes();
    out.extend_from_slice(&px);
    Ok(out)
}

pub fn export_grid(images: &[ImageGrid], rows: usize, cols: usize, path: &Path) -> Result<()> {
    write_atomic(path, &encode_grid(images, rows, cols)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_grey_rounds_up() {
        let img = ImageGrid::new(3, 2, vec![0.5; 6]).unwrap();
        let b = encode_grid(&[img], 1, 1).unwrap();
        let header = b"P5\n2 3\n255\n";
        assert_eq!(&b[..header.len()], header);
        assert!(b[header.len()..].iter().all(|&v| v == 128));
        assert_eq!(b.len(), header.len() + 6);
    }

    #[test]
    fn strip_layout_with_separators() {
        let imgs: Vec<ImageGrid> = (0..10).map(|k| ImageGrid::new(2, 2, vec![k as f64 / 10.0; 4]).unwrap()).collect();
        let b = encode_grid(&imgs, 1, 10).unwrap();
        let header = format!("P5\n{} 2\n255\n", 10 * 2 + 9 * 2);
        assert!(b.starts_with(header.as_bytes()));
        let px = &b[header.len()..];
        assert_eq!(px[2], 255);
        assert_eq!(px[4], quantize(0.1));
    }

    #[test]
    fn errors() {
        assert!(encode_grid(&[], 1, 1).is_err());
        let img = ImageGrid::zeros(2, 2);
        assert!(encode_grid(&[img.clone(), img], 1, 1).is_err());
        let dir = tempfile::tempdir().unwrap();
        let bad = dir.path().join("missing").join("g.pgm");
        assert!(matches!(export_grid(&[ImageGrid::zeros(1, 1)], 1, 1, &bad), Err(Error::Io { .. })));
    }
}

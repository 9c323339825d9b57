use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::root_of_unity;

/// A single-channel image with row-major pixels in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageGrid {
    height: usize,
    width: usize,
    pixels: Vec<f64>,
}

impl ImageGrid {
    pub fn new(height: usize, width: usize, pixels: Vec<f64>) -> Result<Self> {
        if height == 0 || width == 0 {
            return Err(Error::Validation(format!("image size {height}x{width} is empty")));
        }
        if pixels.len() != height * width {
            return Err(Error::Dimension(format!(
                "{} pixels for a {height}x{width} image",
                pixels.len()
            )));
        }
        if let Some(i) = pixels.iter().position(|p| !(0.0..=1.0).contains(p)) {
            return Err(Error::Validation(format!(
                "pixel {i} is {}, outside [0, 1]",
                pixels[i]
            )));
        }
        Ok(Self {
            height,
            width,
            pixels,
        })
    }

    pub fn zeros(height: usize, width: usize) -> Self {
        Self {
            height,
            width,
            pixels: vec![0.0; height * width],
        }
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn len(&self) -> usize {
        self.pixels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pixels.is_empty()
    }

    pub fn pixels(&self) -> &[f64] {
        &self.pixels
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.pixels[row * self.width + col]
    }

    pub(crate) fn set(&mut self, row: usize, col: usize, v: f64) {
        self.pixels[row * self.width + col] = v;
    }

    pub fn linf_distance(&self, other: &Self) -> f64 {
        if self.height != other.height || self.width != other.width {
            return f64::INFINITY;
        }
        self.pixels
            .iter()
            .zip(&other.pixels)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn mean_abs_diff(&self, other: &Self) -> f64 {
        self.pixels
            .iter()
            .zip(&other.pixels)
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>()
            / self.pixels.len() as f64
    }

    /// Rounds every pixel to the nearest `f32`, the precision used on disk.
    pub(crate) fn quantized_f32(mut self) -> Self {
        for p in &mut self.pixels {
            *p = *p as f32 as f64;
        }
        self
    }

    /// Builds an image from arbitrary reals, clamping into `[0, 1]`.
    pub fn from_clamped(height: usize, width: usize, values: impl IntoIterator<Item = f64>) -> Self {
        let pixels: Vec<f64> = values.into_iter().map(|v| v.clamp(0.0, 1.0)).collect();
        assert_eq!(pixels.len(), height * width);
        Self {
            height,
            width,
            pixels,
        }
    }
}

/// Periodic translation: output pixel `(r, c)` reads input
/// `((r − dy) mod H, (c − dx) mod W)`.
pub fn translate_periodic(x: &ImageGrid, dx: i64, dy: i64) -> ImageGrid {
    let (h, w) = (x.height as i64, x.width as i64);
    let mut out = ImageGrid::zeros(x.height, x.width);
    for r in 0..h {
        let sr = (r - dy).rem_euclid(h);
        for c in 0..w {
            let sc = (c - dx).rem_euclid(w);
            out.set(r as usize, c as usize, x.get(sr as usize, sc as usize));
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RotationMethod {
    /// Pixel permutation; only for quarter-turn multiples.
    Exact90,
    #[default]
    Bilinear,
}

/// Counterclockwise rotation by `360°·j/k` about the image center.
pub fn rotate(x: &ImageGrid, j: usize, k: usize, method: RotationMethod) -> Result<ImageGrid> {
    if k == 0 || j >= k {
        return Err(Error::Validation(format!("rotation index {j} out of range for order {k}")));
    }
    if j == 0 {
        return Ok(x.clone());
    }
    match method {
        RotationMethod::Exact90 => rotate_exact90(x, j, k),
        RotationMethod::Bilinear => Ok(rotate_bilinear(x, j, k)),
    }
}

fn rotate_exact90(x: &ImageGrid, j: usize, k: usize) -> Result<ImageGrid> {
    if !matches!(k, 1 | 2 | 4) {
        return Err(Error::Unsupported(format!(
            "exact rotation needs order 1, 2 or 4, got {k}"
        )));
    }
    let quarter_turns = j * 4 / k;
    if quarter_turns % 2 == 1 && x.height != x.width {
        return Err(Error::Unsupported(
            "quarter-turn rotation of a non-square image".into(),
        ));
    }
    let mut cur = x.clone();
    for _ in 0..quarter_turns {
        let n = cur.width;
        let mut next = ImageGrid::zeros(cur.width, cur.height);
        for r in 0..next.height {
            for c in 0..next.width {
                next.set(r, c, cur.get(c, n - 1 - r));
            }
        }
        cur = next;
    }
    Ok(cur)
}

fn rotate_bilinear(x: &ImageGrid, j: usize, k: usize) -> ImageGrid {
    // exact cos/sin on the axes keeps quarter turns free of interpolation
    let w = root_of_unity(k, j);
    let (cos, sin) = (w.re, w.im);
    let cy = (x.height as f64 - 1.0) / 2.0;
    let cx = (x.width as f64 - 1.0) / 2.0;
    let sample = |r: i64, c: i64| -> f64 {
        if r < 0 || c < 0 || r >= x.height as i64 || c >= x.width as i64 {
            0.0
        } else {
            x.get(r as usize, c as usize)
        }
    };
    let mut out = ImageGrid::zeros(x.height, x.width);
    for r in 0..x.height {
        for c in 0..x.width {
            // y axis points up; the source is the output rotated back by −θ
            let px = c as f64 - cx;
            let py = cy - r as f64;
            let sx = cos * px + sin * py;
            let sy = -sin * px + cos * py;
            let (sr, sc) = (snap(cy - sy), snap(sx + cx));
            let (r0, c0) = (sr.floor(), sc.floor());
            let (fr, fc) = (sr - r0, sc - c0);
            let (r0, c0) = (r0 as i64, c0 as i64);
            let v = (1.0 - fr) * (1.0 - fc) * sample(r0, c0)
                + (1.0 - fr) * fc * sample(r0, c0 + 1)
                + fr * (1.0 - fc) * sample(r0 + 1, c0)
                + fr * fc * sample(r0 + 1, c0 + 1);
            out.set(r, c, v.clamp(0.0, 1.0));
        }
    }
    out
}

fn snap(v: f64) -> f64 {
    let r = v.round();
    if (v - r).abs() < 1e-9 {
        r
    } else {
        v
    }
}

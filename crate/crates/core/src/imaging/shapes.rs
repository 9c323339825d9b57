//! Random five-point closed polylines.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::imaging::ImageGrid;
use crate::par::Execution;

pub const SHAPE_POINTS: usize = 5;
/// Side of the centered square the vertices are drawn from.
pub const VERTEX_REGION: usize = 22;
pub const MIN_LIT_PIXELS: usize = 5;

/// Sets every pixel on the Bresenham segment from `a` to `b` (row, col) to 1.
pub fn draw_line(img: &mut ImageGrid, a: (i64, i64), b: (i64, i64)) {
    let (mut r, mut c) = a;
    let dr = (b.0 - a.0).abs();
    let dc = -(b.1 - a.1).abs();
    let sr = if a.0 < b.0 { 1 } else { -1 };
    let sc = if a.1 < b.1 { 1 } else { -1 };
    let mut err = dr + dc;
    loop {
        if r >= 0 && c >= 0 && (r as usize) < img.height() && (c as usize) < img.width() {
            img.set(r as usize, c as usize, 1.0);
        }
        if r == b.0 && c == b.1 {
            break;
        }
        let e2 = 2 * err;
        if e2 >= dc {
            err += dc;
            r += sr;
        }
        if e2 <= dr {
            err += dr;
            c += sc;
        }
    }
}

/// Generator for shape `index` of the stream seeded by `seed`. Each index
/// has its own ChaCha stream, so shapes can be drawn in any order.
fn shape_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

pub fn gen_shape(seed: u64, index: usize, size: usize) -> ImageGrid {
    let mut rng = shape_rng(seed, index);
    let region = VERTEX_REGION.min(size);
    let lo = ((size - region) / 2) as i64;
    loop {
        let pts: Vec<(i64, i64)> = (0..SHAPE_POINTS)
            .map(|_| {
                (
                    lo + rng.gen_range(0..region as i64),
                    lo + rng.gen_range(0..region as i64),
                )
            })
            .collect();
        let mut img = ImageGrid::zeros(size, size);
        for i in 0..SHAPE_POINTS {
            draw_line(&mut img, pts[i], pts[(i + 1) % SHAPE_POINTS]);
        }
        let lit = img.pixels().iter().filter(|&&p| p > 0.0).count();
        if lit >= MIN_LIT_PIXELS.min(size * size) {
            return img;
        }
    }
}

/// `count` shapes on a `size × size` grid, identical for any execution mode.
pub fn gen_shapes(count: usize, seed: u64, size: usize, exec: Execution) -> Result<Vec<ImageGrid>> {
    if count == 0 {
        return Err(Error::Validation("shape count must be at least 1".into()));
    }
    if size < 2 {
        return Err(Error::Validation(format!("image size {size} is too small")));
    }
    Ok(exec.map_range(count, |i| gen_shape(seed, i, size)))
}

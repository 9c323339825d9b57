//! Images, the transformations acting on them, and paired datasets.

mod idx;
mod image;
mod pairs;
mod shapes;

pub use idx::{encode_idx_images, encode_idx_labels, load_idx, parse_idx_images, parse_idx_labels};
pub use image::{rotate, translate_periodic, ImageGrid, RotationMethod};
pub use pairs::{
    build_pairs, split, split_sizes, DatasetBundle, PairMode, PairSample, Provenance, Splits,
    TransformFactor, TransformSpec,
};
pub use shapes::{draw_line, gen_shape, gen_shapes};

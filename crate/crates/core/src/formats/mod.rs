//! Binary containers: `EQOP` operators, `EQDS` datasets, `EQCK` checkpoints.
//! All writes go to a temporary file that is renamed into place.

mod bytes;
mod checkpoint;
mod dataset;
mod operator;

pub use bytes::{read_file, write_atomic};
pub use checkpoint::{
    decode_checkpoint, encode_checkpoint, read_checkpoint, sidecar_path, write_checkpoint,
    CheckpointSidecar, CHECKPOINT_MAGIC, CHECKPOINT_VERSION,
};
pub use dataset::{
    decode_dataset, encode_dataset, manifest_path, read_dataset, read_manifest, write_dataset,
    DatasetManifest, SplitCounts, DATASET_MAGIC, DATASET_VERSION,
};
pub use operator::{decode_operator, encode_operator, OPERATOR_MAGIC, OPERATOR_VERSION};

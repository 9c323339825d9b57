//! Linear complex autoencoders with fixed latent operators: supervised
//! shift, disentangled baseline, weakly supervised shift, and stacked shift.

mod config;
mod model;
mod params;
mod train;
mod weak;

pub use config::{GroupConfig, GroupKindConfig, TrainConfig, WeakConfig};
pub use model::{stack_columns, Model};
pub use params::{ModelParams, ModelVariant};
pub use train::{
    batch_loss, check_compatible, dataset_loss, latent_residual, train, train_stacked, train_supervised,
    train_weak, EpochRecord, TrainOutcome,
};
pub use weak::{argmax, infer_shift_scores, softmax, weak_loss, WeakBatch, CPS_FLOOR};

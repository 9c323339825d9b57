//! Distributed latent operators for finite transformation groups.
//!
//! * [`group`]: groups, shift / tensor-product / induced operators, and
//!   character-table checks.
//! * [`imaging`]: images, rotations and periodic translations, synthetic
//!   shapes, IDX ingestion, paired datasets.
//! * [`numkit`]: complex matrices, the autoencoder chain with analytic
//!   gradients, Adam.
//! * [`models`]: the trainable model variants and their training loops.
//! * [`eval`]: metrics, latent analyses, image grids, theory reports.
//! * [`formats`]: binary containers for operators, datasets, checkpoints.

pub mod error;
pub mod eval;
pub mod formats;
pub mod group;
pub mod imaging;
pub mod models;
pub mod numkit;
pub mod par;

pub use error::{Error, Result};
pub use par::Execution;

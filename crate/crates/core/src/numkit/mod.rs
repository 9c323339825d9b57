//! Complex linear algebra, the linear autoencoder chain, and Adam.

mod adam;
mod chain;
pub(crate) mod cmatrix;
mod loss;

pub use adam::{adam_step, AdamState, AdamSummary, BETA1, BETA2, EPSILON};
pub use chain::{apply_columns, backward, forward_chain, Grads, Tape};
pub use cmatrix::ComplexMatrix;
pub use loss::{l2_pair_loss, pair_loss, recon_loss};

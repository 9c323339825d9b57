//! Metrics, theory checks, latent diagnostics, and reports.

mod grid;
mod latent;
mod metrics;
mod report;
mod theory;

pub use grid::{encode_grid, export_grid, quantize, SEPARATOR};
pub use latent::{
    latent_pca_spectrum, latent_variance_profile, orbit_codes, orbit_pca_spectrum, orbit_variance,
};
pub use metrics::{
    encoder_condition_number, equivariance_residual, equivariance_residual_with, test_mse,
    weak_agreement, WeakAgreement,
};
pub use report::{evaluate, EvalReport, ReportProvenance};
pub use theory::{
    analytic_layer_checks, disentangled_mismatch_checks, family_character_check, fourier_checks,
    induced_checks, run_theory_checks, shift_character_checks, tensor_character_checks,
    topology_demo, CheckResult, TheoryOptions, TheoryReport, TopologyReport, FACTOR_TOL, TRACE_TOL,
};

use num_complex::Complex64;

use crate::error::Result;
use crate::group::root_of_unity;
use crate::models::{GroupConfig, Model, ModelParams, ModelVariant, TrainConfig};
use crate::numkit::ComplexMatrix;

/// Complex-shift model for horizontal translations of `size × size`
/// images whose encoder is a row-wise DFT, `E[(r,f),(r,c)] = e^{2πi fc/W}`,
/// and whose decoder is its inverse.
pub fn dft_translation_model(size: usize) -> Result<Model> {
    let p = size * size;
    let encoder = ComplexMatrix::from_fn(p, p, |i, j| {
        let (r, f) = (i / size, i % size);
        let (rc, c) = (j / size, j % size);
        if r == rc {
            root_of_unity(size, f * c)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let decoder = encoder.conj_transpose().scaled(1.0 / size as f64);
    let config = TrainConfig::new(ModelVariant::ShiftComplex, GroupConfig::cyclic(size), p);
    let params = ModelParams {
        variant: ModelVariant::ShiftComplex,
        encoder,
        decoder,
        intermediates: Vec::new(),
    };
    Model::new(params, config)
}

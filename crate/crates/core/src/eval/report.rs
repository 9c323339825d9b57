use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::imaging::PairSample;
use crate::models::{Model, ModelVariant};
use crate::par::Execution;

use super::metrics::{encoder_condition_number, equivariance_residual, test_mse, weak_agreement};
use super::theory::{family_character_check, CheckResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportProvenance {
    pub config_hash: String,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub test_mse: f64,
    pub equivariance_residual: f64,
    pub weak_inference_accuracy: Option<f64>,
    pub character_checks: Vec<CheckResult>,
    pub condition_number_encoder: f64,
    pub provenance: ReportProvenance,
}

impl EvalReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Evaluates `model` on the test pairs and checks the characters of every
/// operator family it uses.
pub fn evaluate(model: &Model, test: &[PairSample], exec: Execution) -> Result<EvalReport> {
    let weak_inference_accuracy = match model.variant() {
        ModelVariant::Weak => Some(weak_agreement(model, test)?.agreement),
        _ => None,
    };
    let dim = model.params.latent_dim();
    let character_checks = model
        .config
        .families()
        .iter()
        .map(|f| family_character_check(f, dim, exec))
        .collect::<Result<_>>()?;
    Ok(EvalReport {
        test_mse: test_mse(model, test)?,
        equivariance_residual: equivariance_residual(model, test)?,
        weak_inference_accuracy,
        character_checks,
        condition_number_encoder: encoder_condition_number(model),
        provenance: ReportProvenance {
            config_hash: model.config.hash(),
            seed: model.config.seed,
        },
    })
}

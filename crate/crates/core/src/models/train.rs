use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::imaging::{DatasetBundle, PairSample};
use crate::models::model::stack_columns;
use crate::models::weak::weak_loss;
use crate::models::{Model, ModelVariant, TrainConfig};
use crate::numkit::{adam_step, backward, forward_chain, pair_loss, AdamState, AdamSummary, Grads};

/// Batch size used when evaluating losses without gradients.
const EVAL_CHUNK: usize = 256;

/// One line of the training history.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub train_loss: f64,
    pub val_loss: f64,
    pub equivariance_residual: f64,
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    /// Parameters with the lowest validation loss (earliest epoch on ties).
    pub model: Model,
    pub best_epoch: usize,
    pub history: Vec<EpochRecord>,
    pub optimizer: AdamSummary,
}

impl TrainOutcome {
    /// History as JSON lines.
    pub fn history_jsonl(&self) -> String {
        self.history
            .iter()
            .map(|r| serde_json::to_string(r).expect("record serializes") + "\n")
            .collect()
    }
}

/// Loss of one batch, with gradients when requested.
pub fn batch_loss(model: &Model, batch: &[&PairSample], with_grads: bool) -> Result<(f64, Option<Grads>)> {
    let x1 = stack_columns(batch.iter().map(|p| &p.x1));
    let x2 = stack_columns(batch.iter().map(|p| &p.x2));
    if model.variant() == ModelVariant::Weak {
        let w = model.config.weak_config();
        let r = weak_loss(&model.params, x1.view(), x2.view(), w.k_latent, w.temperature, with_grads)?;
        return Ok((r.loss, with_grads.then_some(r.grads)));
    }
    let ops = batch
        .iter()
        .map(|p| model.stages(&p.param))
        .collect::<Result<Vec<_>>>()?;
    let tape = forward_chain(&model.params, x1.view(), &ops)?;
    let (loss, g1, g2) = pair_loss(&tape.y_plain, &tape.y_trans, x1.view(), x2.view())?;
    let grads = if with_grads {
        Some(backward(&tape, &model.params, &g1, &g2)?)
    } else {
        None
    };
    Ok((loss, grads))
}

/// Training objective averaged over `samples`.
pub fn dataset_loss(model: &Model, samples: &[PairSample]) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::Validation("cannot evaluate a loss on no samples".into()));
    }
    let mut total = 0.0;
    for chunk in samples.chunks(EVAL_CHUNK) {
        let refs: Vec<&PairSample> = chunk.iter().collect();
        total += batch_loss(model, &refs, false)?.0 * chunk.len() as f64;
    }
    Ok(total / samples.len() as f64)
}

/// `mean‖E x2 − chain(g)·E x1‖² / mean‖E x2‖²` over `samples`, using the
/// operators the model would pick at inference.
pub fn latent_residual(model: &Model, samples: &[PairSample]) -> Result<f64> {
    let (mut num, mut den) = (0.0, 0.0);
    for chunk in samples.chunks(EVAL_CHUNK) {
        let elems = model.infer(chunk)?;
        let ops = elems.iter().map(|g| model.stages(g)).collect::<Result<Vec<_>>>()?;
        let z1 = model.encode(stack_columns(chunk.iter().map(|p| &p.x1)).view());
        let z2 = model.encode(stack_columns(chunk.iter().map(|p| &p.x2)).view());
        let moved = model.transform_latent(&z1, &ops);
        num += (&moved.re().view() - &z2.re().view()).mapv(|v| v * v).sum()
            + (&moved.im().view() - &z2.im().view()).mapv(|v| v * v).sum();
        den += z2.norm_sqr();
    }
    if den == 0.0 {
        return Ok(if num == 0.0 { 0.0 } else { f64::INFINITY });
    }
    Ok(num / den)
}

fn check_variant(cfg: &TrainConfig, allowed: &[ModelVariant], what: &str) -> Result<()> {
    if !allowed.contains(&cfg.variant) {
        return Err(Error::Validation(format!(
            "{what} cannot train a {} model",
            cfg.variant.name()
        )));
    }
    Ok(())
}

/// Supervised training with the permutation shift, complex shift, or
/// disentangled operator.
pub fn train_supervised(data: &DatasetBundle, cfg: &TrainConfig) -> Result<TrainOutcome> {
    check_variant(
        cfg,
        &[ModelVariant::Shift, ModelVariant::ShiftComplex, ModelVariant::Disentangled],
        "supervised training",
    )?;
    fit(data, cfg)
}

/// Weakly supervised training: pair labels are ignored.
pub fn train_weak(data: &DatasetBundle, cfg: &TrainConfig) -> Result<TrainOutcome> {
    check_variant(cfg, &[ModelVariant::Weak], "weak training")?;
    if data.spec.factors().len() != 1 {
        return Err(Error::Unsupported(format!(
            "weak supervision handles a single transformation, dataset has {} factors",
            data.spec.factors().len()
        )));
    }
    fit(data, cfg)
}

/// Stacked operators with trainable layers between them.
pub fn train_stacked(data: &DatasetBundle, cfg: &TrainConfig) -> Result<TrainOutcome> {
    check_variant(cfg, &[ModelVariant::Stacked], "stacked training")?;
    fit(data, cfg)
}

/// Dispatches on `cfg.variant`.
pub fn train(data: &DatasetBundle, cfg: &TrainConfig) -> Result<TrainOutcome> {
    match cfg.variant {
        ModelVariant::Weak => train_weak(data, cfg),
        ModelVariant::Stacked => train_stacked(data, cfg),
        _ => train_supervised(data, cfg),
    }
}

/// Checks that a configuration can be trained on `data`.
pub fn check_compatible(data: &DatasetBundle, cfg: &TrainConfig) -> Result<()> {
    cfg.validate()?;
    if cfg.variant == ModelVariant::Weak {
        if data.spec.factors().len() != 1 {
            return Err(Error::Unsupported(format!(
                "weak supervision handles a single transformation, dataset has {} factors",
                data.spec.factors().len()
            )));
        }
        if cfg.group.orders.len() != 1 {
            return Err(Error::Unsupported("weak supervision handles a single transformation".into()));
        }
        return Ok(());
    }
    cfg.check_data(&data.spec, data.pixel_dim())
}

/// Adam on the paired loss. Validation falls back to the training split
/// when the dataset has no validation pairs.
fn fit(data: &DatasetBundle, cfg: &TrainConfig) -> Result<TrainOutcome> {
    check_compatible(data, cfg)?;
    if data.train.is_empty() {
        return Err(Error::Validation("training split is empty".into()));
    }
    let val: &[PairSample] = if data.val.is_empty() { &data.train } else { &data.val };
    let mut model = Model::init(cfg.clone(), data.pixel_dim())?;
    let mut adam = AdamState::for_matrices(&model.params.matrices(), cfg.lr);
    let mut order_rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    order_rng.set_stream(1);
    let mut order: Vec<usize> = (0..data.train.len()).collect();
    let mut best: Option<(f64, usize, Model)> = None;
    let mut history = Vec::with_capacity(cfg.epochs);

    for epoch in 1..=cfg.epochs {
        order.shuffle(&mut order_rng);
        let mut total = 0.0;
        for idx in order.chunks(cfg.batch) {
            let batch: Vec<&PairSample> = idx.iter().map(|&i| &data.train[i]).collect();
            let (loss, grads) = batch_loss(&model, &batch, true)?;
            let grads = grads.expect("gradients requested");
            adam_step(&mut model.params.matrices_mut(), &grads.matrices(), &mut adam)?;
            total += loss * batch.len() as f64;
        }
        if !model.params.is_finite() {
            return Err(Error::Validation(format!(
                "parameters diverged at epoch {epoch}; lower the learning rate"
            )));
        }
        let val_loss = dataset_loss(&model, val)?;
        let rec = EpochRecord {
            epoch,
            train_loss: total / data.train.len() as f64,
            val_loss,
            equivariance_residual: latent_residual(&model, val)?,
        };
        history.push(rec);
        if best.as_ref().is_none_or(|(v, _, _)| val_loss < *v) {
            best = Some((val_loss, epoch, model.clone()));
        }
    }
    let (best_epoch, model) = match best {
        Some((_, e, m)) => (e, m),
        None => (0, model),
    };
    Ok(TrainOutcome {
        model,
        best_epoch,
        history,
        optimizer: adam.summary(),
    })
}

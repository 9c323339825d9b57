use ndarray::{Array2, ArrayView2};

use crate::error::{Error, Result};
use crate::group::{GroupElement, LatentOperator};
use crate::imaging::{ImageGrid, PairSample};
use crate::models::weak::{argmax, infer_shift_scores};
use crate::models::{ModelParams, ModelVariant, TrainConfig};
use crate::numkit::cmatrix::{mul, mul_real};
use crate::numkit::{apply_columns, ComplexMatrix};

/// Stacks images as the columns of a `pixels × count` matrix.
pub fn stack_columns<'a>(images: impl IntoIterator<Item = &'a ImageGrid>) -> Array2<f64> {
    let imgs: Vec<&ImageGrid> = images.into_iter().collect();
    let p = imgs.first().map_or(0, |i| i.len());
    let mut x = Array2::zeros((p, imgs.len()));
    for (j, img) in imgs.iter().enumerate() {
        for (i, &v) in img.pixels().iter().enumerate() {
            x[[i, j]] = v;
        }
    }
    x
}

/// Trained weights together with the fixed operators of their configuration.
#[derive(Debug, Clone)]
pub struct Model {
    pub params: ModelParams,
    pub config: TrainConfig,
    /// `bank[s][i]`: operator for index `i` of stage `s`.
    bank: Vec<Vec<LatentOperator>>,
}

impl Model {
    pub fn new(params: ModelParams, config: TrainConfig) -> Result<Self> {
        config.validate()?;
        params.validate()?;
        if params.variant != config.variant {
            return Err(Error::Validation(format!(
                "checkpoint holds a {} model, config asks for {}",
                params.variant.name(),
                config.variant.name()
            )));
        }
        if params.latent_dim() != config.latent_dim {
            return Err(Error::Dimension(format!(
                "checkpoint latent dimension {} differs from config latent_dim {}",
                params.latent_dim(),
                config.latent_dim
            )));
        }
        let layers = config.stage_count() - 1;
        if params.intermediates.len() != layers {
            return Err(Error::Dimension(format!(
                "model has {} intermediate layers, config needs {layers}",
                params.intermediates.len()
            )));
        }
        let bank = config
            .families()
            .iter()
            .map(|f| f.build_all(config.latent_dim))
            .collect::<Result<_>>()?;
        Ok(Self {
            params,
            config,
            bank,
        })
    }

    /// Freshly initialized model for images of `pixel_dim` pixels.
    pub fn init(config: TrainConfig, pixel_dim: usize) -> Result<Self> {
        config.validate()?;
        let params = ModelParams::init(
            config.variant,
            pixel_dim,
            config.latent_dim,
            config.stage_count() - 1,
            config.init_scale,
            config.seed,
        )?;
        Self::new(params, config)
    }

    pub fn variant(&self) -> ModelVariant {
        self.params.variant
    }

    pub fn operators(&self, stage: usize) -> &[LatentOperator] {
        &self.bank[stage]
    }

    /// Operator sequence for `g`; for the weak model `g` indexes the
    /// `K_L` latent transformations.
    pub fn stages(&self, g: &GroupElement) -> Result<Vec<&LatentOperator>> {
        let idx = g.indices();
        if idx.len() != self.bank.len() {
            return Err(Error::Validation(format!(
                "element {g} has {} indices, model has {} operator stages",
                idx.len(),
                self.bank.len()
            )));
        }
        idx.iter()
            .zip(&self.bank)
            .map(|(&i, ops)| {
                ops.get(i).ok_or_else(|| {
                    Error::Validation(format!("index {i} out of range for {} operators", ops.len()))
                })
            })
            .collect()
    }

    pub fn encode(&self, x: ArrayView2<f64>) -> ComplexMatrix {
        mul_real(&self.params.encoder, x)
    }

    /// Complex decoder output.
    pub fn decode_complex(&self, z: &ComplexMatrix) -> ComplexMatrix {
        mul(&self.params.decoder, z)
    }

    /// Real part of the decoder output.
    pub fn decode(&self, z: &ComplexMatrix) -> Array2<f64> {
        self.decode_complex(z).re().clone()
    }

    /// `ψ_m L_{m−1} ⋯ L_1 ψ_1 z`, column `b` using `ops[b]`.
    pub fn transform_latent(&self, z: &ComplexMatrix, ops: &[Vec<&LatentOperator>]) -> ComplexMatrix {
        let m = ops.first().map_or(0, Vec::len);
        let mut cur = z.clone();
        for s in 0..m {
            if s > 0 {
                cur = mul(&self.params.intermediates[s - 1], &cur);
            }
            let stage: Vec<&LatentOperator> = ops.iter().map(|o| o[s]).collect();
            cur = apply_columns(&cur, &stage, false);
        }
        cur
    }

    /// Operator index the model uses for each pair: the label for supervised
    /// variants, the best-scoring latent shift for the weak model.
    pub fn infer(&self, pairs: &[PairSample]) -> Result<Vec<GroupElement>> {
        if self.variant() != ModelVariant::Weak {
            return Ok(pairs.iter().map(|p| p.param.clone()).collect());
        }
        let kl = self.config.weak_config().k_latent;
        let z1 = self.encode(stack_columns(pairs.iter().map(|p| &p.x1)).view());
        let z2 = self.encode(stack_columns(pairs.iter().map(|p| &p.x2)).view());
        (0..pairs.len())
            .map(|b| {
                let s = infer_shift_scores(&z1.column_vec(b), &z2.column_vec(b), kl)?;
                Ok(GroupElement::new(vec![argmax(&s)]))
            })
            .collect()
    }

    /// Transformed reconstructions `Re(D·chain(g)·E x1)` as columns.
    pub fn predict(&self, pairs: &[PairSample]) -> Result<Array2<f64>> {
        let elems = self.infer(pairs)?;
        self.predict_with(pairs, &elems)
    }

    pub fn predict_with(&self, pairs: &[PairSample], elems: &[GroupElement]) -> Result<Array2<f64>> {
        let ops = elems.iter().map(|g| self.stages(g)).collect::<Result<Vec<_>>>()?;
        let x1 = stack_columns(pairs.iter().map(|p| &p.x1));
        self.check_pixels(x1.nrows())?;
        let z = self.encode(x1.view());
        Ok(self.decode(&self.transform_latent(&z, &ops)))
    }

    fn check_pixels(&self, p: usize) -> Result<()> {
        if p != self.params.pixel_dim() {
            return Err(Error::Dimension(format!(
                "images have {p} pixels, model expects {}",
                self.params.pixel_dim()
            )));
        }
        Ok(())
    }

    /// `decode(chain(g)·encode(x))`, realified and clamped to `[0, 1]`.
    pub fn apply_latent_transform(&self, x: &ImageGrid, g: &GroupElement) -> Result<ImageGrid> {
        let ops = vec![self.stages(g)?];
        self.check_pixels(x.len())?;
        let z = self.encode(stack_columns([x]).view());
        let y = self.decode(&self.transform_latent(&z, &ops));
        Ok(ImageGrid::from_clamped(x.height(), x.width(), y.column(0).iter().copied()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::GroupConfig;

    #[test]
    fn latent_transforms_compose() {
        let cfg = TrainConfig::new(ModelVariant::Shift, GroupConfig::cyclic(10), 40);
        let m = Model::init(cfg, 16).unwrap();
        let x = ImageGrid::new(4, 4, (0..16).map(|i| i as f64 / 16.0).collect()).unwrap();
        let z = m.encode(stack_columns([&x]).view());
        let g = |k: usize| m.stages(&GroupElement::new(vec![k])).unwrap();
        let twice = m.transform_latent(&m.transform_latent(&z, &[g(3)]), &[g(4)]);
        let once = m.transform_latent(&z, &[g(7)]);
        assert_eq!(twice, once);
        // ten generator steps are the identity
        let mut cur = z.clone();
        for _ in 0..10 {
            cur = m.transform_latent(&cur, &[g(1)]);
        }
        assert_eq!(cur, z);
        let id = m.apply_latent_transform(&x, &GroupElement::new(vec![0])).unwrap();
        let plain = ImageGrid::from_clamped(4, 4, m.decode(&z).column(0).iter().copied());
        assert_eq!(id, plain);
    }

    #[test]
    fn rejects_mismatched_checkpoint() {
        let cfg = TrainConfig::new(ModelVariant::Shift, GroupConfig::cyclic(10), 40);
        let p = ModelParams::init(ModelVariant::Shift, 16, 20, 0, 1.0, 0).unwrap();
        assert!(matches!(Model::new(p, cfg.clone()), Err(Error::Dimension(_))));
        let p = ModelParams::init(ModelVariant::Disentangled, 16, 40, 0, 1.0, 0).unwrap();
        assert!(Model::new(p, cfg).is_err());
    }
}

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numkit::ComplexMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelVariant {
    /// Supervised, permutation shift operator.
    Shift,
    /// Supervised, complex diagonal shift operator.
    ShiftComplex,
    /// Supervised, 2×2 rotation block plus identity.
    Disentangled,
    /// Complex shift operator with the transformation inferred per pair.
    Weak,
    /// One complex shift operator per factor, with trainable layers between.
    Stacked,
}

impl ModelVariant {
    pub fn code(self) -> u8 {
        match self {
            ModelVariant::Shift => 0,
            ModelVariant::ShiftComplex => 1,
            ModelVariant::Disentangled => 2,
            ModelVariant::Weak => 3,
            ModelVariant::Stacked => 4,
        }
    }

    pub fn from_code(code: u8) -> Option<Self> {
        Some(match code {
            0 => ModelVariant::Shift,
            1 => ModelVariant::ShiftComplex,
            2 => ModelVariant::Disentangled,
            3 => ModelVariant::Weak,
            4 => ModelVariant::Stacked,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            ModelVariant::Shift => "shift",
            ModelVariant::ShiftComplex => "shift-complex",
            ModelVariant::Disentangled => "disentangled",
            ModelVariant::Weak => "weak",
            ModelVariant::Stacked => "stacked",
        }
    }
}

/// Weights of a linear complex autoencoder: `z = E x`, `x̂ = Re(D z)`, with
/// optional `latent × latent` layers between consecutive operators.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    pub variant: ModelVariant,
    pub encoder: ComplexMatrix,
    pub decoder: ComplexMatrix,
    pub intermediates: Vec<ComplexMatrix>,
}

/// `re, im ~ U(−s/√fan_in, s/√fan_in)`.
fn uniform(rows: usize, cols: usize, scale: f64, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    let b = scale / (cols as f64).sqrt();
    let mut m = ComplexMatrix::zeros(rows, cols);
    let (re, im) = m.parts_mut();
    re.mapv_inplace(|_| rng.gen_range(-b..=b));
    im.mapv_inplace(|_| rng.gen_range(-b..=b));
    m
}

impl ModelParams {
    /// Random encoder and decoder; intermediates start at the identity.
    pub fn init(
        variant: ModelVariant,
        pixel_dim: usize,
        latent_dim: usize,
        n_intermediates: usize,
        init_scale: f64,
        seed: u64,
    ) -> Result<Self> {
        if pixel_dim == 0 || latent_dim == 0 {
            return Err(Error::Validation(format!(
                "pixel dimension {pixel_dim} and latent dimension {latent_dim} must be positive"
            )));
        }
        if !(init_scale.is_finite() && init_scale > 0.0) {
            return Err(Error::Validation(format!("init scale {init_scale} must be positive")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let encoder = uniform(latent_dim, pixel_dim, init_scale, &mut rng);
        let decoder = uniform(pixel_dim, latent_dim, init_scale, &mut rng);
        Ok(Self {
            variant,
            encoder,
            decoder,
            intermediates: vec![ComplexMatrix::identity(latent_dim); n_intermediates],
        })
    }

    pub fn pixel_dim(&self) -> usize {
        self.encoder.cols()
    }

    pub fn latent_dim(&self) -> usize {
        self.encoder.rows()
    }

    pub fn validate(&self) -> Result<()> {
        let (l, p) = self.encoder.dim();
        if self.decoder.dim() != (p, l) {
            return Err(Error::Dimension(format!(
                "decoder is {:?}, expected ({p}, {l}) for a {l}x{p} encoder",
                self.decoder.dim()
            )));
        }
        if let Some(m) = self.intermediates.iter().find(|m| m.dim() != (l, l)) {
            return Err(Error::Dimension(format!(
                "intermediate layer is {:?}, expected ({l}, {l})",
                m.dim()
            )));
        }
        Ok(())
    }

    /// Matrices in a fixed order: encoder, decoder, intermediates.
    pub fn matrices(&self) -> Vec<&ComplexMatrix> {
        let mut v = vec![&self.encoder, &self.decoder];
        v.extend(self.intermediates.iter());
        v
    }

    pub fn matrices_mut(&mut self) -> Vec<&mut ComplexMatrix> {
        let mut v = vec![&mut self.encoder, &mut self.decoder];
        v.extend(self.intermediates.iter_mut());
        v
    }

    pub fn is_finite(&self) -> bool {
        self.matrices().iter().all(|m| m.is_finite())
    }
}

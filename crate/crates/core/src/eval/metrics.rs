use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::group::{GroupElement, LatentOperator};
use crate::imaging::PairSample;
use crate::models::{argmax, latent_residual, stack_columns, Model, ModelVariant};

const CHUNK: usize = 256;

/// Mean over pairs of `‖x2 − Re(D·chain(g)·E x1)‖² / P`. The weak model
/// uses its best-scoring latent shift.
pub fn test_mse(model: &Model, test: &[PairSample]) -> Result<f64> {
    if test.is_empty() {
        return Err(Error::Validation("test split is empty".into()));
    }
    let mut total = 0.0;
    for chunk in test.chunks(CHUNK) {
        let y = model.predict(chunk)?;
        let x2 = stack_columns(chunk.iter().map(|p| &p.x2));
        total += (&y - &x2).mapv(|v| v * v).sum();
    }
    Ok(total / (test.len() * test[0].x2.len()) as f64)
}

/// `mean‖E x2 − chain(g)·E x1‖² / mean‖E x2‖²` over `pairs`.
pub fn equivariance_residual(model: &Model, pairs: &[PairSample]) -> Result<f64> {
    if pairs.is_empty() {
        return Err(Error::Validation("no pairs to measure equivariance on".into()));
    }
    latent_residual(model, pairs)
}

/// The same residual for an arbitrary encoder and operator assignment.
pub fn equivariance_residual_with<E, O>(pairs: &[PairSample], encode: E, operator: O) -> Result<f64>
where
    E: Fn(&[f64]) -> Vec<Complex64>,
    O: Fn(&GroupElement) -> Result<LatentOperator>,
{
    let (mut num, mut den) = (0.0, 0.0);
    for p in pairs {
        let z1 = encode(p.x1.pixels());
        let z2 = encode(p.x2.pixels());
        let moved = operator(&p.param)?.apply(&z1)?;
        num += moved.iter().zip(&z2).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>();
        den += z2.iter().map(|v| v.norm_sqr()).sum::<f64>();
    }
    Ok(if den == 0.0 { 0.0 } else { num / den })
}

/// Test-time agreement of the weak model's phase-correlation choice with
/// the latent shift that reconstructs `x2` best.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct WeakAgreement {
    /// Fraction of pairs where both choices coincide.
    pub agreement: f64,
    /// `mapping[k]`: most frequent inferred shift among pairs labelled `k`.
    pub mapping: Vec<usize>,
    /// Whether `mapping` is injective onto distinct latent shifts.
    pub bijective: bool,
    /// `a` with `mapping[k] = a·k mod K`, when the mapping is such an
    /// automorphism of the cyclic group.
    pub automorphism: Option<usize>,
}

pub fn weak_agreement(model: &Model, test: &[PairSample]) -> Result<WeakAgreement> {
    if model.variant() != ModelVariant::Weak {
        return Err(Error::Validation("weak agreement needs a weak model".into()));
    }
    if test.is_empty() {
        return Err(Error::Validation("test split is empty".into()));
    }
    let kl = model.config.weak_config().k_latent;
    let k_true = model.config.group.orders[0];
    let mut agree = 0usize;
    let mut counts = vec![vec![0usize; kl]; k_true];
    for chunk in test.chunks(CHUNK) {
        let inferred = model.infer(chunk)?;
        let x2 = stack_columns(chunk.iter().map(|p| &p.x2));
        let mut errs = vec![vec![0.0; kl]; chunk.len()];
        for kappa in 0..kl {
            let g = vec![GroupElement::new(vec![kappa]); chunk.len()];
            let y = model.predict_with(chunk, &g)?;
            for (b, e) in errs.iter_mut().enumerate() {
                e[kappa] = (&y.column(b) - &x2.column(b)).mapv(|v| v * v).sum();
            }
        }
        for ((p, inf), e) in chunk.iter().zip(&inferred).zip(&errs) {
            let neg: Vec<f64> = e.iter().map(|v| -v).collect();
            let kappa = inf.indices()[0];
            if argmax(&neg) == kappa {
                agree += 1;
            }
            counts[p.param.indices()[0]][kappa] += 1;
        }
    }
    let mapping: Vec<usize> = counts.iter().map(|c| argmax(&c.iter().map(|&v| v as f64).collect::<Vec<_>>())).collect();
    let mut seen = mapping.clone();
    seen.sort_unstable();
    seen.dedup();
    let bijective = seen.len() == mapping.len() && kl == k_true;
    let automorphism = if bijective && k_true > 1 {
        let a = mapping[1];
        (0..k_true).all(|k| mapping[k] == (a * k) % k_true).then_some(a)
    } else {
        None
    };
    Ok(WeakAgreement {
        agreement: agree as f64 / test.len() as f64,
        mapping,
        bijective,
        automorphism,
    })
}

/// `σ_max / σ_min` of the encoder; infinite when it is rank deficient.
pub fn encoder_condition_number(model: &Model) -> f64 {
    let e = &model.params.encoder;
    let m = DMatrix::from_fn(e.rows(), e.cols(), |i, j| e.get(i, j));
    let sv = m.singular_values();
    let max = sv.iter().cloned().fold(0.0, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if min <= 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::dft_translation_model;
    use crate::group::shift_operator_complex;
    use crate::imaging::{build_pairs, gen_shapes, PairMode, TransformSpec};
    use crate::par::Execution;

    fn translation_pairs() -> Vec<PairSample> {
        let t = TransformSpec::new(1, 28, 1).unwrap();
        let base = gen_shapes(3, 5, 28, Execution::Parallel).unwrap();
        build_pairs(&base, &t, PairMode::Orbit, Some(120), 2, Execution::Parallel).unwrap()
    }

    #[test]
    fn dft_encoder_is_exactly_equivariant() {
        let pairs = translation_pairs();
        let m = dft_translation_model(28).unwrap();
        assert!(equivariance_residual(&m, &pairs).unwrap() < 1e-9);
        assert!(test_mse(&m, &pairs).unwrap() < 1e-20);
        let r = equivariance_residual_with(
            &pairs,
            |x| {
                let z = m.encode(ndarray::ArrayView2::from_shape((x.len(), 1), x).unwrap());
                z.column_vec(0)
            },
            |g| shift_operator_complex(28, 784, g.indices()[0]),
        )
        .unwrap();
        assert!(r < 1e-9);
    }

    #[test]
    fn zero_decoder_gives_target_activity() {
        let pairs = translation_pairs();
        let mut m = dft_translation_model(28).unwrap();
        m.params.decoder = crate::numkit::ComplexMatrix::zeros(784, 784);
        let activity: f64 = pairs.iter().map(|p| p.x2.pixels().iter().map(|v| v * v).sum::<f64>()).sum::<f64>()
            / (pairs.len() * 784) as f64;
        assert!((test_mse(&m, &pairs).unwrap() - activity).abs() < 1e-15);
        assert!(test_mse(&m, &[]).is_err());
    }

    #[test]
    fn untrained_model_residual_is_order_one() {
        use crate::models::{GroupConfig, TrainConfig};
        let cfg = TrainConfig::new(ModelVariant::ShiftComplex, GroupConfig::cyclic(28), 784);
        let m = Model::init(cfg, 784).unwrap();
        let r = equivariance_residual(&m, &translation_pairs()).unwrap();
        assert!(r > 0.3 && r < 3.0, "residual {r}");
    }

    #[test]
    fn condition_number_of_unitary_encoder() {
        let m = dft_translation_model(4).unwrap();
        assert!((encoder_condition_number(&m) - 1.0).abs() < 1e-9);
    }
}

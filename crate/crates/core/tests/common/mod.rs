//! Finite-difference gradient checking shared by test targets.

use eqop::group::GroupElement;
use eqop::imaging::{ImageGrid, PairSample};
use eqop::models::{batch_loss, Model, ModelParams, TrainConfig};
use eqop::numkit::ComplexMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const SIDE: usize = 6;
pub const LATENT: usize = 12;
const STEP: f64 = 1e-6;

fn image(rng: &mut ChaCha8Rng) -> ImageGrid {
    ImageGrid::new(SIDE, SIDE, (0..SIDE * SIDE).map(|_| rng.gen()).collect()).unwrap()
}

fn random_matrix(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(rows, cols);
    let (re, im) = m.parts_mut();
    re.mapv_inplace(|_| rng.gen_range(-0.5..0.5));
    im.mapv_inplace(|_| rng.gen_range(-0.5..0.5));
    m
}

/// A 6×6 model with random intermediates and five random pairs.
pub fn setup(config: TrainConfig, seed: u64) -> (Model, Vec<PairSample>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_inter = config.stage_count() - 1;
    let mut params = ModelParams::init(config.variant, SIDE * SIDE, LATENT, n_inter, 1.0, seed).unwrap();
    for m in params.intermediates.iter_mut() {
        *m = random_matrix(LATENT, LATENT, &mut rng);
    }
    let orders = config.group.orders.clone();
    let pairs = (0..5)
        .map(|b| PairSample {
            x1: image(&mut rng),
            x2: image(&mut rng),
            param: GroupElement::new(orders.iter().map(|&k| rng.gen_range(0..k)).collect()),
            base: b,
        })
        .collect();
    (Model::new(params, config).unwrap(), pairs)
}

pub fn loss(model: &Model, pairs: &[PairSample]) -> f64 {
    let refs: Vec<&PairSample> = pairs.iter().collect();
    batch_loss(model, &refs, false).unwrap().0
}

/// Largest relative gap between analytic and central-difference gradients
/// over 12 random entries (real and imaginary parts) of every matrix.
/// Gaps are relative to `max(|analytic|, |numeric|, 1e-6)`.
pub fn max_gradient_error(config: TrainConfig) -> f64 {
    let (mut model, pairs) = setup(config, 11);
    let refs: Vec<&PairSample> = pairs.iter().collect();
    let grads = batch_loss(&model, &refs, true).unwrap().1.unwrap();
    let analytic: Vec<ComplexMatrix> = grads.matrices().into_iter().cloned().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0.0f64;
    for (mi, g) in analytic.iter().enumerate() {
        let (rows, cols) = g.dim();
        for _ in 0..12 {
            let (i, j) = (rng.gen_range(0..rows), rng.gen_range(0..cols));
            for imag in [false, true] {
                let perturb = |model: &mut Model, d: f64| {
                    let mut mats = model.params.matrices_mut();
                    let (re, im) = mats[mi].parts_mut();
                    if imag {
                        im[[i, j]] += d
                    } else {
                        re[[i, j]] += d
                    }
                };
                perturb(&mut model, STEP);
                let up = loss(&model, &pairs);
                perturb(&mut model, -2.0 * STEP);
                let down = loss(&model, &pairs);
                perturb(&mut model, STEP);
                let fd = (up - down) / (2.0 * STEP);
                let an = if imag { g.get(i, j).im } else { g.get(i, j).re };
                worst = worst.max((fd - an).abs() / fd.abs().max(an.abs()).max(1e-6));
            }
        }
    }
    worst
}

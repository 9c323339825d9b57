//! Analytic gradients against central finite differences, and descent
//! behaviour of Adam on a fixed batch.

mod common;

use common::{loss, max_gradient_error, setup, LATENT};
use eqop::imaging::PairSample;
use eqop::models::{batch_loss, GroupConfig, ModelVariant, TrainConfig, WeakConfig};
use eqop::numkit::{adam_step, AdamState};

const REL_TOL: f64 = 1e-4;

fn check(config: TrainConfig) {
    let e = max_gradient_error(config);
    assert!(e <= REL_TOL, "relative gradient error {e}");
}

#[test]
fn shift_gradients_match_finite_differences() {
    check(TrainConfig::new(ModelVariant::Shift, GroupConfig::cyclic(4), LATENT));
}

#[test]
fn complex_shift_gradients_match_finite_differences() {
    check(TrainConfig::new(ModelVariant::ShiftComplex, GroupConfig::cyclic(5), LATENT));
}

#[test]
fn disentangled_gradients_match_finite_differences() {
    check(TrainConfig::new(ModelVariant::Disentangled, GroupConfig::cyclic(4), LATENT));
}

#[test]
fn weak_gradients_match_finite_differences() {
    let mut cfg = TrainConfig::new(ModelVariant::Weak, GroupConfig::cyclic(4), LATENT);
    cfg.weak = Some(WeakConfig { k_latent: 4, temperature: 0.5 });
    check(cfg);
}

#[test]
fn stacked_gradients_match_finite_differences() {
    check(TrainConfig::new(ModelVariant::Stacked, GroupConfig::direct(vec![2, 3]), LATENT));
}

#[test]
fn stacked_three_factor_gradients_match_finite_differences() {
    check(TrainConfig::new(ModelVariant::Stacked, GroupConfig::direct(vec![2, 2, 3]), LATENT));
}

#[test]
fn adam_descends_on_a_fixed_batch() {
    for variant in [ModelVariant::Shift, ModelVariant::ShiftComplex, ModelVariant::Disentangled] {
        let (mut model, pairs) = setup(TrainConfig::new(variant, GroupConfig::cyclic(4), LATENT), 5);
        let refs: Vec<&PairSample> = pairs.iter().collect();
        let mut adam = AdamState::for_matrices(&model.params.matrices(), 1e-3);
        let mut prev = loss(&model, &pairs);
        let mut decreases = 0;
        for _ in 0..50 {
            let g = batch_loss(&model, &refs, true).unwrap().1.unwrap();
            adam_step(&mut model.params.matrices_mut(), &g.matrices(), &mut adam).unwrap();
            let now = loss(&model, &pairs);
            if now <= prev {
                decreases += 1;
            }
            prev = now;
        }
        assert!(decreases >= 45, "{variant:?}: loss fell in {decreases} of 50 steps");
    }
}

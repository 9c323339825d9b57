use ndarray::Zip;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numkit::ComplexMatrix;

pub const BETA1: f64 = 0.9;
pub const BETA2: f64 = 0.999;
pub const EPSILON: f64 = 1e-8;

/// Adam moments for a list of complex matrices; real and imaginary parts
/// are independent parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    step: u64,
    first: Vec<ComplexMatrix>,
    second: Vec<ComplexMatrix>,
}

/// Compact description of an optimizer state, for sidecar files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdamSummary {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    pub step: u64,
    pub first_moment_norm: f64,
    pub second_moment_norm: f64,
}

impl AdamState {
    pub fn new(shapes: &[(usize, usize)], lr: f64) -> Self {
        let zeros: Vec<ComplexMatrix> = shapes.iter().map(|&(r, c)| ComplexMatrix::zeros(r, c)).collect();
        Self {
            lr,
            beta1: BETA1,
            beta2: BETA2,
            eps: EPSILON,
            step: 0,
            first: zeros.clone(),
            second: zeros,
        }
    }

    pub fn for_matrices(params: &[&ComplexMatrix], lr: f64) -> Self {
        let shapes: Vec<_> = params.iter().map(|m| m.dim()).collect();
        Self::new(&shapes, lr)
    }

    pub fn step(&self) -> u64 {
        self.step
    }

    pub fn summary(&self) -> AdamSummary {
        let norm = |v: &[ComplexMatrix]| v.iter().map(|m| m.norm_sqr()).sum::<f64>().sqrt();
        AdamSummary {
            lr: self.lr,
            beta1: self.beta1,
            beta2: self.beta2,
            eps: self.eps,
            step: self.step,
            first_moment_norm: norm(&self.first),
            second_moment_norm: norm(&self.second),
        }
    }
}

/// One bias-corrected Adam update of `params` in place.
pub fn adam_step(params: &mut [&mut ComplexMatrix], grads: &[&ComplexMatrix], state: &mut AdamState) -> Result<()> {
    if params.len() != grads.len() || params.len() != state.first.len() {
        return Err(Error::Dimension(format!(
            "{} parameters, {} gradients, {} optimizer slots",
            params.len(),
            grads.len(),
            state.first.len()
        )));
    }
    for ((p, g), m) in params.iter().zip(grads).zip(&state.first) {
        if p.dim() != g.dim() || p.dim() != m.dim() {
            return Err(Error::Dimension(format!(
                "parameter {:?}, gradient {:?}, moment {:?}",
                p.dim(),
                g.dim(),
                m.dim()
            )));
        }
    }
    state.step += 1;
    let t = state.step as i32;
    let (b1, b2, eps, lr) = (state.beta1, state.beta2, state.eps, state.lr);
    let c1 = 1.0 - b1.powi(t);
    let c2 = 1.0 - b2.powi(t);
    for ((p, g), (m, v)) in params
        .iter_mut()
        .zip(grads)
        .zip(state.first.iter_mut().zip(state.second.iter_mut()))
    {
        let (p_re, p_im) = p.parts_mut();
        let (m_re, m_im) = m.parts_mut();
        let (v_re, v_im) = v.parts_mut();
        for (p, g, m, v) in [(p_re, g.re(), m_re, v_re), (p_im, g.im(), m_im, v_im)] {
            Zip::from(p).and(g).and(m).and(v).for_each(|p, &g, m, v| {
                *m = b1 * *m + (1.0 - b1) * g;
                *v = b2 * *v + (1.0 - b2) * g * g;
                *p -= lr * (*m / c1) / ((*v / c2).sqrt() + eps);
            });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn zero_gradient_leaves_parameters() {
        let mut p = ComplexMatrix::from_fn(2, 2, |i, j| Complex64::new(i as f64, j as f64));
        let before = p.clone();
        let g = ComplexMatrix::zeros(2, 2);
        let mut st = AdamState::new(&[(2, 2)], 1e-3);
        adam_step(&mut [&mut p], &[&g], &mut st).unwrap();
        assert_eq!(p, before);
        assert_eq!(st.step(), 1);
    }

    #[test]
    fn first_step_is_lr_sign() {
        let mut p = ComplexMatrix::zeros(1, 2);
        let g = ComplexMatrix::from_fn(1, 2, |_, j| Complex64::new(if j == 0 { 3.0 } else { -0.2 }, 5e-3));
        let mut st = AdamState::new(&[(1, 2)], 1e-3);
        adam_step(&mut [&mut p], &[&g], &mut st).unwrap();
        // update = −lr·g/(|g| + ε)
        assert!((p.get(0, 0).re + 1e-3 * 3.0 / (3.0 + 1e-8)).abs() < 1e-15);
        assert!((p.get(0, 1).re - 1e-3 * 0.2 / (0.2 + 1e-8)).abs() < 1e-15);
        assert!((p.get(0, 0).im + 1e-3).abs() < 1e-8);
    }

    #[test]
    fn constant_gradient_converges_to_lr_sign() {
        let mut p = ComplexMatrix::zeros(1, 1);
        let g = ComplexMatrix::from_fn(1, 1, |_, _| Complex64::new(-0.7, 2.0));
        let mut st = AdamState::new(&[(1, 1)], 1e-3);
        let mut prev = p.get(0, 0);
        for _ in 0..500 {
            adam_step(&mut [&mut p], &[&g], &mut st).unwrap();
            let now = p.get(0, 0);
            let d = now - prev;
            assert!((d.re - 1e-3).abs() < 1e-9 && (d.im + 1e-3).abs() < 1e-9);
            prev = now;
        }
    }

    #[test]
    fn shape_mismatch() {
        let mut p = ComplexMatrix::zeros(2, 1);
        let g = ComplexMatrix::zeros(1, 2);
        let mut st = AdamState::new(&[(2, 1)], 1e-3);
        assert!(adam_step(&mut [&mut p], &[&g], &mut st).is_err());
        assert!(adam_step(&mut [&mut p], &[], &mut st).is_err());
        assert_eq!(st.step(), 0);
    }
}

//! Forward and backward passes through `x ↦ D·ψ_m L_{m−1} ⋯ L_1 ψ_1·E x`.
//!
//! Batches are stored column-wise: `x` is `pixels × batch` and latent
//! codes are `latent × batch`. Each column carries its own operator
//! sequence. Gradients follow the real-parameter convention
//! `G = ∂L/∂Re + i·∂L/∂Im`.

use ndarray::{Array2, ArrayView2};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::group::LatentOperator;
use crate::models::ModelParams;
use crate::numkit::cmatrix::{adjoint_mul, mul, mul_adjoint, mul_real, mul_real_transpose};
use crate::numkit::ComplexMatrix;

/// Applies `ops[b]` (or its adjoint) to column `b` of `m`.
pub fn apply_columns(m: &ComplexMatrix, ops: &[&LatentOperator], adjoint: bool) -> ComplexMatrix {
    let mut out = m.clone();
    let mut col = vec![Complex64::new(0.0, 0.0); m.rows()];
    for (b, op) in ops.iter().enumerate() {
        let z = m.column_vec(b);
        col.copy_from_slice(&z);
        op.apply_into(&z, &mut col, adjoint);
        out.set_column(b, &col);
    }
    out
}

/// Intermediate values of a forward pass.
#[derive(Debug, Clone)]
pub struct Tape<'a> {
    pub x: Array2<f64>,
    pub z: ComplexMatrix,
    /// Input of each intermediate layer that was used.
    pub layer_inputs: Vec<ComplexMatrix>,
    pub z_out: ComplexMatrix,
    pub y_plain: ComplexMatrix,
    pub y_trans: ComplexMatrix,
    /// `stages[s][b]`: operator applied at stage `s` to sample `b`.
    pub stages: Vec<Vec<&'a LatentOperator>>,
}

impl Tape<'_> {
    pub fn recon_plain(&self) -> Array2<f64> {
        self.y_plain.re().clone()
    }

    pub fn recon_transformed(&self) -> Array2<f64> {
        self.y_trans.re().clone()
    }
}

/// Gradients with the same layout as [`ModelParams`].
#[derive(Debug, Clone, PartialEq)]
pub struct Grads {
    pub encoder: ComplexMatrix,
    pub decoder: ComplexMatrix,
    pub intermediates: Vec<ComplexMatrix>,
}

impl Grads {
    pub fn zeros_like(p: &ModelParams) -> Self {
        let z = |m: &ComplexMatrix| ComplexMatrix::zeros(m.rows(), m.cols());
        Self {
            encoder: z(&p.encoder),
            decoder: z(&p.decoder),
            intermediates: p.intermediates.iter().map(z).collect(),
        }
    }

    pub fn matrices(&self) -> Vec<&ComplexMatrix> {
        let mut v = vec![&self.encoder, &self.decoder];
        v.extend(self.intermediates.iter());
        v
    }

    pub fn max_abs(&self) -> f64 {
        self.matrices()
            .iter()
            .flat_map(|m| m.re().iter().chain(m.im().iter()))
            .fold(0.0, |a, v| a.max(v.abs()))
    }
}

/// Runs the chain on a batch. `ops[b]` lists the operators for column `b`,
/// first applied first; all columns must have the same number of stages,
/// and stage `s > 0` is preceded by intermediate layer `s − 1`.
pub fn forward_chain<'a>(
    params: &ModelParams,
    x: ArrayView2<f64>,
    ops: &[Vec<&'a LatentOperator>],
) -> Result<Tape<'a>> {
    params.validate()?;
    let (p, b) = x.dim();
    if p != params.pixel_dim() {
        return Err(Error::Dimension(format!(
            "batch has {p} pixels, model expects {}",
            params.pixel_dim()
        )));
    }
    if ops.len() != b {
        return Err(Error::Dimension(format!("{} operator lists for {b} samples", ops.len())));
    }
    let m = ops.first().map_or(0, Vec::len);
    if ops.iter().any(|o| o.len() != m) {
        return Err(Error::Dimension("samples use different numbers of operators".into()));
    }
    if m > params.intermediates.len() + 1 {
        return Err(Error::Dimension(format!(
            "{m} operator stages need {} intermediate layers, model has {}",
            m - 1,
            params.intermediates.len()
        )));
    }
    let l = params.latent_dim();
    if let Some(op) = ops.iter().flatten().find(|op| op.dim() != l) {
        return Err(Error::Dimension(format!(
            "operator of dimension {} in a {l}-dimensional latent space",
            op.dim()
        )));
    }
    let stages: Vec<Vec<&LatentOperator>> = (0..m).map(|s| ops.iter().map(|o| o[s]).collect()).collect();

    let z = mul_real(&params.encoder, x);
    let y_plain = mul(&params.decoder, &z);
    let mut layer_inputs = Vec::with_capacity(m.saturating_sub(1));
    let mut cur = z.clone();
    for (s, stage) in stages.iter().enumerate() {
        if s > 0 {
            let w = cur;
            cur = mul(&params.intermediates[s - 1], &w);
            layer_inputs.push(w);
        }
        cur = apply_columns(&cur, stage, false);
    }
    let y_trans = mul(&params.decoder, &cur);
    Ok(Tape {
        x: x.to_owned(),
        z,
        layer_inputs,
        z_out: cur,
        y_plain,
        y_trans,
        stages,
    })
}

/// Back-propagates output gradients `g_plain` and `g_trans` (shaped like the
/// reconstructions) to every trainable matrix. Fixed operators pass the
/// gradient through their adjoint.
pub fn backward(
    tape: &Tape<'_>,
    params: &ModelParams,
    g_plain: &ComplexMatrix,
    g_trans: &ComplexMatrix,
) -> Result<Grads> {
    if g_plain.dim() != tape.y_plain.dim() || g_trans.dim() != tape.y_trans.dim() {
        return Err(Error::Dimension("output gradient does not match the tape".into()));
    }
    let mut grads = Grads::zeros_like(params);
    grads.decoder = mul_adjoint(g_plain, &tape.z);
    grads.decoder.add_assign(&mul_adjoint(g_trans, &tape.z_out));
    let mut g_z = adjoint_mul(&params.decoder, g_plain);
    let mut g = adjoint_mul(&params.decoder, g_trans);
    for s in (0..tape.stages.len()).rev() {
        g = apply_columns(&g, &tape.stages[s], true);
        if s > 0 {
            let layer = &params.intermediates[s - 1];
            grads.intermediates[s - 1] = mul_adjoint(&g, &tape.layer_inputs[s - 1]);
            g = adjoint_mul(layer, &g);
        }
    }
    g_z.add_assign(&g);
    grads.encoder = mul_real_transpose(&g_z, tape.x.view());
    Ok(grads)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{shift_operator_perm, OperatorFamily};
    use crate::models::ModelVariant;
    use ndarray::Array2;

    fn identity_model(n: usize) -> ModelParams {
        ModelParams {
            variant: ModelVariant::Shift,
            encoder: ComplexMatrix::identity(n),
            decoder: ComplexMatrix::identity(n),
            intermediates: vec![],
        }
    }

    #[test]
    fn empty_sequence_reconstructs_input() {
        let p = identity_model(6);
        let x = Array2::from_shape_fn((6, 2), |(i, j)| (i + 3 * j) as f64 / 10.0);
        let t = forward_chain(&p, x.view(), &[vec![], vec![]]).unwrap();
        assert_eq!(t.recon_plain(), x);
        assert_eq!(t.recon_transformed(), x);
    }

    #[test]
    fn identity_operator_matches_plain() {
        let p = identity_model(8);
        let id = shift_operator_perm(4, 8, 0).unwrap();
        let x = Array2::from_shape_fn((8, 1), |(i, _)| i as f64);
        let t = forward_chain(&p, x.view(), &[vec![&id]]).unwrap();
        assert_eq!(t.recon_plain(), t.recon_transformed());
    }

    #[test]
    fn shift_moves_basis_vector() {
        let p = identity_model(8);
        let op = shift_operator_perm(4, 8, 1).unwrap();
        let mut x = Array2::zeros((8, 1));
        x[[5, 0]] = 1.0;
        let t = forward_chain(&p, x.view(), &[vec![&op]]).unwrap();
        // within the second block, position 1 moves to position 2
        let mut want = Array2::zeros((8, 1));
        want[[6, 0]] = 1.0;
        assert_eq!(t.recon_transformed(), want);
    }

    #[test]
    fn mismatched_dimensions_error() {
        let p = identity_model(6);
        let x = Array2::zeros((5, 1));
        assert!(forward_chain(&p, x.view(), &[vec![]]).is_err());
        let op = OperatorFamily::PermutationShift { order: 2 }
            .build(&vec![1].into(), 4)
            .unwrap();
        let x = Array2::zeros((6, 1));
        assert!(forward_chain(&p, x.view(), &[vec![&op]]).is_err());
        let op6 = shift_operator_perm(2, 6, 1).unwrap();
        assert!(forward_chain(&p, x.view(), &[vec![&op6, &op6]]).is_err());
    }
}

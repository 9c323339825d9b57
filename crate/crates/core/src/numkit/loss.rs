//! The paired reconstruction loss.

use ndarray::ArrayView2;

use crate::error::{Error, Result};
use crate::numkit::ComplexMatrix;

/// `‖ŷ₁ − x₁‖²/P + ‖ŷ₂ − x₂‖²/P` for one sample with real reconstructions.
pub fn l2_pair_loss(
    recon_plain: &[f64],
    recon_transformed: &[f64],
    target_plain: &[f64],
    target_transformed: &[f64],
) -> Result<f64> {
    let n = recon_plain.len();
    if [recon_transformed.len(), target_plain.len(), target_transformed.len()]
        .iter()
        .any(|&l| l != n)
    {
        return Err(Error::Dimension("pair loss inputs differ in length".into()));
    }
    if n == 0 {
        return Ok(0.0);
    }
    let sq = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(u, v)| (u - v).powi(2)).sum::<f64>();
    Ok((sq(recon_plain, target_plain) + sq(recon_transformed, target_transformed)) / n as f64)
}

/// Mean over columns of `‖y − x‖²/P`, with the imaginary part of `y`
/// counted as residual. Returns the loss and its gradient with respect to
/// `y`, scaled by `weight`.
pub fn recon_loss(y: &ComplexMatrix, x: ArrayView2<f64>, weight: f64) -> Result<(f64, ComplexMatrix)> {
    if y.dim() != x.dim() {
        return Err(Error::Dimension(format!(
            "reconstruction {:?} vs target {:?}",
            y.dim(),
            x.dim()
        )));
    }
    let (p, b) = x.dim();
    let scale = weight / (p * b) as f64;
    let r_re = y.re() - &x;
    let r_im = y.im().clone();
    let loss = (r_re.iter().map(|v| v * v).sum::<f64>() + r_im.iter().map(|v| v * v).sum::<f64>()) * scale;
    let g = ComplexMatrix::from_parts(r_re * (2.0 * scale), r_im * (2.0 * scale))?;
    Ok((loss, g))
}

/// Batch-averaged paired loss and the gradients for both reconstructions.
pub fn pair_loss(
    y_plain: &ComplexMatrix,
    y_trans: &ComplexMatrix,
    x1: ArrayView2<f64>,
    x2: ArrayView2<f64>,
) -> Result<(f64, ComplexMatrix, ComplexMatrix)> {
    let (l1, g1) = recon_loss(y_plain, x1, 1.0)?;
    let (l2, g2) = recon_loss(y_trans, x2, 1.0)?;
    Ok((l1 + l2, g1, g2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::Array2;

    #[test]
    fn closed_forms() {
        let z = vec![0.0; 784];
        let o = vec![1.0; 784];
        assert_eq!(l2_pair_loss(&z, &z, &o, &o).unwrap(), 2.0);
        assert_eq!(l2_pair_loss(&o, &o, &o, &o).unwrap(), 0.0);
        let h = vec![0.5; 784];
        assert_eq!(l2_pair_loss(&h, &h, &z, &z).unwrap(), 0.5);
        assert_eq!(l2_pair_loss(&o, &o, &z, &z).unwrap(), 4.0 * 0.5);
        assert!(l2_pair_loss(&z, &z[..3], &o, &o).is_err());
    }

    #[test]
    fn batch_loss_matches_per_sample_mean() {
        let x = Array2::from_shape_fn((4, 3), |(i, j)| (i * j) as f64 / 10.0);
        let y = ComplexMatrix::from_fn(4, 3, |i, j| num_complex::Complex64::new(i as f64 / 5.0, 0.0 * j as f64));
        let (l, _, _) = pair_loss(&y, &y, x.view(), x.view()).unwrap();
        let mut want = 0.0;
        for j in 0..3 {
            let yc: Vec<f64> = (0..4).map(|i| y.get(i, j).re).collect();
            let xc: Vec<f64> = (0..4).map(|i| x[[i, j]]).collect();
            want += l2_pair_loss(&yc, &yc, &xc, &xc).unwrap();
        }
        assert!((l - want / 3.0).abs() < 1e-15);
    }

    #[test]
    fn imaginary_mass_is_penalized() {
        let x = Array2::zeros((2, 1));
        let y = ComplexMatrix::from_fn(2, 1, |_, _| num_complex::Complex64::new(0.0, 1.0));
        let (l, g) = recon_loss(&y, x.view(), 1.0).unwrap();
        assert_eq!(l, 1.0);
        assert_eq!(g.get(0, 0), num_complex::Complex64::new(0.0, 1.0));
    }
}

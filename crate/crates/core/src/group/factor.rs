//! Intermediate layer that makes the stacked x/y translation operators
//! reproduce the 2D translation operator.

use ndarray::Array2;

use crate::error::{Error, Result};

/// Source index map of the `K·K'` reordering: output slot `n` reads input
/// `(n div K') + K·(n mod K')`.
pub fn translation_reorder(k_x: usize, k_y: usize) -> Vec<usize> {
    (0..k_x * k_y).map(|n| n / k_y + k_x * (n % k_y)).collect()
}

/// Block-diagonal real permutation `L₁` with `dim / (K·K')` copies of the
/// reordering `P`. It satisfies `ψ_y · L₁ · ψ_x = T · L₁` for the
/// x-shift `ψ_x`, the y-shift `ψ_y` and the tensor-product operator `T`:
/// `L₁` turns the x-shift into the x factor of `T`.
pub fn analytic_l1_translations(k_x: usize, k_y: usize, dim: usize) -> Result<Array2<f64>> {
    let period = k_x * k_y;
    if period == 0 || !dim.is_multiple_of(period) {
        return Err(Error::Dimension(format!(
            "analytic layer needs {k_x}·{k_y} to divide the latent dimension {dim}"
        )));
    }
    let reorder = translation_reorder(k_x, k_y);
    let mut l1 = Array2::zeros((dim, dim));
    for block in 0..dim / period {
        let base = block * period;
        for (n, &s) in reorder.iter().enumerate() {
            l1[[base + n, base + s]] = 1.0;
        }
    }
    Ok(l1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::operator::{shift_operator_complex, tensor_product_operator};
    use crate::numkit::ComplexMatrix;

    fn stacked_residual(kx: usize, ky: usize, dim: usize) -> f64 {
        let l1 = ComplexMatrix::from_real(analytic_l1_translations(kx, ky, dim).unwrap());
        let mut worst = 0.0f64;
        for k in 0..kx {
            for kp in 0..ky {
                let px = shift_operator_complex(kx, dim, k).unwrap().to_dense();
                let py = shift_operator_complex(ky, dim, kp).unwrap().to_dense();
                let t = tensor_product_operator(kx, ky, dim, k, kp).unwrap().to_dense();
                let lhs = py.matmul(&l1).unwrap().matmul(&px).unwrap();
                let rhs = t.matmul(&l1).unwrap();
                worst = worst.max(lhs.max_abs_diff(&rhs));
            }
        }
        worst
    }

    #[test]
    fn trivial_orders_give_identity() {
        assert_eq!(analytic_l1_translations(1, 1, 4).unwrap(), Array2::<f64>::eye(4));
    }

    #[test]
    fn stacked_identity_holds_for_all_shift_pairs() {
        assert!(stacked_residual(2, 3, 6) < 1e-12);
        assert!(stacked_residual(5, 5, 25) < 1e-12);
        assert!(stacked_residual(3, 2, 12) < 1e-12);
    }

    #[test]
    fn first_rows_pick_every_kth_column() {
        // rows 0..K' hold their 1 in columns 0, K, 2K, ...
        let l1 = analytic_l1_translations(2, 3, 6).unwrap();
        for (row, col) in [(0, 0), (1, 2), (2, 4), (3, 1), (4, 3), (5, 5)] {
            assert_eq!(l1[[row, col]], 1.0);
        }
    }

    #[test]
    fn rejects_non_divisible_dimension() {
        assert!(analytic_l1_translations(2, 3, 8).is_err());
    }
}

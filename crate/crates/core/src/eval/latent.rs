//! Latent analyses over transformation orbits.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::Result;
use crate::imaging::{ImageGrid, TransformSpec};
use crate::models::{stack_columns, Model};
use crate::par::Execution;

/// Codes `E(g·x)` for every label `g` of `transforms`, one per row.
pub fn orbit_codes(model: &Model, x: &ImageGrid, transforms: &TransformSpec) -> Result<Vec<Vec<Complex64>>> {
    let group = transforms.label_group()?;
    let imgs = group
        .elements()
        .iter()
        .map(|g| transforms.apply(x, g))
        .collect::<Result<Vec<_>>>()?;
    let z = model.encode(stack_columns(&imgs).view());
    Ok((0..imgs.len()).map(|j| z.column_vec(j)).collect())
}

/// Per-dimension variance `mean_g |z_g − z̄|²` of one orbit.
pub fn orbit_variance(codes: &[Vec<Complex64>]) -> Vec<f64> {
    let Some(first) = codes.first() else { return Vec::new() };
    let n = codes.len() as f64;
    (0..first.len())
        .map(|d| {
            let mean: Complex64 = codes.iter().map(|c| c[d]).sum::<Complex64>() / n;
            codes.iter().map(|c| (c[d] - mean).norm_sqr()).sum::<f64>() / n
        })
        .collect()
}

/// Eigenvalues of the orbit's latent covariance (codes read as real
/// vectors of re/im parts), descending and normalized by their sum; all
/// zero when the orbit has no spread. Computed from the small Gram matrix.
pub fn orbit_pca_spectrum(codes: &[Vec<Complex64>]) -> Vec<f64> {
    let m = codes.len();
    if m == 0 {
        return Vec::new();
    }
    let dim = codes[0].len();
    let mean: Vec<Complex64> = (0..dim)
        .map(|d| codes.iter().map(|c| c[d]).sum::<Complex64>() / m as f64)
        .collect();
    let centered: Vec<Vec<Complex64>> = codes
        .iter()
        .map(|c| c.iter().zip(&mean).map(|(a, b)| a - b).collect())
        .collect();
    let gram = DMatrix::from_fn(m, m, |i, j| {
        centered[i]
            .iter()
            .zip(&centered[j])
            .map(|(a, b)| a.re * b.re + a.im * b.im)
            .sum::<f64>()
    });
    let mut ev: Vec<f64> = SymmetricEigen::new(gram)
        .eigenvalues
        .iter()
        .map(|v| v.max(0.0))
        .collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    let total: f64 = ev.iter().sum();
    let scale = ev.first().copied().unwrap_or(0.0).max(1.0) * 1e-12;
    if total <= scale {
        return vec![0.0; m];
    }
    ev.iter().map(|v| v / total).collect()
}

fn average(rows: Vec<Vec<f64>>) -> Vec<f64> {
    let n = rows.len().max(1) as f64;
    let width = rows.first().map_or(0, Vec::len);
    (0..width).map(|i| rows.iter().map(|r| r[i]).sum::<f64>() / n).collect()
}

/// Orbit variance per latent dimension, averaged over `images`.
pub fn latent_variance_profile(
    model: &Model,
    images: &[ImageGrid],
    transforms: &TransformSpec,
    exec: Execution,
) -> Result<Vec<f64>> {
    let rows = exec.map(images, |x| orbit_codes(model, x, transforms).map(|c| orbit_variance(&c)));
    Ok(average(rows.into_iter().collect::<Result<_>>()?))
}

/// Normalized ranked orbit eigenvalues, averaged over `images`.
pub fn latent_pca_spectrum(
    model: &Model,
    images: &[ImageGrid],
    transforms: &TransformSpec,
    exec: Execution,
) -> Result<Vec<f64>> {
    let rows = exec.map(images, |x| orbit_codes(model, x, transforms).map(|c| orbit_pca_spectrum(&c)));
    Ok(average(rows.into_iter().collect::<Result<_>>()?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::disentangled_operator;
    use crate::models::{GroupConfig, ModelVariant, TrainConfig};

    fn code(seed: u64, n: usize) -> Vec<Complex64> {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect()
    }

    #[test]
    fn zero_encoder_has_no_variance() {
        let cfg = TrainConfig::new(ModelVariant::Shift, GroupConfig::cyclic(4), 8);
        let mut m = Model::init(cfg, 16).unwrap();
        m.params.encoder = crate::numkit::ComplexMatrix::zeros(8, 16);
        let x = ImageGrid::new(4, 4, vec![0.5; 16]).unwrap();
        let t = TransformSpec::rotations(4).unwrap();
        let v = latent_variance_profile(&m, std::slice::from_ref(&x), &t, Execution::Sequential).unwrap();
        assert!(v.iter().all(|&d| d == 0.0));
        let s = latent_pca_spectrum(&m, &[x], &t, Execution::Sequential).unwrap();
        assert!(s.iter().all(|&d| d == 0.0));
    }

    #[test]
    fn disentangled_orbit_varies_two_dimensions() {
        let z = code(1, 12);
        let orbit: Vec<_> = (0..10)
            .map(|k| disentangled_operator(10, 12, k).unwrap().apply(&z).unwrap())
            .collect();
        let v = orbit_variance(&orbit);
        assert!(v[0] > 0.0 && v[1] > 0.0);
        assert!(v[2..].iter().all(|&d| d < 1e-30));
        let s = orbit_pca_spectrum(&orbit);
        assert!((s[0] + s[1] - 1.0).abs() < 1e-9);
        assert!(s[2..].iter().all(|&d| d < 1e-9));
    }

    #[test]
    fn singleton_orbit_spectrum_is_zero() {
        assert_eq!(orbit_pca_spectrum(&[code(2, 5)]), vec![0.0]);
    }

    #[test]
    fn spectrum_is_normalized_and_sorted() {
        let orbit: Vec<_> = (0..7).map(|s| code(s, 20)).collect();
        let s = orbit_pca_spectrum(&orbit);
        assert!((s.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        assert!(s.windows(2).all(|w| w[0] >= w[1]));
        assert!(s.iter().all(|&v| v >= 0.0));
    }
}

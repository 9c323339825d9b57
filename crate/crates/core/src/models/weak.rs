//! Phase-correlation scores and the score-weighted loss of the weakly
//! supervised model.

use ndarray::ArrayView2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::group::root_of_unity;
use crate::numkit::cmatrix::{adjoint_mul, mul, mul_adjoint, mul_real, mul_real_transpose};
use crate::numkit::{recon_loss, ComplexMatrix, Grads};
use crate::models::ModelParams;

/// Cross-power entries below this magnitude carry no phase.
pub const CPS_FLOOR: f64 = 1e-12;

fn normalized_cross_power(z1: &[Complex64], z2: &[Complex64]) -> Vec<(Complex64, f64)> {
    z1.iter()
        .zip(z2)
        .map(|(a, b)| {
            let u = a * b.conj();
            let r = u.norm();
            if r < CPS_FLOOR {
                (Complex64::new(0.0, 0.0), 0.0)
            } else {
                (u / r, r)
            }
        })
        .collect()
}

/// `score(κ) = (1/N)·Σ_n Re(c_n·ω^{κ·(n mod K_L)})` with `c` the normalized
/// cross-power spectrum of `z1` and `z2`.
pub fn infer_shift_scores(z1: &[Complex64], z2: &[Complex64], k_latent: usize) -> Result<Vec<f64>> {
    if z1.len() != z2.len() {
        return Err(Error::Dimension(format!(
            "codes of length {} and {} cannot be compared",
            z1.len(),
            z2.len()
        )));
    }
    if k_latent == 0 {
        return Err(Error::Validation("k_latent must be at least 1".into()));
    }
    Ok(scores_from_cps(&normalized_cross_power(z1, z2), k_latent))
}

fn scores_from_cps(cps: &[(Complex64, f64)], k_latent: usize) -> Vec<f64> {
    let n = cps.len().max(1) as f64;
    (0..k_latent)
        .map(|kappa| {
            cps.iter()
                .enumerate()
                .map(|(i, (c, _))| (c * root_of_unity(k_latent, kappa * (i % k_latent))).re)
                .sum::<f64>()
                / n
        })
        .collect()
}

/// Index of the largest score, earliest on ties.
pub fn argmax(scores: &[f64]) -> usize {
    scores
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |(bi, bv), (i, &v)| if v > bv { (i, v) } else { (bi, bv) })
        .0
}

pub fn softmax(scores: &[f64], temperature: f64) -> Vec<f64> {
    let m = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = scores.iter().map(|s| ((s - m) / temperature).exp()).collect();
    let z: f64 = e.iter().sum();
    e.into_iter().map(|v| v / z).collect()
}

/// Loss value and gradients for one weakly supervised batch.
pub struct WeakBatch {
    pub loss: f64,
    pub grads: Grads,
    /// Softmax weights per sample.
    pub alpha: Vec<Vec<f64>>,
}

/// `mean_b [ ‖D z1 − x1‖²/P + Σ_κ α_κ·‖D ψ_κ z1 − x2‖²/P ]` with
/// `α = softmax(scores(z1, z2)/τ)`, `z = E x`. The gradient includes the
/// dependence of `α` on both codes.
pub fn weak_loss(
    params: &ModelParams,
    x1: ArrayView2<f64>,
    x2: ArrayView2<f64>,
    k_latent: usize,
    temperature: f64,
    with_grads: bool,
) -> Result<WeakBatch> {
    params.validate()?;
    let (p, b) = x1.dim();
    if x2.dim() != (p, b) || p != params.pixel_dim() {
        return Err(Error::Dimension(format!(
            "weak batch {:?}/{:?} does not fit a model with {} pixels",
            x1.dim(),
            x2.dim(),
            params.pixel_dim()
        )));
    }
    let l = params.latent_dim();
    let kl = k_latent;
    let z1 = mul_real(&params.encoder, x1);
    let z2 = mul_real(&params.encoder, x2);
    let diag: Vec<Vec<Complex64>> = (0..kl)
        .map(|k| (0..l).map(|n| root_of_unity(kl, k * (n % kl))).collect())
        .collect();

    // every candidate transform of every sample, column κ·B + b
    let mut w = ComplexMatrix::zeros(l, kl * b);
    for (k, d) in diag.iter().enumerate() {
        for s in 0..b {
            let col: Vec<Complex64> = z1.column_vec(s).iter().zip(d).map(|(z, c)| z * c).collect();
            w.set_column(k * b + s, &col);
        }
    }
    let y1 = mul(&params.decoder, &z1);
    let yk = mul(&params.decoder, &w);

    let (plain, g_y1) = recon_loss(&y1, x1, 1.0)?;
    // per-sample, per-candidate reconstruction errors
    let pf = p as f64;
    let mut ell = vec![vec![0.0; kl]; b];
    for k in 0..kl {
        for s in 0..b {
            let c = k * b + s;
            let mut acc = 0.0;
            for i in 0..p {
                let r = yk.re()[[i, c]] - x2[[i, s]];
                let q = yk.im()[[i, c]];
                acc += r * r + q * q;
            }
            ell[s][k] = acc / pf;
        }
    }
    let cps: Vec<Vec<(Complex64, f64)>> = (0..b)
        .map(|s| normalized_cross_power(&z1.column_vec(s), &z2.column_vec(s)))
        .collect();
    let alpha: Vec<Vec<f64>> = cps
        .iter()
        .map(|c| softmax(&scores_from_cps(c, kl), temperature))
        .collect();
    let bf = b as f64;
    let weighted: f64 = (0..b)
        .map(|s| (0..kl).map(|k| alpha[s][k] * ell[s][k]).sum::<f64>())
        .sum::<f64>()
        / bf;
    let loss = plain + weighted;
    if !with_grads {
        return Ok(WeakBatch {
            loss,
            grads: Grads::zeros_like(params),
            alpha,
        });
    }

    // reconstruction path
    let mut g_yk = ComplexMatrix::zeros(p, kl * b);
    {
        let (gre, gim) = g_yk.parts_mut();
        for k in 0..kl {
            for s in 0..b {
                let c = k * b + s;
                let a = 2.0 * alpha[s][k] / (pf * bf);
                for i in 0..p {
                    gre[[i, c]] = a * (yk.re()[[i, c]] - x2[[i, s]]);
                    gim[[i, c]] = a * yk.im()[[i, c]];
                }
            }
        }
    }
    let mut g_dec = mul_adjoint(&g_y1, &z1);
    g_dec.add_assign(&mul_adjoint(&g_yk, &w));
    let mut g_z1 = adjoint_mul(&params.decoder, &g_y1);
    let g_w = adjoint_mul(&params.decoder, &g_yk);
    let mut g_z2 = ComplexMatrix::zeros(l, b);
    for s in 0..b {
        let mut gz1 = g_z1.column_vec(s);
        for (k, d) in diag.iter().enumerate() {
            for (n, g) in g_w.column_vec(k * b + s).iter().enumerate() {
                gz1[n] += d[n].conj() * g;
            }
        }
        // score path: L → s_κ → c_n → u_n → (z1, z2)
        let mean: f64 = (0..kl).map(|k| alpha[s][k] * ell[s][k]).sum();
        let ds: Vec<f64> = (0..kl)
            .map(|k| alpha[s][k] * (ell[s][k] - mean) / (temperature * bf))
            .collect();
        let a = z1.column_vec(s);
        let bcol = z2.column_vec(s);
        let mut gz2 = vec![Complex64::new(0.0, 0.0); l];
        for n in 0..l {
            let (c, r) = cps[s][n];
            if r == 0.0 {
                continue;
            }
            let g_c: Complex64 = (0..kl)
                .map(|k| ds[k] * diag[k][n].conj())
                .sum::<Complex64>()
                / l as f64;
            let g_u = (g_c - c * (c.conj() * g_c).re) / r;
            gz1[n] += g_u * bcol[n];
            gz2[n] += g_u.conj() * a[n];
        }
        g_z1.set_column(s, &gz1);
        g_z2.set_column(s, &gz2);
    }
    let mut g_enc = mul_real_transpose(&g_z1, x1);
    g_enc.add_assign(&mul_real_transpose(&g_z2, x2));
    Ok(WeakBatch {
        loss,
        grads: Grads {
            encoder: g_enc,
            decoder: g_dec,
            intermediates: params
                .intermediates
                .iter()
                .map(|m| ComplexMatrix::zeros(m.rows(), m.cols()))
                .collect(),
        },
        alpha,
    })
}

//! Dense complex matrices stored as separate real and imaginary planes.
//!
//! Splitting the planes lets every product run through the real `f64` GEMM
//! kernels of `ndarray`; a complex product costs four real products.

use ndarray::{Array1, Array2, ArrayView2, Zip};
use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    re: Array2<f64>,
    im: Array2<f64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            re: Array2::zeros((rows, cols)),
            im: Array2::zeros((rows, cols)),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            re: Array2::eye(n),
            im: Array2::zeros((n, n)),
        }
    }

    pub fn from_parts(re: Array2<f64>, im: Array2<f64>) -> Result<Self> {
        if re.dim() != im.dim() {
            return Err(Error::Dimension(format!(
                "real part {:?} and imaginary part {:?} differ in shape",
                re.dim(),
                im.dim()
            )));
        }
        Ok(Self { re, im })
    }

    pub fn from_real(re: Array2<f64>) -> Self {
        let im = Array2::zeros(re.dim());
        Self { re, im }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                let c = f(i, j);
                m.re[[i, j]] = c.re;
                m.im[[i, j]] = c.im;
            }
        }
        m
    }

    /// Builds a diagonal matrix.
    pub fn from_diagonal(diag: &[Complex64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, d) in diag.iter().enumerate() {
            m.re[[i, i]] = d.re;
            m.im[[i, i]] = d.im;
        }
        m
    }

    /// A column matrix holding `v`.
    pub fn column(v: &[Complex64]) -> Self {
        Self::from_fn(v.len(), 1, |i, _| v[i])
    }

    pub fn rows(&self) -> usize {
        self.re.nrows()
    }

    pub fn cols(&self) -> usize {
        self.re.ncols()
    }

    pub fn dim(&self) -> (usize, usize) {
        self.re.dim()
    }

    pub fn re(&self) -> &Array2<f64> {
        &self.re
    }

    pub fn im(&self) -> &Array2<f64> {
        &self.im
    }

    pub fn parts_mut(&mut self) -> (&mut Array2<f64>, &mut Array2<f64>) {
        (&mut self.re, &mut self.im)
    }

    pub fn into_parts(self) -> (Array2<f64>, Array2<f64>) {
        (self.re, self.im)
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        Complex64::new(self.re[[i, j]], self.im[[i, j]])
    }

    pub fn set(&mut self, i: usize, j: usize, c: Complex64) {
        self.re[[i, j]] = c.re;
        self.im[[i, j]] = c.im;
    }

    pub fn column_vec(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows()).map(|i| self.get(i, j)).collect()
    }

    pub fn set_column(&mut self, j: usize, v: &[Complex64]) {
        for (i, c) in v.iter().enumerate() {
            self.set(i, j, *c);
        }
    }

    pub fn conj_transpose(&self) -> Self {
        Self {
            re: self.re.t().to_owned(),
            im: self.im.t().mapv(|v| -v),
        }
    }

    pub fn trace(&self) -> Complex64 {
        let n = self.rows().min(self.cols());
        (0..n).map(|i| self.get(i, i)).sum()
    }

    /// Checked product `self · rhs`.
    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        check_inner(self.dim(), rhs.dim())?;
        Ok(mul(self, rhs))
    }

    /// Checked product `self · v`.
    pub fn matvec(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        if self.cols() != v.len() {
            return Err(Error::Dimension(format!(
                "matrix with {} columns applied to vector of length {}",
                self.cols(),
                v.len()
            )));
        }
        let vr = Array1::from_iter(v.iter().map(|c| c.re));
        let vi = Array1::from_iter(v.iter().map(|c| c.im));
        let re = self.re.dot(&vr) - self.im.dot(&vi);
        let im = self.re.dot(&vi) + self.im.dot(&vr);
        Ok(re
            .iter()
            .zip(im.iter())
            .map(|(&r, &i)| Complex64::new(r, i))
            .collect())
    }

    /// Checked product with a real right-hand side.
    pub fn matmul_real(&self, rhs: &Array2<f64>) -> Result<Self> {
        check_inner(self.dim(), rhs.dim())?;
        Ok(mul_real(self, rhs.view()))
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            re: &self.re * s,
            im: &self.im * s,
        }
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        if self.dim() != rhs.dim() {
            return Err(Error::Dimension(format!(
                "cannot add {:?} and {:?}",
                self.dim(),
                rhs.dim()
            )));
        }
        Ok(Self {
            re: &self.re + &rhs.re,
            im: &self.im + &rhs.im,
        })
    }

    pub(crate) fn add_assign(&mut self, rhs: &Self) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }

    /// Largest entry-wise modulus of `self − rhs`; infinite on shape mismatch.
    pub fn max_abs_diff(&self, rhs: &Self) -> f64 {
        if self.dim() != rhs.dim() {
            return f64::INFINITY;
        }
        let mut worst = 0.0f64;
        Zip::from(&self.re)
            .and(&self.im)
            .and(&rhs.re)
            .and(&rhs.im)
            .for_each(|&a, &b, &c, &d| worst = worst.max((a - c).hypot(b - d)));
        worst
    }

    /// Sum of squared moduli.
    pub fn norm_sqr(&self) -> f64 {
        self.re.iter().map(|v| v * v).sum::<f64>() + self.im.iter().map(|v| v * v).sum::<f64>()
    }

    pub fn is_finite(&self) -> bool {
        self.re.iter().chain(self.im.iter()).all(|v| v.is_finite())
    }
}

fn check_inner(lhs: (usize, usize), rhs: (usize, usize)) -> Result<()> {
    if lhs.1 != rhs.0 {
        return Err(Error::Dimension(format!(
            "cannot multiply {}x{} by {}x{}",
            lhs.0, lhs.1, rhs.0, rhs.1
        )));
    }
    Ok(())
}

/// `a · b`. Shapes must agree.
pub(crate) fn mul(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let re = a.re.dot(&b.re) - a.im.dot(&b.im);
    let im = a.re.dot(&b.im) + a.im.dot(&b.re);
    ComplexMatrix { re, im }
}

/// `a · x` for real `x`.
pub(crate) fn mul_real(a: &ComplexMatrix, x: ArrayView2<f64>) -> ComplexMatrix {
    ComplexMatrix {
        re: a.re.dot(&x),
        im: a.im.dot(&x),
    }
}

/// `aᴴ · b`.
pub(crate) fn adjoint_mul(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let at_re = a.re.t();
    let at_im = a.im.t();
    let re = at_re.dot(&b.re) + at_im.dot(&b.im);
    let im = at_re.dot(&b.im) - at_im.dot(&b.re);
    ComplexMatrix { re, im }
}

/// `a · bᴴ`.
pub(crate) fn mul_adjoint(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let bt_re = b.re.t();
    let bt_im = b.im.t();
    let re = a.re.dot(&bt_re) + a.im.dot(&bt_im);
    let im = a.im.dot(&bt_re) - a.re.dot(&bt_im);
    ComplexMatrix { re, im }
}

/// `a · xᵀ` for real `x`.
pub(crate) fn mul_real_transpose(a: &ComplexMatrix, x: ArrayView2<f64>) -> ComplexMatrix {
    ComplexMatrix {
        re: a.re.dot(&x.t()),
        im: a.im.dot(&x.t()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
        ComplexMatrix::from_fn(rows, cols, |_, _| {
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        })
    }

    fn naive(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix::from_fn(a.rows(), b.cols(), |i, j| {
            (0..a.cols()).map(|k| a.get(i, k) * b.get(k, j)).sum()
        })
    }

    #[test]
    fn identity_times_vector() {
        let v = vec![Complex64::new(1.0, 2.0), Complex64::new(-3.0, 0.5)];
        assert_eq!(ComplexMatrix::identity(2).matvec(&v).unwrap(), v);
    }

    #[test]
    fn matmul_agrees_with_naive_triple_loop() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = random(5, 7, &mut rng);
        let b = random(7, 3, &mut rng);
        assert!(a.matmul(&b).unwrap().max_abs_diff(&naive(&a, &b)) < 1e-12);
        assert!(adjoint_mul(&a.conj_transpose(), &b).max_abs_diff(&naive(&a, &b)) < 1e-12);
        let bh = b.conj_transpose();
        assert!(mul_adjoint(&a, &bh).max_abs_diff(&naive(&a, &b)) < 1e-12);
    }

    #[test]
    fn associativity_on_random_8x8() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let a = random(8, 8, &mut rng);
        let b = random(8, 8, &mut rng);
        let c = random(8, 8, &mut rng);
        let left = a.matmul(&b).unwrap().matmul(&c).unwrap();
        let right = a.matmul(&b.matmul(&c).unwrap()).unwrap();
        assert!(left.max_abs_diff(&right) < 1e-12);
    }

    #[test]
    fn associativity_on_random_64x64() {
        let mut rng = ChaCha8Rng::seed_from_u64(64);
        let a = random(64, 64, &mut rng).scaled(0.125);
        let b = random(64, 64, &mut rng).scaled(0.125);
        let c = random(64, 64, &mut rng).scaled(0.125);
        let left = a.matmul(&b).unwrap().matmul(&c).unwrap();
        let right = a.matmul(&b.matmul(&c).unwrap()).unwrap();
        assert!(left.max_abs_diff(&right) < 1e-12);
    }

    #[test]
    fn double_conj_transpose_is_identity_map() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random(4, 6, &mut rng);
        assert_eq!(a.conj_transpose().conj_transpose(), a);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let a = ComplexMatrix::zeros(2, 3);
        assert!(matches!(a.matmul(&a), Err(Error::Dimension(_))));
        assert!(a.matvec(&[Complex64::new(0.0, 0.0); 2]).is_err());
    }
}

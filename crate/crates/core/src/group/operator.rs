//! Latent operators: matrices representing group elements on latent codes.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::group::spec::GroupElement;
use crate::numkit::ComplexMatrix;

/// A dense square block placed on the diagonal at `offset`.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseBlock {
    pub offset: usize,
    pub matrix: ComplexMatrix,
}

/// Storage for a latent operator.
#[derive(Debug, Clone, PartialEq)]
pub enum OperatorPayload {
    /// `(ψ z)[i] = z[source[i]]`; one unit entry per row and column inside
    /// each `block × block` diagonal block.
    Permutation { block: usize, source: Vec<usize> },
    /// Unit-modulus diagonal entries.
    Diagonal(Vec<Complex64>),
    /// Block-diagonal dense matrix; coordinates outside every block are left
    /// unchanged. Blocks do not overlap.
    Dense(Vec<DenseBlock>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorForm {
    PermutationBlock,
    ComplexDiagonal,
    DenseComplex,
}

impl OperatorForm {
    pub fn code(self) -> u8 {
        match self {
            OperatorForm::PermutationBlock => 0,
            OperatorForm::ComplexDiagonal => 1,
            OperatorForm::DenseComplex => 2,
        }
    }

    pub fn from_code(code: u8) -> Option<Self> {
        match code {
            0 => Some(OperatorForm::PermutationBlock),
            1 => Some(OperatorForm::ComplexDiagonal),
            2 => Some(OperatorForm::DenseComplex),
            _ => None,
        }
    }
}

/// The matrix `ψ(g)` acting on latent codes of dimension `dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct LatentOperator {
    element: GroupElement,
    dim: usize,
    payload: OperatorPayload,
}

impl LatentOperator {
    pub fn new(element: GroupElement, dim: usize, payload: OperatorPayload) -> Result<Self> {
        match &payload {
            OperatorPayload::Permutation { block, source } => {
                if *block == 0 || !dim.is_multiple_of(*block) || source.len() != dim {
                    return Err(Error::Dimension(format!(
                        "permutation of length {} with block {block} does not tile dimension {dim}",
                        source.len()
                    )));
                }
                let mut seen = vec![false; dim];
                for (i, &s) in source.iter().enumerate() {
                    if s / block != i / block || std::mem::replace(&mut seen[s], true) {
                        return Err(Error::Validation(format!(
                            "row {i} breaks the block permutation structure"
                        )));
                    }
                }
            }
            OperatorPayload::Diagonal(d) => {
                if d.len() != dim {
                    return Err(Error::Dimension(format!(
                        "diagonal of length {} for dimension {dim}",
                        d.len()
                    )));
                }
                if let Some(i) = d.iter().position(|c| (c.norm() - 1.0).abs() > 1e-12) {
                    return Err(Error::Validation(format!(
                        "diagonal entry {i} has modulus {}",
                        d[i].norm()
                    )));
                }
            }
            OperatorPayload::Dense(blocks) => {
                let mut covered = vec![false; dim];
                for b in blocks {
                    let (r, c) = b.matrix.dim();
                    if r != c || b.offset + r > dim {
                        return Err(Error::Dimension(format!(
                            "block {r}x{c} at offset {} does not fit dimension {dim}",
                            b.offset
                        )));
                    }
                    for slot in &mut covered[b.offset..b.offset + r] {
                        if std::mem::replace(slot, true) {
                            return Err(Error::Validation("dense blocks overlap".into()));
                        }
                    }
                }
            }
        }
        Ok(Self {
            element,
            dim,
            payload,
        })
    }

    pub fn element(&self) -> &GroupElement {
        &self.element
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn payload(&self) -> &OperatorPayload {
        &self.payload
    }

    pub fn form(&self) -> OperatorForm {
        match self.payload {
            OperatorPayload::Permutation { .. } => OperatorForm::PermutationBlock,
            OperatorPayload::Diagonal(_) => OperatorForm::ComplexDiagonal,
            OperatorPayload::Dense(_) => OperatorForm::DenseComplex,
        }
    }

    pub fn trace(&self) -> Complex64 {
        match &self.payload {
            OperatorPayload::Permutation { source, .. } => {
                let fixed = source.iter().enumerate().filter(|(i, s)| i == *s).count();
                Complex64::new(fixed as f64, 0.0)
            }
            OperatorPayload::Diagonal(d) => d.iter().sum(),
            OperatorPayload::Dense(blocks) => {
                let covered: usize = blocks.iter().map(|b| b.matrix.rows()).sum();
                let identity_part = Complex64::new((self.dim - covered) as f64, 0.0);
                blocks.iter().map(|b| b.matrix.trace()).sum::<Complex64>() + identity_part
            }
        }
    }

    /// Full `dim × dim` matrix.
    pub fn to_dense(&self) -> ComplexMatrix {
        let one = Complex64::new(1.0, 0.0);
        match &self.payload {
            OperatorPayload::Permutation { source, .. } => {
                let mut m = ComplexMatrix::zeros(self.dim, self.dim);
                for (i, &s) in source.iter().enumerate() {
                    m.set(i, s, one);
                }
                m
            }
            OperatorPayload::Diagonal(d) => ComplexMatrix::from_diagonal(d),
            OperatorPayload::Dense(blocks) => {
                let mut m = ComplexMatrix::identity(self.dim);
                for b in blocks {
                    let n = b.matrix.rows();
                    for i in 0..n {
                        for j in 0..n {
                            m.set(b.offset + i, b.offset + j, b.matrix.get(i, j));
                        }
                    }
                }
                m
            }
        }
    }

    /// `ψ z`.
    pub fn apply(&self, z: &[Complex64]) -> Result<Vec<Complex64>> {
        self.check_len(z.len())?;
        let mut out = z.to_vec();
        self.apply_into(z, &mut out, false);
        Ok(out)
    }

    /// `ψᴴ z`.
    pub fn apply_adjoint(&self, z: &[Complex64]) -> Result<Vec<Complex64>> {
        self.check_len(z.len())?;
        let mut out = z.to_vec();
        self.apply_into(z, &mut out, true);
        Ok(out)
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.dim {
            return Err(Error::Dimension(format!(
                "operator of dimension {} applied to vector of length {len}",
                self.dim
            )));
        }
        Ok(())
    }

    /// Writes `ψ z` (or `ψᴴ z`) into `out`; `out` must start as a copy of `z`
    /// for dense payloads, since untouched coordinates pass through.
    pub(crate) fn apply_into(&self, z: &[Complex64], out: &mut [Complex64], adjoint: bool) {
        match &self.payload {
            OperatorPayload::Permutation { source, .. } => {
                if adjoint {
                    for (i, &s) in source.iter().enumerate() {
                        out[s] = z[i];
                    }
                } else {
                    for (o, &s) in out.iter_mut().zip(source) {
                        *o = z[s];
                    }
                }
            }
            OperatorPayload::Diagonal(d) => {
                for ((o, &x), &c) in out.iter_mut().zip(z).zip(d) {
                    *o = if adjoint { c.conj() * x } else { c * x };
                }
            }
            OperatorPayload::Dense(blocks) => {
                for b in blocks {
                    let n = b.matrix.rows();
                    for i in 0..n {
                        let mut acc = Complex64::new(0.0, 0.0);
                        for j in 0..n {
                            let m = if adjoint {
                                b.matrix.get(j, i).conj()
                            } else {
                                b.matrix.get(i, j)
                            };
                            acc += m * z[b.offset + j];
                        }
                        out[b.offset + i] = acc;
                    }
                }
            }
        }
    }
}

fn unit(angle: f64) -> Complex64 {
    Complex64::from_polar(1.0, angle)
}

/// `ω^p` with `ω = e^{2iπ/K}`, reducing `p` mod `K` first so the angle stays exact.
pub(crate) fn root_of_unity(k: usize, p: usize) -> Complex64 {
    let r = p % k;
    match (4 * r).checked_rem(k) {
        // exact values on the axes
        Some(0) => match 4 * r / k {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        },
        _ => unit(TAU * r as f64 / k as f64),
    }
}

fn check_index(k: usize, index: usize, what: &str) -> Result<()> {
    if k == 0 {
        return Err(Error::Validation(format!("{what} order must be positive")));
    }
    if index >= k {
        return Err(Error::Validation(format!(
            "{what} index {index} out of range for order {k}"
        )));
    }
    Ok(())
}

/// Block-diagonal permutation operator: `dim / k` copies of `M^shift`, where
/// `M` is the cyclic shift by one position of a `k`-vector.
pub fn shift_operator_perm(k: usize, dim: usize, shift: usize) -> Result<LatentOperator> {
    check_index(k, shift, "shift")?;
    if !dim.is_multiple_of(k) {
        return Err(Error::Dimension(format!(
            "permutation shift operator needs the order {k} to divide the latent dimension {dim}"
        )));
    }
    let source = (0..dim)
        .map(|i| {
            let base = i - i % k;
            base + (i % k + k - shift) % k
        })
        .collect();
    LatentOperator::new(
        GroupElement::new(vec![shift]),
        dim,
        OperatorPayload::Permutation { block: k, source },
    )
}

/// Diagonal operator with entries `ω^{shift·(n mod k)}`. When `k ∤ dim` the
/// last cycle is truncated.
pub fn shift_operator_complex(k: usize, dim: usize, shift: usize) -> Result<LatentOperator> {
    check_index(k, shift, "shift")?;
    if dim == 0 {
        return Err(Error::Dimension("latent dimension must be positive".into()));
    }
    let diag = (0..dim).map(|n| root_of_unity(k, shift * (n % k))).collect();
    LatentOperator::new(
        GroupElement::new(vec![shift]),
        dim,
        OperatorPayload::Diagonal(diag),
    )
}

/// Planar rotation by `2π·shift/k` on the first two latent coordinates,
/// identity elsewhere.
pub fn disentangled_operator(k: usize, dim: usize, shift: usize) -> Result<LatentOperator> {
    check_index(k, shift, "shift")?;
    if dim < 2 {
        return Err(Error::Dimension(format!(
            "disentangled operator needs at least 2 latent dimensions, got {dim}"
        )));
    }
    let w = root_of_unity(k, shift);
    let (c, s) = (w.re, w.im);
    let real = |v: f64| Complex64::new(v, 0.0);
    let rot = ComplexMatrix::from_fn(2, 2, |i, j| match (i, j) {
        (0, 0) | (1, 1) => real(c),
        (0, 1) => real(-s),
        _ => real(s),
    });
    LatentOperator::new(
        GroupElement::new(vec![shift]),
        dim,
        OperatorPayload::Dense(vec![DenseBlock {
            offset: 0,
            matrix: rot,
        }]),
    )
}

/// Diagonal operator for 2D translations: `dim / (k·k')` repetitions of the
/// `k·k'`-long cycle `ω₁^{k·i} ω₂^{k'·j}`, with `j` varying fastest.
pub fn tensor_product_operator(
    k_x: usize,
    k_y: usize,
    dim: usize,
    shift_x: usize,
    shift_y: usize,
) -> Result<LatentOperator> {
    check_index(k_x, shift_x, "x shift")?;
    check_index(k_y, shift_y, "y shift")?;
    let period = k_x * k_y;
    if !dim.is_multiple_of(period) {
        return Err(Error::Dimension(format!(
            "tensor-product operator needs {k_x}·{k_y} to divide the latent dimension {dim}"
        )));
    }
    let diag = (0..dim)
        .map(|n| {
            let (i, j) = ((n % period) / k_y, n % k_y);
            root_of_unity(k_x, shift_x * i) * root_of_unity(k_y, shift_y * j)
        })
        .collect();
    LatentOperator::new(
        GroupElement::new(vec![shift_x, shift_y]),
        dim,
        OperatorPayload::Diagonal(diag),
    )
}

//! `EQOP`: a single latent operator.
//!
//! Layout (little-endian): magic `EQOP`, `u16` version, `u8` form code,
//! `u32` dimension, `u32` count and `u32` group orders, `u32` count and
//! `u32` element indices, then the payload: block size and source indices
//! for permutations, `(re, im)` `f64` pairs for diagonals, and the full
//! matrix row-major as `(re, im)` pairs for dense operators.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::formats::bytes::{Decoder, Encoder};
use crate::group::{DenseBlock, GroupElement, LatentOperator, OperatorForm, OperatorPayload};

pub const OPERATOR_MAGIC: &[u8; 4] = b"EQOP";
pub const OPERATOR_VERSION: u16 = 1;

pub fn encode_operator(op: &LatentOperator, orders: &[usize]) -> Vec<u8> {
    let mut e = Encoder::default();
    e.magic(OPERATOR_MAGIC, OPERATOR_VERSION);
    e.u8(op.form().code());
    e.u32(op.dim());
    e.u32(orders.len());
    orders.iter().for_each(|&k| e.u32(k));
    let idx = op.element().indices();
    e.u32(idx.len());
    idx.iter().for_each(|&i| e.u32(i));
    match op.payload() {
        OperatorPayload::Permutation { block, source } => {
            e.u32(*block);
            source.iter().for_each(|&s| e.u32(s));
        }
        OperatorPayload::Diagonal(d) => d.iter().for_each(|c| {
            e.f64(c.re);
            e.f64(c.im);
        }),
        OperatorPayload::Dense(_) => {
            let m = op.to_dense();
            for i in 0..m.rows() {
                for j in 0..m.cols() {
                    let c = m.get(i, j);
                    e.f64(c.re);
                    e.f64(c.im);
                }
            }
        }
    }
    e.buf
}

/// Decodes an operator and the group orders stored with it.
pub fn decode_operator(bytes: &[u8]) -> Result<(LatentOperator, Vec<usize>)> {
    let mut d = Decoder::new(bytes);
    d.magic(OPERATOR_MAGIC, OPERATOR_VERSION)?;
    let at = d.offset();
    let form = OperatorForm::from_code(d.u8("form")?)
        .ok_or_else(|| Error::parse(at, "unknown operator form"))?;
    let dim = d.u32("dimension")?;
    let n_orders = d.u32("order count")?;
    let orders = (0..n_orders).map(|_| d.u32("order")).collect::<Result<Vec<_>>>()?;
    let arity = d.u32("element arity")?;
    let element = GroupElement::new((0..arity).map(|_| d.u32("element index")).collect::<Result<_>>()?);
    let complex = |d: &mut Decoder| -> Result<Complex64> { Ok(Complex64::new(d.f64("entry")?, d.f64("entry")?)) };
    let payload = match form {
        OperatorForm::PermutationBlock => {
            let block = d.u32("block size")?;
            let source = (0..dim).map(|_| d.u32("source index")).collect::<Result<_>>()?;
            OperatorPayload::Permutation { block, source }
        }
        OperatorForm::ComplexDiagonal => {
            OperatorPayload::Diagonal((0..dim).map(|_| complex(&mut d)).collect::<Result<_>>()?)
        }
        OperatorForm::DenseComplex => {
            let mut m = crate::numkit::ComplexMatrix::zeros(dim, dim);
            for i in 0..dim {
                for j in 0..dim {
                    m.set(i, j, complex(&mut d)?);
                }
            }
            OperatorPayload::Dense(vec![DenseBlock { offset: 0, matrix: m }])
        }
    };
    d.finish()?;
    let op = LatentOperator::new(element, dim, payload).map_err(|e| Error::parse(0, e.to_string()))?;
    Ok((op, orders))
}

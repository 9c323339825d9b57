use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::induced::induced_rep_operator;
use crate::group::operator::{
    disentangled_operator, shift_operator_complex, shift_operator_perm, tensor_product_operator,
    LatentOperator,
};
use crate::group::spec::{GroupElement, GroupSpec};

/// A named operator construction together with the group it represents.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum OperatorFamily {
    PermutationShift { order: usize },
    ComplexShift { order: usize },
    Disentangled { order: usize },
    TensorProduct { order_x: usize, order_y: usize },
    Induced { group: GroupSpec },
}

impl OperatorFamily {
    pub fn name(&self) -> &'static str {
        match self {
            OperatorFamily::PermutationShift { .. } => "permutation-shift",
            OperatorFamily::ComplexShift { .. } => "complex-shift",
            OperatorFamily::Disentangled { .. } => "disentangled",
            OperatorFamily::TensorProduct { .. } => "tensor-product",
            OperatorFamily::Induced { .. } => "induced",
        }
    }

    pub fn group(&self) -> Result<GroupSpec> {
        match self {
            OperatorFamily::PermutationShift { order }
            | OperatorFamily::ComplexShift { order }
            | OperatorFamily::Disentangled { order } => GroupSpec::cyclic(*order),
            OperatorFamily::TensorProduct { order_x, order_y } => {
                GroupSpec::direct(vec![*order_x, *order_y])
            }
            OperatorFamily::Induced { group } => Ok(group.clone()),
        }
    }

    /// Checks that `dim` is a legal latent dimension for this family.
    pub fn check_dim(&self, dim: usize) -> Result<()> {
        self.build(&self.group()?.identity(), dim).map(|_| ())
    }

    pub fn build(&self, g: &GroupElement, dim: usize) -> Result<LatentOperator> {
        let idx = g.indices();
        let want = match self {
            OperatorFamily::TensorProduct { .. } => 2,
            OperatorFamily::Induced { .. } => 3,
            _ => 1,
        };
        if idx.len() != want {
            return Err(Error::Validation(format!(
                "{} operators take {want} indices, got element {g}",
                self.name()
            )));
        }
        match self {
            OperatorFamily::PermutationShift { order } => shift_operator_perm(*order, dim, idx[0]),
            OperatorFamily::ComplexShift { order } => shift_operator_complex(*order, dim, idx[0]),
            OperatorFamily::Disentangled { order } => disentangled_operator(*order, dim, idx[0]),
            OperatorFamily::TensorProduct { order_x, order_y } => {
                tensor_product_operator(*order_x, *order_y, dim, idx[0], idx[1])
            }
            OperatorFamily::Induced { group } => induced_rep_operator(group, g, dim),
        }
    }

    /// Operators for every group element, in element order.
    pub fn build_all(&self, dim: usize) -> Result<Vec<LatentOperator>> {
        self.group()?
            .elements()
            .iter()
            .map(|g| self.build(g, dim))
            .collect()
    }
}

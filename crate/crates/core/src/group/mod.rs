//! Finite groups, latent operators that represent them, and the
//! character-theoretic checks that certify those operators.

mod character;
mod factor;
mod family;
mod induced;
mod operator;
mod orbit;
mod spec;

pub use character::{character_table, verify_isomorphic, CharacterEntry, CharacterTable, IsomorphismReport};
pub use factor::{analytic_l1_translations, translation_reorder};
pub use family::OperatorFamily;
pub use induced::{
    character_orbits, degree_sum, fourier_conjugation_matrices, induced_rep_operator,
    orbit_representatives, rotation_permutation, CharacterIndex,
};
pub use operator::{
    disentangled_operator, shift_operator_complex, shift_operator_perm, tensor_product_operator,
    DenseBlock, LatentOperator, OperatorForm, OperatorPayload,
};
pub use orbit::orbit;
pub(crate) use operator::root_of_unity;
pub use spec::{GroupElement, GroupKind, GroupSpec, TranslationAction};

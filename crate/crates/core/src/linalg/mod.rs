//! Dense complex linear algebra: the matrix type, decompositions, tensor
//! products and partial traces, and seeded random sampling.

mod decomp;
mod matrix;
pub mod random;
mod subspace;
mod tensor;

pub use decomp::{eigh, operator_norm, psd_sqrt, pseudo_inverse, svd, HermitianEigen, Svd};
pub use matrix::ComplexMatrix;
pub use random::{random_ket, random_unitary};
pub use subspace::SubspaceIsometry;
pub use tensor::{
    factor_as_tensor, partial_trace, reshuffle, sandwich_system_legs, tensor_all, tensor_product, FactoredPair,
};

pub(crate) use tensor::phase_of;

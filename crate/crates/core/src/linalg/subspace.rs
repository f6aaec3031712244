use crate::error::{Error, Result};
use crate::linalg::{tensor_product, ComplexMatrix};
use crate::scalar::Real;

/// Orthonormal basis of a subspace, stored as the columns of `V`
/// (`ambient_dim x sub_dim`). The projector onto the subspace is `V V†`.
#[derive(Clone, Debug, PartialEq)]
pub struct SubspaceIsometry<T: Real> {
    columns: ComplexMatrix<T>,
}

impl<T: Real> SubspaceIsometry<T> {
    /// Validates `V†V = I` within `tol`.
    pub fn new(columns: ComplexMatrix<T>, tol: T) -> Result<Self> {
        if columns.cols() > columns.rows() {
            return Err(Error::DegenerateSubspace(format!(
                "{} basis vectors cannot be orthonormal in dimension {}",
                columns.cols(),
                columns.rows()
            )));
        }
        if !columns.has_orthonormal_columns(tol) {
            return Err(Error::InvalidInput("subspace basis columns are not orthonormal".into()));
        }
        Ok(Self { columns })
    }

    pub(crate) fn new_unchecked(columns: ComplexMatrix<T>) -> Self {
        Self { columns }
    }

    pub fn full(dim: usize) -> Self {
        Self {
            columns: ComplexMatrix::identity(dim),
        }
    }

    /// Span of the listed computational basis vectors, in the given order.
    pub fn from_basis_indices(ambient_dim: usize, indices: &[usize]) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::DegenerateSubspace("empty index set".into()));
        }
        let mut seen = vec![false; ambient_dim];
        for &i in indices {
            if i >= ambient_dim || seen[i] {
                return Err(Error::InvalidInput(format!(
                    "basis indices {indices:?} invalid for dimension {ambient_dim}"
                )));
            }
            seen[i] = true;
        }
        let cols: Vec<_> = indices
            .iter()
            .map(|&i| ComplexMatrix::basis_ket(ambient_dim, i))
            .collect();
        Ok(Self {
            columns: ComplexMatrix::from_columns(&cols)?,
        })
    }

    pub fn ambient_dim(&self) -> usize {
        self.columns.rows()
    }

    pub fn sub_dim(&self) -> usize {
        self.columns.cols()
    }

    pub fn columns(&self) -> &ComplexMatrix<T> {
        &self.columns
    }

    pub fn projector(&self) -> ComplexMatrix<T> {
        &self.columns * &self.columns.adjoint()
    }

    /// Embeds subspace coordinates into the ambient space: `V x`.
    pub fn embed(&self, x: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
        self.columns.checked_mul(x)
    }

    /// Coordinates of an ambient vector or operator: `V† x`.
    pub fn coordinates(&self, x: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
        self.columns.adjoint().checked_mul(x)
    }

    /// The subspace `C^a ⊗ S`, with the ancilla factor first.
    pub fn with_ancilla(&self, ancilla_dim: usize) -> Self {
        Self {
            columns: tensor_product(&ComplexMatrix::identity(ancilla_dim), &self.columns),
        }
    }
}

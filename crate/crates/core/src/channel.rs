//! Quantum operations in operator-sum form.
//!
//! Trace-decreasing operations are ordinary values here: the physicality
//! check reports trace preservation as a separate flag. Elements are kept
//! exactly as supplied; nothing is merged or canonicalised on construction.

use crate::error::{Error, Result};
use crate::linalg::{eigh, psd_sqrt, tensor_product, ComplexMatrix};
use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq)]
pub struct KrausChannel<T: Real> {
    in_dim: usize,
    out_dim: usize,
    elements: Vec<ComplexMatrix<T>>,
}

/// Outcome of [`KrausChannel::is_physical`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhysicalityReport<T> {
    pub physical: bool,
    pub trace_preserving: bool,
    /// Largest eigenvalue of `Σ Ωₖ†Ωₖ`.
    pub max_eigenvalue: T,
}

/// The POVM elements `Gₖ = Ωₖ†Ωₖ` of a channel.
#[derive(Clone, Debug)]
pub struct PovmElementSet<T: Real> {
    pub elements: Vec<ComplexMatrix<T>>,
}

impl<T: Real> PovmElementSet<T> {
    pub fn sum(&self) -> ComplexMatrix<T> {
        let n = self.elements[0].rows();
        self.elements.iter().fold(ComplexMatrix::zeros(n, n), |acc, g| &acc + g)
    }
}

impl<T: Real> KrausChannel<T> {
    pub fn new(elements: Vec<ComplexMatrix<T>>) -> Result<Self> {
        let first = elements
            .first()
            .ok_or_else(|| Error::InvalidInput("a channel needs at least one Kraus element".into()))?;
        let (out_dim, in_dim) = first.shape();
        for (k, e) in elements.iter().enumerate() {
            if e.shape() != (out_dim, in_dim) {
                return Err(Error::dims(
                    "Kraus element shape",
                    format!("{out_dim}x{in_dim}"),
                    format!("element {k} is {}x{}", e.rows(), e.cols()),
                ));
            }
        }
        Ok(Self {
            in_dim,
            out_dim,
            elements,
        })
    }

    pub fn identity(dim: usize) -> Self {
        Self::unitary(ComplexMatrix::identity(dim))
    }

    /// Single-element channel `{op}`.
    pub fn unitary(op: ComplexMatrix<T>) -> Self {
        Self {
            in_dim: op.cols(),
            out_dim: op.rows(),
            elements: vec![op],
        }
    }

    /// `ρ ↦ Tr(ρ) I/d`, realised by the `d²` elements `|i⟩⟨j|/√d`.
    pub fn completely_depolarizing(dim: usize) -> Self {
        let w = T::of_usize(dim).sqrt().recip();
        let elements = (0..dim)
            .flat_map(|i| (0..dim).map(move |j| (i, j)))
            .map(|(i, j)| {
                ComplexMatrix::basis_ket(dim, i)
                    .outer(&ComplexMatrix::basis_ket(dim, j))
                    .scale_real(w)
            })
            .collect();
        Self {
            in_dim: dim,
            out_dim: dim,
            elements,
        }
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    pub fn elements(&self) -> &[ComplexMatrix<T>] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// `Σₖ Ωₖ ρ Ωₖ†`.
    pub fn apply(&self, rho: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
        if rho.shape() != (self.in_dim, self.in_dim) {
            return Err(Error::dims(
                "channel input",
                format!("{0}x{0}", self.in_dim),
                format!("{}x{}", rho.rows(), rho.cols()),
            ));
        }
        let mut out = ComplexMatrix::zeros(self.out_dim, self.out_dim);
        for e in &self.elements {
            out = &out + &(&(e * rho) * &e.adjoint());
        }
        Ok(out)
    }

    /// `Σₖ Ωₖ†Ωₖ`.
    pub fn effect_sum(&self) -> ComplexMatrix<T> {
        self.povm().sum()
    }

    pub fn is_physical(&self, tol: T) -> Result<PhysicalityReport<T>> {
        let sum = self.effect_sum();
        let max_eigenvalue = eigh(&sum)?.max_value();
        Ok(PhysicalityReport {
            physical: max_eigenvalue <= T::one() + tol,
            trace_preserving: sum.distance(&ComplexMatrix::identity(self.in_dim)) <= tol,
            max_eigenvalue,
        })
    }

    pub fn povm(&self) -> PovmElementSet<T> {
        PovmElementSet {
            elements: self.elements.iter().map(|e| &e.adjoint() * e).collect(),
        }
    }

    /// Unnormalised Choi state `(I ⊗ E)(|Φ_d⟩⟨Φ_d|)` with `d = in_dim`,
    /// reference factor first. Its trace is `Tr(Σ Ωₖ†Ωₖ)/d`.
    pub fn choi_state(&self) -> ComplexMatrix<T> {
        let d = self.in_dim;
        let phi = crate::entanglement::ues::<T>(d);
        let extended = self.extend_by_identity(d);
        extended
            .apply(&phi.projector())
            .expect("dimensions fixed by construction")
    }

    /// `second ∘ self`: apply `self` first. Elements are the pairwise
    /// products `Bⱼ Aᵢ`, ordered with `i` slowest.
    pub fn then(&self, second: &KrausChannel<T>) -> Result<KrausChannel<T>> {
        compose(self, second)
    }

    /// `I_a ⊗ Ωₖ` for every element, ancilla factor first.
    pub fn extend_by_identity(&self, ancilla_dim: usize) -> KrausChannel<T> {
        if ancilla_dim == 1 {
            return self.clone();
        }
        let id = ComplexMatrix::identity(ancilla_dim);
        KrausChannel {
            in_dim: self.in_dim * ancilla_dim,
            out_dim: self.out_dim * ancilla_dim,
            elements: self.elements.iter().map(|e| tensor_product(&id, e)).collect(),
        }
    }

    /// The two-outcome instrument `{K, √(I − K†K)}` for a filter `K`.
    pub fn filter_with_failure(k: ComplexMatrix<T>) -> Result<Self> {
        if !k.is_square() {
            return Err(Error::dims(
                "filter",
                "square matrix",
                format!("{}x{}", k.rows(), k.cols()),
            ));
        }
        let n = k.rows();
        let rest = &ComplexMatrix::identity(n) - &(&k.adjoint() * &k);
        let fail = psd_sqrt(&rest)?;
        Self::new(vec![k, fail])
    }
}

pub fn compose<T: Real>(first: &KrausChannel<T>, second: &KrausChannel<T>) -> Result<KrausChannel<T>> {
    if first.out_dim != second.in_dim {
        return Err(Error::dims("channel composition", first.out_dim, second.in_dim));
    }
    let mut elements = Vec::with_capacity(first.len() * second.len());
    for a in &first.elements {
        for b in &second.elements {
            elements.push(b * a);
        }
    }
    Ok(KrausChannel {
        in_dim: first.in_dim,
        out_dim: second.out_dim,
        elements,
    })
}

//! Certification of unambiguous unitary operations and their uses in
//! teleportation, error correction and dense coding.
//!
//! Everything is generic over the real scalar ([`Real`], implemented for
//! `f32` and `f64`); the aliases at the crate root fix it to `f64`.
//!
//! Composite spaces put the first factor in the slowest-varying index:
//! row `i` of `A ⊗ B` is `a_row · B.rows() + b_row`. Operators with
//! environment legs are laid out as `system ⊗ environment`.

pub mod channel;
pub mod densecode;
pub mod entanglement;
pub mod error;
pub mod io;
pub mod linalg;
pub mod qec;
pub mod scalar;
pub mod unambiguous;

pub use channel::{compose, KrausChannel, PhysicalityReport, PovmElementSet};
pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, SubspaceIsometry};
pub use scalar::{Real, C};
pub use unambiguous::{LegLayout, UumCertificate, UuqcCertificate};

pub type Complex = C<f64>;
pub type Matrix = ComplexMatrix<f64>;
pub type Subspace = SubspaceIsometry<f64>;
pub type Channel = KrausChannel<f64>;
pub type Layout = LegLayout<f64>;
pub type Code = qec::CodeSpec<f64>;
pub type Shared = densecode::SharedState<f64>;

/// Default absolute tolerance on Frobenius norms.
pub const DEFAULT_TOL: f64 = 1e-9;

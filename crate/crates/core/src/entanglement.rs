//! Schmidt forms, uniformly entangled states and unambiguous teleportation.
//!
//! Bipartite kets use the usual composite index `i·dim_b + j`. A channel
//! that succeeds unambiguously with probability `q` turns one half of
//! `Φ_d` into a rank-`d` uniformly entangled state with the same
//! probability, and teleportation over `Φ_d` is such a channel with `q = 1`,
//! so the best probability for teleporting a `d`-level system over a pure
//! shared state is the best probability for converting it into `Φ_d`.

use crate::channel::KrausChannel;
use crate::densecode::weyl_operators;
use crate::error::{Error, Result};
use crate::linalg::{eigh, partial_trace, svd, tensor_product, ComplexMatrix, SubspaceIsometry};
use crate::scalar::Real;
use crate::unambiguous::{certify_uuqc, describe_failure, dominant_phase, LegLayout, UuqcCertificate};

#[derive(Clone, Debug)]
pub struct SchmidtForm<T: Real> {
    /// Descending, nonnegative.
    pub coefficients: Vec<T>,
    pub left_basis: SubspaceIsometry<T>,
    pub right_basis: SubspaceIsometry<T>,
    /// Number of coefficients above the tolerance used to build the form.
    pub rank: usize,
}

impl<T: Real> SchmidtForm<T> {
    /// `Σᵢ λᵢ |aᵢ⟩|bᵢ⟩`.
    pub fn reconstruct(&self) -> ComplexMatrix<T> {
        let da = self.left_basis.ambient_dim();
        let db = self.right_basis.ambient_dim();
        let mut out = ComplexMatrix::zeros(da * db, 1);
        for (i, &l) in self.coefficients.iter().enumerate() {
            let term = tensor_product(
                &self.left_basis.columns().column(i),
                &self.right_basis.columns().column(i),
            );
            out = &out + &term.scale_real(l);
        }
        out
    }

    pub fn squared_norm(&self) -> T {
        self.coefficients.iter().map(|&l| l * l).sum()
    }
}

pub fn schmidt<T: Real>(psi: &ComplexMatrix<T>, dim_a: usize, dim_b: usize, tol: T) -> Result<SchmidtForm<T>> {
    if psi.shape() != (dim_a * dim_b, 1) {
        return Err(Error::dims(
            "bipartite ket",
            format!("{}x1", dim_a * dim_b),
            format!("{}x{}", psi.rows(), psi.cols()),
        ));
    }
    let coeffs = psi.reshape(dim_a, dim_b)?;
    let s = svd(&coeffs)?;
    let rank = s.rank(tol);
    Ok(SchmidtForm {
        rank,
        left_basis: SubspaceIsometry::new_unchecked(s.left),
        right_basis: SubspaceIsometry::new_unchecked(s.right.conj()),
        coefficients: s.values,
    })
}

/// `|Φ_d⟩ = Σᵢ |ii⟩/√d`.
pub fn ues<T: Real>(d: usize) -> ComplexMatrix<T> {
    let w = T::of_usize(d).sqrt().recip();
    let mut amps = vec![T::zero(); d * d];
    for i in 0..d {
        amps[i * d + i] = w;
    }
    ComplexMatrix::ket_real(&amps)
}

/// Optimal probability of obtaining `Φ_d` from the given pure state by
/// local operations: `min_l d·(Σ_{i≥l} λᵢ²)/(d − l + 1)`, zero below rank `d`.
pub fn conversion_probability<T: Real>(sf: &SchmidtForm<T>, d: usize) -> T {
    if sf.rank < d {
        return T::zero();
    }
    let squares: Vec<T> = sf.coefficients.iter().map(|&l| l * l).collect();
    conversion_probability_from_squares(&squares, d)
}

/// Same as [`conversion_probability`], from squared Schmidt coefficients in
/// any order and any normalisation. Zero entries count against the rank.
pub fn conversion_probability_from_squares<T: Real>(squares: &[T], d: usize) -> T {
    if d == 0 {
        return T::one();
    }
    let mut p: Vec<T> = squares.iter().map(|&x| x.max(T::zero())).collect();
    p.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    let total: T = p.iter().copied().sum();
    if total <= T::zero() || p.len() < d {
        return T::zero();
    }
    let dim = T::of_usize(d);
    let mut best = T::one();
    for l in 1..=d {
        let tail: T = p[l - 1..].iter().copied().sum::<T>() / total;
        let value = dim * tail / T::of_usize(d - l + 1);
        best = best.min(value);
    }
    best.max(T::zero())
}

/// `|⟨a|b⟩|² / (‖a‖²‖b‖²)`.
pub fn ket_fidelity<T: Real>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> T {
    let overlap = a.inner(b).norm_sqr();
    overlap / (a.frobenius_norm_sqr() * b.frobenius_norm_sqr())
}

/// Result of sending one half of `Φ_d` through an unambiguous channel.
#[derive(Clone, Debug)]
pub struct UesConversion<T: Real> {
    /// Trace of the heralded, subspace-projected output.
    pub probability: T,
    /// Normalised output in `d x d` subspace coordinates (reference first).
    pub output: ComplexMatrix<T>,
    /// `weight − λ_max` of the projected output; zero for a pure result.
    pub purity_defect: T,
    pub certificate: UuqcCertificate<T>,
}

/// Feeds `(I ⊗ V₁)|Φ_d⟩ ⊗ I_{E₁}` to `I_d ⊗ E`, traces the output
/// environment and projects the system leg onto the output subspace.
pub fn uuqc_to_ues<T: Real>(ch: &KrausChannel<T>, layout: &LegLayout<T>, tol: T) -> Result<UesConversion<T>> {
    let certificate = certify_uuqc(ch, layout, tol)?;
    if !certificate.is_uuqc {
        return Err(Error::NotUuqc(describe_failure(&certificate)));
    }
    let d = layout.sub_dim();
    let id_d = ComplexMatrix::identity(d);
    let phi = &tensor_product(&id_d, layout.input().columns()) * &ues::<T>(d);
    let input = tensor_product(&phi.projector(), &ComplexMatrix::identity(layout.env_in()));
    let out = ch.extend_by_identity(d).apply(&input)?;
    let n2 = layout.output().ambient_dim();
    let reduced = partial_trace(&out, &[d, n2, layout.env_out()], &[0, 1])?;
    let proj = tensor_product(&id_d, layout.output().columns());
    let sigma = &(&proj.adjoint() * &reduced) * &proj;

    let probability = sigma.trace().re;
    let eig = eigh(&sigma)?;
    let top = eig.vectors.column(d * d - 1);
    let output = top.scale(dominant_phase(&top).conj());
    Ok(UesConversion {
        probability,
        purity_defect: probability - eig.max_value(),
        output,
        certificate,
    })
}

/// The standard `d`-level teleportation scheme over a held `Φ_d`.
#[derive(Clone, Debug)]
pub struct TeleportationScheme<T: Real> {
    /// Kraus elements `W_ab (⟨B_ab|₁₃ ⊗ I₂)(I₁ ⊗ |Φ_d⟩₃₂)`, index `a·d + b`.
    pub channel: KrausChannel<T>,
    /// Alice's measurement effects `|B_ab⟩⟨B_ab|` on particles 1 and 3.
    pub bell_effects: Vec<ComplexMatrix<T>>,
    /// Bob's corrections `W_ab = X^a Z^b`.
    pub corrections: Vec<ComplexMatrix<T>>,
}

/// Builds teleportation of a `d`-level particle 1 to particle 2 using
/// `|Φ_d⟩₃₂`; Alice measures 1 and 3 in the basis `(W_ab ⊗ I)|Φ_d⟩`.
pub fn ues_to_uuqc<T: Real>(d: usize) -> Result<TeleportationScheme<T>> {
    if d < 2 {
        return Err(Error::InvalidInput(format!("teleportation needs d >= 2, got {d}")));
    }
    let id = ComplexMatrix::identity(d);
    let phi = ues::<T>(d);
    // particle order (1, 3, 2) after attaching the resource
    let attach = tensor_product(&id, &phi);
    let corrections = weyl_operators::<T>(d);
    let mut elements = Vec::with_capacity(d * d);
    let mut bell_effects = Vec::with_capacity(d * d);
    for w in &corrections {
        let bell = &tensor_product(w, &id) * &phi;
        let measure = tensor_product(&bell.adjoint(), &id);
        elements.push(w * &(&measure * &attach));
        bell_effects.push(bell.projector());
    }
    Ok(TeleportationScheme {
        channel: KrausChannel::new(elements)?,
        bell_effects,
        corrections,
    })
}

#[derive(Clone, Debug)]
pub struct TeleportCertificate<T: Real> {
    pub nonzero: bool,
    pub probability: T,
    pub rank_d: usize,
    /// `(V₃, V₂)` on the sender and receiver factors.
    pub witness_subspaces: Option<(SubspaceIsometry<T>, SubspaceIsometry<T>)>,
}

impl<T: Real> TeleportCertificate<T> {
    fn zero(d: usize) -> Self {
        Self {
            nonzero: false,
            probability: T::zero(),
            rank_d: d,
            witness_subspaces: None,
        }
    }
}

/// Best probability of teleporting a `d`-level system over a pure shared
/// state split as `dim_a x dim_b`.
pub fn teleport_probability_pure<T: Real>(
    shared: &ComplexMatrix<T>,
    dim_a: usize,
    dim_b: usize,
    d: usize,
    tol: T,
) -> Result<TeleportCertificate<T>> {
    let sf = schmidt(shared, dim_a, dim_b, tol)?;
    let probability = conversion_probability(&sf, d);
    Ok(TeleportCertificate {
        nonzero: probability > tol,
        probability,
        rank_d: d,
        witness_subspaces: None,
    })
}

/// Projects a shared mixed state onto `V₃ ⊗ V₂` and checks for a pure
/// result of Schmidt rank `d`. The reported probability is the weight of
/// the projection times the conversion probability of the pure result: an
/// achievable value, not the optimum.
pub fn check_mixed_nonzero<T: Real>(
    rho: &ComplexMatrix<T>,
    dims: (usize, usize),
    d: usize,
    v3: &SubspaceIsometry<T>,
    v2: &SubspaceIsometry<T>,
    tol: T,
) -> Result<TeleportCertificate<T>> {
    let (da, db) = dims;
    if rho.shape() != (da * db, da * db) {
        return Err(Error::dims(
            "shared density matrix",
            da * db,
            format!("{}x{}", rho.rows(), rho.cols()),
        ));
    }
    if v3.ambient_dim() != da || v2.ambient_dim() != db {
        return Err(Error::dims(
            "subspace ambient dimensions",
            format!("({da}, {db})"),
            format!("({}, {})", v3.ambient_dim(), v2.ambient_dim()),
        ));
    }
    if v3.sub_dim() != d || v2.sub_dim() != d {
        return Err(Error::DegenerateSubspace(format!(
            "isometries must have rank {d}, got {} and {}",
            v3.sub_dim(),
            v2.sub_dim()
        )));
    }
    let v = tensor_product(v3.columns(), v2.columns());
    let projected = &(&v.adjoint() * rho) * &v;
    let weight = projected.trace().re;
    if weight <= tol {
        return Ok(TeleportCertificate::zero(d));
    }
    let eig = eigh(&projected)?;
    if eig.max_value() < weight - tol {
        return Ok(TeleportCertificate::zero(d));
    }
    let top = eig.vectors.column(d * d - 1);
    let sf = schmidt(&top, d, d, tol)?;
    if sf.rank < d {
        return Ok(TeleportCertificate::zero(d));
    }
    Ok(TeleportCertificate {
        nonzero: true,
        probability: weight * conversion_probability(&sf, d),
        rank_d: d,
        witness_subspaces: Some((v3.clone(), v2.clone())),
    })
}

/// Largest factor dimension accepted by [`sweep_mixed_nonzero`].
pub const SWEEP_MAX_DIM: usize = 4;

/// Tries every pair of computational-basis subspaces of dimension `d`, in
/// lexicographic order of the index sets, and returns the first witness.
pub fn sweep_mixed_nonzero<T: Real>(
    rho: &ComplexMatrix<T>,
    dims: (usize, usize),
    d: usize,
    tol: T,
) -> Result<TeleportCertificate<T>> {
    let (da, db) = dims;
    if da > SWEEP_MAX_DIM || db > SWEEP_MAX_DIM {
        return Err(Error::InvalidInput(format!(
            "exhaustive sweep limited to factor dimensions <= {SWEEP_MAX_DIM}, got ({da}, {db})"
        )));
    }
    if d == 0 || d > da || d > db {
        return Ok(TeleportCertificate::zero(d));
    }
    for a in combinations(da, d) {
        let v3 = SubspaceIsometry::from_basis_indices(da, &a)?;
        for b in combinations(db, d) {
            let v2 = SubspaceIsometry::from_basis_indices(db, &b)?;
            let cert = check_mixed_nonzero(rho, dims, d, &v3, &v2, tol)?;
            if cert.nonzero {
                return Ok(cert);
            }
        }
    }
    Ok(TeleportCertificate::zero(d))
}

/// All `k`-subsets of `0..n` in lexicographic order.
fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current: Vec<usize> = (0..k).collect();
    if k > n {
        return out;
    }
    loop {
        out.push(current.clone());
        let Some(i) = (0..k).rev().find(|&i| current[i] < n - k + i) else {
            return out;
        };
        current[i] += 1;
        for j in i + 1..k {
            current[j] = current[j - 1] + 1;
        }
    }
}

//! Error correction viewed as an unambiguous unitary channel.
//!
//! A noise channel followed by recovery corrects a code exactly when the
//! combined operation acts on the code space as the identity with
//! probability one. The Knill–Laflamme condition `P Eⱼ†Eᵢ P = hⱼᵢ P` is
//! checked directly; recovery is built from the diagonalised error set.
//! When certainty is out of reach, the best heralded correction
//! probability equals the best probability of distilling `Φ_d` from the
//! noisy Choi state by operations on the physical half alone.

use crate::channel::{compose, KrausChannel};
use crate::entanglement::{conversion_probability, schmidt};
use crate::error::{Error, Result};
use crate::linalg::random::{random_matrix_with, rng_from_seed};
use crate::linalg::{eigh, operator_norm, tensor_product, ComplexMatrix, SubspaceIsometry};
use crate::scalar::Real;
use crate::unambiguous::{certify_uuqc, LegLayout, UuqcCertificate};

/// Grid points per diagonal filter entry in the mixed-state search.
const FILTER_GRID_STEPS: usize = 21;
/// The grid is only enumerated up to this many physical levels.
pub const FILTER_GRID_MAX_DIM: usize = 3;
const RANDOM_FILTERS: usize = 200;

#[derive(Clone, Debug, PartialEq)]
pub struct CodeSpec<T: Real> {
    encoder: ComplexMatrix<T>,
}

impl<T: Real> CodeSpec<T> {
    /// `encoder` is an `n x d` isometry `C`.
    pub fn new(encoder: ComplexMatrix<T>, tol: T) -> Result<Self> {
        if encoder.cols() > encoder.rows() {
            return Err(Error::dims(
                "encoder",
                "rows >= cols",
                format!("{}x{}", encoder.rows(), encoder.cols()),
            ));
        }
        if !encoder.has_orthonormal_columns(tol) {
            return Err(Error::InvalidInput("encoder is not an isometry (C†C ≠ I)".into()));
        }
        Ok(Self { encoder })
    }

    /// The whole space as a code: `C = I_d`.
    pub fn trivial(d: usize) -> Self {
        Self {
            encoder: ComplexMatrix::identity(d),
        }
    }

    pub fn logical_dim(&self) -> usize {
        self.encoder.cols()
    }

    pub fn physical_dim(&self) -> usize {
        self.encoder.rows()
    }

    pub fn encoder(&self) -> &ComplexMatrix<T> {
        &self.encoder
    }

    /// `P = CC†`.
    pub fn projector(&self) -> ComplexMatrix<T> {
        &self.encoder * &self.encoder.adjoint()
    }

    pub fn code_space(&self) -> SubspaceIsometry<T> {
        SubspaceIsometry::new_unchecked(self.encoder.clone())
    }

    fn check_noise(&self, noise: &KrausChannel<T>) -> Result<()> {
        let n = self.physical_dim();
        if noise.in_dim() != n || noise.out_dim() != n {
            return Err(Error::dims(
                "noise on the physical space",
                format!("{n} -> {n}"),
                format!("{} -> {}", noise.in_dim(), noise.out_dim()),
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct KlReport<T: Real> {
    pub correctable: bool,
    /// `h[(j, i)] = Tr(P Eⱼ†Eᵢ P)/d`.
    pub h: ComplexMatrix<T>,
    /// Largest `‖P Eⱼ†Eᵢ P − hⱼᵢ P‖_F`.
    pub residual: T,
}

pub fn kl_check<T: Real>(code: &CodeSpec<T>, errors: &KrausChannel<T>, tol: T) -> Result<KlReport<T>> {
    code.check_noise(errors)?;
    let p = code.projector();
    let d = T::of_usize(code.logical_dim());
    let projected: Vec<ComplexMatrix<T>> = errors.elements().iter().map(|e| e * &p).collect();
    let n = errors.len();
    let mut h = ComplexMatrix::zeros(n, n);
    let mut residual = T::zero();
    for j in 0..n {
        for i in 0..n {
            let m = &projected[j].adjoint() * &projected[i];
            let hji = m.trace() / d;
            residual = residual.max(m.distance(&p.scale(hji)));
            h[(j, i)] = hji;
        }
    }
    Ok(KlReport {
        correctable: residual <= tol,
        h,
        residual,
    })
}

/// Rotates the error set, `Fₖ = Σᵢ Wᵢₖ Eᵢ` with `h = W diag W†`, so that
/// `h` becomes diagonal (largest entry first).
pub fn diagonalize_errors<T: Real>(report: &KlReport<T>, errors: &KrausChannel<T>) -> Result<KrausChannel<T>> {
    if !report.correctable {
        return Err(Error::NotCorrectable {
            residual: report.residual.as_f64(),
        });
    }
    if report.h.rows() != errors.len() {
        return Err(Error::dims("h matrix vs error count", errors.len(), report.h.rows()));
    }
    let eig = eigh(&report.h.hermitian_part())?;
    let n = errors.len();
    let (rows, cols) = (errors.out_dim(), errors.in_dim());
    let rotated = (0..n)
        .rev()
        .map(|k| {
            errors
                .elements()
                .iter()
                .enumerate()
                .fold(ComplexMatrix::zeros(rows, cols), |acc, (i, e)| {
                    &acc + &e.scale(eig.vectors[(i, k)])
                })
        })
        .collect();
    KrausChannel::new(rotated)
}

/// Measure-and-rotate recovery: one element `C (FₖC/√dₖ)†` per syndrome
/// with `dₖ > tol`, plus the projector onto everything outside the
/// corrupted code spaces as the failure outcome.
pub fn construct_recovery<T: Real>(code: &CodeSpec<T>, errors: &KrausChannel<T>, tol: T) -> Result<KrausChannel<T>> {
    let report = kl_check(code, errors, tol)?;
    let diag = diagonalize_errors(&report, errors)?;
    let n = code.physical_dim();
    let c = code.encoder();
    let mut elements = Vec::new();
    let mut covered = ComplexMatrix::zeros(n, n);
    for f in diag.elements() {
        let fc = f * c;
        let weight = (&fc.adjoint() * &fc).trace().re / T::of_usize(code.logical_dim());
        if weight <= tol {
            continue;
        }
        let iso = fc.scale_real(weight.sqrt().recip());
        covered = &covered + &(&iso * &iso.adjoint());
        elements.push(c * &iso.adjoint());
    }
    let rest = &ComplexMatrix::identity(n) - &covered;
    if rest.frobenius_norm() > tol {
        elements.push(rest);
    }
    KrausChannel::new(elements)
}

#[derive(Clone, Debug)]
pub struct CorrectionCertificate<T: Real> {
    /// Certificate of `encode → noise → recover` from the logical space
    /// into the code space.
    pub uuqc: UuqcCertificate<T>,
    /// Total probability of elements acting as the identity on the code.
    pub probability: T,
    /// The combined operation is a UUQC with `U ∝ I` and `q = 1`.
    pub fully_corrects: bool,
}

pub fn verify_correction_uuqc<T: Real>(
    code: &CodeSpec<T>,
    errors: &KrausChannel<T>,
    recovery: &KrausChannel<T>,
    tol: T,
) -> Result<CorrectionCertificate<T>> {
    code.check_noise(errors)?;
    if recovery.in_dim() != code.physical_dim() || recovery.out_dim() != code.physical_dim() {
        return Err(Error::dims(
            "recovery on the physical space",
            code.physical_dim(),
            recovery.in_dim(),
        ));
    }
    let d = code.logical_dim();
    let encode = KrausChannel::unitary(code.encoder().clone());
    let combined = compose(&compose(&encode, errors)?, recovery)?;
    let layout = LegLayout::new(SubspaceIsometry::full(d), code.code_space(), 1, 1)?;
    let uuqc = certify_uuqc(&combined, &layout, tol)?;

    let dim = T::of_usize(d);
    let is_identity = |u: &ComplexMatrix<T>| (u.trace().norm() - dim).abs() <= tol;
    let probability: T = uuqc
        .per_element
        .iter()
        .filter(|c| c.is_uum && is_identity(&c.unitary))
        .map(|c| c.probability)
        .sum();
    let fully_corrects = uuqc.is_uuqc
        && uuqc.unitary.as_ref().is_some_and(is_identity)
        && (uuqc.total_probability - T::one()).abs() <= tol;
    Ok(CorrectionCertificate {
        uuqc,
        probability,
        fully_corrects,
    })
}

/// `(I_a ⊗ E∘C)(|Φ_d⟩⟨Φ_d|)`, unnormalised; reference first.
pub fn noisy_choi_state<T: Real>(code: &CodeSpec<T>, noise: &KrausChannel<T>) -> Result<ComplexMatrix<T>> {
    code.check_noise(noise)?;
    let encode = KrausChannel::unitary(code.encoder().clone());
    Ok(compose(&encode, noise)?.choi_state())
}

/// `(I_a ⊗ V_E C)|Φ_d⟩` with `V_E = Σₖ Eₖ ⊗ |k⟩`: the Choi state purified
/// by an environment register placed after the physical factor.
pub fn purified_choi_ket<T: Real>(code: &CodeSpec<T>, noise: &KrausChannel<T>) -> Result<ComplexMatrix<T>> {
    code.check_noise(noise)?;
    let m = noise.len();
    let n = code.physical_dim();
    let mut iso = ComplexMatrix::zeros(n * m, n);
    for (k, e) in noise.elements().iter().enumerate() {
        iso = &iso + &tensor_product(e, &ComplexMatrix::basis_ket(m, k));
    }
    let d = code.logical_dim();
    let op = tensor_product(&ComplexMatrix::identity(d), &(&iso * code.encoder()));
    Ok(&op * &crate::entanglement::ues::<T>(d))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProbabilityMethod {
    /// The Choi state is pure and the optimum is exact.
    PureExact,
    /// Best value found over one-sided local filters.
    FilterLowerBound,
}

impl ProbabilityMethod {
    pub fn tag(self) -> &'static str {
        match self {
            Self::PureExact => "pure-exact",
            Self::FilterLowerBound => "filter-lower-bound",
        }
    }
}

#[derive(Clone, Debug)]
pub struct CorrectionProbability<T> {
    pub probability: T,
    pub method: ProbabilityMethod,
    /// `Tr σ`.
    pub choi_weight: T,
}

/// Heralded correction probability from the noisy Choi state `σ`.
pub fn unambiguous_correction_probability<T: Real>(
    code: &CodeSpec<T>,
    noise: &KrausChannel<T>,
    tol: T,
    seed: u64,
) -> Result<CorrectionProbability<T>> {
    let sigma = noisy_choi_state(code, noise)?;
    let d = code.logical_dim();
    let n = code.physical_dim();
    let choi_weight = sigma.trace().re;
    if let Some(p) = pure_conversion(&sigma, d, n, tol)? {
        return Ok(CorrectionProbability {
            probability: p,
            method: ProbabilityMethod::PureExact,
            choi_weight,
        });
    }

    let id_a = ComplexMatrix::identity(d);
    let mut best = T::zero();
    let mut try_filter = |k: &ComplexMatrix<T>| -> Result<()> {
        let op = tensor_product(&id_a, k);
        let filtered = &(&op * &sigma) * &op.adjoint();
        if let Some(p) = pure_conversion(&filtered, d, n, tol)? {
            best = best.max(p);
        }
        Ok(())
    };
    if n <= FILTER_GRID_MAX_DIM {
        let step = T::one() / T::of_usize(FILTER_GRID_STEPS - 1);
        let total = FILTER_GRID_STEPS.pow(n as u32);
        for idx in 0..total {
            let mut rest = idx;
            let entries: Vec<T> = (0..n)
                .map(|_| {
                    let v = T::of_usize(rest % FILTER_GRID_STEPS) * step;
                    rest /= FILTER_GRID_STEPS;
                    v
                })
                .collect();
            try_filter(&ComplexMatrix::diag_real(&entries))?;
        }
    }
    let mut rng = rng_from_seed(seed);
    for _ in 0..RANDOM_FILTERS {
        let k: ComplexMatrix<T> = random_matrix_with(n, n, &mut rng);
        let norm = operator_norm(&k)?;
        if norm > T::zero() {
            try_filter(&k.scale_real(norm.recip()))?;
        }
    }
    Ok(CorrectionProbability {
        probability: best,
        method: ProbabilityMethod::FilterLowerBound,
        choi_weight,
    })
}

/// `Tr σ · P(ψ → Φ_d)` when `σ` is pure (within `tol`), else `None`.
fn pure_conversion<T: Real>(sigma: &ComplexMatrix<T>, d: usize, n: usize, tol: T) -> Result<Option<T>> {
    let weight = sigma.trace().re;
    if weight <= tol {
        return Ok(None);
    }
    let eig = eigh(sigma)?;
    if eig.max_value() < weight - tol {
        return Ok(None);
    }
    let top = eig.vectors.column(d * n - 1);
    let sf = schmidt(&top, d, n, tol)?;
    Ok(Some(weight * conversion_probability(&sf, d)))
}

/// Necessary condition for certain correction: the normalised Choi state
/// is pure with `d` Schmidt coefficients equal to `1/√d`.
#[derive(Clone, Debug)]
pub struct UesCheck<T> {
    pub is_ues: bool,
    pub pure: bool,
    pub coefficients: Vec<T>,
}

pub fn choi_is_ues<T: Real>(code: &CodeSpec<T>, noise: &KrausChannel<T>, tol: T) -> Result<UesCheck<T>> {
    let sigma = noisy_choi_state(code, noise)?;
    let d = code.logical_dim();
    let n = code.physical_dim();
    let weight = sigma.trace().re;
    if weight <= tol {
        return Ok(UesCheck {
            is_ues: false,
            pure: false,
            coefficients: Vec::new(),
        });
    }
    let normalized = sigma.scale_real(weight.recip());
    let eig = eigh(&normalized)?;
    let pure = eig.max_value() >= T::one() - tol;
    let sf = schmidt(&eig.vectors.column(d * n - 1), d, n, tol)?;
    let is_ues = pure && ket_is_ues(&sf.coefficients, d, tol);
    Ok(UesCheck {
        is_ues,
        pure,
        coefficients: sf.coefficients,
    })
}

/// First `d` coefficients equal `1/√d`, the rest vanish.
pub fn ket_is_ues<T: Real>(coefficients: &[T], d: usize, tol: T) -> bool {
    let target = T::of_usize(d).sqrt().recip();
    coefficients.len() >= d
        && coefficients[..d].iter().all(|&c| (c - target).abs() <= tol)
        && coefficients[d..].iter().all(|&c| c.abs() <= tol)
}

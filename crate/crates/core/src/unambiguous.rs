//! Certification of unambiguous unitary maps and channels.
//!
//! An operator `Ω : H₁ ⊗ E₁ → H₂ ⊗ E₂` acts as a probabilistic unitary from
//! a `d`-dimensional subspace of `H₁` to one of `H₂` exactly when its
//! restriction to those subspaces factors as `U ⊗ Θ`; the heralded success
//! probability is then `p = Tr(ΘΘ†)` and does not depend on the input state.
//!
//! The test runs through the operator-Schmidt decomposition of the
//! restricted operator `(V₂† ⊗ I) Ω (V₁ ⊗ I)`: with dominant value `σ₁`,
//! `‖U ⊗ Θ‖²_F = d · Tr(ΘΘ†)` gives `p = σ₁²/d` directly.
//!
//! Probabilities of individual input states follow the reading
//! `p(ψ) = Tr_{E₂} Tr[(P₂ ⊗ I) Ω (|ψ⟩⟨ψ| ⊗ I_{E₁}) Ω† (P₂ ⊗ I)]`, i.e. the
//! input environment legs are left open with an unnormalised identity.

use rand::Rng;

use crate::channel::KrausChannel;
use crate::error::{Error, Result};
use crate::linalg::random::{random_density_with, random_ket_with, rng_from_seed};
use crate::linalg::{
    factor_as_tensor, partial_trace, phase_of, sandwich_system_legs, tensor_all, tensor_product, ComplexMatrix,
    SubspaceIsometry,
};
use crate::scalar::Real;

/// Seed for the probe states of the direct channel-level check.
const PROBE_SEED: u64 = 0x005e_ed0f_0bbe;
const PROBE_STATES: usize = 4;

/// System subspaces plus environment leg dimensions of an operator
/// `H₁ ⊗ E_in → H₂ ⊗ E_out` (system factor first on both sides).
#[derive(Clone, Debug, PartialEq)]
pub struct LegLayout<T: Real> {
    input: SubspaceIsometry<T>,
    output: SubspaceIsometry<T>,
    env_in: usize,
    env_out: usize,
}

impl<T: Real> LegLayout<T> {
    pub fn new(input: SubspaceIsometry<T>, output: SubspaceIsometry<T>, env_in: usize, env_out: usize) -> Result<Self> {
        if input.sub_dim() != output.sub_dim() {
            return Err(Error::dims("subspace dimensions", input.sub_dim(), output.sub_dim()));
        }
        if input.sub_dim() == 0 {
            return Err(Error::DegenerateSubspace("subspace dimension is zero".into()));
        }
        if env_in == 0 || env_out == 0 {
            return Err(Error::InvalidInput("environment dimensions must be positive".into()));
        }
        Ok(Self {
            input,
            output,
            env_in,
            env_out,
        })
    }

    /// Full `d`-dimensional system spaces on both sides.
    pub fn full(d: usize, env_in: usize, env_out: usize) -> Result<Self> {
        Self::new(SubspaceIsometry::full(d), SubspaceIsometry::full(d), env_in, env_out)
    }

    pub fn input(&self) -> &SubspaceIsometry<T> {
        &self.input
    }

    pub fn output(&self) -> &SubspaceIsometry<T> {
        &self.output
    }

    pub fn env_in(&self) -> usize {
        self.env_in
    }

    pub fn env_out(&self) -> usize {
        self.env_out
    }

    pub fn sub_dim(&self) -> usize {
        self.input.sub_dim()
    }

    /// Expected operator shape `(rows, cols)`.
    pub fn operator_shape(&self) -> (usize, usize) {
        (
            self.output.ambient_dim() * self.env_out,
            self.input.ambient_dim() * self.env_in,
        )
    }

    /// Layout of `I_a ⊗ Ω`: an ancilla factor in front of both system legs.
    pub fn with_ancilla(&self, ancilla_dim: usize) -> Self {
        Self {
            input: self.input.with_ancilla(ancilla_dim),
            output: self.output.with_ancilla(ancilla_dim),
            env_in: self.env_in,
            env_out: self.env_out,
        }
    }

    fn check_operator(&self, omega: &ComplexMatrix<T>) -> Result<()> {
        let (r, c) = self.operator_shape();
        if omega.shape() != (r, c) {
            return Err(Error::dims(
                "operator shape for leg layout",
                format!("{r}x{c}"),
                format!("{}x{}", omega.rows(), omega.cols()),
            ));
        }
        Ok(())
    }

    /// Lifts a `d x d` unitary in subspace coordinates to `V₂ U V₁†`.
    pub fn ambient_unitary(&self, unitary: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        &(self.output.columns() * unitary) * &self.input.columns().adjoint()
    }
}

/// Verdict and extracted data for a single operator.
#[derive(Clone, Debug)]
pub struct UumCertificate<T: Real> {
    pub is_uum: bool,
    /// `Tr(ΘΘ†) = σ₁²/d`.
    pub probability: T,
    /// `d x d`, in the coordinates of the two subspace bases.
    pub unitary: ComplexMatrix<T>,
    /// `Θ : E_in → E_out`.
    pub env_factor: ComplexMatrix<T>,
    /// Frobenius norm of the restricted operator not captured by `U ⊗ Θ`.
    pub residual: T,
    /// `‖d·A†A − I‖_F` for the unit-norm dominant system factor `A`.
    pub unitarity_defect: T,
    /// Operator-Schmidt spectrum of the restricted operator, descending.
    pub schmidt_values: Vec<T>,
}

/// `(V₂† ⊗ I) Ω (V₁ ⊗ I)`.
pub fn restrict<T: Real>(omega: &ComplexMatrix<T>, layout: &LegLayout<T>) -> Result<ComplexMatrix<T>> {
    layout.check_operator(omega)?;
    sandwich_system_legs(
        &layout.output.columns().adjoint(),
        omega,
        layout.input.columns(),
        layout.env_out,
        layout.env_in,
    )
}

pub fn certify_uum<T: Real>(omega: &ComplexMatrix<T>, layout: &LegLayout<T>, tol: T) -> Result<UumCertificate<T>> {
    let d = layout.sub_dim();
    let restricted = restrict(omega, layout)?;
    let f = factor_as_tensor(&restricted, d, layout.env_out, d, layout.env_in)?;
    let dim = T::of_usize(d);

    let a = &f.sys_factor;
    let gram = &a.adjoint() * a;
    let c = gram.trace().re / dim;
    let unitarity_defect = gram.scale_real(c.recip()).distance(&ComplexMatrix::identity(d));

    let mut unitary = a.scale_real(c.sqrt().recip());
    let mut env_factor = f.env_factor.scale_real(c.sqrt());
    let phase = dominant_phase(&unitary);
    unitary = unitary.scale(phase.conj());
    env_factor = env_factor.scale(phase);

    let sigma = f.schmidt_values[0];
    let probability = sigma * sigma / dim;
    let is_uum = f.residual <= tol && unitarity_defect <= tol && probability > tol;
    Ok(UumCertificate {
        is_uum,
        probability,
        unitary,
        env_factor,
        residual: f.residual,
        unitarity_defect,
        schmidt_values: f.schmidt_values,
    })
}

/// Phase of the largest-modulus entry; near-ties resolve to the first entry
/// in row-major order so that equal unitaries get equal phases.
pub(crate) fn dominant_phase<T: Real>(u: &ComplexMatrix<T>) -> crate::scalar::C<T> {
    let max = u.max_abs();
    let cutoff = max * (T::one() - T::of(1e-8));
    let z = u
        .as_slice()
        .iter()
        .copied()
        .find(|z| z.norm() >= cutoff)
        .expect("nonempty matrix");
    phase_of(z)
}

/// Per-state success probabilities of an operator over random inputs.
#[derive(Clone, Debug)]
pub struct ProbabilityProfile<T> {
    pub samples: Vec<T>,
}

impl<T: Real> ProbabilityProfile<T> {
    pub fn spread(&self) -> T {
        let max = self.samples.iter().copied().fold(T::neg_infinity(), T::max);
        let min = self.samples.iter().copied().fold(T::infinity(), T::min);
        max - min
    }

    pub fn mean(&self) -> T {
        self.samples.iter().copied().sum::<T>() / T::of_usize(self.samples.len())
    }
}

/// `p(ψ)` for a unit ket given in input-subspace coordinates.
pub fn state_probability<T: Real>(
    omega: &ComplexMatrix<T>,
    layout: &LegLayout<T>,
    coords: &ComplexMatrix<T>,
) -> Result<T> {
    if coords.shape() != (layout.sub_dim(), 1) {
        return Err(Error::dims(
            "input state coordinates",
            format!("{}x1", layout.sub_dim()),
            format!("{}x{}", coords.rows(), coords.cols()),
        ));
    }
    let restricted = restrict(omega, layout)?;
    let feed = tensor_product(coords, &ComplexMatrix::identity(layout.env_in));
    Ok(restricted.checked_mul(&feed)?.frobenius_norm_sqr())
}

pub fn probability_profile<T: Real>(
    omega: &ComplexMatrix<T>,
    layout: &LegLayout<T>,
    samples: usize,
    seed: u64,
) -> Result<ProbabilityProfile<T>> {
    let restricted = restrict(omega, layout)?;
    let id_env = ComplexMatrix::identity(layout.env_in);
    let mut rng = rng_from_seed(seed);
    let samples = (0..samples)
        .map(|_| {
            let psi: ComplexMatrix<T> = random_ket_with(layout.sub_dim(), &mut rng);
            (&restricted * &tensor_product(&psi, &id_env)).frobenius_norm_sqr()
        })
        .collect();
    Ok(ProbabilityProfile { samples })
}

/// What the input environment legs are fed with in the channel-level check.
#[derive(Clone, Debug)]
pub enum EnvInput<T: Real> {
    /// Unnormalised identity `I_{E₁}`.
    Identity,
    /// A fixed ancilla state `σ_{E₁}`.
    State(ComplexMatrix<T>),
}

/// `V₂† Tr_{E₂}[E(V₁ρV₁† ⊗ σ_{E₁})] V₂` for `ρ` in input-subspace coordinates.
pub fn heralded_action<T: Real>(
    ch: &KrausChannel<T>,
    layout: &LegLayout<T>,
    rho: &ComplexMatrix<T>,
    env_input: &EnvInput<T>,
) -> Result<ComplexMatrix<T>> {
    check_channel(ch, layout)?;
    let d = layout.sub_dim();
    if rho.shape() != (d, d) {
        return Err(Error::dims(
            "subspace density matrix",
            format!("{d}x{d}"),
            format!("{}x{}", rho.rows(), rho.cols()),
        ));
    }
    let v1 = layout.input.columns();
    let env = match env_input {
        EnvInput::Identity => ComplexMatrix::identity(layout.env_in),
        EnvInput::State(sigma) => {
            if sigma.shape() != (layout.env_in, layout.env_in) {
                return Err(Error::dims("environment input state", layout.env_in, sigma.rows()));
            }
            sigma.clone()
        }
    };
    let input = tensor_product(&(&(v1 * rho) * &v1.adjoint()), &env);
    let out = ch.apply(&input)?;
    let reduced = partial_trace(&out, &[layout.output.ambient_dim(), layout.env_out], &[0])?;
    let v2 = layout.output.columns();
    Ok(&(&v2.adjoint() * &reduced) * v2)
}

fn check_channel<T: Real>(ch: &KrausChannel<T>, layout: &LegLayout<T>) -> Result<()> {
    let (r, c) = layout.operator_shape();
    if (ch.out_dim(), ch.in_dim()) != (r, c) {
        return Err(Error::dims(
            "channel dimensions for leg layout",
            format!("{c} -> {r}"),
            format!("{} -> {}", ch.in_dim(), ch.out_dim()),
        ));
    }
    Ok(())
}

/// Channel-level verdict.
#[derive(Clone, Debug)]
pub struct UuqcCertificate<T: Real> {
    pub is_uuqc: bool,
    /// `q = Σₖ pₖ`.
    pub total_probability: T,
    pub per_element: Vec<UumCertificate<T>>,
    /// Common unitary (subspace coordinates), taken from the first element
    /// with `pₖ > tol` that certifies as a map.
    pub unitary: Option<ComplexMatrix<T>>,
    /// Elements with `pₖ > tol` that are not unambiguous unitary maps.
    pub non_uum_elements: Vec<usize>,
    /// First pair of contributing elements whose unitaries differ beyond a phase.
    pub offending_pair: Option<(usize, usize)>,
    /// Mean heralded weight of unit-trace probe states under the direct check.
    pub direct_probability: Option<T>,
    /// Largest `‖V₂†Tr_{E₂}[E(ρ ⊗ I)]V₂ − q UρU†‖_F` over the probe states.
    pub definition_residual: Option<T>,
}

impl<T: Real> UuqcCertificate<T> {
    pub fn probabilities(&self) -> Vec<T> {
        self.per_element.iter().map(|c| c.probability).collect()
    }
}

pub fn certify_uuqc<T: Real>(ch: &KrausChannel<T>, layout: &LegLayout<T>, tol: T) -> Result<UuqcCertificate<T>> {
    check_channel(ch, layout)?;
    let d = layout.sub_dim();
    let dim = T::of_usize(d);
    let per_element = ch
        .elements()
        .iter()
        .map(|e| certify_uum(e, layout, tol))
        .collect::<Result<Vec<_>>>()?;

    let total_probability: T = per_element.iter().map(|c| c.probability).sum();
    let mut non_uum_elements = Vec::new();
    let mut reference: Option<usize> = None;
    let mut offending_pair = None;
    for (k, cert) in per_element.iter().enumerate() {
        if cert.probability <= tol {
            continue;
        }
        if !cert.is_uum {
            non_uum_elements.push(k);
            continue;
        }
        match reference {
            None => reference = Some(k),
            Some(r) => {
                let overlap = per_element[r].unitary.inner(&cert.unitary).norm();
                if (overlap - dim).abs() > tol && offending_pair.is_none() {
                    offending_pair = Some((r, k));
                }
            }
        }
    }

    let unitary = reference.map(|r| per_element[r].unitary.clone());
    let (direct_probability, definition_residual) = match &unitary {
        Some(u) => {
            let (p, r) = direct_check(ch, layout, u, total_probability)?;
            (Some(p), Some(r))
        }
        None => (None, None),
    };
    let is_uuqc = reference.is_some()
        && non_uum_elements.is_empty()
        && offending_pair.is_none()
        && total_probability > tol
        && definition_residual.is_some_and(|r| r <= tol);

    Ok(UuqcCertificate {
        is_uuqc,
        total_probability,
        per_element,
        unitary,
        non_uum_elements,
        offending_pair,
        direct_probability,
        definition_residual,
    })
}

/// Evaluates the channel-level definition on seeded probe states.
fn direct_check<T: Real>(ch: &KrausChannel<T>, layout: &LegLayout<T>, u: &ComplexMatrix<T>, q: T) -> Result<(T, T)> {
    let d = layout.sub_dim();
    let mut rng = rng_from_seed(PROBE_SEED);
    let mut worst = T::zero();
    let mut weight = T::zero();
    for _ in 0..PROBE_STATES {
        let rank = rng.random_range(1..=d);
        let rho: ComplexMatrix<T> = random_density_with(d, rank, &mut rng);
        let action = heralded_action(ch, layout, &rho, &EnvInput::Identity)?;
        let expected = (&(u * &rho) * &u.adjoint()).scale_real(q);
        worst = worst.max(action.distance(&expected));
        weight += action.trace().re;
    }
    Ok((weight / T::of_usize(PROBE_STATES), worst))
}

/// One orthonormal basis per environment leg; leg order matches the
/// composite environment index (first leg slowest). An empty list stands
/// for a trivial leg of dimension one.
#[derive(Clone, Debug, Default)]
pub struct EnvBases<T: Real> {
    pub input: Vec<ComplexMatrix<T>>,
    pub output: Vec<ComplexMatrix<T>>,
}

impl<T: Real> EnvBases<T> {
    pub fn computational(env_in: usize, env_out: usize) -> Self {
        Self {
            input: vec![ComplexMatrix::identity(env_in)],
            output: vec![ComplexMatrix::identity(env_out)],
        }
    }

    fn product(legs: &[ComplexMatrix<T>], expected: usize, tol: T, side: &str) -> Result<ComplexMatrix<T>> {
        for (k, b) in legs.iter().enumerate() {
            if !b.is_unitary(tol) {
                return Err(Error::InvalidInput(format!(
                    "{side} environment leg {k}: basis is not orthonormal"
                )));
            }
        }
        let basis = tensor_all(legs).unwrap_or_else(|| ComplexMatrix::identity(1));
        if basis.rows() != expected {
            return Err(Error::dims("environment leg bases", expected, basis.rows()));
        }
        Ok(basis)
    }
}

/// Replaces every contributing element by the combined rank-one elements
/// `√(Σₖ|ωₖ|²) · U ⊗ |b_out⟩⟨b_in|`, `ωₖ = ⟨b_out|Θₖ|b_in⟩`, one per pair
/// of environment basis vectors with nonzero weight. The result realises the
/// same unitary with the same total probability.
pub fn refine<T: Real>(
    ch: &KrausChannel<T>,
    layout: &LegLayout<T>,
    bases: &EnvBases<T>,
    tol: T,
) -> Result<KrausChannel<T>> {
    let cert = certify_uuqc(ch, layout, tol)?;
    if !cert.is_uuqc {
        return Err(Error::NotUuqc(describe_failure(&cert)));
    }
    let basis_in = EnvBases::product(&bases.input, layout.env_in, tol, "input")?;
    let basis_out = EnvBases::product(&bases.output, layout.env_out, tol, "output")?;
    let u = layout.ambient_unitary(cert.unitary.as_ref().expect("certified channel has a unitary"));

    let thetas: Vec<&ComplexMatrix<T>> = cert
        .per_element
        .iter()
        .filter(|c| c.probability > tol)
        .map(|c| &c.env_factor)
        .collect();
    let rotated: Vec<ComplexMatrix<T>> = thetas
        .iter()
        .map(|t| &(&basis_out.adjoint() * *t) * &basis_in)
        .collect();

    let mut elements = Vec::new();
    for i_in in 0..layout.env_in {
        for i_out in 0..layout.env_out {
            let weight = rotated.iter().map(|w| w[(i_out, i_in)].norm_sqr()).sum::<T>().sqrt();
            if weight <= tol {
                continue;
            }
            let env_op = basis_out.column(i_out).outer(&basis_in.column(i_in));
            elements.push(tensor_product(&u, &env_op).scale_real(weight));
        }
    }
    KrausChannel::new(elements)
}

/// `I_a ⊗ E`: still unambiguous, with the same probability, on the
/// subspaces given by [`LegLayout::with_ancilla`].
pub fn extend_by_identity<T: Real>(ch: &KrausChannel<T>, ancilla_dim: usize) -> KrausChannel<T> {
    ch.extend_by_identity(ancilla_dim)
}

pub(crate) fn describe_failure<T: Real>(cert: &UuqcCertificate<T>) -> String {
    if !cert.non_uum_elements.is_empty() {
        format!("elements {:?} are not unambiguous unitary maps", cert.non_uum_elements)
    } else if let Some((a, b)) = cert.offending_pair {
        format!("elements {a} and {b} mimic different unitaries")
    } else if cert.unitary.is_none() {
        "no element has nonzero probability".into()
    } else {
        format!(
            "direct check residual {:e} exceeds tolerance",
            cert.definition_residual.map(|r| r.as_f64()).unwrap_or(f64::NAN)
        )
    }
}

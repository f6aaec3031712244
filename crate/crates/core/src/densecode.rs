//! Unambiguous dense coding over a partially entangled pure state.
//!
//! States live on `Alice ⊗ Bob` with `|E_D⟩ = Σᵢ λᵢ |i⟩|i⟩`. Alice encodes
//! message `x` by `A_x` on her half; Bob filters his half with
//! `K = Σᵢ (λ_D/λᵢ)|i⟩⟨i|`, which leaves `√D λ_D (A_x ⊗ I)|Φ_D⟩`, and then
//! measures in the orthonormal basis `(A_x ⊗ I)|Φ_D⟩`. Every message
//! succeeds with probability `Dλ_D²` and is never misread.

use rand::Rng;

use crate::entanglement::ues;
use crate::error::{Error, Result};
use crate::linalg::random::rng_from_seed;
use crate::linalg::{eigh, partial_trace, tensor_product, ComplexMatrix};
use crate::scalar::{Real, C};

/// Schmidt coefficients of the shared state, descending and positive.
#[derive(Clone, Debug, PartialEq)]
pub struct SharedState<T: Real> {
    lambdas: Vec<T>,
}

impl<T: Real> SharedState<T> {
    /// Coefficients must be positive with `Σλᵢ² = 1` (within `1e-12`, or a
    /// few ulps for narrower scalars); they are sorted into descending order.
    pub fn new(lambdas: Vec<T>) -> Result<Self> {
        if lambdas.len() < 2 {
            return Err(Error::InvalidInput(format!(
                "Schmidt rank must be at least 2, got {}",
                lambdas.len()
            )));
        }
        if lambdas.iter().any(|&l| !(l > T::zero()) || !l.is_finite()) {
            return Err(Error::InvalidInput("Schmidt coefficients must be positive".into()));
        }
        let norm: T = lambdas.iter().map(|&l| l * l).sum();
        let slack = T::of(1e-12).max(T::of_usize(8 * lambdas.len()) * T::epsilon());
        if (norm - T::one()).abs() > slack {
            return Err(Error::InvalidInput(format!(
                "squared Schmidt coefficients sum to {norm}, expected 1"
            )));
        }
        let mut lambdas = lambdas;
        lambdas.sort_by(|a, b| b.partial_cmp(a).expect("finite"));
        Ok(Self { lambdas })
    }

    /// From squared coefficients `λᵢ²`.
    pub fn from_squared(squares: &[T]) -> Result<Self> {
        if squares.iter().any(|&s| s < T::zero()) {
            return Err(Error::InvalidInput("squared coefficients must be nonnegative".into()));
        }
        Self::new(squares.iter().map(|&s| s.sqrt()).collect())
    }

    pub fn uniform(d: usize) -> Result<Self> {
        Self::new(vec![T::of_usize(d).sqrt().recip(); d])
    }

    pub fn rank(&self) -> usize {
        self.lambdas.len()
    }

    pub fn lambdas(&self) -> &[T] {
        &self.lambdas
    }

    pub fn smallest(&self) -> T {
        *self.lambdas.last().expect("rank >= 2")
    }

    /// `Ẽ_D = diag(λ₁..λ_D)`.
    pub fn diagonal(&self) -> ComplexMatrix<T> {
        ComplexMatrix::diag_real(&self.lambdas)
    }

    pub fn ket(&self) -> ComplexMatrix<T> {
        let d = self.rank();
        let mut amps = vec![T::zero(); d * d];
        for (i, &l) in self.lambdas.iter().enumerate() {
            amps[i * d + i] = l;
        }
        ComplexMatrix::ket_real(&amps)
    }
}

/// `X^a Z^b` at index `a·D + b`, with `X|j⟩ = |j+1⟩` and `Z|j⟩ = ωʲ|j⟩`.
pub fn weyl_operators<T: Real>(d: usize) -> Vec<ComplexMatrix<T>> {
    let omega = |k: usize| {
        let angle = T::TAU() * T::of_usize(k % d) / T::of_usize(d);
        C::new(angle.cos(), angle.sin())
    };
    let mut out = Vec::with_capacity(d * d);
    for a in 0..d {
        for b in 0..d {
            // (X^a Z^b)|j⟩ = ω^{bj} |j + a⟩
            out.push(ComplexMatrix::from_fn(d, d, |row, col| {
                if row == (col + a) % d {
                    omega(b * col)
                } else {
                    C::new(T::zero(), T::zero())
                }
            }));
        }
    }
    out
}

/// `D·λ_D²`.
pub fn capacity<T: Real>(state: &SharedState<T>) -> T {
    let l = state.smallest();
    T::of_usize(state.rank()) * l * l
}

#[derive(Clone, Debug)]
pub struct DenseCodingProtocol<T: Real> {
    pub encoders: Vec<ComplexMatrix<T>>,
    /// Bob's filter, acting on his half.
    pub filter: ComplexMatrix<T>,
    /// `(A_x ⊗ I)|Φ_D⟩`, one per message.
    pub discrimination_basis: Vec<ComplexMatrix<T>>,
}

impl<T: Real> DenseCodingProtocol<T> {
    /// Bob's full measurement operator: the basis bras stacked as rows,
    /// composed with the filter on his leg.
    pub fn bob_operator(&self) -> ComplexMatrix<T> {
        let d = self.filter.rows();
        let stack = ComplexMatrix::from_fn(d * d, d * d, |y, k| self.discrimination_basis[y][(k, 0)].conj());
        &stack * &tensor_product(&ComplexMatrix::identity(d), &self.filter)
    }

    pub fn basis_gram(&self) -> ComplexMatrix<T> {
        let n = self.discrimination_basis.len();
        ComplexMatrix::from_fn(n, n, |i, j| {
            self.discrimination_basis[i].inner(&self.discrimination_basis[j])
        })
    }
}

pub fn optimal_protocol<T: Real>(state: &SharedState<T>) -> DenseCodingProtocol<T> {
    let d = state.rank();
    let low = state.smallest();
    let filter = ComplexMatrix::diag_real(&state.lambdas.iter().map(|&l| low / l).collect::<Vec<_>>());
    let encoders = weyl_operators::<T>(d);
    let phi = ues::<T>(d);
    let id = ComplexMatrix::identity(d);
    let discrimination_basis = encoders.iter().map(|a| &tensor_product(a, &id) * &phi).collect();
    DenseCodingProtocol {
        encoders,
        filter,
        discrimination_basis,
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct MessageStats {
    pub sent: u64,
    pub successes: u64,
    pub decode_errors: u64,
}

impl MessageStats {
    pub fn success_rate(&self) -> f64 {
        if self.sent == 0 {
            0.0
        } else {
            self.successes as f64 / self.sent as f64
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimulationReport {
    pub trials: u64,
    pub per_message: Vec<MessageStats>,
    pub filter_failures: u64,
    pub decode_errors: u64,
}

impl SimulationReport {
    pub fn successes(&self) -> u64 {
        self.per_message.iter().map(|m| m.successes).sum()
    }

    pub fn pooled_rate(&self) -> f64 {
        self.successes() as f64 / self.trials as f64
    }

    pub fn filter_failure_rate(&self) -> f64 {
        self.filter_failures as f64 / self.trials as f64
    }
}

/// Per message: probability of passing the filter, and the Born
/// distribution of Bob's basis measurement afterwards.
struct MessageModel {
    pass: f64,
    cumulative: Vec<f64>,
}

fn message_model<T: Real>(state: &SharedState<T>, protocol: &DenseCodingProtocol<T>, x: usize) -> MessageModel {
    let d = state.rank();
    let sent = &tensor_product(&protocol.encoders[x], &ComplexMatrix::identity(d)) * &state.ket();
    let filtered = &tensor_product(&ComplexMatrix::identity(d), &protocol.filter) * &sent;
    let pass = filtered.frobenius_norm_sqr().as_f64();
    let mut acc = 0.0;
    let cumulative = protocol
        .discrimination_basis
        .iter()
        .map(|b| {
            acc += if pass > 0.0 {
                b.inner(&filtered).norm_sqr().as_f64() / pass
            } else {
                0.0
            };
            acc
        })
        .collect();
    MessageModel { pass, cumulative }
}

/// Monte Carlo run: uniform messages, Born sampling of the filter and of
/// Bob's measurement. Deterministic for a fixed seed.
pub fn simulate<T: Real>(
    state: &SharedState<T>,
    protocol: &DenseCodingProtocol<T>,
    trials: u64,
    seed: u64,
) -> Result<SimulationReport> {
    if trials == 0 {
        return Err(Error::InvalidInput("trials must be at least 1".into()));
    }
    let d = state.rank();
    let n = protocol.encoders.len();
    if n == 0 || protocol.discrimination_basis.len() != n || protocol.filter.shape() != (d, d) {
        return Err(Error::dims("protocol for shared state", d, protocol.filter.rows()));
    }
    let models: Vec<MessageModel> = (0..n).map(|x| message_model(state, protocol, x)).collect();
    let mut rng = rng_from_seed(seed);
    let mut per_message = vec![MessageStats::default(); n];
    let mut filter_failures = 0;
    let mut decode_errors = 0;
    for _ in 0..trials {
        let x = rng.random_range(0..n);
        let model = &models[x];
        per_message[x].sent += 1;
        if rng.random::<f64>() >= model.pass {
            filter_failures += 1;
            continue;
        }
        let u: f64 = rng.random::<f64>() * model.cumulative.last().copied().unwrap_or(1.0);
        let y = model.cumulative.iter().position(|&c| u < c).unwrap_or(n - 1);
        per_message[x].successes += 1;
        if y != x {
            per_message[x].decode_errors += 1;
            decode_errors += 1;
        }
    }
    Ok(SimulationReport {
        trials,
        per_message,
        filter_failures,
        decode_errors,
    })
}

#[derive(Clone, Debug)]
pub struct BoundCheck<T: Real> {
    /// `Tr(M)/D²` for `M = B (I ⊗ Ẽ_D) Ã`.
    pub r: C<T>,
    /// `M = r·I` within tolerance: every message succeeds with `|r|²`.
    pub form_holds: bool,
    pub form_residual: T,
    pub success_probability: T,
    /// `D·λ_D²`.
    pub bound: T,
    pub within_bound: bool,
    /// Largest eigenvalue of `Σ_x A_x†A_x` (via the partial trace of `ÃÃ†`).
    pub trace_condition_max: T,
    /// `≤ D²`.
    pub trace_condition_holds: bool,
}

/// Checks whether Bob's operator `B` and Alice's encoders discriminate the
/// encoded states with one common amplitude `r`, and compares `|r|²` to
/// the bound. `Ã` has column `x` equal to `A_x` flattened row-major, which
/// is the encoded state up to the weights on Bob's leg.
pub fn verify_protocol_bound<T: Real>(
    state: &SharedState<T>,
    encoders: &[ComplexMatrix<T>],
    bob: &ComplexMatrix<T>,
    tol: T,
) -> Result<BoundCheck<T>> {
    let d = state.rank();
    let n = d * d;
    if encoders.len() != n {
        return Err(Error::dims("number of encoders", n, encoders.len()));
    }
    for (x, a) in encoders.iter().enumerate() {
        if a.shape() != (d, d) {
            return Err(Error::dims(
                "encoder shape",
                format!("{d}x{d}"),
                format!("encoder {x} is {}x{}", a.rows(), a.cols()),
            ));
        }
    }
    if bob.shape() != (n, n) {
        return Err(Error::dims(
            "Bob's operator",
            format!("{n}x{n}"),
            format!("{}x{}", bob.rows(), bob.cols()),
        ));
    }
    let a_tilde = ComplexMatrix::from_fn(n, n, |k, x| encoders[x][(k / d, k % d)]);
    let weights = tensor_product(&ComplexMatrix::identity(d), &state.diagonal());
    let m = &(bob * &weights) * &a_tilde;
    let r = m.trace() / T::of_usize(n);
    let form_residual = m.distance(&ComplexMatrix::identity(n).scale(r));
    let success_probability = r.norm_sqr();
    let bound = capacity(state);

    let gram = &a_tilde * &a_tilde.adjoint();
    let reduced = partial_trace(&gram, &[d, d], &[1])?;
    let trace_condition_max = eigh(&reduced.hermitian_part())?.max_value();
    Ok(BoundCheck {
        r,
        form_holds: form_residual <= tol,
        form_residual,
        success_probability,
        bound,
        within_bound: success_probability <= bound + tol,
        trace_condition_max,
        trace_condition_holds: trace_condition_max <= T::of_usize(n) + tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    type M = ComplexMatrix<f64>;

    fn gram_of_traces(ops: &[M]) -> M {
        M::from_fn(ops.len(), ops.len(), |i, j| ops[i].inner(&ops[j]))
    }

    #[test]
    fn qubit_weyl_family() {
        let w = weyl_operators::<f64>(2);
        assert!(w[0].distance(&M::identity(2)) < 1e-15);
        assert!(w[1].distance(&M::diag_real(&[1.0, -1.0])) < 1e-15);
        assert!(w[2].distance(&M::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap()) < 1e-15);
        assert!(gram_of_traces(&w).distance(&M::identity(4).scale_real(2.0)) < 1e-14);
    }

    #[test]
    fn qutrit_weyl_family() {
        let w = weyl_operators::<f64>(3);
        assert_eq!(w.len(), 9);
        assert!(gram_of_traces(&w).distance(&M::identity(9).scale_real(3.0)) < 1e-12);
        for u in &w {
            assert!(u.is_unitary(1e-12));
        }
    }

    #[test]
    fn shared_state_validation() {
        assert!(SharedState::<f64>::from_squared(&[0.8, 0.3]).is_err());
        assert!(SharedState::<f64>::from_squared(&[1.0, 0.0]).is_err());
        assert!(SharedState::<f64>::from_squared(&[1.0]).is_err());
        let s = SharedState::<f64>::from_squared(&[0.2, 0.8]).unwrap();
        assert!((s.lambdas()[0] - 0.8f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn capacities() {
        let s = SharedState::<f64>::uniform(3).unwrap();
        assert!((capacity(&s) - 1.0).abs() < 1e-12);
        let s = SharedState::<f64>::from_squared(&[0.8, 0.2]).unwrap();
        assert!((capacity(&s) - 0.4).abs() < 1e-12);
        let s = SharedState::<f64>::from_squared(&[0.5, 0.3, 0.2]).unwrap();
        assert!((capacity(&s) - 0.6).abs() < 1e-12);
    }

    #[test]
    fn optimal_filter_values() {
        let s = SharedState::<f64>::from_squared(&[0.8, 0.2]).unwrap();
        let p = optimal_protocol(&s);
        assert!(p.filter.distance(&M::diag_real(&[0.5, 1.0])) < 1e-12);
        let p = optimal_protocol(&SharedState::<f64>::uniform(2).unwrap());
        assert!(p.filter.distance(&M::identity(2)) < 1e-12);
        let s = 0.5f64.sqrt();
        assert!(p.discrimination_basis[0].distance(&M::ket_real(&[s, 0.0, 0.0, s])) < 1e-12);
    }

    #[test]
    fn discrimination_basis_orthonormal() {
        for sq in [vec![0.8, 0.2], vec![0.5, 0.3, 0.2]] {
            let p = optimal_protocol(&SharedState::<f64>::from_squared(&sq).unwrap());
            let n = p.discrimination_basis.len();
            assert!(p.basis_gram().distance(&M::identity(n)) < 1e-10);
        }
    }

    #[test]
    fn maximally_entangled_never_fails() {
        let s = SharedState::<f64>::uniform(2).unwrap();
        let rep = simulate(&s, &optimal_protocol(&s), 2000, 1).unwrap();
        assert_eq!(rep.successes(), 2000);
        assert_eq!(rep.decode_errors, 0);
    }

    #[test]
    fn simulation_is_deterministic() {
        let s = SharedState::<f64>::from_squared(&[0.8, 0.2]).unwrap();
        let p = optimal_protocol(&s);
        assert_eq!(simulate(&s, &p, 1000, 3).unwrap(), simulate(&s, &p, 1000, 3).unwrap());
        assert!(simulate(&s, &p, 0, 3).is_err());
    }

    #[test]
    fn optimal_protocol_meets_bound() {
        for sq in [vec![0.8, 0.2], vec![0.5, 0.3, 0.2]] {
            let s = SharedState::<f64>::from_squared(&sq).unwrap();
            let p = optimal_protocol(&s);
            let check = verify_protocol_bound(&s, &p.encoders, &p.bob_operator(), 1e-9).unwrap();
            assert!(check.form_holds);
            assert!((check.success_probability - capacity(&s)).abs() < 1e-9);
            assert!(check.trace_condition_holds);
            assert!((check.trace_condition_max - (sq.len() * sq.len()) as f64).abs() < 1e-9);

            let half = verify_protocol_bound(&s, &p.encoders, &p.bob_operator().scale_real(0.5), 1e-9).unwrap();
            assert!((half.success_probability - capacity(&s) / 4.0).abs() < 1e-9);
            assert!(half.within_bound);
        }
    }

    #[test]
    fn bound_check_rejects_bad_shapes() {
        let s = SharedState::<f64>::from_squared(&[0.8, 0.2]).unwrap();
        let p = optimal_protocol(&s);
        assert!(verify_protocol_bound(&s, &p.encoders[..3], &p.bob_operator(), 1e-9).is_err());
        assert!(verify_protocol_bound(&s, &p.encoders, &M::identity(3), 1e-9).is_err());
    }
}

//! Shared builders for the integration tests.
#![allow(dead_code)]

pub mod oracles;

use rand::Rng;
use uuqc::densecode::weyl_operators;
use uuqc::linalg::random::{random_isometry_with, random_matrix_with, random_unitary_with, rng_from_seed, SeededRng};
use uuqc::linalg::{operator_norm, pseudo_inverse, tensor_product};
use uuqc::{Channel, Layout, Matrix, Shared, Subspace};

/// A known product `U ⊗ Θ` embedded between random subspaces.
pub struct PlantedMap {
    pub omega: Matrix,
    pub layout: Layout,
    /// Subspace coordinates.
    pub unitary: Matrix,
    pub theta: Matrix,
}

/// Orthonormal basis of the complement of the columns of `v`.
pub fn complement(v: &Matrix, rng: &mut SeededRng) -> Option<Matrix> {
    let n = v.rows();
    let k = n - v.cols();
    if k == 0 {
        return None;
    }
    let proj = &Matrix::identity(n) - &(v * &v.adjoint());
    let g: Matrix = random_isometry_with(n, k, rng);
    let squeezed = &proj * &g;
    // orthonormalise what is left inside the complement
    let svd = uuqc::linalg::svd(&squeezed).unwrap();
    Some(svd.left)
}

/// `Ω = (V₂UV₁†) ⊗ Θ + W ⊗ Θ'` with `W` mapping into the complement of the
/// output subspace, so that restriction removes the second term.
pub fn planted_map(
    d: usize,
    extra_in: usize,
    extra_out: usize,
    env_in: usize,
    env_out: usize,
    p: f64,
    seed: u64,
) -> PlantedMap {
    let mut rng = rng_from_seed(seed);
    let n1 = d + extra_in;
    let n2 = d + extra_out;
    let v1: Matrix = random_isometry_with(n1, d, &mut rng);
    let v2: Matrix = random_isometry_with(n2, d, &mut rng);
    let u: Matrix = random_unitary_with(d, &mut rng);
    let raw: Matrix = random_matrix_with(env_out, env_in, &mut rng);
    let theta = raw.scale_real((p / raw.frobenius_norm_sqr()).sqrt());
    let mut omega = tensor_product(&(&(&v2 * &u) * &v1.adjoint()), &theta);
    if let Some(perp) = complement(&v2, &mut rng) {
        let w = &perp * &random_matrix_with::<f64, _>(perp.cols(), n1, &mut rng);
        let theta2: Matrix = random_matrix_with(env_out, env_in, &mut rng);
        omega = &omega + &tensor_product(&w, &theta2);
    }
    let layout = Layout::new(
        Subspace::new(v1, 1e-10).unwrap(),
        Subspace::new(v2, 1e-10).unwrap(),
        env_in,
        env_out,
    )
    .unwrap();
    PlantedMap {
        omega,
        layout,
        unitary: u,
        theta,
    }
}

pub struct PlantedChannel {
    pub channel: Channel,
    pub layout: Layout,
    pub unitary: Matrix,
    pub thetas: Vec<Matrix>,
    pub q: f64,
}

/// Elements `(V₂UV₁†) ⊗ Θₖ` with random `Θₖ` and `Σ Tr ΘₖΘₖ† = q`, plus
/// optionally one element that leaves the input subspace.
pub fn planted_channel(
    d: usize,
    extra: usize,
    env_in: usize,
    env_out: usize,
    elements: usize,
    q: f64,
    seed: u64,
) -> PlantedChannel {
    let mut rng = rng_from_seed(seed);
    let n = d + extra;
    let v1: Matrix = random_isometry_with(n, d, &mut rng);
    let v2: Matrix = random_isometry_with(n, d, &mut rng);
    let u: Matrix = random_unitary_with(d, &mut rng);
    let lifted = &(&v2 * &u) * &v1.adjoint();
    let weights: Vec<f64> = (0..elements).map(|_| 0.2 + rng.random::<f64>()).collect();
    let total: f64 = weights.iter().sum();
    let thetas: Vec<Matrix> = weights
        .iter()
        .map(|w| {
            let raw: Matrix = random_matrix_with(env_out, env_in, &mut rng);
            raw.scale_real((q * w / total / raw.frobenius_norm_sqr()).sqrt())
        })
        .collect();
    let mut ops: Vec<Matrix> = thetas.iter().map(|t| tensor_product(&lifted, t)).collect();
    if let Some(perp) = complement(&v2, &mut rng) {
        // lands outside the output subspace: feeds only the failure branch
        let w = &perp.column(0) * &v1.column(0).adjoint();
        let corner = Matrix::from_fn(env_out, env_in, |i, j| {
            num_complex::Complex64::new(if i == 0 && j == 0 { 0.1 } else { 0.0 }, 0.0)
        });
        ops.push(tensor_product(&w, &corner));
    }
    PlantedChannel {
        channel: Channel::new(ops).unwrap(),
        layout: Layout::new(
            Subspace::new(v1, 1e-10).unwrap(),
            Subspace::new(v2, 1e-10).unwrap(),
            env_in,
            env_out,
        )
        .unwrap(),
        unitary: u,
        thetas,
        q,
    }
}

/// Encoders `A_x` with `A_x†A_x ≤ I`, and the best-scaled `B` that makes
/// `B(I⊗Λ)Ã` proportional to the identity while keeping `B†B ≤ I`.
pub fn adversarial_protocol(state: &Shared, seed: u64) -> (Vec<Matrix>, Matrix) {
    let d = state.rank();
    let mut rng = rng_from_seed(seed);
    let encoders: Vec<Matrix> = if seed.is_multiple_of(3) {
        let base = weyl_operators::<f64>(d);
        let v: Matrix = random_unitary_with(d, &mut rng);
        base.iter().map(|a| &(&v * a) * &v.adjoint()).collect()
    } else {
        (0..d * d)
            .map(|_| {
                let raw: Matrix = if seed % 3 == 1 {
                    random_unitary_with(d, &mut rng)
                } else {
                    random_matrix_with(d, d, &mut rng)
                };
                let norm = operator_norm(&raw).unwrap();
                raw.scale_real(rng.random_range(0.5..1.0) / norm)
            })
            .collect()
    };
    let a_tilde = Matrix::from_fn(d * d, d * d, |k, x| encoders[x][(k / d, k % d)]);
    let weights = tensor_product(&Matrix::identity(d), &state.diagonal());
    let raw = &pseudo_inverse(&a_tilde, 1e-12).unwrap() * &pseudo_inverse(&weights, 1e-12).unwrap();
    let bob = raw.scale_real(1.0 / operator_norm(&raw).unwrap());
    (encoders, bob)
}

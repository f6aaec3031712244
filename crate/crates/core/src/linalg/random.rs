//! Seeded sampling of Haar unitaries, kets and test matrices.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::ComplexMatrix;
use crate::scalar::{czero, Real, C};

pub type SeededRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian<T: Real, R: Rng + ?Sized>(rng: &mut R) -> C<T> {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C::new(T::of(re), T::of(im))
}

/// Complex Ginibre matrix: i.i.d. standard complex Gaussian entries.
pub fn gaussian_matrix_with<T: Real, R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix<T> {
    ComplexMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

/// Entries uniform in the unit square of the complex plane, shifted to be
/// centred on zero (moduli below 1).
pub fn random_matrix_with<T: Real, R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix<T> {
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.random::<f64>() - 0.5;
        let im: f64 = rng.random::<f64>() - 0.5;
        C::new(T::of(re * 1.4), T::of(im * 1.4))
    })
}

pub fn random_matrix<T: Real>(rows: usize, cols: usize, seed: u64) -> ComplexMatrix<T> {
    random_matrix_with(rows, cols, &mut rng_from_seed(seed))
}

/// Haar-distributed unitary: Gram-Schmidt of a Ginibre matrix, which fixes
/// the phases of the triangular factor to be real positive.
pub fn random_unitary_with<T: Real, R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix<T> {
    random_isometry_with(dim, dim, rng)
}

pub fn random_unitary<T: Real>(dim: usize, seed: u64) -> ComplexMatrix<T> {
    random_unitary_with(dim, &mut rng_from_seed(seed))
}

/// Haar-random `rows x cols` isometry (`cols ≤ rows`).
pub fn random_isometry_with<T: Real, R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix<T> {
    assert!(cols >= 1 && cols <= rows, "isometry needs 1 <= cols <= rows");
    loop {
        let g: ComplexMatrix<T> = gaussian_matrix_with(rows, cols, rng);
        if let Some(q) = gram_schmidt_columns(&g) {
            return q;
        }
    }
}

fn gram_schmidt_columns<T: Real>(g: &ComplexMatrix<T>) -> Option<ComplexMatrix<T>> {
    let (rows, cols) = g.shape();
    let mut q: Vec<Vec<C<T>>> = Vec::with_capacity(cols);
    for j in 0..cols {
        let mut v: Vec<C<T>> = (0..rows).map(|i| g[(i, j)]).collect();
        // two passes for numerical orthogonality
        for _ in 0..2 {
            for u in &q {
                let overlap = u.iter().zip(&v).fold(czero::<T>(), |s, (a, b)| s + a.conj() * *b);
                for (x, a) in v.iter_mut().zip(u) {
                    *x -= *a * overlap;
                }
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
        if norm <= T::epsilon() * T::of(1e3) {
            return None;
        }
        q.push(v.into_iter().map(|z| z / norm).collect());
    }
    Some(ComplexMatrix::from_fn(rows, cols, |i, j| q[j][i]))
}

/// Unit ket drawn uniformly from the sphere (Haar on pure states).
pub fn random_ket_with<T: Real, R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix<T> {
    loop {
        let g: ComplexMatrix<T> = gaussian_matrix_with(dim, 1, rng);
        if let Some(k) = g.normalized() {
            return k;
        }
    }
}

pub fn random_ket<T: Real>(dim: usize, seed: u64) -> ComplexMatrix<T> {
    random_ket_with(dim, &mut rng_from_seed(seed))
}

/// Unit-trace density matrix `G G† / Tr(G G†)` with `G` Ginibre `dim x rank`.
pub fn random_density_with<T: Real, R: Rng + ?Sized>(dim: usize, rank: usize, rng: &mut R) -> ComplexMatrix<T> {
    let g: ComplexMatrix<T> = gaussian_matrix_with(dim, rank.max(1), rng);
    let rho = &g * &g.adjoint();
    let tr = rho.trace().re;
    rho.scale_real(tr.recip())
}

pub fn random_density<T: Real>(dim: usize, rank: usize, seed: u64) -> ComplexMatrix<T> {
    random_density_with(dim, rank, &mut rng_from_seed(seed))
}

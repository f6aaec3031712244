//! Jacobi-based decompositions.
//!
//! Both routines work for any [`Real`] scalar and are accurate to a small
//! multiple of machine epsilon on the dimensions this crate deals with
//! (tens, occasionally a few hundred).

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::scalar::{cone, creal, czero, Real, C};

const MAX_SWEEPS: usize = 100;

/// Thin singular value decomposition `m = U · diag(σ) · V†`.
#[derive(Clone, Debug)]
pub struct Svd<T: Real> {
    /// `rows x k` with orthonormal columns, `k = min(rows, cols)`.
    pub left: ComplexMatrix<T>,
    /// Nonnegative and descending.
    pub values: Vec<T>,
    /// `cols x k` with orthonormal columns.
    pub right: ComplexMatrix<T>,
}

impl<T: Real> Svd<T> {
    pub fn reconstruct(&self) -> ComplexMatrix<T> {
        let k = self.values.len();
        let scaled = ComplexMatrix::from_fn(self.left.rows(), k, |i, j| self.left[(i, j)] * self.values[j]);
        &scaled * &self.right.adjoint()
    }

    /// Number of singular values strictly above `tol`.
    pub fn rank(&self, tol: T) -> usize {
        self.values.iter().filter(|&&s| s > tol).count()
    }
}

pub fn svd<T: Real>(m: &ComplexMatrix<T>) -> Result<Svd<T>> {
    if m.rows() >= m.cols() {
        one_sided_jacobi(m)
    } else {
        let t = one_sided_jacobi(&m.adjoint())?;
        Ok(Svd {
            left: t.right,
            values: t.values,
            right: t.left,
        })
    }
}

/// Hestenes one-sided Jacobi on a tall (or square) matrix.
fn one_sided_jacobi<T: Real>(m: &ComplexMatrix<T>) -> Result<Svd<T>> {
    let rows = m.rows();
    let n = m.cols();
    // Column-major working copies keep the rotations contiguous.
    let mut a: Vec<Vec<C<T>>> = (0..n).map(|j| (0..rows).map(|i| m[(i, j)]).collect()).collect();
    let mut v: Vec<Vec<C<T>>> = (0..n)
        .map(|j| (0..n).map(|i| if i == j { cone() } else { czero() }).collect())
        .collect();
    let eps = T::epsilon();
    // columns at or below eps·‖m‖_F are numerically zero and left alone
    let floor = {
        let f = eps * m.frobenius_norm();
        f * f
    };

    let mut converged = n < 2;
    for _ in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        let mut rotated = false;
        for p in 0..n - 1 {
            for q in p + 1..n {
                let alpha: T = a[p].iter().map(|z| z.norm_sqr()).sum();
                let beta: T = a[q].iter().map(|z| z.norm_sqr()).sum();
                let gamma = a[p].iter().zip(&a[q]).fold(czero::<T>(), |s, (x, y)| s + x.conj() * *y);
                let g = gamma.norm();
                if alpha <= floor || beta <= floor || g <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (g + g);
                let sign = if zeta >= T::zero() { T::one() } else { -T::one() };
                let t = sign / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let c = (T::one() + t * t).sqrt().recip();
                let s = c * t;
                let unphase = phase.conj();
                rotate_pair(&mut a, p, q, c, s, unphase);
                rotate_pair(&mut v, p, q, c, s, unphase);
            }
        }
        converged = !rotated;
    }
    if !converged {
        return Err(Error::NoConvergence {
            algorithm: "one-sided Jacobi SVD",
            sweeps: MAX_SWEEPS,
        });
    }

    let mut order: Vec<(T, usize)> = a
        .iter()
        .enumerate()
        .map(|(j, col)| (col.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt(), j))
        .collect();
    order.sort_by(|x, y| y.0.partial_cmp(&x.0).unwrap_or(std::cmp::Ordering::Equal));

    let scale = order.first().map(|o| o.0).unwrap_or(T::zero());
    let cutoff = scale * eps * T::of_usize(rows.max(n));
    let values: Vec<T> = order.iter().map(|o| o.0).collect();
    let mut left_cols: Vec<Vec<C<T>>> = Vec::with_capacity(n);
    let mut missing = Vec::new();
    for (k, &(sigma, j)) in order.iter().enumerate() {
        if sigma > cutoff && sigma > T::zero() {
            left_cols.push(a[j].iter().map(|z| *z / sigma).collect());
        } else {
            left_cols.push(vec![czero(); rows]);
            missing.push(k);
        }
    }
    if !missing.is_empty() {
        fill_orthonormal(&mut left_cols, &missing);
    }
    let left = ComplexMatrix::from_fn(rows, n, |i, k| left_cols[k][i]);
    let right = ComplexMatrix::from_fn(n, n, |i, k| v[order[k].1][i]);
    Ok(Svd { left, values, right })
}

/// Applies `[x_p, x_q] ← [c x_p − s e^{-iφ} x_q, s x_p + c e^{-iφ} x_q]`.
fn rotate_pair<T: Real>(cols: &mut [Vec<C<T>>], p: usize, q: usize, c: T, s: T, unphase: C<T>) {
    let (lo, hi) = cols.split_at_mut(q);
    let xp = &mut lo[p];
    let xq = &mut hi[0];
    for (u, w) in xp.iter_mut().zip(xq.iter_mut()) {
        let wq = *w * unphase;
        let up = *u;
        *u = up * c - wq * s;
        *w = up * s + wq * c;
    }
}

/// Replaces the columns listed in `missing` by unit vectors orthogonal to all
/// the others (Gram-Schmidt against the computational basis).
fn fill_orthonormal<T: Real>(cols: &mut [Vec<C<T>>], missing: &[usize]) {
    let dim = cols[0].len();
    for &k in missing {
        let mut best: Option<(T, Vec<C<T>>)> = None;
        for e in 0..dim {
            let mut cand: Vec<C<T>> = (0..dim).map(|i| if i == e { cone() } else { czero() }).collect();
            for _ in 0..2 {
                for (j, other) in cols.iter().enumerate() {
                    if j == k || (missing.contains(&j) && other.iter().all(|z| z.norm_sqr() == T::zero())) {
                        continue;
                    }
                    let overlap = other
                        .iter()
                        .zip(&cand)
                        .fold(czero::<T>(), |s, (o, x)| s + o.conj() * *x);
                    for (x, o) in cand.iter_mut().zip(other) {
                        *x -= *o * overlap;
                    }
                }
            }
            let norm = cand.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
            if best.as_ref().is_none_or(|b| norm > b.0) {
                best = Some((norm, cand));
            }
        }
        let (norm, cand) = best.expect("dimension is positive");
        cols[k] = cand.into_iter().map(|z| z / norm).collect();
    }
}

/// Eigen-decomposition of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct HermitianEigen<T: Real> {
    /// Ascending.
    pub values: Vec<T>,
    /// Column `k` is the eigenvector for `values[k]`.
    pub vectors: ComplexMatrix<T>,
}

impl<T: Real> HermitianEigen<T> {
    pub fn max_value(&self) -> T {
        *self.values.last().expect("nonempty spectrum")
    }

    pub fn min_value(&self) -> T {
        self.values[0]
    }

    /// `V · diag(f(λ)) · V†`.
    pub fn apply_fn(&self, f: impl Fn(T) -> T) -> ComplexMatrix<T> {
        let n = self.values.len();
        let scaled = ComplexMatrix::from_fn(n, n, |i, k| self.vectors[(i, k)] * f(self.values[k]));
        &scaled * &self.vectors.adjoint()
    }
}

/// Cyclic complex Jacobi. Only the Hermitian part of `m` is used.
pub fn eigh<T: Real>(m: &ComplexMatrix<T>) -> Result<HermitianEigen<T>> {
    if !m.is_square() {
        return Err(Error::dims(
            "Hermitian eigensolver",
            "square matrix",
            format!("{}x{}", m.rows(), m.cols()),
        ));
    }
    let n = m.rows();
    let mut a = m.hermitian_part();
    let mut v = ComplexMatrix::identity(n);
    let eps = T::epsilon();
    let scale = a.frobenius_norm();

    let off = |a: &ComplexMatrix<T>| -> T {
        let mut s = T::zero();
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[(i, j)].norm_sqr();
                }
            }
        }
        s.sqrt()
    };

    let mut sweeps = 0;
    while off(&a) > eps * scale && scale > T::zero() {
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence {
                algorithm: "Hermitian Jacobi",
                sweeps,
            });
        }
        sweeps += 1;
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let g = apq.norm();
                if g <= eps * scale * T::of(1e-3) {
                    continue;
                }
                let unphase = (apq / g).conj();
                let theta = (a[(q, q)].re - a[(p, p)].re) / (g + g);
                let sign = if theta >= T::zero() { T::one() } else { -T::one() };
                let t = sign / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = (t * t + T::one()).sqrt().recip();
                let s = t * c;
                // J restricted to (p, q): [[c, s], [-s e^{-iφ}, c e^{-iφ}]].
                let jpp = creal(c);
                let jpq = creal(s);
                let jqp = unphase * (-s);
                let jqq = unphase * c;
                // a ← a J
                for i in 0..n {
                    let xp = a[(i, p)];
                    let xq = a[(i, q)];
                    a[(i, p)] = xp * jpp + xq * jqp;
                    a[(i, q)] = xp * jpq + xq * jqq;
                }
                // a ← J† a
                for j in 0..n {
                    let xp = a[(p, j)];
                    let xq = a[(q, j)];
                    a[(p, j)] = jpp.conj() * xp + jqp.conj() * xq;
                    a[(q, j)] = jpq.conj() * xp + jqq.conj() * xq;
                }
                a[(p, q)] = czero();
                a[(q, p)] = czero();
                for i in 0..n {
                    let xp = v[(i, p)];
                    let xq = v[(i, q)];
                    v[(i, p)] = xp * jpp + xq * jqp;
                    v[(i, q)] = xp * jpq + xq * jqq;
                }
            }
        }
    }

    let mut order: Vec<(T, usize)> = (0..n).map(|i| (a[(i, i)].re, i)).collect();
    order.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap_or(std::cmp::Ordering::Equal));
    let values = order.iter().map(|o| o.0).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |i, k| v[(i, order[k].1)]);
    Ok(HermitianEigen { values, vectors })
}

/// Square root of a positive semidefinite matrix; negative eigenvalues from
/// round-off are clamped to zero.
pub fn psd_sqrt<T: Real>(m: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    Ok(eigh(m)?.apply_fn(|x| x.max(T::zero()).sqrt()))
}

/// Largest singular value.
pub fn operator_norm<T: Real>(m: &ComplexMatrix<T>) -> Result<T> {
    Ok(svd(m)?.values[0])
}

/// Moore-Penrose pseudo-inverse, dropping singular values at or below `tol`.
pub fn pseudo_inverse<T: Real>(m: &ComplexMatrix<T>, tol: T) -> Result<ComplexMatrix<T>> {
    let s = svd(m)?;
    let k = s.values.len();
    let scaled = ComplexMatrix::from_fn(s.right.rows(), k, |i, j| {
        let sigma = s.values[j];
        if sigma > tol {
            s.right[(i, j)] / sigma
        } else {
            czero()
        }
    });
    Ok(&scaled * &s.left.adjoint())
}

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::scalar::{cone, creal, czero, Real, C};

/// Dense complex matrix stored row-major.
///
/// Kets are `n x 1`, bras are `1 x n`, scalars are `1 x 1`. Composite spaces
/// follow a single convention throughout the crate: in `A ⊗ B` the index of
/// the first factor varies slowest, so row `i` of `A ⊗ B` is
/// `i = a_row * B.rows() + b_row`.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix<T: Real> {
    rows: usize,
    cols: usize,
    data: Vec<C<T>>,
}

impl<T: Real> ComplexMatrix<T> {
    pub fn new(rows: usize, cols: usize, data: Vec<C<T>>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidInput(format!(
                "matrix dimensions must be positive, got {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::dims("matrix data length", rows * cols, data.len()));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        Self {
            rows,
            cols,
            data: vec![czero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { cone() } else { czero() })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C<T>) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from real row-major entries.
    pub fn from_real(rows: usize, cols: usize, entries: &[T]) -> Result<Self> {
        Self::new(rows, cols, entries.iter().map(|&x| creal(x)).collect())
    }

    pub fn diag(entries: &[C<T>]) -> Self {
        let n = entries.len();
        Self::from_fn(n, n, |i, j| if i == j { entries[i] } else { czero() })
    }

    pub fn diag_real(entries: &[T]) -> Self {
        let n = entries.len();
        Self::from_fn(n, n, |i, j| if i == j { creal(entries[i]) } else { czero() })
    }

    pub fn ket(amplitudes: &[C<T>]) -> Self {
        assert!(!amplitudes.is_empty(), "ket must have at least one amplitude");
        Self {
            rows: amplitudes.len(),
            cols: 1,
            data: amplitudes.to_vec(),
        }
    }

    pub fn ket_real(amplitudes: &[T]) -> Self {
        Self::ket(&amplitudes.iter().map(|&x| creal(x)).collect::<Vec<_>>())
    }

    /// Computational basis ket `|index⟩` of the given dimension.
    pub fn basis_ket(dim: usize, index: usize) -> Self {
        assert!(index < dim, "basis index {index} out of range for dimension {dim}");
        Self::from_fn(dim, 1, |i, _| if i == index { cone() } else { czero() })
    }

    pub fn scalar(value: C<T>) -> Self {
        Self {
            rows: 1,
            cols: 1,
            data: vec![value],
        }
    }

    /// Stacks kets of equal length as the columns of a matrix.
    pub fn from_columns(columns: &[ComplexMatrix<T>]) -> Result<Self> {
        let first = columns
            .first()
            .ok_or_else(|| Error::InvalidInput("no columns supplied".into()))?;
        let rows = first.rows;
        for c in columns {
            if !c.is_ket() || c.rows != rows {
                return Err(Error::dims(
                    "column stacking",
                    format!("{rows}x1"),
                    format!("{}x{}", c.rows, c.cols),
                ));
            }
        }
        Ok(Self::from_fn(rows, columns.len(), |i, j| columns[j].data[i]))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_ket(&self) -> bool {
        self.cols == 1
    }

    pub fn as_slice(&self) -> &[C<T>] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<C<T>> {
        self.data
    }

    pub fn column(&self, j: usize) -> Self {
        Self::from_fn(self.rows, 1, |i, _| self[(i, j)])
    }

    /// Keeps the first `n` columns.
    pub fn leading_columns(&self, n: usize) -> Self {
        assert!(n >= 1 && n <= self.cols);
        Self::from_fn(self.rows, n, |i, j| self[(i, j)])
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    pub fn map(&self, f: impl Fn(C<T>) -> C<T>) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| f(z)).collect(),
        }
    }

    pub fn scale(&self, factor: C<T>) -> Self {
        self.map(|z| z * factor)
    }

    pub fn scale_real(&self, factor: T) -> Self {
        self.map(|z| z * factor)
    }

    /// Reinterprets the entries with new dimensions (row-major order kept).
    pub fn reshape(&self, rows: usize, cols: usize) -> Result<Self> {
        Self::new(rows, cols, self.data.clone())
    }

    pub fn checked_mul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::dims(
                "matrix product",
                format!("{} rows on the right", self.cols),
                rhs.rows,
            ));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a.re == T::zero() && a.im == T::zero() {
                    continue;
                }
                let row = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                let dst = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (d, &b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn checked_add(&self, rhs: &Self) -> Result<Self> {
        self.zip_with(rhs, "matrix sum", |a, b| a + b)
    }

    pub fn checked_sub(&self, rhs: &Self) -> Result<Self> {
        self.zip_with(rhs, "matrix difference", |a, b| a - b)
    }

    fn zip_with(&self, rhs: &Self, context: &'static str, f: impl Fn(C<T>, C<T>) -> C<T>) -> Result<Self> {
        if self.shape() != rhs.shape() {
            return Err(Error::dims(
                context,
                format!("{}x{}", self.rows, self.cols),
                format!("{}x{}", rhs.rows, rhs.cols),
            ));
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    pub fn trace(&self) -> C<T> {
        (0..self.rows.min(self.cols)).fold(czero(), |acc, i| acc + self[(i, i)])
    }

    pub fn frobenius_norm_sqr(&self) -> T {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn frobenius_norm(&self) -> T {
        self.frobenius_norm_sqr().sqrt()
    }

    /// Frobenius distance `‖self − other‖_F`; panics on shape mismatch.
    pub fn distance(&self, other: &Self) -> T {
        assert_eq!(self.shape(), other.shape(), "shape mismatch in distance");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| (a - b).norm_sqr())
            .sum::<T>()
            .sqrt()
    }

    /// Hilbert-Schmidt inner product `Tr(self† other)`; for kets this is `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> C<T> {
        assert_eq!(self.shape(), other.shape(), "shape mismatch in inner product");
        self.data
            .iter()
            .zip(&other.data)
            .fold(czero(), |acc, (&a, &b)| acc + a.conj() * b)
    }

    /// `|self⟩⟨other|` for two kets.
    pub fn outer(&self, other: &Self) -> Self {
        assert!(self.is_ket() && other.is_ket(), "outer product expects kets");
        Self::from_fn(self.rows, other.rows, |i, j| self.data[i] * other.data[j].conj())
    }

    /// `|self⟩⟨self|`.
    pub fn projector(&self) -> Self {
        self.outer(self)
    }

    /// Returns the ket scaled to unit norm, or `None` if its norm is zero.
    pub fn normalized(&self) -> Option<Self> {
        let n = self.frobenius_norm();
        (n > T::zero()).then(|| self.scale_real(n.recip()))
    }

    pub fn hermitian_part(&self) -> Self {
        let adj = self.adjoint();
        Self::from_fn(self.rows, self.cols, |i, j| (self[(i, j)] + adj[(i, j)]) * T::of(0.5))
    }

    pub fn is_hermitian(&self, tol: T) -> bool {
        self.is_square() && self.distance(&self.adjoint()) <= tol
    }

    /// `‖self† self − I‖_F ≤ tol`, i.e. orthonormal columns.
    pub fn has_orthonormal_columns(&self, tol: T) -> bool {
        let gram = &self.adjoint() * self;
        gram.distance(&Self::identity(self.cols)) <= tol
    }

    pub fn is_unitary(&self, tol: T) -> bool {
        self.is_square() && self.has_orthonormal_columns(tol)
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().map(|z| z.norm()).fold(T::zero(), T::max)
    }

    /// Converts to another scalar precision.
    pub fn cast<U: Real>(&self) -> ComplexMatrix<U> {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .map(|z| C::new(U::of(z.re.as_f64()), U::of(z.im.as_f64())))
                .collect(),
        }
    }
}

impl<T: Real> Index<(usize, usize)> for ComplexMatrix<T> {
    type Output = C<T>;

    fn index(&self, (i, j): (usize, usize)) -> &C<T> {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of bounds");
        &self.data[i * self.cols + j]
    }
}

impl<T: Real> IndexMut<(usize, usize)> for ComplexMatrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C<T> {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of bounds");
        &mut self.data[i * self.cols + j]
    }
}

impl<T: Real> Mul for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;

    fn mul(self, rhs: Self) -> ComplexMatrix<T> {
        self.checked_mul(rhs).expect("matrix product dimensions")
    }
}

impl<T: Real> Add for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;

    fn add(self, rhs: Self) -> ComplexMatrix<T> {
        self.checked_add(rhs).expect("matrix sum dimensions")
    }
}

impl<T: Real> Sub for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;

    fn sub(self, rhs: Self) -> ComplexMatrix<T> {
        self.checked_sub(rhs).expect("matrix difference dimensions")
    }
}

impl<T: Real> Neg for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;

    fn neg(self) -> ComplexMatrix<T> {
        self.map(|z| -z)
    }
}

impl<T: Real> fmt::Debug for ComplexMatrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:+.6}{:+.6}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

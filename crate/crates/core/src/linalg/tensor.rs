use crate::error::{Error, Result};
use crate::linalg::{svd, ComplexMatrix};
use crate::scalar::{czero, Real, C};

/// Kronecker product `a ⊗ b`; row `a_row * b.rows() + b_row`.
pub fn tensor_product<T: Real>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    let (br, bc) = b.shape();
    ComplexMatrix::from_fn(a.rows() * br, a.cols() * bc, |i, j| {
        a[(i / br, j / bc)] * b[(i % br, j % bc)]
    })
}

/// Kronecker product of a sequence of factors, the first one slowest-varying.
pub fn tensor_all<T: Real>(factors: &[ComplexMatrix<T>]) -> Option<ComplexMatrix<T>> {
    let (first, rest) = factors.split_first()?;
    Some(rest.iter().fold(first.clone(), |acc, f| tensor_product(&acc, f)))
}

/// Splits a composite index into per-factor digits (first factor slowest).
fn digits(mut index: usize, dims: &[usize], out: &mut [usize]) {
    for (k, &d) in dims.iter().enumerate().rev() {
        out[k] = index % d;
        index /= d;
    }
}

fn compose(digits: &[usize], dims: &[usize]) -> usize {
    digits.iter().zip(dims).fold(0, |acc, (&x, &d)| acc * d + x)
}

/// Traces out every factor of `m` whose position is not listed in `keep`.
///
/// `dims` lists the factor dimensions of the composite space; the kept
/// factors keep their relative order in the output.
pub fn partial_trace<T: Real>(m: &ComplexMatrix<T>, dims: &[usize], keep: &[usize]) -> Result<ComplexMatrix<T>> {
    if !m.is_square() {
        return Err(Error::dims(
            "partial trace",
            "square matrix",
            format!("{}x{}", m.rows(), m.cols()),
        ));
    }
    let total: usize = dims.iter().product();
    if dims.is_empty() || dims.contains(&0) || total != m.rows() {
        return Err(Error::dims(
            "partial trace factor dimensions",
            m.rows(),
            format!("{dims:?}"),
        ));
    }
    let mut keep_sorted = keep.to_vec();
    keep_sorted.sort_unstable();
    keep_sorted.dedup();
    if keep_sorted.iter().any(|&k| k >= dims.len()) {
        return Err(Error::InvalidInput(format!(
            "kept factor out of range: {keep:?} for {} factors",
            dims.len()
        )));
    }
    let traced: Vec<usize> = (0..dims.len()).filter(|k| !keep_sorted.contains(k)).collect();
    let kept_dims: Vec<usize> = keep_sorted.iter().map(|&k| dims[k]).collect();
    let traced_dims: Vec<usize> = traced.iter().map(|&k| dims[k]).collect();
    let out_dim: usize = kept_dims.iter().product();
    let env_dim: usize = traced_dims.iter().product();

    let n = dims.len();
    let mut row_digits = vec![0; n];
    let mut col_digits = vec![0; n];
    let mut kd = vec![0; kept_dims.len()];
    let mut td = vec![0; traced_dims.len()];
    let mut out = ComplexMatrix::zeros(out_dim, out_dim);
    for r in 0..out_dim {
        for c in 0..out_dim {
            let mut acc = czero::<T>();
            for e in 0..env_dim {
                digits(e, &traced_dims, &mut td);
                digits(r, &kept_dims, &mut kd);
                for (slot, &k) in keep_sorted.iter().enumerate() {
                    row_digits[k] = kd[slot];
                }
                digits(c, &kept_dims, &mut kd);
                for (slot, &k) in keep_sorted.iter().enumerate() {
                    col_digits[k] = kd[slot];
                }
                for (slot, &k) in traced.iter().enumerate() {
                    row_digits[k] = td[slot];
                    col_digits[k] = td[slot];
                }
                acc += m[(compose(&row_digits, dims), compose(&col_digits, dims))];
            }
            out[(r, c)] = acc;
        }
    }
    Ok(out)
}

/// Rearranges an operator on `(sys ⊗ env)` into the matrix indexed by
/// `(sys_out, sys_in) x (env_out, env_in)`; rank one there is equivalent to
/// `m` being a product `A ⊗ B`.
pub fn reshuffle<T: Real>(
    m: &ComplexMatrix<T>,
    sys_out: usize,
    env_out: usize,
    sys_in: usize,
    env_in: usize,
) -> Result<ComplexMatrix<T>> {
    if m.rows() != sys_out * env_out || m.cols() != sys_in * env_in {
        return Err(Error::dims(
            "operator reshuffle",
            format!("{}x{}", sys_out * env_out, sys_in * env_in),
            format!("{}x{}", m.rows(), m.cols()),
        ));
    }
    Ok(ComplexMatrix::from_fn(sys_out * sys_in, env_out * env_in, |a, b| {
        let (so, si) = (a / sys_in, a % sys_in);
        let (eo, ei) = (b / env_in, b % env_in);
        m[(so * env_out + eo, si * env_in + ei)]
    }))
}

/// Best product approximation `sys_factor ⊗ env_factor` of an operator.
#[derive(Clone, Debug)]
pub struct FactoredPair<T: Real> {
    /// Unit Frobenius norm.
    pub sys_factor: ComplexMatrix<T>,
    /// Carries the dominant operator-Schmidt value.
    pub env_factor: ComplexMatrix<T>,
    /// Frobenius norm of what the product leaves unexplained.
    pub residual: T,
    /// Full operator-Schmidt spectrum, descending.
    pub schmidt_values: Vec<T>,
}

impl<T: Real> FactoredPair<T> {
    pub fn product(&self) -> ComplexMatrix<T> {
        tensor_product(&self.sys_factor, &self.env_factor)
    }
}

/// Operator-Schmidt factorisation of `m : (sys_in ⊗ env_in) → (sys_out ⊗ env_out)`.
pub fn factor_as_tensor<T: Real>(
    m: &ComplexMatrix<T>,
    sys_out: usize,
    env_out: usize,
    sys_in: usize,
    env_in: usize,
) -> Result<FactoredPair<T>> {
    let r = reshuffle(m, sys_out, env_out, sys_in, env_in)?;
    let s = svd(&r)?;
    let sigma = s.values[0];
    let sys_factor = ComplexMatrix::from_fn(sys_out, sys_in, |i, j| s.left[(i * sys_in + j, 0)]);
    let env_factor = ComplexMatrix::from_fn(env_out, env_in, |i, j| s.right[(i * env_in + j, 0)].conj() * sigma);
    let residual = s.values[1..].iter().map(|&x| x * x).sum::<T>().sqrt();
    Ok(FactoredPair {
        sys_factor,
        env_factor,
        residual,
        schmidt_values: s.values,
    })
}

/// `(left ⊗ I_env) · m · (right ⊗ I_env)`; used to restrict the system legs
/// of an operator to subspaces without touching environment legs.
pub fn sandwich_system_legs<T: Real>(
    left: &ComplexMatrix<T>,
    m: &ComplexMatrix<T>,
    right: &ComplexMatrix<T>,
    env_out: usize,
    env_in: usize,
) -> Result<ComplexMatrix<T>> {
    let l = tensor_product(left, &ComplexMatrix::identity(env_out));
    let r = tensor_product(right, &ComplexMatrix::identity(env_in));
    l.checked_mul(m)?.checked_mul(&r)
}

pub(crate) fn phase_of<T: Real>(z: C<T>) -> C<T> {
    let n = z.norm();
    if n == T::zero() {
        C::new(T::one(), T::zero())
    } else {
        z / n
    }
}

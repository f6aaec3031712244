//! Reference computations that do not go through the library's own
//! decompositions or conversion formulas.
#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use uuqc::Matrix;

pub fn to_nalgebra(m: &Matrix) -> DMatrix<Complex64> {
    DMatrix::from_fn(m.rows(), m.cols(), |i, j| m[(i, j)])
}

/// Descending singular values from nalgebra.
pub fn singular_values(m: &Matrix) -> Vec<f64> {
    let mut s: Vec<f64> = to_nalgebra(m).singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.partial_cmp(a).unwrap());
    s
}

/// Ascending eigenvalues of a Hermitian matrix from nalgebra.
pub fn hermitian_eigenvalues(m: &Matrix) -> Vec<f64> {
    let mut e: Vec<f64> = to_nalgebra(m).symmetric_eigenvalues().iter().copied().collect();
    e.sort_by(|a, b| a.partial_cmp(b).unwrap());
    e
}

/// Single diagonal filter `diag(f₁, f₂)` on the second party of
/// `a₁|00⟩ + a₂|11⟩`, with each `fᵢ` on a uniform grid over `[0, 1]`.
/// Returns the largest success weight among outcomes whose normalised
/// output has fidelity one with `Φ₂` (to `1e-12`).
pub fn grid_filter_oracle(amplitudes: [f64; 2], points: usize) -> f64 {
    let step = 1.0 / (points - 1) as f64;
    let mut best = 0.0f64;
    for i in 0..points {
        let f1 = i as f64 * step;
        let x = amplitudes[0] * f1;
        for j in 0..points {
            let f2 = j as f64 * step;
            let y = amplitudes[1] * f2;
            let w = x * x + y * y;
            if w <= 1e-15 {
                continue;
            }
            let fidelity = (x + y) * (x + y) / (2.0 * w);
            if 1.0 - fidelity <= 1e-12 {
                best = best.max(w);
            }
        }
    }
    best
}

/// Best total weight of `Φ_d` outcomes from `Σᵢ aᵢ|ii⟩` (with `|aᵢ|² =
/// squares[i]`, any normalisation) under a multi-outcome diagonal filter
/// measurement on the second party.
///
/// An outcome yielding `Φ_d` exactly must keep a `d`-subset `S` of
/// Schmidt terms with `fᵢ² = t/aᵢ²` on `S`; it then has weight `d·t`.
/// Completeness gives `Σ_{S∋i} t_S/aᵢ² ≤ 1` per term, so the optimum is a
/// linear program over the `t_S`, solved here by enumerating vertices.
pub fn lp_filter_oracle(squares: &[f64], d: usize) -> f64 {
    let r = squares.len();
    let subsets: Vec<Vec<usize>> = subsets_of(r, d)
        .into_iter()
        .filter(|s| s.iter().all(|&i| squares[i] > 1e-300))
        .collect();
    let m = subsets.len();
    if m == 0 {
        return 0.0;
    }
    // constraints: rows 0..r are Σ t_S/a_i² <= 1, rows r..r+m are -t <= 0
    let mut a = vec![vec![0.0; m]; r + m];
    let mut b = vec![0.0; r + m];
    for i in 0..r {
        b[i] = 1.0;
        for (k, s) in subsets.iter().enumerate() {
            if s.contains(&i) {
                a[i][k] = 1.0 / squares[i];
            }
        }
    }
    for k in 0..m {
        a[r + k][k] = -1.0;
    }
    let mut best = 0.0f64;
    for active in subsets_of(r + m, m) {
        let sys: Vec<Vec<f64>> = active.iter().map(|&c| a[c].clone()).collect();
        let rhs: Vec<f64> = active.iter().map(|&c| b[c]).collect();
        let Some(t) = solve(sys, rhs) else { continue };
        let feasible = (0..r + m).all(|c| {
            let lhs: f64 = a[c].iter().zip(&t).map(|(x, y)| x * y).sum();
            lhs <= b[c] + 1e-9 * (1.0 + b[c].abs())
        });
        if feasible {
            best = best.max(d as f64 * t.iter().sum::<f64>());
        }
    }
    best
}

fn subsets_of(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Gaussian elimination with partial pivoting; `None` if singular.
fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())?;
        if a[piv][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    Some(x)
}

/// `Σ_k Ω_k ρ Ω_k†` written out entry by entry.
pub fn apply_by_sum(elements: &[Matrix], rho: &Matrix) -> Matrix {
    let n = elements[0].rows();
    let mut out = Matrix::zeros(n, n);
    for e in elements {
        for i in 0..n {
            for j in 0..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for a in 0..rho.rows() {
                    for b in 0..rho.cols() {
                        acc += e[(i, a)] * rho[(a, b)] * e[(j, b)].conj();
                    }
                }
                out[(i, j)] += acc;
            }
        }
    }
    out
}

/// Binomial standard deviation of a rate estimated from `n` trials.
pub fn binomial_sigma(p: f64, n: f64) -> f64 {
    (p * (1.0 - p) / n).sqrt()
}

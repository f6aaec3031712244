mod common;

use common::oracles;
use num_complex::Complex64;
use proptest::prelude::*;
use uuqc::linalg::random::{random_density, random_matrix, random_unitary};
use uuqc::linalg::{eigh, factor_as_tensor, partial_trace, psd_sqrt, pseudo_inverse, svd, tensor_product};
use uuqc::{ComplexMatrix, Matrix};

fn cmp_desc(a: &[f64], b: &[f64], tol: f64) {
    assert_eq!(a.len(), b.len());
    for (x, y) in a.iter().zip(b) {
        assert!((x - y).abs() <= tol, "{a:?} vs {b:?}");
    }
}

#[test]
fn svd_small_cases() {
    let s = svd(&Matrix::identity(3)).unwrap();
    cmp_desc(&s.values, &[1.0, 1.0, 1.0], 1e-15);
    let s = svd(&Matrix::diag_real(&[3.0, 0.0])).unwrap();
    cmp_desc(&s.values, &[3.0, 0.0], 1e-15);
}

#[test]
fn svd_matches_eigenvalues_of_gram() {
    let m: Matrix = random_matrix(4, 3, 11);
    let s = svd(&m).unwrap();
    assert!(s.reconstruct().distance(&m) <= 1e-9);
    let mut from_eig: Vec<f64> = oracles::hermitian_eigenvalues(&(&m.adjoint() * &m))
        .iter()
        .map(|e| e.max(0.0).sqrt())
        .collect();
    from_eig.reverse();
    cmp_desc(&s.values, &from_eig, 1e-12);
}

#[test]
fn svd_reconstructs_up_to_64() {
    for (n, seed) in [(1usize, 1u64), (7, 2), (16, 3), (33, 4), (64, 5)] {
        let m: Matrix = random_matrix(n, n, seed);
        let s = svd(&m).unwrap();
        assert!(s.reconstruct().distance(&m) <= 1e-9, "n = {n}");
        cmp_desc(&s.values, &oracles::singular_values(&m), 1e-10);
        assert!(s.left.has_orthonormal_columns(1e-10) && s.right.has_orthonormal_columns(1e-10));
    }
}

#[test]
fn svd_wide_and_rank_deficient() {
    let m: Matrix = random_matrix(3, 7, 6);
    let s = svd(&m).unwrap();
    assert!(s.reconstruct().distance(&m) <= 1e-12);
    let k: Matrix = random_matrix(5, 1, 7);
    let r = &k * &k.adjoint();
    let s = svd(&r).unwrap();
    assert_eq!(s.rank(1e-10), 1);
    assert!(s.left.has_orthonormal_columns(1e-12));
    assert!(s.reconstruct().distance(&r) <= 1e-12);
}

#[test]
fn single_precision_svd() {
    let m: ComplexMatrix<f32> = random_matrix::<f64>(5, 4, 8).cast();
    let s = svd(&m).unwrap();
    assert!(s.reconstruct().distance(&m) < 1e-5);
}

#[test]
fn eigensolver_matches_reference() {
    for seed in 0..5 {
        let a: Matrix = random_matrix(6, 6, seed);
        let h = a.hermitian_part();
        let e = eigh(&h).unwrap();
        cmp_desc(&e.values, &oracles::hermitian_eigenvalues(&h), 1e-12);
        assert!(e.apply_fn(|x| x).distance(&h) < 1e-12);
    }
}

#[test]
fn psd_sqrt_and_pseudo_inverse() {
    let rho: Matrix = random_density(4, 4, 3);
    let s = psd_sqrt(&rho).unwrap();
    assert!((&s * &s).distance(&rho) < 1e-12);
    let m: Matrix = random_matrix(4, 4, 4);
    let inv = pseudo_inverse(&m, 1e-12).unwrap();
    assert!((&m * &inv).distance(&Matrix::identity(4)) < 1e-10);
}

#[test]
fn factor_orthogonal_pair_sum() {
    // A ⊥ C and B ⊥ D in the Hilbert-Schmidt sense: the operator-Schmidt
    // values are exactly ‖A‖‖B‖ and ‖C‖‖D‖.
    let a = Matrix::diag_real(&[1.0, 0.0]).scale_real(2.0);
    let c = Matrix::diag_real(&[0.0, 1.0]);
    let b = Matrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]).unwrap().scale_real(1.5);
    let dd = Matrix::from_real(2, 2, &[0.0, 0.0, 1.0, 0.0]).unwrap().scale_real(0.7);
    let m = &tensor_product(&a, &b) + &tensor_product(&c, &dd);
    let f = factor_as_tensor(&m, 2, 2, 2, 2).unwrap();
    assert!((f.residual - tensor_product(&c, &dd).frobenius_norm()).abs() < 1e-12);
    assert!(f.product().distance(&tensor_product(&a, &b)) < 1e-12);
}

fn matrix_strategy(rows: usize, cols: usize) -> impl Strategy<Value = Matrix> {
    proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), rows * cols).prop_map(move |v| {
        Matrix::new(
            rows,
            cols,
            v.into_iter().map(|(re, im)| Complex64::new(re, im)).collect(),
        )
        .unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn tensor_is_associative(a in matrix_strategy(2, 3), b in matrix_strategy(2, 2), c in matrix_strategy(3, 1)) {
        let left = tensor_product(&tensor_product(&a, &b), &c);
        let right = tensor_product(&a, &tensor_product(&b, &c));
        prop_assert!(left.distance(&right) <= 1e-12);
    }

    #[test]
    fn partial_trace_is_linear_and_trace_preserving(
        x in matrix_strategy(6, 6),
        y in matrix_strategy(6, 6),
        s in -2.0f64..2.0,
    ) {
        let dims = [2, 3];
        for keep in [[0usize], [1]] {
            let lhs = partial_trace(&(&x + &y.scale_real(s)), &dims, &keep).unwrap();
            let rhs = &partial_trace(&x, &dims, &keep).unwrap() + &partial_trace(&y, &dims, &keep).unwrap().scale_real(s);
            prop_assert!(lhs.distance(&rhs) <= 1e-12);
            prop_assert!((partial_trace(&x, &dims, &keep).unwrap().trace() - x.trace()).norm() <= 1e-12);
        }
    }

    #[test]
    fn factor_recovers_random_products(a in matrix_strategy(3, 2), b in matrix_strategy(2, 3)) {
        prop_assume!(a.frobenius_norm() > 1e-3 && b.frobenius_norm() > 1e-3);
        let m = tensor_product(&a, &b);
        let f = factor_as_tensor(&m, 3, 2, 2, 3).unwrap();
        prop_assert!(f.residual <= 1e-10);
        prop_assert!(f.product().distance(&m) <= 1e-9);
    }

    #[test]
    fn svd_reconstruction(m in (1usize..9, 1usize..9).prop_flat_map(|(r, c)| matrix_strategy(r, c))) {
        let s = svd(&m).unwrap();
        prop_assert!(s.reconstruct().distance(&m) <= 1e-9);
        prop_assert!(s.values.windows(2).all(|w| w[0] >= w[1]) && s.values.iter().all(|&v| v >= 0.0));
    }
}

#[test]
fn unitary_sampling_deterministic() {
    let a: Matrix = random_unitary(5, 42);
    assert_eq!(a, random_unitary(5, 42));
}

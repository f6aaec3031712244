mod common;

use common::{planted_channel, planted_map};
use uuqc::linalg::random::{random_density, random_matrix, random_unitary};
use uuqc::linalg::{factor_as_tensor, svd, tensor_product};
use uuqc::unambiguous::{
    certify_uum, certify_uuqc, extend_by_identity, heralded_action, probability_profile, refine, restrict, EnvBases,
    EnvInput,
};
use uuqc::{Channel, Layout, Matrix, Subspace};

const TOL: f64 = 1e-9;

#[test]
fn random_uums_have_flat_profiles() {
    let mut count = 0;
    for seed in 0..50u64 {
        let d = 2 + (seed % 2) as usize;
        let (ei, eo) = (1 + (seed % 3) as usize, 1 + ((seed / 3) % 3) as usize);
        let m = planted_map(
            d,
            (seed % 2) as usize,
            1,
            ei,
            eo,
            0.1 + 0.8 * ((seed % 7) as f64 / 7.0),
            seed,
        );
        let cert = certify_uum(&m.omega, &m.layout, TOL).unwrap();
        assert!(cert.is_uum, "seed {seed}");
        let prof = probability_profile(&m.omega, &m.layout, 100, seed + 1000).unwrap();
        assert!(prof.spread() <= 1e-9, "seed {seed}: spread {}", prof.spread());
        assert!((prof.mean() - cert.probability).abs() <= 1e-9);
        count += 1;
    }
    assert_eq!(count, 50);
}

#[test]
fn profile_of_fixed_probability() {
    let m = planted_map(3, 0, 0, 2, 2, 0.42, 77);
    let prof = probability_profile(&m.omega, &m.layout, 100, 5).unwrap();
    for p in &prof.samples {
        assert!((p - 0.42).abs() <= 1e-10);
    }
}

#[test]
fn certification_round_trip() {
    for seed in 0..30u64 {
        let m = planted_map(
            2 + (seed % 2) as usize,
            1,
            2,
            2,
            3,
            0.3 + 0.02 * seed as f64,
            seed + 500,
        );
        let cert = certify_uum(&m.omega, &m.layout, TOL).unwrap();
        assert!(cert.is_uum);
        assert!(cert.residual <= 1e-9);
        assert!((cert.probability - m.theta.frobenius_norm_sqr()).abs() <= 1e-9);
        assert!((cert.probability - cert.env_factor.frobenius_norm_sqr()).abs() <= 1e-9);
        let d = m.unitary.rows() as f64;
        assert!((m.unitary.inner(&cert.unitary).norm() - d).abs() <= 1e-9);
        assert!(cert.unitary.is_unitary(1e-9));
        let rebuilt = tensor_product(&cert.unitary, &cert.env_factor);
        let restricted = restrict(&m.omega, &m.layout).unwrap();
        assert!(rebuilt.distance(&restricted) <= cert.residual + 1e-9);
    }
}

#[test]
fn non_product_is_rejected_with_spectrum() {
    // (U ⊗ Θ₁ + W ⊗ Θ₂) with W orthogonal to U inside the subspace.
    let u: Matrix = random_unitary(2, 1);
    let z = Matrix::diag_real(&[1.0, -1.0]);
    let w = &u * &z;
    let t1: Matrix = random_matrix(2, 2, 2);
    let omega = &tensor_product(&u, &t1) + &tensor_product(&w, &t1.scale_real(0.5).adjoint());
    let layout = Layout::full(2, 2, 2).unwrap();
    let cert = certify_uum(&omega, &layout, TOL).unwrap();
    assert!(!cert.is_uum);
    assert!(cert.residual > 1e-3);
    assert!(cert.schmidt_values.len() == 4 && cert.schmidt_values[1] > 1e-3);
}

#[test]
fn sum_of_probabilities_matches_definition() {
    for seed in 0..20u64 {
        let d = 2 + (seed % 2) as usize;
        let pc = planted_channel(d, 1, 2, 2, 2 + (seed % 3) as usize, 0.5 + 0.02 * seed as f64, seed);
        let cert = certify_uuqc(&pc.channel, &pc.layout, TOL).unwrap();
        assert!(cert.is_uuqc, "seed {seed}");
        assert!((cert.total_probability - pc.q).abs() <= 1e-9);
        // independent evaluation of the channel-level definition
        let u = cert.unitary.as_ref().unwrap();
        for k in 0..3 {
            let rho: Matrix = random_density(d, 1 + k % d, seed * 10 + k as u64);
            let action = heralded_action(&pc.channel, &pc.layout, &rho, &EnvInput::Identity).unwrap();
            let q_direct = action.trace().re / rho.trace().re;
            assert!((q_direct - cert.total_probability).abs() <= 1e-9);
            let expected = (&(u * &rho) * &u.adjoint()).scale_real(pc.q);
            assert!(action.distance(&expected) <= 1e-9);
        }
        assert!((cert.direct_probability.unwrap() - pc.q).abs() <= 1e-9);
    }
}

#[test]
fn two_element_example() {
    let u: Matrix = random_unitary(2, 9);
    let ta = Matrix::from_real(1, 2, &[0.6, 0.8]).unwrap();
    let tb = Matrix::from_real(1, 2, &[1.0, 0.0]).unwrap();
    let ch = Channel::new(vec![
        tensor_product(&u, &ta).scale_real(0.3f64.sqrt()),
        tensor_product(&u, &tb).scale_real(0.5f64.sqrt()),
    ])
    .unwrap();
    let layout = Layout::full(2, 2, 1).unwrap();
    let cert = certify_uuqc(&ch, &layout, TOL).unwrap();
    assert!(cert.is_uuqc);
    assert!((cert.total_probability - 0.8).abs() < 1e-12);
    assert!(cert.definition_residual.unwrap() < 1e-12);
}

#[test]
fn ancilla_state_input() {
    let pc = planted_channel(2, 0, 2, 1, 1, 0.7, 3);
    let sigma = Matrix::diag_real(&[1.0, 0.0]);
    let rho: Matrix = random_density(2, 2, 4);
    let action = heralded_action(&pc.channel, &pc.layout, &rho, &EnvInput::State(sigma)).unwrap();
    let expected_weight = pc.thetas[0][(0, 0)].norm_sqr();
    assert!((action.trace().re - expected_weight).abs() < 1e-12);
}

#[test]
fn refinement_gives_rank_one_factors() {
    for seed in 0..15u64 {
        let d = 2 + (seed % 2) as usize;
        let pc = planted_channel(d, 1, 2, 3, 2, 0.6, 100 + seed);
        let refined = refine(&pc.channel, &pc.layout, &EnvBases::computational(2, 3), TOL).unwrap();
        let cert = certify_uuqc(&refined, &pc.layout, TOL).unwrap();
        assert!(cert.is_uuqc);
        assert!((cert.total_probability - pc.q).abs() <= 1e-9);
        let original = certify_uuqc(&pc.channel, &pc.layout, TOL).unwrap();
        let (u0, u1) = (original.unitary.unwrap(), cert.unitary.unwrap());
        assert!((u0.inner(&u1).norm() - d as f64).abs() <= 1e-9);
        for e in refined.elements() {
            let f = factor_as_tensor(&restrict(e, &pc.layout).unwrap(), d, 3, d, 2).unwrap();
            let s = svd(&f.env_factor).unwrap();
            assert!(s.values.get(1).copied().unwrap_or(0.0) <= 1e-9);
        }
    }
}

#[test]
fn refinement_weights_follow_entrywise_sum() {
    let u: Matrix = random_unitary(2, 21);
    let t1: Matrix = random_matrix(2, 2, 22).scale_real(0.4);
    let t2: Matrix = random_matrix(2, 2, 23).scale_real(0.4);
    let ch = Channel::new(vec![tensor_product(&u, &t1), tensor_product(&u, &t2)]).unwrap();
    let layout = Layout::full(2, 2, 2).unwrap();
    let refined = refine(&ch, &layout, &EnvBases::computational(2, 2), TOL).unwrap();
    assert_eq!(refined.len(), 4);
    // element order: input env index slowest
    let mut k = 0;
    for i_in in 0..2 {
        for i_out in 0..2 {
            let w = (t1[(i_out, i_in)].norm_sqr() + t2[(i_out, i_in)].norm_sqr()).sqrt();
            let f = factor_as_tensor(&refined.elements()[k], 2, 2, 2, 2).unwrap();
            assert!((f.schmidt_values[0] - w * 2f64.sqrt()).abs() < 1e-12);
            assert!((f.env_factor[(i_out, i_in)].norm() - f.env_factor.frobenius_norm()).abs() < 1e-12);
            k += 1;
        }
    }
}

#[test]
fn refinement_in_rotated_bases() {
    let pc = planted_channel(2, 0, 2, 2, 2, 0.9, 31);
    let b_in: Matrix = random_unitary(2, 32);
    let b_out: Matrix = random_unitary(2, 33);
    let bases = EnvBases {
        input: vec![b_in],
        output: vec![b_out],
    };
    let refined = refine(&pc.channel, &pc.layout, &bases, TOL).unwrap();
    let cert = certify_uuqc(&refined, &pc.layout, TOL).unwrap();
    assert!((cert.total_probability - 0.9).abs() <= 1e-9);
    let bad = EnvBases {
        input: vec![Matrix::diag_real(&[1.0, 0.5])],
        output: vec![Matrix::identity(2)],
    };
    assert!(refine(&pc.channel, &pc.layout, &bad, TOL).is_err());
}

#[test]
fn multi_leg_environment_bases() {
    // two input legs of dimension 2 make env_in = 4
    let pc = planted_channel(2, 0, 4, 1, 1, 0.5, 41);
    let bases = EnvBases {
        input: vec![Matrix::identity(2), random_unitary(2, 42)],
        output: vec![],
    };
    let refined = refine(&pc.channel, &pc.layout, &bases, TOL).unwrap();
    assert!(refined.len() <= 4);
    let cert = certify_uuqc(&refined, &pc.layout, TOL).unwrap();
    assert!((cert.total_probability - 0.5).abs() <= 1e-9);
}

#[test]
fn extension_preserves_probability() {
    for ancilla in 2..=4 {
        let pc = planted_channel(2, 1, 1, 2, 2, 0.8, 60 + ancilla as u64);
        let ext = extend_by_identity(&pc.channel, ancilla);
        let layout = pc.layout.with_ancilla(ancilla);
        let cert = certify_uuqc(&ext, &layout, TOL).unwrap();
        assert!(cert.is_uuqc);
        assert!((cert.total_probability - 0.8).abs() <= 1e-9);
        let base = certify_uuqc(&pc.channel, &pc.layout, TOL).unwrap().unitary.unwrap();
        let expected = tensor_product(&Matrix::identity(ancilla), &base);
        let got = cert.unitary.unwrap();
        assert!((expected.inner(&got).norm() - (2 * ancilla) as f64).abs() <= 1e-9);
    }
    let pc = planted_channel(2, 0, 1, 1, 1, 0.8, 70);
    assert_eq!(extend_by_identity(&pc.channel, 1), pc.channel);
}

#[test]
fn subspace_validation() {
    let not_iso = Matrix::from_real(2, 1, &[1.0, 1.0]).unwrap();
    assert!(Subspace::new(not_iso, TOL).is_err());
}

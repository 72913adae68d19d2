use modcurv::error::Error;
use modcurv::oracle::{
    cos_mode, engine_functions, gauss_bonnet_residual, gauss_bonnet_residual_with, matrix_rearrangement_check,
    random_matrix, rearrangement_error, residual_ratio_test, Family, QuadratureSpec, RearrangementCase, MAX_DIM,
};
use modcurv::theta::{FourierElement, SkewMatrix, C64};
use modcurv::verify::{gauss_bonnet_h, matrix_cases};
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const CAP: i64 = 40;

#[test]
fn matrix_error_shrinks_with_quadrature_tolerance() {
    let case = RearrangementCase { family: Family::H(2, 2, 1), k_between: (1, 0) };
    let mut last = f64::INFINITY;
    for tol in [1e-2, 1e-4, 1e-6, 1e-8, 1e-10, 1e-12] {
        let err = matrix_rearrangement_check(4, 11, &case, &QuadratureSpec::with_tol(tol)).unwrap();
        assert!(err <= last * 1.5 + 1e-13, "tol {tol}: {err} after {last}");
        last = err;
    }
    assert!(last < 1e-9);
}

#[test]
fn diagonal_k_reduces_to_scalar_identities() {
    let k = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![0.3, 1.0, 2.5, 4.0]));
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (r1, r2) = (random_matrix(4, &mut rng), random_matrix(4, &mut rng));
    for (name, case) in matrix_cases() {
        let rho2 = case.family.is_two_variable().then_some(&r2);
        let err = rearrangement_error(&k, &r1, rho2, &case, &QuadratureSpec::default()).unwrap();
        assert!(err < 1e-9, "{name}: {err}");
    }
}

#[test]
fn matrix_size_limits() {
    let case = RearrangementCase::plain(Family::K(2, 1));
    assert!(matrix_rearrangement_check(1, 0, &case, &QuadratureSpec::default()).unwrap() < 1e-10);
    for dim in [0, MAX_DIM + 1] {
        assert!(matches!(matrix_rearrangement_check(dim, 0, &case, &QuadratureSpec::default()), Err(Error::Precondition(_))));
    }
}

#[test]
fn nonpositive_k_is_rejected() {
    let k = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, -0.5]));
    let rho = DMatrix::identity(2, 2);
    let case = RearrangementCase::plain(Family::K(2, 1));
    assert!(matches!(rearrangement_error(&k, &rho, None, &case, &QuadratureSpec::default()), Err(Error::Precondition(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn matrix_identity_holds_for_random_instances(seed in 0u64..10_000, dim in 1usize..=5, which in 0usize..5) {
        let (name, case) = &matrix_cases()[which];
        let err = matrix_rearrangement_check(dim, seed, case, &QuadratureSpec::default()).unwrap();
        prop_assert!(err <= 1e-6, "{name} seed {seed} dim {dim}: {err}");
    }
}

fn small_h(amps: &[f64; 3]) -> FourierElement<C64> {
    cos_mode([1, 0], amps[0]).add(&cos_mode([0, 1], amps[1])).add(&cos_mode([1, -1], amps[2]))
}

#[test]
fn zero_perturbation_has_zero_residual() {
    let h = FourierElement::<C64>::zero(2);
    assert_eq!(gauss_bonnet_residual(&h, &SkewMatrix::theta2(0.3), 8, CAP).unwrap(), 0.0);
}

#[test]
fn commutative_and_irrational_residuals() {
    let h = gauss_bonnet_h();
    assert!(gauss_bonnet_residual(&h, &SkewMatrix::theta2(0.0), 8, CAP).unwrap() < 1e-8);
    assert!(gauss_bonnet_residual(&h, &SkewMatrix::theta2(1.0 / 2f64.sqrt()), 8, CAP).unwrap() < 1e-6);
}

/// Truncating the series at first order leaves a residual well above noise;
/// it must still shrink at least quadratically.
#[test]
fn truncated_series_scales_quadratically() {
    let h = gauss_bonnet_h();
    let t = residual_ratio_test(&h, &SkewMatrix::theta2(1.0 / 2f64.sqrt()), 1, CAP, &[0.5, 0.25]).unwrap();
    assert!(t.base > 1e-9, "order-1 residual {} is too small to test scaling", t.base);
    assert!(t.pass, "worst ratio {}", t.worst_ratio());
}

/// The gradient function with the opposite sign breaks the identity at
/// second order in `h`.
#[test]
fn flipped_gradient_sign_leaves_quadratic_residual() {
    let (k, g) = engine_functions().unwrap();
    let bad = g.neg();
    let h = gauss_bonnet_h();
    let th = SkewMatrix::theta2(1.0 / 3.0);
    let r = gauss_bonnet_residual_with(&k, &bad, &h, &th, 8, CAP).unwrap();
    let r_half = gauss_bonnet_residual_with(&k, &bad, &h.scale(&C64::new(0.5, 0.0)), &th, 8, CAP).unwrap();
    assert!(r > 1e-4, "{r}");
    let ratio = r_half / (0.25 * r);
    assert!((ratio - 1.0).abs() < 0.05, "ratio {ratio}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn residual_vanishes_for_random_perturbations(
        a in -0.03f64..0.03, b in -0.03f64..0.03, c in -0.02f64..0.02, theta in -1.0f64..1.0,
    ) {
        let r = gauss_bonnet_residual(&small_h(&[a, b, c]), &SkewMatrix::theta2(theta), 8, CAP).unwrap();
        prop_assert!(r < 1e-6, "residual {r}");
    }
}

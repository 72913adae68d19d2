use modcurv::error::Error;
use modcurv::modular::{derive_curvature, family_integral_dim2, integrate_dim2, q, Channel, Operator, SymbolicFunction};
use modcurv::oracle::{quad_power_integral, taylor_coefficients};
use modcurv::verify::{reference_spec, signature_by_quadrature};
use num::{ToPrimitive, Zero};
use proptest::prelude::*;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

fn point() -> impl Strategy<Value = (f64, f64)> {
    (0.05f64..20.0, 0.05f64..20.0)
}

fn exps() -> impl Strategy<Value = Vec<u32>> {
    prop_oneof![
        (0u32..=4, 0u32..=4).prop_map(|(a, b)| vec![a, b]),
        (0u32..=3, 0u32..=3, 0u32..=3).prop_map(|(a, b, c)| vec![a, b, c]),
    ]
    .prop_filter("convergent and not trivially shorter", |e| e.iter().sum::<u32>() >= 2 && *e.last().unwrap() > 0)
}

/// Sum of the double Taylor series around `s = t = 1` at `s = e^z1, t = e^z2`.
fn taylor_sum(f: &SymbolicFunction, order: usize, z1: f64, z2: f64) -> f64 {
    let c = taylor_coefficients(f, order).unwrap();
    let mut v = 0.0;
    for (i, row) in c.iter().enumerate() {
        for (j, x) in row.iter().enumerate() {
            v += x.to_f64().unwrap() * z1.powi(i as i32) * z2.powi(j as i32);
        }
    }
    v
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn each_signature_matches_quadrature((s, t) in point()) {
        let r = derive_curvature(2, Operator::Kdelta).unwrap();
        for sig in &r.signatures {
            let exact = integrate_dim2(sig).unwrap().eval(s, t).unwrap();
            let quad = signature_by_quadrature(sig, s, t, &reference_spec()).unwrap();
            prop_assert!(rel(exact, quad) <= 1e-9, "{sig} at ({s}, {t}): {exact} vs {quad}");
        }
    }

    #[test]
    fn family_integrals_match_quadrature(e in exps(), (s, t) in point()) {
        let total: u32 = e.iter().sum();
        let exact = family_integral_dim2(&e).unwrap().eval(s, t).unwrap();
        let scales = [1.0, s, s * t];
        let quad = quad_power_integral(total as i32 - 2, &e, &scales[..e.len()], &reference_spec()).unwrap();
        prop_assert!(rel(exact, quad) <= 1e-9, "{e:?} at ({s}, {t})");
    }

    /// Substituting `r = u/s` swaps the first two poles; the scales become `[1, 1/s, t]`.
    #[test]
    fn scaling_law(e in exps(), (s, t) in point()) {
        let total: u32 = e.iter().sum();
        let mut swapped = e.clone();
        swapped.swap(0, 1);
        let lhs = family_integral_dim2(&e).unwrap().eval(s, t).unwrap();
        let rhs = s.powi(1 - total as i32) * family_integral_dim2(&swapped).unwrap().eval(1.0 / s, s * t).unwrap();
        prop_assert!(rel(lhs, rhs) <= 1e-9, "{e:?} at ({s}, {t})");
    }

    #[test]
    fn taylor_series_sums_to_the_function(z1 in -0.1f64..0.1, z2 in -0.1f64..0.1) {
        let r = derive_curvature(2, Operator::Kdelta).unwrap();
        let k = r.k.eval(z1.exp(), 1.0).unwrap();
        prop_assert!((taylor_sum(&r.k, 14, z1, 0.0) - k).abs() <= 1e-12);
        let g = r.g.eval(z1.exp(), z2.exp()).unwrap();
        prop_assert!((taylor_sum(&r.g, 14, z1, z2) - g).abs() <= 1e-12);
    }
}

#[test]
fn every_signature_has_cancelling_log_residues() {
    for (m, op) in [(2, Operator::Kdelta), (2, Operator::Nc4tori)] {
        let Ok(r) = derive_curvature(m, op) else { continue };
        for sig in &r.signatures {
            integrate_dim2(sig).unwrap_or_else(|e| panic!("{sig}: {e}"));
        }
    }
    // total power 1 diverges; lone poles with unequal scales leave logs behind
    assert!(matches!(family_integral_dim2(&[1]), Err(Error::Divergent(_))));
    assert!(matches!(family_integral_dim2(&[1, 0]), Err(Error::Divergent(_))));
}

#[test]
fn k_powers_follow_dimension() {
    for m in [2usize, 4, 6, 8] {
        let p = derive_curvature(m, Operator::Kdelta).unwrap().k_powers;
        let h = (m / 2) as i32;
        assert_eq!((p.hess, p.grad, p.scalar), (-h, -h - 1, 1 - h), "m = {m}");
    }
    let p = derive_curvature(4, Operator::Nc4tori).unwrap().k_powers;
    assert_eq!((p.hess, p.grad, p.scalar), (-2, -3, -1));
}

#[test]
fn dimension_four_kdelta_is_flat() {
    let r = derive_curvature(4, Operator::Kdelta).unwrap();
    assert!(r.k.is_zero() && r.g.is_zero());
    assert_eq!(r.scalar_constant(), (q(1, 96), -2));
}

#[test]
fn scalar_constants() {
    for (m, c, pi) in [(2usize, q(1, 24), -1), (4, q(1, 96), -2), (6, q(1, 384), -3)] {
        assert_eq!(derive_curvature(m, Operator::Kdelta).unwrap().scalar_constant(), (c, pi), "m = {m}");
    }
}

#[test]
fn channels_use_their_variables() {
    let r = derive_curvature(2, Operator::Kdelta).unwrap();
    for sig in &r.signatures {
        let f = integrate_dim2(sig).unwrap();
        let two = sig.b0_exponents.len() == 3;
        assert_eq!(f.is_two_variable(), two, "{sig}");
        assert_eq!(sig.channel == Channel::Grad, two, "{sig}");
    }
    assert!(!r.k.is_two_variable());
    assert!(r.g.is_two_variable());
}

#[test]
fn values_at_the_diagonal() {
    let r = derive_curvature(2, Operator::Kdelta).unwrap();
    let k = taylor_coefficients(&r.k, 0).unwrap()[0][0].clone();
    let g = taylor_coefficients(&r.g, 0).unwrap()[0][0].clone();
    assert_eq!((k, g), (q(1, 12), q(-1, 12)));
    assert!((r.k.eval(1.0, 1.0).unwrap() - 1.0 / 12.0).abs() < 1e-12);
    assert!((r.g.eval(1.0, 1.0).unwrap() + 1.0 / 12.0).abs() < 1e-12);
    assert!(!r.c_scalar.is_zero());
}

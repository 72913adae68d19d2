use modcurv::cosphere::sphere_average;
use modcurv::modular::{averaged_b2, Operator};
use modcurv::symbol::{
    horizontal, parse_expr, rational, resolvent_b, resolvent_terms, vertical, Atom, Expr, Idx, Kind, Symbols,
};
use modcurv::symbol::Word;
use nalgebra::DMatrix;
use num::{ToPrimitive, Zero};
use proptest::prelude::*;
use std::collections::{BTreeMap, BTreeSet};

// `k` and `b0` obey `(k |xi|^2 - lambda) b0 = 1`, so two correct derivations
// can print differently. Laws are therefore checked on a matrix model.

/// Atoms whose `D` and `nabla` rules are both closed.
fn atom() -> impl Strategy<Value = Atom> {
    prop_oneof![
        (1i32..=3).prop_map(Atom::b0),
        (-2i32..=2).prop_filter("nonzero", |p| *p != 0).prop_map(Atom::k),
        (1i32..=2).prop_map(Atom::xi2),
        Just(Atom::new(Kind::GradK, vec![Idx::Free(0)])),
        Just(Atom::new(Kind::Lambda, vec![])),
    ]
}

fn word() -> impl Strategy<Value = Vec<Atom>> {
    prop::collection::vec(atom(), 1..=4).prop_map(|mut v| {
        // at most one free label 0
        let mut seen = false;
        v.retain(|a| {
            if a.kind == Kind::GradK {
                let keep = !seen;
                seen = true;
                keep
            } else {
                true
            }
        });
        v
    })
}

fn expr(atoms: Vec<Atom>, n: i64) -> Expr {
    Expr::from_atoms(rational(n, 3), atoms).unwrap()
}

/// Evaluates expressions in a concrete model: `k`, `GradK[i]`, `HessK[i,j]`
/// become matrices, `xi` a covector in `R^2`, `lambda` a negative number.
/// Dummy slots are summed, free slots are bound by `free`.
struct Model {
    k: DMatrix<f64>,
    grad: Vec<DMatrix<f64>>,
    hess: Vec<Vec<DMatrix<f64>>>,
    xi: [f64; 2],
    lambda: f64,
}

impl Model {
    fn new(seed: u64) -> Model {
        let mut s = seed.wrapping_mul(0x9e37_79b9_7f4a_7c15) | 1;
        let mut u = move || {
            s ^= s << 13;
            s ^= s >> 7;
            s ^= s << 17;
            (s >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
        };
        let n = 3;
        let sym = |u: &mut dyn FnMut() -> f64| {
            let a = DMatrix::from_fn(n, n, |_, _| u());
            (&a + a.transpose()) * 0.5
        };
        let a = DMatrix::from_fn(n, n, |_, _| u());
        let k = &a * a.transpose() + DMatrix::identity(n, n);
        let grad = vec![sym(&mut u), sym(&mut u)];
        let h01 = sym(&mut u);
        let hess = vec![vec![sym(&mut u), h01.clone()], vec![h01, sym(&mut u)]];
        Model { k, grad, hess, xi: [u(), 0.5 + u().abs()], lambda: -1.0 - u().abs() }
    }

    fn xi2(&self) -> f64 {
        self.xi[0] * self.xi[0] + self.xi[1] * self.xi[1]
    }

    fn power(&self, m: &DMatrix<f64>, p: i32) -> DMatrix<f64> {
        let base = if p < 0 { m.clone().try_inverse().unwrap() } else { m.clone() };
        (0..p.unsigned_abs()).fold(DMatrix::identity(m.nrows(), m.nrows()), |acc, _| acc * &base)
    }

    fn word(&self, w: &Word, slot: &dyn Fn(Idx) -> usize) -> DMatrix<f64> {
        let n = self.k.nrows();
        let mut m = DMatrix::identity(n, n);
        let mut c = 1.0;
        for a in w.atoms() {
            let i = |j: usize| slot(a.slots[j]);
            match a.kind {
                Kind::B0 => {
                    let b = (&self.k * self.xi2() - DMatrix::identity(n, n) * self.lambda).try_inverse().unwrap();
                    m *= self.power(&b, a.pow);
                }
                Kind::K => m *= self.power(&self.k, a.pow),
                Kind::GradK => m *= &self.grad[i(0)],
                Kind::HessK => m *= &self.hess[i(0)][i(1)],
                Kind::Xi2 => c *= self.xi2().powi(a.pow),
                Kind::Lambda => c *= self.lambda.powi(a.pow),
                Kind::DXi2 => c *= 2.0 * self.xi[i(0)],
                Kind::D2Xi2 => c *= if i(0) == i(1) { 2.0 } else { 0.0 },
                k => panic!("no model for {k:?}"),
            }
        }
        m * c
    }

    fn eval(&self, e: &Expr, free: &BTreeMap<u8, usize>) -> DMatrix<f64> {
        let n = self.k.nrows();
        let mut total = DMatrix::zeros(n, n);
        for (w, c) in e.terms() {
            assert!(c.im.is_zero(), "only real coefficients arise here");
            let c = c.re.to_f64().unwrap();
            let dummies: Vec<u8> = w
                .atoms()
                .flat_map(|a| a.slots.iter())
                .filter_map(|s| if let Idx::Dummy(d) = s { Some(*d) } else { None })
                .collect::<BTreeSet<_>>()
                .into_iter()
                .collect();
            for code in 0..1usize << dummies.len() {
                let slot = |s: Idx| match s {
                    Idx::Free(f) => free[&f],
                    Idx::Dummy(d) => (code >> dummies.iter().position(|x| *x == d).unwrap()) & 1,
                };
                total += self.word(w, &slot) * c;
            }
        }
        total
    }
}

fn free_labels(es: &[&Expr]) -> Vec<u8> {
    let mut s = BTreeSet::new();
    for e in es {
        for (w, _) in e.terms() {
            s.extend(w.free_labels().into_keys());
        }
    }
    s.into_iter().collect()
}

/// Largest entrywise gap between two expressions over all bindings of free labels.
fn model_gap(a: &Expr, b: &Expr, seed: u64) -> f64 {
    let model = Model::new(seed);
    let labels = free_labels(&[a, b]);
    let mut worst: f64 = 0.0;
    for code in 0..1usize << labels.len() {
        let free: BTreeMap<u8, usize> = labels.iter().enumerate().map(|(i, l)| (*l, (code >> i) & 1)).collect();
        let (x, y) = (model.eval(a, &free), model.eval(b, &free));
        worst = worst.max((&x - &y).amax() / (1.0 + x.amax()));
    }
    worst
}

const MODEL_TOL: f64 = 1e-11;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn vertical_and_horizontal_commute(w in word(), n in 1i64..5) {
        let e = expr(w, n);
        let (f1, f2) = (5u8, 6u8);
        let dn = vertical(&horizontal(&e, f1).unwrap(), f2).unwrap();
        let nd = horizontal(&vertical(&e, f2).unwrap(), f1).unwrap();
        prop_assert!(model_gap(&dn, &nd, 1) < MODEL_TOL);
        prop_assert!(model_gap(&dn, &nd, 2) < MODEL_TOL);
    }

    #[test]
    fn vertical_leibniz(a in word(), b in word()) {
        // relabel the second factor's free index to keep labels distinct
        let b: Vec<Atom> = b.into_iter().map(|x| if x.kind == Kind::GradK { Atom::new(Kind::GradK, vec![Idx::Free(1)]) } else { x }).collect();
        let (p, q) = (expr(a, 1), expr(b, 2));
        let f = 7u8;
        let lhs = vertical(&p.mul(&q).unwrap(), f).unwrap();
        let rhs = vertical(&p, f).unwrap().mul(&q).unwrap().add(&p.mul(&vertical(&q, f).unwrap()).unwrap());
        prop_assert!(model_gap(&lhs, &rhs, 3) < MODEL_TOL);
    }

    #[test]
    fn horizontal_leibniz(a in word(), b in word()) {
        let b: Vec<Atom> = b.into_iter().map(|x| if x.kind == Kind::GradK { Atom::new(Kind::GradK, vec![Idx::Free(1)]) } else { x }).collect();
        let (p, q) = (expr(a, 1), expr(b, 2));
        let f = 7u8;
        let lhs = horizontal(&p.mul(&q).unwrap(), f).unwrap();
        let rhs = horizontal(&p, f).unwrap().mul(&q).unwrap().add(&p.mul(&horizontal(&q, f).unwrap()).unwrap());
        prop_assert!(model_gap(&lhs, &rhs, 3) < MODEL_TOL);
    }

    #[test]
    fn canonical_form_is_a_fixed_point(w in word(), n in 1i64..5) {
        let e = horizontal(&vertical(&expr(w, n), 3).unwrap(), 4).unwrap();
        let again = parse_expr(&e.to_string()).unwrap();
        prop_assert_eq!(again, e);
    }
}

#[test]
fn derivatives_commute_on_parametrix_inputs() {
    for src in ["1 * b0", "1 * b0^2 * k", "1 * k * Xi2", "1 * b0 * GradK[a] * b0 * Xi2"] {
        let e = parse_expr(src).unwrap();
        let dn = vertical(&horizontal(&e, 8).unwrap(), 9).unwrap();
        let nd = horizontal(&vertical(&e, 9).unwrap(), 8).unwrap();
        assert!(model_gap(&dn, &nd, 4) < MODEL_TOL, "{src}");
    }
}

#[test]
fn parametrix_grading() {
    for sym in [Symbols::kdelta(), Symbols::nc4tori()] {
        let terms = resolvent_terms(2, &sym).unwrap();
        for (kappa, b) in terms.iter().enumerate() {
            assert_eq!(b.homogeneity_degrees(), vec![-2 - kappa as i32], "b{kappa} of {}", sym.name);
        }
    }
}

#[test]
fn coefficients_stay_gaussian_and_average_to_real() {
    for m in [2usize, 4, 6] {
        let avg = averaged_b2(m, Operator::Kdelta).unwrap();
        assert!(avg.is_real());
        let allowed = [Kind::B0, Kind::K, Kind::GradK, Kind::HessK, Kind::Xi2, Kind::Lambda, Kind::Ginv, Kind::SDelta];
        for (w, _) in avg.terms() {
            assert!(w.atoms().all(|a| allowed.contains(&a.kind)), "{w:?}");
        }
    }
    let avg = sphere_average(&resolvent_b(2, &Symbols::nc4tori()).unwrap(), 4).unwrap();
    assert!(avg.is_real());
}

#[test]
fn model_separates_words() {
    let p = |s: &str| parse_expr(s).unwrap();
    assert!(model_gap(&p("1 * b0 * k * b0"), &p("1 * b0^2 * k"), 5) < MODEL_TOL);
    assert!(model_gap(&p("1 * b0 * GradK[i0] * b0"), &p("1 * b0^2 * GradK[i0]"), 5) > 1e-3);
    // (k |xi|^2 - lambda) b0 = 1
    assert!(model_gap(&p("1 * k * Xi2 * b0 + -1 * lambda * b0"), &Expr::one(), 6) < MODEL_TOL);
}

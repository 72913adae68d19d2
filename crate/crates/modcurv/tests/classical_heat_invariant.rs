//! At theta = 0 the modular curvature must reduce to the classical second
//! heat invariant. For `P = -(g^{ij} d_i d_j + a^i d_i + b)` the density is
//! `(4 pi)^{-m/2} sqrt(g) (E + R/6)`; with `g^{ij} = k delta^{ij}` it has to
//! equal `Vol(S^{m-1}) (2 pi)^{-m} [k^{-m/2} K(1) sum d_i^2 k
//! + k^{-m/2-1} G(1,1) sum (d_i k)^2]`. Everything is evaluated exactly on
//! 2-jets of a quadratic `k` at a rational point.

use modcurv::modular::{derive_curvature, Operator, SymbolicFunction};
use modcurv::oracle::taylor_coefficients;
use num::{BigRational, One, Zero};
use std::collections::BTreeMap;

type Q = BigRational;

fn q(n: i64, d: i64) -> Q {
    Q::new(n.into(), d.into())
}

/// Truncated Taylor polynomial around a point, exact through total degree `ord`.
#[derive(Clone, Debug)]
struct Jet {
    ord: usize,
    c: BTreeMap<Vec<u32>, Q>,
}

impl Jet {
    fn constant(m: usize, ord: usize, v: Q) -> Jet {
        let mut c = BTreeMap::new();
        if !v.is_zero() {
            c.insert(vec![0; m], v);
        }
        Jet { ord, c }
    }

    fn value(&self) -> Q {
        self.c.iter().find(|(e, _)| e.iter().all(|&x| x == 0)).map(|(_, v)| v.clone()).unwrap_or_else(Q::zero)
    }

    fn truncate(mut self, ord: usize) -> Jet {
        self.c.retain(|e, v| e.iter().sum::<u32>() as usize <= ord && !v.is_zero());
        self.ord = ord;
        self
    }

    fn add(&self, o: &Jet) -> Jet {
        let mut c = self.c.clone();
        for (e, v) in &o.c {
            *c.entry(e.clone()).or_insert_with(Q::zero) += v;
        }
        Jet { ord: self.ord.min(o.ord), c }.truncate(self.ord.min(o.ord))
    }

    fn scale(&self, s: &Q) -> Jet {
        Jet { ord: self.ord, c: self.c.iter().map(|(e, v)| (e.clone(), v * s)).collect() }.truncate(self.ord)
    }

    fn sub(&self, o: &Jet) -> Jet {
        self.add(&o.scale(&-Q::one()))
    }

    fn mul(&self, o: &Jet) -> Jet {
        let ord = self.ord.min(o.ord);
        let mut c: BTreeMap<Vec<u32>, Q> = BTreeMap::new();
        for (a, x) in &self.c {
            for (b, y) in &o.c {
                let e: Vec<u32> = a.iter().zip(b).map(|(i, j)| i + j).collect();
                if e.iter().sum::<u32>() as usize <= ord {
                    *c.entry(e).or_insert_with(Q::zero) += x * y;
                }
            }
        }
        Jet { ord, c }.truncate(ord)
    }

    fn recip(&self, m: usize) -> Jet {
        let f0 = self.value();
        let u = self.sub(&Jet::constant(m, self.ord, f0.clone())).scale(&(Q::one() / &f0));
        // 1/f = (1/f0) sum (-u)^n
        let mut sum = Jet::constant(m, self.ord, Q::one());
        let mut p = Jet::constant(m, self.ord, Q::one());
        for _ in 0..self.ord {
            p = p.mul(&u).scale(&-Q::one());
            sum = sum.add(&p);
        }
        sum.scale(&(Q::one() / f0))
    }

    fn diff(&self, i: usize) -> Jet {
        let mut c = BTreeMap::new();
        for (e, v) in &self.c {
            if e[i] > 0 {
                let mut f = e.clone();
                f[i] -= 1;
                c.insert(f, v * q(e[i] as i64, 1));
            }
        }
        let ord = self.ord.saturating_sub(1);
        Jet { ord, c }.truncate(ord)
    }
}

/// `k(x0 + y) = k0 + sum g_i y_i + sum h_ij y_i y_j` from a deterministic
/// pseudo-random rational quadratic.
fn weyl_factor(m: usize) -> Jet {
    let mut state = 0x2545_f491_u64 + m as u64;
    let mut next = |lo: i64, hi: i64| {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        lo + ((state >> 33) % (hi - lo + 1) as u64) as i64
    };
    let mut c = BTreeMap::new();
    c.insert(vec![0; m], q(2, 1) + q(next(-4, 4), 9));
    for i in 0..m {
        let mut e = vec![0; m];
        e[i] = 1;
        c.insert(e, q(next(-3, 3), 5));
    }
    for i in 0..m {
        for j in i..m {
            let mut e = vec![0; m];
            e[i] += 1;
            e[j] += 1;
            c.insert(e, q(next(-3, 3), 7));
        }
    }
    Jet { ord: 2, c }.truncate(2)
}

/// Returns `lhs - rhs` with the common factor `pi^{-m/2}` removed.
fn classical_residual(m: usize, lower_order: bool, k1: &Q, g11: &Q) -> Q {
    let k = weyl_factor(m);
    let one = |o| Jet::constant(m, o, Q::one());
    let kinv = k.recip(m);
    let ginv = |i: usize, j: usize| if i == j { k.clone() } else { Jet::constant(m, 2, Q::zero()) };
    let g = |i: usize, j: usize| if i == j { kinv.clone() } else { Jet::constant(m, 2, Q::zero()) };
    let dk: Vec<Jet> = (0..m).map(|i| k.diff(i)).collect();
    let lap_k = (0..m).fold(Jet::constant(m, 0, Q::zero()), |a, i| a.add(&dk[i].diff(i)));
    let grad2 = (0..m).fold(Jet::constant(m, 1, Q::zero()), |a, i| a.add(&dk[i].mul(&dk[i])));

    let a: Vec<Jet> = (0..m).map(|i| if lower_order { dk[i].clone() } else { Jet::constant(m, 1, Q::zero()) }).collect();
    let b = if lower_order { lap_k.add(&grad2.mul(&kinv)).scale(&-Q::one()) } else { Jet::constant(m, 0, Q::zero()) };

    let half = q(1, 2);
    // gam[c][i][j] = Gamma^c_{ij}
    let gam: Vec<Vec<Vec<Jet>>> = (0..m)
        .map(|c| {
            (0..m)
                .map(|i| {
                    (0..m)
                        .map(|j| {
                            (0..m).fold(Jet::constant(m, 1, Q::zero()), |acc, l| {
                                let t = g(j, l).diff(i).add(&g(i, l).diff(j)).sub(&g(i, j).diff(l));
                                acc.add(&ginv(c, l).mul(&t).scale(&half))
                            })
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    let omega: Vec<Jet> = (0..m)
        .map(|d| {
            (0..m).fold(Jet::constant(m, 1, Q::zero()), |acc, n| {
                let mut inner = a[n].clone();
                for mu in 0..m {
                    for sg in 0..m {
                        inner = inner.add(&ginv(mu, sg).mul(&gam[n][mu][sg]));
                    }
                }
                acc.add(&g(n, d).mul(&inner).scale(&half))
            })
        })
        .collect();
    let mut e = b;
    for n in 0..m {
        for mu in 0..m {
            let mut t = omega[n].diff(mu).add(&omega[n].mul(&omega[mu]));
            for sg in 0..m {
                t = t.sub(&omega[sg].mul(&gam[sg][n][mu]));
            }
            e = e.sub(&ginv(n, mu).mul(&t));
        }
    }
    let riem = |r: usize, s: usize, mu: usize, nu: usize| {
        let mut t = gam[r][nu][s].diff(mu).sub(&gam[r][mu][s].diff(nu));
        for l in 0..m {
            t = t.add(&gam[r][mu][l].mul(&gam[l][nu][s])).sub(&gam[r][nu][l].mul(&gam[l][mu][s]));
        }
        t
    };
    let mut scal = Jet::constant(m, 0, Q::zero());
    for s in 0..m {
        for nu in 0..m {
            let ric = (0..m).fold(Jet::constant(m, 0, Q::zero()), |acc, r| acc.add(&riem(r, s, r, nu)));
            scal = scal.add(&ginv(s, nu).mul(&ric));
        }
    }
    let h = m / 2;
    let mut k_pow = one(2);
    for _ in 0..h {
        k_pow = k_pow.mul(&kinv);
    }
    let four: Q = (0..h).fold(Q::one(), |acc, _| acc * q(1, 4));
    let lhs = four * (k_pow.value() * (e.value() + scal.value() * q(1, 6)));
    // Vol(S^{m-1}) (2 pi)^{-m} = 2^{1-m} / (m/2-1)! * pi^{-m/2}
    let fact: Q = (1..h as i64).fold(Q::one(), |acc, j| acc * q(j, 1));
    let vol = (0..m - 1).fold(Q::one(), |acc, _| acc * q(1, 2)) / fact;
    let rhs = vol * (k_pow.value() * k1 * lap_k.value() + k_pow.value() * kinv.value() * g11 * grad2.value());
    lhs - rhs
}

fn at_one(f: &SymbolicFunction) -> Q {
    taylor_coefficients(f, 0).unwrap()[0][0].clone()
}

fn engine_values(m: usize, op: Operator) -> (Q, Q) {
    let r = derive_curvature(m, op).unwrap();
    (at_one(&r.k), at_one(&r.g))
}

#[test]
fn jets_differentiate_exactly() {
    let k = weyl_factor(2);
    let kk = k.mul(&k);
    // d_0 (k^2) = 2 k d_0 k through first order
    assert!(kk.diff(0).sub(&k.mul(&k.diff(0)).scale(&q(2, 1))).c.is_empty());
    assert_eq!(k.mul(&k.recip(2)).value(), Q::one());
    assert!(k.mul(&k.recip(2)).sub(&Jet::constant(2, 2, Q::one())).c.is_empty());
}

#[test]
fn dim2_kdelta_matches_classical_invariant() {
    let (k1, g11) = engine_values(2, Operator::Kdelta);
    assert_eq!(k1, q(1, 12));
    assert_eq!(classical_residual(2, false, &k1, &g11), Q::zero());
}

#[test]
fn dim2_flipped_gradient_sign_is_rejected() {
    let (k1, g11) = engine_values(2, Operator::Kdelta);
    assert_ne!(classical_residual(2, false, &k1, &-g11), Q::zero());
}

#[test]
fn dim4_kdelta_matches_classical_invariant() {
    let (k1, g11) = engine_values(4, Operator::Kdelta);
    assert_eq!(classical_residual(4, false, &k1, &g11), Q::zero());
}

#[test]
fn dim6_kdelta_matches_classical_invariant() {
    let (k1, g11) = engine_values(6, Operator::Kdelta);
    assert_eq!(classical_residual(6, false, &k1, &g11), Q::zero());
}

#[test]
fn nc4tori_matches_classical_invariant() {
    let (k1, g11) = engine_values(4, Operator::Nc4tori);
    assert_eq!((k1.clone(), g11.clone()), (q(-3, 4), q(-3, 8)));
    assert_eq!(classical_residual(4, true, &k1, &g11), Q::zero());
}

#[test]
fn nc4tori_alternative_values_are_rejected() {
    for (k1, g11) in [(q(-1, 4), q(-1, 8)), (q(1, 4), q(-1, 8))] {
        assert_ne!(classical_residual(4, true, &k1, &g11), Q::zero());
    }
}

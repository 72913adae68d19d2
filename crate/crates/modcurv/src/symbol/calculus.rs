//! Vertical (`D`, in `xi`) and horizontal (`nabla`, in `x`) derivatives,
//! the composition terms `a_j`, and the resolvent parametrix `b_kappa`.
//!
//! Derivative rules are a closed table: an atom without a rule is an error.
//! All geometric data are evaluated at the centre of normal coordinates, so
//! `nabla` kills `|xi|^2`, its `xi`-derivatives, and the metric.

use super::atom::{Atom, Idx, Kind};
use super::expr::Expr;
use super::monomial::{imaginary, rational, Coeff, Word};
use crate::error::{Error, Result};
use num::One;

type Repl = Vec<(Coeff, Vec<Atom>)>;

fn missing(op: &'static str, a: &Atom) -> Error {
    Error::RuleMissing { op, atom: a.to_string() }
}

fn grad(f: u8) -> Atom {
    Atom::new(Kind::GradK, vec![Idx::Free(f)])
}

fn d_atom(a: &Atom, f: u8) -> Result<Repl> {
    let one = Coeff::one();
    Ok(match a.kind {
        Kind::B0 => {
            let n = a.pow as i64;
            vec![(rational(-n, 1), vec![Atom::b0(a.pow + 1), Atom::k(1), Atom::new(Kind::DXi2, vec![Idx::Free(f)])])]
        }
        Kind::Xi2 => {
            let n = a.pow as i64;
            vec![(rational(n, 1), vec![Atom::xi2(a.pow - 1), Atom::new(Kind::DXi2, vec![Idx::Free(f)])])]
        }
        Kind::DXi2 => vec![(one, vec![Atom::new(Kind::D2Xi2, vec![a.slots[0], Idx::Free(f)])])],
        Kind::K | Kind::GradK | Kind::HessK | Kind::Lambda | Kind::SDelta | Kind::Ginv | Kind::D2Xi2 => vec![],
        Kind::Nabla2Xi2 | Kind::Nabla3L | Kind::P1 | Kind::P0 => return Err(missing("D", a)),
    })
}

fn nabla_atom(a: &Atom, f: u8) -> Result<Repl> {
    Ok(match a.kind {
        Kind::B0 => {
            let n = a.pow;
            (0..n)
                .map(|i| (rational(-1, 1), vec![Atom::b0(i + 1), grad(f), Atom::b0(n - i), Atom::xi2(1)]))
                .collect()
        }
        Kind::K if a.pow > 0 => {
            let n = a.pow;
            (0..n).map(|i| (Coeff::one(), vec![Atom::k(i), grad(f), Atom::k(n - 1 - i)])).collect()
        }
        Kind::K => {
            let n = -a.pow;
            (0..n).map(|i| (rational(-1, 1), vec![Atom::k(-(i + 1)), grad(f), Atom::k(-(n - i))])).collect()
        }
        Kind::GradK => vec![(Coeff::one(), vec![Atom::new(Kind::HessK, vec![a.slots[0], Idx::Free(f)])])],
        Kind::Xi2 | Kind::Lambda | Kind::DXi2 | Kind::Ginv => vec![],
        Kind::HessK | Kind::SDelta | Kind::D2Xi2 | Kind::Nabla2Xi2 | Kind::Nabla3L | Kind::P1 | Kind::P0 => {
            return Err(missing("nabla", a))
        }
    })
}

/// Apply a first-order derivation atom by atom (Leibniz rule).
fn derive_with(e: &Expr, f: u8, rule: fn(&Atom, u8) -> Result<Repl>) -> Result<Expr> {
    let mut out = Expr::zero();
    for (w, c) in e.terms() {
        let atoms: Vec<&Atom> = w.atoms().collect();
        for i in 0..atoms.len() {
            for (rc, repl) in rule(atoms[i], f)? {
                let mut v: Vec<Atom> = atoms[..i].iter().map(|a| (*a).clone()).collect();
                v.extend(repl);
                v.extend(atoms[i + 1..].iter().map(|a| (*a).clone()));
                out.add_word(Word::canonical(v)?, c * rc);
            }
        }
    }
    Ok(out)
}

/// `D` with a new upper slot labelled `Free(f)`.
pub fn vertical(e: &Expr, f: u8) -> Result<Expr> {
    derive_with(e, f, d_atom)
}

/// `nabla` with a new lower slot labelled `Free(f)`.
pub fn horizontal(e: &Expr, f: u8) -> Result<Expr> {
    derive_with(e, f, nabla_atom)
}

/// Second covariant derivative `nabla^2` with slots `(f1, f2)`.
///
/// Iterated `nabla` misses the second derivative of `|xi|^2`, which is not
/// zero at the centre; it is restored here for `Xi2` and for the `|xi|^2`
/// hidden inside `b0`.
pub fn horizontal2(e: &Expr, f1: u8, f2: u8) -> Result<Expr> {
    let mut out = horizontal(&horizontal(e, f1)?, f2)?;
    let n2 = || Atom::new(Kind::Nabla2Xi2, vec![Idx::Free(f1), Idx::Free(f2)]);
    for (w, c) in e.terms() {
        let atoms: Vec<&Atom> = w.atoms().collect();
        for i in 0..atoms.len() {
            let a = atoms[i];
            let repl = match a.kind {
                Kind::Xi2 => vec![Atom::xi2(a.pow - 1), n2()],
                Kind::B0 => vec![Atom::b0(a.pow + 1), Atom::k(1), n2()],
                Kind::DXi2 | Kind::D2Xi2 => return Err(missing("nabla^2", a)),
                _ => continue,
            };
            let coef = match a.kind {
                Kind::Xi2 => rational(a.pow as i64, 1),
                _ => rational(-(a.pow as i64), 1),
            };
            let mut v: Vec<Atom> = atoms[..i].iter().map(|x| (*x).clone()).collect();
            v.extend(repl);
            v.extend(atoms[i + 1..].iter().map(|x| (*x).clone()));
            out.add_word(Word::canonical(v)?, c * coef);
        }
    }
    Ok(out)
}

fn fresh(exprs: &[&Expr]) -> u8 {
    exprs.iter().filter_map(|e| e.max_free()).max().map_or(0, |m| m + 1)
}

/// Composition terms of the symbol product.
///
/// `a_0 = p q`, `a_1 = -i (Dp)(nabla q)`,
/// `a_2 = -1/2 (D^2 p)(nabla^2 q) - 1/2 (Dp)(D^2 q)(nabla^3 l)`.
pub fn a_j(j: usize, p: &Expr, q: &Expr) -> Result<Expr> {
    let f = fresh(&[p, q]);
    match j {
        0 => p.mul(q),
        1 => vertical(p, f)?.mul(&horizontal(q, f)?).map(|e| e.scale(&imaginary(-1, 1))),
        2 => {
            let (f1, f2, f3) = (f, f + 1, f + 2);
            let d2p = vertical(&vertical(p, f1)?, f2)?;
            let first = d2p.mul(&horizontal2(q, f1, f2)?)?;
            let n3 = Expr::atom(Atom::new(Kind::Nabla3L, vec![Idx::Free(f1), Idx::Free(f2), Idx::Free(f3)]));
            let d2q = vertical(&vertical(q, f1)?, f2)?;
            let second = Expr::mul_all(&[&vertical(p, f3)?, &d2q, &n3])?;
            Ok(first.add(&second).scale(&rational(-1, 2)))
        }
        _ => Err(Error::Usage(format!("a_j is implemented for j <= 2, got {j}"))),
    }
}

/// Homogeneous components `p_2, p_1, p_0` of the operator symbol.
#[derive(Clone, Debug)]
pub struct Symbols {
    pub name: &'static str,
    pub p: [Expr; 3],
}

impl Symbols {
    /// `p_2(lambda) = k |xi|^2 - lambda`.
    pub fn p2() -> Expr {
        Expr::atom(Atom::k(1))
            .mul(&Expr::atom(Atom::xi2(1)))
            .expect("scalar product")
            .sub(&Expr::atom(Atom::pow(Kind::Lambda, 1)))
    }

    /// The conformally perturbed Laplacian `k Delta`.
    pub fn kdelta() -> Symbols {
        Symbols { name: "kdelta", p: [Symbols::p2(), Expr::zero(), Expr::zero()] }
    }

    /// Lower-order terms kept as opaque atoms; `D` and `nabla` of them fail.
    pub fn opaque() -> Symbols {
        Symbols { name: "opaque", p: [Symbols::p2(), Expr::atom(Atom::pow(Kind::P1, 1)), Expr::atom(Atom::pow(Kind::P0, 1))] }
    }

    /// The perturbed Laplacian on the noncommutative four-torus:
    /// `p_1 = -i/2 (nabla k) D|xi|^2`, `p_0 = -Delta k + (nabla k) k^{-1} (nabla k) g^{-1}`,
    /// with `-Delta k = (nabla^2 k) g^{-1}`.
    pub fn nc4tori() -> Symbols {
        let (a, b) = (Idx::Dummy(0), Idx::Dummy(1));
        let p1 = Expr::from_atoms(imaginary(-1, 2), vec![Atom::new(Kind::GradK, vec![a]), Atom::new(Kind::DXi2, vec![a])])
            .expect("canonical");
        let hess = Expr::from_atoms(Coeff::one(), vec![Atom::new(Kind::HessK, vec![a, b]), Atom::new(Kind::Ginv, vec![a, b])])
            .expect("canonical");
        let grad2 = Expr::from_atoms(
            Coeff::one(),
            vec![Atom::new(Kind::GradK, vec![a]), Atom::k(-1), Atom::new(Kind::GradK, vec![b]), Atom::new(Kind::Ginv, vec![a, b])],
        )
        .expect("canonical");
        Symbols { name: "nc4tori", p: [Symbols::p2(), p1, hess.add(&grad2)] }
    }

    /// `p_mu` for `mu` in `{0, 1, 2}`.
    pub fn p(&self, mu: usize) -> &Expr {
        &self.p[2 - mu]
    }
}

/// The parametrix terms `b_0, .., b_kappa` by the recursion
/// `b_kappa = -(sum a_j(b_nu, p_mu)) b_0` over `j + nu + 2 - mu = kappa`, `nu < kappa`.
pub fn resolvent_terms(kappa: usize, symbols: &Symbols) -> Result<Vec<Expr>> {
    let b0 = Expr::atom(Atom::b0(1));
    let mut b: Vec<Expr> = vec![b0.clone()];
    for k in 1..=kappa {
        let mut acc = Expr::zero();
        for nu in 0..k {
            for mu in 0..=2usize {
                let Some(j) = (k + mu).checked_sub(nu + 2) else { continue };
                if j > 2 || symbols.p(mu).is_zero() {
                    continue;
                }
                acc = acc.add(&a_j(j, &b[nu], symbols.p(mu))?);
            }
        }
        let bk = acc.mul(&b0)?.scale(&rational(-1, 1));
        let want = -2 - k as i32;
        if let Some(bad) = bk.homogeneity_degrees().into_iter().find(|&h| h != want) {
            return Err(Error::Homogeneity(format!("b_{k} has a term of degree {bad}, expected {want}")));
        }
        b.push(bk);
    }
    Ok(b)
}

/// `b_kappa` alone.
pub fn resolvent_b(kappa: usize, symbols: &Symbols) -> Result<Expr> {
    Ok(resolvent_terms(kappa, symbols)?.pop().expect("nonempty"))
}

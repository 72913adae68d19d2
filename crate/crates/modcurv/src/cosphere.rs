//! Averaging symbols over the unit cosphere `S^{m-1}`.
//!
//! The only primitive is the moment formula
//! `avg(xi_{a_1} .. xi_{a_2n}) = sum over pairings of prod delta / (m (m+2) .. (m+2n-2))`.
//! Composite rules for the curvature atoms are derived from it by contracting
//! against an exact algebraic curvature tensor, using
//! `nabla^3 l_{ijk} = -1/3 xi_p (R_{pikj} + R_{pjki})`,
//! `(nabla^2 |xi|^2)_{jk} = 2/3 xi_p xi_i R_{pjik}` and `S = sum R_{pkpk}`.
//! The factor `Vol(S^{m-1})` is not included.

use crate::error::{Error, Result};
use crate::symbol::{rational, Atom, Coeff, Expr, Idx, Kind, Word};
use num::{BigRational, One, Zero};

type Q = BigRational;

fn q(n: i64, d: i64) -> Q {
    Q::new(n.into(), d.into())
}

/// Average of `xi_{a_1} .. xi_{a_k}` over the unit sphere in `R^m`.
pub fn sphere_moment(m: usize, idx: &[usize]) -> Q {
    if idx.len() % 2 == 1 {
        return Q::zero();
    }
    if idx.is_empty() {
        return Q::one();
    }
    // Sum over pairings of the first index with each later one.
    let n = idx.len() / 2;
    let mut total = Q::zero();
    let first = idx[0];
    for j in 1..idx.len() {
        if idx[j] != first {
            continue;
        }
        let rest: Vec<usize> = idx[1..].iter().enumerate().filter(|(k, _)| k + 1 != j).map(|(_, &v)| v).collect();
        total += pairing_count(&rest);
    }
    let mut den = Q::one();
    for j in 0..n {
        den *= Q::from_integer(((m + 2 * j) as i64).into());
    }
    total / den
}

fn pairing_count(idx: &[usize]) -> Q {
    if idx.is_empty() {
        return Q::one();
    }
    let mut total = Q::zero();
    for j in 1..idx.len() {
        if idx[j] == idx[0] {
            let rest: Vec<usize> = idx[1..].iter().enumerate().filter(|(k, _)| k + 1 != j).map(|(_, &v)| v).collect();
            total += pairing_count(&rest);
        }
    }
    total
}

/// Coefficients of the composite substitutions in dimension `m`.
#[derive(Clone, Debug, PartialEq)]
pub struct SphereRules {
    pub m: usize,
    /// `(D|xi|^2)_a (D|xi|^2)_b -> pair * |xi|^2 g^{ab}`.
    pub pair: Q,
    /// `D^2|xi|^2 -> d2 * g^{-1}`.
    pub d2: Q,
    /// `(D|xi|^2)(D^2|xi|^2)(nabla^3 l)` contracted `-> nabla3 * S`.
    pub nabla3: Q,
    /// `(D^2|xi|^2)(nabla^2|xi|^2)` contracted `-> nabla2_d2 * S`.
    pub nabla2_d2: Q,
    /// `(D|xi|^2)^2 (nabla^2|xi|^2)` contracted `-> nabla2_dd * S |xi|^2`.
    pub nabla2_dd: Q,
}

/// Kulkarni-Nomizu product `(A wedge B)_{abcd}`.
fn curvature(m: usize) -> Vec<Q> {
    let a = |i: usize, j: usize| -> Q {
        let base = if i == j { (i + 2) as i64 } else { ((i + j) % 3) as i64 - 1 };
        q(base, 1)
    };
    let b = |i: usize, j: usize| -> Q {
        let base = if i == j { 1 } else { ((i * j + 1) % 2) as i64 };
        q(base, 1)
    };
    let mut r = vec![Q::zero(); m * m * m * m];
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                for l in 0..m {
                    r[((i * m + j) * m + k) * m + l] =
                        a(i, k) * b(j, l) + a(j, l) * b(i, k) - a(i, l) * b(j, k) - a(j, k) * b(i, l);
                }
            }
        }
    }
    r
}

impl SphereRules {
    pub fn derive(m: usize) -> Result<SphereRules> {
        if m < 2 || m % 2 == 1 {
            return Err(Error::Usage(format!("dimension must be even and at least 2, got {m}")));
        }
        let r = curvature(m);
        let rr = |a: usize, b: usize, c: usize, d: usize| r[((a * m + b) * m + c) * m + d].clone();
        let mut s = Q::zero();
        for p in 0..m {
            for k in 0..m {
                s += rr(p, k, p, k);
            }
        }
        if s.is_zero() {
            return Err(Error::IncompleteSubstitution("degenerate test curvature".into()));
        }
        let pair = q(4, 1) * sphere_moment(m, &[0, 0]);
        let d2 = q(2, 1);
        // D_k |xi|^2 = 2 xi_k, D^2_{ij} |xi|^2 = 2 delta_ij.
        let mut n3 = Q::zero();
        for i in 0..m {
            for k in 0..m {
                for p in 0..m {
                    let t = (rr(p, i, k, i) + rr(p, i, k, i)) * q(-1, 3);
                    if !t.is_zero() {
                        n3 += q(4, 1) * t * sphere_moment(m, &[k, p]);
                    }
                }
            }
        }
        let mut n2d2 = Q::zero();
        for j in 0..m {
            for p in 0..m {
                for i in 0..m {
                    let t = rr(p, j, i, j) * q(2, 3);
                    if !t.is_zero() {
                        n2d2 += q(2, 1) * t * sphere_moment(m, &[p, i]);
                    }
                }
            }
        }
        let mut n2dd = Q::zero();
        for j in 0..m {
            for k in 0..m {
                for p in 0..m {
                    for i in 0..m {
                        let t = rr(p, j, i, k) * q(2, 3);
                        if !t.is_zero() {
                            n2dd += q(4, 1) * t * sphere_moment(m, &[j, k, p, i]);
                        }
                    }
                }
            }
        }
        Ok(SphereRules { m, pair, d2, nabla3: n3 / &s, nabla2_d2: n2d2 / &s, nabla2_dd: n2dd / &s })
    }
}

fn slot(a: &Atom, i: usize) -> Idx {
    a.slots[i]
}

/// Average one canonical word; returns a list of (coefficient, atoms).
fn average_word(w: &Word, rules: &SphereRules) -> Result<Vec<(Coeff, Vec<Atom>)>> {
    if w.xi_degree() % 2 == 1 {
        return Ok(Vec::new());
    }
    let mut central: Vec<Atom> = w.central.clone();
    let mut coeff = Coeff::one();
    let take = |central: &mut Vec<Atom>, pred: &dyn Fn(&Atom) -> bool| -> Option<Atom> {
        let i = central.iter().position(pred)?;
        Some(central.remove(i))
    };
    let as_coeff = |x: &Q| Coeff::new(x.clone(), Q::zero());

    while let Some(n3) = take(&mut central, &|a| a.kind == Kind::Nabla3L) {
        let (x, y, z) = (slot(&n3, 0), slot(&n3, 1), slot(&n3, 2));
        let d2 = take(&mut central, &|a| {
            a.kind == Kind::D2Xi2 && ((a.slots[0] == x && a.slots[1] == y) || (a.slots[0] == y && a.slots[1] == x))
        });
        let d1 = take(&mut central, &|a| a.kind == Kind::DXi2 && a.slots[0] == z);
        match (d2, d1) {
            (Some(_), Some(_)) => {
                coeff *= as_coeff(&rules.nabla3);
                central.push(Atom::pow(Kind::SDelta, 1));
                central.push(Atom::xi2(1));
            }
            _ => return Err(Error::IncompleteSubstitution(format!("Nabla3L contraction in {w}"))),
        }
    }
    while let Some(n2) = take(&mut central, &|a| a.kind == Kind::Nabla2Xi2) {
        let (x, y) = (slot(&n2, 0), slot(&n2, 1));
        if let Some(_d2) = take(&mut central, &|a| {
            a.kind == Kind::D2Xi2 && ((a.slots[0] == x && a.slots[1] == y) || (a.slots[0] == y && a.slots[1] == x))
        }) {
            coeff *= as_coeff(&rules.nabla2_d2);
            central.push(Atom::pow(Kind::SDelta, 1));
            central.push(Atom::xi2(1));
            continue;
        }
        let dx = take(&mut central, &|a| a.kind == Kind::DXi2 && a.slots[0] == x);
        let dy = take(&mut central, &|a| a.kind == Kind::DXi2 && a.slots[0] == y);
        let others = central.iter().any(|a| a.kind == Kind::DXi2);
        match (dx, dy) {
            (Some(_), Some(_)) if !others => {
                coeff *= as_coeff(&rules.nabla2_dd);
                central.push(Atom::pow(Kind::SDelta, 1));
                central.push(Atom::xi2(2));
            }
            _ => return Err(Error::IncompleteSubstitution(format!("Nabla2Xi2 contraction in {w}"))),
        }
    }
    // Remaining D|xi|^2 factors: the moment primitive over all pairings.
    let ds: Vec<Atom> = central.iter().filter(|a| a.kind == Kind::DXi2).cloned().collect();
    central.retain(|a| a.kind != Kind::DXi2);
    let mut d2_out = Vec::new();
    for a in central.iter_mut() {
        if a.kind == Kind::D2Xi2 {
            coeff *= as_coeff(&rules.d2);
            d2_out.push(Atom::new(Kind::Ginv, a.slots.clone()));
        }
    }
    central.retain(|a| a.kind != Kind::D2Xi2);
    central.extend(d2_out);
    if let Some(bad) = central.iter().find(|a| matches!(a.kind, Kind::Nabla2Xi2 | Kind::Nabla3L | Kind::D2Xi2)) {
        return Err(Error::IncompleteSubstitution(format!("{bad} left in {w}")));
    }
    let n = ds.len() / 2;
    let mut base = central.clone();
    base.extend(w.nc.iter().cloned());
    if n == 0 {
        return Ok(vec![(coeff, base)]);
    }
    // 2^{2n} |xi|^{2n} / (m (m+2) ..) times each pairing of the upper slots.
    let mut scale = q(1, 1);
    for j in 0..n {
        scale *= q(4, (rules.m + 2 * j) as i64);
    }
    let slots: Vec<Idx> = ds.iter().map(|a| a.slots[0]).collect();
    let mut out = Vec::new();
    for pairing in pairings(&slots) {
        let mut atoms = base.clone();
        atoms.push(Atom::xi2(n as i32));
        for (x, y) in pairing {
            atoms.push(Atom::new(Kind::Ginv, vec![x, y]));
        }
        out.push((coeff.clone() * as_coeff(&scale), atoms));
    }
    Ok(out)
}

fn pairings(v: &[Idx]) -> Vec<Vec<(Idx, Idx)>> {
    if v.is_empty() {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for j in 1..v.len() {
        let rest: Vec<Idx> = v[1..].iter().enumerate().filter(|(k, _)| k + 1 != j).map(|(_, x)| *x).collect();
        for mut p in pairings(&rest) {
            p.insert(0, (v[0], v[j]));
            out.push(p);
        }
    }
    out
}

/// Average an expression over `S^{m-1}`; the result has real coefficients and
/// contains no `D|xi|^2`, `D^2|xi|^2`, `nabla^2|xi|^2` or `nabla^3 l` atoms.
pub fn sphere_average(e: &Expr, m: usize) -> Result<Expr> {
    let rules = SphereRules::derive(m)?;
    sphere_average_with(e, &rules)
}

pub fn sphere_average_with(e: &Expr, rules: &SphereRules) -> Result<Expr> {
    let mut out = Expr::zero();
    for (w, c) in e.terms() {
        for (rc, mut atoms) in average_word(w, rules)? {
            // Keep noncentral order: average_word put central atoms first.
            atoms.sort_by_key(|a| a.kind.is_central());
            let word = Word::canonical(atoms)?;
            out.add_word(word, c * rc);
        }
    }
    if !out.is_real() {
        return Err(Error::NonRealCoefficient(out.to_string()));
    }
    Ok(out)
}

/// `4 / m`, exposed for reports.
pub fn pair_coefficient(m: usize) -> Coeff {
    rational(4, m as i64)
}

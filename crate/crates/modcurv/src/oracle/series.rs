//! Exact Taylor coefficients of `f(e^{z1}, e^{z2})` at the origin for a
//! [`SymbolicFunction`] whose denominators only vanish on `s = 1`, `t = 1`
//! or `st = 1`.

use crate::error::{Error, Result};
use crate::modular::{q, Basis, Factor, Poly2, SymbolicFunction, Q};
use num::{One, Zero};
use std::collections::BTreeMap;

/// Truncated bivariate power series, coefficient `c[i][j]` of `z1^i z2^j`
/// for `i + j <= deg`.
#[derive(Clone, Debug, PartialEq)]
pub struct Series2 {
    deg: usize,
    c: Vec<Vec<Q>>,
}

fn factorial(n: usize) -> Q {
    (1..=n as i64).fold(Q::one(), |a, j| a * q(j, 1))
}

fn binom(n: usize, k: usize) -> Q {
    factorial(n) / (factorial(k) * factorial(n - k))
}

fn qpow(x: &Q, e: usize) -> Q {
    (0..e).fold(Q::one(), |a, _| a * x)
}

impl Series2 {
    pub fn zero(deg: usize) -> Series2 {
        Series2 { deg, c: (0..=deg).map(|i| vec![Q::zero(); deg - i + 1]).collect() }
    }

    pub fn constant(deg: usize, v: Q) -> Series2 {
        let mut s = Series2::zero(deg);
        s.c[0][0] = v;
        s
    }

    /// `alpha z1 + beta z2`.
    pub fn linear(deg: usize, alpha: Q, beta: Q) -> Series2 {
        let mut s = Series2::zero(deg);
        if deg >= 1 {
            s.c[1][0] = alpha;
            s.c[0][1] = beta;
        }
        s
    }

    /// `exp(alpha z1 + beta z2)`.
    pub fn exp_linear(deg: usize, alpha: &Q, beta: &Q) -> Series2 {
        let mut s = Series2::zero(deg);
        for i in 0..=deg {
            for j in 0..=deg - i {
                s.c[i][j] = qpow(alpha, i) * qpow(beta, j) / (factorial(i) * factorial(j));
            }
        }
        s
    }

    /// `(e^x - 1)/x` at `x = alpha z1 + beta z2`.
    pub fn phi_linear(deg: usize, alpha: &Q, beta: &Q) -> Series2 {
        let mut s = Series2::zero(deg);
        for i in 0..=deg {
            for j in 0..=deg - i {
                s.c[i][j] = binom(i + j, i) * qpow(alpha, i) * qpow(beta, j) / factorial(i + j + 1);
            }
        }
        s
    }

    pub fn coeff(&self, i: usize, j: usize) -> Q {
        if i + j > self.deg {
            return Q::zero();
        }
        self.c[i][j].clone()
    }

    pub fn add(&self, o: &Series2) -> Series2 {
        let mut s = self.clone();
        for i in 0..=self.deg {
            for j in 0..=self.deg - i {
                s.c[i][j] += &o.c[i][j];
            }
        }
        s
    }

    pub fn scale(&self, v: &Q) -> Series2 {
        let mut s = self.clone();
        s.c.iter_mut().flatten().for_each(|x| *x *= v);
        s
    }

    pub fn mul(&self, o: &Series2) -> Series2 {
        let d = self.deg;
        let mut s = Series2::zero(d);
        for i in 0..=d {
            for j in 0..=d - i {
                if self.c[i][j].is_zero() {
                    continue;
                }
                for a in 0..=d - i - j {
                    for b in 0..=d - i - j - a {
                        if !o.c[a][b].is_zero() {
                            s.c[i + a][j + b] += &self.c[i][j] * &o.c[a][b];
                        }
                    }
                }
            }
        }
        s
    }

    pub fn pow(&self, e: u32) -> Series2 {
        (0..e).fold(Series2::constant(self.deg, Q::one()), |a, _| a.mul(self))
    }

    /// Multiplicative inverse of a series with nonzero constant term.
    pub fn inv(&self) -> Result<Series2> {
        let a0 = self.c[0][0].clone();
        if a0.is_zero() {
            return Err(Error::Series("inverse of a series without constant term".into()));
        }
        let d = self.deg;
        let mut b = Series2::zero(d);
        b.c[0][0] = Q::one() / &a0;
        for n in 1..=d {
            for i in 0..=n {
                let j = n - i;
                let mut acc = Q::zero();
                for p in 0..=i {
                    for qq in 0..=j {
                        if p + qq == 0 || self.c[p][qq].is_zero() {
                            continue;
                        }
                        acc += &self.c[p][qq] * &b.c[i - p][j - qq];
                    }
                }
                b.c[i][j] = -acc / &a0;
            }
        }
        Ok(b)
    }

    /// Homogeneous component of degree `n` as `[coeff of z1^i z2^{n-i}]_i`.
    fn component(&self, n: usize) -> Vec<Q> {
        (0..=n).map(|i| self.coeff(i, n - i)).collect()
    }
}

/// Exact division of a homogeneous form `p` (coefficients of `z1^i z2^{n-i}`)
/// by `z1^a z2^b (z1+z2)^c`.
fn divide_form(p: &[Q], a: usize, b: usize, c: usize) -> Option<Vec<Q>> {
    let n = p.len() - 1;
    if n < a + b + c {
        return if p.iter().all(|x| x.is_zero()) { Some(Vec::new()) } else { None };
    }
    // z1^a: drop the a lowest z1 powers; z2^b: drop the b highest.
    if p[..a].iter().any(|x| !x.is_zero()) || p[n + 1 - b..].iter().any(|x| !x.is_zero()) {
        return None;
    }
    let mut r: Vec<Q> = p[a..n + 1 - b].to_vec();
    for _ in 0..c {
        // r = (z1 + z2) * out, coefficients indexed by the power of z1
        let m = r.len() - 1;
        let mut out = vec![Q::zero(); m];
        out[0] = r[0].clone();
        for i in 1..m {
            out[i] = &r[i] - &out[i - 1];
        }
        if r[m] != out[m - 1] {
            return None;
        }
        r = out;
    }
    Some(r)
}

/// Series of a factor with its vanishing linear form split off:
/// `(unit part, power of z1, power of z2, power of z1+z2)`.
fn factor_series(f: Factor, deg: usize) -> (Series2, [usize; 3]) {
    let (z, o) = (Q::zero(), Q::one());
    match f {
        Factor::S => (Series2::exp_linear(deg, &o, &z), [0, 0, 0]),
        Factor::T => (Series2::exp_linear(deg, &z, &o), [0, 0, 0]),
        Factor::SMinus1 => (Series2::phi_linear(deg, &o, &z), [1, 0, 0]),
        Factor::TMinus1 => (Series2::phi_linear(deg, &z, &o), [0, 1, 0]),
        Factor::STMinus1 => (Series2::phi_linear(deg, &o, &o), [0, 0, 1]),
    }
}

fn poly_series(p: &Poly2, deg: usize) -> Series2 {
    let mut s = Series2::zero(deg);
    for (&(i, j), c) in p.terms() {
        s = s.add(&Series2::exp_linear(deg, &q(i as i64, 1), &q(j as i64, 1)).scale(c));
    }
    s
}

/// Taylor coefficients `[c_ij]` (`i + j <= order`) of `f(e^{z1}, e^{z2})` at 0.
pub fn taylor_coefficients(f: &SymbolicFunction, order: usize) -> Result<Vec<Vec<Q>>> {
    // Common denominator: highest power of each factor over all parts.
    let mut den: BTreeMap<Factor, u32> = BTreeMap::new();
    for (_, r) in f.parts() {
        for (&fac, &e) in r.denominator() {
            let slot = den.entry(fac).or_insert(0);
            *slot = (*slot).max(e);
        }
    }
    let mut lin = [0usize; 3];
    for (&fac, &e) in &den {
        let (_, l) = factor_series(fac, 0);
        for k in 0..3 {
            lin[k] += l[k] * e as usize;
        }
    }
    let d = lin.iter().sum::<usize>();
    let deg = order + d;

    let mut unit = Series2::constant(deg, Q::one());
    for (&fac, &e) in &den {
        unit = unit.mul(&factor_series(fac, deg).0.pow(e));
    }
    let mut num = Series2::zero(deg);
    for (b, r) in f.parts() {
        let mut part = poly_series(r.numerator(), deg);
        for (&fac, &e) in &den {
            let own = r.denominator().get(&fac).copied().unwrap_or(0);
            let (u, l) = factor_series(fac, deg);
            let mut full = u;
            if l[0] == 1 {
                full = full.mul(&Series2::linear(deg, Q::one(), Q::zero()));
            } else if l[1] == 1 {
                full = full.mul(&Series2::linear(deg, Q::zero(), Q::one()));
            } else if l[2] == 1 {
                full = full.mul(&Series2::linear(deg, Q::one(), Q::one()));
            }
            part = part.mul(&full.pow(e - own));
        }
        let log = match b {
            Basis::One => Series2::constant(deg, Q::one()),
            Basis::LogS => Series2::linear(deg, Q::one(), Q::zero()),
            Basis::LogST => Series2::linear(deg, Q::one(), Q::one()),
        };
        num = num.add(&part.mul(&log));
    }
    let m = num.mul(&unit.inv()?);
    for n in 0..d {
        if m.component(n).iter().any(|x| !x.is_zero()) {
            return Err(Error::Series(format!("pole of order {} at the origin is not removable", d - n)));
        }
    }
    let mut out: Vec<Vec<Q>> = (0..=order).map(|i| vec![Q::zero(); order - i + 1]).collect();
    for n in 0..=order {
        let form = divide_form(&m.component(n + d), lin[0], lin[1], lin[2])
            .ok_or_else(|| Error::Series(format!("degree-{n} component is not divisible by the denominator")))?;
        for (i, c) in form.into_iter().enumerate() {
            out[i][n - i] = c;
        }
    }
    Ok(out)
}

/// One-variable coefficients `c_n` of `f(e^z)`, for `f` not depending on `t`.
pub fn taylor_coefficients_one(f: &SymbolicFunction, order: usize) -> Result<Vec<Q>> {
    if f.is_two_variable() {
        return Err(Error::Series("function depends on t".into()));
    }
    let c = taylor_coefficients(f, order)?;
    Ok((0..=order).map(|n| c[n][0].clone()).collect())
}

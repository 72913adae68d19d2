//! Exact `r`-integration of the `K`/`H` families.

use super::function::{Basis, SymbolicFunction};
use super::poly::{q, Factor, Q};
use super::ratfun::RatFun;
use super::signature::TermSignature;
use crate::error::{Error, Result};
use num::{One, Zero};

/// Pole parameter `c_i` of run `i`: the integrand has `(c_i r + 1)^{-p_i}`.
fn pole_scale(i: usize) -> RatFun {
    match i {
        0 => RatFun::one(),
        1 => RatFun::s(),
        _ => RatFun::st(),
    }
}

fn log_of_scale(i: usize) -> Option<Basis> {
    match i {
        0 => None,
        1 => Some(Basis::LogS),
        _ => Some(Basis::LogST),
    }
}

fn binom(n: i64, k: i64) -> Q {
    if k < 0 || k > n {
        return Q::zero();
    }
    (0..k).fold(Q::one(), |acc, j| acc * q(n - j, j + 1))
}

/// Taylor coefficients of `(alpha + beta e)^{-p}` up to `e^order`.
fn inverse_power_series(alpha: &RatFun, beta: &RatFun, p: u32, order: usize) -> Result<Vec<RatFun>> {
    let ainv = alpha.inv()?;
    let ratio = beta.mul(&ainv);
    let lead = ainv.powi(p as i32)?;
    let mut out = Vec::with_capacity(order + 1);
    let mut rk = RatFun::one();
    for k in 0..=order {
        let sign = if k % 2 == 0 { Q::one() } else { -Q::one() };
        out.push(lead.mul(&rk).scale(&(sign * binom(p as i64 + k as i64 - 1, k as i64))));
        rk = rk.mul(&ratio);
    }
    Ok(out)
}

fn series_mul(a: &[RatFun], b: &[RatFun]) -> Vec<RatFun> {
    let n = a.len().min(b.len());
    (0..n)
        .map(|k| (0..=k).fold(RatFun::zero(), |acc, j| acc.add(&a[j].mul(&b[k - j]))))
        .collect()
}

/// `int_0^inf r^w prod_i (c_i r + 1)^{-p_i} dr` with `w = sum p - 2`,
/// by partial fractions at the poles `r = -1/c_i`.
pub fn family_integral_dim2(exps: &[u32]) -> Result<SymbolicFunction> {
    let total: u32 = exps.iter().sum();
    if total < 2 {
        return Err(Error::Divergent(format!("resolvent powers {exps:?} give an integrand decaying like 1/r")));
    }
    let w = total - 2;
    let mut out = SymbolicFunction::zero();
    let mut residue_sum = RatFun::zero();
    for (i, &p) in exps.iter().enumerate() {
        if p == 0 {
            continue;
        }
        let ci = pole_scale(i);
        let a = ci.inv()?;
        let order = (p - 1) as usize;
        // (e - a)^w
        let mut h: Vec<RatFun> = (0..=order)
            .map(|k| {
                let k = k as u32;
                if k > w {
                    return RatFun::zero();
                }
                let pw = a.neg().powi((w - k) as i32).expect("nonnegative power");
                pw.scale(&binom(w as i64, k as i64))
            })
            .collect();
        for (l, &pl) in exps.iter().enumerate() {
            if l == i || pl == 0 {
                continue;
            }
            let cl = pole_scale(l);
            let alpha = RatFun::one().sub(&cl.mul(&a));
            h = series_mul(&h, &inverse_power_series(&alpha, &cl, pl, order)?);
        }
        let cip = ci.powi(-(p as i32))?;
        for j in 1..=p {
            let b = cip.mul(&h[(p - j) as usize]);
            if j == 1 {
                residue_sum = residue_sum.add(&b);
                if let Some(basis) = log_of_scale(i) {
                    out = out.add(&SymbolicFunction::from_part(basis, b));
                }
            } else {
                let term = b.mul(&ci.powi(j as i32 - 1)?).scale(&q(1, j as i64 - 1));
                out = out.add(&SymbolicFunction::rational(term));
            }
        }
    }
    if !residue_sum.is_zero() {
        return Err(Error::Divergent(format!("log terms of {exps:?} do not cancel at infinity")));
    }
    Ok(out)
}

/// `(d/du)^{m/2-2} prod_i (c_i - u)^{-p_i}` at `u = 0`.
pub fn family_derivative_dim_m(exps: &[u32], m: usize) -> Result<SymbolicFunction> {
    if m < 4 || m % 2 == 1 {
        return Err(Error::Usage(format!("the derivative formula needs even m >= 4, got {m}")));
    }
    let n = m / 2 - 2;
    let mut acc: Vec<RatFun> = (0..=n).map(|k| if k == 0 { RatFun::one() } else { RatFun::zero() }).collect();
    for (i, &p) in exps.iter().enumerate() {
        if p == 0 {
            continue;
        }
        let ci = pole_scale(i);
        acc = series_mul(&acc, &inverse_power_series(&ci, &RatFun::constant(-Q::one()), p, n)?);
    }
    let fact: Q = (1..=n as i64).fold(Q::one(), |a, j| a * q(j, 1));
    Ok(SymbolicFunction::rational(acc[n].scale(&fact)))
}

/// Contribution of one term: `prefactor * s^j1 t^j2 * 1/2 * (r-integral)`.
pub fn integrate_signature(sig: &TermSignature, m: usize) -> Result<SymbolicFunction> {
    let base = if m == 2 { family_integral_dim2(&sig.b0_exponents)? } else { family_derivative_dim_m(&sig.b0_exponents, m)? };
    let shift = RatFun::factor_pow(Factor::S, sig.modular_shifts.0).mul(&RatFun::factor_pow(Factor::T, sig.modular_shifts.1));
    Ok(base.mul_rat(&shift).scale(&(sig.prefactor.clone() * q(1, 2))))
}

/// `integrate_signature` for `m = 2`.
pub fn integrate_dim2(sig: &TermSignature) -> Result<SymbolicFunction> {
    integrate_signature(sig, 2)
}

/// `integrate_signature` for even `m >= 4`.
pub fn integrate_dim_m(sig: &TermSignature, m: usize) -> Result<SymbolicFunction> {
    if m < 4 || m % 2 == 1 {
        return Err(Error::Usage(format!("dimension must be even and at least 4, got {m}")));
    }
    integrate_signature(sig, m)
}

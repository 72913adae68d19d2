//! Finite-matrix check of the rearrangement identity
//!
//! `int_0^inf r^w f0(rk) rho1 k^a1 f1(rk) rho2 k^a2 f2(rk) dr
//!     = k^{a1+a2+1-P} [s^{a1+a2} t^{a2} F(s,t)](D1, D2)(rho1 rho2)`
//!
//! with `f_i(x) = (x+1)^{-p_i}`, `P = sum p_i` and `F` the closed-form
//! family integral. In the eigenbasis of `k` (eigenvalues `kappa`) the
//! modular operator acting on the first factor is `s = kappa_j / kappa_i`
//! and on the second factor `t = kappa_l / kappa_j`, for the entry
//! `rho1[i][j] rho2[j][l]` of the product.

use super::quad::{quad_power_integral, Family, QuadratureSpec};
use crate::error::{Error, Result};
use crate::modular::{family_integral_dim2, Factor, RatFun, SymbolicFunction};
use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Largest matrix size accepted by the oracle.
pub const MAX_DIM: usize = 12;

/// Family plus the powers of `k` standing right after `rho1` and `rho2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RearrangementCase {
    pub family: Family,
    pub k_between: (i32, i32),
}

impl RearrangementCase {
    pub fn plain(family: Family) -> RearrangementCase {
        RearrangementCase { family, k_between: (0, 0) }
    }

    /// Closed form `s^{a1+a2} t^{a2} F(s,t)`.
    pub fn closed_form(&self) -> Result<SymbolicFunction> {
        let (a1, a2) = self.k_between;
        let shift = RatFun::factor_pow(Factor::S, a1 + a2).mul(&RatFun::factor_pow(Factor::T, a2));
        Ok(family_integral_dim2(&self.family.exponents())?.mul_rat(&shift))
    }

    fn k_front(&self) -> i32 {
        let total: u32 = self.family.exponents().iter().sum();
        self.k_between.0 + self.k_between.1 + 1 - total as i32
    }
}

/// Random symmetric positive-definite matrix with eigenvalues in `[0.2, 5]`.
pub fn random_positive(dim: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let a = DMatrix::from_fn(dim, dim, |_, _| rng.random_range(-1.0..1.0));
    let q = a.qr().q();
    let d = DMatrix::from_diagonal(&nalgebra::DVector::from_fn(dim, |_, _| rng.random_range(0.2..5.0)));
    let k = &q * d * q.transpose();
    (&k + k.transpose()) * 0.5
}

pub fn random_matrix(dim: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    DMatrix::from_fn(dim, dim, |_, _| rng.random_range(-1.0..1.0))
}

fn max_relative_error(lhs: &DMatrix<f64>, rhs: &DMatrix<f64>) -> f64 {
    lhs.iter().zip(rhs.iter()).map(|(l, r)| if *r == 0.0 { l.abs() } else { (l - r).abs() / r.abs() }).fold(0.0, f64::max)
}

/// Both sides of the identity for explicit `k`, `rho1` and (two-variable
/// families only) `rho2`. Returns `(lhs, rhs)` in the original basis.
pub fn rearrangement_sides(
    k: &DMatrix<f64>,
    rho1: &DMatrix<f64>,
    rho2: Option<&DMatrix<f64>>,
    case: &RearrangementCase,
    spec: &QuadratureSpec,
) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let n = k.nrows();
    if n == 0 || n > MAX_DIM || k.ncols() != n {
        return Err(Error::Precondition(format!("matrix size must be 1..={MAX_DIM}, got {}x{}", k.nrows(), k.ncols())));
    }
    if case.family.is_two_variable() != rho2.is_some() {
        return Err(Error::Precondition("a second rho is needed exactly for two-variable families".into()));
    }
    let eig = SymmetricEigen::new(k.clone());
    let kappa = eig.eigenvalues.clone();
    if kappa.iter().any(|&x| x <= 0.0) {
        return Err(Error::Precondition("k must be positive definite".into()));
    }
    let v = eig.eigenvectors;
    let vt = v.transpose();
    let r1 = &vt * rho1 * &v;
    let exps = case.family.exponents();
    let w = exps.iter().sum::<u32>() as i32 - 2;
    let (a1, a2) = case.k_between;
    let f = case.closed_form()?;
    let front = case.k_front();

    let (lt, rt) = match rho2 {
        None => {
            let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect();
            let vals: Vec<(f64, f64)> = pairs
                .par_iter()
                .map(|&(i, j)| {
                    let (ki, kj) = (kappa[i], kappa[j]);
                    let l = kj.powi(a1) * quad_power_integral(w, &exps, &[ki, kj], spec)?;
                    let r = ki.powi(front) * f.eval(kj / ki, 1.0)?;
                    Ok((l, r))
                })
                .collect::<Result<_>>()?;
            let mut lt = DMatrix::zeros(n, n);
            let mut rt = DMatrix::zeros(n, n);
            for (&(i, j), (l, r)) in pairs.iter().zip(vals) {
                lt[(i, j)] = l * r1[(i, j)];
                rt[(i, j)] = r * r1[(i, j)];
            }
            (lt, rt)
        }
        Some(rho2) => {
            let r2 = &vt * rho2 * &v;
            let triples: Vec<(usize, usize, usize)> =
                (0..n).flat_map(|i| (0..n).flat_map(move |j| (0..n).map(move |l| (i, j, l)))).collect();
            let vals: Vec<(f64, f64)> = triples
                .par_iter()
                .map(|&(i, j, l)| {
                    let (ki, kj, kl) = (kappa[i], kappa[j], kappa[l]);
                    let lhs = kj.powi(a1) * kl.powi(a2) * quad_power_integral(w, &exps, &[ki, kj, kl], spec)?;
                    let rhs = ki.powi(front) * f.eval(kj / ki, kl / kj)?;
                    Ok((lhs, rhs))
                })
                .collect::<Result<_>>()?;
            let mut lt = DMatrix::zeros(n, n);
            let mut rt = DMatrix::zeros(n, n);
            for (&(i, j, l), (x, y)) in triples.iter().zip(vals) {
                let c = r1[(i, j)] * r2[(j, l)];
                lt[(i, l)] += x * c;
                rt[(i, l)] += y * c;
            }
            (lt, rt)
        }
    };
    Ok((&v * lt * &vt, &v * rt * &vt))
}

/// Max entrywise relative error between the two sides for explicit matrices.
pub fn rearrangement_error(
    k: &DMatrix<f64>,
    rho1: &DMatrix<f64>,
    rho2: Option<&DMatrix<f64>>,
    case: &RearrangementCase,
    spec: &QuadratureSpec,
) -> Result<f64> {
    let (l, r) = rearrangement_sides(k, rho1, rho2, case, spec)?;
    Ok(max_relative_error(&l, &r))
}

/// Random instance drawn from `seed`: `k` positive with spectrum in
/// `[0.2, 5]`, entries of `rho1`, `rho2` uniform in `[-1, 1]`.
pub fn matrix_rearrangement_check(dim: usize, seed: u64, case: &RearrangementCase, spec: &QuadratureSpec) -> Result<f64> {
    if dim == 0 || dim > MAX_DIM {
        return Err(Error::Precondition(format!("matrix size must be 1..={MAX_DIM}, got {dim}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = random_positive(dim, &mut rng);
    let rho1 = random_matrix(dim, &mut rng);
    let rho2 = case.family.is_two_variable().then(|| random_matrix(dim, &mut rng));
    rearrangement_error(&k, &rho1, rho2.as_ref(), case, spec)
}

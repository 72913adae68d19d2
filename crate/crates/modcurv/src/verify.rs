//! Named oracle suites behind `modcurv verify`. Every check reports its
//! largest observed error against a tolerance.

use crate::error::{Error, Result};
use crate::modular::{averaged_b2, derive_curvature, Operator, SymbolicFunction, TermSignature};
use crate::oracle::{
    cos_mode, gauss_bonnet_residual, matrix_rearrangement_check, quad_power_integral, residual_ratio_test, Family,
    QuadratureSpec, RearrangementCase,
};
use crate::symbol::{resolvent_b, Symbols};
use crate::theta::{Cyclo, FourierElement, Scalar, SkewMatrix, C64};
use num::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Algebra,
    Symbols,
    Integrals,
    Matrix,
    GaussBonnet,
    All,
}

impl std::str::FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Suite> {
        Ok(match s {
            "algebra" => Suite::Algebra,
            "symbols" => Suite::Symbols,
            "integrals" => Suite::Integrals,
            "matrix" => Suite::Matrix,
            "gauss-bonnet" => Suite::GaussBonnet,
            "all" => Suite::All,
            _ => return Err(Error::Usage(format!("unknown suite '{s}'"))),
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub max_err: f64,
    pub tol: f64,
    pub pass: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, max_err: f64, tol: f64) -> Check {
        // + 0.0 turns an empty-sum -0.0 into 0.0
        Check { name: name.into(), max_err: max_err + 0.0, tol, pass: max_err <= tol }
    }

    /// For checks that are pass/fail by nature: error 0 or 1.
    pub fn exact(name: impl Into<String>, ok: bool) -> Check {
        Check::new(name, if ok { 0.0 } else { 1.0 }, 0.0)
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CHECK {} {:.3e} {:.1e} {}", self.name, self.max_err, self.tol, if self.pass { "PASS" } else { "FAIL" })
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct VerifyOptions {
    pub seed: u64,
    /// Overrides every tolerance when set.
    pub tol: Option<f64>,
}

pub fn run_suite(suite: Suite, opts: &VerifyOptions) -> Result<Vec<Check>> {
    let mut out = match suite {
        Suite::Algebra => algebra(opts.seed)?,
        Suite::Symbols => symbols()?,
        Suite::Integrals => integrals(opts.seed)?,
        Suite::Matrix => matrix(opts.seed)?,
        Suite::GaussBonnet => gauss_bonnet()?,
        Suite::All => {
            let mut v = Vec::new();
            for s in [Suite::Algebra, Suite::Symbols, Suite::Integrals, Suite::Matrix, Suite::GaussBonnet] {
                v.extend(run_suite(s, &VerifyOptions { tol: None, ..*opts })?);
            }
            v
        }
    };
    if let Some(t) = opts.tol {
        out = out.into_iter().map(|c| Check::new(c.name, c.max_err, t)).collect();
    }
    Ok(out)
}

/// Random element with `support` modes in `[-max_freq, max_freq]^n` and
/// Gaussian-rational coefficients with numerators in `[-5, 5]` and
/// denominators in `[1, 4]`.
pub fn random_element<S: Scalar>(rng: &mut ChaCha8Rng, n: usize, support: usize, max_freq: i64) -> FourierElement<S> {
    let mut e = FourierElement::zero(n);
    let rat = |rng: &mut ChaCha8Rng| BigRational::new(rng.random_range(-5i64..=5).into(), rng.random_range(1i64..=4).into());
    for _ in 0..support {
        let r: Vec<i64> = (0..n).map(|_| rng.random_range(-max_freq..=max_freq)).collect();
        let (re, im) = (rat(rng), rat(rng));
        e.add_term(r, S::from_gaussian(&re, &im));
    }
    e
}

fn diff_norm<S: Scalar>(a: &FourierElement<S>, b: &FourierElement<S>) -> f64 {
    a.sub(b).l1_norm()
}

/// Associativity, star antihomomorphism, trace property and Leibniz rule
/// on `count` random triples. Returns the largest defect of each law.
pub fn algebra_laws<S: Scalar>(theta: &SkewMatrix, seed: u64, count: usize) -> Result<[f64; 4]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = [0.0f64; 4];
    for _ in 0..count {
        let a: FourierElement<S> = random_element(&mut rng, 2, 8, 3);
        let b = random_element(&mut rng, 2, 8, 3);
        let c = random_element(&mut rng, 2, 8, 3);
        let ab = a.product(&b, theta)?;
        let scale = 1.0 + a.l1_norm() * b.l1_norm() * c.l1_norm();
        let assoc = diff_norm(&ab.product(&c, theta)?, &a.product(&b.product(&c, theta)?, theta)?);
        let star = diff_norm(&ab.star(), &b.star().product(&a.star(), theta)?);
        let tr = (ab.trace() - b.product(&a, theta)?.trace()).abs();
        let leib = diff_norm(&ab.derivation_unit(0)?, &a.derivation_unit(0)?.product(&b, theta)?.add(&a.product(&b.derivation_unit(0)?, theta)?));
        for (w, v) in worst.iter_mut().zip([assoc / scale, star / scale, tr / scale, leib / scale]) {
            *w = w.max(v);
        }
    }
    Ok(worst)
}

fn algebra(seed: u64) -> Result<Vec<Check>> {
    let names = ["associativity", "star_antihomomorphism", "trace_property", "leibniz"];
    let mut out = Vec::new();
    let exact = algebra_laws::<Cyclo>(&SkewMatrix::theta2_rational(1, 3), seed, 100)?;
    for (n, e) in names.iter().zip(exact) {
        out.push(Check::new(format!("algebra_{n}_exact"), e, 0.0));
    }
    let float = algebra_laws::<C64>(&SkewMatrix::theta2(1.0 / 2f64.sqrt()), seed, 100)?;
    for (n, e) in names.iter().zip(float) {
        out.push(Check::new(format!("algebra_{n}_float"), e, 1e-12));
    }
    Ok(out)
}

fn symbols() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for (name, sym) in [("kdelta", Symbols::kdelta()), ("nc4tori", Symbols::nc4tori())] {
        for kappa in 0..=2usize {
            let b = resolvent_b(kappa, &sym)?;
            let want = -2 - kappa as i32;
            let bad = b.terms().filter(|(w, _)| w.homogeneity() != want).count();
            out.push(Check::new(format!("homogeneity_b{kappa}_{name}"), bad as f64, 0.0));
        }
    }
    for m in [2usize, 4, 6, 8] {
        let avg = averaged_b2(m, Operator::Kdelta)?;
        out.push(Check::exact(format!("average_real_m{m}"), avg.is_real()));
    }
    Ok(out)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

/// `prefactor/2 s^j1 t^j2 int r^w prod (c_i r + 1)^{-p_i} dr` by quadrature.
pub fn signature_by_quadrature(sig: &TermSignature, s: f64, t: f64, spec: &QuadratureSpec) -> Result<f64> {
    let scales = [1.0, s, s * t];
    let n = sig.b0_exponents.len();
    let v = quad_power_integral(sig.r_power, &sig.b0_exponents, &scales[..n], spec)?;
    let pre = crate::theta::rat_to_f64(&sig.prefactor);
    Ok(0.5 * pre * s.powi(sig.modular_shifts.0) * t.powi(sig.modular_shifts.1) * v)
}

/// A curvature channel summed by quadrature over its signatures.
pub fn channel_by_quadrature(sigs: &[&TermSignature], s: f64, t: f64, spec: &QuadratureSpec) -> Result<f64> {
    sigs.iter().map(|g| signature_by_quadrature(g, s, t, spec)).sum()
}

/// Largest relative error of `f` against quadrature over the points.
pub fn function_vs_quadrature(f: &SymbolicFunction, sigs: &[&TermSignature], points: &[(f64, f64)], spec: &QuadratureSpec) -> Result<f64> {
    let errs = points
        .par_iter()
        .map(|&(s, t)| Ok(rel(f.eval(s, t)?, channel_by_quadrature(sigs, s, t, spec)?)))
        .collect::<Result<Vec<f64>>>()?;
    Ok(errs.into_iter().fold(0.0, f64::max))
}

/// Quadrature settings for relative comparisons. Channel values fall to
/// about 1e-12 at the far corners of the sampled boxes, so the absolute
/// tolerance sits well below that and the relative floor does the work.
pub fn reference_spec() -> QuadratureSpec {
    QuadratureSpec::with_tol(1e-26)
}

fn integrals(seed: u64) -> Result<Vec<Check>> {
    let spec = reference_spec();
    let report = derive_curvature(2, Operator::Kdelta)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for (i, sig) in report.signatures.iter().enumerate() {
        let pts: Vec<(f64, f64)> = (0..25).map(|_| (rng.random_range(0.05..20.0), rng.random_range(0.05..20.0))).collect();
        let f = crate::modular::integrate_dim2(sig)?;
        let err = function_vs_quadrature(&f, &[sig], &pts, &spec)?;
        let fam = sig.family().replace(['(', ')'], "").replace(',', "");
        out.push(Check::new(format!("signature_{i}_{fam}_vs_quadrature"), err, 1e-9));
    }
    let hess: Vec<&TermSignature> = report.signatures.iter().filter(|g| g.channel == crate::modular::Channel::Hess).collect();
    let grad: Vec<&TermSignature> = report.signatures.iter().filter(|g| g.channel == crate::modular::Channel::Grad).collect();
    let kpts: Vec<(f64, f64)> = (0..20).map(|i| (0.1 + 9.9 * i as f64 / 19.0, 1.0)).collect();
    out.push(Check::new("K_dim2_vs_quadrature", function_vs_quadrature(&report.k, &hess, &kpts, &spec)?, 1e-10));
    let grid: Vec<(f64, f64)> = (0..10)
        .flat_map(|i| (0..10).map(move |j| (0.2 + 4.8 * i as f64 / 9.0, 0.2 + 4.8 * j as f64 / 9.0)))
        .collect();
    out.push(Check::new("G_dim2_vs_quadrature", function_vs_quadrature(&report.g, &grad, &grid, &spec)?, 1e-9));
    out.push(Check::new("K_dim2_limit_at_1", (report.k.eval(1.0, 1.0)? - 1.0 / 12.0).abs(), 1e-8));
    for fam in [Family::K(1, 1), Family::K(2, 1), Family::H(2, 1, 1)] {
        let a = crate::oracle::quad_r_integral(fam, 1.0, 1.0, &spec)?;
        let n: u32 = fam.exponents().iter().sum();
        let fname = fam.to_string().replace(['(', ')'], "").replace(',', "");
        out.push(Check::new(format!("beta_value_{fname}"), (a - 1.0 / (n - 1) as f64).abs(), 1e-12));
    }
    Ok(out)
}

/// Families of the matrix oracle with the powers of `k` after each `rho`.
pub fn matrix_cases() -> Vec<(&'static str, RearrangementCase)> {
    vec![
        ("K21", RearrangementCase::plain(Family::K(2, 1))),
        ("K31", RearrangementCase::plain(Family::K(3, 1))),
        ("H311", RearrangementCase::plain(Family::H(3, 1, 1))),
        ("H211", RearrangementCase::plain(Family::H(2, 1, 1))),
        ("H221_sshift", RearrangementCase { family: Family::H(2, 2, 1), k_between: (1, 0) }),
    ]
}

fn matrix(seed: u64) -> Result<Vec<Check>> {
    let spec = QuadratureSpec::default();
    let mut out = Vec::new();
    for (name, case) in matrix_cases() {
        for s in seed..seed + 3 {
            let e = matrix_rearrangement_check(6, s, &case, &spec)?;
            out.push(Check::new(format!("matrix_{name}_dim6_seed{s}"), e, 1e-6));
        }
    }
    Ok(out)
}

/// `h` with `||h||_1 = 0.1` spread over three modes.
pub fn gauss_bonnet_h() -> FourierElement<C64> {
    cos_mode([1, 0], 0.025).add(&cos_mode([0, 1], 0.015)).add(&cos_mode([1, 1], 0.01))
}

/// Deformation parameters of the Gauss–Bonnet checks.
pub fn gauss_bonnet_thetas() -> [(&'static str, f64); 3] {
    [("0", 0.0), ("1_3", 1.0 / 3.0), ("irrational", 1.0 / 2f64.sqrt())]
}

fn gauss_bonnet() -> Result<Vec<Check>> {
    let h = gauss_bonnet_h();
    let mut out = Vec::new();
    for (name, th) in gauss_bonnet_thetas() {
        let r = gauss_bonnet_residual(&h, &SkewMatrix::theta2(th), 8, 40)?;
        out.push(Check::new(format!("gauss_bonnet_residual_theta_{name}"), r, 1e-6));
    }
    let irr = SkewMatrix::theta2(1.0 / 2f64.sqrt());
    for order in [1usize, 8] {
        let t = residual_ratio_test(&h, &irr, order, 40, &[0.5, 0.25])?;
        let mut c = Check::exact(format!("gauss_bonnet_ratio_order{order}"), t.pass);
        if t.base > crate::oracle::RESIDUAL_FLOOR {
            c = Check { max_err: t.worst_ratio(), tol: 2.0, ..c };
        }
        out.push(c);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn check_line_format() {
        let c = Check::new("x", 1.5e-12, 1e-10);
        assert_eq!(c.to_string(), "CHECK x 1.500e-12 1.0e-10 PASS");
        assert!(!Check::new("y", f64::NAN, 1.0).pass);
    }

    #[test]
    fn suite_names() {
        assert_eq!("gauss-bonnet".parse::<Suite>().unwrap(), Suite::GaussBonnet);
        assert!(matches!("nope".parse::<Suite>(), Err(Error::Usage(_))));
    }

    #[test]
    fn exact_algebra_laws_hold() {
        let w = algebra_laws::<Cyclo>(&SkewMatrix::theta2_rational(2, 5), 11, 5).unwrap();
        assert_eq!(w, [0.0; 4]);
    }
}

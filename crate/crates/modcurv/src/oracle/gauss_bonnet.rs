//! Gauss–Bonnet residual `|tau(R)|` of the dim-2 modular curvature on the
//! flat noncommutative 2-torus, with Weyl factor `k = e^h`:
//!
//! `R = k^{-1} K(D)(sum_j d_j^2 k) + k^{-2} sum_j G(D1, D2)(d_j k . d_j k)`
//!
//! where `D = k^{-1} (.) k = e^{-ad_h}`. `K(D)` and `G(D1, D2)` are applied as
//! truncated power series in `-ad_h` whose coefficients are the exact Taylor
//! coefficients of `K(e^z)` and `G(e^{z1}, e^{z2})`.

use super::series::{taylor_coefficients, taylor_coefficients_one};
use crate::error::{Error, Result};
use crate::modular::{derive_curvature, Operator, SymbolicFunction};
use crate::theta::{exp_remainder_bound, rat_to_f64, FourierElement, SkewMatrix, C64};
use std::sync::OnceLock;

/// Largest `||h||_1` accepted.
pub const MAX_NORM: f64 = 0.2;
/// Coefficients at or below this modulus are dropped after every product.
const PRUNE: f64 = 1e-22;
/// Mass that may be dropped at the support cap before it counts as overflow.
const OVERFLOW_MASS: f64 = 1e-16;

type Elem = FourierElement<C64>;

/// Taylor coefficients of `K(e^z)` and `G(e^{z1}, e^{z2})` as floats.
#[derive(Clone, Debug, PartialEq)]
pub struct CurvatureSeries {
    pub k: Vec<f64>,
    pub g: Vec<Vec<f64>>,
}

impl CurvatureSeries {
    pub fn new(k: &SymbolicFunction, g: &SymbolicFunction, order: usize) -> Result<CurvatureSeries> {
        let kc = taylor_coefficients_one(k, order)?.iter().map(rat_to_f64).collect();
        let gc = taylor_coefficients(g, order)?.iter().map(|row| row.iter().map(rat_to_f64).collect()).collect();
        Ok(CurvatureSeries { k: kc, g: gc })
    }

    pub fn order(&self) -> usize {
        self.k.len() - 1
    }
}

/// The dim-2 `K` and `G` produced by the pipeline.
pub fn engine_functions() -> Result<(SymbolicFunction, SymbolicFunction)> {
    static CACHE: OnceLock<std::result::Result<(SymbolicFunction, SymbolicFunction), Error>> = OnceLock::new();
    CACHE
        .get_or_init(|| derive_curvature(2, Operator::Kdelta).map(|r| (r.k, r.g)))
        .clone()
}

struct Ctx<'a> {
    theta: &'a SkewMatrix,
    cap: i64,
}

impl Ctx<'_> {
    fn capped(&self, e: Elem) -> Result<Elem> {
        let e = e.prune(PRUNE);
        if e.max_frequency() <= self.cap {
            return Ok(e);
        }
        let mut kept = Elem::zero(e.dim());
        let mut dropped = 0.0;
        for (r, c) in e.terms() {
            if r.iter().all(|x| x.abs() <= self.cap) {
                kept.add_term(r.clone(), *c);
            } else {
                dropped += c.norm();
            }
        }
        if dropped > OVERFLOW_MASS {
            return Err(Error::SupportOverflow(format!("mass {dropped:e} beyond the support cap {}", self.cap)));
        }
        Ok(kept)
    }

    fn mul(&self, a: &Elem, b: &Elem) -> Result<Elem> {
        self.capped(a.product(b, self.theta)?)
    }

    fn exp(&self, h: &Elem) -> Result<Elem> {
        let norm = h.l1_norm();
        let order = (1..=80).find(|&n| exp_remainder_bound(norm, n) <= 1e-18).unwrap_or(80);
        self.capped(h.exp(self.theta, order)?)
    }

    /// `[y, (-ad_h) y, (-ad_h)^2 y, ...]` up to `order`.
    fn ad_powers(&self, h: &Elem, y: &Elem, order: usize) -> Result<Vec<Elem>> {
        let mut out = vec![y.clone()];
        for _ in 0..order {
            let last = out.last().expect("nonempty");
            let next = self.mul(last, h)?.sub(&self.mul(h, last)?);
            out.push(self.capped(next)?);
        }
        Ok(out)
    }
}

/// Curvature density `R` for `k = e^h`, with the given series.
pub fn curvature_density(h: &Elem, theta: &SkewMatrix, series: &CurvatureSeries, support_cap: i64) -> Result<Elem> {
    if h.dim() != 2 || theta.dim() != 2 {
        return Err(Error::DimensionMismatch("the Gauss-Bonnet residual lives on the 2-torus".into()));
    }
    let norm = h.l1_norm();
    if norm > MAX_NORM {
        return Err(Error::Precondition(format!("||h||_1 = {norm} exceeds {MAX_NORM}")));
    }
    let defect = h.adjoint_defect();
    if defect > 1e-12 * (1.0 + norm) {
        return Err(Error::NotSelfAdjoint(defect));
    }
    if support_cap < 1 {
        return Err(Error::Precondition("support cap must be positive".into()));
    }
    let ctx = Ctx { theta, cap: support_cap };
    ctx.capped(h.clone())?;
    let n = series.order();
    let k = ctx.exp(h)?;
    let kinv = ctx.exp(&h.scale(&C64::new(-1.0, 0.0)))?;
    let kinv2 = ctx.mul(&kinv, &kinv)?;

    let mut hess = Elem::zero(2);
    let mut grads = Vec::new();
    for j in 0..2 {
        let dk = k.derivation(j)?;
        hess = hess.add(&dk.derivation(j)?);
        grads.push(dk);
    }
    let mut k_part = Elem::zero(2);
    for (c, y) in series.k.iter().zip(ctx.ad_powers(h, &hess, n)?) {
        k_part = k_part.add(&y.scale(&C64::new(*c, 0.0)));
    }
    let mut g_part = Elem::zero(2);
    for dk in &grads {
        let pw = ctx.ad_powers(h, dk, n)?;
        // sum_a A_a (sum_b g_ab A_b): one product per a
        for a in 0..=n {
            let mut right = Elem::zero(2);
            for b in 0..=n - a {
                right = right.add(&pw[b].scale(&C64::new(series.g[a][b], 0.0)));
            }
            g_part = g_part.add(&ctx.mul(&pw[a], &right)?);
        }
    }
    Ok(ctx.mul(&kinv, &k_part)?.add(&ctx.mul(&kinv2, &g_part)?))
}

/// `|tau(R)|` with explicit curvature functions.
pub fn gauss_bonnet_residual_with(
    k_fn: &SymbolicFunction,
    g_fn: &SymbolicFunction,
    h: &Elem,
    theta: &SkewMatrix,
    series_order: usize,
    support_cap: i64,
) -> Result<f64> {
    let series = CurvatureSeries::new(k_fn, g_fn, series_order)?;
    Ok(curvature_density(h, theta, &series, support_cap)?.trace().norm())
}

/// `|tau(R)|` with the pipeline's dim-2 `K` and `G`.
pub fn gauss_bonnet_residual(h: &Elem, theta: &SkewMatrix, series_order: usize, support_cap: i64) -> Result<f64> {
    let (k, g) = engine_functions()?;
    gauss_bonnet_residual_with(&k, &g, h, theta, series_order, support_cap)
}

/// Residuals at or below this level are rounding noise; the ratio test
/// treats them as zero.
pub const RESIDUAL_FLOOR: f64 = 1e-15;

/// Outcome of the scaling test `residual(eps h) <= 2 eps^2 residual(h)`.
#[derive(Clone, Debug, PartialEq)]
pub struct RatioTest {
    pub base: f64,
    /// `(eps, residual(eps h))`.
    pub scaled: Vec<(f64, f64)>,
    pub pass: bool,
}

impl RatioTest {
    /// Largest `residual(eps h) / (eps^2 residual(h))`, `NaN` if `residual(h) = 0`.
    pub fn worst_ratio(&self) -> f64 {
        self.scaled.iter().map(|(e, r)| r / (e * e * self.base)).fold(0.0, f64::max)
    }
}

/// Quadratic-scaling check with slack factor 2. Residuals below
/// [`RESIDUAL_FLOOR`] count as zero.
pub fn residual_ratio_test(h: &Elem, theta: &SkewMatrix, series_order: usize, support_cap: i64, eps: &[f64]) -> Result<RatioTest> {
    let base = gauss_bonnet_residual(h, theta, series_order, support_cap)?;
    let mut scaled = Vec::new();
    let mut pass = true;
    for &e in eps {
        let r = gauss_bonnet_residual(&h.scale(&C64::new(e, 0.0)), theta, series_order, support_cap)?;
        pass &= r <= 2.0 * e * e * base + RESIDUAL_FLOOR;
        scaled.push((e, r));
    }
    Ok(RatioTest { base, scaled, pass })
}

/// `a (e_r + e_{-r})` for a mode `r`, a self-adjoint test element.
pub fn cos_mode(r: [i64; 2], a: f64) -> Elem {
    let mut e = Elem::zero(2);
    e.add_term(r.to_vec(), C64::new(a, 0.0));
    e.add_term(vec![-r[0], -r[1]], C64::new(a, 0.0));
    e
}

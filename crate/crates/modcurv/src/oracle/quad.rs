//! Adaptive Gauss–Legendre quadrature of the `r`-integrals on `(0, inf)`.

use crate::error::{Error, Result};
use serde::Serialize;
use std::fmt;
use std::sync::OnceLock;

/// Number of Gauss–Legendre nodes per panel.
const NODES: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub max_depth: u32,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec { abs_tol: 1e-12, max_depth: 60 }
    }
}

impl QuadratureSpec {
    pub fn with_tol(abs_tol: f64) -> QuadratureSpec {
        QuadratureSpec { abs_tol, ..Default::default() }
    }

    fn check(&self) -> Result<()> {
        if !(self.abs_tol > 0.0) {
            return Err(Error::Precondition(format!("abs_tol must be positive, got {}", self.abs_tol)));
        }
        Ok(())
    }
}

/// A one- or two-variable resolvent family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Family {
    K(u32, u32),
    H(u32, u32, u32),
}

impl Family {
    pub fn exponents(&self) -> Vec<u32> {
        match *self {
            Family::K(p, q) => vec![p, q],
            Family::H(p, q, l) => vec![p, q, l],
        }
    }

    pub fn is_two_variable(&self) -> bool {
        matches!(self, Family::H(..))
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::K(p, q) => write!(f, "K({p},{q})"),
            Family::H(p, q, l) => write!(f, "H({p},{q},{l})"),
        }
    }
}

impl std::str::FromStr for Family {
    type Err = Error;
    fn from_str(src: &str) -> Result<Family> {
        let bad = || Error::Parse(format!("family '{src}', expected K(p,q) or H(p,q,l)"));
        let src = src.trim();
        let (head, rest) = src.split_at(1.min(src.len()));
        let inner = rest.strip_prefix('(').and_then(|r| r.strip_suffix(')')).ok_or_else(bad)?;
        let nums: Vec<u32> = inner.split(',').map(|x| x.trim().parse().map_err(|_| bad())).collect::<Result<_>>()?;
        match (head, nums.as_slice()) {
            ("K", &[p, q]) => Ok(Family::K(p, q)),
            ("H", &[p, q, l]) => Ok(Family::H(p, q, l)),
            _ => Err(bad()),
        }
    }
}

fn legendre_rule() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(NODES))
}

/// Nodes and weights on `[-1, 1]` by Newton iteration on `P_n`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            // p1 = P_n(z), p0 = P_{n-1}(z)
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

fn panel(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let (x, w) = legendre_rule();
    let (m, h) = (0.5 * (a + b), 0.5 * (b - a));
    h * x.iter().zip(w).map(|(xi, wi)| wi * f(m + h * xi)).sum::<f64>()
}

/// Adaptive integral of `f` over `[a, b]` to absolute tolerance `spec.abs_tol`.
pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, spec: &QuadratureSpec) -> Result<f64> {
    spec.check()?;
    let len = b - a;
    let mut total = 0.0;
    let mut stack = vec![(a, b, panel(f, a, b), 0u32)];
    while let Some((lo, hi, whole, depth)) = stack.pop() {
        let mid = 0.5 * (lo + hi);
        let (l, r) = (panel(f, lo, mid), panel(f, mid, hi));
        let est = l + r;
        if !est.is_finite() {
            return Err(Error::Quadrature(format!("non-finite integrand on [{lo}, {hi}]")));
        }
        let local = (spec.abs_tol * (hi - lo) / len).max(4.0 * f64::EPSILON * est.abs());
        if (est - whole).abs() <= local {
            total += est;
        } else if depth >= spec.max_depth {
            return Err(Error::Quadrature(format!("no convergence on [{lo}, {hi}] at depth {depth}")));
        } else {
            stack.push((lo, mid, l, depth + 1));
            stack.push((mid, hi, r, depth + 1));
        }
    }
    Ok(total)
}

/// `int_0^inf r^w prod_i (c_i r + 1)^{-p_i} dr` for arbitrary scales `c_i > 0`.
pub fn quad_power_integral(w: i32, exps: &[u32], scales: &[f64], spec: &QuadratureSpec) -> Result<f64> {
    if exps.len() != scales.len() {
        return Err(Error::Precondition("one scale per resolvent run is required".into()));
    }
    if let Some(c) = scales.iter().find(|c| !(**c > 0.0) || !c.is_finite()) {
        return Err(Error::Precondition(format!("scales must be positive, got {c}")));
    }
    let total: i32 = exps.iter().map(|&p| p as i32).sum();
    if w <= -1 || w - total >= -1 {
        return Err(Error::Divergent(format!("r^{w} against resolvent powers {exps:?}")));
    }
    // r = u/(1-u), dr = (1+r)^2 du. Written through r/(c r + 1) to keep
    // every factor bounded near u = 1.
    let f = |u: f64| {
        let r = u / (1.0 - u);
        let mut v = (1.0 + r) * (1.0 + r) * r.powi(w - total);
        for (&p, &c) in exps.iter().zip(scales) {
            v *= (r / (c * r + 1.0)).powi(p as i32);
        }
        v
    };
    integrate(&f, 0.0, 1.0, spec)
}

/// `int_0^inf r^{P-2} (r+1)^{-p} (s r+1)^{-q} (s t r+1)^{-l} dr`, `P = p+q+l`.
pub fn quad_r_integral(family: Family, s: f64, t: f64, spec: &QuadratureSpec) -> Result<f64> {
    let exps = family.exponents();
    let total: u32 = exps.iter().sum();
    if total < 2 {
        return Err(Error::Divergent(format!("{family} decays like 1/r")));
    }
    let scales = [1.0, s, s * t];
    quad_power_integral(total as i32 - 2, &exps, &scales[..exps.len()], spec)
}

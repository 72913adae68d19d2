use super::function::SymbolicFunction;
use super::integrate::integrate_signature;
use super::poly::{q, Q};
use super::signature::{extract_signature, Channel, TermSignature};
use crate::cosphere::sphere_average;
use crate::error::{Error, Result};
use crate::symbol::{resolvent_b, Expr, Symbols};
use num::{One, Zero};
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt::Write as _;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Operator {
    Kdelta,
    Nc4tori,
}

impl Operator {
    pub fn name(self) -> &'static str {
        match self {
            Operator::Kdelta => "kdelta",
            Operator::Nc4tori => "nc4tori",
        }
    }

    pub fn symbols(self) -> Symbols {
        match self {
            Operator::Kdelta => Symbols::kdelta(),
            Operator::Nc4tori => Symbols::nc4tori(),
        }
    }
}

impl std::str::FromStr for Operator {
    type Err = Error;
    fn from_str(s: &str) -> Result<Operator> {
        match s {
            "kdelta" => Ok(Operator::Kdelta),
            "nc4tori" => Ok(Operator::Nc4tori),
            _ => Err(Error::Usage(format!("unknown operator '{s}'"))),
        }
    }
}

/// Exponents of `k` in front of each channel.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct KPowers {
    pub hess: i32,
    pub grad: i32,
    pub scalar: i32,
}

/// Overall constants that are kept out of `K`, `G` and `c_scalar`:
/// `Vol(S^{m-1}) = sphere_rational * pi^{m/2}` and `(2 pi)^{-m}`.
/// The `1/2` from `r -> r^2` is already inside the functions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Normalization {
    pub sphere_volume: String,
    #[serde(serialize_with = "ser_q")]
    pub sphere_rational: Q,
    pub sphere_pi_power: i32,
    pub two_pi_power: i32,
    pub half_included: bool,
}

fn ser_q<S: serde::Serializer>(x: &Q, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

impl Normalization {
    pub fn for_dim(m: usize) -> Normalization {
        // Vol(S^{m-1}) = 2 pi^{m/2} / (m/2 - 1)!
        let h = (m / 2) as i64;
        let fact: Q = (1..h).fold(Q::one(), |a, j| a * q(j, 1));
        let rat = q(2, 1) / fact;
        let sphere_volume = if rat.is_one() { format!("pi^{h}") } else { format!("{rat}*pi^{h}") };
        Normalization { sphere_volume, sphere_rational: rat, sphere_pi_power: h as i32, two_pi_power: -(m as i32), half_included: true }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CurvatureReport {
    pub dim: usize,
    pub operator: Operator,
    pub normalization: Normalization,
    pub k_powers: KPowers,
    #[serde(rename = "K")]
    pub k: SymbolicFunction,
    #[serde(rename = "G")]
    pub g: SymbolicFunction,
    #[serde(serialize_with = "ser_q")]
    pub c_scalar: Q,
    pub notes: Vec<String>,
    #[serde(skip)]
    pub signatures: Vec<TermSignature>,
}

impl CurvatureReport {
    /// `c_scalar * Vol(S^{m-1}) * (2 pi)^{-m}` as `(rational, power of pi)`.
    pub fn scalar_constant(&self) -> (Q, i32) {
        let n = &self.normalization;
        let two: Q = (0..self.dim).fold(Q::one(), |a, _| a * q(1, 2));
        (self.c_scalar.clone() * &n.sphere_rational * two, n.sphere_pi_power + n.two_pi_power)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "dim: {}", self.dim);
        let _ = writeln!(s, "operator: {}", self.operator.name());
        let n = &self.normalization;
        let _ = writeln!(s, "normalization: Vol(S^{}) = {}, (2*pi)^{}, 1/2 included", self.dim - 1, n.sphere_volume, n.two_pi_power);
        let kp = &self.k_powers;
        let _ = writeln!(s, "k_powers: hess {}, grad {}, scalar {}", kp.hess, kp.grad, kp.scalar);
        let _ = writeln!(s, "K: {}", self.k);
        let _ = writeln!(s, "G: {}", self.g);
        let _ = writeln!(s, "c_scalar: {}", self.c_scalar);
        let (c, p) = self.scalar_constant();
        let _ = writeln!(s, "scalar constant: {c} * pi^{p}");
        for note in &self.notes {
            let _ = writeln!(s, "note: {note}");
        }
        s
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_csv(&self) -> String {
        let (c, p) = self.scalar_constant();
        let rows = [
            ("dim", self.dim.to_string()),
            ("operator", self.operator.name().to_string()),
            ("K", self.k.render()),
            ("G", self.g.render()),
            ("c_scalar", self.c_scalar.to_string()),
            ("k_power_hess", self.k_powers.hess.to_string()),
            ("k_power_grad", self.k_powers.grad.to_string()),
            ("k_power_scalar", self.k_powers.scalar.to_string()),
            ("scalar_constant", format!("{c}*pi^{p}")),
        ];
        let mut s = String::from("field,value\n");
        for (k, v) in rows {
            let _ = writeln!(s, "{k},\"{v}\"");
        }
        s
    }
}

/// Signatures of every term of an averaged `b_2`.
pub fn signatures_of(avg: &Expr, m: usize) -> Result<Vec<TermSignature>> {
    avg.terms().map(|(w, c)| extract_signature(c, w, m)).collect()
}

/// Sphere-averaged `b_2` for an operator in dimension `m`.
pub fn averaged_b2(m: usize, op: Operator) -> Result<Expr> {
    let b2 = resolvent_b(2, &op.symbols())?;
    sphere_average(&b2, m)
}

/// Full pipeline: `b_2`, cosphere average, signatures, integration.
pub fn derive_curvature(m: usize, op: Operator) -> Result<CurvatureReport> {
    if m < 2 || m % 2 == 1 {
        return Err(Error::Usage(format!("dimension must be even and at least 2, got {m}")));
    }
    if op == Operator::Nc4tori && m != 4 {
        return Err(Error::Usage("the nc4tori operator lives in dimension 4".into()));
    }
    let avg = averaged_b2(m, op)?;
    let sigs = signatures_of(&avg, m)?;
    let mut sums: BTreeMap<Channel, SymbolicFunction> = BTreeMap::new();
    let mut powers: BTreeMap<Channel, i32> = BTreeMap::new();
    for sig in &sigs {
        if let Some(&p) = powers.get(&sig.channel) {
            if p != sig.k_total {
                return Err(Error::KPower(format!("{:?} channel mixes k^{p} and k^{}", sig.channel, sig.k_total)));
            }
        }
        powers.insert(sig.channel, sig.k_total);
        let f = integrate_signature(sig, m)?;
        let e = sums.entry(sig.channel).or_insert_with(SymbolicFunction::zero);
        *e = e.add(&f);
    }
    let half = (m / 2) as i32;
    let expected = KPowers { hess: -half, grad: -half - 1, scalar: -half + 1 };
    let k_powers = KPowers {
        hess: powers.get(&Channel::Hess).copied().unwrap_or(expected.hess),
        grad: powers.get(&Channel::Grad).copied().unwrap_or(expected.grad),
        scalar: powers.get(&Channel::Scalar).copied().unwrap_or(expected.scalar),
    };
    if k_powers != expected {
        return Err(Error::KPower(format!("got {k_powers:?}, expected {expected:?}")));
    }
    let scalar = sums.remove(&Channel::Scalar).unwrap_or_default();
    let c_scalar = match scalar.as_rational().and_then(|r| r.as_constant()) {
        Some(c) => c,
        None if scalar.is_zero() => Q::zero(),
        None => return Err(Error::UnsupportedSignature(format!("scalar channel is not constant: {scalar}"))),
    };
    let mut notes = Vec::new();
    if op == Operator::Nc4tori {
        notes.push(
            "reference closed forms for this operator disagree on the sign of K (both -1/(4s) and +1/(4s) appear); K above is the value produced by this pipeline".into(),
        );
    }
    Ok(CurvatureReport {
        dim: m,
        operator: op,
        normalization: Normalization::for_dim(m),
        k_powers,
        k: sums.remove(&Channel::Hess).unwrap_or_default(),
        g: sums.remove(&Channel::Grad).unwrap_or_default(),
        c_scalar,
        notes,
        signatures: sigs,
    })
}

/// `F(1) = 1/2 (d/du)^{m/2-2} (1-u)^{-3} |_0`, the scalar-curvature factor.
pub fn f_one(m: usize) -> Result<Q> {
    let f = super::integrate::family_derivative_dim_m(&[3], m)?;
    let c = f.as_rational().and_then(|r| r.as_constant()).ok_or_else(|| Error::Series("F(1) is not a constant".into()))?;
    Ok(c * q(1, 2))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_volume_constants() {
        assert_eq!(Normalization::for_dim(2).sphere_rational, q(2, 1));
        assert_eq!(Normalization::for_dim(4).sphere_rational, q(2, 1));
        assert_eq!(Normalization::for_dim(6).sphere_rational, q(1, 1));
        assert_eq!(Normalization::for_dim(8).sphere_rational, q(1, 3));
    }

    #[test]
    fn f_one_values() {
        assert_eq!(f_one(4).unwrap(), q(1, 2));
        assert_eq!(f_one(6).unwrap(), q(3, 2));
        assert_eq!(f_one(8).unwrap(), q(6, 1));
    }

    #[test]
    fn nc4tori_requires_dimension_four() {
        assert!(matches!(derive_curvature(2, Operator::Nc4tori), Err(Error::Usage(_))));
    }
}

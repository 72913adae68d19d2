use super::poly::Q;
use crate::error::{Error, Result};
use crate::symbol::{Atom, Coeff, Idx, Kind, Word};
use num::Zero;
use serde::Serialize;
use std::fmt;

/// Which curvature channel a scalar term feeds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Channel {
    /// `(nabla^2 k) g^{-1}`, one modular variable.
    Hess,
    /// `(nabla k)(nabla k) g^{-1}`, two modular variables.
    Grad,
    /// Bare scalar curvature.
    Scalar,
}

/// Fingerprint of one sphere-averaged term
/// `c * [b0^p0 k^a0] rho1 [b0^p1 k^a1] (rho2 [b0^p2 k^a2]) |xi|^(2w)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TermSignature {
    #[serde(serialize_with = "ser_q")]
    pub prefactor: Q,
    pub channel: Channel,
    pub b0_exponents: Vec<u32>,
    pub k_exponents: Vec<i32>,
    pub r_power: i32,
    /// Powers of the modular operator picked up by the first and second
    /// `rho` when all `k` powers are moved to the front.
    pub modular_shifts: (i32, i32),
    pub k_total: i32,
}

fn ser_q<S: serde::Serializer>(q: &Q, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&q.to_string())
}

impl TermSignature {
    /// Family label in the usual notation, e.g. `H(2,2,1)`.
    pub fn family(&self) -> String {
        let e: Vec<String> = self.b0_exponents.iter().map(|p| p.to_string()).collect();
        let name = if self.b0_exponents.len() == 3 { "H" } else { "K" };
        format!("{name}({})", e.join(","))
    }
}

impl fmt::Display for TermSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} * {} shifts ({},{}) w={} k^{}",
            self.prefactor,
            self.family(),
            self.modular_shifts.0,
            self.modular_shifts.1,
            self.r_power,
            self.k_total
        )
    }
}

fn unsupported(w: &Word, why: &str) -> Error {
    Error::UnsupportedSignature(format!("{why}: {}", w_string(w)))
}

fn w_string(w: &Word) -> String {
    w.atoms().map(|a| a.to_string()).collect::<Vec<_>>().join(" * ")
}

fn same_pair(a: &[Idx], x: Idx, y: Idx) -> bool {
    a.len() == 2 && ((a[0] == x && a[1] == y) || (a[0] == y && a[1] == x))
}

/// Read off the signature of a canonical post-averaging term in dimension `m`.
pub fn extract_signature(coeff: &Coeff, word: &Word, m: usize) -> Result<TermSignature> {
    if !coeff.im.is_zero() {
        return Err(Error::NonRealCoefficient(w_string(word)));
    }
    let mut exps = vec![0u32];
    let mut ks = vec![0i32];
    let mut rhos: Vec<&Atom> = Vec::new();
    for a in &word.nc {
        match a.kind {
            Kind::B0 => {
                if a.pow < 0 {
                    return Err(unsupported(word, "negative resolvent power"));
                }
                *exps.last_mut().expect("nonempty") += a.pow as u32;
            }
            Kind::K => *ks.last_mut().expect("nonempty") += a.pow,
            Kind::GradK | Kind::HessK => {
                rhos.push(a);
                exps.push(0);
                ks.push(0);
            }
            _ => return Err(unsupported(word, "atom outside the signature table")),
        }
    }
    if rhos.len() > 2 {
        return Err(unsupported(word, "more than two rho factors"));
    }
    let mut w = 0;
    let mut ginv: Vec<&Atom> = Vec::new();
    let mut scalar = 0;
    for a in &word.central {
        match a.kind {
            Kind::Xi2 => w += a.pow,
            Kind::Ginv => ginv.push(a),
            Kind::SDelta => scalar += a.pow,
            _ => return Err(unsupported(word, "central atom outside the signature table")),
        }
    }
    let channel = match (rhos.as_slice(), ginv.as_slice(), scalar) {
        ([h], [g], 0) if h.kind == Kind::HessK && same_pair(&g.slots, h.slots[0], h.slots[1]) => Channel::Hess,
        ([a, b], [g], 0)
            if a.kind == Kind::GradK && b.kind == Kind::GradK && same_pair(&g.slots, a.slots[0], b.slots[0]) =>
        {
            Channel::Grad
        }
        ([], [], 1) => Channel::Scalar,
        _ => return Err(unsupported(word, "rho pattern outside the table")),
    };
    let total_p: i32 = exps.iter().map(|&p| p as i32).sum();
    if w != total_p - 2 {
        return Err(unsupported(word, &format!("r-power {w} does not match resolvent power {total_p}")));
    }
    let j1: i32 = ks[1..].iter().sum();
    let j2: i32 = ks.get(2).copied().unwrap_or(0);
    let k_total = ks.iter().sum::<i32>() - w - (m as i32) / 2;
    Ok(TermSignature {
        prefactor: coeff.re.clone(),
        channel,
        b0_exponents: exps,
        k_exponents: ks,
        r_power: w,
        modular_shifts: (j1, j2),
        k_total,
    })
}

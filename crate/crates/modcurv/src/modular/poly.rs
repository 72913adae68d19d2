use super::dd::DD;
use num::{BigRational, One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt::Write as _;

pub type Q = BigRational;

pub fn q(n: i64, d: i64) -> Q {
    Q::new(n.into(), d.into())
}

/// Polynomial in `s, t` with rational coefficients, keyed by `(deg_s, deg_t)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Poly2 {
    terms: BTreeMap<(u32, u32), Q>,
}

impl Poly2 {
    pub fn zero() -> Poly2 {
        Poly2::default()
    }

    pub fn constant(c: Q) -> Poly2 {
        Poly2::monomial(c, 0, 0)
    }

    pub fn one() -> Poly2 {
        Poly2::constant(Q::one())
    }

    pub fn monomial(c: Q, i: u32, j: u32) -> Poly2 {
        let mut p = Poly2::zero();
        p.add_term(i, j, c);
        p
    }

    pub fn s() -> Poly2 {
        Poly2::monomial(Q::one(), 1, 0)
    }

    pub fn t() -> Poly2 {
        Poly2::monomial(Q::one(), 0, 1)
    }

    fn add_term(&mut self, i: u32, j: u32, c: Q) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry((i, j)).or_insert_with(Q::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&(i, j));
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn as_constant(&self) -> Option<Q> {
        match self.terms.len() {
            0 => Some(Q::zero()),
            1 => self.terms.get(&(0, 0)).cloned(),
            _ => None,
        }
    }

    pub fn uses_t(&self) -> bool {
        self.terms.keys().any(|&(_, j)| j > 0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &Q)> {
        self.terms.iter()
    }

    pub fn add(&self, o: &Poly2) -> Poly2 {
        let mut p = self.clone();
        for (&(i, j), c) in &o.terms {
            p.add_term(i, j, c.clone());
        }
        p
    }

    pub fn neg(&self) -> Poly2 {
        self.scale(&-Q::one())
    }

    pub fn sub(&self, o: &Poly2) -> Poly2 {
        self.add(&o.neg())
    }

    pub fn scale(&self, c: &Q) -> Poly2 {
        let mut p = Poly2::zero();
        for (&(i, j), a) in &self.terms {
            p.add_term(i, j, a * c);
        }
        p
    }

    pub fn mul(&self, o: &Poly2) -> Poly2 {
        let mut p = Poly2::zero();
        for (&(i, j), a) in &self.terms {
            for (&(k, l), b) in &o.terms {
                p.add_term(i + k, j + l, a * b);
            }
        }
        p
    }

    pub fn pow(&self, e: u32) -> Poly2 {
        (0..e).fold(Poly2::one(), |acc, _| acc.mul(self))
    }

    fn lead(&self) -> Option<((u32, u32), &Q)> {
        self.terms.iter().next_back().map(|(k, v)| (*k, v))
    }

    /// Exact quotient `self / g`, or `None` if `g` does not divide.
    /// Lex long division; for a single divisor the remainder is zero exactly
    /// when the division is exact.
    pub fn div_exact(&self, g: &Poly2) -> Option<Poly2> {
        let ((gi, gj), gc) = g.lead()?;
        let gc = gc.clone();
        let mut rem = self.clone();
        let mut quo = Poly2::zero();
        while let Some(((ri, rj), rc)) = rem.lead() {
            if ri < gi || rj < gj {
                return None;
            }
            let c = rc / &gc;
            let m = Poly2::monomial(c, ri - gi, rj - gj);
            rem = rem.sub(&m.mul(g));
            quo = quo.add(&m);
        }
        Some(quo)
    }

    pub fn eval_dd(&self, s: DD, t: DD) -> DD {
        let mut acc = DD::ZERO;
        for (&(i, j), c) in &self.terms {
            acc = acc + DD::from_rational(c) * s.powi(i as i32) * t.powi(j as i32);
        }
        acc
    }

    pub fn eval_q(&self, s: &Q, t: &Q) -> Q {
        let mut acc = Q::zero();
        for (&(i, j), c) in &self.terms {
            acc += c * num::pow(s.clone(), i as usize) * num::pow(t.clone(), j as usize);
        }
        acc
    }

    /// Least common denominator of the coefficients.
    pub fn coeff_denominator_lcm(&self) -> num::BigInt {
        use num::Integer;
        self.terms.values().fold(num::BigInt::one(), |acc, c| acc.lcm(c.denom()))
    }

    /// Infix rendering with descending degrees, e.g. `s^2*t - 2*s + 1`.
    pub fn render(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (idx, (&(i, j), c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if idx == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mut factors: Vec<String> = Vec::new();
            if !a.is_one() || (i == 0 && j == 0) {
                factors.push(a.to_string());
            }
            for (v, d) in [("s", i), ("t", j)] {
                match d {
                    0 => {}
                    1 => factors.push(v.into()),
                    _ => factors.push(format!("{v}^{d}")),
                }
            }
            let _ = write!(out, "{}", factors.join("*"));
        }
        out
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }
}

/// Irreducible factors allowed in denominators.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Factor {
    S,
    T,
    SMinus1,
    TMinus1,
    STMinus1,
}

impl Factor {
    pub const ALL: [Factor; 5] = [Factor::S, Factor::T, Factor::SMinus1, Factor::TMinus1, Factor::STMinus1];

    pub fn poly(self) -> Poly2 {
        match self {
            Factor::S => Poly2::s(),
            Factor::T => Poly2::t(),
            Factor::SMinus1 => Poly2::s().sub(&Poly2::one()),
            Factor::TMinus1 => Poly2::t().sub(&Poly2::one()),
            Factor::STMinus1 => Poly2::s().mul(&Poly2::t()).sub(&Poly2::one()),
        }
    }

    pub fn render(self) -> &'static str {
        match self {
            Factor::S => "s",
            Factor::T => "t",
            Factor::SMinus1 => "(s-1)",
            Factor::TMinus1 => "(t-1)",
            Factor::STMinus1 => "(s*t-1)",
        }
    }

    pub fn uses_t(self) -> bool {
        matches!(self, Factor::T | Factor::TMinus1 | Factor::STMinus1)
    }

    pub fn eval_dd(self, s: DD, t: DD) -> DD {
        match self {
            Factor::S => s,
            Factor::T => t,
            Factor::SMinus1 => s - DD::ONE,
            Factor::TMinus1 => t - DD::ONE,
            Factor::STMinus1 => s * t - DD::ONE,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn division_by_factors() {
        let p = Factor::STMinus1.poly().mul(&Factor::SMinus1.poly()).mul(&Poly2::t());
        let qt = p.div_exact(&Factor::STMinus1.poly()).unwrap();
        assert_eq!(qt, Factor::SMinus1.poly().mul(&Poly2::t()));
        assert!(p.div_exact(&Factor::TMinus1.poly()).is_none());
        assert_eq!(p.div_exact(&p).unwrap(), Poly2::one());
    }

    #[test]
    fn render_is_readable() {
        let p = Poly2::s().scale(&q(-2, 1)).add(&Poly2::constant(q(2, 1)));
        assert_eq!(p.render(), "-2*s + 2");
        let p = Poly2::s().mul(&Poly2::t()).sub(&Poly2::constant(q(1, 3)));
        assert_eq!(p.render(), "s*t - 1/3");
    }
}

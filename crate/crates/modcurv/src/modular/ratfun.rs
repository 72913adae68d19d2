use super::dd::DD;
use super::poly::{Factor, Poly2, Q};
use crate::error::{Error, Result};
use num::{One, Zero};
use std::collections::BTreeMap;

/// Rational function `num / prod f^e` with the denominator factored over
/// [`Factor`]. Always reduced, so structural equality is exact equality.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct RatFun {
    num: Poly2,
    den: BTreeMap<Factor, u32>,
}

impl RatFun {
    pub fn zero() -> RatFun {
        RatFun::default()
    }

    pub fn one() -> RatFun {
        RatFun::from_poly(Poly2::one())
    }

    pub fn constant(c: Q) -> RatFun {
        RatFun::from_poly(Poly2::constant(c))
    }

    pub fn from_poly(p: Poly2) -> RatFun {
        RatFun { num: p, den: BTreeMap::new() }
    }

    /// `f^e` for any integer `e`.
    pub fn factor_pow(f: Factor, e: i32) -> RatFun {
        if e >= 0 {
            RatFun::from_poly(f.poly().pow(e as u32))
        } else {
            let mut den = BTreeMap::new();
            den.insert(f, (-e) as u32);
            RatFun { num: Poly2::one(), den }
        }
    }

    pub fn s() -> RatFun {
        RatFun::from_poly(Poly2::s())
    }

    pub fn t() -> RatFun {
        RatFun::from_poly(Poly2::t())
    }

    pub fn st() -> RatFun {
        RatFun::from_poly(Poly2::s().mul(&Poly2::t()))
    }

    pub fn numerator(&self) -> &Poly2 {
        &self.num
    }

    pub fn denominator(&self) -> &BTreeMap<Factor, u32> {
        &self.den
    }

    fn reduce(mut self) -> RatFun {
        if self.num.is_zero() {
            self.den.clear();
            return self;
        }
        let factors: Vec<Factor> = self.den.keys().copied().collect();
        for f in factors {
            let fp = f.poly();
            while self.den.get(&f).copied().unwrap_or(0) > 0 {
                match self.num.div_exact(&fp) {
                    Some(q) => {
                        self.num = q;
                        *self.den.get_mut(&f).expect("present") -= 1;
                    }
                    None => break,
                }
            }
        }
        self.den.retain(|_, e| *e > 0);
        self
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn as_constant(&self) -> Option<Q> {
        if self.den.is_empty() {
            self.num.as_constant()
        } else {
            None
        }
    }

    pub fn uses_t(&self) -> bool {
        self.num.uses_t() || self.den.keys().any(|f| f.uses_t())
    }

    fn den_poly(den: &BTreeMap<Factor, u32>) -> Poly2 {
        den.iter().fold(Poly2::one(), |acc, (f, &e)| acc.mul(&f.poly().pow(e)))
    }

    pub fn add(&self, o: &RatFun) -> RatFun {
        let mut den = self.den.clone();
        for (f, &e) in &o.den {
            let x = den.entry(*f).or_insert(0);
            *x = (*x).max(e);
        }
        let lift = |r: &RatFun| -> Poly2 {
            let extra: BTreeMap<Factor, u32> =
                den.iter().map(|(f, &e)| (*f, e - r.den.get(f).copied().unwrap_or(0))).collect();
            r.num.mul(&RatFun::den_poly(&extra))
        };
        RatFun { num: lift(self).add(&lift(o)), den }.reduce()
    }

    pub fn neg(&self) -> RatFun {
        RatFun { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn sub(&self, o: &RatFun) -> RatFun {
        self.add(&o.neg())
    }

    pub fn scale(&self, c: &Q) -> RatFun {
        RatFun { num: self.num.scale(c), den: self.den.clone() }.reduce()
    }

    pub fn mul(&self, o: &RatFun) -> RatFun {
        let mut den = self.den.clone();
        for (f, &e) in &o.den {
            *den.entry(*f).or_insert(0) += e;
        }
        RatFun { num: self.num.mul(&o.num), den }.reduce()
    }

    /// Inverse; the numerator must factor over [`Factor`] up to a constant.
    pub fn inv(&self) -> Result<RatFun> {
        if self.is_zero() {
            return Err(Error::Factor("division by zero".into()));
        }
        let mut rest = self.num.clone();
        let mut den: BTreeMap<Factor, u32> = BTreeMap::new();
        for f in Factor::ALL {
            let fp = f.poly();
            while let Some(qt) = rest.div_exact(&fp) {
                rest = qt;
                *den.entry(f).or_insert(0) += 1;
            }
        }
        let c = rest
            .as_constant()
            .ok_or_else(|| Error::Factor(format!("numerator {} does not factor over s, t, s-1, t-1, st-1", self.num.render())))?;
        let num = RatFun::den_poly(&self.den).scale(&(Q::one() / c));
        Ok(RatFun { num, den }.reduce())
    }

    pub fn div(&self, o: &RatFun) -> Result<RatFun> {
        Ok(self.mul(&o.inv()?))
    }

    pub fn powi(&self, e: i32) -> Result<RatFun> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        Ok((0..e.unsigned_abs()).fold(RatFun::one(), |acc, _| acc.mul(&base)))
    }

    pub fn eval_dd(&self, s: DD, t: DD) -> DD {
        let mut d = DD::ONE;
        for (f, &e) in &self.den {
            d = d * f.eval_dd(s, t).powi(e as i32);
        }
        self.num.eval_dd(s, t) / d
    }

    /// Exact value at a rational point, `None` on a pole.
    pub fn eval_q(&self, s: &Q, t: &Q) -> Option<Q> {
        let mut d = Q::one();
        for (f, &e) in &self.den {
            d *= num::pow(f.poly().eval_q(s, t), e as usize);
        }
        if d.is_zero() {
            None
        } else {
            Some(self.num.eval_q(s, t) / d)
        }
    }
}

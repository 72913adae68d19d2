use super::dd::DD;
use super::poly::{Factor, Poly2, Q};
use super::ratfun::RatFun;
use crate::error::{Error, Result};
use num::{BigInt, Integer, One, Zero};
use serde::{Serialize, Serializer};
use std::collections::BTreeMap;
use std::fmt;

/// Transcendental basis of the closed forms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Basis {
    One,
    LogS,
    LogST,
}

impl Basis {
    fn render(self) -> &'static str {
        match self {
            Basis::One => "",
            Basis::LogS => "log(s)",
            Basis::LogST => "log(s*t)",
        }
    }
}

/// `sum_b R_b(s, t) * b` over the basis `{1, log s, log(st)}`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SymbolicFunction {
    parts: BTreeMap<Basis, RatFun>,
}

/// Distance to `{s = 1, t = 1, st = 1}` below which evaluation switches to
/// the Richardson limit.
pub const SINGULAR_RADIUS: f64 = 1e-4;

impl SymbolicFunction {
    pub fn zero() -> SymbolicFunction {
        SymbolicFunction::default()
    }

    pub fn rational(r: RatFun) -> SymbolicFunction {
        SymbolicFunction::from_part(Basis::One, r)
    }

    pub fn from_part(b: Basis, r: RatFun) -> SymbolicFunction {
        let mut f = SymbolicFunction::zero();
        if !r.is_zero() {
            f.parts.insert(b, r);
        }
        f
    }

    pub fn log_s() -> SymbolicFunction {
        SymbolicFunction::from_part(Basis::LogS, RatFun::one())
    }

    pub fn log_st() -> SymbolicFunction {
        SymbolicFunction::from_part(Basis::LogST, RatFun::one())
    }

    pub fn part(&self, b: Basis) -> RatFun {
        self.parts.get(&b).cloned().unwrap_or_default()
    }

    pub fn parts(&self) -> impl Iterator<Item = (&Basis, &RatFun)> {
        self.parts.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.parts.is_empty()
    }

    /// True when the function depends on `t`.
    pub fn is_two_variable(&self) -> bool {
        self.parts.iter().any(|(b, r)| *b == Basis::LogST || r.uses_t())
    }

    pub fn add(&self, o: &SymbolicFunction) -> SymbolicFunction {
        let mut f = self.clone();
        for (b, r) in &o.parts {
            let sum = f.part(*b).add(r);
            if sum.is_zero() {
                f.parts.remove(b);
            } else {
                f.parts.insert(*b, sum);
            }
        }
        f
    }

    pub fn neg(&self) -> SymbolicFunction {
        SymbolicFunction { parts: self.parts.iter().map(|(b, r)| (*b, r.neg())).collect() }
    }

    pub fn sub(&self, o: &SymbolicFunction) -> SymbolicFunction {
        self.add(&o.neg())
    }

    pub fn mul_rat(&self, r: &RatFun) -> SymbolicFunction {
        let mut f = SymbolicFunction::zero();
        for (b, x) in &self.parts {
            let y = x.mul(r);
            if !y.is_zero() {
                f.parts.insert(*b, y);
            }
        }
        f
    }

    pub fn scale(&self, c: &Q) -> SymbolicFunction {
        self.mul_rat(&RatFun::constant(c.clone()))
    }

    /// The log-free part if there is nothing else.
    pub fn as_rational(&self) -> Option<RatFun> {
        if self.parts.keys().all(|b| *b == Basis::One) {
            Some(self.part(Basis::One))
        } else {
            None
        }
    }

    pub fn mul(&self, o: &SymbolicFunction) -> Result<SymbolicFunction> {
        if let Some(r) = o.as_rational() {
            return Ok(self.mul_rat(&r));
        }
        if let Some(r) = self.as_rational() {
            return Ok(o.mul_rat(&r));
        }
        Err(Error::Parse("product of two logarithmic terms is outside the function basis".into()))
    }

    /// Direct evaluation in double-double precision, no limit handling.
    pub fn eval_direct(&self, s: DD, t: DD) -> DD {
        let mut acc = DD::ZERO;
        for (b, r) in &self.parts {
            let v = r.eval_dd(s, t);
            acc = acc
                + match b {
                    Basis::One => v,
                    Basis::LogS => v * s.ln(),
                    Basis::LogST => v * (s * t).ln(),
                };
        }
        acc
    }

    fn singular_distance(&self, s: f64, t: f64) -> f64 {
        let mut d = f64::INFINITY;
        for r in self.parts.values() {
            for f in r.denominator().keys() {
                let v = match f {
                    Factor::S | Factor::T => continue,
                    Factor::SMinus1 => s - 1.0,
                    Factor::TMinus1 => t - 1.0,
                    Factor::STMinus1 => s * t - 1.0,
                };
                d = d.min(v.abs());
            }
        }
        d
    }

    /// Value at `(s, t)`; `t` is ignored by one-variable functions. Within
    /// [`SINGULAR_RADIUS`] of a removable singularity the value is the
    /// Richardson limit of symmetric averages along `(s e^h, t e^{2h})`.
    pub fn eval(&self, s: f64, t: f64) -> Result<f64> {
        if !(s > 0.0 && t > 0.0) || !s.is_finite() || !t.is_finite() {
            return Err(Error::Usage(format!("evaluation needs s, t > 0, got s = {s}, t = {t}")));
        }
        if self.singular_distance(s, t) >= SINGULAR_RADIUS {
            return Ok(self.eval_direct(DD::new(s), DD::new(t)).to_f64());
        }
        Ok(self.richardson(s, t))
    }

    pub fn richardson(&self, s: f64, t: f64) -> f64 {
        let two_var = self.is_two_variable();
        let sym = |h: f64| -> DD {
            let at = |h: f64| {
                let tt = if two_var { t * (2.0 * h).exp() } else { t };
                self.eval_direct(DD::new(s * h.exp()), DD::new(tt))
            };
            (at(h) + at(-h)) * DD::new(0.5)
        };
        let h0 = 0.02;
        let mut table: Vec<Vec<DD>> = Vec::new();
        for k in 0..4 {
            let mut row = vec![sym(h0 / f64::from(1 << k))];
            for j in 1..=k {
                let prev: &Vec<DD> = &table[k - 1];
                let f = DD::new(4f64.powi(j as i32) - 1.0);
                let v = row[j - 1] + (row[j - 1] - prev[j - 1]) / f;
                row.push(v);
            }
            table.push(row);
        }
        table[3][3].to_f64()
    }

    /// Infix rendering over a common denominator, e.g.
    /// `(-2*s + 2 + (s + 1)*log(s)) / (2*(s-1)^3)`.
    pub fn render(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut den: BTreeMap<Factor, u32> = BTreeMap::new();
        for r in self.parts.values() {
            for (f, &e) in r.denominator() {
                let x = den.entry(*f).or_insert(0);
                *x = (*x).max(e);
            }
        }
        let mut nums: Vec<(Basis, Poly2)> = Vec::new();
        for (b, r) in &self.parts {
            let mut p = r.numerator().clone();
            for (f, &e) in &den {
                let have = r.denominator().get(f).copied().unwrap_or(0);
                p = p.mul(&f.poly().pow(e - have));
            }
            nums.push((*b, p));
        }
        // Clear rational coefficients and pull out the integer content.
        let l = nums.iter().fold(BigInt::one(), |acc, (_, p)| acc.lcm(&p.coeff_denominator_lcm()));
        let lq = Q::from_integer(l.clone());
        let mut g = BigInt::zero();
        for (_, p) in nums.iter_mut() {
            *p = p.scale(&lq);
            for (_, c) in p.terms() {
                g = g.gcd(c.numer());
            }
        }
        let gq = Q::from_integer(g.clone());
        for (_, p) in nums.iter_mut() {
            *p = p.scale(&(Q::one() / &gq));
        }
        let k = gq / lq;
        let mut body = String::new();
        for (i, (b, p)) in nums.iter().enumerate() {
            let piece = match b {
                Basis::One => p.render(),
                _ if p.as_constant().is_some_and(|c| c.is_one()) => b.render().to_string(),
                _ if p.as_constant().is_some_and(|c| c == -Q::one()) => format!("-{}", b.render()),
                _ => format!("({})*{}", p.render(), b.render()),
            };
            if i == 0 {
                body.push_str(&piece);
            } else if let Some(rest) = piece.strip_prefix('-') {
                body.push_str(" - ");
                body.push_str(rest);
            } else {
                body.push_str(" + ");
                body.push_str(&piece);
            }
        }
        let mut den_parts: Vec<String> = Vec::new();
        if !k.denom().is_one() {
            den_parts.push(k.denom().to_string());
        }
        for (f, &e) in &den {
            den_parts.push(if e == 1 { f.render().to_string() } else { format!("{}^{}", f.render(), e) });
        }
        let single = nums.len() == 1 && nums[0].1.term_count() == 1 && nums[0].0 == Basis::One;
        let top = if single {
            nums[0].1.scale(&Q::from_integer(k.numer().clone())).render()
        } else if k.numer().is_one() {
            format!("({body})")
        } else {
            format!("{}*({body})", k.numer())
        };
        if den_parts.is_empty() {
            top
        } else {
            format!("{top} / ({})", den_parts.join("*"))
        }
    }
}

impl fmt::Display for SymbolicFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render())
    }
}

impl Serialize for SymbolicFunction {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.render())
    }
}

// ---- parser -------------------------------------------------------------

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Op(char),
}

fn lex(src: &str) -> Result<Vec<Tok>> {
    let mut out = Vec::new();
    let cs: Vec<char> = src.chars().collect();
    let mut i = 0;
    while i < cs.len() {
        let c = cs[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let st = i;
            while i < cs.len() && cs[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = cs[st..i].iter().collect();
            out.push(Tok::Num(s.parse().expect("digits")));
        } else if c.is_ascii_alphabetic() {
            let st = i;
            while i < cs.len() && cs[i].is_ascii_alphanumeric() {
                i += 1;
            }
            out.push(Tok::Ident(cs[st..i].iter().collect()));
        } else if "+-*/^()".contains(c) {
            out.push(Tok::Op(c));
            i += 1;
        } else {
            return Err(Error::Parse(format!("unexpected character '{c}' in function")));
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Op(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(Error::Parse(format!("expected '{c}' at token {}", self.pos)))
        }
    }

    fn sum(&mut self) -> Result<SymbolicFunction> {
        let mut acc = if self.eat('-') { self.product()?.neg() } else { self.product()? };
        loop {
            if self.eat('+') {
                acc = acc.add(&self.product()?);
            } else if self.eat('-') {
                acc = acc.sub(&self.product()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn product(&mut self) -> Result<SymbolicFunction> {
        let mut acc = self.power()?;
        loop {
            if self.eat('*') {
                acc = acc.mul(&self.power()?)?;
            } else if self.eat('/') {
                let d = self.power()?;
                let r = d.as_rational().ok_or_else(|| Error::Parse("division by a logarithmic term".into()))?;
                acc = acc.mul_rat(&r.inv()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn power(&mut self) -> Result<SymbolicFunction> {
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let neg = self.eat('-');
        let e = match self.peek() {
            Some(Tok::Num(n)) => {
                let n: i32 = n.try_into().map_err(|_| Error::Parse("exponent too large".into()))?;
                self.pos += 1;
                if neg {
                    -n
                } else {
                    n
                }
            }
            _ => return Err(Error::Parse("expected integer exponent".into())),
        };
        let r = base.as_rational().ok_or_else(|| Error::Parse("power of a logarithmic term".into()))?;
        Ok(SymbolicFunction::rational(r.powi(e)?))
    }

    fn atom(&mut self) -> Result<SymbolicFunction> {
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                Ok(SymbolicFunction::rational(RatFun::constant(Q::from_integer(n))))
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.sum()?;
                self.expect(')')?;
                Ok(e)
            }
            Some(Tok::Op('-')) => {
                self.pos += 1;
                Ok(self.power()?.neg())
            }
            Some(Tok::Ident(id)) => {
                self.pos += 1;
                match id.as_str() {
                    "s" => Ok(SymbolicFunction::rational(RatFun::s())),
                    "t" => Ok(SymbolicFunction::rational(RatFun::t())),
                    "log" => {
                        self.expect('(')?;
                        let arg = self.sum()?;
                        self.expect(')')?;
                        let r = arg.as_rational().ok_or_else(|| Error::Parse("log of a logarithm".into()))?;
                        if r == RatFun::s() {
                            Ok(SymbolicFunction::log_s())
                        } else if r == RatFun::st() {
                            Ok(SymbolicFunction::log_st())
                        } else if r == RatFun::t() {
                            Ok(SymbolicFunction::log_st().sub(&SymbolicFunction::log_s()))
                        } else {
                            Err(Error::Parse("log argument must be s, t or s*t".into()))
                        }
                    }
                    other => Err(Error::Parse(format!("unknown identifier '{other}'"))),
                }
            }
            other => Err(Error::Parse(format!("unexpected token {other:?}"))),
        }
    }
}

/// Parse the infix grammar used by [`SymbolicFunction::render`].
pub fn parse_function(src: &str) -> Result<SymbolicFunction> {
    let mut p = Parser { toks: lex(src)?, pos: 0 };
    let f = p.sum()?;
    if p.pos != p.toks.len() {
        return Err(Error::Parse(format!("trailing input at token {}", p.pos)));
    }
    Ok(f)
}

/// Sign-insensitive comparison helper used by reports.
pub fn is_negation(a: &SymbolicFunction, b: &SymbolicFunction) -> bool {
    a.add(b).is_zero() && !a.is_zero()
}

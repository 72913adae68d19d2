use super::atom::{Atom, Idx, Kind};
use super::monomial::{fmt_coeff, mul_words, Coeff, Monomial, Word};
use crate::error::{Error, Result};
use num::{BigInt, BigRational, Complex, One, Zero};
use std::collections::BTreeMap;
use std::fmt;

/// Finite sum of canonical monomials with like terms collected.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Expr {
    terms: BTreeMap<Word, Coeff>,
}

impl Expr {
    pub fn zero() -> Expr {
        Expr::default()
    }

    pub fn one() -> Expr {
        Expr::scalar(Coeff::one())
    }

    pub fn scalar(c: Coeff) -> Expr {
        let mut e = Expr::zero();
        e.add_word(Word::unit(), c);
        e
    }

    pub fn atom(a: Atom) -> Expr {
        Expr::from_atoms(Coeff::one(), vec![a]).expect("single atom is canonical")
    }

    pub fn from_atoms(c: Coeff, atoms: Vec<Atom>) -> Result<Expr> {
        let m = Monomial::new(c, atoms)?;
        Ok(Expr::from_monomial(m))
    }

    pub fn from_monomial(m: Monomial) -> Expr {
        let mut e = Expr::zero();
        e.add_word(m.word, m.coeff);
        e
    }

    pub fn add_word(&mut self, w: Word, c: Coeff) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(w.clone()).or_insert_with(Coeff::zero);
        *entry = &*entry + c;
        if entry.is_zero() {
            self.terms.remove(&w);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &Coeff)> {
        self.terms.iter()
    }

    pub fn monomials(&self) -> impl Iterator<Item = Monomial> + '_ {
        self.terms.iter().map(|(w, c)| Monomial { coeff: c.clone(), word: w.clone() })
    }

    pub fn add(&self, other: &Expr) -> Expr {
        let mut e = self.clone();
        for (w, c) in &other.terms {
            e.add_word(w.clone(), c.clone());
        }
        e
    }

    pub fn sub(&self, other: &Expr) -> Expr {
        self.add(&other.scale(&-Coeff::one()))
    }

    pub fn scale(&self, c: &Coeff) -> Expr {
        let mut e = Expr::zero();
        for (w, a) in &self.terms {
            e.add_word(w.clone(), a * c);
        }
        e
    }

    pub fn mul(&self, other: &Expr) -> Result<Expr> {
        let mut e = Expr::zero();
        for (w1, c1) in &self.terms {
            for (w2, c2) in &other.terms {
                let w = mul_words(w1, w2)?;
                e.add_word(w, c1 * c2);
            }
        }
        Ok(e)
    }

    pub fn mul_all(factors: &[&Expr]) -> Result<Expr> {
        let mut acc = Expr::one();
        for f in factors {
            acc = acc.mul(f)?;
        }
        Ok(acc)
    }

    /// Largest free label in use, so operators can pick a fresh one.
    pub fn max_free(&self) -> Option<u8> {
        self.terms.keys().flat_map(|w| w.free_labels().into_keys()).max()
    }

    /// Set of homogeneity degrees over all terms.
    pub fn homogeneity_degrees(&self) -> Vec<i32> {
        let mut v: Vec<i32> = self.terms.keys().map(|w| w.homogeneity()).collect();
        v.sort();
        v.dedup();
        v
    }

    /// True when every coefficient is real.
    pub fn is_real(&self) -> bool {
        self.terms.values().all(|c| c.im.is_zero())
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.monomials().map(|m| m.to_string()).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

fn parse_rational(tok: &str) -> Result<BigRational> {
    let bad = || Error::Parse(format!("bad rational '{tok}'"));
    match tok.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.parse().map_err(|_| bad())?;
            let d: BigInt = d.parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(n, d))
        }
        None => Ok(BigRational::from_integer(tok.parse().map_err(|_| bad())?)),
    }
}

fn parse_coeff(tok: &str) -> Result<Coeff> {
    let tok = tok.trim();
    if let Some(inner) = tok.strip_prefix('(').and_then(|t| t.strip_suffix(')')) {
        let body = inner.strip_suffix('i').ok_or_else(|| Error::Parse(format!("bad complex '{tok}'")))?;
        // Split at the sign that starts the imaginary part.
        let pos = body
            .char_indices()
            .skip(1)
            .filter(|(_, ch)| *ch == '+' || *ch == '-')
            .map(|(i, _)| i)
            .last()
            .ok_or_else(|| Error::Parse(format!("bad complex '{tok}'")))?;
        let re = parse_rational(&body[..pos])?;
        let im_s = &body[pos..];
        let im = parse_rational(im_s.strip_prefix('+').unwrap_or(im_s))?;
        return Ok(Complex::new(re, im));
    }
    if let Some(im) = tok.strip_suffix('i') {
        let im = match im {
            "" | "+" => BigRational::one(),
            "-" => -BigRational::one(),
            s => parse_rational(s)?,
        };
        return Ok(Complex::new(BigRational::zero(), im));
    }
    Ok(Complex::new(parse_rational(tok)?, BigRational::zero()))
}

fn parse_atom(tok: &str, labels: &mut BTreeMap<String, usize>, raw: &mut Vec<(Kind, i32, Vec<String>)>) -> Result<()> {
    let (head, slots) = match tok.find('[') {
        Some(i) => {
            let body = tok[i + 1..].strip_suffix(']').ok_or_else(|| Error::Parse(format!("unclosed slots in '{tok}'")))?;
            (&tok[..i], body.split(',').map(|s| s.trim().to_string()).collect::<Vec<_>>())
        }
        None => (tok, Vec::new()),
    };
    let (name, pow) = match head.split_once('^') {
        Some((n, p)) => (n, p.parse::<i32>().map_err(|_| Error::Parse(format!("bad power in '{tok}'")))?),
        None => (head, 1),
    };
    let kind = Kind::from_name(name).ok_or_else(|| Error::Parse(format!("unknown atom '{name}'")))?;
    if slots.len() != kind.rank() {
        return Err(Error::Parse(format!("{name} takes {} slots", kind.rank())));
    }
    if kind.rank() > 0 && pow != 1 {
        return Err(Error::Parse(format!("powers of tensor atom '{tok}'")));
    }
    for s in &slots {
        *labels.entry(s.clone()).or_insert(0) += 1;
    }
    raw.push((kind, pow, slots));
    Ok(())
}

/// Parse the text grammar `coeff * atom * ... + coeff * ...`.
/// Labels used twice are contracted; labels used once are free.
pub fn parse_expr(src: &str) -> Result<Expr> {
    let src = src.trim();
    let mut e = Expr::zero();
    if src == "0" {
        return Ok(e);
    }
    for term in src.split(" + ") {
        let mut toks = term.split(" * ");
        let coeff = parse_coeff(toks.next().ok_or_else(|| Error::Parse("empty term".into()))?)?;
        let mut labels = BTreeMap::new();
        let mut raw = Vec::new();
        for t in toks {
            parse_atom(t.trim(), &mut labels, &mut raw)?;
        }
        let mut ids: BTreeMap<String, Idx> = BTreeMap::new();
        // printed free labels `iN` keep their number; other single labels take unused ones
        let explicit = |name: &str| name.strip_prefix('i').and_then(|d| d.parse::<u8>().ok());
        let mut taken: Vec<u8> = labels.iter().filter(|(_, c)| **c == 1).filter_map(|(n, _)| explicit(n)).collect();
        let (mut nd, mut nf) = (0u8, 0u8);
        for (name, count) in &labels {
            let idx = match count {
                1 if explicit(name).is_some() => Idx::Free(explicit(name).unwrap_or(0)),
                1 => {
                    while taken.contains(&nf) {
                        nf += 1;
                    }
                    taken.push(nf);
                    Idx::Free(nf)
                }
                2 => {
                    nd += 1;
                    Idx::Dummy(nd - 1)
                }
                _ => return Err(Error::Parse(format!("label '{name}' used {count} times"))),
            };
            ids.insert(name.clone(), idx);
        }
        let atoms = raw
            .into_iter()
            .map(|(kind, pow, slots)| Atom { kind, pow, slots: slots.iter().map(|s| ids[s]).collect() })
            .collect();
        let m = Monomial::new(coeff, atoms)?;
        e.add_word(m.word, m.coeff);
    }
    Ok(e)
}

/// Render one coefficient in the grammar's style.
pub fn coeff_string(c: &Coeff) -> String {
    fmt_coeff(c)
}

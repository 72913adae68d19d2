//! The deformed Fourier algebra of the noncommutative n-torus.
//!
//! Elements are finitely supported series `sum_r a_r U_r` with the product
//! `U_r U_l = chi(r, l) U_{r+l}`, `chi(r, l) = exp(i pi <r, Theta l>)`.
//! Coefficients are either `Complex<f64>` or exact cyclotomic numbers
//! ([`Cyclo`]), the latter requiring a rational `Theta`.

mod cyclotomic;
mod scalar;

pub use cyclotomic::{cyclotomic_poly, rat_to_f64, Cyclo};
pub use scalar::{Scalar, C64};

use crate::error::{Error, Result};
use num::{BigInt, BigRational, Zero};
use std::collections::BTreeMap;

/// Real skew-symmetric `n x n` deformation matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct SkewMatrix {
    n: usize,
    float: Vec<f64>,
    exact: Option<Vec<BigRational>>,
}

impl SkewMatrix {
    pub fn from_rationals(n: usize, entries: Vec<BigRational>) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::DimensionMismatch(format!("expected {} entries", n * n)));
        }
        for i in 0..n {
            for j in 0..n {
                if entries[i * n + j] != -entries[j * n + i].clone() {
                    return Err(Error::NotSkew(format!("entry ({i},{j})")));
                }
            }
        }
        let float = entries.iter().map(rat_to_f64).collect();
        Ok(SkewMatrix { n, float, exact: Some(entries) })
    }

    pub fn from_f64(n: usize, entries: Vec<f64>) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::DimensionMismatch(format!("expected {} entries", n * n)));
        }
        for i in 0..n {
            for j in 0..n {
                if entries[i * n + j] != -entries[j * n + i] {
                    return Err(Error::NotSkew(format!("entry ({i},{j})")));
                }
            }
        }
        Ok(SkewMatrix { n, float: entries, exact: None })
    }

    /// The 2-torus matrix `[[0, theta], [-theta, 0]]`.
    pub fn theta2(theta: f64) -> Self {
        SkewMatrix::from_f64(2, vec![0.0, theta, -theta, 0.0]).expect("skew")
    }

    /// Exact 2-torus matrix with `theta = p / q`.
    pub fn theta2_rational(p: i64, q: i64) -> Self {
        let t = BigRational::new(p.into(), q.into());
        let z = BigRational::zero();
        SkewMatrix::from_rationals(2, vec![z.clone(), t.clone(), -t, z]).expect("skew")
    }

    pub fn zero(n: usize) -> Self {
        SkewMatrix { n, float: vec![0.0; n * n], exact: Some(vec![BigRational::zero(); n * n]) }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }

    pub fn pairing_f64(&self, r: &[i64], l: &[i64]) -> f64 {
        let n = self.n;
        let mut acc = 0.0;
        for a in 0..n {
            if r[a] == 0 {
                continue;
            }
            for b in 0..n {
                acc += r[a] as f64 * self.float[a * n + b] * l[b] as f64;
            }
        }
        acc
    }

    pub fn pairing_exact(&self, r: &[i64], l: &[i64]) -> Result<BigRational> {
        let ex = self
            .exact
            .as_ref()
            .ok_or_else(|| Error::NotRepresentable("deformation matrix is not rational".into()))?;
        let n = self.n;
        let mut acc = BigRational::zero();
        for a in 0..n {
            for b in 0..n {
                let v = &ex[a * n + b];
                if r[a] != 0 && l[b] != 0 && !v.is_zero() {
                    acc += v * BigRational::from_integer(BigInt::from(r[a] * l[b]));
                }
            }
        }
        Ok(acc)
    }
}

/// Finitely supported element of the deformed algebra.
#[derive(Clone, Debug, PartialEq)]
pub struct FourierElement<S: Scalar> {
    n: usize,
    coeffs: BTreeMap<Vec<i64>, S>,
}

impl<S: Scalar> FourierElement<S> {
    pub fn zero(n: usize) -> Self {
        FourierElement { n, coeffs: BTreeMap::new() }
    }

    pub fn one(n: usize) -> Self {
        Self::monomial(vec![0; n], S::one())
    }

    pub fn monomial(r: Vec<i64>, c: S) -> Self {
        let mut e = Self::zero(r.len());
        e.add_term(r, c);
        e
    }

    pub fn from_terms(n: usize, terms: impl IntoIterator<Item = (Vec<i64>, S)>) -> Result<Self> {
        let mut e = Self::zero(n);
        for (r, c) in terms {
            if r.len() != n {
                return Err(Error::DimensionMismatch(format!("mode {:?} in dimension {n}", r)));
            }
            e.add_term(r, c);
        }
        Ok(e)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn add_term(&mut self, r: Vec<i64>, c: S) {
        if c.is_zero() {
            return;
        }
        match self.coeffs.get_mut(&r) {
            Some(v) => {
                let s = v.clone() + c;
                if s.is_zero() {
                    self.coeffs.remove(&r);
                } else {
                    *v = s;
                }
            }
            None => {
                self.coeffs.insert(r, c);
            }
        }
    }

    pub fn coeff(&self, r: &[i64]) -> S {
        self.coeffs.get(r).cloned().unwrap_or_else(S::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<i64>, &S)> {
        self.coeffs.iter()
    }

    pub fn support_len(&self) -> usize {
        self.coeffs.len()
    }

    /// Largest `|r_j|` over the support.
    pub fn max_frequency(&self) -> i64 {
        self.coeffs.keys().flat_map(|r| r.iter().map(|x| x.abs())).max().unwrap_or(0)
    }

    /// `sum_r |a_r|`.
    pub fn l1_norm(&self) -> f64 {
        self.coeffs.values().map(|c| c.abs()).fold(0.0, |a, x| a + x)
    }

    pub fn scale(&self, c: &S) -> Self {
        let mut e = Self::zero(self.n);
        for (r, a) in &self.coeffs {
            e.add_term(r.clone(), a.clone() * c.clone());
        }
        e
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut e = self.clone();
        for (r, a) in &other.coeffs {
            e.add_term(r.clone(), a.clone());
        }
        e
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut e = self.clone();
        for (r, a) in &other.coeffs {
            e.add_term(r.clone(), -a.clone());
        }
        e
    }

    /// Deformed product `a x_Theta b`.
    pub fn product(&self, other: &Self, theta: &SkewMatrix) -> Result<Self> {
        if self.n != other.n || self.n != theta.dim() {
            return Err(Error::DimensionMismatch(format!(
                "product of elements in dimensions {}, {} with a {}x{} matrix",
                self.n,
                other.n,
                theta.dim(),
                theta.dim()
            )));
        }
        let mut e = Self::zero(self.n);
        for (r, a) in &self.coeffs {
            for (l, b) in &other.coeffs {
                let chi = S::phase(theta, r, l)?;
                let k: Vec<i64> = r.iter().zip(l).map(|(x, y)| x + y).collect();
                e.add_term(k, chi * a.clone() * b.clone());
            }
        }
        Ok(e)
    }

    /// Involution: `(a*)_{-r} = conj(a_r)`.
    pub fn star(&self) -> Self {
        let mut e = Self::zero(self.n);
        for (r, a) in &self.coeffs {
            e.add_term(r.iter().map(|x| -x).collect(), a.conj());
        }
        e
    }

    /// The trace `tau(a) = a_0`.
    pub fn trace(&self) -> S {
        self.coeff(&vec![0; self.n])
    }

    /// Canonical derivation along axis `j` (0-based): `a_r -> 2 pi i r_j a_r`.
    pub fn derivation(&self, j: usize) -> Result<Self> {
        self.check_axis(j)?;
        let mut e = Self::zero(self.n);
        for (r, a) in &self.coeffs {
            e.add_term(r.clone(), S::two_pi_i(r[j])? * a.clone());
        }
        Ok(e)
    }

    /// `derivation / (2 pi)`: `a_r -> i r_j a_r`; exact in both modes.
    pub fn derivation_unit(&self, j: usize) -> Result<Self> {
        self.check_axis(j)?;
        let zero = BigRational::zero();
        let mut e = Self::zero(self.n);
        for (r, a) in &self.coeffs {
            let c = S::from_gaussian(&zero, &BigRational::from_integer(r[j].into()));
            e.add_term(r.clone(), c * a.clone());
        }
        Ok(e)
    }

    fn check_axis(&self, j: usize) -> Result<()> {
        if j >= self.n {
            return Err(Error::DimensionMismatch(format!("axis {j} in dimension {}", self.n)));
        }
        Ok(())
    }

    /// Self-adjointness defect `||a - a*||_1`.
    pub fn adjoint_defect(&self) -> f64 {
        self.sub(&self.star()).l1_norm()
    }

    /// Truncated exponential `sum_{j <= order} h^j / j!` of a self-adjoint `h`.
    pub fn exp(&self, theta: &SkewMatrix, order: usize) -> Result<Self> {
        let defect = self.adjoint_defect();
        let ok = if S::EXACT { defect == 0.0 && *self == self.star() } else { defect <= 1e-12 * (1.0 + self.l1_norm()) };
        if !ok {
            return Err(Error::NotSelfAdjoint(defect));
        }
        let mut sum = Self::one(self.n);
        let mut term = Self::one(self.n);
        for j in 1..=order {
            let inv = S::from_rational(&BigRational::new(1.into(), (j as i64).into()));
            term = term.product(self, theta)?.scale(&inv);
            sum = sum.add(&term);
        }
        Ok(sum)
    }

    /// Drop coefficients with modulus at or below `tol`.
    pub fn prune(&self, tol: f64) -> Self {
        FourierElement {
            n: self.n,
            coeffs: self.coeffs.iter().filter(|(_, c)| c.abs() > tol).map(|(r, c)| (r.clone(), c.clone())).collect(),
        }
    }

    /// Text form: one line `r1,..,rn : re,im` per nonzero mode.
    pub fn to_text(&self) -> Result<String> {
        let mut out = String::new();
        for (r, a) in &self.coeffs {
            let modes: Vec<String> = r.iter().map(|x| x.to_string()).collect();
            out.push_str(&format!("{} : {}\n", modes.join(","), a.to_text()?));
        }
        Ok(out)
    }

    pub fn to_c64(&self) -> FourierElement<C64> {
        let mut e = FourierElement::zero(self.n);
        for (r, a) in &self.coeffs {
            e.add_term(r.clone(), a.to_c64());
        }
        e
    }
}

/// Remainder bound for the truncated exponential: `||e^h - exp_N(h)||_1`.
pub fn exp_remainder_bound(norm: f64, order: usize) -> f64 {
    let mut t = 1.0;
    for j in 1..=order + 1 {
        t *= norm / j as f64;
    }
    t * norm.exp()
}

fn parse_number(tok: &str) -> Result<BigRational> {
    let tok = tok.trim();
    if let Some((a, b)) = tok.split_once('/') {
        let n: BigInt = a.trim().parse().map_err(|_| Error::Parse(format!("bad rational '{tok}'")))?;
        let d: BigInt = b.trim().parse().map_err(|_| Error::Parse(format!("bad rational '{tok}'")))?;
        if d.is_zero() {
            return Err(Error::Parse(format!("zero denominator in '{tok}'")));
        }
        return Ok(BigRational::new(n, d));
    }
    if let Ok(n) = tok.parse::<BigInt>() {
        return Ok(BigRational::from_integer(n));
    }
    // Terminating decimal, read exactly.
    let (mant, exp) = match tok.find(['e', 'E']) {
        Some(i) => (&tok[..i], tok[i + 1..].parse::<i32>().map_err(|_| Error::Parse(format!("bad number '{tok}'")))?),
        None => (tok, 0),
    };
    let (neg, mant) = match mant.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mant.strip_prefix('+').unwrap_or(mant)),
    };
    let (ip, fp) = mant.split_once('.').unwrap_or((mant, ""));
    let digits = format!("{ip}{fp}");
    if digits.is_empty() || !digits.chars().all(|c| c.is_ascii_digit()) {
        return Err(Error::Parse(format!("bad number '{tok}'")));
    }
    let n: BigInt = digits.parse().map_err(|_| Error::Parse(format!("bad number '{tok}'")))?;
    let scale = exp - fp.len() as i32;
    let ten = BigInt::from(10);
    let mut q = BigRational::from_integer(n);
    if scale >= 0 {
        q *= BigRational::from_integer(num::pow(ten, scale as usize));
    } else {
        q /= BigRational::from_integer(num::pow(ten, (-scale) as usize));
    }
    Ok(if neg { -q } else { q })
}

/// Parse the text form. Blank lines and `#` comments are skipped.
pub fn parse_element<S: Scalar>(text: &str, n: usize) -> Result<FourierElement<S>> {
    let mut e = FourierElement::zero(n);
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (modes, coeff) = line
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("line {}: missing ':'", lineno + 1)))?;
        let r: Vec<i64> = modes
            .split(',')
            .map(|t| t.trim().parse::<i64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::Parse(format!("line {}: bad mode", lineno + 1)))?;
        if r.len() != n {
            return Err(Error::Parse(format!("line {}: expected {n} mode entries", lineno + 1)));
        }
        let (re, im) = coeff
            .split_once(',')
            .ok_or_else(|| Error::Parse(format!("line {}: coefficient needs re,im", lineno + 1)))?;
        let c = if S::EXACT {
            S::from_gaussian(&parse_number(re)?, &parse_number(im)?)
        } else {
            let re: f64 = re.trim().parse().map_err(|_| Error::Parse(format!("line {}: bad float", lineno + 1)))?;
            let im: f64 = im.trim().parse().map_err(|_| Error::Parse(format!("line {}: bad float", lineno + 1)))?;
            S::from_gaussian(&float_to_rat(re)?, &float_to_rat(im)?)
        };
        e.add_term(r, c);
    }
    Ok(e)
}

fn float_to_rat(x: f64) -> Result<BigRational> {
    BigRational::from_float(x).ok_or_else(|| Error::Parse(format!("non-finite value {x}")))
}

//! Exact arithmetic in cyclotomic fields `Q(zeta_n)`.
//!
//! Phases `e^{i pi q}` with rational `q` are roots of unity, so products in the
//! deformed algebra with a rational deformation matrix stay exact here.
//! Elements of different fields are lifted to the compositum on demand.

use num::{BigInt, BigRational, Complex, Integer, One, Zero};
use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::rc::Rc;

thread_local! {
    static CYCLOTOMIC: RefCell<HashMap<u32, Rc<Vec<i64>>>> = RefCell::new(HashMap::new());
}

/// Coefficients (ascending degree) of the n-th cyclotomic polynomial.
pub fn cyclotomic_poly(n: u32) -> Rc<Vec<i64>> {
    if let Some(p) = CYCLOTOMIC.with(|c| c.borrow().get(&n).cloned()) {
        return p;
    }
    // x^n - 1 divided by every Phi_d with d | n, d < n.
    let mut num = vec![0i64; n as usize + 1];
    num[0] = -1;
    num[n as usize] = 1;
    for d in 1..n {
        if n.is_multiple_of(d) {
            let div = cyclotomic_poly(d);
            num = exact_div_monic(&num, &div);
        }
    }
    let p = Rc::new(num);
    CYCLOTOMIC.with(|c| c.borrow_mut().insert(n, p.clone()));
    p
}

fn exact_div_monic(num: &[i64], den: &[i64]) -> Vec<i64> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let qd = rem.len() - 1 - dd;
    let mut q = vec![0i64; qd + 1];
    for i in (0..=qd).rev() {
        let c = rem[i + dd];
        q[i] = c;
        for (j, &d) in den.iter().enumerate() {
            rem[i + j] -= c * d;
        }
    }
    debug_assert!(rem.iter().all(|&x| x == 0));
    q
}

/// Element of `Q(zeta_n)` in the power basis `1, zeta, .., zeta^{phi(n)-1}`.
#[derive(Clone, Debug)]
pub struct Cyclo {
    n: u32,
    c: Vec<BigRational>,
}

fn reduce(mut poly: Vec<BigRational>, n: u32) -> Vec<BigRational> {
    let phi = cyclotomic_poly(n);
    let d = phi.len() - 1;
    if poly.len() > d {
        for i in (d..poly.len()).rev() {
            let c = std::mem::replace(&mut poly[i], BigRational::zero());
            if c.is_zero() {
                continue;
            }
            for (j, &p) in phi.iter().enumerate().take(d) {
                if p != 0 {
                    poly[i - d + j] -= &c * BigRational::from_integer(BigInt::from(p));
                }
            }
        }
        poly.truncate(d);
    }
    poly.resize(d, BigRational::zero());
    poly
}

impl Cyclo {
    pub fn from_rational(q: BigRational) -> Self {
        Cyclo { n: 1, c: vec![q] }
    }

    /// `re + i im` as an element of `Q(zeta_4)`.
    pub fn gaussian(re: BigRational, im: BigRational) -> Self {
        Cyclo { n: 4, c: vec![re, im] }
    }

    /// `zeta_n^j`.
    pub fn root(n: u32, j: i64) -> Self {
        let j = j.rem_euclid(n as i64) as usize;
        let mut p = vec![BigRational::zero(); j + 1];
        p[j] = BigRational::one();
        Cyclo { n, c: reduce(p, n) }
    }

    /// `e^{i pi q}` for rational `q`.
    pub fn phase(q: &BigRational) -> Self {
        let d = q.denom().clone();
        let two_d = &d * 2u32;
        let n: u32 = two_d.clone().try_into().expect("phase denominator too large");
        let j = q.numer().mod_floor(&two_d);
        let j: i64 = j.try_into().expect("phase numerator");
        Cyclo::root(n, j)
    }

    pub fn order(&self) -> u32 {
        self.n
    }

    fn lift(&self, l: u32) -> Vec<BigRational> {
        if l == self.n {
            return self.c.clone();
        }
        let step = (l / self.n) as usize;
        let mut p = vec![BigRational::zero(); (self.c.len().max(1) - 1) * step + 1];
        for (j, c) in self.c.iter().enumerate() {
            p[j * step] = c.clone();
        }
        reduce(p, l)
    }

    fn common(&self, other: &Self) -> (u32, Vec<BigRational>, Vec<BigRational>) {
        let l = self.n.lcm(&other.n);
        (l, self.lift(l), other.lift(l))
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|c| c.is_zero())
    }

    pub fn conj(&self) -> Self {
        let n = self.n as usize;
        let mut p = vec![BigRational::zero(); n.max(1)];
        for (j, c) in self.c.iter().enumerate() {
            let k = (n - j) % n;
            p[k] += c;
        }
        Cyclo { n: self.n, c: reduce(p, self.n) }
    }

    pub fn to_c64(&self) -> Complex<f64> {
        let n = self.n as f64;
        let mut z = Complex::new(0.0, 0.0);
        for (j, c) in self.c.iter().enumerate() {
            let v = rat_to_f64(c);
            let a = 2.0 * std::f64::consts::PI * j as f64 / n;
            z += Complex::new(v * a.cos(), v * a.sin());
        }
        z
    }

    /// Real and imaginary parts when the element lies in `Q(i)`.
    pub fn as_gaussian(&self) -> Option<(BigRational, BigRational)> {
        let l = self.n.lcm(&4);
        let mine = self.lift(l);
        let i4 = Cyclo::gaussian(BigRational::zero(), BigRational::one()).lift(l);
        let k = (1..i4.len()).find(|&k| !i4[k].is_zero())?;
        let im = &mine[k] / &i4[k];
        let re = &mine[0] - &im * &i4[0];
        let cand = Cyclo::gaussian(re.clone(), im.clone());
        if cand == *self {
            Some((re, im))
        } else {
            None
        }
    }
}

pub fn rat_to_f64(q: &BigRational) -> f64 {
    use num::ToPrimitive;
    q.to_f64().unwrap_or_else(|| {
        let n = q.numer().to_f64().unwrap_or(f64::NAN);
        let d = q.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

impl PartialEq for Cyclo {
    fn eq(&self, other: &Self) -> bool {
        let (_, a, b) = self.common(other);
        a == b
    }
}

impl Add for Cyclo {
    type Output = Cyclo;
    fn add(self, rhs: Cyclo) -> Cyclo {
        let (l, mut a, b) = self.common(&rhs);
        for (x, y) in a.iter_mut().zip(b) {
            *x += y;
        }
        Cyclo { n: l, c: a }
    }
}

impl Sub for Cyclo {
    type Output = Cyclo;
    fn sub(self, rhs: Cyclo) -> Cyclo {
        self + (-rhs)
    }
}

impl Neg for Cyclo {
    type Output = Cyclo;
    fn neg(self) -> Cyclo {
        Cyclo { n: self.n, c: self.c.into_iter().map(|x| -x).collect() }
    }
}

impl Mul for Cyclo {
    type Output = Cyclo;
    fn mul(self, rhs: Cyclo) -> Cyclo {
        let (l, a, b) = self.common(&rhs);
        let mut p = vec![BigRational::zero(); (a.len() + b.len()).max(2) - 1];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if !y.is_zero() {
                    p[i + j] += x * y;
                }
            }
        }
        Cyclo { n: l, c: reduce(p, l) }
    }
}

impl fmt::Display for Cyclo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some((re, im)) = self.as_gaussian() {
            return write!(f, "{},{}", re, im);
        }
        let mut first = true;
        for (j, c) in self.c.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{}*z{}^{}", c, self.n, j)?;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

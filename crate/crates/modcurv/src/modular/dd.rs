//! Double-double arithmetic, enough to evaluate closed forms whose rational
//! and logarithmic parts cancel to many digits near `s = 1` or `st = 1`.

use num::{BigRational, ToPrimitive};
use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct DD {
    pub hi: f64,
    pub lo: f64,
}

const LN2: DD = DD { hi: std::f64::consts::LN_2, lo: 2.319_046_813_846_299_6e-17 };

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl DD {
    pub const ZERO: DD = DD { hi: 0.0, lo: 0.0 };
    pub const ONE: DD = DD { hi: 1.0, lo: 0.0 };

    pub fn new(x: f64) -> DD {
        DD { hi: x, lo: 0.0 }
    }

    pub fn from_rational(q: &BigRational) -> DD {
        let hi = q.to_f64().unwrap_or(f64::NAN);
        if !hi.is_finite() {
            return DD::new(hi);
        }
        let rest = q - BigRational::from_float(hi).expect("finite");
        DD { hi, lo: rest.to_f64().unwrap_or(0.0) }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn abs(self) -> DD {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }

    pub fn powi(self, n: i32) -> DD {
        let mut base = if n < 0 { DD::ONE / self } else { self };
        let mut e = n.unsigned_abs();
        let mut acc = DD::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }

    /// Natural log of a positive value: split off a power of two, then the
    /// `atanh` series on the mantissa.
    pub fn ln(self) -> DD {
        assert!(self.hi > 0.0, "log of nonpositive value");
        let e = self.hi.log2().round() as i32;
        let m = self * DD::new(2f64.powi(-e));
        let z = (m - DD::ONE) / (m + DD::ONE);
        let z2 = z * z;
        let mut term = z;
        let mut sum = z;
        for k in 1..200 {
            term = term * z2;
            let add = term / DD::new((2 * k + 1) as f64);
            sum = sum + add;
            if add.hi.abs() < 1e-34 * sum.hi.abs().max(1e-300) {
                break;
            }
        }
        sum * DD::new(2.0) + LN2 * DD::new(e as f64)
    }
}

impl Add for DD {
    type Output = DD;
    fn add(self, o: DD) -> DD {
        let (s, e) = two_sum(self.hi, o.hi);
        let (t, f) = two_sum(self.lo, o.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        DD { hi, lo }
    }
}

impl Neg for DD {
    type Output = DD;
    fn neg(self) -> DD {
        DD { hi: -self.hi, lo: -self.lo }
    }
}

impl Sub for DD {
    type Output = DD;
    fn sub(self, o: DD) -> DD {
        self + (-o)
    }
}

impl Mul for DD {
    type Output = DD;
    fn mul(self, o: DD) -> DD {
        let (p, e) = two_prod(self.hi, o.hi);
        let e = e + (self.hi * o.lo + self.lo * o.hi);
        let (hi, lo) = quick_two_sum(p, e);
        DD { hi, lo }
    }
}

impl Div for DD {
    type Output = DD;
    fn div(self, o: DD) -> DD {
        let q1 = self.hi / o.hi;
        let r = self - o * DD::new(q1);
        let q2 = r.hi / o.hi;
        let r = r - o * DD::new(q2);
        let q3 = r.hi / o.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        DD { hi, lo } + DD::new(q3)
    }
}

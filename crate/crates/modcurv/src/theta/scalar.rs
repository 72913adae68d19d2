use super::cyclotomic::{rat_to_f64, Cyclo};
use super::SkewMatrix;
use crate::error::{Error, Result};
use num::{BigRational, Complex, One, Zero};
use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

pub type C64 = Complex<f64>;

/// Coefficient field of a [`super::FourierElement`].
pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    const EXACT: bool;
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn conj(&self) -> Self;
    fn from_rational(q: &BigRational) -> Self;
    fn from_gaussian(re: &BigRational, im: &BigRational) -> Self;
    /// `chi(r, l) = exp(i pi <r, Theta l>)`.
    fn phase(theta: &SkewMatrix, r: &[i64], l: &[i64]) -> Result<Self>;
    /// `2 pi i n`, only available for floating coefficients.
    fn two_pi_i(n: i64) -> Result<Self>;
    fn to_c64(&self) -> C64;
    fn abs(&self) -> f64 {
        self.to_c64().norm()
    }
    /// Plain-text `re,im` rendering.
    fn to_text(&self) -> Result<String>;
}

impl Scalar for C64 {
    const EXACT: bool = false;
    fn zero() -> Self {
        Complex::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex::new(1.0, 0.0)
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn conj(&self) -> Self {
        Complex::conj(self)
    }
    fn from_rational(q: &BigRational) -> Self {
        Complex::new(rat_to_f64(q), 0.0)
    }
    fn from_gaussian(re: &BigRational, im: &BigRational) -> Self {
        Complex::new(rat_to_f64(re), rat_to_f64(im))
    }
    fn phase(theta: &SkewMatrix, r: &[i64], l: &[i64]) -> Result<Self> {
        let x = theta.pairing_f64(r, l);
        Ok(Complex::from_polar(1.0, std::f64::consts::PI * x))
    }
    fn two_pi_i(n: i64) -> Result<Self> {
        Ok(Complex::new(0.0, 2.0 * std::f64::consts::PI * n as f64))
    }
    fn to_c64(&self) -> C64 {
        *self
    }
    fn to_text(&self) -> Result<String> {
        Ok(format!("{:?},{:?}", self.re, self.im))
    }
}

impl Scalar for Cyclo {
    const EXACT: bool = true;
    fn zero() -> Self {
        Cyclo::from_rational(BigRational::zero())
    }
    fn one() -> Self {
        Cyclo::from_rational(BigRational::one())
    }
    fn is_zero(&self) -> bool {
        Cyclo::is_zero(self)
    }
    fn conj(&self) -> Self {
        Cyclo::conj(self)
    }
    fn from_rational(q: &BigRational) -> Self {
        Cyclo::from_rational(q.clone())
    }
    fn from_gaussian(re: &BigRational, im: &BigRational) -> Self {
        Cyclo::gaussian(re.clone(), im.clone())
    }
    fn phase(theta: &SkewMatrix, r: &[i64], l: &[i64]) -> Result<Self> {
        let q = theta.pairing_exact(r, l)?;
        Ok(Cyclo::phase(&q))
    }
    fn two_pi_i(_n: i64) -> Result<Self> {
        Err(Error::NotRepresentable("2*pi*i has no exact cyclotomic form".into()))
    }
    fn to_c64(&self) -> C64 {
        Cyclo::to_c64(self)
    }
    fn to_text(&self) -> Result<String> {
        match self.as_gaussian() {
            Some((re, im)) => Ok(format!("{},{}", re, im)),
            None => Err(Error::NotRepresentable(format!("{} is not a Gaussian rational", self))),
        }
    }
}

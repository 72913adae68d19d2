//! The deformed product on the 2-torus, exactly at rational theta and in floats.

use modcurv::theta::{Cyclo, FourierElement, Scalar, SkewMatrix, C64};
use num::BigRational;

fn unit<S: Scalar>(r: [i64; 2]) -> FourierElement<S> {
    let one = BigRational::from_integer(1.into());
    let zero = BigRational::from_integer(0.into());
    FourierElement::monomial(r.to_vec(), S::from_gaussian(&one, &zero))
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let th = SkewMatrix::theta2_rational(1, 3);
    let (u, v) = (unit::<Cyclo>([1, 0]), unit::<Cyclo>([0, 1]));
    // the phases live in a cyclotomic field
    let (uv, vu) = (u.product(&v, &th)?, v.product(&u, &th)?);
    println!("u v = ({}) e(1,1) ~ {}", uv.coeff(&[1, 1]), uv.coeff(&[1, 1]).to_c64());
    println!("v u = ({}) e(1,1) ~ {}", vu.coeff(&[1, 1]), vu.coeff(&[1, 1]).to_c64());
    println!("modes of u v - e^(2 pi i/3) v u: {}", uv.sub(&vu.scale(&Cyclo::root(3, 1))).support_len());

    let th = SkewMatrix::theta2(1.0 / 2f64.sqrt());
    let a = unit::<C64>([1, 0]).add(&unit::<C64>([-1, 0])).scale(&C64::new(0.05, 0.0));
    let k = a.exp(&th, 12)?;
    println!("e^h has {} modes, tau(e^h) = {}", k.support_len(), k.trace());
    println!("|e^h - (e^h)*|_1 = {:e}", k.sub(&k.star()).l1_norm());
    Ok(())
}

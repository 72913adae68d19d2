//! Write a small `s,t,K,G` table to stdout.

use modcurv::modular::{derive_curvature, Operator};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let r = derive_curvature(2, Operator::Kdelta)?;
    println!("s,t,K,G");
    for i in 0..5 {
        let s = 0.5 * f64::from(i + 1);
        for j in 0..3 {
            let t = 0.5 * f64::from(j + 1);
            println!("{s},{t},{},{}", r.k.eval(s, 1.0)?, r.g.eval(s, t)?);
        }
    }
    Ok(())
}

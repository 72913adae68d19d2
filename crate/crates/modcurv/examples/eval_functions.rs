//! Evaluate K and G, including on the diagonal where the closed forms are 0/0.

use modcurv::modular::{derive_curvature, Operator};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let r = derive_curvature(2, Operator::Kdelta)?;
    for s in [0.25, 0.5, 1.0, 1.0 + 1e-9, 2.0, 4.0] {
        println!("K({s}) = {:.15}", r.k.eval(s, 1.0)?);
    }
    for (s, t) in [(1.0, 1.0), (0.5, 2.0), (2.0, 0.5), (3.0, 1.0 / 3.0)] {
        println!("G({s}, {t}) = {:.15}", r.g.eval(s, t)?);
    }
    println!("Richardson K(1) = {:.15}", r.k.richardson(1.0, 1.0));
    Ok(())
}

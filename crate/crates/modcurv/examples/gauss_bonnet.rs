//! tau of the curvature density for k = e^h vanishes on the 2-torus.

use modcurv::oracle::{cos_mode, engine_functions, gauss_bonnet_residual, gauss_bonnet_residual_with, residual_ratio_test};
use modcurv::theta::SkewMatrix;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let h = cos_mode([1, 0], 0.03).add(&cos_mode([1, 1], 0.02));
    for theta in [0.0, 1.0 / 3.0, 1.0 / 2f64.sqrt()] {
        let th = SkewMatrix::theta2(theta);
        println!("theta {theta:.6}: residual {:.3e}", gauss_bonnet_residual(&h, &th, 8, 40)?);
    }
    let th = SkewMatrix::theta2(1.0 / 3.0);
    let t = residual_ratio_test(&h, &th, 1, 40, &[0.5, 0.25])?;
    println!("first-order series: base {:.3e}, worst ratio {:.3}, pass {}", t.base, t.worst_ratio(), t.pass);

    // flipping the sign of G breaks the identity at second order
    let (k, g) = engine_functions()?;
    println!("with -G: residual {:.3e}", gauss_bonnet_residual_with(&k, &g.neg(), &h, &th, 8, 40)?);
    Ok(())
}

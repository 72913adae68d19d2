//! Compare the closed-form r-integrals with adaptive quadrature.

use modcurv::modular::family_integral_dim2;
use modcurv::oracle::{quad_r_integral, Family};
use modcurv::verify::reference_spec;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = reference_spec();
    for fam in ["K(2,1)", "K(3,1)", "H(2,1,1)", "H(2,2,1)", "H(3,1,1)"] {
        let f: Family = fam.parse()?;
        let exact = family_integral_dim2(&f.exponents())?;
        for (s, t) in [(0.3, 2.0), (1.0, 1.0), (7.0, 0.4)] {
            let a = exact.eval(s, t)?;
            let b = quad_r_integral(f, s, t, &spec)?;
            println!("{fam} at ({s}, {t}): exact {a:.15e} quadrature {b:.15e} rel {:.1e}", ((a - b) / b).abs());
        }
    }
    Ok(())
}

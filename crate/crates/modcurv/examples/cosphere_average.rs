//! Average b2 over the unit cosphere in several dimensions.

use modcurv::cosphere::{pair_coefficient, sphere_average, sphere_moment};
use modcurv::symbol::{resolvent_b, Symbols};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    println!("<xi_1^2> = {}, <xi_1^4> = {} (m = 4)", sphere_moment(4, &[0, 0]), sphere_moment(4, &[0, 0, 0, 0]));
    let b2 = resolvent_b(2, &Symbols::kdelta())?;
    for m in [2, 4, 6] {
        println!("m = {m}, pair coefficient {}", pair_coefficient(m));
        println!("  {}", sphere_average(&b2, m)?);
    }
    Ok(())
}

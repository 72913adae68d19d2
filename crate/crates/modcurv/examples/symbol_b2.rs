//! The resolvent parametrix terms b0, b1, b2 for the conformal Laplacian.

use modcurv::symbol::{resolvent_terms, Symbols};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for sym in [Symbols::kdelta(), Symbols::nc4tori()] {
        println!("[{}]", sym.name);
        for (kappa, b) in resolvent_terms(2, &sym)?.iter().enumerate() {
            println!("b{kappa} ({} terms, degree {:?}):", b.len(), b.homogeneity_degrees());
            println!("  {b}");
        }
    }
    Ok(())
}

//! Derive the curvature report for a dimension and operator.
//!
//!     cargo run --example derive_report -- 4 nc4tori

use modcurv::modular::{derive_curvature, Operator};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let m: usize = args.next().as_deref().unwrap_or("2").parse()?;
    let op: Operator = args.next().as_deref().unwrap_or("kdelta").parse()?;
    let report = derive_curvature(m, op)?;
    print!("{}", report.to_text());
    let (c, pi) = report.scalar_constant();
    println!("scalar constant with volume factors: {c} * pi^{pi}");
    for sig in &report.signatures {
        println!("  {sig}");
    }
    Ok(())
}

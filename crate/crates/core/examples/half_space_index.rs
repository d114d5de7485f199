//! Factorization index at a boundary point of the half-space from the
//! winding of the reduced symbol along the inward normal.
use opsymbol::factorization::{winding_report, WindingOptions, AE_CONVENTION};
use opsymbol::symbol::Symbol;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    println!("{AE_CONVENTION}");
    let opts = WindingOptions::default();
    let cases = [
        ("(1 + abs2(k))^(1/2)", 1.0),
        ("k2 - i*(1 + k1^2)^(1/2)", 1.0),
        ("k2 + i*(1 + k1^2)^(1/2)", 1.0),
        ("(k2 - i)^2 * (k2 + i)", 3.0),
    ];
    for (text, alpha) in cases {
        let s = Symbol::parse(text, 2, alpha)?;
        for xi1 in [0.0, 2.0] {
            let r = winding_report(&s, &[0.0, 0.0], &[xi1], &opts)?;
            println!("{text:<32} xi' = {xi1}: winding = {:+.6}, ae = {:+.6}", r.winding, r.ae);
        }
    }
    Ok(())
}

//! Validates proposed wave factorizations on the quadrant: the product
//! identity, polynomial growth in the tube, and the support of the
//! inverse transform. A correct split passes; a wrong one reports why.
use opsymbol::dsl::SymbolExpr;
use opsymbol::factorization::{estimate_wave_index, validate_wave_factors, WaveFactorCandidate, WaveOptions};
use opsymbol::geometry::Cone;
use opsymbol::symbol::Symbol;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let s = Symbol::parse("(k1 + i)*(k2 + i)", 2, 2.0)?;
    let opts = WaveOptions::default();
    for (neq, eq, ae) in [("(k1 + i)*(k2 + i)", "1", 2.0), ("(k1 + i)", "(k2 + i)", 1.0)] {
        let cand = WaveFactorCandidate::new(
            SymbolExpr::parse(neq, 2)?,
            SymbolExpr::parse(eq, 2)?,
            Cone::first_orthant(2)?,
            0,
            ae,
        )?;
        let v = validate_wave_factors(&s, &[0.0, 0.0], &cand, &opts)?;
        println!("a_neq = {neq}, a_eq = {eq}");
        println!(
            "  product ok: {}, growth ok: {}, support ok: {}",
            v.product.passed, v.growth.passed, v.support.passed
        );
        match v.ensure() {
            Ok(()) => {
                let est = estimate_wave_index(&cand, &[0.0, 0.0], 3)?;
                println!("  fitted index {:.3} against declared {} (agrees: {})", est.ae, est.declared_ae, est.agrees);
            }
            Err(e) => println!("  rejected: {e}"),
        }
    }
    Ok(())
}

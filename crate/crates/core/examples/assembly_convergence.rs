//! Assembles frozen-coefficient patches over shrinking coverings of the
//! square and tabulates how the high-frequency part of consecutive
//! differences decays.
use opsymbol::geometry::stratify_model;
use opsymbol::lab::{assembly_convergence, assembly_grid};
use opsymbol::symbol::Symbol;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let s = Symbol::parse("(1 + normx2(x))*(1 + abs2(k))^(1/2)", 2, 1.0)?;
    let strat = stratify_model("square", 2)?;
    let grid = assembly_grid(2, 32)?;
    let table = assembly_convergence(&s, &strat, &[0.4, 0.2, 0.1], &grid, 0.0)?;
    println!("eps_coarse  eps_fine  patches  proxy");
    for r in &table.rows {
        println!(
            "{:<10}  {:<8}  {:>3}/{:<3}  {:.4}",
            r.eps_coarse, r.eps_fine, r.patches_coarse, r.patches_fine, r.proxy
        );
    }
    println!("decreasing: {}", table.decreasing);
    Ok(())
}

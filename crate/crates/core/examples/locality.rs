//! `f A g` vanishes exactly for multiplication operators with disjoint
//! supports, and decays with separation for a smoothing operator.
use opsymbol::lab::{discretize_symbol_op, locality_defect, separation_ladder, torus_bump, DiscreteOperator, DiscreteSobolevSpace};
use opsymbol::lattice::LatticeGrid;
use opsymbol::symbol::Symbol;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let grid = LatticeGrid::new(1, 256, 0.1)?;
    let sp = DiscreteSobolevSpace::lattice(grid.clone(), 0.0);
    let f = torus_bump(&grid, &[5.0], 1.0);
    let g = torus_bump(&grid, &[9.0], 1.0);

    let values: Vec<f64> = grid.points().map(|p| (p[0]).sin()).collect();
    let mult = DiscreteOperator::multiplication(&values, &sp)?;
    println!("multiplication, disjoint supports: defect = {}", locality_defect(&mult, &f, &g)?);

    match locality_defect(&mult, &f, &torus_bump(&grid, &[6.0], 1.0)) {
        Ok(d) => println!("overlapping supports gave {d}"),
        Err(e) => println!("overlapping supports rejected: {e}"),
    }

    let s = Symbol::parse("(1 + abs2(k))^(-1/2)", 1, -1.0)?;
    let smoothing = discretize_symbol_op(&s, &[0.0], &sp, &sp.with_order(1.0))?;
    for step in separation_ladder(&smoothing, 1.0, &[0.5, 1.0, 2.0, 4.0, 8.0])? {
        println!("separation {:>4.1}: defect {:.3e}", step.separation, step.defect);
    }
    Ok(())
}

//! The paired operator `A P+ + P-` and the compression `P+ A P+` are
//! invertible together. Shown on a half-line lattice and on random matrices.
use nalgebra::DMatrix;
use num_complex::Complex64;
use opsymbol::geometry::CanonicalDomain;
use opsymbol::lab::{
    build_paired_operator, classify, compression, condition_number, discretize_symbol_op, domain_projector,
    paired_equivalence_suite, DiscreteSobolevSpace,
};
use opsymbol::lattice::LatticeGrid;
use opsymbol::symbol::Symbol;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let grid = LatticeGrid::centered(1, 64, 0.25)?;
    let sp = DiscreteSobolevSpace::lattice(grid, 0.0);
    let s = Symbol::parse("(1 + abs2(k))^(1/2)", 1, 1.0)?;
    let a = discretize_symbol_op(&s, &[0.0], &sp.with_order(1.0), &sp)?;
    let domain = CanonicalDomain::HalfSpace { dim: 1 };
    let paired = build_paired_operator(&a, &domain)?.to_dense();
    let p = domain_projector(&a, &domain)?;
    let comp: DMatrix<Complex64> = compression(&a.to_dense(), &p);
    println!("half-line, {} of {} points inside", p.rank(), p.len());
    println!("  paired:     cond {:.3e} -> {:?}", condition_number(&paired), classify(&paired));
    println!("  compressed: cond {:.3e} -> {:?}", condition_number(&comp), classify(&comp));

    let cases = paired_equivalence_suite(42, 100, 50);
    let agree = cases.iter().filter(|c| c.agrees()).count();
    let borderline = cases.iter().filter(|c| c.borderline()).count();
    println!("random 50x50 systems: {agree} of {} agree, {borderline} borderline", cases.len());
    Ok(())
}

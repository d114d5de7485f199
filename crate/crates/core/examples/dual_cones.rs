//! Facet normals and dual cones of integer-generated cones, with a
//! membership check on the dual.
use opsymbol::geometry::{dual_cone, Cone, DUAL_CONVENTION};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    println!("convention: {DUAL_CONVENTION}");
    let cones = [
        ("first quadrant", Cone::first_orthant(2)?),
        ("narrow wedge", Cone::new(2, vec![vec![1, 0], vec![1, 1]])?),
        ("octant", Cone::first_orthant(3)?),
        ("square pyramid", Cone::new(3, vec![vec![1, 0, 1], vec![0, 1, 1], vec![-1, 0, 1], vec![0, -1, 1]])?),
    ];
    for (name, c) in &cones {
        let d = dual_cone(c)?;
        println!("{name}: generators {:?} -> dual {:?}", c.generators(), d.generators());
        println!("  double dual equals the cone: {}", dual_cone(&d)?.same_cone(c));
    }
    let wedge = &cones[1].1;
    let d = dual_cone(wedge)?;
    println!("(0, 1) lies in the dual of the narrow wedge: {}", d.contains(&[0.0, 1.0], 1e-12)?);
    println!("(-1, 0) lies in it: {}", d.contains(&[-1.0, 0.0], 1e-12)?);
    Ok(())
}

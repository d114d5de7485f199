//! Strata of the unit cube, a nested greedy covering, and a partition of
//! unity on a periodic lattice.
use opsymbol::geometry::{build_covering, partition_of_unity_on, stratify, Model};
use opsymbol::lab::in_unit_box;
use opsymbol::lattice::LatticeGrid;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cube = stratify(Model::Cube);
    println!("cube strata (interior, faces, edges, vertices): {:?}", cube.counts_top_down());
    for st in cube.strata.iter().take(4) {
        println!("  {} (k = {}) modelled on the {}", st.label, st.k, st.domain.name());
    }

    let square = stratify(Model::Square);
    for eps in [0.3, 0.15] {
        let cov = build_covering(&square, eps)?;
        println!("square, eps = {eps}: {} balls", cov.len());
    }

    let cov = build_covering(&square, 0.3)?;
    let grid = LatticeGrid::with_origin(2, 32, 1.0 / 16.0, vec![-0.5, -0.5])?;
    // only the closed unit box must be covered; the collar may fall off to zero
    let pou = partition_of_unity_on(&cov, &grid, in_unit_box)?;
    let defect = grid
        .points()
        .enumerate()
        .filter(|(_, p)| in_unit_box(p))
        .map(|(i, _)| (pou.f.iter().map(|f| f[i]).sum::<f64>() - 1.0).abs())
        .fold(0.0, f64::max);
    println!("partition of unity with {} functions, max |sum - 1| on the box = {defect:.2e}", pou.len());
    Ok(())
}

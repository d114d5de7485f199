use serde::{Deserialize, Serialize};

use super::operator::{DiscreteOperator, OperatorKind, Provenance};
use super::LabError;
use crate::lattice::LatticeGrid;

fn support(v: &[f64]) -> Vec<usize> {
    (0..v.len()).filter(|&i| v[i] != 0.0).collect()
}

/// Smallest torus distance between the supports of `f` and `g`.
pub fn support_separation(grid: &LatticeGrid, f: &[f64], g: &[f64]) -> f64 {
    let (sf, sg) = (support(f), support(g));
    let mut best = f64::INFINITY;
    for &a in &sf {
        for &b in &sg {
            best = best.min(grid.torus_distance(a, b));
        }
    }
    best
}

/// `‖f · A · g‖` in the operator's weighted norms, for `f`, `g` with
/// supports at least `2h` apart. A local operator gives a compact product;
/// its norm measures how far the discrete operator is from that ideal.
pub fn locality_defect(a_op: &DiscreteOperator, f: &[f64], g: &[f64]) -> Result<f64, LabError> {
    let grid = a_op
        .src
        .grid()
        .ok_or_else(|| LabError::Dimension("locality needs a lattice space".into()))?;
    if !a_op.src.same_basis(&a_op.dst) || f.len() != grid.len() || g.len() != grid.len() {
        return Err(LabError::Dimension("f, g and the operator must share one lattice".into()));
    }
    let separation = support_separation(grid, f, g);
    let required = 2.0 * grid.h();
    if separation < required {
        return Err(LabError::SupportOverlap { separation, required });
    }
    let fm = DiscreteOperator::multiplication(f, &a_op.dst)?;
    let gm = DiscreteOperator::multiplication(g, &a_op.src)?;
    let op = DiscreteOperator {
        kind: OperatorKind::Product(vec![fm, a_op.clone(), gm]),
        src: a_op.src.clone(),
        dst: a_op.dst.clone(),
        provenance: Provenance::new("locality product f A g"),
    };
    Ok(op.norm())
}

/// `exp(1 - 1/(1 - r²))` for `r = |x - c|/w < 1` on the torus, else 0.
pub fn torus_bump(grid: &LatticeGrid, center: &[f64], width: f64) -> Vec<f64> {
    let l = grid.n() as f64 * grid.h();
    grid.points()
        .map(|x| {
            let r2: f64 = x
                .iter()
                .zip(center)
                .map(|(a, c)| {
                    let d = (a - c).rem_euclid(l);
                    let d = d.min(l - d);
                    d * d
                })
                .sum::<f64>()
                / (width * width);
            if r2 >= 1.0 {
                0.0
            } else {
                (1.0 - 1.0 / (1.0 - r2)).exp()
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LadderStep {
    pub separation: f64,
    pub defect: f64,
}

/// Defects for two bumps of half-width `width` whose supports are
/// `separations[i]` apart along the first axis.
pub fn separation_ladder(
    a_op: &DiscreteOperator,
    width: f64,
    separations: &[f64],
) -> Result<Vec<LadderStep>, LabError> {
    let grid = a_op
        .src
        .grid()
        .ok_or_else(|| LabError::Dimension("locality needs a lattice space".into()))?
        .clone();
    let mut center: Vec<f64> = grid.origin().iter().map(|o| o + 0.25 * grid.n() as f64 * grid.h()).collect();
    let f = torus_bump(&grid, &center, width);
    let base = center[0];
    separations
        .iter()
        .map(|&d| {
            center[0] = base + 2.0 * width + d;
            let g = torus_bump(&grid, &center, width);
            Ok(LadderStep {
                separation: support_separation(&grid, &f, &g),
                defect: locality_defect(a_op, &f, &g)?,
            })
        })
        .collect()
}

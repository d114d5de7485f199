use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::operator::{DiscreteOperator, OperatorKind, Patch, Provenance};
use super::space::DiscreteSobolevSpace;
use super::symbol_op::discretize_symbol_op;
use super::LabError;
use crate::geometry::{build_covering, partition_of_unity_on, PartitionOfUnity, Stratification};
use crate::lattice::LatticeGrid;
use crate::symbol::Symbol;

/// Operators keyed by the covering-ball center they belong to.
pub type PatchFamily = Vec<(Vec<f64>, DiscreteOperator)>;

/// Slack allowed between consecutive entries of a convergence table.
pub const CONVERGENCE_SLACK: f64 = 1.5;

fn same_point(a: &[f64], b: &[f64]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= 1e-12)
}

/// `Σ_j f_j · A_j · g_j` with `A_j` the family member at the `j`-th center.
pub fn assemble_operator(family: &[(Vec<f64>, DiscreteOperator)], pou: &PartitionOfUnity) -> Result<DiscreteOperator, LabError> {
    let mut patches = Vec::with_capacity(pou.len());
    for (j, center) in pou.centers.iter().enumerate() {
        let op = family
            .iter()
            .find(|(c, _)| same_point(c, center))
            .map(|(_, op)| op)
            .ok_or_else(|| LabError::MissingPatch { center: center.clone() })?;
        if op.src.grid() != Some(&pou.grid) || op.dst.grid() != Some(&pou.grid) {
            return Err(LabError::Dimension(format!("patch {j} lives on a different lattice")));
        }
        patches.push(Patch {
            f: pou.f[j].clone(),
            op: op.clone(),
            g: pou.g[j].clone(),
        });
    }
    let first = &patches
        .first()
        .ok_or_else(|| LabError::Dimension("empty partition of unity".into()))?
        .op;
    let (src, dst) = (first.src.clone(), first.dst.clone());
    Ok(DiscreteOperator {
        kind: OperatorKind::Assembled(patches),
        src,
        dst,
        provenance: Provenance::new(format!("assembled from {} frozen patches", pou.len())),
    })
}

/// Frozen-coefficient multipliers `a(x_j, D)` at the partition centers.
pub fn frozen_family(s: &Symbol, pou: &PartitionOfUnity, src_s: f64) -> Result<PatchFamily, LabError> {
    let src = DiscreteSobolevSpace::lattice(pou.grid.clone(), src_s);
    let dst = src.with_order(src_s - s.order());
    pou.centers
        .iter()
        .map(|c| Ok((c.clone(), discretize_symbol_op(s, c, &src, &dst)?)))
        .collect()
}

/// Fourier projector onto modes with `max_j |k_j| ≥ N/4`.
pub fn high_frequency_projector(space: &DiscreteSobolevSpace) -> Result<DiscreteOperator, LabError> {
    let grid = space
        .grid()
        .ok_or_else(|| LabError::Dimension("high-frequency projector needs a lattice".into()))?;
    let cut = grid.n() as u64 / 4;
    let vals = (0..grid.len())
        .map(|i| if grid.max_abs_wavenumber(i) >= cut { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) })
        .collect();
    Ok(DiscreteOperator {
        kind: OperatorKind::Multiplier(vals),
        src: space.clone(),
        dst: space.clone(),
        provenance: Provenance::new("high-frequency projector"),
    })
}

/// `‖Q D Q‖` with `Q` the high-frequency projector: a computable stand-in
/// for the essential norm that discards the smoothing part of `D`.
pub fn essential_norm_proxy(d: &DiscreteOperator) -> Result<f64, LabError> {
    let q_src = high_frequency_projector(&d.src)?;
    let q_dst = high_frequency_projector(&d.dst)?;
    let op = DiscreteOperator {
        kind: OperatorKind::Product(vec![q_dst, d.clone(), q_src]),
        src: d.src.clone(),
        dst: d.dst.clone(),
        provenance: Provenance::new("high-frequency compression"),
    };
    Ok(op.power_norm())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub eps_coarse: f64,
    pub eps_fine: f64,
    pub patches_coarse: usize,
    pub patches_fine: usize,
    pub proxy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceTable {
    pub symbol: String,
    pub rows: Vec<ConvergenceRow>,
    pub slack: f64,
    /// Every entry at most `slack` times its predecessor and the last at
    /// most half the first.
    pub decreasing: bool,
}

impl ConvergenceTable {
    pub fn values(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.proxy).collect()
    }
}

fn is_decreasing(vals: &[f64], slack: f64) -> bool {
    let steps = vals.windows(2).all(|w| w[1] <= slack * w[0]);
    match (vals.first(), vals.last()) {
        (Some(&a), Some(&b)) if vals.len() > 1 => steps && (b <= 0.5 * a || a <= 1e-10),
        _ => steps,
    }
}

/// Periodic lattice of `n^m` points with spacing `h`, centered on the unit
/// box. With `n h = 2` (the [`assembly_grid`] default) it spans
/// `[-1/2, 3/2)^m`, which holds every model domain with room to spare so
/// that opposite faces of the unit box are not neighbours on the torus.
pub fn assembly_grid_with_spacing(dim: usize, n: usize, h: f64) -> Result<LatticeGrid, LabError> {
    let origin = 0.5 - 0.5 * n as f64 * h;
    Ok(LatticeGrid::with_origin(dim, n, h, vec![origin; dim])?)
}

pub fn assembly_grid(dim: usize, n: usize) -> Result<LatticeGrid, LabError> {
    assembly_grid_with_spacing(dim, n, 2.0 / n as f64)
}

/// The grid must hold the unit box, and the torus side must exceed
/// `1 + 2 eps` so that no `g_j` wraps around onto the box.
fn check_collar(grid: &LatticeGrid, eps_max: f64) -> Result<(), LabError> {
    let side = grid.n() as f64 * grid.h();
    let holds_box = grid.origin().iter().all(|&o| o <= 1e-12 && o + side - grid.h() >= 1.0 - 1e-12);
    if !holds_box || side < 1.0 + 2.0 * eps_max {
        return Err(LabError::Size(format!(
            "grid of side {side} from {:?} must contain [0,1]^m with a collar of at least 2 eps = {}",
            grid.origin(),
            2.0 * eps_max
        )));
    }
    Ok(())
}

/// Closed unit box, with a rounding allowance of `1e-12`.
pub fn in_unit_box(p: &[f64]) -> bool {
    p.iter().all(|&v| (-1e-12..=1.0 + 1e-12).contains(&v))
}

/// Partition of unity that must sum to one on the unit box and vanishes
/// on grid points outside every ball.
pub fn domain_partition(strat: &Stratification, eps: f64, grid: &LatticeGrid) -> Result<PartitionOfUnity, LabError> {
    let cov = build_covering(strat, eps)?;
    Ok(partition_of_unity_on(&cov, grid, in_unit_box)?)
}

/// Proxy norms of `χ (A_{ε_i} - A_{ε_{i+1}}) χ`, `χ` the unit-box indicator, for the frozen-coefficient
/// assemblies at consecutive radii.
pub fn assembly_convergence(
    s: &Symbol,
    strat: &Stratification,
    eps: &[f64],
    grid: &LatticeGrid,
    src_s: f64,
) -> Result<ConvergenceTable, LabError> {
    if eps.len() < 3 || eps.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(LabError::Size("eps sequence must be strictly decreasing with at least 3 entries".into()));
    }
    if grid.dim() != s.dim() || strat.dim != s.dim() {
        return Err(LabError::Dimension("symbol, stratification and grid dimensions differ".into()));
    }
    check_collar(grid, eps[0])?;
    let mut ops = Vec::with_capacity(eps.len());
    for &e in eps {
        let pou = domain_partition(strat, e, grid)?;
        let fam = frozen_family(s, &pou, src_s)?;
        ops.push((pou.len(), assemble_operator(&fam, &pou)?));
    }
    let mask: Vec<f64> = grid.points().map(|p| if in_unit_box(&p) { 1.0 } else { 0.0 }).collect();
    let mut rows = Vec::new();
    for i in 0..eps.len() - 1 {
        let d = ops[i].1.sub(&ops[i + 1].1)?;
        let d = DiscreteOperator {
            kind: OperatorKind::Product(vec![
                DiscreteOperator::multiplication(&mask, &d.dst)?,
                d.clone(),
                DiscreteOperator::multiplication(&mask, &d.src)?,
            ]),
            src: d.src.clone(),
            dst: d.dst.clone(),
            provenance: Provenance::new("assembly difference restricted to the unit box"),
        };
        rows.push(ConvergenceRow {
            eps_coarse: eps[i],
            eps_fine: eps[i + 1],
            patches_coarse: ops[i].0,
            patches_fine: ops[i + 1].0,
            proxy: essential_norm_proxy(&d)?,
        });
    }
    let vals: Vec<f64> = rows.iter().map(|r| r.proxy).collect();
    Ok(ConvergenceTable {
        symbol: s.expr().to_string(),
        decreasing: is_decreasing(&vals, CONVERGENCE_SLACK),
        rows,
        slack: CONVERGENCE_SLACK,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{partition_of_unity, stratify_model, Ball, Covering};

    fn square_pou(eps: f64, n: usize) -> PartitionOfUnity {
        let s = stratify_model("square", 2).unwrap();
        let cov = build_covering(&s, eps).unwrap();
        partition_of_unity(&cov, &LatticeGrid::new(2, n, 1.0 / n as f64).unwrap()).unwrap()
    }

    #[test]
    fn identity_family() {
        let pou = square_pou(0.3, 16);
        let sp = DiscreteSobolevSpace::lattice(pou.grid.clone(), 0.0);
        let fam: PatchFamily = pou.centers.iter().map(|c| (c.clone(), DiscreteOperator::identity(&sp))).collect();
        let a = assemble_operator(&fam, &pou).unwrap().to_dense();
        let err = (a - nalgebra::DMatrix::<Complex64>::identity(256, 256)).camax();
        assert!(err < 1e-12, "{err}");
    }

    #[test]
    fn single_patch_is_the_patch() {
        let grid = LatticeGrid::new(2, 8, 0.125).unwrap();
        let cov = Covering::from_balls(
            2,
            5.0,
            vec![Ball { center: vec![0.5, 0.5], radius: 5.0, stage: 0, stratum: String::new() }],
        );
        let pou = partition_of_unity(&cov, &grid).unwrap();
        let s = Symbol::parse("k1 + (1 + abs2(k))^(1/2)", 2, 1.0).unwrap();
        let fam = frozen_family(&s, &pou, 0.0).unwrap();
        let a = assemble_operator(&fam, &pou).unwrap();
        assert!((a.to_dense() - fam[0].1.to_dense()).norm() < 1e-12);
    }

    #[test]
    fn missing_patch() {
        let pou = square_pou(0.3, 16);
        let sp = DiscreteSobolevSpace::lattice(pou.grid.clone(), 0.0);
        let fam: PatchFamily = vec![(pou.centers[0].clone(), DiscreteOperator::identity(&sp))];
        assert!(matches!(assemble_operator(&fam, &pou), Err(LabError::MissingPatch { .. })));
    }

    #[test]
    fn x_dependent_table_decreases() {
        let s = Symbol::parse("(1 + normx2(x))*(1 + abs2(k))^(1/2)", 2, 1.0).unwrap();
        let strat = stratify_model("square", 2).unwrap();
        let t = assembly_convergence(&s, &strat, &[0.4, 0.2, 0.1], &assembly_grid(2, 32).unwrap(), 0.0).unwrap();
        let v = t.values();
        assert!(v[1] < v[0], "{v:?}");
        assert!(t.decreasing, "{v:?}");
    }

    #[test]
    fn constant_symbol_table_vanishes() {
        let s = Symbol::parse("3", 2, 0.0).unwrap();
        let strat = stratify_model("square", 2).unwrap();
        let t = assembly_convergence(&s, &strat, &[0.4, 0.2, 0.1], &assembly_grid(2, 16).unwrap(), 0.0).unwrap();
        assert!(t.values().iter().all(|&v| v < 1e-12), "{t:?}");
        assert!(t.decreasing);
    }

    #[test]
    fn partition_vanishes_off_the_covered_set() {
        let strat = stratify_model("square", 2).unwrap();
        let grid = assembly_grid(2, 32).unwrap();
        let pou = domain_partition(&strat, 0.2, &grid).unwrap();
        for (p, x) in grid.points().enumerate() {
            let sum: f64 = pou.f.iter().map(|f| f[p]).sum();
            if in_unit_box(&x) {
                assert!((sum - 1.0).abs() < 1e-12);
            } else if x.iter().any(|v| !(-0.2 - 1e-9..=1.2 + 1e-9).contains(v)) {
                assert_eq!(sum, 0.0, "{x:?}");
            }
        }
    }

    #[test]
    fn eps_sequence_validated() {
        let s = Symbol::parse("1", 2, 0.0).unwrap();
        let strat = stratify_model("square", 2).unwrap();
        let grid = LatticeGrid::new(2, 16, 1.0 / 16.0).unwrap();
        assert!(assembly_convergence(&s, &strat, &[0.4, 0.2], &grid, 0.0).is_err());
        assert!(assembly_convergence(&s, &strat, &[0.4, 0.4, 0.1], &grid, 0.0).is_err());
        let tight = assembly_grid_with_spacing(2, 16, 1.5 / 16.0).unwrap();
        assert!(matches!(assembly_convergence(&s, &strat, &[0.3, 0.2, 0.1], &tight, 0.0), Err(LabError::Size(_))));
        assert!(assembly_convergence(&s, &strat, &[0.2, 0.1, 0.05], &tight, 0.0).is_ok());
    }

    #[test]
    fn decreasing_rule() {
        assert!(is_decreasing(&[1.0, 0.6, 0.4], 1.5));
        assert!(is_decreasing(&[1.0, 1.2, 0.5], 1.5));
        assert!(!is_decreasing(&[1.0, 0.9], 1.5));
        assert!(!is_decreasing(&[1.0, 2.0, 0.1], 1.5));
    }
}

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::strata::dist;
use super::{GeometryError, Stratification};
use crate::lattice::LatticeGrid;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub center: Vec<f64>,
    pub radius: f64,
    /// Dimension of the stratum the center lies on.
    pub stage: usize,
    /// Label of that stratum component.
    pub stratum: String,
}

impl Ball {
    pub fn contains(&self, p: &[f64]) -> bool {
        dist(&self.center, p) < self.radius
    }
}

/// Finite ε-covering built stage by stage, `k = 0` first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Covering {
    pub dim: usize,
    pub eps: f64,
    /// `stages[k]` holds the balls centered on `k`-dimensional strata.
    pub stages: Vec<Vec<Ball>>,
}

impl Covering {
    /// Covering from explicit balls of a common radius, staged by `Ball::stage`.
    pub fn from_balls(dim: usize, eps: f64, balls: Vec<Ball>) -> Covering {
        let mut stages = vec![Vec::new(); dim + 1];
        for b in balls {
            let s = b.stage.min(dim);
            stages[s].push(b);
        }
        Covering { dim, eps, stages }
    }

    /// Balls in construction order.
    pub fn balls(&self) -> impl Iterator<Item = &Ball> {
        self.stages.iter().flatten()
    }

    pub fn len(&self) -> usize {
        self.stages.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn covers(&self, p: &[f64]) -> bool {
        self.balls().any(|b| b.contains(p))
    }
}

/// Candidate samples per stratum component; radii too fine for this budget
/// surface as [`GeometryError::Coverage`].
pub const SAMPLE_BUDGET: usize = 100_000;

/// Ball centers bucketed on a uniform grid of cell size `eps`, so that a
/// point only meets the balls of its `3^m` neighbouring cells.
struct CenterIndex {
    eps: f64,
    cells: HashMap<Vec<i64>, Vec<usize>>,
    centers: Vec<Vec<f64>>,
}

impl CenterIndex {
    fn new(eps: f64) -> Self {
        CenterIndex { eps, cells: HashMap::new(), centers: Vec::new() }
    }

    fn cell(&self, p: &[f64]) -> Vec<i64> {
        p.iter().map(|v| (v / self.eps).floor() as i64).collect()
    }

    fn insert(&mut self, p: &[f64]) {
        let key = self.cell(p);
        self.cells.entry(key).or_default().push(self.centers.len());
        self.centers.push(p.to_vec());
    }

    /// Whether some center lies strictly within `r ≤ eps` of `p`.
    fn any_within(&self, p: &[f64], r: f64) -> bool {
        let base = self.cell(p);
        let m = base.len();
        (0..3usize.pow(m as u32)).any(|mut code| {
            let key: Vec<i64> = base
                .iter()
                .map(|&c| {
                    let off = (code % 3) as i64 - 1;
                    code /= 3;
                    c + off
                })
                .collect();
            self.cells
                .get(&key)
                .is_some_and(|ids| ids.iter().any(|&i| dist(&self.centers[i], p) < r))
        })
    }
}

/// Greedy staged covering: for `k = 0..=m`, every candidate sample of a
/// `k`-stratum (spacing about `eps/4`, kept `eps/4` away from lower strata)
/// that lies outside all earlier-stage balls and at least `eps/2` from the
/// current stage's centers becomes the center of a new ball of radius `eps`.
/// Coverage is then verified on samples twice as dense per axis.
pub fn build_covering(s: &Stratification, eps: f64) -> Result<Covering, GeometryError> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(GeometryError::InvalidRadius(format!("eps must be positive, got {eps}")));
    }
    let sep = s.min_separation();
    if sep.is_finite() && eps >= 0.5 * sep {
        return Err(GeometryError::InvalidRadius(format!(
            "eps = {eps} must be below half the stratum separation {sep}"
        )));
    }
    let wanted = (4.0 / eps).ceil().min(SAMPLE_BUDGET as f64) as usize + 1;
    let per_axis = |k: usize| wanted.min((SAMPLE_BUDGET as f64).powf(1.0 / k.max(1) as f64) as usize);
    let mut stages: Vec<Vec<Ball>> = vec![Vec::new(); s.dim + 1];
    let mut earlier = CenterIndex::new(eps);
    for (k, stage) in stages.iter_mut().enumerate() {
        let mut current = CenterIndex::new(eps);
        for st in s.of_dim(k) {
            for p in st.samples(eps / 4.0, per_axis(k).pow(k as u32)) {
                if earlier.any_within(&p, eps) || current.any_within(&p, 0.5 * eps) {
                    continue;
                }
                current.insert(&p);
                stage.push(Ball {
                    center: p,
                    radius: eps,
                    stage: k,
                    stratum: st.label.clone(),
                });
            }
        }
        for c in current.centers {
            earlier.insert(&c);
        }
    }
    for st in &s.strata {
        let dense = st.samples(0.0, (2 * per_axis(st.k)).pow(st.k as u32));
        if let Some(p) = dense.into_iter().find(|p| !earlier.any_within(p, eps)) {
            return Err(GeometryError::Coverage { point: p });
        }
    }
    Ok(Covering {
        dim: s.dim,
        eps,
        stages,
    })
}

/// Smooth bump `exp(1 - 1/(1-t²))` on `t < 1`, peak 1 at `t = 0`.
fn bump(t: f64) -> f64 {
    if t >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - t * t)).exp()
    }
}

/// C^∞ step: 0 for `t ≤ 0`, 1 for `t ≥ 1`.
fn smooth_step(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        let a = (-1.0 / t).exp();
        let b = (-1.0 / (1.0 - t)).exp();
        a / (a + b)
    }
}

/// Bumps `f_j` summing to one on the grid and companions `g_j` with
/// `g_j ≡ 1` on the ε-ball (hence on `supp f_j`) and `supp g_j` in the 2ε-ball.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionOfUnity {
    pub grid: LatticeGrid,
    pub centers: Vec<Vec<f64>>,
    /// `f[j][p]`: value of `f_j` at grid point `p`.
    pub f: Vec<Vec<f64>>,
    pub g: Vec<Vec<f64>>,
}

impl PartitionOfUnity {
    pub fn len(&self) -> usize {
        self.f.len()
    }

    pub fn is_empty(&self) -> bool {
        self.f.is_empty()
    }

    /// `max_p |Σ_j f_j(p) - 1|`.
    pub fn sum_defect(&self) -> f64 {
        (0..self.grid.len())
            .map(|p| (self.f.iter().map(|f| f[p]).sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

/// Partition of unity on the lattice points subordinate to `c`. Distances
/// are measured on the lattice torus (minimum image), so every `f_j` and
/// `g_j` is smooth across the periodic seam. Every grid point must be covered.
pub fn partition_of_unity(c: &Covering, grid: &LatticeGrid) -> Result<PartitionOfUnity, GeometryError> {
    partition_of_unity_on(c, grid, |_| true)
}

/// As [`partition_of_unity`], but only grid points with `required(p)` must
/// be covered; other points outside every ball get `f_j = 0` for all `j`.
pub fn partition_of_unity_on(
    c: &Covering,
    grid: &LatticeGrid,
    required: impl Fn(&[f64]) -> bool,
) -> Result<PartitionOfUnity, GeometryError> {
    let balls: Vec<&Ball> = c.balls().collect();
    let pts: Vec<Vec<f64>> = grid.points().collect();
    let mut phi: Vec<Vec<f64>> = Vec::with_capacity(balls.len());
    let mut g: Vec<Vec<f64>> = Vec::with_capacity(balls.len());
    for b in &balls {
        let mut pj = Vec::with_capacity(pts.len());
        let mut gj = Vec::with_capacity(pts.len());
        for p in &pts {
            let r = grid.periodic_distance(&b.center, p);
            pj.push(bump(r / b.radius));
            gj.push(smooth_step((2.0 * b.radius - r) / b.radius));
        }
        phi.push(pj);
        g.push(gj);
    }
    for (idx, p) in pts.iter().enumerate() {
        let total: f64 = phi.iter().map(|pj| pj[idx]).sum();
        if total == 0.0 {
            if required(p) {
                return Err(GeometryError::DivisionByZero { point: p.clone() });
            }
            continue;
        }
        for pj in phi.iter_mut() {
            pj[idx] /= total;
        }
    }
    Ok(PartitionOfUnity {
        grid: grid.clone(),
        centers: balls.iter().map(|b| b.center.clone()).collect(),
        f: phi,
        g,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::stratify_model;

    fn ball(center: Vec<f64>, radius: f64, stage: usize) -> Ball {
        Ball {
            center,
            radius,
            stage,
            stratum: String::new(),
        }
    }

    // Independent greedy oracle on 100 samples per edge.
    fn greedy_oracle(centers: &[Vec<f64>], samples: &[Vec<f64>], eps: f64) -> Vec<Vec<f64>> {
        let mut out: Vec<Vec<f64>> = centers.to_vec();
        for p in samples {
            if !out.iter().any(|c| dist(c, p) < eps) {
                out.push(p.clone());
            }
        }
        out
    }

    #[test]
    fn square_vertices_first() {
        let s = stratify_model("square", 2).unwrap();
        let c = build_covering(&s, 0.3).unwrap();
        assert_eq!(c.stages[0].len(), 4);
        for b in &c.stages[0] {
            assert!(b.center.iter().all(|&v| v == 0.0 || v == 1.0));
        }
        // edge stage: every edge sample outside the vertex balls gets covered
        let vertices: Vec<Vec<f64>> = c.stages[0].iter().map(|b| b.center.clone()).collect();
        let mut edge_samples = Vec::new();
        for st in s.of_dim(1) {
            edge_samples.extend(st.samples(0.3 / 4.0, 100));
        }
        let oracle = greedy_oracle(&vertices, &edge_samples, 0.3);
        for p in &edge_samples {
            assert!(c.covers(p));
            assert!(oracle.iter().any(|o| dist(o, p) < 0.3));
        }
        assert!(!c.stages[1].is_empty());
    }

    #[test]
    fn wedge_single_ball() {
        let s = stratify_model("wedge2d", 2).unwrap();
        let c = build_covering(&s, 2.0).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c.stages[0][0].center, vec![0.0, 0.0]);
    }

    #[test]
    fn cube_stage_order() {
        let s = stratify_model("cube", 3).unwrap();
        let c = build_covering(&s, 0.2).unwrap();
        assert_eq!(c.stages.len(), 4);
        assert_eq!(c.stages[0].len(), 8);
        for k in 0..=3 {
            for b in &c.stages[k] {
                let st = s.strata.iter().find(|st| st.label == b.stratum).unwrap();
                assert_eq!(st.k, k);
                for earlier in c.stages[..k].iter().flatten() {
                    assert!(!earlier.contains(&b.center));
                }
            }
        }
        for st in &s.strata {
            for p in st.samples(0.05, 300) {
                assert!(c.covers(&p));
            }
        }
    }

    #[test]
    fn covering_errors() {
        let s = stratify_model("square", 2).unwrap();
        assert!(matches!(build_covering(&s, 0.5), Err(GeometryError::InvalidRadius(_))));
        assert!(matches!(build_covering(&s, 0.0), Err(GeometryError::InvalidRadius(_))));
        assert!(matches!(build_covering(&s, 0.001), Err(GeometryError::Coverage { .. })));
    }

    #[test]
    fn single_ball_partition() {
        let grid = LatticeGrid::new(2, 8, 0.125).unwrap();
        let c = Covering::from_balls(2, 5.0, vec![ball(vec![0.5, 0.5], 5.0, 0)]);
        let pou = partition_of_unity(&c, &grid).unwrap();
        assert!(pou.f[0].iter().all(|&v| v == 1.0));
        assert!(pou.g[0].iter().all(|&v| v == 1.0));
    }

    #[test]
    fn symmetric_midpoint_halves() {
        let grid = LatticeGrid::new(1, 8, 0.25).unwrap();
        // grid points 0, 0.25, ..., 1.75; midpoint 1.0 of centers 0.5 and 1.5
        let c = Covering::from_balls(
            1,
            1.6,
            vec![ball(vec![0.5], 1.6, 0), ball(vec![1.5], 1.6, 0)],
        );
        let pou = partition_of_unity(&c, &grid).unwrap();
        assert_eq!(pou.f[0][4], 0.5);
        assert_eq!(pou.f[1][4], 0.5);
    }

    #[test]
    fn uncovered_grid_point() {
        let grid = LatticeGrid::new(1, 8, 1.0).unwrap();
        let c = Covering::from_balls(1, 1.0, vec![ball(vec![0.0], 1.0, 0)]);
        assert!(matches!(
            partition_of_unity(&c, &grid),
            Err(GeometryError::DivisionByZero { .. })
        ));
    }

    #[test]
    fn square_partition_invariants() {
        let s = stratify_model("square", 2).unwrap();
        let c = build_covering(&s, 0.3).unwrap();
        let grid = LatticeGrid::new(2, 32, 1.0 / 32.0).unwrap();
        let pou = partition_of_unity(&c, &grid).unwrap();
        // direct summation oracle
        for p in 0..grid.len() {
            let sum: f64 = pou.f.iter().map(|f| f[p]).sum();
            assert!((sum - 1.0).abs() < 1e-12);
        }
        for (f, g) in pou.f.iter().zip(&pou.g) {
            for p in 0..grid.len() {
                assert!((0.0..=1.0).contains(&f[p]));
                assert_eq!(f[p] * g[p], f[p]);
                assert!(!(f[p] != 0.0 && g[p] != 1.0));
            }
        }
    }
}

use itertools::Itertools;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use super::GeometryError;

/// Convex polyhedral cone `{Σ λ_j g_j : λ_j ≥ 0}` with integer generators.
///
/// Generators are stored as primitive integer vectors; rational input is
/// rescaled, which leaves the cone unchanged.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cone {
    dim: usize,
    generators: Vec<Vec<i64>>,
}

/// Dual-cone convention attached to every computed dual: we return the closed
/// cone `{y : x·y ≥ 0}`; the strict-inequality dual is its interior.
pub const DUAL_CONVENTION: &str = "closed: {y : x.y >= 0 for all x in C}; the open dual {x.y > 0} is its interior";

impl Cone {
    pub fn new(dim: usize, generators: Vec<Vec<i64>>) -> Result<Self, GeometryError> {
        if dim == 0 || dim > 4 {
            return Err(GeometryError::Unsupported(format!(
                "cone dimension {dim} outside 1..=4"
            )));
        }
        if generators.is_empty() {
            return Err(GeometryError::DegenerateCone("no generators".into()));
        }
        let mut gens: Vec<Vec<i64>> = Vec::with_capacity(generators.len());
        for g in generators {
            if g.len() != dim {
                return Err(GeometryError::Unsupported(format!(
                    "generator {g:?} does not have dimension {dim}"
                )));
            }
            if g.iter().all(|&v| v == 0) {
                return Err(GeometryError::DegenerateCone("zero generator".into()));
            }
            let p = primitive(&g.iter().map(|&v| v as i128).collect::<Vec<_>>());
            if !gens.contains(&p) {
                gens.push(p);
            }
        }
        Ok(Cone {
            dim,
            generators: gens,
        })
    }

    pub fn from_rational(dim: usize, generators: &[Vec<Ratio<i64>>]) -> Result<Self, GeometryError> {
        let ints = generators
            .iter()
            .map(|g| {
                let l = g.iter().fold(1i64, |acc, r| lcm(acc, *r.denom()));
                g.iter().map(|r| r.numer() * (l / r.denom())).collect()
            })
            .collect();
        Cone::new(dim, ints)
    }

    /// The orthant `{x : signs_j x_j ≥ 0}`.
    pub fn orthant(signs: &[i64]) -> Result<Self, GeometryError> {
        let d = signs.len();
        Cone::new(
            d,
            (0..d)
                .map(|j| (0..d).map(|i| if i == j { signs[j].signum() } else { 0 }).collect())
                .collect(),
        )
    }

    pub fn first_orthant(dim: usize) -> Result<Self, GeometryError> {
        Cone::orthant(&vec![1; dim])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generators(&self) -> &[Vec<i64>] {
        &self.generators
    }

    /// `-C`.
    pub fn negated(&self) -> Cone {
        Cone {
            dim: self.dim,
            generators: self
                .generators
                .iter()
                .map(|g| g.iter().map(|v| -v).collect())
                .collect(),
        }
    }

    /// Inward facet normals, i.e. the generators of the closed dual cone.
    ///
    /// Fails when the cone is not full-dimensional or contains a line.
    pub fn facet_normals(&self) -> Result<Vec<Vec<i64>>, GeometryError> {
        let d = self.dim;
        if rank(&self.generators) < d {
            return Err(GeometryError::DegenerateCone(
                "generators do not span the ambient space".into(),
            ));
        }
        let mut normals: Vec<Vec<i64>> = Vec::new();
        if d == 1 {
            let pos = self.generators.iter().any(|g| g[0] > 0);
            let neg = self.generators.iter().any(|g| g[0] < 0);
            if pos && neg {
                return Err(GeometryError::DegenerateCone("cone contains a line".into()));
            }
            return Ok(vec![vec![if pos { 1 } else { -1 }]]);
        }
        for subset in (0..self.generators.len()).combinations(d - 1) {
            let rows: Vec<&Vec<i64>> = subset.iter().map(|&i| &self.generators[i]).collect();
            let n = cross(&rows, d);
            if n.iter().all(|&v| v == 0) {
                continue;
            }
            let dots: Vec<i128> = self.generators.iter().map(|g| dot_i(g, &n)).collect();
            let oriented: Vec<i128> = if dots.iter().all(|&v| v >= 0) {
                n
            } else if dots.iter().all(|&v| v <= 0) {
                n.iter().map(|v| -v).collect()
            } else {
                continue;
            };
            let p = primitive(&oriented);
            if !normals.contains(&p) {
                normals.push(p);
            }
        }
        if rank(&normals) < d {
            return Err(GeometryError::DegenerateCone("cone contains a line".into()));
        }
        normals.sort();
        Ok(normals)
    }

    pub fn is_pointed(&self) -> bool {
        self.facet_normals().is_ok()
    }

    /// Closed membership test `n·v ≥ -tol` for every facet normal `n`.
    pub fn contains(&self, v: &[f64], tol: f64) -> Result<bool, GeometryError> {
        Ok(self.facet_normals()?.iter().all(|n| {
            let len = n.iter().map(|&a| (a * a) as f64).sum::<f64>().sqrt();
            n.iter().zip(v).map(|(&a, b)| a as f64 * b).sum::<f64>() >= -tol * len
        }))
    }

    /// True when both cones have the same generators up to positive scaling
    /// and order.
    pub fn same_cone(&self, other: &Cone) -> bool {
        let mut a = self.generators.clone();
        let mut b = other.generators.clone();
        a.sort();
        b.sort();
        self.dim == other.dim && a == b
    }

    /// Unit vectors in the interior: the normalized centroid of the unit
    /// generators followed by centroids with one generator doubled.
    pub fn interior_rays(&self, count: usize) -> Vec<Vec<f64>> {
        let units: Vec<Vec<f64>> = self.generators.iter().map(|g| unit(g)).collect();
        (0..count)
            .map(|r| {
                let mut v = vec![0.0; self.dim];
                for (j, u) in units.iter().enumerate() {
                    let w = if r > 0 && (r - 1) % units.len() == j { 2.0 } else { 1.0 };
                    v.iter_mut().zip(u).for_each(|(a, b)| *a += w * b);
                }
                let n = v.iter().map(|a| a * a).sum::<f64>().sqrt();
                v.into_iter().map(|a| a / n).collect()
            })
            .collect()
    }
}

/// Closed dual `{y : x·y ≥ 0 ∀x ∈ C}` of a pointed full-dimensional cone.
pub fn dual_cone(c: &Cone) -> Result<Cone, GeometryError> {
    Cone::new(c.dim, c.facet_normals()?)
}

fn unit(g: &[i64]) -> Vec<f64> {
    let n = g.iter().map(|&a| (a * a) as f64).sum::<f64>().sqrt();
    g.iter().map(|&a| a as f64 / n).collect()
}

fn dot_i(g: &[i64], n: &[i128]) -> i128 {
    g.iter().zip(n).map(|(&a, &b)| a as i128 * b).sum()
}

fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn lcm(a: i64, b: i64) -> i64 {
    (a / gcd(a as i128, b as i128) as i64) * b
}

fn primitive(v: &[i128]) -> Vec<i64> {
    let g = v.iter().fold(0i128, |acc, &x| gcd(acc, x)).max(1);
    v.iter().map(|&x| (x / g) as i64).collect()
}

/// Generalized cross product of `d-1` vectors in `Z^d` (cofactor expansion).
fn cross(rows: &[&Vec<i64>], d: usize) -> Vec<i128> {
    (0..d)
        .map(|col| {
            let minor: Vec<Vec<i128>> = rows
                .iter()
                .map(|r| {
                    r.iter()
                        .enumerate()
                        .filter(|&(j, _)| j != col)
                        .map(|(_, &v)| v as i128)
                        .collect()
                })
                .collect();
            let sign = if col % 2 == 0 { 1 } else { -1 };
            sign * det(&minor)
        })
        .collect()
}

fn det(m: &[Vec<i128>]) -> i128 {
    match m.len() {
        0 => 1,
        1 => m[0][0],
        n => (0..n)
            .map(|c| {
                let minor: Vec<Vec<i128>> = m[1..]
                    .iter()
                    .map(|r| {
                        r.iter()
                            .enumerate()
                            .filter(|&(j, _)| j != c)
                            .map(|(_, &v)| v)
                            .collect()
                    })
                    .collect();
                let s = if c % 2 == 0 { 1 } else { -1 };
                s * m[0][c] * det(&minor)
            })
            .sum(),
    }
}

/// Exact rank over the rationals.
fn rank(vs: &[Vec<i64>]) -> usize {
    if vs.is_empty() {
        return 0;
    }
    let cols = vs[0].len();
    let mut m: Vec<Vec<Ratio<i128>>> = vs
        .iter()
        .map(|r| r.iter().map(|&v| Ratio::from_integer(v as i128)).collect())
        .collect();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..m.len()).find(|&i| m[i][c] != Ratio::from_integer(0)) else {
            continue;
        };
        m.swap(r, p);
        for i in 0..m.len() {
            if i != r && m[i][c] != Ratio::from_integer(0) {
                let f = m[i][c] / m[r][c];
                let pivot = m[r].clone();
                for (v, &q) in m[i].iter_mut().zip(&pivot).take(cols).skip(c) {
                    *v -= f * q;
                }
            }
        }
        r += 1;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cone(gens: &[&[i64]]) -> Cone {
        Cone::new(gens[0].len(), gens.iter().map(|g| g.to_vec()).collect()).unwrap()
    }

    #[test]
    fn orthants_are_self_dual() {
        for d in 1..=4 {
            let c = Cone::first_orthant(d).unwrap();
            assert!(dual_cone(&c).unwrap().same_cone(&c), "dimension {d}");
        }
    }

    #[test]
    fn skew_cone_dual() {
        let c = cone(&[&[1, 0], &[1, 1]]);
        let d = dual_cone(&c).unwrap();
        assert!(d.same_cone(&cone(&[&[0, 1], &[1, -1]])));
        assert!(dual_cone(&d).unwrap().same_cone(&c));
    }

    // Brute-force oracle: on a dense circle of directions, y satisfies
    // x·y ≥ 0 for all generators x iff y is a nonnegative combination of the
    // computed dual generators (2x2 solve).
    #[test]
    fn skew_cone_dual_matches_sampling() {
        let c = cone(&[&[1, 0], &[1, 1]]);
        let d = dual_cone(&c).unwrap();
        let (a, b) = (&d.generators()[0], &d.generators()[1]);
        let det = (a[0] * b[1] - a[1] * b[0]) as f64;
        for i in 0..3600 {
            let t = i as f64 * std::f64::consts::TAU / 3600.0 + 1e-4;
            let y = [t.cos(), t.sin()];
            let in_dual = c
                .generators()
                .iter()
                .all(|g| g[0] as f64 * y[0] + g[1] as f64 * y[1] >= 0.0);
            let la = (y[0] * b[1] as f64 - y[1] * b[0] as f64) / det;
            let lb = (a[0] as f64 * y[1] - a[1] as f64 * y[0]) / det;
            assert_eq!(in_dual, la >= 0.0 && lb >= 0.0, "direction {t}");
        }
    }

    #[test]
    fn rational_generators_rescale() {
        let c = Cone::from_rational(
            2,
            &[
                vec![Ratio::new(1, 2), Ratio::new(0, 1)],
                vec![Ratio::new(1, 3), Ratio::new(1, 3)],
            ],
        )
        .unwrap();
        assert!(c.same_cone(&cone(&[&[1, 0], &[1, 1]])));
    }

    #[test]
    fn line_and_flat_cones_rejected() {
        let half_plane = cone(&[&[1, 0], &[-1, 0], &[0, 1]]);
        assert!(matches!(dual_cone(&half_plane), Err(GeometryError::DegenerateCone(_))));
        let flat = cone(&[&[1, 0, 0], &[0, 1, 0]]);
        assert!(matches!(dual_cone(&flat), Err(GeometryError::DegenerateCone(_))));
        let line = cone(&[&[1], &[-1]]);
        assert!(!line.is_pointed());
    }

    #[test]
    fn non_simplicial_double_dual() {
        // square pyramid over (±1, ±1, 1)
        let c = cone(&[&[1, 1, 1], &[1, -1, 1], &[-1, 1, 1], &[-1, -1, 1]]);
        let d = dual_cone(&c).unwrap();
        assert_eq!(d.generators().len(), 4);
        assert!(dual_cone(&d).unwrap().same_cone(&c));
    }

    #[test]
    fn redundant_generator_dropped_by_double_dual() {
        let c = cone(&[&[1, 0], &[2, 1], &[1, 1]]);
        let dd = dual_cone(&dual_cone(&c).unwrap()).unwrap();
        assert!(dd.same_cone(&cone(&[&[1, 0], &[1, 1]])));
    }

    #[test]
    fn membership_and_rays() {
        let c = cone(&[&[1, 0], &[1, 1]]);
        assert!(c.contains(&[1.0, 0.5], 0.0).unwrap());
        assert!(c.contains(&[1.0, 0.0], 0.0).unwrap());
        assert!(!c.contains(&[0.0, 1.0], 0.0).unwrap());
        for r in c.interior_rays(3) {
            let n = dual_cone(&c).unwrap();
            for g in n.generators() {
                assert!(g[0] as f64 * r[0] + g[1] as f64 * r[1] > 0.0);
            }
        }
    }
}

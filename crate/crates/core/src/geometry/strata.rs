use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{CanonicalDomain, Cone, GeometryError};

/// Supported model domains, all subsets of the unit box `[0,1]^m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    /// `[0,1]^3`.
    Cube,
    /// `[0,1]^2`.
    Square,
    /// The quadrant corner `{x1 ≥ 0, x2 ≥ 0}`, truncated to `[0,1]^2`.
    Wedge2d,
}

impl Model {
    pub fn dim(self) -> usize {
        match self {
            Model::Cube => 3,
            Model::Square | Model::Wedge2d => 2,
        }
    }

    /// Whether the face `x_j = 1` belongs to the boundary (it is a truncation
    /// for the wedge model).
    fn upper_faces_are_boundary(self) -> bool {
        !matches!(self, Model::Wedge2d)
    }
}

impl FromStr for Model {
    type Err = GeometryError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "cube" => Ok(Model::Cube),
            "square" => Ok(Model::Square),
            "wedge2d" => Ok(Model::Wedge2d),
            other => Err(GeometryError::UnsupportedModel(other.to_string())),
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Model::Cube => "cube",
            Model::Square => "square",
            Model::Wedge2d => "wedge2d",
        })
    }
}

/// State of one ambient axis on a stratum component.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "state", rename_all = "lowercase")]
pub enum AxisState {
    Fixed { value: f64 },
    Free { lo: f64, hi: f64, hi_is_boundary: bool },
}

/// Signed axis permutation placing a stratum in canonical position:
/// canonical coordinate `j` is ambient axis `axes[j]` scaled by `signs[j]`.
/// Tangential coordinates come first, inward normals last.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Frame {
    pub axes: Vec<usize>,
    pub signs: Vec<f64>,
}

impl Frame {
    pub fn vector_to_ambient<T>(&self, canonical: &[T]) -> Vec<T>
    where
        T: Copy + Default + std::ops::Mul<f64, Output = T>,
    {
        let mut out = vec![T::default(); canonical.len()];
        for (j, &v) in canonical.iter().enumerate() {
            out[self.axes[j]] = v * self.signs[j];
        }
        out
    }

    pub fn vector_to_canonical<T>(&self, ambient: &[T]) -> Vec<T>
    where
        T: Copy + std::ops::Mul<f64, Output = T>,
    {
        self.axes
            .iter()
            .zip(&self.signs)
            .map(|(&a, &s)| ambient[a] * s)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stratum {
    /// Dimension of the component.
    pub k: usize,
    pub label: String,
    pub axes: Vec<AxisState>,
    pub domain: CanonicalDomain,
    pub frame: Frame,
    pub sample_points: Vec<Vec<f64>>,
}

impl Stratum {
    pub fn is_interior(&self) -> bool {
        matches!(self.domain, CanonicalDomain::FullSpace { .. })
    }

    /// Representative point (midpoint of the component).
    pub fn anchor(&self) -> Vec<f64> {
        self.axes
            .iter()
            .map(|a| match *a {
                AxisState::Fixed { value } => value,
                AxisState::Free { lo, hi, .. } => 0.5 * (lo + hi),
            })
            .collect()
    }

    /// Sample points: free axes sampled uniformly, staying `delta` away from
    /// every lower-dimensional stratum.
    pub fn samples(&self, delta: f64, target: usize) -> Vec<Vec<f64>> {
        let free: Vec<usize> = (0..self.axes.len())
            .filter(|&j| matches!(self.axes[j], AxisState::Free { .. }))
            .collect();
        let base: Vec<f64> = self
            .axes
            .iter()
            .map(|a| match *a {
                AxisState::Fixed { value } => value,
                AxisState::Free { lo, .. } => lo,
            })
            .collect();
        if free.is_empty() {
            return vec![base];
        }
        let per_axis = per_axis_count(target, free.len());
        let ticks: Vec<Vec<f64>> = free
            .iter()
            .map(|&j| match self.axes[j] {
                AxisState::Free { lo, hi, hi_is_boundary } => {
                    let a = lo + delta;
                    let b = if hi_is_boundary { hi - delta } else { hi };
                    if per_axis == 1 {
                        vec![0.5 * (a + b)]
                    } else {
                        (0..per_axis)
                            .map(|i| a + (b - a) * i as f64 / (per_axis - 1) as f64)
                            .collect()
                    }
                }
                AxisState::Fixed { .. } => unreachable!(),
            })
            .collect();
        let total = per_axis.pow(free.len() as u32);
        (0..total)
            .map(|mut idx| {
                let mut p = base.clone();
                for (slot, &axis) in free.iter().enumerate().rev() {
                    p[axis] = ticks[slot][idx % per_axis];
                    idx /= per_axis;
                }
                p
            })
            .collect()
    }
}

fn per_axis_count(target: usize, k: usize) -> usize {
    let mut p = 1usize;
    while p.pow(k as u32) < target {
        p += 1;
    }
    p
}

/// Stratified boundary of a model domain; one [`Stratum`] per connected
/// component, from the interior down to the vertices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stratification {
    pub model: Model,
    pub dim: usize,
    /// Number of components of each dimension `k = 0..=m`.
    pub counts: Vec<usize>,
    /// Separation of sample points from lower strata.
    pub delta: f64,
    /// Samples per component of positive dimension.
    pub samples_per_component: usize,
    pub strata: Vec<Stratum>,
}

impl Stratification {
    /// Counts ordered interior first: `(interior, m-1, ..., 0)`.
    pub fn counts_top_down(&self) -> Vec<usize> {
        self.counts.iter().rev().copied().collect()
    }

    pub fn of_dim(&self, k: usize) -> impl Iterator<Item = &Stratum> {
        self.strata.iter().filter(move |s| s.k == k)
    }

    pub fn interior(&self) -> &Stratum {
        self.strata
            .iter()
            .find(|s| s.is_interior())
            .expect("every stratification has an interior stratum")
    }

    /// Smallest distance between two distinct vertices (∞ with fewer than two).
    pub fn min_separation(&self) -> f64 {
        let v: Vec<Vec<f64>> = self.of_dim(0).map(|s| s.anchor()).collect();
        let mut best = f64::INFINITY;
        for i in 0..v.len() {
            for j in i + 1..v.len() {
                best = best.min(dist(&v[i], &v[j]));
            }
        }
        best
    }

    /// Same strata, re-sampled with a new separation `delta`.
    pub fn resampled(&self, delta: f64, per_component: usize) -> Stratification {
        let mut out = self.clone();
        out.delta = delta;
        out.samples_per_component = per_component;
        for s in &mut out.strata {
            s.sample_points = s.samples(delta, per_component);
        }
        out
    }
}

pub(super) fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| (p - q) * (p - q)).sum::<f64>().sqrt()
}

/// Default separation of sample points from lower strata.
pub const DEFAULT_DELTA: f64 = 0.05;

/// Stratifies a model domain. `m` must match the model (cube → 3,
/// square/wedge2d → 2).
pub fn stratify_model(model: &str, m: usize) -> Result<Stratification, GeometryError> {
    let model: Model = model.parse()?;
    if model.dim() != m {
        return Err(GeometryError::UnsupportedModel(format!(
            "{model} with m = {m} (expected m = {})",
            model.dim()
        )));
    }
    Ok(stratify(model))
}

pub fn stratify(model: Model) -> Stratification {
    let m = model.dim();
    let upper = model.upper_faces_are_boundary();
    // Per axis: 0 = fixed at 0, 1 = fixed at 1, 2 = free.
    let choices: Vec<u8> = if upper { vec![2, 0, 1] } else { vec![2, 0] };
    let per_component = 100 * m;
    let mut strata = Vec::new();
    let total = choices.len().pow(m as u32);
    for code in 0..total {
        let mut c = code;
        let mut states = Vec::with_capacity(m);
        for _ in 0..m {
            states.push(choices[c % choices.len()]);
            c /= choices.len();
        }
        states.reverse();
        strata.push(component(&states, upper, per_component));
    }
    strata.sort_by(|a, b| b.k.cmp(&a.k).then_with(|| a.label.cmp(&b.label)));
    let mut counts = vec![0; m + 1];
    for s in &strata {
        counts[s.k] += 1;
    }
    Stratification {
        model,
        dim: m,
        counts,
        delta: DEFAULT_DELTA,
        samples_per_component: per_component,
        strata,
    }
}

fn component(states: &[u8], upper: bool, per_component: usize) -> Stratum {
    let m = states.len();
    let axes: Vec<AxisState> = states
        .iter()
        .map(|&s| match s {
            0 => AxisState::Fixed { value: 0.0 },
            1 => AxisState::Fixed { value: 1.0 },
            _ => AxisState::Free {
                lo: 0.0,
                hi: 1.0,
                hi_is_boundary: upper,
            },
        })
        .collect();
    let free: Vec<usize> = (0..m).filter(|&j| states[j] == 2).collect();
    let fixed: Vec<usize> = (0..m).filter(|&j| states[j] != 2).collect();
    let k = free.len();
    let frame = Frame {
        axes: free.iter().chain(&fixed).copied().collect(),
        signs: free
            .iter()
            .map(|_| 1.0)
            .chain(fixed.iter().map(|&j| if states[j] == 0 { 1.0 } else { -1.0 }))
            .collect(),
    };
    let domain = if k == m {
        CanonicalDomain::FullSpace { dim: m }
    } else if k + 1 == m {
        CanonicalDomain::HalfSpace { dim: m }
    } else {
        CanonicalDomain::Wedge {
            dim: m,
            k,
            cone: Cone::first_orthant(m - k).expect("orthant in dimension <= 4"),
        }
    };
    let kind = if k == m {
        "interior"
    } else {
        match k {
            0 => "vertex",
            1 => "edge",
            _ => "face",
        }
    };
    let label = if k == m {
        kind.to_string()
    } else {
        let fixed_desc: Vec<String> = fixed
            .iter()
            .map(|&j| format!("x{}={}", j + 1, states[j]))
            .collect();
        format!("{kind}[{}]", fixed_desc.join(","))
    };
    let mut s = Stratum {
        k,
        label,
        axes,
        domain,
        frame,
        sample_points: Vec::new(),
    };
    s.sample_points = s.samples(DEFAULT_DELTA, if k == 0 { 1 } else { per_component });
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cube_counts() {
        let s = stratify_model("cube", 3).unwrap();
        assert_eq!(s.counts_top_down(), vec![1, 6, 12, 8]);
        for st in &s.strata {
            match st.k {
                3 => assert!(matches!(st.domain, CanonicalDomain::FullSpace { dim: 3 })),
                2 => assert!(matches!(st.domain, CanonicalDomain::HalfSpace { dim: 3 })),
                1 => match &st.domain {
                    CanonicalDomain::Wedge { k: 1, cone, .. } => {
                        assert!(cone.same_cone(&Cone::first_orthant(2).unwrap()))
                    }
                    other => panic!("{other:?}"),
                },
                0 => match &st.domain {
                    CanonicalDomain::Wedge { k: 0, cone, .. } => {
                        assert!(cone.same_cone(&Cone::first_orthant(3).unwrap()))
                    }
                    other => panic!("{other:?}"),
                },
                _ => unreachable!(),
            }
        }
    }

    // Combinatorial oracle: a k-face of [0,1]^m picks k free axes and a 0/1
    // value for each remaining axis, C(m,k) 2^(m-k) components.
    #[test]
    fn square_counts_match_enumeration() {
        let s = stratify_model("square", 2).unwrap();
        let binom = |n: usize, k: usize| (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1));
        let oracle: Vec<usize> = (0..=2).map(|k| binom(2, k) * 2usize.pow((2 - k) as u32)).collect();
        assert_eq!(s.counts, oracle);
        assert_eq!(s.counts_top_down(), vec![1, 4, 4]);
    }

    #[test]
    fn wedge_counts() {
        let s = stratify_model("wedge2d", 2).unwrap();
        assert_eq!(s.counts_top_down(), vec![1, 2, 1]);
        assert!(s.min_separation().is_infinite());
    }

    #[test]
    fn model_errors() {
        assert!(matches!(
            stratify_model("sphere", 2),
            Err(GeometryError::UnsupportedModel(_))
        ));
        assert!(stratify_model("cube", 2).is_err());
    }

    #[test]
    fn samples_avoid_lower_strata() {
        let s = stratify_model("cube", 3).unwrap().resampled(0.1, 300);
        for st in s.strata.iter().filter(|st| st.k > 0) {
            for p in &st.sample_points {
                for (j, a) in st.axes.iter().enumerate() {
                    if let AxisState::Free { .. } = a {
                        assert!(p[j] >= 0.1 - 1e-12 && p[j] <= 0.9 + 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn frames_point_inward() {
        let s = stratify_model("square", 2).unwrap();
        let face = s.strata.iter().find(|st| st.label == "edge[x1=1]").unwrap();
        // canonical (tangent, normal) = (0, 1) is the inward normal -e1
        assert_eq!(face.frame.vector_to_ambient(&[0.0, 1.0]), vec![-1.0, 0.0]);
        assert_eq!(face.frame.vector_to_canonical(&[-1.0, 0.0]), vec![0.0, 1.0]);
    }
}

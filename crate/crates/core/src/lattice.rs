//! Periodic lattices and their DFTs.
//!
//! Transforms follow the convention `û(ξ) = Σ_x u(x) e^{+i x·ξ}` with the
//! inverse carrying the `e^{-i x·ξ}` kernel and the `1/N^m` factor. Under this
//! convention a distribution supported in a cone `C` has a transform that
//! continues analytically into `ℝ^m + iC*`.

use std::collections::HashMap;
use std::f64::consts::TAU;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GridError {
    #[error("points per axis must be a power of two and at least 8, got {0}")]
    Size(usize),
    #[error("spacing must be positive and finite, got {0}")]
    Spacing(f64),
    #[error("dimension must be between 1 and 4, got {0}")]
    Dimension(usize),
    #[error("origin has {got} coordinates, grid has dimension {dim}")]
    Origin { got: usize, dim: usize },
}

/// Tensor lattice `origin + h·j`, `j ∈ {0..N-1}^m`, identified periodically.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeGrid {
    dim: usize,
    n: usize,
    h: f64,
    origin: Vec<f64>,
}

impl LatticeGrid {
    pub fn new(dim: usize, n: usize, h: f64) -> Result<Self, GridError> {
        Self::with_origin(dim, n, h, vec![0.0; dim])
    }

    /// Grid whose points run over `[-N h/2, N h/2)` on every axis.
    pub fn centered(dim: usize, n: usize, h: f64) -> Result<Self, GridError> {
        Self::with_origin(dim, n, h, vec![-(n as f64) * h / 2.0; dim])
    }

    pub fn with_origin(dim: usize, n: usize, h: f64, origin: Vec<f64>) -> Result<Self, GridError> {
        if !(1..=4).contains(&dim) {
            return Err(GridError::Dimension(dim));
        }
        if n < 8 || !n.is_power_of_two() {
            return Err(GridError::Size(n));
        }
        if !(h > 0.0 && h.is_finite()) {
            return Err(GridError::Spacing(h));
        }
        if origin.len() != dim {
            return Err(GridError::Origin {
                got: origin.len(),
                dim,
            });
        }
        Ok(LatticeGrid { dim, n, h, origin })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn origin(&self) -> &[f64] {
        &self.origin
    }

    /// Total number of lattice points `N^m`.
    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Multi-index of a linear (row-major) index.
    pub fn multi_index(&self, mut idx: usize) -> Vec<usize> {
        let mut out = vec![0; self.dim];
        for d in (0..self.dim).rev() {
            out[d] = idx % self.n;
            idx /= self.n;
        }
        out
    }

    pub fn point(&self, idx: usize) -> Vec<f64> {
        self.multi_index(idx)
            .iter()
            .zip(&self.origin)
            .map(|(&j, o)| o + j as f64 * self.h)
            .collect()
    }

    pub fn points(&self) -> impl Iterator<Item = Vec<f64>> + '_ {
        (0..self.len()).map(|i| self.point(i))
    }

    /// Signed integer wavenumber of DFT slot `j` (FFT ordering).
    pub fn wavenumber(&self, j: usize) -> i64 {
        if j < self.n / 2 {
            j as i64
        } else {
            j as i64 - self.n as i64
        }
    }

    /// Frequency `2π k / (N h)` of DFT slot `j` on one axis.
    pub fn axis_frequency(&self, j: usize) -> f64 {
        TAU * self.wavenumber(j) as f64 / (self.n as f64 * self.h)
    }

    /// Dual-grid frequency vector at linear index `idx`.
    pub fn frequency(&self, idx: usize) -> Vec<f64> {
        self.multi_index(idx)
            .into_iter()
            .map(|j| self.axis_frequency(j))
            .collect()
    }

    pub fn frequencies(&self) -> impl Iterator<Item = Vec<f64>> + '_ {
        (0..self.len()).map(|i| self.frequency(i))
    }

    /// Largest per-axis |wavenumber| of a dual-grid slot.
    pub fn max_abs_wavenumber(&self, idx: usize) -> u64 {
        self.multi_index(idx)
            .into_iter()
            .map(|j| self.wavenumber(j).unsigned_abs())
            .max()
            .unwrap_or(0)
    }

    /// Distance on the torus between two lattice points.
    pub fn torus_distance(&self, a: usize, b: usize) -> f64 {
        let (ia, ib) = (self.multi_index(a), self.multi_index(b));
        ia.iter()
            .zip(&ib)
            .map(|(&p, &q)| {
                let d = p.abs_diff(q);
                let d = d.min(self.n - d) as f64 * self.h;
                d * d
            })
            .sum::<f64>()
            .sqrt()
    }

    /// Minimum-image distance between two arbitrary points on the torus of
    /// side `N h`.
    pub fn periodic_distance(&self, a: &[f64], b: &[f64]) -> f64 {
        let l = self.n as f64 * self.h;
        a.iter()
            .zip(b)
            .map(|(p, q)| {
                let d = (p - q).rem_euclid(l);
                let d = d.min(l - d);
                d * d
            })
            .sum::<f64>()
            .sqrt()
    }

    /// Forward transform `û(ξ) = Σ u(x) e^{+i x·ξ}` in place (index phases).
    pub fn forward(&self, data: &mut [Complex64]) {
        let (_, inv) = plans(self.n);
        self.transform(data, &*inv);
    }

    /// Inverse of [`forward`](Self::forward), including the `1/N^m` factor.
    pub fn inverse(&self, data: &mut [Complex64]) {
        let (fwd, _) = plans(self.n);
        self.transform(data, &*fwd);
        let scale = 1.0 / self.len() as f64;
        data.iter_mut().for_each(|v| *v *= scale);
    }

    fn transform(&self, data: &mut [Complex64], fft: &dyn Fft<f64>) {
        assert_eq!(data.len(), self.len(), "data length does not match the grid");
        let n = self.n;
        let mut line = vec![Complex64::new(0.0, 0.0); n];
        let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
        for axis in 0..self.dim {
            let stride = n.pow((self.dim - 1 - axis) as u32);
            let block = stride * n;
            for start in (0..data.len()).step_by(block) {
                for offset in 0..stride {
                    let base = start + offset;
                    if stride == 1 {
                        fft.process_with_scratch(&mut data[base..base + n], &mut scratch);
                        continue;
                    }
                    for (j, v) in line.iter_mut().enumerate() {
                        *v = data[base + j * stride];
                    }
                    fft.process_with_scratch(&mut line, &mut scratch);
                    for (j, v) in line.iter().enumerate() {
                        data[base + j * stride] = *v;
                    }
                }
            }
        }
    }
}

type PlanPair = (Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>);

fn plans(n: usize) -> PlanPair {
    static CACHE: OnceLock<Mutex<HashMap<usize, PlanPair>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("fft plan cache poisoned");
    guard
        .entry(n)
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            (planner.plan_fft_forward(n), planner.plan_fft_inverse(n))
        })
        .clone()
}

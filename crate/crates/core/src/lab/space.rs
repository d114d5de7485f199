use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::lattice::LatticeGrid;

/// Index set of a discrete space: lattice points with their dual
/// frequencies, or a bare sequence `0..len` (Toeplitz models).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Basis {
    Lattice(LatticeGrid),
    Sequence { len: usize },
}

/// `H^s` on a lattice, normed by `‖u‖_s = ‖w_s û‖` with
/// `w_s(ξ) = (1+|ξ|²)^{s/2}` and the unitary DFT. Sequence spaces carry the
/// plain `ℓ²` norm whatever `s_order` says.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteSobolevSpace {
    pub basis: Basis,
    pub s_order: f64,
}

impl DiscreteSobolevSpace {
    pub fn lattice(grid: LatticeGrid, s_order: f64) -> Self {
        DiscreteSobolevSpace {
            basis: Basis::Lattice(grid),
            s_order,
        }
    }

    pub fn sequence(len: usize) -> Self {
        DiscreteSobolevSpace {
            basis: Basis::Sequence { len },
            s_order: 0.0,
        }
    }

    pub fn len(&self) -> usize {
        match &self.basis {
            Basis::Lattice(g) => g.len(),
            Basis::Sequence { len } => *len,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn grid(&self) -> Option<&LatticeGrid> {
        match &self.basis {
            Basis::Lattice(g) => Some(g),
            Basis::Sequence { .. } => None,
        }
    }

    /// Same index set and order.
    pub fn with_order(&self, s_order: f64) -> Self {
        DiscreteSobolevSpace {
            basis: self.basis.clone(),
            s_order,
        }
    }

    pub fn same_basis(&self, other: &DiscreteSobolevSpace) -> bool {
        self.basis == other.basis
    }

    fn has_weights(&self) -> bool {
        matches!(self.basis, Basis::Lattice(_)) && self.s_order != 0.0
    }

    /// `w_s` over the dual grid in frequency index order (empty for sequences).
    pub fn weights(&self) -> Vec<f64> {
        match &self.basis {
            Basis::Lattice(g) => g
                .frequencies()
                .map(|xi| (1.0 + xi.iter().map(|v| v * v).sum::<f64>()).powf(0.5 * self.s_order))
                .collect(),
            Basis::Sequence { .. } => Vec::new(),
        }
    }

    /// `v ← W_s^power v`.
    pub fn apply_weight(&self, v: &mut [Complex64], power: f64) {
        if !self.has_weights() || power == 0.0 {
            return;
        }
        let grid = self.grid().expect("weights live on lattices");
        grid.forward(v);
        for (x, w) in v.iter_mut().zip(self.weights()) {
            *x *= w.powf(power);
        }
        grid.inverse(v);
    }

    pub fn norm(&self, v: &[Complex64]) -> f64 {
        let mut u = v.to_vec();
        self.apply_weight(&mut u, 1.0);
        u.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_order_is_euclidean() {
        let g = LatticeGrid::new(1, 8, 0.5).unwrap();
        let sp = DiscreteSobolevSpace::lattice(g, 0.0);
        assert!(sp.weights().iter().all(|&w| w == 1.0));
        let v: Vec<Complex64> = (0..8).map(|i| Complex64::new(i as f64, 1.0)).collect();
        let e = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        assert_eq!(sp.norm(&v), e);
    }

    #[test]
    fn plane_wave_norm() {
        let g = LatticeGrid::new(1, 16, 0.25).unwrap();
        let sp = DiscreteSobolevSpace::lattice(g.clone(), 2.0);
        // e^{-i x ξ_3} has weight 1 + ξ_3² under the unitary DFT
        let xi = g.axis_frequency(3);
        let v: Vec<Complex64> = (0..16)
            .map(|j| Complex64::from_polar(1.0, -(j as f64) * g.h() * xi))
            .collect();
        let expect = 4.0 * (1.0 + xi * xi);
        assert!((sp.norm(&v) - expect).abs() < 1e-10 * expect);
    }
}

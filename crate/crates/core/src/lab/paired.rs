use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::operator::{DiscreteOperator, OperatorKind, Provenance};
use super::LabError;
use crate::geometry::CanonicalDomain;

/// Diagonal 0/1 projector onto the lattice points of an index set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeProjector {
    pub mask: Vec<bool>,
}

impl LatticeProjector {
    pub fn new(mask: Vec<bool>) -> Self {
        LatticeProjector { mask }
    }

    pub fn complement(&self) -> Self {
        LatticeProjector {
            mask: self.mask.iter().map(|b| !b).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.mask.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mask.is_empty()
    }

    pub fn rank(&self) -> usize {
        self.mask.iter().filter(|&&b| b).count()
    }

    pub fn indices(&self) -> Vec<usize> {
        (0..self.mask.len()).filter(|&i| self.mask[i]).collect()
    }

    pub fn matrix(&self) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.len(), self.len(), |i, j| {
            if i == j && self.mask[i] {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    fn values(&self) -> Vec<f64> {
        self.mask.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect()
    }
}

/// Projector onto the lattice points lying in the closed canonical domain.
pub fn domain_projector(a_op: &DiscreteOperator, domain: &CanonicalDomain) -> Result<LatticeProjector, LabError> {
    let grid = a_op
        .src
        .grid()
        .ok_or_else(|| LabError::Dimension("paired operators need a lattice space".into()))?;
    if grid.dim() != domain.dim() {
        return Err(LabError::Dimension(format!(
            "domain has dimension {}, lattice {}",
            domain.dim(),
            grid.dim()
        )));
    }
    Ok(LatticeProjector::new(grid.points().map(|x| domain.contains(&x)).collect()))
}

/// `A P₊ + P₋` with `P₊` the projector onto `D` and `P₋ = I - P₊`.
pub fn build_paired_operator(a_op: &DiscreteOperator, domain: &CanonicalDomain) -> Result<DiscreteOperator, LabError> {
    let p = domain_projector(a_op, domain)?;
    paired_from_projector(a_op, &p).map(|op| {
        let mut prov = Provenance::new("paired A P+ + P-").with_domain(domain.name());
        prov.symbol = a_op.provenance.symbol.clone();
        op.with_provenance(prov)
    })
}

pub fn paired_from_projector(a_op: &DiscreteOperator, p: &LatticeProjector) -> Result<DiscreteOperator, LabError> {
    if !a_op.src.same_basis(&a_op.dst) || p.len() != a_op.cols() {
        return Err(LabError::Dimension("paired operator needs a square operator matching the projector".into()));
    }
    let r = p.rank();
    if r == 0 || r == p.len() {
        return Err(LabError::EmptyDomain { inside: r, total: p.len() });
    }
    let plus = DiscreteOperator::multiplication(&p.values(), &a_op.src)?;
    let minus = DiscreteOperator::multiplication(&p.complement().values(), &a_op.dst)?;
    let one = Complex64::new(1.0, 0.0);
    let op = match &a_op.kind {
        OperatorKind::Dense(a) => {
            let m = a * p.matrix() + p.complement().matrix();
            DiscreteOperator::dense(m, a_op.src.clone(), a_op.dst.clone(), Provenance::new("paired"))?
        }
        _ => DiscreteOperator::combination(vec![(one, a_op.compose(&plus)?), (one, minus.between(a_op.src.s_order, a_op.dst.s_order))])?,
    };
    Ok(op.with_provenance(Provenance::new("paired A P+ + P-")))
}

/// `P₊ A P₊` restricted to `ran P₊`, as an `r × r` matrix.
pub fn compression(a: &DMatrix<Complex64>, p: &LatticeProjector) -> DMatrix<Complex64> {
    let idx = p.indices();
    DMatrix::from_fn(idx.len(), idx.len(), |i, j| a[(idx[i], idx[j])])
}

/// Invertibility verdict from the 2-norm condition number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Invertibility {
    Invertible,
    Singular,
    Borderline,
}

pub const INVERTIBLE_COND: f64 = 1e8;
pub const SINGULAR_COND: f64 = 1e12;

pub fn condition_number(m: &DMatrix<Complex64>) -> f64 {
    let sv = m.singular_values();
    let max = sv.iter().cloned().fold(0.0, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

pub fn classify(m: &DMatrix<Complex64>) -> Invertibility {
    let c = condition_number(m);
    if c < INVERTIBLE_COND {
        Invertibility::Invertible
    } else if c > SINGULAR_COND {
        Invertibility::Singular
    } else {
        Invertibility::Borderline
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairedCase {
    pub size: usize,
    pub rank_plus: usize,
    pub paired: Invertibility,
    pub compressed: Invertibility,
    pub paired_cond: f64,
    pub compressed_cond: f64,
}

impl PairedCase {
    pub fn borderline(&self) -> bool {
        self.paired == Invertibility::Borderline || self.compressed == Invertibility::Borderline
    }

    pub fn agrees(&self) -> bool {
        self.paired == self.compressed
    }
}

/// Random dense system with a random complementary split. When `singular`
/// is set the compression is made rank deficient by one.
pub fn random_paired_case<R: Rng>(rng: &mut R, size: usize, singular: bool) -> PairedCase {
    let mut a = DMatrix::from_fn(size, size, |_, _| {
        Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
    });
    let mut mask: Vec<bool> = (0..size).map(|_| rng.random_bool(0.5)).collect();
    mask[0] = true;
    mask[size - 1] = false;
    let p = LatticeProjector::new(mask);
    let idx = p.indices();
    if singular && idx.len() > 1 {
        // last compressed column := combination of the others
        let last = idx[idx.len() - 1];
        let coeffs: Vec<Complex64> = idx[..idx.len() - 1]
            .iter()
            .map(|_| Complex64::new(rng.random::<f64>() - 0.5, 0.0))
            .collect();
        for &i in &idx {
            a[(i, last)] = idx[..idx.len() - 1]
                .iter()
                .zip(&coeffs)
                .map(|(&j, c)| a[(i, j)] * c)
                .sum();
        }
    } else if singular {
        a[(idx[0], idx[0])] = Complex64::new(0.0, 0.0);
    }
    let paired = &a * p.matrix() + p.complement().matrix();
    let comp = compression(&a, &p);
    PairedCase {
        size,
        rank_plus: idx.len(),
        paired: classify(&paired),
        compressed: classify(&comp),
        paired_cond: condition_number(&paired),
        compressed_cond: condition_number(&comp),
    }
}

/// Seeded suite: `count` systems, every second one with a singular compression.
pub fn paired_equivalence_suite(seed: u64, count: usize, size: usize) -> Vec<PairedCase> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|i| random_paired_case(&mut rng, size, i % 2 == 1)).collect()
}

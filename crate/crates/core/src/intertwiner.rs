//! Intertwiners from the spin-`N/2` input irrep into the three-factor space
//! `alpha1 (x) alpha2 (x) beta` (clone group A, clone group B, ancilla X).
//!
//! Rows use the basis `|s>_A |u>_B |v>_X`, A-major, each factor in
//! descending-`m` order. Columns are the input basis, also descending.

use alloc::vec::Vec;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::repr::{cg_coefficient, clebsch_gordan_series, triangle, Spin};

/// Which pair is coupled first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CouplingOrder {
    /// `A (x) (B X)`: B and X couple to an intermediate `a`.
    AWithBX,
    /// `B (x) (A X)`: A and X couple to an intermediate `b`.
    BWithAX,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CouplingScheme {
    pub order: CouplingOrder,
    pub intermediate: Spin,
}

/// Irrep labels shared by every intertwiner of one component.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ComponentLabels {
    pub alpha1: Spin,
    pub alpha2: Spin,
    pub beta: Spin,
    /// The input spin `N/2`.
    pub input: Spin,
}

impl ComponentLabels {
    pub fn new(alpha1: Spin, alpha2: Spin, beta: Spin, input: Spin) -> Self {
        ComponentLabels { alpha1, alpha2, beta, input }
    }

    /// Dimension of `alpha1 (x) alpha2 (x) beta`.
    pub fn output_dim(&self) -> usize {
        self.alpha1.dim() * self.alpha2.dim() * self.beta.dim()
    }

    /// Intermediate spins `a` valid in the `A (x) (B X)` order.
    pub fn a_channels(&self) -> Vec<Spin> {
        clebsch_gordan_series(self.alpha2, self.beta)
            .into_iter()
            .filter(|&a| triangle(self.alpha1, a, self.input))
            .collect()
    }

    /// Intermediate spins `b` valid in the `B (x) (A X)` order.
    pub fn b_channels(&self) -> Vec<Spin> {
        clebsch_gordan_series(self.alpha1, self.beta)
            .into_iter()
            .filter(|&b| triangle(self.alpha2, b, self.input))
            .collect()
    }
}

/// An isometric intertwiner `V_a` or `W_b`.
#[derive(Clone, Debug, PartialEq)]
pub struct Intertwiner {
    pub labels: ComponentLabels,
    pub scheme: CouplingScheme,
    /// Real in the Condon-Shortley convention; `output_dim x (N + 1)`.
    pub matrix: DMatrix<f64>,
}

fn row_index(labels: &ComponentLabels, is: usize, iu: usize, iv: usize) -> usize {
    (is * labels.alpha2.dim() + iu) * labels.beta.dim() + iv
}

/// Builds `V_a` (order `A (x) (B X)`, intermediate `a`) or `W_b` (order
/// `B (x) (A X)`, intermediate `b`).
///
/// Entries: `V_a[(s,u,v), m] = <alpha1 s; a t | N/2 m> <alpha2 u; beta v | a t>`
/// and `W_b[(s,u,v), m] = <alpha2 u; b t | N/2 m> <alpha1 s; beta v | b t>`.
/// The overall sign is chosen so that the first non-zero entry in row-major
/// order is positive.
pub fn build_intertwiner(labels: ComponentLabels, scheme: CouplingScheme) -> Result<Intertwiner> {
    let (outer, inner) = match scheme.order {
        CouplingOrder::AWithBX => (labels.alpha1, labels.alpha2),
        CouplingOrder::BWithAX => (labels.alpha2, labels.alpha1),
    };
    let mid = scheme.intermediate;
    if !triangle(inner, labels.beta, mid) {
        return Err(Error::Domain("intermediate spin not in inner (x) beta"));
    }
    if !triangle(outer, mid, labels.input) {
        return Err(Error::Domain("input spin not in outer (x) intermediate"));
    }
    let mut matrix = DMatrix::zeros(labels.output_dim(), labels.input.dim());
    for m in labels.input.magnetic_indices() {
        for p in outer.magnetic_indices() {
            let t2 = m.twice() - p.twice();
            if t2.unsigned_abs() > mid.twice() {
                continue;
            }
            let c_outer = cg_coefficient(outer, p.twice(), mid, t2, labels.input, m.twice())?;
            if c_outer == 0.0 {
                continue;
            }
            for q in inner.magnetic_indices() {
                let v2 = t2 - q.twice();
                if v2.unsigned_abs() > labels.beta.twice() || (labels.beta.twice() as i32 - v2) % 2 != 0 {
                    continue;
                }
                let c_inner = cg_coefficient(inner, q.twice(), labels.beta, v2, mid, t2)?;
                let iv = ((labels.beta.twice() as i32 - v2) / 2) as usize;
                let row = match scheme.order {
                    CouplingOrder::AWithBX => row_index(&labels, p.position(), q.position(), iv),
                    CouplingOrder::BWithAX => row_index(&labels, q.position(), p.position(), iv),
                };
                matrix[(row, m.position())] = c_outer * c_inner;
            }
        }
    }
    if let Some(first) = matrix.transpose().iter().find(|x| x.abs() > 1e-14) {
        if *first < 0.0 {
            matrix.neg_mut();
        }
    }
    Ok(Intertwiner { labels, scheme, matrix })
}

/// `tr(W^dagger V)` for intertwiners of the same component.
pub fn racah_overlap(w: &Intertwiner, v: &Intertwiner) -> Result<f64> {
    if w.labels != v.labels {
        return Err(Error::Shape("intertwiners belong to different components"));
    }
    Ok(w.matrix.dot(&v.matrix))
}

/// All `V_a` and `W_b` of a component together with the overlap matrix
/// `O[b][a] = tr(W_b^dagger V_a)`.
#[derive(Clone, Debug)]
pub struct CouplingBases {
    pub labels: ComponentLabels,
    pub a_channels: Vec<Spin>,
    pub b_channels: Vec<Spin>,
    pub v: Vec<Intertwiner>,
    pub w: Vec<Intertwiner>,
    pub overlaps: DMatrix<f64>,
}

impl CouplingBases {
    pub fn new(labels: ComponentLabels) -> Result<Self> {
        let a_channels = labels.a_channels();
        let b_channels = labels.b_channels();
        let build = |order, spins: &[Spin]| -> Result<Vec<Intertwiner>> {
            spins
                .iter()
                .map(|&intermediate| build_intertwiner(labels, CouplingScheme { order, intermediate }))
                .collect()
        };
        let v = build(CouplingOrder::AWithBX, &a_channels)?;
        let w = build(CouplingOrder::BWithAX, &b_channels)?;
        let mut overlaps = DMatrix::zeros(w.len(), v.len());
        for (i, wb) in w.iter().enumerate() {
            for (j, va) in v.iter().enumerate() {
                overlaps[(i, j)] = racah_overlap(wb, va)?;
            }
        }
        Ok(CouplingBases { labels, a_channels, b_channels, v, w, overlaps })
    }
}

/// `mu_b = sum_a lambda_a tr(W_b^dagger V_a) / (N + 1)`.
pub fn mu_from_lambda(lambdas: &[f64], overlaps: &DMatrix<f64>, input: Spin) -> Result<Vec<f64>> {
    if lambdas.len() != overlaps.ncols() {
        return Err(Error::Shape("lambda length differs from number of a-channels"));
    }
    let scale = 1.0 / input.dim() as f64;
    Ok((0..overlaps.nrows())
        .map(|b| scale * (0..lambdas.len()).map(|a| overlaps[(b, a)] * lambdas[a]).sum::<f64>())
        .collect())
}

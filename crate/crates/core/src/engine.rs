//! Fidelities of covariant `N -> M_A + M_B` cloning machines.
//!
//! A machine is a convex mixture of components. Each component is labelled
//! by the spins `(alpha1, alpha2, beta)` of clone group A, clone group B and
//! the ancilla, and carries unit-norm amplitudes `lambda_a` over the
//! intermediate spins of the `A (x) (B X)` coupling. The group fidelities are
//! affine in the Casimir-weighted quantities
//!
//! `omega_A = 1/2 sum_a lambda_a^2 (1 + (C2(alpha1) - C2(a)) / C2(N/2))`
//!
//! and the same expression for B with `mu_b` in place of `lambda_a`.

use alloc::vec::Vec;
use core::fmt;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::intertwiner::{mu_from_lambda, ComponentLabels, CouplingBases};
use crate::repr::{casimir_f64, d_n_set, d_set, Spin};

/// Tolerance on unit norms and convex weights.
pub const NORM_TOL: f64 = 1e-9;

/// An `N -> M_A + M_B` cloning task for `d`-level systems.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CloningProblem {
    pub n: u32,
    pub m_a: u32,
    pub m_b: u32,
    pub d: u32,
}

impl CloningProblem {
    pub fn new(n: u32, m_a: u32, m_b: u32, d: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("need at least one input copy"));
        }
        if m_a == 0 {
            return Err(Error::Domain("clone group A must be non-empty"));
        }
        if m_a + m_b < n {
            return Err(Error::Domain("fewer outputs than inputs"));
        }
        if d < 2 {
            return Err(Error::Domain("local dimension must be at least 2"));
        }
        Ok(CloningProblem { n, m_a, m_b, d })
    }

    /// Qubit problem.
    pub fn qubits(n: u32, m_a: u32, m_b: u32) -> Result<Self> {
        Self::new(n, m_a, m_b, 2)
    }

    pub fn m(&self) -> u32 {
        self.m_a + self.m_b
    }

    pub fn input_spin(&self) -> Spin {
        Spin::from_twice(self.n)
    }

    fn require_qubits(&self) -> Result<()> {
        if self.d != 2 {
            return Err(Error::Domain("the SU(2) engine handles qubits only"));
        }
        Ok(())
    }
}

/// Spin labels of one component.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ComponentLabel {
    pub alpha1: Spin,
    pub alpha2: Spin,
    pub beta: Spin,
}

impl ComponentLabel {
    pub fn new(alpha1: Spin, alpha2: Spin, beta: Spin) -> Self {
        ComponentLabel { alpha1, alpha2, beta }
    }

    pub fn with_input(self, input: Spin) -> ComponentLabels {
        ComponentLabels::new(self.alpha1, self.alpha2, self.beta, input)
    }
}

impl fmt::Display for ComponentLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.alpha1, self.alpha2, self.beta)
    }
}

/// Every component label of a qubit problem with at least one admissible
/// intermediate spin, sorted lexicographically by `(alpha1, alpha2, beta)`.
pub fn enumerate_components(problem: &CloningProblem) -> Result<Vec<ComponentLabel>> {
    problem.require_qubits()?;
    let input = problem.input_spin();
    let mut out = Vec::new();
    for alpha1 in d_set(problem.m_a) {
        for alpha2 in d_set(problem.m_b) {
            for beta in d_n_set(alpha1, alpha2, problem.n) {
                let label = ComponentLabel::new(alpha1, alpha2, beta);
                if !label.with_input(input).a_channels().is_empty() {
                    out.push(label);
                }
            }
        }
    }
    out.sort_unstable();
    Ok(out)
}

/// One component of a machine: a label and amplitudes over its a-channels.
#[derive(Clone, Debug, PartialEq)]
pub struct MapComponent {
    pub label: ComponentLabel,
    pub lambdas: Vec<f64>,
}

impl MapComponent {
    pub fn new(problem: &CloningProblem, label: ComponentLabel, lambdas: Vec<f64>) -> Result<Self> {
        let channels = label.with_input(problem.input_spin()).a_channels();
        if channels.is_empty() {
            return Err(Error::Domain("component admits no intermediate spin"));
        }
        if channels.len() != lambdas.len() {
            return Err(Error::Shape("lambda length differs from number of a-channels"));
        }
        let norm: f64 = lambdas.iter().map(|x| x * x).sum();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::Normalisation("sum of lambda_a^2 must be 1"));
        }
        Ok(MapComponent { label, lambdas })
    }
}

/// A convex mixture `sum_k r_k T_k` of components.
#[derive(Clone, Debug, PartialEq)]
pub struct CloningMachine {
    pub problem: CloningProblem,
    pub components: Vec<(f64, MapComponent)>,
}

impl CloningMachine {
    pub fn new(problem: CloningProblem, components: Vec<(f64, MapComponent)>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::Domain("machine needs at least one component"));
        }
        if components.iter().any(|(r, _)| *r < -NORM_TOL) {
            return Err(Error::Normalisation("mixture weights must be non-negative"));
        }
        let total: f64 = components.iter().map(|(r, _)| r).sum();
        if (total - 1.0).abs() > NORM_TOL {
            return Err(Error::Normalisation("mixture weights must sum to 1"));
        }
        Ok(CloningMachine { problem, components })
    }

    pub fn single(problem: CloningProblem, component: MapComponent) -> Self {
        CloningMachine { problem, components: alloc::vec![(1.0, component)] }
    }
}

/// Group fidelities of a machine. The B entries are absent when `M_B = 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FidelityPair {
    pub f_a: f64,
    pub f_b: Option<f64>,
    pub omega_a: f64,
    pub omega_b: Option<f64>,
}

/// `F = (1/d) (1 + (N/M) omega (d - 1))` for one clone of a group of `M`.
pub fn fidelity_from_omega(omega: f64, n: u32, m: u32, d: u32) -> f64 {
    let d = f64::from(d);
    (1.0 + f64::from(n) / f64::from(m) * omega * (d - 1.0)) / d
}

/// Inverse of [`fidelity_from_omega`].
pub fn omega_from_fidelity(f: f64, n: u32, m: u32, d: u32) -> f64 {
    let d = f64::from(d);
    (d * f - 1.0) / ((d - 1.0) * f64::from(n) / f64::from(m))
}

fn casimir_weight(group: Spin, channel: Spin, input: Spin) -> f64 {
    0.5 * (1.0 + (casimir_f64(group) - casimir_f64(channel)) / casimir_f64(input))
}

/// Precomputed quadratic forms of one component:
/// `omega_A = sum_a a_weights[a] lambda_a^2` and `omega_B = lambda^T b_form lambda`.
#[derive(Clone, Debug)]
pub struct ComponentModel {
    pub label: ComponentLabel,
    pub bases: CouplingBases,
    pub a_weights: DVector<f64>,
    pub b_weights: DVector<f64>,
    pub b_form: DMatrix<f64>,
}

impl ComponentModel {
    pub fn new(problem: &CloningProblem, label: ComponentLabel) -> Result<Self> {
        let input = problem.input_spin();
        let bases = CouplingBases::new(label.with_input(input))?;
        if bases.a_channels.is_empty() {
            return Err(Error::Domain("component admits no intermediate spin"));
        }
        let a_weights = DVector::from_iterator(
            bases.a_channels.len(),
            bases.a_channels.iter().map(|&a| casimir_weight(label.alpha1, a, input)),
        );
        let b_weights = DVector::from_iterator(
            bases.b_channels.len(),
            bases.b_channels.iter().map(|&b| casimir_weight(label.alpha2, b, input)),
        );
        let o = &bases.overlaps / input.dim() as f64;
        let b_form = o.transpose() * DMatrix::from_diagonal(&b_weights) * &o;
        Ok(ComponentModel { label, bases, a_weights, b_weights, b_form })
    }

    pub fn dim(&self) -> usize {
        self.a_weights.len()
    }

    pub fn a_form(&self) -> DMatrix<f64> {
        DMatrix::from_diagonal(&self.a_weights)
    }

    pub fn omega_a(&self, lambdas: &[f64]) -> f64 {
        lambdas.iter().zip(self.a_weights.iter()).map(|(l, w)| w * l * l).sum()
    }

    pub fn omega_b(&self, lambdas: &[f64]) -> f64 {
        let v = DVector::from_column_slice(lambdas);
        v.dot(&(&self.b_form * &v))
    }
}

/// Component models for every label of a problem.
#[derive(Clone, Debug)]
pub struct ProblemModel {
    pub problem: CloningProblem,
    pub components: Vec<ComponentModel>,
}

impl ProblemModel {
    pub fn new(problem: CloningProblem) -> Result<Self> {
        let components = enumerate_components(&problem)?
            .into_iter()
            .map(|label| ComponentModel::new(&problem, label))
            .collect::<Result<Vec<_>>>()?;
        Ok(ProblemModel { problem, components })
    }

    pub fn component(&self, label: ComponentLabel) -> Option<&ComponentModel> {
        self.components.iter().find(|c| c.label == label)
    }

    pub fn f_a(&self, omega_a: f64) -> f64 {
        let p = &self.problem;
        fidelity_from_omega(omega_a, p.n, p.m_a, p.d)
    }

    pub fn f_b(&self, omega_b: f64) -> Option<f64> {
        let p = &self.problem;
        (p.m_b > 0).then(|| fidelity_from_omega(omega_b, p.n, p.m_b, p.d))
    }
}

/// `omega_A` of a single component.
pub fn omega_a(problem: &CloningProblem, component: &MapComponent) -> Result<f64> {
    let model = ComponentModel::new(problem, component.label)?;
    Ok(model.omega_a(&component.lambdas))
}

/// `omega_B` of a single component, via `mu_b = sum_a lambda_a tr(W_b^dagger V_a) / (N+1)`.
pub fn omega_b(problem: &CloningProblem, component: &MapComponent) -> Result<f64> {
    let model = ComponentModel::new(problem, component.label)?;
    let mu = mu_from_lambda(&component.lambdas, &model.bases.overlaps, problem.input_spin())?;
    Ok(mu.iter().zip(model.b_weights.iter()).map(|(m, w)| w * m * m).sum())
}

/// Group fidelities of a mixed machine.
pub fn machine_fidelities(machine: &CloningMachine) -> Result<FidelityPair> {
    let p = machine.problem;
    p.require_qubits()?;
    let mut wa = 0.0;
    let mut wb = 0.0;
    for (r, comp) in &machine.components {
        wa += r * omega_a(&p, comp)?;
        wb += r * omega_b(&p, comp)?;
    }
    let has_b = p.m_b > 0;
    Ok(FidelityPair {
        f_a: fidelity_from_omega(wa, p.n, p.m_a, p.d),
        f_b: has_b.then(|| fidelity_from_omega(wb, p.n, p.m_b, p.d)),
        omega_a: wa,
        omega_b: has_b.then_some(wb),
    })
}

/// Optimal symmetric `N -> M` qubit fidelity, computed as the best `F_A` of
/// the `(N, M, 0)` problem.
pub fn symmetric_optimum(n: u32, m: u32) -> Result<f64> {
    let model = ProblemModel::new(CloningProblem::qubits(n, m, 0)?)?;
    let best = model.components.iter().flat_map(|c| c.a_weights.iter().copied()).fold(f64::NEG_INFINITY, f64::max);
    Ok(model.f_a(best))
}

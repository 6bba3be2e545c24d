#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use qclone_core::engine::{enumerate_components, CloningProblem};
use qclone_core::intertwiner::{build_intertwiner, ComponentLabels, CouplingOrder, CouplingScheme, Intertwiner};
use qclone_core::repr::Spin;

/// Spin matrices `(J_x, J_y, J_z)` in the descending-`m` basis.
pub fn spin_matrices(j: Spin) -> [DMatrix<Complex64>; 3] {
    let d = j.dim();
    let jv = j.value();
    let mut plus = DMatrix::<Complex64>::zeros(d, d);
    let mut z = DMatrix::<Complex64>::zeros(d, d);
    for m in j.magnetic_indices() {
        let i = m.position();
        let mv = m.value();
        z[(i, i)] = Complex64::new(mv, 0.0);
        if i > 0 {
            plus[(i - 1, i)] = Complex64::new((jv * (jv + 1.0) - mv * (mv + 1.0)).sqrt(), 0.0);
        }
    }
    let minus = plus.adjoint();
    let x = (&plus + &minus) * Complex64::new(0.5, 0.0);
    let y = (&plus - &minus) * Complex64::new(0.0, -0.5);
    [x, y, z]
}

pub fn rotation(j: Spin, axis: [f64; 3]) -> DMatrix<Complex64> {
    let [x, y, z] = spin_matrices(j);
    let gen = x * Complex64::new(axis[0], 0.0) + y * Complex64::new(axis[1], 0.0) + z * Complex64::new(axis[2], 0.0);
    (gen * Complex64::new(0.0, -1.0)).exp()
}

pub fn complexify(m: &DMatrix<f64>) -> DMatrix<Complex64> {
    m.map(|x| Complex64::new(x, 0.0))
}

pub fn all_intertwiners(labels: ComponentLabels) -> Vec<Intertwiner> {
    let mut out = Vec::new();
    for (order, spins) in [(CouplingOrder::AWithBX, labels.a_channels()), (CouplingOrder::BWithAX, labels.b_channels())]
    {
        for intermediate in spins {
            out.push(build_intertwiner(labels, CouplingScheme { order, intermediate }).unwrap());
        }
    }
    out
}

pub fn sample_labels() -> Vec<ComponentLabels> {
    let mut out = Vec::new();
    for (n, m_a, m_b) in [(1, 1, 1), (1, 1, 2), (2, 2, 1), (1, 2, 2), (2, 3, 1), (3, 3, 1)] {
        let problem = CloningProblem::qubits(n, m_a, m_b).unwrap();
        for label in enumerate_components(&problem).unwrap() {
            out.push(label.with_input(problem.input_spin()));
        }
    }
    out
}

mod common;

use common::{all_intertwiners, complexify, rotation, sample_labels};
use nalgebra::DMatrix;
use proptest::prelude::*;
use qclone_core::engine::{enumerate_components, omega_a, omega_b, CloningProblem, MapComponent};
use qclone_core::intertwiner::{
    build_intertwiner, mu_from_lambda, ComponentLabels, CouplingBases, CouplingOrder, CouplingScheme,
};
use qclone_core::optimizer::{frontier, GridSpec, OptimizerConfig};
use qclone_core::repr::{cg_coefficient, clebsch_gordan_series, Spin};
use rand::{Rng, SeedableRng};

fn spin(t: u32) -> Spin {
    Spin::from_twice(t)
}

#[test]
fn cg_unitarity() {
    for t1 in 0..=6u32 {
        for t2 in 0..=6u32 {
            let (j1, j2) = (spin(t1), spin(t2));
            let dim = j1.dim() * j2.dim();
            let mut u = DMatrix::<f64>::zeros(dim, dim);
            let mut col = 0;
            for big in clebsch_gordan_series(j1, j2) {
                for mm in big.magnetic_indices() {
                    for m1 in j1.magnetic_indices() {
                        for m2 in j2.magnetic_indices() {
                            if m1.twice() + m2.twice() != mm.twice() {
                                continue;
                            }
                            let row = m1.position() * j2.dim() + m2.position();
                            u[(row, col)] = cg_coefficient(j1, m1.twice(), j2, m2.twice(), big, mm.twice()).unwrap();
                        }
                    }
                    col += 1;
                }
            }
            assert_eq!(col, dim);
            let residual = (u.transpose() * &u - DMatrix::identity(dim, dim)).amax();
            assert!(residual < 1e-12, "{j1} x {j2}: {residual:e}");
        }
    }
}

proptest! {
    #[test]
    fn cg_exchange_sign(t1 in 0u32..=6, t2 in 0u32..=6, k in 0u32..=6, a in 0u32..=6, b in 0u32..=6) {
        let (j1, j2) = (spin(t1), spin(t2));
        let series = clebsch_gordan_series(j1, j2);
        let big = series[k as usize % series.len()];
        let m1 = 2 * (a % (t1 + 1)) as i32 - t1 as i32;
        let m2 = 2 * (b % (t2 + 1)) as i32 - t2 as i32;
        let mm = m1 + m2;
        prop_assume!(mm.unsigned_abs() <= big.twice());
        let lhs = cg_coefficient(j1, m1, j2, m2, big, mm).unwrap();
        let rhs = cg_coefficient(j2, m2, j1, m1, big, mm).unwrap();
        let sign = if ((t1 + t2 - big.twice()) / 2).is_multiple_of(2) { 1.0 } else { -1.0 };
        prop_assert!((lhs - sign * rhs).abs() < 1e-12);
    }
}

#[test]
fn intertwiners_are_isometric_and_orthogonal() {
    for labels in sample_labels() {
        let dim = labels.input.dim();
        for order in [CouplingOrder::AWithBX, CouplingOrder::BWithAX] {
            let family: Vec<_> = all_intertwiners(labels).into_iter().filter(|v| v.scheme.order == order).collect();
            for (i, v) in family.iter().enumerate() {
                for (k, w) in family.iter().enumerate() {
                    let g = v.matrix.transpose() * &w.matrix;
                    let want = if i == k { DMatrix::identity(dim, dim) } else { DMatrix::zeros(dim, dim) };
                    assert!((g - want).amax() < 1e-10, "{labels:?} {order:?} {i} {k}");
                }
            }
        }
    }
}

#[test]
fn intertwiners_are_equivariant() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    let axes: Vec<[f64; 3]> =
        (0..5).map(|_| [rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)]).collect();
    for labels in sample_labels() {
        for axis in &axes {
            let out = rotation(labels.alpha1, *axis)
                .kronecker(&rotation(labels.alpha2, *axis))
                .kronecker(&rotation(labels.beta, *axis));
            let inp = rotation(labels.input, *axis);
            for v in all_intertwiners(labels) {
                let vc = complexify(&v.matrix);
                let residual = (&out * &vc - &vc * &inp).camax();
                assert!(residual < 1e-9, "{labels:?} {:?}: {residual:e}", v.scheme);
            }
        }
    }
}

#[test]
fn racah_transform_is_orthogonal() {
    for labels in sample_labels() {
        let bases = CouplingBases::new(labels).unwrap();
        let q = &bases.overlaps / labels.input.dim() as f64;
        assert_eq!(q.nrows(), q.ncols(), "{labels:?}");
        let k = q.nrows();
        assert!((q.transpose() * &q - DMatrix::identity(k, k)).amax() < 1e-9, "{labels:?}");
    }
}

#[test]
fn two_spin_traces() {
    for t in 1..=8u32 {
        let s = f64::from(t) / 2.0;
        let labels = ComponentLabels::new(spin(1), spin(t), spin(t), spin(1));
        let bases = CouplingBases::new(labels).unwrap();
        assert_eq!(bases.a_channels, [spin(0), spin(2)]);
        assert_eq!(bases.b_channels, [spin(t - 1), spin(t + 1)]);
        let o = &bases.overlaps;
        let first = 2.0 * (s / (2.0 * (s + 0.5))).sqrt();
        let second = (2.0 * (s + 1.0) / (s + 0.5)).sqrt();
        assert!((o[(0, 0)] - first).abs() < 1e-12, "s={s}: {o}");
        assert!((o[(1, 1)] + first).abs() < 1e-12, "s={s}: {o}");
        assert!((o[(0, 1)] - second).abs() < 1e-12, "s={s}: {o}");
        assert!((o[(1, 0)] - second).abs() < 1e-12, "s={s}: {o}");
    }
}

/// `W_b` of `(a1, a2, beta)` and `V_b` of `(a2, a1, beta)` agree up to the
/// A/B row permutation and a sign; returns that sign.
fn exchange_sign(labels: ComponentLabels, swapped: ComponentLabels, b: Spin) -> f64 {
    let w = build_intertwiner(labels, CouplingScheme { order: CouplingOrder::BWithAX, intermediate: b }).unwrap();
    let v = build_intertwiner(swapped, CouplingScheme { order: CouplingOrder::AWithBX, intermediate: b }).unwrap();
    let (da, db, dx) = (labels.alpha1.dim(), labels.alpha2.dim(), labels.beta.dim());
    let mut permuted = DMatrix::zeros(v.matrix.nrows(), v.matrix.ncols());
    for s in 0..da {
        for u in 0..db {
            for x in 0..dx {
                permuted.set_row((s * db + u) * dx + x, &v.matrix.row((u * da + s) * dx + x));
            }
        }
    }
    let sign = permuted.dot(&w.matrix).signum();
    assert!((permuted * sign - &w.matrix).amax() < 1e-12);
    sign
}

#[test]
fn exchange_symmetry() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
    for (n, m_a, m_b) in [(1, 1, 1), (2, 1, 1), (1, 2, 2), (1, 1, 2), (2, 2, 1)] {
        let problem = CloningProblem::qubits(n, m_a, m_b).unwrap();
        let mirror = CloningProblem::qubits(n, m_b, m_a).unwrap();
        for label in enumerate_components(&problem).unwrap() {
            let labels = label.with_input(problem.input_spin());
            let swapped_label = qclone_core::engine::ComponentLabel::new(label.alpha2, label.alpha1, label.beta);
            let swapped = swapped_label.with_input(problem.input_spin());
            let bases = CouplingBases::new(labels).unwrap();
            for _ in 0..4 {
                let mut lam: Vec<f64> = bases.a_channels.iter().map(|_| rng.gen_range(-1.0..1.0)).collect();
                let norm = lam.iter().map(|x| x * x).sum::<f64>().sqrt();
                lam.iter_mut().for_each(|x| *x /= norm);
                let mu = mu_from_lambda(&lam, &bases.overlaps, problem.input_spin()).unwrap();
                let lam_swapped: Vec<f64> =
                    mu.iter().zip(&bases.b_channels).map(|(m, &b)| m * exchange_sign(labels, swapped, b)).collect();
                let one = MapComponent::new(&problem, label, lam).unwrap();
                let other = MapComponent::new(&mirror, swapped_label, lam_swapped).unwrap();
                let (a, b) = (omega_a(&problem, &one).unwrap(), omega_b(&problem, &one).unwrap());
                let (a2, b2) = (omega_a(&mirror, &other).unwrap(), omega_b(&mirror, &other).unwrap());
                assert!((a - b2).abs() < 1e-9 && (b - a2).abs() < 1e-9, "{problem:?} {label}");
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn mu_stays_normalised(l0 in -1.0f64..1.0, l1 in -1.0f64..1.0) {
        let norm = (l0 * l0 + l1 * l1).sqrt();
        prop_assume!(norm > 1e-3);
        let labels = ComponentLabels::new(spin(1), spin(1), spin(1), spin(1));
        let bases = CouplingBases::new(labels).unwrap();
        let lam = [l0 / norm, l1 / norm];
        let mu = mu_from_lambda(&lam, &bases.overlaps, spin(1)).unwrap();
        prop_assert!((mu.iter().map(|x| x * x).sum::<f64>() - 1.0).abs() < 1e-9);
        prop_assert!((mu[1] - (3f64.sqrt() * lam[0] - lam[1]) / 2.0).abs() < 1e-12);
    }
}

#[test]
fn frontiers_are_monotone() {
    for (n, m_a, m_b) in [(1, 1, 1), (1, 1, 2), (2, 2, 1), (1, 2, 2)] {
        let problem = CloningProblem::qubits(n, m_a, m_b).unwrap();
        let grid = GridSpec::full(&problem, 41).unwrap();
        let fr = frontier(&problem, grid, &OptimizerConfig { restarts: 2, ..Default::default() }).unwrap();
        for w in fr.points.windows(2) {
            assert!(w[1].f_b.unwrap() <= w[0].f_b.unwrap(), "{problem:?} at {}", w[1].f_a);
        }
    }
}

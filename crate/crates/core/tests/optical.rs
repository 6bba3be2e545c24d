use num_complex::Complex64;
use proptest::prelude::*;
use qclone_core::optical::{
    filip_scheme, optical_formula, pdc_output, three_way_scheme, BeamSplitterSpec, FilipConfig, OpticalState,
};
use qclone_core::optimizer::maximize_three_way;

fn t_values() -> Vec<f64> {
    (1..=20).map(|i| f64::from(i) / 20.0).collect()
}

fn simulate(n: u32, a: u32, b: u32, t: f64) -> Vec<f64> {
    filip_scheme(n, a, b, t, &FilipConfig::default()).unwrap().fidelities.unwrap()
}

#[test]
fn simulation_matches_closed_forms() {
    let mut tuples = vec![(1, 1, 2), (1, 2, 1), (2, 2, 1), (2, 1, 2)];
    for n in 1..=3 {
        tuples.push((n, n, 1));
        tuples.push((n, 1, n));
    }
    for (n, a, b) in tuples {
        for t in t_values() {
            let sim = simulate(n, a, b, t);
            let (fa, fb) = optical_formula(n, a, b, t).unwrap();
            assert!((sim[0] - fa).abs() < 1e-10, "({n},{a},{b}) T={t}: F_A {} vs {fa}", sim[0]);
            assert!((sim[1] - fb).abs() < 1e-10, "({n},{a},{b}) T={t}: F_B {} vs {fb}", sim[1]);
        }
    }
}

#[test]
fn spot_values() {
    let f = simulate(1, 2, 1, 2.0 / 3.0);
    assert!((f[0] - 5.0 / 6.0).abs() < 1e-12 && (f[1] - 5.0 / 9.0).abs() < 1e-12);
    let f = simulate(1, 1, 2, 0.5);
    assert!((f[0] - 1.0).abs() < 1e-12 && (f[1] - 0.5).abs() < 1e-12);
    let f = simulate(1, 1, 2, 1.0);
    assert!(f.iter().all(|x| (x - 7.0 / 9.0).abs() < 1e-12));
    for n in 1..=3u32 {
        let nf = f64::from(n);
        let sym = (nf * nf + 3.0 * nf + 1.0) / (nf * nf + 3.0 * nf + 2.0);
        let f = simulate(n, n, 1, 1.0);
        assert!(f.iter().all(|x| (x - sym).abs() < 1e-12), "{n}: {f:?}");
    }
}

#[test]
fn t_inverse_duality() {
    let den = |t: f64| 12.0 * t * t - 12.0 * t + 9.0;
    let single = |t: f64| (4.0 * t * t - 4.0 * t + 7.0) / den(t);
    let pair = |t: f64| (8.0 * t * t - 4.0 * t + 3.0) / den(t);
    for t in t_values() {
        let f = simulate(1, 2, 1, t);
        assert!((f[0] - pair(1.0 / t)).abs() < 1e-9);
        assert!((f[1] - single(1.0 / t)).abs() < 1e-9);
    }
}

#[test]
fn splitter_ratio_is_irrelevant() {
    for (n, a, b) in [(1, 1, 2), (1, 2, 1), (2, 2, 1), (1, 2, 2)] {
        let base = simulate(n, a, b, 0.7);
        for split in [0.1, 0.35, 0.9] {
            let cfg = FilipConfig { split: Some(split), ..Default::default() };
            let f = filip_scheme(n, a, b, 0.7, &cfg).unwrap().fidelities.unwrap();
            assert!((f[0] - base[0]).abs() < 1e-10 && (f[1] - base[1]).abs() < 1e-10);
        }
    }
}

#[test]
fn rotated_input_gives_same_fidelities() {
    let (alpha, beta, gamma) = (0.7f64, 1.9f64, -0.4f64);
    let e = |x: f64| Complex64::from_polar(1.0, x);
    let (c, s) = ((beta / 2.0).cos(), (beta / 2.0).sin());
    let u = [
        [e(-(alpha + gamma) / 2.0) * c, -e(-(alpha - gamma) / 2.0) * s],
        [e((alpha - gamma) / 2.0) * s, e((alpha + gamma) / 2.0) * c],
    ];
    for (n, a, b) in [(1, 1, 2), (2, 2, 1)] {
        let base = simulate(n, a, b, 0.6);
        let cfg = FilipConfig { rotation: Some(u), ..Default::default() };
        let f = filip_scheme(n, a, b, 0.6, &cfg).unwrap().fidelities.unwrap();
        assert!((f[0] - base[0]).abs() < 1e-9 && (f[1] - base[1]).abs() < 1e-9);
    }
}

#[test]
fn idler_keeps_the_anticlones() {
    for (n, a, b) in [(1, 1, 2), (2, 2, 1), (1, 2, 1)] {
        let out = filip_scheme(n, a, b, 0.8, &FilipConfig::default()).unwrap();
        assert!(out.probability > 0.0);
        assert_eq!(out.state.photon_counts(1), vec![a + b - n]);
    }
}

#[test]
fn three_way_limits() {
    let f = three_way_scheme(1.0, 1.0).unwrap().fidelities.unwrap();
    assert!(f.iter().all(|x| (x - 7.0 / 9.0).abs() < 1e-12), "{f:?}");
    let f = three_way_scheme(0.5, 1.0).unwrap().fidelities.unwrap();
    assert!((f[0] - 1.0).abs() < 1e-12 && (f[1] - 0.5).abs() < 1e-12 && (f[2] - 0.5).abs() < 1e-12, "{f:?}");
    for t1 in [0.55, 0.7, 0.9] {
        let f = three_way_scheme(t1, 1.0).unwrap().fidelities.unwrap();
        let (single, pair) = optical_formula(1, 1, 2, t1).unwrap();
        assert!((f[0] - single).abs() < 1e-12 && (f[1] - pair).abs() < 1e-12 && (f[2] - pair).abs() < 1e-12);
    }
}

/// `min_w [max_machines w.F - w.F_sim]` over the weight simplex; zero iff the
/// simulated triple lies on the optimal surface.
fn optimality_gap(f: &[f64]) -> f64 {
    let g = |a: f64, b: f64| {
        let w = [a, b, (1.0 - a - b).max(0.0)];
        let p = maximize_three_way(w).unwrap();
        p.objective - (w[0] * f[0] + w[1] * f[1] + w[2] * f[2])
    };
    let (mut a, mut b) = (1.0 / 3.0, 1.0 / 3.0);
    let n = 40;
    let mut best = g(a, b);
    for i in 0..=n {
        for j in 0..=(n - i) {
            let (x, y) = (f64::from(i) / f64::from(n), f64::from(j) / f64::from(n));
            let v = g(x, y);
            if v < best {
                (a, b, best) = (x, y, v);
            }
        }
    }
    let mut step = 1.0 / f64::from(n);
    while step > 1e-12 {
        let mut moved = false;
        for (da, db) in [(step, 0.0), (-step, 0.0), (0.0, step), (0.0, -step), (step, -step), (-step, step)] {
            let (x, y) = (a + da, b + db);
            if x < 0.0 || y < 0.0 || x + y > 1.0 {
                continue;
            }
            let v = g(x, y);
            if v < best {
                (a, b, best) = (x, y, v);
                moved = true;
            }
        }
        if !moved {
            step *= 0.5;
        }
    }
    best
}

#[test]
fn three_way_scheme_is_optimal() {
    for (t1, t2) in [(0.5, 0.3), (0.5, 0.7), (0.7, 0.5), (0.8, 0.8), (0.6, 0.9), (0.9, 0.6)] {
        let f = three_way_scheme(t1, t2).unwrap().fidelities.unwrap();
        let gap = optimality_gap(&f);
        assert!(gap < 1e-8, "T1={t1} T2={t2}: {f:?} gap {gap:e}");
    }
}

#[test]
fn state_level_contracts() {
    let one = pdc_output(1, 1).unwrap();
    assert_eq!(one.terms().count(), 1);
    assert_eq!(one.amplitude(&[1, 0, 0, 0]), Complex64::new(1.0, 0.0));
    let s = pdc_output(2, 3).unwrap();
    let r = s.amplitude(&[3, 0, 0, 1]).re / s.amplitude(&[2, 1, 1, 0]).re;
    assert!((r + 3f64.sqrt()).abs() < 1e-12);
    let same = s.apply_beam_splitter(BeamSplitterSpec::new(0, 1, 1.0).unwrap()).unwrap();
    assert_eq!(same, s);
    let (kept, p) = s.post_select(&[(0, 3)]).unwrap();
    assert!((p - 1.0).abs() < 1e-15);
    assert_eq!(kept, s);
    let mixed = OpticalState::from_terms(1, 4, [(vec![1, 1], Complex64::new(1.0, 0.0))]).unwrap();
    assert!((mixed.single_clone_fidelity(0).unwrap() - 0.5).abs() < 1e-15);
    let empty = OpticalState::from_terms(2, 4, [(vec![0, 0, 1, 0], Complex64::new(1.0, 0.0))]).unwrap();
    assert!(empty.single_clone_fidelity(0).is_err());
}

fn three_photon_state() -> impl Strategy<Value = OpticalState> {
    let occ = prop::collection::vec(0u8..=3, 6)
        .prop_filter("three photons", |o| o.iter().map(|&x| u32::from(x)).sum::<u32>() == 3);
    let term = (occ, -1.0f64..1.0, -1.0f64..1.0);
    prop::collection::vec(term, 1..8)
        .prop_map(|terms| {
            let terms = terms.into_iter().map(|(o, re, im)| (o, Complex64::new(re, im)));
            OpticalState::from_terms(3, 6, terms).unwrap()
        })
        .prop_filter("non-zero", |s| s.norm_sqr() > 1e-6)
        .prop_map(OpticalState::normalized)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]
    #[test]
    fn beam_splitters_preserve_norm(s in three_photon_state(), t in 0.0f64..=1.0, a in 0usize..3, shift in 1usize..3) {
        let b = (a + shift) % 3;
        let out = s.apply_beam_splitter(BeamSplitterSpec::new(a, b, t).unwrap()).unwrap();
        prop_assert!((out.norm_sqr() - 1.0).abs() < 1e-12);
    }
}

//! Brute-force cross-check. A cloning map is an explicit Stinespring
//! isometry `V : Sym^N(C^d) -> (C^d)^{(x)M} (x) C^K`; single-clone
//! fidelities are averaged over Haar-random inputs exactly, and trade-off
//! curves come from direct ascent over isometries.
//!
//! The Haar average uses `int |psi><psi|^{(x)(N+1)} = S_{N+1} / d[N+1]`, so
//! each clone's average fidelity is a Hermitian quadratic form in `V`.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::engine::CloningProblem;
use crate::error::{Error, Result};
use crate::optimizer::GridSpec;
use crate::repr::Spin;
use crate::rng::{derive_seed, gaussian, haar_state, seeded};

const ISOMETRY_TOL: f64 = 1e-10;

/// Occupation-number basis of `Sym^n(C^d)`.
#[derive(Clone, Debug)]
struct SymBasis {
    states: Vec<Vec<u32>>,
    index: BTreeMap<Vec<u32>, usize>,
}

impl SymBasis {
    fn new(n: u32, d: usize) -> Self {
        let mut states = Vec::new();
        let mut cur = alloc::vec![0u32; d];
        fn fill(pos: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
            if pos + 1 == cur.len() {
                cur[pos] = left;
                out.push(cur.clone());
                return;
            }
            for k in (0..=left).rev() {
                cur[pos] = k;
                fill(pos + 1, left - k, cur, out);
            }
        }
        fill(0, n, &mut cur, &mut states);
        let index = states.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
        SymBasis { states, index }
    }

    fn len(&self) -> usize {
        self.states.len()
    }
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// Explicit Stinespring isometry of an `N -> M` map on qudits.
#[derive(Clone, Debug)]
pub struct IsometryParam {
    pub n: u32,
    pub m: u32,
    pub d: usize,
    pub ancilla: usize,
    /// Rows: output index `(q_0, .., q_{M-1}, k)` with `k` fastest;
    /// columns: occupation basis of `Sym^N`.
    pub v: DMatrix<Complex64>,
}

impl IsometryParam {
    pub fn new(n: u32, m: u32, d: usize, ancilla: usize, v: DMatrix<Complex64>) -> Result<Self> {
        if n == 0 || m == 0 || d < 2 || ancilla == 0 {
            return Err(Error::Domain("invalid isometry dimensions"));
        }
        let rows = d.pow(m) * ancilla;
        let cols = SymBasis::new(n, d).len();
        if v.nrows() != rows || v.ncols() != cols {
            return Err(Error::Shape("isometry shape does not match (d^M K) x d[N]"));
        }
        let gram = v.adjoint() * &v;
        let residual = (gram - DMatrix::<Complex64>::identity(cols, cols)).norm();
        if residual > ISOMETRY_TOL {
            return Err(Error::Normalisation("V^+ V differs from the identity"));
        }
        Ok(IsometryParam { n, m, d, ancilla, v })
    }

    /// Polar factor of a random complex Gaussian matrix.
    fn random(n: u32, m: u32, d: usize, ancilla: usize, seed: u64) -> Self {
        let mut rng = seeded(seed);
        let rows = d.pow(m) * ancilla;
        let cols = SymBasis::new(n, d).len();
        let a = DMatrix::from_fn(rows, cols, |_, _| Complex64::new(gaussian(&mut rng), gaussian(&mut rng)));
        IsometryParam { n, m, d, ancilla, v: polar(&a).unwrap_or(a) }
    }

    /// `rho -> (d[N]/d[M]) S_M (rho (x) 1) S_M`, with ancilla `d^{M-N}`.
    pub fn symmetric_cloner(n: u32, m: u32, d: usize) -> Result<Self> {
        if m < n {
            return Err(Error::Domain("need M >= N"));
        }
        let input = SymBasis::new(n, d);
        let dn = input.len() as f64;
        let dm = SymBasis::new(m, d).len() as f64;
        let ancilla = d.pow(m - n);
        let out = d.pow(m);
        let mut v = DMatrix::<Complex64>::zeros(out * ancilla, input.len());
        let digits = |mut y: usize, len: u32| {
            let mut q = alloc::vec![0usize; len as usize];
            for slot in q.iter_mut().rev() {
                *slot = y % d;
                y /= d;
            }
            q
        };
        let occupation = |q: &[usize]| {
            let mut occ = alloc::vec![0u32; d];
            for &x in q {
                occ[x] += 1;
            }
            occ
        };
        // Projecting |seq> onto Sym^M spreads weight 1/mult over every
        // rearrangement of seq.
        for (col, phi) in input.states.iter().enumerate() {
            let count = factorial(n) / phi.iter().map(|&k| factorial(k)).product::<f64>();
            for seq in 0..d.pow(n) {
                let qs = digits(seq, n);
                if occupation(&qs) != *phi {
                    continue;
                }
                for j in 0..ancilla {
                    let mut full = qs.clone();
                    full.extend(digits(j, m - n));
                    let occ = occupation(&full);
                    let mult = factorial(m) / occ.iter().map(|&k| factorial(k)).product::<f64>();
                    for y in 0..out {
                        if occupation(&digits(y, m)) == occ {
                            let amp = (dn / dm).sqrt() / count.sqrt() / mult;
                            v[(y * ancilla + j, col)] += Complex64::new(amp, 0.0);
                        }
                    }
                }
            }
        }
        Self::new(n, m, d, ancilla, v)
    }

    fn output_rows(&self) -> usize {
        self.d.pow(self.m) * self.ancilla
    }

    fn stride(&self, clone: usize) -> usize {
        self.d.pow(self.m - 1 - clone as u32) * self.ancilla
    }
}

fn polar(a: &DMatrix<Complex64>) -> Option<DMatrix<Complex64>> {
    let gram = a.adjoint() * a;
    let eig = SymmetricEigen::new(gram);
    if eig.eigenvalues.iter().any(|&l| l < 1e-14) {
        return None;
    }
    let inv_sqrt = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| Complex64::new(1.0 / l.sqrt(), 0.0)));
    Some(a * (&eig.eigenvectors * inv_sqrt * eig.eigenvectors.adjoint()))
}

#[derive(Clone, Copy, Debug)]
struct Entry {
    out_row: u32,
    out_col: u32,
    in_row: u32,
    in_col: u32,
    coef: f64,
}

/// Weighted sum of clone fidelities as the form `Re <V, L V>`.
#[derive(Clone, Debug)]
struct FidelityForm {
    entries: Vec<Entry>,
    rows: usize,
    cols: usize,
}

impl FidelityForm {
    fn new(shape: &IsometryParam, weights: &[(usize, f64)]) -> Self {
        let (n, d) = (shape.n, shape.d);
        let input = SymBasis::new(n, d);
        let dn1 = SymBasis::new(n + 1, d).len() as f64;
        let rows = shape.output_rows();
        let mut entries = Vec::new();
        for &(clone, w) in weights {
            if w == 0.0 {
                continue;
            }
            let stride = shape.stride(clone);
            for (col, phi) in input.states.iter().enumerate() {
                for s in 0..d {
                    for r in 0..d {
                        let mut up = phi.clone();
                        up[r] += 1;
                        if up[s] == 0 {
                            continue;
                        }
                        let coef = w * f64::from(up[r] * up[s]).sqrt() / f64::from(n + 1) / dn1;
                        let mut down = up.clone();
                        down[s] -= 1;
                        let in_col = input.index[&down];
                        for base in (0..rows).filter(|y| (y / stride).is_multiple_of(d)) {
                            entries.push(Entry {
                                out_row: (base + s * stride) as u32,
                                out_col: col as u32,
                                in_row: (base + r * stride) as u32,
                                in_col: in_col as u32,
                                coef,
                            });
                        }
                    }
                }
            }
        }
        FidelityForm { entries, rows, cols: input.len() }
    }

    fn apply(&self, v: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        let mut out = DMatrix::<Complex64>::zeros(self.rows, self.cols);
        for e in &self.entries {
            out[(e.out_row as usize, e.out_col as usize)] += v[(e.in_row as usize, e.in_col as usize)] * e.coef;
        }
        out
    }

    fn value(&self, v: &DMatrix<Complex64>) -> f64 {
        self.entries
            .iter()
            .map(|e| {
                (v[(e.out_row as usize, e.out_col as usize)].conj() * v[(e.in_row as usize, e.in_col as usize)]).re
                    * e.coef
            })
            .sum()
    }
}

/// Haar-averaged fidelity of the clones in `clones`, averaged over them.
pub fn haar_average_fidelity(v: &IsometryParam, clones: &[usize]) -> Result<f64> {
    if clones.is_empty() || clones.iter().any(|&c| c >= v.m as usize) {
        return Err(Error::Domain("clone index out of range"));
    }
    let w = 1.0 / clones.len() as f64;
    let weights: Vec<(usize, f64)> = clones.iter().map(|&c| (c, w)).collect();
    Ok(FidelityForm::new(v, &weights).value(&v.v))
}

/// Fidelity of one clone for the pure input `psi`.
pub fn fidelity_at_state(v: &IsometryParam, clone: usize, psi: &[Complex64]) -> Result<f64> {
    if clone >= v.m as usize || psi.len() != v.d {
        return Err(Error::Domain("clone index or state dimension out of range"));
    }
    let input = SymBasis::new(v.n, v.d);
    let coeffs = DMatrix::from_fn(input.len(), 1, |i, _| {
        let occ = &input.states[i];
        let mult = factorial(v.n) / occ.iter().map(|&k| factorial(k)).product::<f64>();
        let mut z = Complex64::new(mult.sqrt(), 0.0);
        for (x, &k) in psi.iter().zip(occ) {
            for _ in 0..k {
                z *= *x;
            }
        }
        z
    });
    let out = &v.v * coeffs;
    let stride = v.stride(clone);
    let mut f = 0.0;
    for base in (0..v.output_rows()).filter(|y| (y / stride).is_multiple_of(v.d)) {
        let mut amp = Complex64::default();
        for (r, x) in psi.iter().enumerate() {
            amp += x.conj() * out[(base + r * stride, 0)];
        }
        f += amp.norm_sqr();
    }
    Ok(f)
}

/// Extremes of the group-averaged fidelity over random pure inputs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WorstCase {
    pub min_fidelity: f64,
    /// Largest `|F(psi) - F_avg|` seen.
    pub max_deviation: f64,
}

pub fn worst_case_fidelity(v: &IsometryParam, clones: &[usize], samples: usize, seed: u64) -> Result<WorstCase> {
    let avg = haar_average_fidelity(v, clones)?;
    let mut rng = seeded(seed);
    let mut out = WorstCase { min_fidelity: f64::INFINITY, max_deviation: 0.0 };
    for _ in 0..samples {
        let psi = haar_state(&mut rng, v.d);
        let mut f = 0.0;
        for &c in clones {
            f += fidelity_at_state(v, c, &psi)?;
        }
        f /= clones.len() as f64;
        out.min_fidelity = out.min_fidelity.min(f);
        out.max_deviation = out.max_deviation.max((f - avg).abs());
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OracleConfig {
    pub restarts: usize,
    pub seed: u64,
    /// Ancilla dimension; `d[N] d^M` when `None`.
    pub ancilla: Option<usize>,
    /// Largest allowed `d^M K`.
    pub max_dim: usize,
    pub step: f64,
    pub max_iters: usize,
    /// Stop when the objective gains less than `tol` (relative to the
    /// smaller weight) over `window` steps.
    pub tol: f64,
    pub window: usize,
    /// Extra solves spent tightening the envelope.
    pub refine_budget: usize,
    /// Target bound on the gap between envelope and frontier.
    pub refine_tol: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            restarts: 10,
            seed: 0,
            ancilla: None,
            max_dim: 512,
            step: 0.05,
            max_iters: 20_000,
            tol: 1e-10,
            window: 50,
            refine_budget: 40,
            refine_tol: 2e-5,
        }
    }
}

/// Best isometry found for one weighting of the two groups.
#[derive(Clone, Debug)]
pub struct OraclePoint {
    pub f_a: f64,
    pub f_b: Option<f64>,
    pub objective: f64,
    pub isometry: IsometryParam,
}

struct Setup {
    shape: IsometryParam,
    group_a: Vec<usize>,
    group_b: Vec<usize>,
}

fn setup(problem: &CloningProblem, cfg: &OracleConfig) -> Result<Setup> {
    let d = problem.d as usize;
    let m = problem.m();
    let dn = SymBasis::new(problem.n, d).len();
    let ancilla = cfg.ancilla.unwrap_or(dn * d.pow(m));
    if d.pow(m) * ancilla > cfg.max_dim {
        return Err(Error::Domain("oracle problem exceeds the dimension budget"));
    }
    let shape = IsometryParam { n: problem.n, m, d, ancilla, v: DMatrix::zeros(0, 0) };
    Ok(Setup {
        shape,
        group_a: (0..problem.m_a as usize).collect(),
        group_b: (problem.m_a as usize..m as usize).collect(),
    })
}

fn ascend(form: &FidelityForm, start: DMatrix<Complex64>, cfg: &OracleConfig, scale: f64) -> (DMatrix<Complex64>, f64) {
    let mut v = start;
    let mut value = form.value(&v);
    let mut step = cfg.step;
    let mut history: Vec<f64> = Vec::with_capacity(cfg.max_iters + 1);
    history.push(value);
    for it in 0..cfg.max_iters {
        let grad = form.apply(&v);
        let mut accepted = false;
        while step > 1e-12 {
            let trial = match polar(&(&v + &grad * Complex64::new(step, 0.0))) {
                Some(t) => t,
                None => {
                    step *= 0.5;
                    continue;
                }
            };
            let tv = form.value(&trial);
            if tv >= value {
                v = trial;
                value = tv;
                step = (step * 1.5).min(1e3);
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        history.push(value);
        if !accepted {
            break;
        }
        if it >= cfg.window && value - history[it - cfg.window] < cfg.tol * scale {
            break;
        }
    }
    (v, value)
}

fn maximize_weighted_in(
    setup: &Setup,
    w_a: f64,
    w_b: f64,
    warm: Option<&DMatrix<Complex64>>,
    seed: u64,
    cfg: &OracleConfig,
) -> Result<OraclePoint> {
    let mut weights: Vec<(usize, f64)> = Vec::new();
    for &c in &setup.group_a {
        weights.push((c, w_a / setup.group_a.len() as f64));
    }
    for &c in &setup.group_b {
        weights.push((c, w_b / setup.group_b.len() as f64));
    }
    let form = FidelityForm::new(&setup.shape, &weights);
    let scale = if setup.group_b.is_empty() { w_a } else { w_a.min(w_b).max(1e-6) };
    let s = &setup.shape;
    let mut best: Option<(DMatrix<Complex64>, f64)> = None;
    let starts = cfg.restarts.max(1);
    for r in 0..starts + usize::from(warm.is_some()) {
        let start = match (r, warm) {
            (0, Some(w)) => w.clone(),
            _ => IsometryParam::random(s.n, s.m, s.d, s.ancilla, derive_seed(seed, r as u64)).v,
        };
        let (v, value) = ascend(&form, start, cfg, scale);
        if best.as_ref().is_none_or(|(_, b)| value > *b) {
            best = Some((v, value));
        }
    }
    let (v, objective) = best.ok_or(Error::Domain("no restarts"))?;
    let isometry = IsometryParam { v, ..s.clone() };
    let f_a = haar_average_fidelity(&isometry, &setup.group_a)?;
    let f_b = if setup.group_b.is_empty() { None } else { Some(haar_average_fidelity(&isometry, &setup.group_b)?) };
    Ok(OraclePoint { f_a, f_b, objective, isometry })
}

/// Maximises `w_a F_A + w_b F_B` over isometries.
pub fn maximize_weighted(problem: &CloningProblem, w_a: f64, w_b: f64, cfg: &OracleConfig) -> Result<OraclePoint> {
    if w_a < 0.0 || w_b < 0.0 || w_a + w_b == 0.0 {
        return Err(Error::Domain("weights must be non-negative and not both zero"));
    }
    let s = setup(problem, cfg)?;
    maximize_weighted_in(&s, w_a, w_b, None, cfg.seed, cfg)
}

/// Best symmetric `N -> M` fidelity found by direct ascent.
pub fn oracle_symmetric(n: u32, m: u32, d: u32, cfg: &OracleConfig) -> Result<f64> {
    let problem = CloningProblem::new(n, m, 0, d)?;
    Ok(maximize_weighted(&problem, 1.0, 0.0, cfg)?.f_a)
}

/// Upper concave envelope of the achievable `(F_A, F_B)` pairs and the
/// resulting `F_B` at each grid value of `F_A`.
#[derive(Clone, Debug)]
pub struct OracleFrontier {
    pub problem: CloningProblem,
    pub grid: GridSpec,
    pub envelope: Vec<(f64, f64)>,
    /// `None` where the grid value lies beyond every achieved `F_A`.
    pub f_b: Vec<Option<f64>>,
    /// Weighting angle and achieved `(F_A, F_B)` of every solve, in order.
    pub solves: Vec<(f64, f64, f64)>,
}

fn upper_hull(mut pts: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    pts.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(core::cmp::Ordering::Equal));
    let mut hull: Vec<(f64, f64)> = Vec::new();
    for p in pts {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            let cross = (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    hull
}

/// How far the frontier can rise above the chord `p q` at `F_A = t`, given
/// that it lies below the supporting lines with normal angles `tp`, `tq`
/// through `p` and `q`.
fn chord_gap_at(p: (f64, f64), tp: f64, q: (f64, f64), tq: f64, t: f64) -> f64 {
    let line = |o: (f64, f64), th: f64| {
        let sn = th.sin();
        if sn < 1e-12 {
            f64::INFINITY
        } else {
            o.1 - th.cos() / sn * (t - o.0)
        }
    };
    let chord = p.1 + (q.1 - p.1) * (t - p.0) / (q.0 - p.0);
    (line(p, tp).min(line(q, tq)) - chord).max(0.0)
}

/// Largest `F_B` on the envelope with `F_A >= target`.
pub fn envelope_value(envelope: &[(f64, f64)], target: f64) -> Option<f64> {
    const SLACK: f64 = 1e-6;
    let last = *envelope.last()?;
    if target > last.0 + SLACK {
        return None;
    }
    if target >= last.0 {
        return Some(last.1);
    }
    let mut best = f64::NEG_INFINITY;
    for w in envelope.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b.0 < target {
            continue;
        }
        let y = if a.0 >= target { a.1.max(b.1) } else { a.1 + (b.1 - a.1) * (target - a.0) / (b.0 - a.0) };
        best = best.max(y);
    }
    if envelope.len() == 1 {
        best = last.1;
    }
    Some(best)
}

/// Frontier from a sweep of `cos(theta) F_A + sin(theta) F_B`, refined at
/// the grid values where the envelope may sit furthest below the frontier.
/// Each vertex maximises its own weighting, so the supporting lines through
/// a chord's ends bound the frontier above it; the next weighting is the
/// chord's normal.
pub fn oracle_frontier(problem: &CloningProblem, grid: GridSpec, cfg: &OracleConfig) -> Result<OracleFrontier> {
    if problem.m_b == 0 {
        return Err(Error::Domain("oracle frontier needs two clone groups"));
    }
    let s = setup(problem, cfg)?;
    let half_pi = core::f64::consts::FRAC_PI_2;
    let mut thetas: Vec<f64> = alloc::vec![1e-6, 1e-5, 1e-4, 1e-3, 1e-2];
    thetas.extend((0..=10).map(|i| 0.05 + (half_pi - 0.1) * f64::from(i) / 10.0));
    thetas.extend([half_pi - 1e-2, half_pi - 1e-3]);

    let mut found: Vec<(f64, (f64, f64), DMatrix<Complex64>)> = Vec::new();
    let solve = |theta: f64, warm: Option<&DMatrix<Complex64>>, found: &mut Vec<_>| -> Result<()> {
        let seed = derive_seed(cfg.seed, theta.to_bits());
        let p = maximize_weighted_in(&s, theta.cos(), theta.sin(), warm, seed, cfg)?;
        found.push((theta, (p.f_a, p.f_b.unwrap_or(0.0)), p.isometry.v));
        Ok(())
    };
    for &t in &thetas {
        solve(t, None, &mut found)?;
    }
    let targets = grid.values();
    let mut closed: Vec<(u64, u64)> = Vec::new();
    for _ in 0..cfg.refine_budget {
        let hull = upper_hull(found.iter().map(|f| f.1).collect());
        let vertex = |p: (f64, f64)| found.iter().position(|f| f.1 == p);
        let mut worst: Option<(usize, usize, f64)> = None;
        for w in hull.windows(2) {
            // Rising chords lie left of the best F_B and never matter.
            if w[1].1 >= w[0].1 {
                continue;
            }
            let (Some(i), Some(j)) = (vertex(w[0]), vertex(w[1])) else { continue };
            let key = (found[i].0.to_bits(), found[j].0.to_bits());
            if closed.contains(&key) {
                continue;
            }
            for &t in targets.iter().filter(|&&t| t > w[0].0 && t < w[1].0) {
                let bound = chord_gap_at(w[0], found[i].0, w[1], found[j].0, t);
                if bound > cfg.refine_tol && worst.is_none_or(|g| bound > g.2) {
                    worst = Some((i, j, bound));
                }
            }
        }
        let Some((i, j, _)) = worst else { break };
        let (p, q) = (found[i].1, found[j].1);
        let theta = (q.0 - p.0).atan2(p.1 - q.1);
        let warm = found[i].2.clone();
        let key = (found[i].0.to_bits(), found[j].0.to_bits());
        solve(theta, Some(&warm), &mut found)?;
        let new = found.last().map(|f| f.1).unwrap_or(p);
        let (c, sn) = (theta.cos(), theta.sin());
        if c * new.0 + sn * new.1 <= c * p.0 + sn * p.1 + 1e-10 {
            closed.push(key);
        }
    }
    let envelope = upper_hull(found.iter().map(|f| f.1).collect());
    let f_b = grid.values().into_iter().map(|t| envelope_value(&envelope, t)).collect();
    let solves = found.iter().map(|f| (f.0, f.1 .0, f.1 .1)).collect();
    Ok(OracleFrontier { problem: *problem, grid, envelope, f_b, solves })
}

/// Clebsch-Gordan table of `j1 (x) j2`, built by lowering from the highest
/// weight and Gram-Schmidt within each `M` subspace. Phases follow the
/// Condon-Shortley rule `<j1 j1; j2 J-j1 | J J> > 0`.
#[derive(Clone, Debug)]
pub struct CgTable {
    j1: Spin,
    j2: Spin,
    /// Coupled states `(J, 2M)` as vectors over `(m1, m2)` positions.
    states: BTreeMap<(Spin, i32), Vec<f64>>,
}

fn ladder(j: Spin, twice_m: i32) -> f64 {
    let (j, m) = (j.value(), f64::from(twice_m) / 2.0);
    (j * (j + 1.0) - m * (m - 1.0)).max(0.0).sqrt()
}

impl CgTable {
    pub fn new(j1: Spin, j2: Spin) -> Self {
        let (d1, d2) = (j1.dim(), j2.dim());
        let m_of = |pos: usize, j: Spin| j.twice() as i32 - 2 * pos as i32;
        let total = |p: usize| m_of(p / d2, j1) + m_of(p % d2, j2);
        let lower = |v: &[f64]| {
            let mut out = alloc::vec![0.0; d1 * d2];
            for (p, &c) in v.iter().enumerate() {
                if c == 0.0 {
                    continue;
                }
                let (a, b) = (p / d2, p % d2);
                if a + 1 < d1 {
                    out[(a + 1) * d2 + b] += c * ladder(j1, m_of(a, j1));
                }
                if b + 1 < d2 {
                    out[a * d2 + b + 1] += c * ladder(j2, m_of(b, j2));
                }
            }
            out
        };
        let mut states: BTreeMap<(Spin, i32), Vec<f64>> = BTreeMap::new();
        let top = j1.twice() + j2.twice();
        let bottom = j1.twice().abs_diff(j2.twice());
        for big in (bottom..=top).rev().step_by(2) {
            let spin = Spin::from_twice(big);
            let mm = big as i32;
            let others: Vec<Vec<f64>> = states.iter().filter(|((_, m), _)| *m == mm).map(|(_, v)| v.clone()).collect();
            let mut best: Option<Vec<f64>> = None;
            let mut best_norm = 0.0;
            for p in (0..d1 * d2).filter(|&p| total(p) == mm) {
                let mut v = alloc::vec![0.0; d1 * d2];
                v[p] = 1.0;
                for _ in 0..2 {
                    for o in &others {
                        let dot: f64 = o.iter().zip(&v).map(|(a, b)| a * b).sum();
                        for (x, y) in v.iter_mut().zip(o) {
                            *x -= dot * y;
                        }
                    }
                }
                let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                if norm > best_norm {
                    best_norm = norm;
                    best = Some(v);
                }
            }
            let mut v: Vec<f64> = best.unwrap_or_default().into_iter().map(|x| x / best_norm).collect();
            // m1 = j1 sits at position (0, b).
            let lead = (0..d2).map(|b| v[b]).find(|x| x.abs() > 1e-12).unwrap_or(1.0);
            if lead < 0.0 {
                v.iter_mut().for_each(|x| *x = -*x);
            }
            let mut m = mm;
            states.insert((spin, m), v.clone());
            while m > -mm {
                let next = lower(&v);
                let c = ladder(spin, m);
                v = next.into_iter().map(|x| x / c).collect();
                m -= 2;
                states.insert((spin, m), v.clone());
            }
        }
        CgTable { j1, j2, states }
    }

    /// `<j1 m1; j2 m2 | J M>` with twice-valued magnetic numbers.
    pub fn get(&self, twice_m1: i32, twice_m2: i32, big: Spin, twice_big_m: i32) -> Result<f64> {
        let pos = |j: Spin, tm: i32| {
            let t = j.twice() as i32;
            if tm.abs() > t || (t - tm) % 2 != 0 {
                None
            } else {
                Some(((t - tm) / 2) as usize)
            }
        };
        let (a, b) = match (pos(self.j1, twice_m1), pos(self.j2, twice_m2)) {
            (Some(a), Some(b)) => (a, b),
            _ => return Err(Error::Domain("magnetic number out of range")),
        };
        if pos(big, twice_big_m).is_none() {
            return Err(Error::Domain("magnetic number out of range"));
        }
        if twice_m1 + twice_m2 != twice_big_m {
            return Ok(0.0);
        }
        match self.states.get(&(big, twice_big_m)) {
            Some(v) => Ok(v[a * self.j2.dim() + b]),
            None => Err(Error::Domain("J is not in the coupling series")),
        }
    }
}

/// One-shot Clebsch-Gordan coefficient through [`CgTable`].
pub fn cg_racah_formula(j1: Spin, twice_m1: i32, j2: Spin, twice_m2: i32, big: Spin, twice_big_m: i32) -> Result<f64> {
    CgTable::new(j1, j2).get(twice_m1, twice_m2, big, twice_big_m)
}

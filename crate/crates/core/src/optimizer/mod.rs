//! Maximisation of `F_B` at fixed `F_A` and Pareto frontiers.
//!
//! Each component contributes the pair of quadratic forms
//! `(lambda^T A lambda, lambda^T B lambda)` on the unit sphere, and mixtures
//! range over the convex hull of all such pairs. The upper boundary of that
//! hull at `omega_A = x` equals `min_k [H(k) - k x]` with
//! `H(k) = max_c lambda_max(B_c + k A_c)`, which is minimised by bisection on
//! the sign of its subgradient. The optimal machine is recovered from the
//! maximisers on both sides of the minimiser.
//!
//! Random-restart penalised coordinate descent on the primal problem runs
//! alongside as a consistency check: no restart may beat the dual bound.

mod conjecture;
mod qcqp;
mod three_way;

use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::engine::{
    fidelity_from_omega, omega_from_fidelity, CloningMachine, CloningProblem, MapComponent, ProblemModel,
};
use crate::error::{Error, Result};
use crate::linalg::{fix_sign, top_eigen};
use crate::rng::{derive_seed, seeded, unit_vector};

pub use conjecture::{conjecture_family_frontier, verify_conjecture, ConjectureReport};
pub use qcqp::max_quadratic_with_floor;
pub use three_way::{maximize_three_way, ThreeWayPoint};

/// Tolerance below which a primal restart beating the dual bound is ignored.
const PRIMAL_SLACK: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OptimizerConfig {
    /// Primal random restarts run per solve as a check on the dual.
    pub restarts: usize,
    pub seed: u64,
    /// Initial weight of the quadratic penalty in the primal check.
    pub penalty_initial: f64,
    pub tol: f64,
    /// Sweep limit of each primal coordinate-descent stage.
    pub max_iters: usize,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig { restarts: 20, seed: 0, penalty_initial: 1e4, tol: 1e-9, max_iters: 400 }
    }
}

/// One point of a frontier and the machine attaining it.
#[derive(Clone, Debug, PartialEq)]
pub struct TradeoffPoint {
    pub f_a: f64,
    /// Absent when `M_B = 0`.
    pub f_b: Option<f64>,
    pub machine: CloningMachine,
    pub converged: bool,
    pub restarts_used: usize,
    /// Dual upper bound on `F_B` minus the achieved `F_B`.
    pub kkt_residual: f64,
    /// Set when monotone post-processing replaced the point by a machine
    /// with a larger `F_A`.
    pub relaxed: bool,
}

/// Uniform grid of `F_A` targets, both ends inclusive.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    pub f_a_min: f64,
    pub f_a_max: f64,
    pub count: usize,
}

impl GridSpec {
    pub fn new(f_a_min: f64, f_a_max: f64, count: usize) -> Result<Self> {
        if count < 2 {
            return Err(Error::Domain("grid needs at least two points"));
        }
        if f_a_min.partial_cmp(&f_a_max).is_none_or(|o| o.is_gt()) {
            return Err(Error::Domain("grid bounds out of order"));
        }
        Ok(GridSpec { f_a_min, f_a_max, count })
    }

    /// `[1/d, F_sym(N -> M_A)]` with the given number of points.
    pub fn full(problem: &CloningProblem, count: usize) -> Result<Self> {
        let model = ProblemModel::new(*problem)?;
        let (_, hi) = omega_a_range(&model);
        Self::new(1.0 / f64::from(problem.d), model.f_a(hi), count)
    }

    pub fn values(&self) -> Vec<f64> {
        let step = (self.f_a_max - self.f_a_min) / (self.count - 1) as f64;
        (0..self.count)
            .map(|i| if i + 1 == self.count { self.f_a_max } else { self.f_a_min + step * i as f64 })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Frontier {
    pub problem: CloningProblem,
    pub grid: GridSpec,
    pub points: Vec<TradeoffPoint>,
}

fn omega_a_range(model: &ProblemModel) -> (f64, f64) {
    let all = model.components.iter().flat_map(|c| c.a_weights.iter().copied());
    all.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), w| (lo.min(w), hi.max(w)))
}

#[derive(Clone, Debug)]
struct Candidate {
    comp: usize,
    lam: DVector<f64>,
    x: f64,
    y: f64,
}

/// Optimum of the dual at one `omega_A` target.
#[derive(Clone, Debug)]
pub(crate) struct DualSolution {
    parts: Vec<(f64, Candidate)>,
    x: f64,
    y: f64,
    /// Best dual bound on `omega_B` found.
    bound: f64,
    kappa: f64,
    converged: bool,
}

pub(crate) struct DualSolver<'a> {
    model: &'a ProblemModel,
    a: Vec<DMatrix<f64>>,
    b: Vec<DMatrix<f64>>,
}

impl<'a> DualSolver<'a> {
    pub(crate) fn new(model: &'a ProblemModel) -> Self {
        let a = model.components.iter().map(|c| c.a_form()).collect();
        let b = model.components.iter().map(|c| c.b_form.clone()).collect();
        DualSolver { model, a, b }
    }

    fn evaluate(&self, comp: usize, lam: DVector<f64>) -> Candidate {
        let x = lam.dot(&(&self.a[comp] * &lam));
        let y = lam.dot(&(&self.b[comp] * &lam));
        Candidate { comp, lam, x, y }
    }

    /// `H(kappa)` and its maximiser; ties go to the earliest component.
    fn top(&self, kappa: f64) -> (f64, Candidate) {
        let mut best: Option<(f64, usize, DVector<f64>)> = None;
        for c in 0..self.a.len() {
            let m = &self.b[c] + &self.a[c] * kappa;
            let (val, vec) = top_eigen(&m);
            if best.as_ref().is_none_or(|(bv, _, _)| val > *bv + 1e-13 * (1.0 + bv.abs())) {
                best = Some((val, c, vec));
            }
        }
        let (val, comp, vec) = best.expect("problem has components");
        (val, self.evaluate(comp, vec))
    }

    /// Best `omega_B` on the sub-sphere spanned by channels whose A-weight
    /// equals `target` (used at the ends of the `omega_A` range).
    fn endpoint(&self, target: f64) -> Option<Candidate> {
        let mut best: Option<Candidate> = None;
        for (c, model) in self.model.components.iter().enumerate() {
            let idx: Vec<usize> = (0..model.dim()).filter(|&i| (model.a_weights[i] - target).abs() < 1e-12).collect();
            if idx.is_empty() {
                continue;
            }
            let sub = DMatrix::from_fn(idx.len(), idx.len(), |i, j| self.b[c][(idx[i], idx[j])]);
            let (_, v) = top_eigen(&sub);
            let mut lam = DVector::zeros(model.dim());
            for (k, &i) in idx.iter().enumerate() {
                lam[i] = v[k];
            }
            let cand = self.evaluate(c, lam);
            if best.as_ref().is_none_or(|b| cand.y > b.y + 1e-13) {
                best = Some(cand);
            }
        }
        best
    }

    pub(crate) fn solve(&self, x: f64) -> Result<DualSolution> {
        let (lo_x, hi_x) = omega_a_range(self.model);
        if x > hi_x + 1e-12 || x < lo_x - 1e-12 {
            return Err(Error::Infeasible { target: x, lo: lo_x, hi: hi_x });
        }
        for end in [hi_x, lo_x] {
            if (x - end).abs() <= 1e-12 {
                let cand = self.endpoint(end).expect("range endpoint is attained");
                let (x, y) = (cand.x, cand.y);
                return Ok(DualSolution {
                    parts: alloc::vec![(1.0, cand)],
                    x,
                    y,
                    bound: y,
                    kappa: if end == hi_x { f64::INFINITY } else { f64::NEG_INFINITY },
                    converged: true,
                });
            }
        }

        let mut k_lo = -1.0;
        let (mut h_lo, mut lo) = self.top(k_lo);
        while lo.x > x && k_lo > -1e12 {
            k_lo *= 4.0;
            (h_lo, lo) = self.top(k_lo);
        }
        let mut k_hi = 1.0;
        let (mut h_hi, mut hi) = self.top(k_hi);
        while hi.x < x && k_hi < 1e12 {
            k_hi *= 4.0;
            (h_hi, hi) = self.top(k_hi);
        }
        let mut exact = None;
        for _ in 0..400 {
            if k_hi - k_lo <= 1e-15 * (1.0 + k_lo.abs().max(k_hi.abs())) {
                break;
            }
            let k = 0.5 * (k_lo + k_hi);
            let (h, c) = self.top(k);
            if (c.x - x).abs() <= 1e-15 {
                exact = Some((k, h, c));
                break;
            }
            if c.x < x {
                (k_lo, h_lo, lo) = (k, h, c);
            } else {
                (k_hi, h_hi, hi) = (k, h, c);
            }
        }
        let converged = lo.x <= x + 1e-12 && hi.x >= x - 1e-12;
        let bound = (h_lo - k_lo * x).min(h_hi - k_hi * x);
        if let Some((k, h, c)) = exact {
            let y = c.y;
            return Ok(DualSolution {
                parts: alloc::vec![(1.0, c)],
                x,
                y,
                bound: bound.min(h - k * x),
                kappa: k,
                converged: true,
            });
        }
        let kappa = 0.5 * (k_lo + k_hi);
        let parts = self.recover(x, lo, hi);
        let y = parts.iter().map(|(r, c)| r * c.y).sum();
        let xs = parts.iter().map(|(r, c)| r * c.x).sum();
        Ok(DualSolution { parts, x: xs, y, bound, kappa, converged })
    }

    fn recover(&self, x: f64, lo: Candidate, mut hi: Candidate) -> Vec<(f64, Candidate)> {
        if (hi.x - lo.x).abs() < 1e-15 {
            let pick = if hi.y > lo.y { hi } else { lo };
            return alloc::vec![(1.0, pick)];
        }
        let r = ((x - lo.x) / (hi.x - lo.x)).clamp(0.0, 1.0);
        let mixed_y = lo.y + r * (hi.y - lo.y);
        if lo.comp == hi.comp {
            if lo.lam.dot(&hi.lam) < 0.0 {
                hi.lam.neg_mut();
            }
            if let Some(single) = self.arc_point(x, &lo, &hi) {
                if single.y >= mixed_y - 1e-11 {
                    return alloc::vec![(1.0, single)];
                }
            }
        }
        if r <= 1e-14 {
            return alloc::vec![(1.0, lo)];
        }
        if r >= 1.0 - 1e-14 {
            return alloc::vec![(1.0, hi)];
        }
        let mut parts = alloc::vec![(1.0 - r, lo), (r, hi)];
        parts.sort_by(|p, q| q.0.partial_cmp(&p.0).unwrap_or(core::cmp::Ordering::Equal));
        parts
    }

    /// Point on the normalised segment between two amplitude vectors of the
    /// same component whose `omega_A` equals `x`.
    fn arc_point(&self, x: f64, lo: &Candidate, hi: &Candidate) -> Option<Candidate> {
        let at = |t: f64| {
            let v = &lo.lam * (1.0 - t) + &hi.lam * t;
            let n = v.norm();
            (n > 1e-12).then(|| self.evaluate(lo.comp, v / n))
        };
        let (mut a, mut b) = (0.0, 1.0);
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            let c = at(m)?;
            if c.x < x {
                a = m;
            } else {
                b = m;
            }
        }
        let mut c = at(0.5 * (a + b))?;
        fix_sign(&mut c.lam);
        Some(c)
    }

    /// Penalised coordinate descent from a random start. Returns the final
    /// `(omega_A, omega_B)`.
    fn primal_restart<R: Rng>(&self, x: f64, cfg: &OptimizerConfig, rng: &mut R) -> (f64, f64) {
        let mut state = PrimalState::random(&self.a, &self.b, rng);
        let mut rho = cfg.penalty_initial;
        for _ in 0..3 {
            let objective = |(px, py): (f64, f64)| py - rho * (px - x) * (px - x);
            let mut best = objective(state.mixture());
            let mut step = 0.25;
            let mut sweeps = 0;
            while step > 1e-7 && sweeps < cfg.max_iters {
                sweeps += 1;
                let mut improved = false;
                for i in 0..state.len() {
                    for s in [step, -step] {
                        let undo = state.shift(i, s);
                        let f = objective(state.mixture());
                        if f > best {
                            best = f;
                            improved = true;
                            break;
                        }
                        state.restore(undo);
                    }
                }
                if !improved {
                    step *= 0.5;
                }
            }
            rho *= 2.0;
        }
        state.mixture()
    }
}

/// Unnormalised amplitudes plus a softmax logit per component, with cached
/// per-component `(omega_A, omega_B)`.
struct PrimalState<'a> {
    a: &'a [DMatrix<f64>],
    b: &'a [DMatrix<f64>],
    lam: Vec<Vec<f64>>,
    logits: Vec<f64>,
    pts: Vec<(f64, f64)>,
    /// Flat coordinate index -> (component, slot); slot == dim means the logit.
    coords: Vec<(usize, usize)>,
}

enum Undo {
    Amp(usize, usize, f64, (f64, f64)),
    Logit(usize, f64),
}

impl<'a> PrimalState<'a> {
    fn random<R: Rng>(a: &'a [DMatrix<f64>], b: &'a [DMatrix<f64>], rng: &mut R) -> Self {
        let mut lam = Vec::with_capacity(a.len());
        let mut logits = Vec::with_capacity(a.len());
        let mut coords = Vec::new();
        for (c, m) in a.iter().enumerate() {
            lam.push(unit_vector(rng, m.nrows()));
            logits.push(crate::rng::gaussian(rng));
            coords.extend((0..=m.nrows()).map(|k| (c, k)));
        }
        let mut state = PrimalState { a, b, lam, logits, pts: Vec::new(), coords };
        state.pts = (0..a.len()).map(|c| state.point(c)).collect();
        state
    }

    fn len(&self) -> usize {
        self.coords.len()
    }

    fn point(&self, c: usize) -> (f64, f64) {
        let v = &self.lam[c];
        let (a, b) = (&self.a[c], &self.b[c]);
        let (mut qa, mut qb, mut n2) = (0.0, 0.0, 0.0);
        for i in 0..v.len() {
            n2 += v[i] * v[i];
            for j in 0..v.len() {
                qa += v[i] * a[(i, j)] * v[j];
                qb += v[i] * b[(i, j)] * v[j];
            }
        }
        let n2 = n2.max(1e-300);
        (qa / n2, qb / n2)
    }

    fn shift(&mut self, i: usize, s: f64) -> Undo {
        let (c, k) = self.coords[i];
        if k == self.lam[c].len() {
            self.logits[c] += s;
            Undo::Logit(c, s)
        } else {
            let old = self.pts[c];
            self.lam[c][k] += s;
            self.pts[c] = self.point(c);
            Undo::Amp(c, k, s, old)
        }
    }

    fn restore(&mut self, undo: Undo) {
        match undo {
            Undo::Logit(c, s) => self.logits[c] -= s,
            Undo::Amp(c, k, s, old) => {
                self.lam[c][k] -= s;
                self.pts[c] = old;
            }
        }
    }

    fn mixture(&self) -> (f64, f64) {
        let zmax = self.logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let (mut total, mut px, mut py) = (0.0, 0.0, 0.0);
        for (z, (a, b)) in self.logits.iter().zip(&self.pts) {
            let w = (z - zmax).exp();
            total += w;
            px += w * a;
            py += w * b;
        }
        (px / total, py / total)
    }
}

fn machine_from(model: &ProblemModel, parts: &[(f64, Candidate)]) -> Result<CloningMachine> {
    let problem = model.problem;
    let comps = parts
        .iter()
        .map(|(r, c)| {
            let label = model.components[c.comp].label;
            let lam: Vec<f64> = c.lam.iter().copied().collect();
            Ok((*r, MapComponent::new(&problem, label, lam)?))
        })
        .collect::<Result<Vec<_>>>()?;
    CloningMachine::new(problem, comps)
}

fn target_omega(problem: &CloningProblem, model: &ProblemModel, f_a: f64) -> Result<f64> {
    let (lo, hi) = omega_a_range(model);
    let f_lo = 1.0 / f64::from(problem.d);
    let f_hi = model.f_a(hi);
    if f_a < f_lo - 1e-9 || f_a > f_hi + 1e-9 {
        return Err(Error::Infeasible { target: f_a, lo: f_lo, hi: f_hi });
    }
    let x = omega_from_fidelity(f_a, problem.n, problem.m_a, problem.d);
    Ok(x.clamp(lo, hi))
}

fn solve_point(model: &ProblemModel, f_a: f64, cfg: &OptimizerConfig) -> Result<TradeoffPoint> {
    let problem = model.problem;
    let solver = DualSolver::new(model);
    if problem.m_b == 0 {
        let (_, hi) = omega_a_range(model);
        let cand = solver.endpoint(hi).expect("range endpoint is attained");
        let f = model.f_a(cand.x);
        return Ok(TradeoffPoint {
            f_a: f,
            f_b: None,
            machine: machine_from(model, &[(1.0, cand)])?,
            converged: true,
            restarts_used: 0,
            kkt_residual: 0.0,
            relaxed: false,
        });
    }
    let x = target_omega(&problem, model, f_a)?;
    let sol = solver.solve(x)?;

    let mut converged = sol.converged;
    if sol.kappa.is_finite() {
        let mut rng = seeded(cfg.seed);
        for _ in 0..cfg.restarts {
            let (px, py) = solver.primal_restart(x, cfg, &mut rng);
            // Weak duality: py <= H(kappa) - kappa px for every kappa.
            let bound = sol.bound + sol.kappa * (x - px);
            if py > bound + PRIMAL_SLACK.max(cfg.tol) {
                converged = false;
            }
        }
    }
    let to_f = |w: f64| fidelity_from_omega(w, problem.n, problem.m_b, problem.d);
    let f_b = to_f(sol.y);
    let residual = (to_f(sol.bound) - f_b).max(0.0);
    Ok(TradeoffPoint {
        f_a: model.f_a(sol.x),
        f_b: Some(f_b),
        machine: machine_from(model, &sol.parts)?,
        converged,
        restarts_used: cfg.restarts,
        kkt_residual: residual,
        relaxed: false,
    })
}

/// Best machine with `F_A` equal to the target.
pub fn maximize_fb_given_fa(
    problem: &CloningProblem,
    f_a_target: f64,
    config: &OptimizerConfig,
) -> Result<TradeoffPoint> {
    let model = ProblemModel::new(*problem)?;
    solve_point(&model, f_a_target, config)
}

/// Solver bound to one problem, for evaluating many targets.
pub struct TradeoffSolver {
    model: ProblemModel,
}

impl TradeoffSolver {
    pub fn new(problem: &CloningProblem) -> Result<Self> {
        Ok(TradeoffSolver { model: ProblemModel::new(*problem)? })
    }

    pub fn problem(&self) -> &CloningProblem {
        &self.model.problem
    }

    pub fn model(&self) -> &ProblemModel {
        &self.model
    }

    /// Point `index` of a grid, with its seed derived from the config seed.
    pub fn solve(&self, f_a: f64, index: usize, config: &OptimizerConfig) -> Result<TradeoffPoint> {
        let cfg = OptimizerConfig { seed: derive_seed(config.seed, index as u64), ..*config };
        solve_point(&self.model, f_a, &cfg)
    }
}

/// Makes `F_B` non-increasing in `F_A` by carrying better machines from
/// larger `F_A` down the grid.
pub fn enforce_monotone(points: &mut [TradeoffPoint]) {
    for i in (0..points.len().saturating_sub(1)).rev() {
        let (head, tail) = points.split_at_mut(i + 1);
        let (cur, next) = (&mut head[i], &tail[0]);
        if let (Some(a), Some(b)) = (cur.f_b, next.f_b) {
            if a < b {
                cur.f_b = Some(b);
                cur.machine = next.machine.clone();
                cur.relaxed = true;
            }
        }
    }
}

/// Frontier over a grid of `F_A` targets. A problem with `M_B = 0` yields
/// the single symmetric point.
pub fn frontier(problem: &CloningProblem, grid: GridSpec, config: &OptimizerConfig) -> Result<Frontier> {
    let solver = TradeoffSolver::new(problem)?;
    if problem.m_b == 0 {
        let p = solver.solve(grid.f_a_max, 0, config)?;
        return Ok(Frontier { problem: *problem, grid, points: alloc::vec![p] });
    }
    let mut points =
        grid.values().into_iter().enumerate().map(|(i, f)| solver.solve(f, i, config)).collect::<Result<Vec<_>>>()?;
    enforce_monotone(&mut points);
    Ok(Frontier { problem: *problem, grid, points })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::machine_fidelities;

    #[test]
    fn one_to_one_plus_one_endpoints() {
        let p = CloningProblem::qubits(1, 1, 1).unwrap();
        let cfg = OptimizerConfig::default();
        let top = maximize_fb_given_fa(&p, 1.0, &cfg).unwrap();
        assert!((top.f_b.unwrap() - 0.5).abs() < 1e-12);
        let sym = maximize_fb_given_fa(&p, 5.0 / 6.0, &cfg).unwrap();
        assert!((sym.f_b.unwrap() - 5.0 / 6.0).abs() < 1e-9, "{sym:?}");
        assert!(sym.converged);
        let f = machine_fidelities(&sym.machine).unwrap();
        assert!((f.f_a - 5.0 / 6.0).abs() < 1e-9);
    }

    #[test]
    fn infeasible_target() {
        let p = CloningProblem::qubits(1, 2, 1).unwrap();
        let cfg = OptimizerConfig::default();
        assert!(maximize_fb_given_fa(&p, 0.9, &cfg).is_err());
    }
}

//! The projector family `V = sum_g c_g E_g`, where `E_g` projects onto the
//! spin-`g` block of `Sym^{M_A} (x) Sym^{M_B}`, acting as
//! `rho^{(x)N} -> V (rho^{(x)N} (x) 1) V` on `M` qubits.

use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use nalgebra::DMatrix;

use super::{max_quadratic_with_floor, TradeoffPoint};
use crate::engine::CloningProblem;
use crate::error::{Error, Result};
use crate::repr::{cg_coefficient, clebsch_gordan_series, Spin};

const MAX_QUBITS: u32 = 10;

/// Comparison of one frontier point with the projector family.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConjectureReport {
    pub f_a: f64,
    pub optimum_f_b: f64,
    /// Best `F_B` within the family subject to `F_A >= f_a`.
    pub family_f_b: f64,
    pub gap: f64,
}

/// Fidelity forms of the family in whitened coordinates: with `|u| = 1`,
/// `F_A = u^T a u` and `F_B = u^T b u`.
#[derive(Clone, Debug)]
pub struct ProjectorFamily {
    pub spins: Vec<Spin>,
    pub a: DMatrix<f64>,
    pub b: DMatrix<f64>,
}

impl ProjectorFamily {
    /// Largest `F_B` with `F_A >= f_a`, or `None` if no member reaches `f_a`.
    pub fn best_f_b(&self, f_a: f64) -> Option<f64> {
        max_quadratic_with_floor(&self.a, &self.b, f_a)
    }
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * f64::from(n - i) / f64::from(i + 1))
}

/// Dicke state of `g` qubits with `k` excitations (`|1>` is spin down), so
/// spin `g/2` and magnetic index `g/2 - k`.
fn dicke(g: u32, k: u32) -> Vec<f64> {
    let amp = 1.0 / binomial(g, k).sqrt();
    (0..1usize << g).map(|i| if i.count_ones() == k { amp } else { 0.0 }).collect()
}

/// Builds the family for a qubit problem with `M_B >= 1`. The input copies
/// sit on the first `N` qubits and group A precedes group B.
pub fn conjecture_family_frontier(problem: &CloningProblem) -> Result<ProjectorFamily> {
    if problem.d != 2 {
        return Err(Error::Domain("projector family is built for qubits"));
    }
    if problem.m_b == 0 {
        return Err(Error::Domain("projector family needs two clone groups"));
    }
    let (ma, mb, n) = (problem.m_a, problem.m_b, problem.n);
    let m = ma + mb;
    if m > MAX_QUBITS {
        return Err(Error::Domain("too many output qubits for the projector family"));
    }
    let dim_b = 1usize << mb;
    let full = 1usize << m;
    let free = 1usize << (m - n);
    let (ja, jb) = (Spin::from_twice(ma), Spin::from_twice(mb));
    let da: Vec<Vec<f64>> = (0..=ma).map(|k| dicke(ma, k)).collect();
    let db: Vec<Vec<f64>> = (0..=mb).map(|k| dicke(mb, k)).collect();

    // G_g = E_g restricted to columns whose first N qubits are |0>.
    let mut blocks: Vec<(Spin, DMatrix<f64>)> = Vec::new();
    for g in clebsch_gordan_series(ja, jb) {
        let mut e_cols = DMatrix::zeros(full, free);
        for mu in g.magnetic_indices() {
            let mut psi = alloc::vec![0.0; full];
            for ka in 0..=ma {
                let m1 = ma as i32 - 2 * ka as i32;
                let m2 = mu.twice() - m1;
                if m2.unsigned_abs() > mb || (mb as i32 - m2) % 2 != 0 {
                    continue;
                }
                let kb = ((mb as i32 - m2) / 2) as usize;
                let c = cg_coefficient(ja, m1, jb, m2, g, mu.twice())?;
                if c == 0.0 {
                    continue;
                }
                for (ia, va) in da[ka as usize].iter().enumerate().filter(|(_, v)| **v != 0.0) {
                    for (ib, vb) in db[kb].iter().enumerate().filter(|(_, v)| **v != 0.0) {
                        psi[ia * dim_b + ib] += c * va * vb;
                    }
                }
            }
            for j in 0..free {
                if psi[j] == 0.0 {
                    continue;
                }
                for i in 0..full {
                    e_cols[(i, j)] += psi[i] * psi[j];
                }
            }
        }
        if e_cols.norm_squared() > 1e-12 {
            blocks.push((g, e_cols));
        }
    }

    let k = blocks.len();
    let mut q = Vec::with_capacity(k);
    for (_, g) in &blocks {
        q.push(g.norm_squared());
    }
    let group_form = |clones: core::ops::Range<u32>| {
        let mut p = DMatrix::<f64>::zeros(k, k);
        for clone in clones.clone() {
            let shift = m - 1 - clone;
            for x in 0..k {
                for y in x..k {
                    let (gx, gy) = (&blocks[x].1, &blocks[y].1);
                    let mut s = 0.0f64;
                    for i in (0..full).filter(|i| (i >> shift) & 1 == 0) {
                        for j in 0..free {
                            s += gx[(i, j)] * gy[(i, j)];
                        }
                    }
                    p[(x, y)] += s;
                }
            }
        }
        let count = f64::from(clones.end - clones.start);
        DMatrix::from_fn(k, k, |x, y| {
            let v = if x <= y { p[(x, y)] } else { p[(y, x)] };
            v / count / (q[x] * q[y]).sqrt()
        })
    };
    Ok(ProjectorFamily { spins: blocks.iter().map(|(g, _)| *g).collect(), a: group_form(0..ma), b: group_form(ma..m) })
}

/// Gap between the optimiser's `F_B` at a point and the best family member
/// with at least the same `F_A`.
pub fn verify_conjecture(problem: &CloningProblem, point: &TradeoffPoint) -> Result<ConjectureReport> {
    let family = conjecture_family_frontier(problem)?;
    let optimum = point.f_b.ok_or(Error::Domain("point has no B group"))?;
    let family_f_b = family.best_f_b(point.f_a).ok_or(Error::Domain("projector family cannot reach this F_A"))?;
    Ok(ConjectureReport { f_a: point.f_a, optimum_f_b: optimum, family_f_b, gap: optimum - family_f_b })
}

//! Verification suites behind `qclone verify`.

use qclone_core::closed_form::{fid_measurement_limit, fid_n_to_n_plus_1, fid_symmetric, CurveParam};
use qclone_core::engine::CloningProblem;
use qclone_core::intertwiner::{ComponentLabels, CouplingBases};
use qclone_core::optical::{filip_scheme, three_way_scheme, FilipConfig};
use qclone_core::optimizer::{
    frontier, maximize_three_way, verify_conjecture, GridSpec, OptimizerConfig, TradeoffSolver,
};
use qclone_core::oracle::{cg_racah_formula, oracle_frontier, oracle_symmetric, CgTable, OracleConfig};
use qclone_core::repr::{cg_coefficient, clebsch_gordan_series, Spin};
use rayon::prelude::*;

use crate::args::Suite;
use crate::commands::CliError;
use crate::table::{num, Table};

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub suite: &'static str,
    pub name: String,
    pub value: f64,
    pub expected: f64,
    pub tol: f64,
}

impl Check {
    fn new(suite: &'static str, name: impl Into<String>, value: f64, expected: f64, tol: f64) -> Self {
        Check { suite, name: name.into(), value, expected, tol }
    }

    pub fn passed(&self) -> bool {
        (self.value - self.expected).abs() <= self.tol
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn table(&self) -> Table {
        let mut t = Table::new(["suite", "check", "value", "expected", "tolerance", "status"]);
        for c in &self.checks {
            t.push(vec![
                c.suite.into(),
                c.name.clone(),
                num(c.value),
                num(c.expected),
                num(c.tol),
                if c.passed() { "pass" } else { "FAIL" }.into(),
            ]);
        }
        t
    }
}

fn failure(e: qclone_core::Error) -> CliError {
    CliError::Failure(e.to_string())
}

pub fn run(suite: Suite, max_dim: usize, seed: u64) -> Result<Report, CliError> {
    if max_dim == 0 {
        return Err(CliError::Usage("--max-dim must be positive".into()));
    }
    let mut checks = Vec::new();
    if matches!(suite, Suite::Reference | Suite::All) {
        checks.extend(reference_values(seed)?);
    }
    if matches!(suite, Suite::Cg | Suite::All) {
        checks.extend(cg());
    }
    if matches!(suite, Suite::Conjecture | Suite::All) {
        checks.extend(conjecture(seed)?);
    }
    if matches!(suite, Suite::Oracle | Suite::All) {
        checks.extend(oracle(max_dim, seed)?);
    }
    Ok(Report { checks })
}

const SMALL_PROBLEMS: [(u32, u32, u32); 3] = [(1, 1, 1), (1, 1, 2), (2, 2, 1)];

fn reference_values(seed: u64) -> Result<Vec<Check>, CliError> {
    const S: &str = "paper-values";
    let mut out = Vec::new();
    for (n, m, want) in [(1, 2, 5.0 / 6.0), (2, 3, 11.0 / 12.0), (1, 3, 7.0 / 9.0)] {
        out.push(Check::new(S, format!("symmetric {n}->{m}"), fid_symmetric(n, m).map_err(failure)?, want, 1e-12));
    }
    let cfg = OptimizerConfig { seed, ..Default::default() };
    let at = |n, a, b, f_a: f64| -> Result<f64, CliError> {
        let problem = CloningProblem::qubits(n, a, b).map_err(failure)?;
        let p = TradeoffSolver::new(&problem).map_err(failure)?.solve(f_a, 0, &cfg).map_err(failure)?;
        Ok(p.f_b.unwrap_or(f64::NAN))
    };
    out.push(Check::new(S, "1->1+1 F_B at F_A=1", at(1, 1, 1, 1.0)?, 0.5, 1e-7));
    out.push(Check::new(S, "1->1+1 F_B at F_A=5/6", at(1, 1, 1, 5.0 / 6.0)?, 5.0 / 6.0, 1e-7));
    for n in 1..=3u32 {
        let nf = f64::from(n);
        let sym = (nf * nf + 3.0 * nf + 1.0) / (nf * nf + 3.0 * nf + 2.0);
        let x = (nf / (2.0 * (nf + 1.0))).sqrt();
        let (f1, f2) = fid_n_to_n_plus_1(n, CurveParam::from_x(x).map_err(failure)?).map_err(failure)?;
        out.push(Check::new(S, format!("{n}->{n}+1 symmetric point, first group"), f1, sym, 1e-9));
        out.push(Check::new(S, format!("{n}->{n}+1 symmetric point, last clone"), f2, sym, 1e-9));
    }
    for n in 2..=5u32 {
        let nf = f64::from(n);
        let f_a = (2.0 * nf + 1.0) / (3.0 * (nf + 1.0));
        out.push(Check::new(
            S,
            format!("1->1+{n} optimal-B point"),
            at(1, 1, n, f_a)?,
            (2.0 * nf + 1.0) / (3.0 * nf),
            1e-9,
        ));
    }
    let (fa, fb) = fid_measurement_limit(std::f64::consts::FRAC_1_SQRT_2).map_err(failure)?;
    out.push(Check::new(S, "measurement limit F_A", fa, 2.0 / 3.0, 1e-12));
    out.push(Check::new(S, "measurement limit F_meas", fb, 2.0 / 3.0, 1e-12));

    let half = Spin::from_twice(1);
    let bases = CouplingBases::new(ComponentLabels::new(half, half, half, half)).map_err(failure)?;
    out.push(Check::new(S, "tr W_1^T V_0", bases.overlaps[(1, 0)], 3f64.sqrt(), 1e-12));
    out.push(Check::new(S, "tr W_1^T V_1", bases.overlaps[(1, 1)], -1.0, 1e-12));
    for t in 1..=8u32 {
        let s = f64::from(t) / 2.0;
        let sp = Spin::from_twice(t);
        let o = CouplingBases::new(ComponentLabels::new(half, sp, sp, half)).map_err(failure)?.overlaps;
        let first = 2.0 * (s / (2.0 * (s + 0.5))).sqrt();
        let second = (2.0 * (s + 1.0) / (s + 0.5)).sqrt();
        out.push(Check::new(S, format!("s={s} tr W(s-1/2)^T V(0)"), o[(0, 0)], first, 1e-12));
        out.push(Check::new(S, format!("s={s} tr W(s+1/2)^T V(1)"), o[(1, 1)], -first, 1e-12));
        out.push(Check::new(S, format!("s={s} tr W(s-1/2)^T V(1)"), o[(0, 1)], second, 1e-12));
        out.push(Check::new(S, format!("s={s} tr W(s+1/2)^T V(0)"), o[(1, 0)], second, 1e-12));
    }

    let sim = |n, a, b, t| -> Result<Vec<f64>, CliError> {
        filip_scheme(n, a, b, t, &FilipConfig::default())
            .map_err(failure)?
            .fidelities
            .ok_or_else(|| CliError::Failure("post-selection failed".into()))
    };
    let f = sim(1, 2, 1, 2.0 / 3.0)?;
    out.push(Check::new(S, "optics 1->2+1 T=2/3 pair", f[0], 5.0 / 6.0, 1e-9));
    out.push(Check::new(S, "optics 1->2+1 T=2/3 single", f[1], 5.0 / 9.0, 1e-9));
    let f = sim(1, 1, 2, 0.5)?;
    out.push(Check::new(S, "optics 1->1+2 T=1/2 single", f[0], 1.0, 1e-9));
    out.push(Check::new(S, "optics 1->1+2 T=1/2 pair", f[1], 0.5, 1e-9));
    let f = sim(1, 1, 2, 1.0)?;
    out.push(Check::new(S, "optics 1->1+2 T=1", f[0], 7.0 / 9.0, 1e-9));
    let f = sim(2, 2, 1, 1.0)?;
    out.push(Check::new(S, "optics 2->2+1 T=1", f[1], 11.0 / 12.0, 1e-9));
    for ((t1, t2), want) in [((1.0, 1.0), [7.0 / 9.0; 3]), ((0.5, 1.0), [1.0, 0.5, 0.5])] {
        let f = three_way_scheme(t1, t2).map_err(failure)?.fidelities.unwrap_or_default();
        for (i, w) in want.iter().enumerate() {
            let v = f.get(i).copied().unwrap_or(f64::NAN);
            out.push(Check::new(S, format!("three-way T1={t1} T2={t2} clone {i}"), v, *w, 1e-9));
        }
    }
    let p = maximize_three_way([1.0, 1.0, 1.0]).map_err(failure)?;
    out.push(Check::new(S, "1->1+1+1 equal weights r_1", p.r[1], 1.0, 1e-4));
    out.push(Check::new(S, "1->1+1+1 equal weights F", p.fidelities[0], 7.0 / 9.0, 1e-9));
    Ok(out)
}

fn cg() -> Vec<Check> {
    let (mut diff, mut diff_formula) = (0.0f64, 0.0f64);
    for t1 in 0..=6u32 {
        for t2 in 0..=6u32 {
            let (j1, j2) = (Spin::from_twice(t1), Spin::from_twice(t2));
            let table = CgTable::new(j1, j2);
            for big in clebsch_gordan_series(j1, j2) {
                for m1 in j1.magnetic_indices() {
                    for m2 in j2.magnetic_indices() {
                        let mm = m1.twice() + m2.twice();
                        if mm.unsigned_abs() > big.twice() {
                            continue;
                        }
                        let core = cg_coefficient(j1, m1.twice(), j2, m2.twice(), big, mm).unwrap_or(f64::NAN);
                        let ladder = table.get(m1.twice(), m2.twice(), big, mm).unwrap_or(f64::NAN);
                        let wrapped = cg_racah_formula(j1, m1.twice(), j2, m2.twice(), big, mm).unwrap_or(f64::NAN);
                        diff = diff.max((core - ladder).abs()).max(if core.is_nan() || ladder.is_nan() {
                            1.0
                        } else {
                            0.0
                        });
                        diff_formula = diff_formula.max((core - wrapped).abs());
                    }
                }
            }
        }
    }
    vec![
        Check::new("cg", "max |racah sum - ladder table|, j <= 3", diff, 0.0, 1e-12),
        Check::new("cg", "max |racah sum - single-call ladder|, j <= 3", diff_formula, 0.0, 1e-12),
    ]
}

fn conjecture(seed: u64) -> Result<Vec<Check>, CliError> {
    let cfg = OptimizerConfig { seed, ..Default::default() };
    SMALL_PROBLEMS
        .par_iter()
        .map(|&(n, a, b)| {
            let problem = CloningProblem::qubits(n, a, b).map_err(failure)?;
            let fr = frontier(&problem, GridSpec::full(&problem, 11).map_err(failure)?, &cfg).map_err(failure)?;
            let mut worst = 0.0f64;
            for p in &fr.points {
                worst = worst.max(verify_conjecture(&problem, p).map_err(failure)?.gap.abs());
            }
            Ok(Check::new("conjecture", format!("({n},{a},{b}) max |gap|"), worst, 0.0, 1e-6))
        })
        .collect()
}

fn oracle(max_dim: usize, seed: u64) -> Result<Vec<Check>, CliError> {
    let cfg = OracleConfig { max_dim, seed, ..Default::default() };
    let opt = OptimizerConfig { seed, ..Default::default() };
    let mut out: Vec<Check> = SMALL_PROBLEMS
        .par_iter()
        .map(|&(n, a, b)| {
            let problem = CloningProblem::qubits(n, a, b).map_err(failure)?;
            let grid = GridSpec::full(&problem, 11).map_err(failure)?;
            let brute = oracle_frontier(&problem, grid, &cfg).map_err(failure)?;
            let exact = frontier(&problem, grid, &opt).map_err(failure)?;
            let worst = brute
                .f_b
                .iter()
                .zip(&exact.points)
                .map(|(o, p)| o.map_or(f64::INFINITY, |o| (o - p.f_b.unwrap_or(f64::NAN)).abs()))
                .fold(0.0, f64::max);
            Ok(Check::new("oracle", format!("({n},{a},{b}) max |oracle - optimiser|"), worst, 0.0, 2e-4))
        })
        .collect::<Result<_, CliError>>()?;
    for (n, m, want) in [(1, 2, 5.0 / 6.0), (2, 3, 11.0 / 12.0), (1, 3, 7.0 / 9.0)] {
        let got = oracle_symmetric(n, m, 2, &cfg).map_err(failure)?;
        out.push(Check::new("oracle", format!("symmetric {n}->{m}"), got, want, 1e-4));
    }
    Ok(out)
}

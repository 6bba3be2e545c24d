use std::fmt;

use qclone_core::closed_form::{
    fid_1_to_1_plus_n, fid_1to11_qubit, fid_measurement_limit, fid_n_to_n_plus_1, fid_qudit_1to11, fid_symmetric,
    CurveParam,
};
use qclone_core::engine::CloningProblem;
use qclone_core::optical::{filip_scheme, optical_formula, three_way_scheme, FilipConfig};
use qclone_core::optimizer::{enforce_monotone, GridSpec, OptimizerConfig, TradeoffPoint, TradeoffSolver};
use qclone_core::Error;
use rayon::prelude::*;

use crate::args::{CgTableArgs, Cli, ClosedFormArgs, Command, Family, OpticalArgs, TradeoffArgs};
use crate::table::{emit, num, opt_num, Table};
use crate::verify;

#[derive(Debug)]
pub enum CliError {
    /// Bad arguments or an invalid problem; exit status 2.
    Usage(String),
    /// Anything that went wrong after validation; exit status 1.
    Failure(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Failure(m) => write!(f, "{m}"),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Failure(format!("io error: {e}"))
    }
}

fn usage(e: Error) -> CliError {
    CliError::Usage(e.to_string())
}

/// Executes a parsed command line. `Ok(false)` means a verification suite
/// ran to completion with failures.
pub fn run(cli: &Cli) -> Result<bool, CliError> {
    let (table, passed) = match &cli.command {
        Command::Tradeoff(a) => (tradeoff(a, cli.seed)?, true),
        Command::ClosedForm(a) => (closed_form(a)?, true),
        Command::Optical(a) => (optical(a)?, true),
        Command::Verify(a) => {
            let report = verify::run(a.suite, a.max_dim, cli.seed)?;
            let passed = report.passed();
            (report.table(), passed)
        }
        Command::CgTable(a) => (cg_table(a), true),
    };
    emit(&table, cli.format, cli.out.as_deref())?;
    Ok(passed)
}

fn describe(p: &TradeoffPoint) -> (String, String, String) {
    let comps = &p.machine.components;
    let labels = comps.iter().map(|(_, c)| c.label.to_string()).collect::<Vec<_>>().join(";");
    let r = comps.iter().map(|(r, _)| num(*r)).collect::<Vec<_>>().join(";");
    let lambdas = comps
        .iter()
        .map(|(_, c)| c.lambdas.iter().map(|&l| num(l)).collect::<Vec<_>>().join(" "))
        .collect::<Vec<_>>()
        .join(";");
    (labels, r, lambdas)
}

pub fn tradeoff(args: &TradeoffArgs, seed: u64) -> Result<Table, CliError> {
    let problem = CloningProblem::new(args.n, args.m_a, args.m_b, args.d).map_err(usage)?;
    if args.m_b > 0 && args.grid < 2 {
        return Err(CliError::Usage("--grid must be at least 2".into()));
    }
    let solver = TradeoffSolver::new(&problem).map_err(usage)?;
    let grid = GridSpec::full(&problem, args.grid.max(2)).map_err(usage)?;
    let f_sym = fid_symmetric(args.n, args.m_a + args.m_b).map_err(usage)?;
    let cfg = OptimizerConfig { restarts: args.restarts, seed, ..Default::default() };

    let mut points = if args.m_b == 0 {
        vec![solver.solve(grid.f_a_max, 0, &cfg).map_err(usage)?]
    } else {
        let values = grid.values();
        let solved: Result<Vec<_>, _> = values.par_iter().enumerate().map(|(i, &f)| solver.solve(f, i, &cfg)).collect();
        solved.map_err(|e| CliError::Failure(e.to_string()))?
    };
    enforce_monotone(&mut points);
    let nearest = points
        .iter()
        .enumerate()
        .min_by(|(_, p), (_, q)| (p.f_a - f_sym).abs().total_cmp(&(q.f_a - f_sym).abs()))
        .map(|(i, _)| i);
    let half_step =
        if args.m_b == 0 { f64::INFINITY } else { (grid.f_a_max - grid.f_a_min) / (args.grid - 1) as f64 / 2.0 };

    let mut t = Table::new([
        "N",
        "M_A",
        "M_B",
        "d",
        "seed",
        "index",
        "F_A",
        "F_B",
        "symmetric",
        "converged",
        "relaxed",
        "kkt_residual",
        "components",
        "r",
        "lambdas",
    ]);
    for (i, p) in points.iter().enumerate() {
        let symmetric = Some(i) == nearest && (p.f_a - f_sym).abs() <= half_step + 1e-12;
        let (labels, r, lambdas) = describe(p);
        t.push(vec![
            args.n.to_string(),
            args.m_a.to_string(),
            args.m_b.to_string(),
            args.d.to_string(),
            seed.to_string(),
            i.to_string(),
            num(p.f_a),
            opt_num(p.f_b),
            u8::from(symmetric).to_string(),
            u8::from(p.converged).to_string(),
            u8::from(p.relaxed).to_string(),
            num(p.kkt_residual),
            labels,
            r,
            lambdas,
        ]);
    }
    Ok(t)
}

fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    (0..count).map(|i| if i + 1 == count { hi } else { lo + (hi - lo) * i as f64 / (count - 1) as f64 }).collect()
}

pub fn closed_form(args: &ClosedFormArgs) -> Result<Table, CliError> {
    if args.grid < 2 {
        return Err(CliError::Usage("--grid must be at least 2".into()));
    }
    let n = args.n;
    let d = args.d;
    let (name, param, values): (&str, &str, Vec<(f64, f64, f64)>) = match args.family {
        Family::NToNPlus1 => {
            if n == 0 {
                return Err(CliError::Usage("--n must be at least 1".into()));
            }
            let nf = f64::from(n);
            let x_max = ((nf + 2.0) / (2.0 * (nf + 1.0))).sqrt();
            let rows = linspace(0.0, x_max, args.grid)
                .into_iter()
                .map(|x| fid_n_to_n_plus_1(n, CurveParam::from_x(x)?).map(|(a, b)| (x, a, b)))
                .collect::<Result<_, _>>()
                .map_err(usage)?;
            ("n-to-n+1", "x", rows)
        }
        Family::OneToOnePlusN => {
            if n == 0 {
                return Err(CliError::Usage("--n must be at least 1".into()));
            }
            // past the optimal-B point both fidelities fall
            let nf = f64::from(n);
            let y_max = (0.5 * (core::f64::consts::PI - (nf * (nf + 2.0)).sqrt().atan())).sin();
            let rows = linspace(0.0, y_max, args.grid)
                .into_iter()
                .map(|y| fid_1_to_1_plus_n(n, CurveParam::from_y(y)?).map(|(a, b)| (y, a, b)))
                .collect::<Result<_, _>>()
                .map_err(usage)?;
            ("1-to-1+n", "y", rows)
        }
        Family::MeasurementLimit => {
            let rows = linspace(0.0, std::f64::consts::FRAC_1_SQRT_2, args.grid)
                .into_iter()
                .map(|y| fid_measurement_limit(y).map(|(a, b)| (y, a, b)))
                .collect::<Result<_, _>>()
                .map_err(usage)?;
            ("measurement-limit", "y", rows)
        }
        Family::Qubit1to11 => {
            let rows = linspace(0.0, 1.0, args.grid)
                .into_iter()
                .map(|l| fid_1to11_qubit(l).map(|(a, b)| (l, a, b)))
                .collect::<Result<_, _>>()
                .map_err(usage)?;
            ("qubit-1to11", "lambda_1", rows)
        }
        Family::Qudit1to11 => {
            if d < 2 {
                return Err(CliError::Usage("--d must be at least 2".into()));
            }
            let df = f64::from(d);
            let edge = ((df - 1.0) / (df + 1.0)).sqrt().atan();
            let rows = linspace(-edge, edge, args.grid)
                .into_iter()
                .map(|th| {
                    let alpha = (2.0 / (df + 1.0)).sqrt() * th.cos();
                    let beta = (2.0 / (df - 1.0)).sqrt() * th.sin();
                    fid_qudit_1to11(d, alpha, beta).map(|(a, b)| (th, a, b))
                })
                .collect::<Result<_, _>>()
                .map_err(usage)?;
            ("qudit-1to11", "theta", rows)
        }
    };
    let (n, d) = match args.family {
        Family::NToNPlus1 | Family::OneToOnePlusN => (n, 2),
        Family::MeasurementLimit | Family::Qubit1to11 => (1, 2),
        Family::Qudit1to11 => (1, d),
    };
    let mut t = Table::new(["family", "n", "d", "param", "value", "F_A", "F_B"]);
    for (p, a, b) in values {
        t.push(vec![name.into(), n.to_string(), d.to_string(), param.into(), num(p), num(a), num(b)]);
    }
    Ok(t)
}

fn check_t(name: &str, t: f64) -> Result<(), CliError> {
    if t.is_finite() && t > 0.0 && t <= 1.0 {
        Ok(())
    } else {
        Err(CliError::Usage(format!("{name} must lie in (0, 1], got {t}")))
    }
}

pub fn optical(args: &OpticalArgs) -> Result<Table, CliError> {
    if args.three_way {
        let (Some(t1), Some(t2)) = (args.t1, args.t2) else {
            return Err(CliError::Usage("--three-way needs --t1 and --t2".into()));
        };
        check_t("--t1", t1)?;
        check_t("--t2", t2)?;
        let out = three_way_scheme(t1, t2).map_err(usage)?;
        let f = out.fidelities.ok_or_else(|| CliError::Failure("post-selection never succeeds".into()))?;
        let mut t = Table::new(["T1", "T2", "F_A", "F_B", "F_C", "success_prob"]);
        t.push(vec![num(t1), num(t2), num(f[0]), num(f[1]), num(f[2]), num(out.probability)]);
        return Ok(t);
    }
    let (Some(n), Some(m_a), Some(m_b)) = (args.n, args.m_a, args.m_b) else {
        return Err(CliError::Usage("optical needs -N, -a and -b (or --three-way)".into()));
    };
    let ts = match (args.t, args.t_grid) {
        (Some(t), None) => vec![t],
        (None, Some(g)) => g.values(),
        _ => return Err(CliError::Usage("give exactly one of --t and --t-grid".into())),
    };
    for &t in &ts {
        check_t("T", t)?;
    }
    if let Some(s) = args.split {
        if !(s > 0.0 && s < 1.0) {
            return Err(CliError::Usage(format!("--split must lie in (0, 1), got {s}")));
        }
    }
    let cfg = FilipConfig { split: args.split, ..Default::default() };
    filip_scheme(n, m_a, m_b, ts[0], &cfg).map_err(usage)?;

    let rows: Result<Vec<Vec<String>>, CliError> = ts
        .par_iter()
        .map(|&t| {
            let out = filip_scheme(n, m_a, m_b, t, &cfg).map_err(|e| CliError::Failure(e.to_string()))?;
            let sim = out.fidelities.ok_or_else(|| CliError::Failure(format!("post-selection fails at T={t}")))?;
            let (fa, fb, diff) = match optical_formula(n, m_a, m_b, t) {
                Ok((fa, fb)) => (num(fa), num(fb), num((sim[0] - fa).abs().max((sim[1] - fb).abs()))),
                Err(_) => (String::new(), String::new(), String::new()),
            };
            Ok(vec![
                n.to_string(),
                m_a.to_string(),
                m_b.to_string(),
                num(t),
                num(sim[0]),
                num(sim[1]),
                fa,
                fb,
                num(out.probability),
                diff,
            ])
        })
        .collect();
    let mut t = Table::new([
        "N",
        "M_A",
        "M_B",
        "T",
        "F_A_sim",
        "F_B_sim",
        "F_A_formula",
        "F_B_formula",
        "success_prob",
        "max_abs_diff",
    ]);
    for row in rows? {
        t.push(row);
    }
    Ok(t)
}

/// Twice-value magnetic number as `1`, `-1/2`, ...
pub fn half(twice: i32) -> String {
    if twice % 2 == 0 {
        (twice / 2).to_string()
    } else {
        format!("{twice}/2")
    }
}

pub fn cg_table(args: &CgTableArgs) -> Table {
    let (j1, j2) = (args.j1, args.j2);
    let mut t = Table::new(["j1", "m1", "j2", "m2", "J", "M", "coefficient"]);
    for big in qclone_core::repr::clebsch_gordan_series(j1, j2) {
        for mm in big.magnetic_indices() {
            for m1 in j1.magnetic_indices() {
                let m2 = mm.twice() - m1.twice();
                if m2.unsigned_abs() > j2.twice() {
                    continue;
                }
                let c = qclone_core::repr::cg_coefficient(j1, m1.twice(), j2, m2, big, mm.twice())
                    .expect("indices are in range");
                t.push(vec![
                    j1.to_string(),
                    half(m1.twice()),
                    j2.to_string(),
                    half(m2),
                    big.to_string(),
                    half(mm.twice()),
                    num(c),
                ]);
            }
        }
    }
    t
}

use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qclone_core::repr::Spin;

use crate::table::Format;

#[derive(Debug, Parser)]
#[command(
    name = "qclone",
    version,
    about = "Optimal asymmetric quantum cloning: trade-offs, closed forms, optics, checks"
)]
pub struct Cli {
    /// Output file; written atomically. Defaults to stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Optimal F_B for each F_A on a uniform grid.
    Tradeoff(TradeoffArgs),
    /// Evaluate an analytic fidelity family on a parameter grid.
    ClosedForm(ClosedFormArgs),
    /// Simulate the linear-optics cloners and compare with their formulas.
    Optical(OpticalArgs),
    /// Run a verification suite; exit status 1 if any check fails.
    Verify(VerifyArgs),
    /// Clebsch-Gordan coupling table of j1 (x) j2.
    CgTable(CgTableArgs),
}

#[derive(Debug, Args)]
pub struct TradeoffArgs {
    /// Number of input copies.
    #[arg(short = 'N', long = "n")]
    pub n: u32,
    #[arg(short = 'a', long = "m-a")]
    pub m_a: u32,
    #[arg(short = 'b', long = "m-b")]
    pub m_b: u32,
    #[arg(long, default_value_t = 2)]
    pub d: u32,
    /// Number of F_A grid points.
    #[arg(long, default_value_t = 101)]
    pub grid: usize,
    /// Primal restarts per point used to check the dual optimum.
    #[arg(long, default_value_t = 20)]
    pub restarts: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Family {
    #[value(name = "n-to-n+1")]
    NToNPlus1,
    #[value(name = "1-to-1+n")]
    OneToOnePlusN,
    MeasurementLimit,
    #[value(name = "qubit-1to11")]
    Qubit1to11,
    #[value(name = "qudit-1to11")]
    Qudit1to11,
}

#[derive(Debug, Args)]
pub struct ClosedFormArgs {
    #[arg(value_enum)]
    pub family: Family,
    #[arg(long = "n", default_value_t = 1)]
    pub n: u32,
    #[arg(long, default_value_t = 3)]
    pub d: u32,
    #[arg(long, default_value_t = 101)]
    pub grid: usize,
}

/// `start:end:count`, both ends included.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TGrid {
    pub start: f64,
    pub end: f64,
    pub count: usize,
}

impl TGrid {
    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        let step = (self.end - self.start) / (self.count - 1) as f64;
        (0..self.count).map(|i| if i + 1 == self.count { self.end } else { self.start + step * i as f64 }).collect()
    }
}

impl FromStr for TGrid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [start, end, count] = parts.as_slice() else {
            return Err("expected start:end:count".into());
        };
        let start: f64 = start.trim().parse().map_err(|_| format!("bad start '{start}'"))?;
        let end: f64 = end.trim().parse().map_err(|_| format!("bad end '{end}'"))?;
        let count: usize = count.trim().parse().map_err(|_| format!("bad count '{count}'"))?;
        if count == 0 {
            return Err("count must be at least 1".into());
        }
        if count == 1 && start != end {
            return Err("a single-point grid needs start == end".into());
        }
        Ok(TGrid { start, end, count })
    }
}

#[derive(Debug, Args)]
pub struct OpticalArgs {
    #[arg(short = 'N', long = "n")]
    pub n: Option<u32>,
    #[arg(short = 'a', long = "m-a")]
    pub m_a: Option<u32>,
    #[arg(short = 'b', long = "m-b")]
    pub m_b: Option<u32>,
    /// Single transmittivity.
    #[arg(long, conflicts_with = "t_grid")]
    pub t: Option<f64>,
    #[arg(long = "t-grid")]
    pub t_grid: Option<TGrid>,
    /// Transmittivity of the clone splitter; fidelities do not depend on it.
    #[arg(long)]
    pub split: Option<f64>,
    /// The 1 -> 1 + 1 + 1 scheme, driven by --t1 and --t2.
    #[arg(long, conflicts_with_all = ["n", "m_a", "m_b", "t", "t_grid", "split"])]
    pub three_way: bool,
    #[arg(long, requires = "three_way")]
    pub t1: Option<f64>,
    #[arg(long, requires = "three_way")]
    pub t2: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    /// Known fidelities, traces and limits.
    #[value(name = "paper-values")]
    Reference,
    /// Brute-force isometry search against the optimiser.
    Oracle,
    /// Two independent Clebsch-Gordan implementations.
    Cg,
    /// Projector-family conjecture along frontiers.
    Conjecture,
    All,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(value_enum, default_value_t = Suite::Reference)]
    pub suite: Suite,
    /// Largest isometry row count the oracle may use.
    #[arg(long, default_value_t = 512)]
    pub max_dim: usize,
}

#[derive(Debug, Args)]
pub struct CgTableArgs {
    /// First spin, e.g. 1/2, 1 or 1.5.
    pub j1: Spin,
    pub j2: Spin,
}

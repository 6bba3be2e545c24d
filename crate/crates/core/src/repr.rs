//! SU(2) representation theory: spins, Casimir values, Clebsch-Gordan
//! coefficients and tensor-power decompositions.
//!
//! Spins are stored as twice their value so that half-integers stay exact.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;
#[allow(unused_imports)]
use num_traits::Float;

use num_rational::Ratio;

use crate::error::{Error, Result};

/// Largest factorial argument accepted by [`cg_coefficient`].
pub const MAX_FACTORIAL: usize = 40;

/// An SU(2) spin label `j`, held as the integer `2j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Spin(u32);

impl Spin {
    pub const ZERO: Spin = Spin(0);
    pub const HALF: Spin = Spin(1);
    pub const ONE: Spin = Spin(2);

    pub const fn from_twice(twice: u32) -> Self {
        Spin(twice)
    }

    pub const fn integer(j: u32) -> Self {
        Spin(2 * j)
    }

    pub const fn twice(self) -> u32 {
        self.0
    }

    pub fn value(self) -> f64 {
        f64::from(self.0) / 2.0
    }

    /// Dimension `2j + 1` of the irrep.
    pub const fn dim(self) -> usize {
        self.0 as usize + 1
    }

    pub const fn is_integer(self) -> bool {
        self.0.is_multiple_of(2)
    }

    /// Magnetic indices `m = j, j-1, ..., -j` in descending order, which is
    /// the basis order used throughout the crate.
    pub fn magnetic_indices(self) -> impl Iterator<Item = MagneticIndex> + Clone {
        let j = self.0 as i32;
        (0..=self.0).map(move |k| MagneticIndex { spin: self, twice_m: j - 2 * k as i32 })
    }

    /// Casimir eigenvalue `j(j+1)` as an exact rational.
    pub fn casimir(self) -> Ratio<u64> {
        casimir(self)
    }
}

impl fmt::Display for Spin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

impl FromStr for Spin {
    type Err = Error;

    /// Accepts `"3"`, `"3/2"` and decimal forms such as `"1.5"`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse("spin must look like 1, 3/2 or 1.5");
        if let Some((num, den)) = s.split_once('/') {
            let num: u32 = num.trim().parse().map_err(|_| bad())?;
            match den.trim() {
                "1" => Ok(Spin(2 * num)),
                "2" => Ok(Spin(num)),
                _ => Err(bad()),
            }
        } else if let Some((int, frac)) = s.split_once('.') {
            let int: u32 = int.parse().map_err(|_| bad())?;
            match frac.trim_end_matches('0') {
                "" => Ok(Spin(2 * int)),
                "5" => Ok(Spin(2 * int + 1)),
                _ => Err(bad()),
            }
        } else {
            let int: u32 = s.parse().map_err(|_| bad())?;
            Ok(Spin(2 * int))
        }
    }
}

/// A magnetic index `m` attached to its spin, with `|m| <= j` and
/// `j - m` integral.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct MagneticIndex {
    spin: Spin,
    twice_m: i32,
}

impl MagneticIndex {
    pub fn new(spin: Spin, twice_m: i32) -> Result<Self> {
        check_pair(spin, twice_m)?;
        Ok(MagneticIndex { spin, twice_m })
    }

    pub fn spin(self) -> Spin {
        self.spin
    }

    pub fn twice(self) -> i32 {
        self.twice_m
    }

    pub fn value(self) -> f64 {
        f64::from(self.twice_m) / 2.0
    }

    /// Position in the descending basis of the spin's irrep.
    pub fn position(self) -> usize {
        ((self.spin.0 as i32 - self.twice_m) / 2) as usize
    }
}

/// Irreps with multiplicities, ordered by spin.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct IrrepMultiset(BTreeMap<Spin, u64>);

impl IrrepMultiset {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, spin: Spin, multiplicity: u64) {
        if multiplicity > 0 {
            *self.0.entry(spin).or_insert(0) += multiplicity;
        }
    }

    pub fn multiplicity(&self, spin: Spin) -> u64 {
        self.0.get(&spin).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (Spin, u64)> + '_ {
        self.0.iter().map(|(s, m)| (*s, *m))
    }

    pub fn spins(&self) -> impl Iterator<Item = Spin> + '_ {
        self.0.keys().copied()
    }

    /// `sum_j m_j (2j + 1)`.
    pub fn total_dim(&self) -> u64 {
        self.iter().map(|(s, m)| m * s.dim() as u64).sum()
    }
}

fn check_pair(spin: Spin, twice_m: i32) -> Result<()> {
    let j = spin.0 as i32;
    if twice_m.abs() > j || (j - twice_m) % 2 != 0 {
        return Err(Error::Domain("magnetic index incompatible with spin"));
    }
    Ok(())
}

/// `j(j+1)` as an exact rational.
pub fn casimir(j: Spin) -> Ratio<u64> {
    let t = u64::from(j.0);
    Ratio::new(t * (t + 2), 4)
}

/// `j(j+1)` in floating point.
pub fn casimir_f64(j: Spin) -> f64 {
    let t = f64::from(j.0);
    t * (t + 2.0) / 4.0
}

/// Whether `j3` occurs in `j1 (x) j2`.
pub fn triangle(j1: Spin, j2: Spin, j3: Spin) -> bool {
    let (a, b, c) = (j1.0, j2.0, j3.0);
    c <= a + b && c >= a.abs_diff(b) && (a + b + c) % 2 == 0
}

/// Spins appearing in `j1 (x) j2`, ascending: `|j1 - j2|, ..., j1 + j2`.
pub fn clebsch_gordan_series(j1: Spin, j2: Spin) -> Vec<Spin> {
    let lo = j1.0.abs_diff(j2.0);
    (lo..=j1.0 + j2.0).step_by(2).map(Spin).collect()
}

static FACTORIALS: [f64; MAX_FACTORIAL + 1] = factorial_table();

const fn factorial_table() -> [f64; MAX_FACTORIAL + 1] {
    let mut out = [0.0; MAX_FACTORIAL + 1];
    let mut exact: u128 = 1;
    let mut i = 0;
    while i <= MAX_FACTORIAL {
        if i > 0 {
            if i <= 34 {
                exact *= i as u128;
                out[i] = exact as f64;
            } else {
                out[i] = out[i - 1] * i as f64;
            }
        } else {
            out[0] = 1.0;
        }
        i += 1;
    }
    out
}

fn fact(n: i32) -> f64 {
    FACTORIALS[n as usize]
}

/// Clebsch-Gordan coefficient `<j1 m1; j2 m2 | J M>` in the Condon-Shortley
/// convention, evaluated with the Racah single-sum formula.
///
/// Returns zero when `m1 + m2 != M`. Fails on an invalid `(j, m)` pair, on
/// `J` outside `j1 (x) j2`, or when a factorial argument exceeds
/// [`MAX_FACTORIAL`].
pub fn cg_coefficient(j1: Spin, twice_m1: i32, j2: Spin, twice_m2: i32, big_j: Spin, twice_big_m: i32) -> Result<f64> {
    check_pair(j1, twice_m1)?;
    check_pair(j2, twice_m2)?;
    check_pair(big_j, twice_big_m)?;
    if !triangle(j1, j2, big_j) {
        return Err(Error::Domain("J not in the Clebsch-Gordan series of j1 and j2"));
    }
    if (j1.0 + j2.0 + big_j.0) as usize / 2 + 1 > MAX_FACTORIAL {
        return Err(Error::Domain("spins too large for the factorial table"));
    }
    if twice_m1 + twice_m2 != twice_big_m {
        return Ok(0.0);
    }
    let (a, b, c) = (j1.0 as i32, j2.0 as i32, big_j.0 as i32);
    let (m1, m2, m) = (twice_m1, twice_m2, twice_big_m);

    // All combinations below are even, so halving is exact.
    let h = |x: i32| x / 2;
    let prefactor = (f64::from(c + 1) * fact(h(c + a - b)) * fact(h(c - a + b)) * fact(h(a + b - c))
        / fact(h(a + b + c) + 1))
    .sqrt();
    let norm =
        (fact(h(c + m)) * fact(h(c - m)) * fact(h(a - m1)) * fact(h(a + m1)) * fact(h(b - m2)) * fact(h(b + m2)))
            .sqrt();

    let k_min = 0.max(h(b - c - m1)).max(h(a - c + m2));
    let k_max = h(a + b - c).min(h(a - m1)).min(h(b + m2));
    let mut sum = 0.0;
    for k in k_min..=k_max {
        let denom = fact(k)
            * fact(h(a + b - c) - k)
            * fact(h(a - m1) - k)
            * fact(h(b + m2) - k)
            * fact(h(c - b + m1) + k)
            * fact(h(c - a - m2) + k);
        let term = 1.0 / denom;
        sum += if k % 2 == 0 { term } else { -term };
    }
    Ok(prefactor * norm * sum)
}

fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * u128::from(n - i) / u128::from(i + 1);
    }
    acc
}

/// Decomposition of `(1/2)^{(x) n}` into irreps: spin `s` appears
/// `C(n, n/2 - s) - C(n, n/2 - s - 1)` times.
pub fn decompose_tensor_power(n: u32) -> Result<IrrepMultiset> {
    if n == 0 {
        return Err(Error::Domain("tensor power needs n >= 1"));
    }
    if n > 120 {
        return Err(Error::Domain("tensor power too large"));
    }
    let mut out = IrrepMultiset::new();
    for twice_s in (n % 2..=n).step_by(2) {
        let k = u64::from((n - twice_s) / 2);
        let below = if k == 0 { 0 } else { binomial(u64::from(n), k - 1) };
        let m = binomial(u64::from(n), k) - below;
        out.insert(Spin(twice_s), m as u64);
    }
    Ok(out)
}

/// Dimension `C(n + d - 1, d - 1)` of the symmetric subspace of
/// `(C^d)^{(x) n}`.
pub fn sym_subspace_dim(n: u32, d: u32) -> Result<u64> {
    if d < 1 {
        return Err(Error::Domain("local dimension must be positive"));
    }
    let v = binomial(u64::from(n) + u64::from(d) - 1, u64::from(d) - 1);
    u64::try_from(v).map_err(|_| Error::Domain("symmetric subspace dimension overflows u64"))
}

/// Spins occurring in `(1/2)^{(x) m}`: `m/2, m/2 - 1, ...` down to 0 or 1/2,
/// returned ascending. The empty product (`m = 0`) gives spin 0.
pub fn d_set(m: u32) -> Vec<Spin> {
    (m % 2..=m).step_by(2).map(Spin).collect()
}

/// Union over `g` in `alpha1 (x) alpha2` of the spins in `g (x) N/2`,
/// ascending and deduplicated.
pub fn d_n_set(alpha1: Spin, alpha2: Spin, n: u32) -> Vec<Spin> {
    let mut out: Vec<Spin> =
        clebsch_gordan_series(alpha1, alpha2).into_iter().flat_map(|g| clebsch_gordan_series(g, Spin(n))).collect();
    out.sort_unstable();
    out.dedup();
    out
}

//! Analytic fidelity curves for the solved cloning families.

use nalgebra::{DMatrix, DVector};
#[allow(unused_imports)]
use num_traits::Float;

use crate::engine::{symmetric_optimum, NORM_TOL};
use crate::error::{Error, Result};

/// A point `(x, y)` on the non-negative quarter of the unit circle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurveParam {
    x: f64,
    y: f64,
}

impl CurveParam {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        if x < -1e-12 || y < -1e-12 {
            return Err(Error::Domain("curve parameters must be non-negative"));
        }
        if (x * x + y * y - 1.0).abs() > 1e-12 {
            return Err(Error::Normalisation("x^2 + y^2 must be 1"));
        }
        Ok(CurveParam { x: x.max(0.0), y: y.max(0.0) })
    }

    pub fn from_x(x: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::Domain("x must lie in [0, 1]"));
        }
        Ok(CurveParam { x, y: (1.0 - x * x).sqrt() })
    }

    pub fn from_y(y: f64) -> Result<Self> {
        let p = Self::from_x(y)?;
        Ok(CurveParam { x: p.y, y: p.x })
    }

    /// Point at angle `theta` in `[0, pi/2]`: `(cos theta, sin theta)`.
    pub fn from_angle(theta: f64) -> Result<Self> {
        if !(-1e-15..=core::f64::consts::FRAC_PI_2 + 1e-15).contains(&theta) {
            return Err(Error::Domain("angle must lie in [0, pi/2]"));
        }
        Ok(CurveParam { x: theta.cos().max(0.0), y: theta.sin().max(0.0) })
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }
}

/// `n -> n + 1` qubits: fidelity of each of the first `n` clones and of the
/// last one,
/// `F_1 = 1 - 2x^2 / (n(n+2))`, `F_{n+1} = 1 - (sqrt(n/(n+2)) x - y)^2 / 2`.
///
/// `x = 0` gives `(1, 1/2)`, `x = sqrt(n/(2(n+1)))` the symmetric point and
/// `x = sqrt((n+2)/(2(n+1)))` gives `F_{n+1} = 1`.
pub fn fid_n_to_n_plus_1(n: u32, p: CurveParam) -> Result<(f64, f64)> {
    if n == 0 {
        return Err(Error::Domain("n must be at least 1"));
    }
    let n = f64::from(n);
    let first = 1.0 - 2.0 * p.x * p.x / (n * (n + 2.0));
    let gap = (n / (n + 2.0)).sqrt() * p.x - p.y;
    Ok((first, 1.0 - 0.5 * gap * gap))
}

/// `1 -> 1 + n` qubits:
/// `F_A = 1 - (2/3) y^2`, `F_B = 1/2 + (y^2 + sqrt(n(n+2)) x y) / (3n)`.
pub fn fid_1_to_1_plus_n(n: u32, p: CurveParam) -> Result<(f64, f64)> {
    if n == 0 {
        return Err(Error::Domain("n must be at least 1"));
    }
    let nf = f64::from(n);
    let f_a = 1.0 - 2.0 / 3.0 * p.y * p.y;
    let f_b = 0.5 + (p.y * p.y + (nf * (nf + 2.0)).sqrt() * p.x * p.y) / (3.0 * nf);
    Ok((f_a, f_b))
}

/// Limit `n -> infinity` of [`fid_1_to_1_plus_n`]: one clone plus an optimal
/// measurement, `F_meas = 1/2 + y sqrt(1 - y^2) / 3` for `0 <= y <= 1/sqrt 2`.
pub fn fid_measurement_limit(y: f64) -> Result<(f64, f64)> {
    if !(0.0..=core::f64::consts::FRAC_1_SQRT_2 + 1e-15).contains(&y) {
        return Err(Error::Domain("y must lie in [0, 1/sqrt 2]"));
    }
    let y = y.min(core::f64::consts::FRAC_1_SQRT_2);
    Ok((1.0 - 2.0 / 3.0 * y * y, 0.5 + y * (1.0 - y * y).sqrt() / 3.0))
}

/// `1 -> 1 + 1` qubits from the single free amplitude `lambda_1` of the
/// `(1/2, 1/2, 1/2)` component.
pub fn fid_1to11_qubit(lambda1: f64) -> Result<(f64, f64)> {
    if !(0.0..=1.0).contains(&lambda1) {
        return Err(Error::Domain("lambda_1 must lie in [0, 1]"));
    }
    let omega_a = 1.0 - 4.0 / 3.0 * lambda1 * lambda1;
    let mu1 = 3f64.sqrt() / 2.0 * (1.0 - lambda1 * lambda1).sqrt() - lambda1 / 2.0;
    let omega_b = 1.0 - 4.0 / 3.0 * mu1 * mu1;
    Ok(((1.0 + omega_a) / 2.0, (1.0 + omega_b) / 2.0))
}

/// `1 -> 1 + 1` qudits with the machine `alpha S_2 + beta A_2` built from the
/// symmetric and antisymmetric projectors. Requires
/// `(d+1)/2 alpha^2 + (d-1)/2 beta^2 = 1`.
pub fn fid_qudit_1to11(d: u32, alpha: f64, beta: f64) -> Result<(f64, f64)> {
    if d < 2 {
        return Err(Error::Domain("d must be at least 2"));
    }
    let df = f64::from(d);
    let norm = (df + 1.0) / 2.0 * alpha * alpha + (df - 1.0) / 2.0 * beta * beta;
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::Normalisation("(d+1)/2 alpha^2 + (d-1)/2 beta^2 must be 1"));
    }
    let base = (df + 3.0) * alpha * alpha / 4.0 + (df - 1.0) * beta * beta / 4.0;
    let cross = (df - 1.0) * alpha * beta / 2.0;
    Ok((base + cross, base - cross))
}

/// Vectors `u` such that each `1 -> 1 + 1 + 1` shrinking factor reads
/// `omega = ((u . lambda)^2 - |lambda|^2) / 3`; rows are clones A, B, C.
const T0_DIRECTIONS: [[f64; 2]; 3] = [[2.0, 0.0], [1.0, 1.732_050_807_568_877_2], [1.0, -1.732_050_807_568_877_2]];
const T1_DIRECTIONS: [[f64; 3]; 3] =
    [[2.0, 0.0, 0.0], [1.0, core::f64::consts::SQRT_2, -1.0], [1.0, core::f64::consts::SQRT_2, 1.0]];

/// Shrinking factors of the three clones of the `T_2` component, which do
/// not depend on any amplitude.
pub const T2_OMEGA: f64 = -1.0 / 3.0;

fn quad_omega(u: &[f64], lam: &[f64]) -> f64 {
    let dot: f64 = u.iter().zip(lam).map(|(a, b)| a * b).sum();
    let norm: f64 = lam.iter().map(|x| x * x).sum();
    (dot * dot - norm) / 3.0
}

/// Symmetric matrix `sum_i w_i (u_i u_i^T - I) / 3` of a `1 -> 1 + 1 + 1`
/// component (`0` or `1`) under clone weights `w`.
pub(crate) fn three_way_form(component: usize, weights: [f64; 3]) -> DMatrix<f64> {
    let dirs: alloc::vec::Vec<&[f64]> = match component {
        0 => T0_DIRECTIONS.iter().map(|r| r.as_slice()).collect(),
        _ => T1_DIRECTIONS.iter().map(|r| r.as_slice()).collect(),
    };
    let k = dirs[0].len();
    let mut m = DMatrix::zeros(k, k);
    for (u, w) in dirs.iter().zip(weights) {
        let u = DVector::from_column_slice(u);
        m += (&u * u.transpose() - DMatrix::identity(k, k)) * (w / 3.0);
    }
    m
}

/// Shrinking factors `(omega_A, omega_B, omega_C)` of the `1 -> 1 + 1 + 1`
/// machine `r0 T_0 + r1 T_1` with amplitudes `(lambda_0, lambda_1)` for
/// `T_0` and `(lambda_0, lambda_1, lambda_1')` for `T_1`.
pub fn fid_1to111_qubit(r0: f64, r1: f64, lam: [f64; 2], lam_bar: [f64; 3]) -> Result<[f64; 3]> {
    if r0 < -NORM_TOL || r1 < -NORM_TOL || (r0 + r1 - 1.0).abs() > NORM_TOL {
        return Err(Error::Normalisation("r0, r1 must be non-negative and sum to 1"));
    }
    let n0: f64 = lam.iter().map(|x| x * x).sum();
    let n1: f64 = lam_bar.iter().map(|x| x * x).sum();
    if (n0 - 1.0).abs() > NORM_TOL || (n1 - 1.0).abs() > NORM_TOL {
        return Err(Error::Normalisation("lambda blocks must be unit vectors"));
    }
    let mut out = [0.0; 3];
    for (i, o) in out.iter_mut().enumerate() {
        *o = r0 * quad_omega(&T0_DIRECTIONS[i], &lam) + r1 * quad_omega(&T1_DIRECTIONS[i], &lam_bar);
    }
    Ok(out)
}

/// Optimal symmetric `N -> M` qubit fidelity. Computed by the engine, so it
/// is not restricted to `M = N + 1`.
pub fn fid_symmetric(n: u32, m: u32) -> Result<f64> {
    if n == 0 || m < n {
        return Err(Error::Domain("need M >= N >= 1"));
    }
    symmetric_optimum(n, m)
}

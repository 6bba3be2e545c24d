use crate::closed_form::{three_way_form, T2_OMEGA};
use crate::engine::fidelity_from_omega;
use crate::error::{Error, Result};
use crate::linalg::top_eigen;

/// Optimum of a weighted `1 -> 1 + 1 + 1` qubit objective.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThreeWayPoint {
    pub fidelities: [f64; 3],
    pub omegas: [f64; 3],
    /// Mixture weights of `T_0`, `T_1`, `T_2`.
    pub r: [f64; 3],
    pub lam: [f64; 2],
    pub lam_bar: [f64; 3],
    pub objective: f64,
}

/// Maximises `sum_i w_i F_i` over `r_0 T_0 + r_1 T_1 + r_2 T_2`.
///
/// The objective is linear in the mixture weights, so the optimum sits on a
/// single component: the one whose weighted form has the largest top
/// eigenvalue. Ties resolve towards `T_1`.
pub fn maximize_three_way(weights: [f64; 3]) -> Result<ThreeWayPoint> {
    if weights.iter().any(|w| *w < 0.0 || !w.is_finite()) || weights.iter().sum::<f64>() <= 0.0 {
        return Err(Error::Domain("weights must be non-negative and not all zero"));
    }
    let (v0, e0) = top_eigen(&three_way_form(0, weights));
    let (v1, e1) = top_eigen(&three_way_form(1, weights));
    let v2 = T2_OMEGA * weights.iter().sum::<f64>();

    let mut lam = [1.0, 0.0];
    let mut lam_bar = [1.0, 0.0, 0.0];
    let tol = 1e-12 * (1.0 + v1.abs());
    let (r, omegas) = if v1 >= v0 - tol && v1 >= v2 - tol {
        lam_bar.copy_from_slice(e1.as_slice());
        ([0.0, 1.0, 0.0], crate::closed_form::fid_1to111_qubit(0.0, 1.0, lam, lam_bar)?)
    } else if v0 >= v2 {
        lam.copy_from_slice(e0.as_slice());
        ([1.0, 0.0, 0.0], crate::closed_form::fid_1to111_qubit(1.0, 0.0, lam, lam_bar)?)
    } else {
        ([0.0, 0.0, 1.0], [T2_OMEGA; 3])
    };
    let fidelities = omegas.map(|w| fidelity_from_omega(w, 1, 1, 2));
    let objective = fidelities.iter().zip(weights).map(|(f, w)| f * w).sum();
    Ok(ThreeWayPoint { fidelities, omegas, r, lam, lam_bar, objective })
}

use nalgebra::{DMatrix, SymmetricEigen};
#[allow(unused_imports)]
use num_traits::Float;

use crate::linalg::top_eigen;

/// `max u^T B u` over unit vectors `u` with `u^T A u >= floor`, for real
/// symmetric `A`, `B`. `None` when no unit vector meets the floor.
///
/// Exact for dimensions 1 and 2; from dimension 3 on the joint numerical
/// range is convex and the value is the Lagrangian dual
/// `min_{k >= 0} lambda_max(B + k A) - k floor`.
pub fn max_quadratic_with_floor(a: &DMatrix<f64>, b: &DMatrix<f64>, floor: f64) -> Option<f64> {
    let n = a.nrows();
    let (a_top, _) = top_eigen(a);
    if a_top < floor - 1e-12 {
        return None;
    }
    if n == 1 {
        return Some(b[(0, 0)]);
    }
    let floor = floor.min(a_top);
    if floor >= a_top - 1e-14 * (1.0 + a_top.abs()) {
        let eig = SymmetricEigen::new(a.clone());
        let cols: alloc::vec::Vec<usize> =
            (0..n).filter(|&i| eig.eigenvalues[i] >= a_top - 1e-10 * (1.0 + a_top.abs())).collect();
        let basis = eig.eigenvectors.select_columns(&cols);
        return Some(top_eigen(&(basis.transpose() * b * &basis)).0);
    }

    let eig = SymmetricEigen::new(b.clone());
    let b_top = eig.eigenvalues.max();
    let cols: alloc::vec::Vec<usize> =
        (0..n).filter(|&i| eig.eigenvalues[i] >= b_top - 1e-10 * (1.0 + b_top.abs())).collect();
    let basis = eig.eigenvectors.select_columns(&cols);
    let (best_x, _) = top_eigen(&(basis.transpose() * a * &basis));
    if best_x >= floor - 1e-12 {
        return Some(b_top);
    }

    if n == 2 {
        // u = (cos t, sin t): x(t) = xc + p cos 2t + q sin 2t, same for y.
        let xc = 0.5 * (a[(0, 0)] + a[(1, 1)]);
        let (p, q) = (0.5 * (a[(0, 0)] - a[(1, 1)]), a[(0, 1)]);
        let yc = 0.5 * (b[(0, 0)] + b[(1, 1)]);
        let (pb, qb) = (0.5 * (b[(0, 0)] - b[(1, 1)]), b[(0, 1)]);
        let r = (p * p + q * q).sqrt();
        if r < 1e-15 {
            return (xc >= floor - 1e-12).then_some(b_top);
        }
        let phi = q.atan2(p);
        let c = ((floor - xc) / r).clamp(-1.0, 1.0).acos();
        let y_at = |two_t: f64| yc + pb * two_t.cos() + qb * two_t.sin();
        return Some(y_at(phi + c).max(y_at(phi - c)));
    }

    let dual = |k: f64| {
        let (h, v) = top_eigen(&(b + a * k));
        (h - k * floor, v.dot(&(a * &v)))
    };
    let (mut lo, mut hi) = (0.0, 1.0);
    while dual(hi).1 < floor && hi < 1e12 {
        lo = hi;
        hi *= 4.0;
    }
    let mut best = dual(lo).0.min(dual(hi).0);
    for _ in 0..300 {
        if hi - lo <= 1e-15 * (1.0 + hi) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let (val, x) = dual(mid);
        best = best.min(val);
        if x < floor {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(best)
}

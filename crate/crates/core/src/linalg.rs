use nalgebra::{DMatrix, DVector, SymmetricEigen};

/// Largest eigenvalue of a real symmetric matrix with a unit eigenvector.
/// The eigenvector sign is fixed so its first non-negligible entry is
/// positive.
pub(crate) fn top_eigen(m: &DMatrix<f64>) -> (f64, DVector<f64>) {
    let n = m.nrows();
    if n == 1 {
        return (m[(0, 0)], DVector::from_element(1, 1.0));
    }
    let eig = SymmetricEigen::new(m.clone());
    let mut best = 0;
    for i in 1..n {
        if eig.eigenvalues[i] > eig.eigenvalues[best] {
            best = i;
        }
    }
    let mut v = eig.eigenvectors.column(best).into_owned();
    fix_sign(&mut v);
    (eig.eigenvalues[best], v)
}

pub(crate) fn fix_sign(v: &mut DVector<f64>) {
    if let Some(x) = v.iter().find(|x| x.abs() > 1e-12) {
        if *x < 0.0 {
            v.neg_mut();
        }
    }
}

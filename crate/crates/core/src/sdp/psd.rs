use nalgebra::DMatrix;

/// Smallest eigenvalue of the symmetric part of `m`.
pub fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    if m.nrows() == 0 {
        return f64::INFINITY;
    }
    let sym = (m + m.transpose()) * 0.5;
    sym.symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// `(min_eig >= -tol, min_eig)`. Asymmetry larger than `tol` fails the check.
pub fn psd_check(m: &DMatrix<f64>, tol: f64) -> (bool, f64) {
    let n = m.nrows();
    if m.ncols() != n {
        return (false, f64::NAN);
    }
    let mut asym: f64 = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            asym = asym.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    let lam = min_eigenvalue(m);
    (asym <= tol.max(1e-12) && lam >= -tol, lam)
}

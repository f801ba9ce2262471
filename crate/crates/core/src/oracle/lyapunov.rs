use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::sdp::{hermitian_embed, min_eigenvalue};

/// Above this size the Lyapunov equation is solved by Bartels–Stewart on a
/// complex Schur form instead of the `n² × n²` Kronecker system.
const KRON_MAX: usize = 8;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn hermitian_pd(p: &DMatrix<Complex64>) -> bool {
    if p.iter().any(|v| !v.is_finite()) {
        return false;
    }
    let h = (p + p.adjoint()) * c(0.5);
    match hermitian_embed(&h) {
        Ok(e) => min_eigenvalue(&e) > 0.0,
        Err(_) => false,
    }
}

/// Solve `M* P + P M = −I` through the Kronecker form
/// `(I ⊗ M* + Mᵀ ⊗ I) vec(P) = −vec(I)`.
fn lyapunov_kron(m: &DMatrix<Complex64>) -> Option<DMatrix<Complex64>> {
    let n = m.nrows();
    let id = DMatrix::<Complex64>::identity(n, n);
    let a = id.kronecker(&m.adjoint()) + m.transpose().kronecker(&id);
    let rhs = DVector::from_fn(n * n, |k, _| if k % (n + 1) == 0 { c(-1.0) } else { c(0.0) });
    let x = a.clone().lu().solve(&rhs)?;
    let p = DMatrix::from_column_slice(n, n, x.as_slice());
    let resid = (m.adjoint() * &p + &p * m + &id).norm();
    let scale = 1.0 + m.norm() * p.norm();
    (resid <= 1e-8 * scale && p.norm() < 1e14).then_some(p)
}

/// Schur-based solver reusable across shifts `M − αI` (same unitary factor).
pub(crate) struct ShiftedLyapunov {
    q: DMatrix<Complex64>,
    t: DMatrix<Complex64>,
}

impl ShiftedLyapunov {
    pub(crate) fn new(m: &DMatrix<Complex64>) -> Self {
        let (q, t) = m.clone().schur().unpack();
        ShiftedLyapunov { q, t }
    }

    /// Eigenvalues (Schur diagonal).
    #[cfg(test)]
    pub(crate) fn eigenvalues(&self) -> Vec<Complex64> {
        (0..self.t.nrows()).map(|i| self.t[(i, i)]).collect()
    }

    /// `X` with `(T − αI)* X + X (T − αI) = −I`; `P = Q X Q*`.
    fn solve(&self, alpha: f64) -> Option<DMatrix<Complex64>> {
        let n = self.t.nrows();
        let t = &self.t;
        let scale = t.norm() + alpha.abs() + 1.0;
        let mut x = DMatrix::<Complex64>::zeros(n, n);
        for j in 0..n {
            // (T* + (t_jj − α) I − α I) x_j = −e_j − Σ_{k<j} x_k t_kj
            let tjj = t[(j, j)] - c(alpha);
            let mut rhs = DVector::<Complex64>::zeros(n);
            rhs[j] = c(-1.0);
            for k in 0..j {
                let tkj = t[(k, j)];
                if tkj != c(0.0) {
                    for i in 0..n {
                        rhs[i] -= x[(i, k)] * tkj;
                    }
                }
            }
            // Forward substitution with the lower-triangular T* (shifted).
            for i in 0..n {
                let mut s = rhs[i];
                for k in 0..i {
                    s -= t[(k, i)].conj() * x[(k, j)];
                }
                let d = (t[(i, i)] - c(alpha)).conj() + tjj;
                if d.norm() <= 1e-14 * scale {
                    return None;
                }
                x[(i, j)] = s / d;
            }
        }
        Some(x)
    }

    pub(crate) fn hurwitz_shifted(&self, alpha: f64) -> bool {
        self.solve(alpha).is_some_and(|x| hermitian_pd(&x))
    }

    pub(crate) fn solve_p(&self, alpha: f64) -> Option<DMatrix<Complex64>> {
        self.solve(alpha).map(|x| &self.q * x * self.q.adjoint())
    }
}

/// Hurwitz test by the Lyapunov equation `M* P + P M = −I`: true iff a
/// solution exists and is positive definite.
pub fn hurwitz_lyapunov(m: &DMatrix<Complex64>) -> bool {
    lyapunov_solution(m).is_some_and(|p| hermitian_pd(&p))
}

/// The solution `P` of `M* P + P M = −I`, if the equation is uniquely solvable.
pub fn lyapunov_solution(m: &DMatrix<Complex64>) -> Option<DMatrix<Complex64>> {
    let n = m.nrows();
    if n == 0 || m.ncols() != n || m.iter().any(|v| !v.is_finite()) {
        return None;
    }
    if n <= KRON_MAX {
        lyapunov_kron(m)
    } else {
        ShiftedLyapunov::new(m).solve_p(0.0)
    }
}

/// `max Re λ(M)` to within `tol`, by bisection on the shift `α` with
/// `M − αI` tested by [`hurwitz_lyapunov`].
pub fn spectral_abscissa(m: &DMatrix<Complex64>, tol: f64) -> f64 {
    let n = m.nrows();
    if n == 0 {
        return f64::NEG_INFINITY;
    }
    let bound = m.norm() + 1.0;
    let (mut lo, mut hi) = (-bound, bound);
    let tol = tol.max(1e-15 * bound);
    if n <= KRON_MAX {
        let id = DMatrix::<Complex64>::identity(n, n);
        while hi - lo > tol {
            let mid = 0.5 * (lo + hi);
            if hurwitz_lyapunov(&(m - &id * c(mid))) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
    } else {
        let s = ShiftedLyapunov::new(m);
        while hi - lo > tol {
            let mid = 0.5 * (lo + hi);
            if s.hurwitz_shifted(mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn real(rows: usize, v: &[f64]) -> DMatrix<Complex64> {
        DMatrix::from_row_slice(rows, rows, v).map(c)
    }

    fn schur_abscissa(m: &DMatrix<Complex64>) -> f64 {
        ShiftedLyapunov::new(m)
            .eigenvalues()
            .iter()
            .map(|l| l.re)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    #[test]
    fn minus_identity() {
        let m = -DMatrix::<Complex64>::identity(3, 3);
        assert!(hurwitz_lyapunov(&m));
        let p = lyapunov_solution(&m).unwrap();
        assert!((p - DMatrix::identity(3, 3) * c(0.5)).norm() < 1e-14);
    }

    #[test]
    fn rotation_is_not_hurwitz() {
        assert!(!hurwitz_lyapunov(&real(2, &[0.0, 1.0, -1.0, 0.0])));
    }

    #[test]
    fn example_one_at_one() {
        assert!(hurwitz_lyapunov(&real(2, &[-0.5, 0.5, -0.25, -1.0])));
    }

    #[test]
    fn unstable_diagonal() {
        assert!(!hurwitz_lyapunov(&real(2, &[-1.0, 0.0, 0.0, 0.5])));
    }

    #[test]
    fn abscissa_of_diagonal_and_rotation() {
        assert!((spectral_abscissa(&real(2, &[-1.0, 0.0, 0.0, -3.0]), 1e-9) + 1.0).abs() < 1e-8);
        assert!(spectral_abscissa(&real(2, &[0.0, 1.0, -1.0, 0.0]), 1e-9).abs() < 1e-8);
    }

    #[test]
    fn abscissa_matches_eigenvalues() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..40 {
            let m = DMatrix::from_fn(4, 4, |_, _| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
            let want = schur_abscissa(&m);
            let got = spectral_abscissa(&m, 1e-9);
            assert!((got - want).abs() < 1e-6, "{got} vs {want}");
        }
    }

    #[test]
    fn large_matrices_use_schur_path() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for shift in [-3.0, 3.0] {
            let m = DMatrix::from_fn(12, 12, |i, j| {
                let v = rng.random_range(-0.3..0.3);
                c(if i == j { v + shift } else { v })
            });
            let stable = schur_abscissa(&m) < 0.0;
            assert_eq!(hurwitz_lyapunov(&m), stable);
            assert!((spectral_abscissa(&m, 1e-9) - schur_abscissa(&m)).abs() < 1e-6);
        }
    }

    #[test]
    fn lyapunov_consistent_with_abscissa() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for k in 0..500 {
            let n = 2 + k % 5;
            let m = DMatrix::from_fn(n, n, |_, _| c(rng.random_range(-1.0..1.0)));
            assert_eq!(hurwitz_lyapunov(&m), spectral_abscissa(&m, 1e-8) < 0.0);
        }
    }
}

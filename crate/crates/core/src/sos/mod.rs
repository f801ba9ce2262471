//! Gram (generalized trace) parameterization of trigonometric polynomials and
//! the sum-of-squares programs built on it.
//!
//! A polynomial `F` of degree at most `n̂` is written `F(z) = p(z⁻¹)ᵀ G p(z)`
//! with `p(z) = p(z_L) ⊗ ⋯ ⊗ p(z_1)`; a PSD Hermitian `G` certifies `F ≥ 0`
//! on the torus. The coefficient of `z^d` is `tr[T(d) G]`.

mod assemble;
mod grid;
mod verify;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{DirectionKind, DirectionSpec};
use crate::rational::Cq;
use crate::trigpoly::{DegreeTuple, TrigPoly};

pub use assemble::{assemble_domain_sdp, assemble_global_sdp, solve_sos, GramBlockSpec, SosOutcome, SosProgram};
pub use grid::{finite_grid_positivity, GridMinimum};
pub use verify::{gram_poly, verify_certificate, VerificationReport, VerifyTolerances};

/// Monomial basis `p(z)` of per-variable degree `n̂`; index `Σ α_i·stride_i`
/// with `z_1` varying fastest.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GramBasisSpec {
    pub nhat: Vec<u32>,
}

impl GramBasisSpec {
    pub fn new(nhat: Vec<u32>) -> Self {
        GramBasisSpec { nhat }
    }

    pub fn dim(&self) -> usize {
        self.nhat.len()
    }

    /// Basis length `Π (n̂_i + 1)`.
    pub fn len(&self) -> usize {
        self.nhat.iter().map(|&n| n as usize + 1).product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Exponent tuple of basis element `a`.
    pub fn exponents(&self, mut a: usize) -> Vec<i32> {
        self.nhat
            .iter()
            .map(|&n| {
                let w = n as usize + 1;
                let e = a % w;
                a /= w;
                e as i32
            })
            .collect()
    }

    pub fn all_exponents(&self) -> Vec<Vec<i32>> {
        (0..self.len()).map(|a| self.exponents(a)).collect()
    }

    /// `p(z)` evaluated numerically.
    pub fn eval(&self, z: &[Complex64]) -> Vec<Complex64> {
        self.all_exponents()
            .iter()
            .map(|e| e.iter().zip(z).map(|(&k, zi)| zi.powi(k)).product())
            .collect()
    }
}

/// `T(d) = T_L(d_L) ⊗ ⋯ ⊗ T_1(d_1)`, with `T[b][a] = 1` exactly when
/// `α(b) − α(a) = d`, so that `tr[T(d)·G]` is the `z^d` coefficient of
/// `p(z⁻¹)ᵀ G p(z)`. For `d_i > 0` the ones of `T_i` sit `d_i` below the
/// main diagonal.
pub fn toeplitz_t(d: &DegreeTuple, basis: &GramBasisSpec) -> Result<DMatrix<f64>> {
    if d.dim() != basis.dim() {
        return Err(Error::DimensionMismatch {
            expected: basis.dim(),
            found: d.dim(),
        });
    }
    if d.0.iter().zip(&basis.nhat).any(|(&di, &n)| di.unsigned_abs() > n) {
        return Err(Error::DegreeOutOfRange {
            degree: d.0.clone(),
            nhat: basis.nhat.clone(),
        });
    }
    let n = basis.len();
    let ex = basis.all_exponents();
    Ok(DMatrix::from_fn(n, n, |b, a| {
        let hit = ex[b].iter().zip(&ex[a]).zip(&d.0).all(|((x, y), &di)| x - y == di);
        if hit {
            1.0
        } else {
            0.0
        }
    }))
}

/// Hermitian description `D(z) = (z_v^N + z_v^{-N})/2 − 1` of the `N`-th
/// roots of unity in variable `var`: `D ≤ 0` on the circle, with equality
/// exactly on the roots.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DomainPoly {
    pub poly: TrigPoly,
    pub var: usize,
    pub period: u32,
}

impl DomainPoly {
    pub fn new(dim: usize, var: usize, period: u32) -> Self {
        let n = period as i32;
        let mut poly = TrigPoly::constant(dim, Cq::from_int(-1));
        let half = Cq::ratio(1, 2);
        let mut d = vec![0; dim];
        d[var] = n;
        poly.add_term(DegreeTuple(d.clone()), &half);
        d[var] = -n;
        poly.add_term(DegreeTuple(d), &half);
        DomainPoly { poly, var, period }
    }

    pub fn degree(&self) -> Vec<u32> {
        self.poly.degree()
    }
}

/// One domain polynomial per periodic direction, in direction order.
pub fn build_domain_polys(directions: &[DirectionSpec]) -> Vec<DomainPoly> {
    let dim = directions.len();
    directions
        .iter()
        .enumerate()
        .filter_map(|(i, d)| match d.kind {
            DirectionKind::Periodic(n) => Some(DomainPoly::new(dim, i, n)),
            _ => None,
        })
        .collect()
}

/// One Gram matrix of a certificate: `poly` indexes the certified
/// polynomial, `multiplier` is `None` for the free SOS term `H_{k,0}` and
/// `Some(i)` for the multiplier of domain polynomial `i`.
#[derive(Clone, Debug, PartialEq)]
pub struct CertBlock {
    pub poly: usize,
    pub multiplier: Option<usize>,
    pub basis: GramBasisSpec,
    pub gram: DMatrix<Complex64>,
}

/// `F_k − ε = H_{k,0} + Σ_i D_i·H_{k,i}` with every `H` given by a Gram
/// matrix. `residual` and `min_eig` are filled by [`verify_certificate`].
#[derive(Clone, Debug, PartialEq)]
pub struct Certificate {
    pub epsilon: f64,
    pub blocks: Vec<CertBlock>,
    pub residual: f64,
    pub min_eig: f64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_hermitian(n: usize, rng: &mut ChaCha8Rng) -> DMatrix<Complex64> {
        let m = DMatrix::from_fn(n, n, |_, _| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        (&m + m.adjoint()) * Complex64::new(0.5, 0.0)
    }

    fn random_torus_point(dim: usize, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
        (0..dim)
            .map(|_| Complex64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU)))
            .collect()
    }

    #[test]
    fn zero_degree_is_identity() {
        let b = GramBasisSpec::new(vec![2, 1]);
        assert_eq!(toeplitz_t(&DegreeTuple(vec![0, 0]), &b).unwrap(), DMatrix::identity(6, 6));
    }

    #[test]
    fn smallest_case_orientation() {
        let b = GramBasisSpec::new(vec![1]);
        let t = toeplitz_t(&DegreeTuple(vec![1]), &b).unwrap();
        assert_eq!(t, DMatrix::from_row_slice(2, 2, &[0.0, 0.0, 1.0, 0.0]));
    }

    #[test]
    fn out_of_range_degree() {
        let b = GramBasisSpec::new(vec![1, 1]);
        assert!(matches!(
            toeplitz_t(&DegreeTuple(vec![2, 0]), &b),
            Err(Error::DegreeOutOfRange { .. })
        ));
    }

    #[test]
    fn kronecker_structure() {
        let b = GramBasisSpec::new(vec![2, 3]);
        let elem = |n: u32, d: i32| {
            DMatrix::from_fn(n as usize + 1, n as usize + 1, |r, c| {
                if r as i32 - c as i32 == d {
                    1.0
                } else {
                    0.0
                }
            })
        };
        for d1 in -2..=2 {
            for d2 in -3..=3 {
                let want = elem(3, d2).kronecker(&elem(2, d1));
                assert_eq!(toeplitz_t(&DegreeTuple(vec![d1, d2]), &b).unwrap(), want);
            }
        }
    }

    #[test]
    fn trace_reconstruction_matches_quadratic_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let b = GramBasisSpec::new(vec![2, 2]);
        let g = random_hermitian(b.len(), &mut rng);
        let mut coeffs = Vec::new();
        for d1 in -2..=2 {
            for d2 in -2..=2 {
                let t = toeplitz_t(&DegreeTuple(vec![d1, d2]), &b).unwrap();
                let c: Complex64 = (t.map(|x| Complex64::new(x, 0.0)) * &g).trace();
                coeffs.push(((d1, d2), c));
            }
        }
        for _ in 0..50 {
            let z = random_torus_point(2, &mut rng);
            let p = b.eval(&z);
            let pinv: Vec<Complex64> = b.eval(&[z[0].inv(), z[1].inv()]);
            let mut direct = Complex64::new(0.0, 0.0);
            for a in 0..b.len() {
                for c in 0..b.len() {
                    direct += pinv[a] * g[(a, c)] * p[c];
                }
            }
            let rebuilt: Complex64 = coeffs
                .iter()
                .map(|&((d1, d2), c)| c * z[0].powi(d1) * z[1].powi(d2))
                .sum();
            assert!((direct - rebuilt).norm() < 1e-10);
        }
    }

    #[test]
    fn domain_poly_zero_set() {
        for n in [1u32, 2, 3, 5] {
            let d = DomainPoly::new(1, 0, n);
            assert!(d.poly.is_hermitian());
            let m = 360 * n as usize;
            for j in 0..m {
                let z = Complex64::from_polar(1.0, std::f64::consts::TAU * j as f64 / m as f64);
                let v = d.poly.eval(&[z]).unwrap();
                assert!(v.im.abs() < 1e-12);
                let is_root = j % 360 == 0;
                assert_eq!(v.re >= -1e-12, is_root, "N = {n}, j = {j}");
            }
        }
    }

    #[test]
    fn domain_polys_follow_periodic_directions() {
        let dirs = vec![DirectionSpec::infinite(1, 1), DirectionSpec::periodic(3, 1, 1)];
        let ds = build_domain_polys(&dirs);
        assert_eq!(ds.len(), 1);
        assert_eq!(ds[0].var, 1);
        assert_eq!(ds[0].degree(), vec![0, 3]);
        assert_eq!(ds[0].poly.coeff(&DegreeTuple(vec![0, 3])), Cq::ratio(1, 2));
        assert_eq!(ds[0].poly.constant_term(), Cq::from_int(-1));
    }
}

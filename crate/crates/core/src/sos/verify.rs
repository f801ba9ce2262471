use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{Certificate, DomainPoly, GramBasisSpec};
use crate::error::{Error, Result};
use crate::rational::{rat_from_f64, Cq};
use crate::sdp::{hermitian_embed, min_eigenvalue};
use crate::trigpoly::{DegreeTuple, TrigPoly};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VerifyTolerances {
    /// Bound on the largest coefficient residual relative to `max(1, max|f|)`.
    pub rtol: f64,
    /// Allowed negativity of the smallest Gram eigenvalue.
    pub ptol: f64,
}

impl Default for VerifyTolerances {
    fn default() -> Self {
        VerifyTolerances { rtol: 1e-6, ptol: 1e-8 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerificationReport {
    /// Largest relative coefficient mismatch over all certified polynomials.
    pub residual: f64,
    /// Polynomial index and degree where `residual` is attained.
    pub worst: Option<(usize, DegreeTuple)>,
    pub min_eig: f64,
    /// Proven lower bound of `min F_k` over the domain:
    /// `ε − ‖R_k‖₁ − N_{k,0}·max(0, −λ_min(G_{k,0}))`, minimized over k.
    /// Multiplier terms vanish on the domain and do not enter.
    pub lower_bound: f64,
    pub valid: bool,
}

/// `p(z⁻¹)ᵀ G p(z)` in exact arithmetic. `G` is read as Hermitian from its
/// upper triangle (diagonal real part only) and rationalized exactly.
pub fn gram_poly(basis: &GramBasisSpec, g: &DMatrix<Complex64>) -> Result<TrigPoly> {
    let n = basis.len();
    if g.nrows() != n || g.ncols() != n {
        return Err(Error::ShapeMismatch {
            what: "Gram matrix".into(),
            expected: format!("{n}x{n}"),
            found: format!("{}x{}", g.nrows(), g.ncols()),
        });
    }
    let ex = basis.all_exponents();
    let mut p = TrigPoly::zero(basis.dim());
    for a in 0..n {
        p.add_term(DegreeTuple::zero(basis.dim()), &Cq::real(rat_from_f64(g[(a, a)].re)));
        for b in a + 1..n {
            let c = Cq::from_c64(g[(a, b)]);
            let d = DegreeTuple(ex[b].iter().zip(&ex[a]).map(|(x, y)| x - y).collect());
            p.add_term(d.neg(), &c.conj());
            p.add_term(d, &c);
        }
    }
    Ok(p)
}

fn hermitian_part(g: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let n = g.nrows();
    DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            Complex64::new(g[(i, i)].re, 0.0)
        } else if i < j {
            g[(i, j)]
        } else {
            g[(j, i)].conj()
        }
    })
}

/// Independent check of a certificate against the polynomials it claims to
/// certify. Nothing computed by the solver is trusted: the identity
/// `F_k − ε = H_{k,0} + Σ_i D_i·H_{k,i}` is rebuilt exactly from a
/// rationalized copy of every Gram matrix.
pub fn verify_certificate(
    cert: &Certificate,
    polys: &[TrigPoly],
    domains: &[DomainPoly],
    tol: &VerifyTolerances,
) -> Result<VerificationReport> {
    let mut rebuilt: Vec<TrigPoly> = polys.iter().map(|f| TrigPoly::zero(f.dim())).collect();
    let mut min_eig = f64::INFINITY;
    let mut free_neg = vec![0.0f64; polys.len()];
    for blk in &cert.blocks {
        let f = polys.get(blk.poly).ok_or_else(|| Error::ShapeMismatch {
            what: "certificate block".into(),
            expected: format!("polynomial index < {}", polys.len()),
            found: blk.poly.to_string(),
        })?;
        if blk.basis.dim() != f.dim() {
            return Err(Error::DimensionMismatch {
                expected: f.dim(),
                found: blk.basis.dim(),
            });
        }
        let h = gram_poly(&blk.basis, &blk.gram)?;
        let term = match blk.multiplier {
            None => h,
            Some(i) => {
                let d = domains.get(i).ok_or_else(|| Error::ShapeMismatch {
                    what: "certificate multiplier".into(),
                    expected: format!("domain index < {}", domains.len()),
                    found: i.to_string(),
                })?;
                d.poly.try_mul(&h)?
            }
        };
        rebuilt[blk.poly] = rebuilt[blk.poly].try_add(&term)?;
        let lam = min_eigenvalue(&hermitian_embed(&hermitian_part(&blk.gram))?);
        min_eig = min_eig.min(lam);
        if blk.multiplier.is_none() {
            free_neg[blk.poly] += blk.basis.len() as f64 * (-lam).max(0.0);
        }
    }

    let eps = Cq::real(rat_from_f64(cert.epsilon));
    let mut residual: f64 = 0.0;
    let mut worst = None;
    let mut lower_bound = f64::INFINITY;
    for (k, f) in polys.iter().enumerate() {
        let shifted = f.try_sub(&TrigPoly::constant(f.dim(), eps.clone()))?;
        let r = shifted.try_sub(&rebuilt[k])?;
        let scale = f.max_abs_coeff().max(1.0);
        for (d, c) in r.terms() {
            let v = c.abs_f64() / scale;
            if v > residual {
                residual = v;
                worst = Some((k, d.clone()));
            }
        }
        lower_bound = lower_bound.min(cert.epsilon - r.l1_norm() - free_neg[k]);
    }
    if polys.is_empty() {
        lower_bound = f64::NAN;
    }
    let valid = residual <= tol.rtol && min_eig >= -tol.ptol && cert.epsilon.is_finite();
    Ok(VerificationReport {
        residual,
        worst,
        min_eig,
        lower_bound,
        valid,
    })
}

use crate::error::{Error, Result};
use crate::matpoly::{Mat, MatTrigPoly, Ring, DEFAULT_DET_LIMIT};
use crate::model::SisModel;
use crate::trigpoly::TrigPoly;

/// `K(z) = H(z)·conj(h(z)) = |h(z)|² A(z)` on the torus.
pub fn build_k(m: &SisModel) -> Result<MatTrigPoly> {
    let (h, big_h) = m.build_h_big_h()?;
    Ok(big_h.scale_poly(&h.circle_conj()))
}

/// `W = K ⊗ I + I ⊗ conj(K)`.
pub fn build_w(k: &MatTrigPoly) -> Result<MatTrigPoly> {
    if !k.is_square() {
        return Err(Error::NotSquare {
            rows: k.rows(),
            cols: k.cols(),
        });
    }
    let id = MatTrigPoly::identity(k.dim(), k.rows());
    k.kron(&id).add(&id.kron(&k.circle_conj()))
}

/// `F(z) = det(−W(z))`, Hermitian by construction (checked).
pub fn build_f_thm1(m: &SisModel) -> Result<TrigPoly> {
    let w = build_w(&build_k(m)?)?;
    let f = w.neg().det_with_limit(DEFAULT_DET_LIMIT)?;
    f.check_hermitian()?;
    Ok(f)
}

/// Polynomial in λ with trigonometric-polynomial coefficients (ascending
/// powers, no trailing zeros).
#[derive(Clone, Debug, PartialEq)]
pub struct LambdaPoly {
    dim: usize,
    coeffs: Vec<TrigPoly>,
}

impl LambdaPoly {
    pub fn new(dim: usize, mut coeffs: Vec<TrigPoly>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        LambdaPoly { dim, coeffs }
    }

    pub fn constant(p: TrigPoly) -> Self {
        LambdaPoly::new(p.dim(), vec![p])
    }

    /// `λ` itself.
    pub fn lambda(dim: usize) -> Self {
        LambdaPoly::new(dim, vec![TrigPoly::zero(dim), TrigPoly::one(dim)])
    }

    pub fn coeffs(&self) -> &[TrigPoly] {
        &self.coeffs
    }

    /// Coefficient list of length exactly `len` (zero padded).
    pub fn padded(&self, len: usize) -> Vec<TrigPoly> {
        (0..len)
            .map(|i| self.coeffs.get(i).cloned().unwrap_or_else(|| TrigPoly::zero(self.dim)))
            .collect()
    }
}

impl Ring for LambdaPoly {
    fn zero_like(&self) -> Self {
        LambdaPoly::new(self.dim, Vec::new())
    }
    fn one_like(&self) -> Self {
        LambdaPoly::constant(TrigPoly::one(self.dim))
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
    fn add(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        let (a, b) = (self.padded(n), o.padded(n));
        LambdaPoly::new(self.dim, a.iter().zip(&b).map(|(x, y)| x + y).collect())
    }
    fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }
    fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return self.zero_like();
        }
        let mut out = vec![TrigPoly::zero(self.dim); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] = &out[i + j] + &(a * b);
            }
        }
        LambdaPoly::new(self.dim, out)
    }
    fn neg(&self) -> Self {
        LambdaPoly::new(self.dim, self.coeffs.iter().map(|c| -c).collect())
    }
}

/// Coefficients `m_0, …, m_{n₀}` of `m(λ, z) = det(λI − K(z))`, by a
/// symbolic determinant over λ-polynomials.
pub fn char_poly_k(k: &MatTrigPoly) -> Result<Vec<TrigPoly>> {
    if !k.is_square() {
        return Err(Error::NotSquare {
            rows: k.rows(),
            cols: k.cols(),
        });
    }
    let n = k.rows();
    let dim = k.dim();
    let m: Mat<LambdaPoly> = Mat::from_fn(n, n, |i, j| {
        let entry = LambdaPoly::constant(-k.get(i, j));
        if i == j {
            entry.add(&LambdaPoly::lambda(dim))
        } else {
            entry
        }
    });
    let det = m.det_with_limit(DEFAULT_DET_LIMIT)?;
    Ok(det.padded(n + 1))
}

/// `φ(λ, z) = m(λ, z)·m_conj(λ, z)` with `m_conj` the coefficientwise
/// circle conjugate; returns `φ_0, …, φ_{2n₀}`.
pub fn build_phi(m: &[TrigPoly]) -> Vec<TrigPoly> {
    let Some(first) = m.first() else {
        return Vec::new();
    };
    let dim = first.dim();
    let conj: Vec<TrigPoly> = m.iter().map(|c| c.circle_conj()).collect();
    let mut phi = vec![TrigPoly::zero(dim); 2 * m.len() - 1];
    for (i, a) in m.iter().enumerate() {
        for (j, b) in conj.iter().enumerate() {
            phi[i + j] = &phi[i + j] + &(a * b);
        }
    }
    phi
}

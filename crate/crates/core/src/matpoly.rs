//! Matrices over trigonometric polynomials (and over any commutative ring
//! implementing [`Ring`]): determinant, adjugate, Kronecker product,
//! elementwise circle-conjugation, plus exact Laurent division.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::rational::Cq;
use crate::trigpoly::{DegreeTuple, TrigPoly};

/// Default cap on the size of a symbolic determinant.
pub const DEFAULT_DET_LIMIT: usize = 16;

/// Minimal commutative-ring interface used by the generic determinant.
///
/// Elements carry their own "shape" (e.g. the ambient dimension of a
/// [`TrigPoly`]), so constants are produced from an existing element.
pub trait Ring: Clone + PartialEq {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
}

impl Ring for TrigPoly {
    fn zero_like(&self) -> Self {
        TrigPoly::zero(self.dim())
    }
    fn one_like(&self) -> Self {
        TrigPoly::one(self.dim())
    }
    fn is_zero(&self) -> bool {
        TrigPoly::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
}

/// Dense row-major matrix over a ring.
#[derive(Clone, Debug, PartialEq)]
pub struct Mat<R> {
    rows: usize,
    cols: usize,
    data: Vec<R>,
}

/// Matrix with trigonometric-polynomial entries.
pub type MatTrigPoly = Mat<TrigPoly>;

impl<R: Ring> Mat<R> {
    pub fn from_vec(rows: usize, cols: usize, data: Vec<R>) -> Result<Self> {
        if data.len() != rows * cols || rows == 0 || cols == 0 {
            return Err(Error::ShapeMismatch {
                what: "matrix data".into(),
                expected: format!("{} entries", rows * cols),
                found: format!("{} entries", data.len()),
            });
        }
        Ok(Mat { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> R) -> Self {
        let mut f = f;
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Mat { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &R {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: R) {
        self.data[i * self.cols + j] = v;
    }

    pub fn entries(&self) -> &[R] {
        &self.data
    }

    pub fn map(&self, f: impl Fn(&R) -> R) -> Self {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        Mat::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    /// Identity of size `n` built from a template element.
    pub fn identity_like(n: usize, template: &R) -> Self {
        let zero = template.zero_like();
        let one = template.one_like();
        Mat::from_fn(n, n, |i, j| if i == j { one.clone() } else { zero.clone() })
    }

    fn check_same_shape(&self, o: &Self) -> Result<()> {
        if self.rows != o.rows || self.cols != o.cols {
            return Err(Error::ShapeMismatch {
                what: "matrix operands".into(),
                expected: format!("{}x{}", self.rows, self.cols),
                found: format!("{}x{}", o.rows, o.cols),
            });
        }
        Ok(())
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.check_same_shape(o)?;
        Ok(Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a.add(b)).collect(),
        })
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.check_same_shape(o)?;
        Ok(Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a.sub(b)).collect(),
        })
    }

    pub fn neg(&self) -> Self {
        self.map(|a| a.neg())
    }

    pub fn scale(&self, k: &R) -> Self {
        self.map(|a| a.mul(k))
    }

    pub fn matmul(&self, o: &Self) -> Result<Self> {
        if self.cols != o.rows {
            return Err(Error::ShapeMismatch {
                what: "matrix product".into(),
                expected: format!("{} rows on the right", self.cols),
                found: format!("{}", o.rows),
            });
        }
        let zero = self.data[0].zero_like();
        Ok(Mat::from_fn(self.rows, o.cols, |i, j| {
            let mut acc = zero.clone();
            for k in 0..self.cols {
                let a = self.get(i, k);
                let b = o.get(k, j);
                if !a.is_zero() && !b.is_zero() {
                    acc = acc.add(&a.mul(b));
                }
            }
            acc
        }))
    }

    /// Kronecker product: entry `(i·p + k, j·q + l) = A(i,j)·B(k,l)`.
    pub fn kron(&self, o: &Self) -> Self {
        let (p, q) = (o.rows, o.cols);
        Mat::from_fn(self.rows * p, self.cols * q, |r, c| {
            let (i, k) = (r / p, r % p);
            let (j, l) = (c / q, c % q);
            self.get(i, j).mul(o.get(k, l))
        })
    }

    fn check_square(&self) -> Result<()> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        Ok(())
    }

    /// Exact determinant by cofactor expansion with minors memoized over
    /// column subsets.
    pub fn det(&self) -> Result<R> {
        self.det_with_limit(DEFAULT_DET_LIMIT)
    }

    pub fn det_with_limit(&self, limit: usize) -> Result<R> {
        self.check_square()?;
        let n = self.rows;
        if n > limit || n > 30 {
            return Err(Error::SizeLimit { size: n, limit });
        }
        Ok(det_of_submatrix(self, &(0..n).collect::<Vec<_>>(), &(0..n).collect::<Vec<_>>()))
    }

    /// Leibniz permutation sum; exponential cost, kept as an independent
    /// cross-check for small matrices.
    pub fn det_leibniz(&self) -> Result<R> {
        self.check_square()?;
        let n = self.rows;
        if n > 8 {
            return Err(Error::SizeLimit { size: n, limit: 8 });
        }
        let mut perm: Vec<usize> = (0..n).collect();
        let mut acc = self.data[0].zero_like();
        permute(&mut perm, 0, &mut |p| {
            let sign_neg = parity_odd(p);
            let mut term = self.data[0].one_like();
            for (i, &j) in p.iter().enumerate() {
                term = term.mul(self.get(i, j));
                if term.is_zero() {
                    return;
                }
            }
            acc = if sign_neg { acc.sub(&term) } else { acc.add(&term) };
        });
        Ok(acc)
    }

    /// Adjugate (transposed signed cofactor matrix); `M·adj(M) = det(M)·I`.
    pub fn adjugate(&self) -> Result<Self> {
        self.adjugate_with_limit(DEFAULT_DET_LIMIT)
    }

    pub fn adjugate_with_limit(&self, limit: usize) -> Result<Self> {
        self.check_square()?;
        let n = self.rows;
        if n > limit {
            return Err(Error::SizeLimit { size: n, limit });
        }
        if n == 1 {
            return Ok(Mat::identity_like(1, &self.data[0]));
        }
        let all: Vec<usize> = (0..n).collect();
        let mut out = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                // adj(i, j) = (-1)^{i+j} det(M without row j, column i)
                let rows: Vec<usize> = all.iter().copied().filter(|&r| r != j).collect();
                let cols: Vec<usize> = all.iter().copied().filter(|&c| c != i).collect();
                let m = det_of_submatrix(self, &rows, &cols);
                out.push(if (i + j) % 2 == 1 { m.neg() } else { m });
            }
        }
        Mat::from_vec(n, n, out)
    }
}

/// Determinant of the submatrix selecting `rows` × `cols`, computed bottom-up:
/// the minor on the last `k` selected rows is stored per subset of selected
/// columns (as a bitmask over positions in `cols`).
fn det_of_submatrix<R: Ring>(m: &Mat<R>, rows: &[usize], cols: &[usize]) -> R {
    let n = rows.len();
    let template = &m.data[0];
    if n == 0 {
        return template.one_like();
    }
    let mut minors: BTreeMap<u32, R> = BTreeMap::new();
    minors.insert(0, template.one_like());
    for step in 0..n {
        let r = rows[n - 1 - step];
        let mut next: BTreeMap<u32, R> = BTreeMap::new();
        for (&mask, minor) in &minors {
            if minor.is_zero() {
                continue;
            }
            for (pos, &c) in cols.iter().enumerate() {
                let bit = 1u32 << pos;
                if mask & bit != 0 {
                    continue;
                }
                let a = m.get(r, c);
                if a.is_zero() {
                    continue;
                }
                // Sign: number of chosen columns to the left of `pos` in the new set.
                let left = (mask & (bit - 1)).count_ones();
                let term = a.mul(minor);
                let entry = next.entry(mask | bit).or_insert_with(|| template.zero_like());
                *entry = if left % 2 == 1 { entry.sub(&term) } else { entry.add(&term) };
            }
        }
        minors = next;
    }
    let full = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    minors.remove(&full).unwrap_or_else(|| template.zero_like())
}

fn permute(p: &mut Vec<usize>, k: usize, f: &mut dyn FnMut(&[usize])) {
    if k == p.len() {
        f(p);
        return;
    }
    for i in k..p.len() {
        p.swap(k, i);
        permute(p, k + 1, f);
        p.swap(k, i);
    }
}

fn parity_odd(p: &[usize]) -> bool {
    let mut inv = 0;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if p[i] > p[j] {
                inv += 1;
            }
        }
    }
    inv % 2 == 1
}

impl MatTrigPoly {
    pub fn dim(&self) -> usize {
        self.data[0].dim()
    }

    /// Constant matrix from exact complex-rational entries.
    pub fn constant(dim: usize, rows: usize, cols: usize, f: impl Fn(usize, usize) -> Cq) -> Self {
        Mat::from_fn(rows, cols, |i, j| TrigPoly::constant(dim, f(i, j)))
    }

    pub fn identity(dim: usize, n: usize) -> Self {
        Mat::identity_like(n, &TrigPoly::zero(dim))
    }

    /// Elementwise circle-conjugation.
    pub fn circle_conj(&self) -> Self {
        self.map(|p| p.circle_conj())
    }

    /// Scale every entry by the polynomial `p`.
    pub fn scale_poly(&self, p: &TrigPoly) -> Self {
        self.scale(p)
    }

    pub fn eval(&self, z: &[Complex64]) -> Result<DMatrix<Complex64>> {
        crate::trigpoly::check_on_circle(z, self.dim())?;
        Ok(self.eval_unchecked(z))
    }

    pub fn eval_unchecked(&self, z: &[Complex64]) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j).eval_unchecked(z))
    }

    /// Per-variable maximum degree over all entries.
    pub fn degree(&self) -> Vec<u32> {
        let mut n = vec![0; self.dim()];
        for p in &self.data {
            for (a, b) in n.iter_mut().zip(p.degree()) {
                *a = (*a).max(b);
            }
        }
        n
    }
}

/// Exact Laurent-polynomial division `N / D`.
///
/// Both operands are shifted into the nonnegative orthant, then the quotient
/// is recovered term by term from the lexicographically largest monomial of
/// the divisor. Errors with [`Error::NotDivisible`] when no polynomial
/// quotient exists.
pub fn exact_div(num: &TrigPoly, den: &TrigPoly) -> Result<TrigPoly> {
    if num.dim() != den.dim() {
        return Err(Error::DimensionMismatch {
            expected: num.dim(),
            found: den.dim(),
        });
    }
    let (dlo, _) = den.exponent_bounds().ok_or(Error::ZeroDivisor)?;
    let Some((nlo, _)) = num.exponent_bounds() else {
        return Ok(TrigPoly::zero(num.dim()));
    };
    let dshift = DegreeTuple(dlo.iter().map(|x| -x).collect());
    let nshift = DegreeTuple(nlo.iter().map(|x| -x).collect());
    let d = den.shift(&dshift);
    let mut rem = num.shift(&nshift);

    let (lead_deg, lead_coef) = d
        .terms()
        .max_by(|a, b| a.0.cmp(b.0))
        .map(|(k, v)| (k.clone(), v.clone()))
        .expect("nonzero divisor");
    let lead_inv = lead_coef.inv().expect("nonzero leading coefficient");

    let mut quot = TrigPoly::zero(num.dim());
    // Each step removes the current lexicographic maximum of the remainder,
    // so the loop terminates (lex order is a well-order on N^L).
    while let Some((rd, rc)) = rem
        .terms()
        .max_by(|a, b| a.0.cmp(b.0))
        .map(|(k, v)| (k.clone(), v.clone()))
    {
        let qd = rd.sub(&lead_deg);
        if qd.0.iter().any(|&x| x < 0) {
            return Err(Error::NotDivisible);
        }
        let qc = &rc * &lead_inv;
        let step = d.shift(&qd).scale(&qc);
        rem = &rem - &step;
        quot.add_term(qd, &qc);
    }
    // Undo the shifts: N = z^{nlo} N', D = z^{dlo} D', Q = z^{nlo - dlo} Q'.
    let back = DegreeTuple(nlo.iter().zip(&dlo).map(|(a, b)| a - b).collect());
    Ok(quot.shift(&back))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k(p: i64, q: i64) -> TrigPoly {
        TrigPoly::constant(2, Cq::ratio(p, q))
    }

    fn z(var: usize, pow: i32) -> TrigPoly {
        TrigPoly::var(2, var, pow)
    }

    #[test]
    fn det_of_identity() {
        for n in 1..=5 {
            assert_eq!(MatTrigPoly::identity(2, n).det().unwrap(), TrigPoly::one(2));
        }
    }

    #[test]
    fn diagonal_delta_has_unit_determinant() {
        let zero = k(0, 1);
        let m = Mat::from_vec(
            4,
            4,
            vec![
                z(0, 1), zero.clone(), zero.clone(), zero.clone(),
                zero.clone(), z(0, -1), zero.clone(), zero.clone(),
                zero.clone(), zero.clone(), z(1, 1), zero.clone(),
                zero.clone(), zero.clone(), zero.clone(), z(1, -1),
            ],
        )
        .unwrap();
        assert_eq!(m.det().unwrap(), TrigPoly::one(2));
    }

    #[test]
    fn adjugate_of_diagonal() {
        let zero = k(0, 1);
        let m = Mat::from_vec(2, 2, vec![z(0, 1), zero.clone(), zero.clone(), z(0, -1)]).unwrap();
        let want = Mat::from_vec(2, 2, vec![z(0, -1), zero.clone(), zero, z(0, 1)]).unwrap();
        assert_eq!(m.adjugate().unwrap(), want);
        let id = MatTrigPoly::identity(2, 3);
        assert_eq!(id.adjugate().unwrap(), id);
    }

    #[test]
    fn non_square_and_size_limit() {
        let m = Mat::from_fn(2, 3, |_, _| k(1, 1));
        assert!(matches!(m.det(), Err(Error::NotSquare { .. })));
        assert!(matches!(m.adjugate(), Err(Error::NotSquare { .. })));
        let big = MatTrigPoly::identity(1, 17);
        assert!(matches!(big.det(), Err(Error::SizeLimit { size: 17, limit: 16 })));
        assert_eq!(MatTrigPoly::identity(1, 16).det().unwrap(), TrigPoly::one(1));
    }

    #[test]
    fn kron_identity_and_scalar() {
        let i2 = MatTrigPoly::identity(2, 2);
        assert_eq!(i2.kron(&i2), MatTrigPoly::identity(2, 4));
        let a = Mat::from_vec(2, 2, vec![z(0, 1), k(1, 2), k(-3, 1), z(1, -1)]).unwrap();
        let c = Mat::from_vec(1, 1, vec![k(5, 3)]).unwrap();
        assert_eq!(a.kron(&c), a.scale(&k(5, 3)));
    }

    #[test]
    fn exact_division_examples() {
        let p = &(&z(0, 1) - &z(0, -1)) + &k(0, 1);
        assert_eq!(exact_div(&p, &p).unwrap(), TrigPoly::one(2));
        assert_eq!(exact_div(&p, &TrigPoly::one(2)).unwrap(), p);
        assert!(matches!(exact_div(&p, &TrigPoly::zero(2)), Err(Error::ZeroDivisor)));
        let q = &z(0, 1) + &k(1, 1);
        assert!(matches!(exact_div(&TrigPoly::one(2), &q), Err(Error::NotDivisible)));
        assert_eq!(exact_div(&TrigPoly::zero(2), &q).unwrap(), TrigPoly::zero(2));
    }

    #[test]
    fn exact_division_by_monomial() {
        let p = &z(0, 2) + &z(1, -1);
        let m = z(0, -3);
        let q = exact_div(&p, &m).unwrap();
        assert_eq!(&q * &m, p);
    }

    #[test]
    fn matmul_shapes() {
        let a = Mat::from_fn(2, 3, |_, _| k(1, 1));
        let b = Mat::from_fn(3, 1, |_, _| k(2, 1));
        let c = a.matmul(&b).unwrap();
        assert_eq!(c.rows(), 2);
        assert_eq!(*c.get(1, 0), k(6, 1));
        assert!(b.matmul(&b).is_err());
    }
}

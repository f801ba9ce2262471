//! Sparse multivariate trigonometric (Laurent) polynomials on the unit
//! L-circle with exact complex-rational coefficients.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{parse_rational, rat_to_text, Cq};

/// Exponent tuple `(d_1, ..., d_L)` of a monomial `z_1^{d_1} ... z_L^{d_L}`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct DegreeTuple(pub Vec<i32>);

impl DegreeTuple {
    pub fn zero(dim: usize) -> Self {
        DegreeTuple(vec![0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&d| d == 0)
    }

    pub fn neg(&self) -> Self {
        DegreeTuple(self.0.iter().map(|d| -d).collect())
    }

    pub fn add(&self, o: &Self) -> Self {
        DegreeTuple(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        DegreeTuple(self.0.iter().zip(&o.0).map(|(a, b)| a - b).collect())
    }

    /// True for the canonical representative of the pair `{d, -d}`: the first
    /// nonzero component is positive. The zero tuple is not in the upper half.
    pub fn is_upper_half(&self) -> bool {
        self.0.iter().find(|&&d| d != 0).is_some_and(|&d| d > 0)
    }
}

impl From<Vec<i32>> for DegreeTuple {
    fn from(v: Vec<i32>) -> Self {
        DegreeTuple(v)
    }
}

impl fmt::Display for DegreeTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|d| d.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Trigonometric polynomial `Σ_d c_d z^d` in canonical sparse form (no zero
/// coefficient is ever stored).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TrigPoly {
    dim: usize,
    terms: BTreeMap<DegreeTuple, Cq>,
}

impl TrigPoly {
    pub fn zero(dim: usize) -> Self {
        TrigPoly {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(dim: usize) -> Self {
        TrigPoly::constant(dim, Cq::one())
    }

    pub fn constant(dim: usize, c: Cq) -> Self {
        TrigPoly::monomial(DegreeTuple::zero(dim), c)
    }

    pub fn monomial(d: DegreeTuple, c: Cq) -> Self {
        let dim = d.dim();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(d, c);
        }
        TrigPoly { dim, terms }
    }

    /// `z_var^power` (0-based variable index).
    pub fn var(dim: usize, var: usize, power: i32) -> Self {
        let mut d = vec![0; dim];
        d[var] = power;
        TrigPoly::monomial(DegreeTuple(d), Cq::one())
    }

    /// Build from arbitrary terms; duplicates are summed and zeros dropped.
    pub fn from_terms<I>(dim: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (DegreeTuple, Cq)>,
    {
        let mut p = TrigPoly::zero(dim);
        for (d, c) in terms {
            if d.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: d.dim(),
                });
            }
            p.add_term(d, &c);
        }
        Ok(p)
    }

    /// Like [`TrigPoly::from_terms`] but errors unless the result satisfies
    /// `c(-d) = conj(c(d))` exactly.
    pub fn hermitian_from_terms<I>(dim: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (DegreeTuple, Cq)>,
    {
        let p = TrigPoly::from_terms(dim, terms)?;
        p.check_hermitian()?;
        Ok(p)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> impl Iterator<Item = (&DegreeTuple, &Cq)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, d: &DegreeTuple) -> Cq {
        self.terms.get(d).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Add `c·z^d` in place, keeping the canonical form.
    pub fn add_term(&mut self, d: DegreeTuple, c: &Cq) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&d) {
            Some(v) => {
                *v += c;
                if v.is_zero() {
                    self.terms.remove(&d);
                }
            }
            None => {
                self.terms.insert(d, c.clone());
            }
        }
    }

    /// Per-variable degree `n_i = max |d_i|` over stored terms.
    pub fn degree(&self) -> Vec<u32> {
        let mut n = vec![0u32; self.dim];
        for d in self.terms.keys() {
            for (ni, di) in n.iter_mut().zip(&d.0) {
                *ni = (*ni).max(di.unsigned_abs());
            }
        }
        n
    }

    /// Per-variable minimum and maximum exponent; `None` for the zero polynomial.
    pub fn exponent_bounds(&self) -> Option<(Vec<i32>, Vec<i32>)> {
        let mut it = self.terms.keys();
        let first = it.next()?;
        let mut lo = first.0.clone();
        let mut hi = first.0.clone();
        for d in it {
            for i in 0..self.dim {
                lo[i] = lo[i].min(d.0[i]);
                hi[i] = hi[i].max(d.0[i]);
            }
        }
        Some((lo, hi))
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|d| d.is_zero())
    }

    pub fn constant_term(&self) -> Cq {
        self.coeff(&DegreeTuple::zero(self.dim))
    }

    /// True iff the polynomial is a real constant `≤ 0` (zero included).
    pub fn is_nonpositive_constant(&self) -> bool {
        if !self.is_constant() {
            return false;
        }
        let c = self.constant_term();
        c.is_real() && !c.re.is_positive()
    }

    pub fn is_hermitian(&self) -> bool {
        self.check_hermitian().is_ok()
    }

    pub fn check_hermitian(&self) -> Result<()> {
        for (d, c) in &self.terms {
            let mirror = self.coeff(&d.neg());
            if mirror != c.conj() {
                return Err(Error::NotHermitian { degree: d.0.clone() });
            }
        }
        Ok(())
    }

    fn check_dim(&self, o: &TrigPoly) -> Result<()> {
        if self.dim != o.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: o.dim,
            });
        }
        Ok(())
    }

    pub fn try_add(&self, o: &TrigPoly) -> Result<TrigPoly> {
        self.check_dim(o)?;
        let mut r = self.clone();
        for (d, c) in &o.terms {
            r.add_term(d.clone(), c);
        }
        Ok(r)
    }

    pub fn try_sub(&self, o: &TrigPoly) -> Result<TrigPoly> {
        self.check_dim(o)?;
        let mut r = self.clone();
        for (d, c) in &o.terms {
            r.add_term(d.clone(), &-c);
        }
        Ok(r)
    }

    /// Exact coefficient convolution.
    pub fn try_mul(&self, o: &TrigPoly) -> Result<TrigPoly> {
        self.check_dim(o)?;
        let mut r = TrigPoly::zero(self.dim);
        for (da, ca) in &self.terms {
            for (db, cb) in &o.terms {
                r.add_term(da.add(db), &(ca * cb));
            }
        }
        Ok(r)
    }

    pub fn scale(&self, k: &Cq) -> TrigPoly {
        if k.is_zero() {
            return TrigPoly::zero(self.dim);
        }
        TrigPoly {
            dim: self.dim,
            terms: self.terms.iter().map(|(d, c)| (d.clone(), c * k)).collect(),
        }
    }

    pub fn scale_rat(&self, k: &BigRational) -> TrigPoly {
        self.scale(&Cq::real(k.clone()))
    }

    /// Multiply by the monomial `z^d`.
    pub fn shift(&self, d: &DegreeTuple) -> TrigPoly {
        TrigPoly {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.add(d), c.clone()))
                .collect(),
        }
    }

    /// Pointwise complex conjugation on the torus: `c'(d) = conj(c(-d))`.
    pub fn circle_conj(&self) -> TrigPoly {
        TrigPoly {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .map(|(d, c)| (d.neg(), c.conj()))
                .collect(),
        }
    }

    /// Evaluate at a point of `T^L` in double precision.
    pub fn eval(&self, z: &[Complex64]) -> Result<Complex64> {
        check_on_circle(z, self.dim)?;
        Ok(self.eval_unchecked(z))
    }

    /// Evaluation without the unit-modulus check (also used for `z` off the circle
    /// by the numeric oracles, where Laurent evaluation is still well defined).
    pub fn eval_unchecked(&self, z: &[Complex64]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (d, c) in &self.terms {
            let mut m = c.to_c64();
            for (zi, &di) in z.iter().zip(&d.0) {
                if di != 0 {
                    m *= zi.powi(di);
                }
            }
            acc += m;
        }
        acc
    }

    /// Canonical text form: one `p/q/r/s@d1,...,dL` line per term, terms in
    /// lexicographic degree order.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (d, c) in &self.terms {
            let degs: Vec<String> = d.0.iter().map(|x| x.to_string()).collect();
            out.push_str(&format!(
                "{}/{}@{}\n",
                rat_to_text(&c.re),
                rat_to_text(&c.im),
                degs.join(",")
            ));
        }
        out
    }

    /// Parse the text form. Coefficients are either `p/q/r/s` (real and
    /// imaginary rationals) or `a/b` with integer or decimal parts.
    pub fn parse_text(text: &str, dim: usize) -> Result<TrigPoly> {
        let mut p = TrigPoly::zero(dim);
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |m: &str| Error::Parse(format!("line {}: {m}", lineno + 1));
            let (coef, degs) = line.split_once('@').ok_or_else(|| err("missing '@'"))?;
            let fields: Vec<&str> = coef.split('/').collect();
            let (re, im) = match fields.as_slice() {
                [a, b] => (parse_rational(a)?, parse_rational(b)?),
                [p, q, r, s] => (
                    parse_rational(&format!("{p}/{q}"))?,
                    parse_rational(&format!("{r}/{s}"))?,
                ),
                _ => return Err(err("coefficient must be 're/im' or 'p/q/r/s'")),
            };
            let d: Vec<i32> = degs
                .split(',')
                .map(|s| s.trim().parse::<i32>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| err("bad degree tuple"))?;
            if d.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: d.len(),
                });
            }
            p.add_term(DegreeTuple(d), &Cq::new(re, im));
        }
        Ok(p)
    }

    /// Largest coefficient modulus (double precision).
    pub fn max_abs_coeff(&self) -> f64 {
        self.terms
            .values()
            .map(|c| c.abs_f64())
            .fold(0.0, f64::max)
    }

    /// Sum of coefficient moduli, an upper bound of `|P(z)|` on the torus.
    pub fn l1_norm(&self) -> f64 {
        self.terms.values().map(|c| c.abs_f64()).sum()
    }
}

pub(crate) fn check_on_circle(z: &[Complex64], dim: usize) -> Result<()> {
    if z.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: z.len(),
        });
    }
    for (i, zi) in z.iter().enumerate() {
        let m = zi.norm();
        if (m - 1.0).abs() > 1e-12 {
            return Err(Error::OffCircle { index: i, modulus: m });
        }
    }
    Ok(())
}

impl fmt::Display for TrigPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (d, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})")?;
            for (i, &di) in d.0.iter().enumerate() {
                if di != 0 {
                    write!(f, "·z{}^{}", i + 1, di)?;
                }
            }
        }
        Ok(())
    }
}

// Operator sugar panics on dimension mismatch; the `try_*` forms report it.
impl Add for &TrigPoly {
    type Output = TrigPoly;
    fn add(self, o: &TrigPoly) -> TrigPoly {
        self.try_add(o).expect("TrigPoly dimension mismatch")
    }
}

impl Sub for &TrigPoly {
    type Output = TrigPoly;
    fn sub(self, o: &TrigPoly) -> TrigPoly {
        self.try_sub(o).expect("TrigPoly dimension mismatch")
    }
}

impl Mul for &TrigPoly {
    type Output = TrigPoly;
    fn mul(self, o: &TrigPoly) -> TrigPoly {
        self.try_mul(o).expect("TrigPoly dimension mismatch")
    }
}

impl Neg for &TrigPoly {
    type Output = TrigPoly;
    fn neg(self) -> TrigPoly {
        TrigPoly {
            dim: self.dim,
            terms: self.terms.iter().map(|(d, c)| (d.clone(), -c)).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(p: i64, q: i64) -> Cq {
        Cq::ratio(p, q)
    }

    fn d(v: &[i32]) -> DegreeTuple {
        DegreeTuple(v.to_vec())
    }

    #[test]
    fn adding_zero_is_identity() {
        let p = TrigPoly::from_terms(2, [(d(&[1, -1]), c(3, 2)), (d(&[0, 0]), c(-1, 1))]).unwrap();
        assert_eq!(&p + &TrigPoly::zero(2), p);
    }

    #[test]
    fn z_plus_zinv_is_hermitian() {
        let p = &TrigPoly::var(1, 0, 1) + &TrigPoly::var(1, 0, -1);
        assert!(p.is_hermitian());
        assert_eq!(p.coeff(&d(&[1])), Cq::one());
        assert_eq!(p.coeff(&d(&[-1])), Cq::one());
        assert!(!TrigPoly::var(1, 0, 1).is_hermitian());
    }

    #[test]
    fn hand_convolution() {
        let a = TrigPoly::from_terms(1, [(d(&[0]), c(1, 1)), (d(&[1]), c(1, 2))]).unwrap();
        let b = TrigPoly::from_terms(1, [(d(&[0]), c(1, 1)), (d(&[-1]), c(1, 2))]).unwrap();
        let p = &a * &b;
        let want = TrigPoly::from_terms(
            1,
            [(d(&[-1]), c(1, 2)), (d(&[0]), c(5, 4)), (d(&[1]), c(1, 2))],
        )
        .unwrap();
        assert_eq!(p, want);
        assert_eq!(&p * &TrigPoly::one(1), p);
    }

    #[test]
    fn circle_conj_examples() {
        let k = TrigPoly::constant(2, c(7, 3));
        assert_eq!(k.circle_conj(), k);
        assert_eq!(TrigPoly::var(1, 0, 1).circle_conj(), TrigPoly::var(1, 0, -1));
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let a = TrigPoly::one(1);
        let b = TrigPoly::one(2);
        assert!(matches!(a.try_add(&b), Err(Error::DimensionMismatch { .. })));
        assert!(matches!(a.try_mul(&b), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn eval_constant_and_off_circle() {
        let p = TrigPoly::constant(2, c(143, 32));
        let z = [Complex64::from_polar(1.0, 0.3), Complex64::from_polar(1.0, -2.0)];
        assert_eq!(p.eval(&z).unwrap(), Complex64::new(4.46875, 0.0));
        let bad = [Complex64::new(1.1, 0.0), Complex64::new(1.0, 0.0)];
        assert!(matches!(p.eval(&bad), Err(Error::OffCircle { index: 0, .. })));
    }

    #[test]
    fn nonpositive_constant_check() {
        assert!(TrigPoly::constant(1, c(-2, 1)).is_nonpositive_constant());
        assert!(TrigPoly::zero(1).is_nonpositive_constant());
        assert!(!TrigPoly::constant(2, c(4, 1)).is_nonpositive_constant());
        assert!(!TrigPoly::var(1, 0, 1).is_nonpositive_constant());
        assert!(!TrigPoly::constant(1, Cq::i()).is_nonpositive_constant());
    }

    #[test]
    fn hermitian_construction_is_checked() {
        let ok = TrigPoly::hermitian_from_terms(
            1,
            [(d(&[1]), Cq::i()), (d(&[-1]), -Cq::i()), (d(&[0]), c(1, 1))],
        );
        assert!(ok.is_ok());
        let bad = TrigPoly::hermitian_from_terms(1, [(d(&[1]), Cq::i()), (d(&[-1]), Cq::i())]);
        assert!(matches!(bad, Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn text_format() {
        let p = TrigPoly::from_terms(
            2,
            [(d(&[2, 2]), c(1, 64)), (d(&[-2, -2]), c(1, 64)), (d(&[0, 0]), c(143, 32))],
        )
        .unwrap();
        let t = p.to_text();
        assert_eq!(t, "1/64/0/1@-2,-2\n143/32/0/1@0,0\n1/64/0/1@2,2\n");
        assert_eq!(TrigPoly::parse_text(&t, 2).unwrap(), p);
        let short = TrigPoly::parse_text("0.25/0@1,1\n0.25/0@-1,-1\n20/0@0,0", 2).unwrap();
        assert_eq!(short.constant_term(), c(20, 1));
        assert!(TrigPoly::parse_text("1/0@1", 2).is_err());
        assert!(TrigPoly::parse_text("1@1,1", 2).is_err());
    }

    #[test]
    fn degree_is_max_abs_exponent() {
        let p = TrigPoly::from_terms(2, [(d(&[-3, 1]), c(1, 1)), (d(&[2, -2]), c(1, 1))]).unwrap();
        assert_eq!(p.degree(), vec![3, 2]);
        assert_eq!(p.exponent_bounds(), Some((vec![-3, -2], vec![2, 1])));
    }
}

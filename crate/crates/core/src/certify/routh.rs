//! Routh–Hurwitz table over trigonometric polynomials.
//!
//! Entries are rational functions whose denominators are kept as explicit
//! lists of earlier leading entries; common factors are only ever removed
//! by structural equality or by a successful exact division.

use crate::error::{Error, Result};
use crate::matpoly::exact_div;
use crate::trigpoly::TrigPoly;

#[derive(Clone, Debug, PartialEq)]
struct RatFn {
    num: TrigPoly,
    den: Vec<TrigPoly>,
}

/// `a \ b` as multisets (structural equality).
fn multiset_minus(a: &[TrigPoly], b: &[TrigPoly]) -> Vec<TrigPoly> {
    let mut used = vec![false; b.len()];
    let mut out = Vec::new();
    'outer: for x in a {
        for (k, y) in b.iter().enumerate() {
            if !used[k] && x == y {
                used[k] = true;
                continue 'outer;
            }
        }
        out.push(x.clone());
    }
    out
}

fn product(dim: usize, fs: &[TrigPoly]) -> TrigPoly {
    fs.iter().fold(TrigPoly::one(dim), |acc, f| &acc * f)
}

impl RatFn {
    fn poly(p: TrigPoly) -> Self {
        RatFn { num: p, den: Vec::new() }
    }

    fn dim(&self) -> usize {
        self.num.dim()
    }

    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// Remove denominator factors that divide the numerator exactly.
    fn reduce(mut self) -> Self {
        if self.num.is_zero() {
            self.den.clear();
            return self;
        }
        let mut kept = Vec::new();
        for f in std::mem::take(&mut self.den) {
            match exact_div(&self.num, &f) {
                Ok(q) => self.num = q,
                Err(_) => kept.push(f),
            }
        }
        self.den = kept;
        self
    }

    fn mul(&self, o: &RatFn) -> RatFn {
        if self.is_zero() || o.is_zero() {
            return RatFn::poly(TrigPoly::zero(self.dim()));
        }
        let mut den = self.den.clone();
        den.extend(o.den.iter().cloned());
        RatFn {
            num: &self.num * &o.num,
            den,
        }
    }

    fn sub(&self, o: &RatFn) -> RatFn {
        let dim = self.dim();
        if o.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return RatFn {
                num: -&o.num,
                den: o.den.clone(),
            };
        }
        // lcm as multiset union
        let extra_for_self = multiset_minus(&o.den, &self.den);
        let extra_for_o = multiset_minus(&self.den, &o.den);
        let mut den = self.den.clone();
        den.extend(extra_for_self.iter().cloned());
        let num = &(&self.num * &product(dim, &extra_for_self)) - &(&o.num * &product(dim, &extra_for_o));
        RatFn { num, den }.reduce()
    }

    /// `self / o`, `o` nonzero.
    fn div(&self, o: &RatFn) -> RatFn {
        let dim = self.dim();
        if self.is_zero() {
            return self.clone();
        }
        let cancel_self = multiset_minus(&self.den, &o.den);
        let moved_up = multiset_minus(&o.den, &self.den);
        let mut den = cancel_self;
        den.push(o.num.clone());
        RatFn {
            num: &self.num * &product(dim, &moved_up),
            den,
        }
        .reduce()
    }
}

/// Cleared Routh table of `φ(λ, z)`.
#[derive(Clone, Debug, PartialEq)]
pub struct RouthTable {
    /// `ē_{i,0}`, `i = 0..=2n₀`.
    pub ebar: Vec<TrigPoly>,
    /// `ê_{i,0} = Π_{k = i−1, i−3, …} ē_{k,0}`.
    pub ehat: Vec<TrigPoly>,
    /// Rows `i` whose `ē_{i,0}` is not constant, and those polynomials (the `F_k`).
    pub nonconstant_rows: Vec<usize>,
    pub nonconstant_polys: Vec<TrigPoly>,
    /// The set 𝒩: rows whose `ē_{i,0}` is a nonpositive constant.
    pub nonpositive_set: Vec<usize>,
}

impl RouthTable {
    pub fn n_f(&self) -> usize {
        self.nonconstant_polys.len()
    }
}

/// Build the table from `φ_0, …, φ_{2n₀}` (ascending powers of λ).
///
/// Rows: `e_{0,j} = φ_{2n₀−2j}`, `e_{1,j} = φ_{2n₀−2j−1}`, then
/// `e_{i,j} = (e_{i−1,0} e_{i−2,j+1} − e_{i−2,0} e_{i−1,j+1}) / e_{i−1,0}`.
/// A leading entry that vanishes identically before the last row stops the
/// recursion with [`Error::DegenerateRouthTable`].
pub fn routh_table(phi: &[TrigPoly]) -> Result<RouthTable> {
    if phi.len() < 3 || phi.len().is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!(
            "φ must have 2n₀+1 ≥ 3 coefficients, got {}",
            phi.len()
        )));
    }
    let dim = phi[0].dim();
    let deg = phi.len() - 1;
    let n0 = deg / 2;
    if phi[deg] != TrigPoly::one(dim) {
        return Err(Error::InvalidArgument("φ must be monic in λ".into()));
    }
    let zero = || RatFn::poly(TrigPoly::zero(dim));
    let row_len = |i: usize| (deg - i) / 2 + 1;
    let mut e: Vec<Vec<RatFn>> = Vec::with_capacity(deg + 1);
    e.push((0..row_len(0)).map(|j| RatFn::poly(phi[deg - 2 * j].clone())).collect());
    e.push((0..row_len(1)).map(|j| RatFn::poly(phi[deg - 2 * j - 1].clone())).collect());
    let get = |e: &Vec<Vec<RatFn>>, i: usize, j: usize| e[i].get(j).cloned().unwrap_or_else(zero);
    for i in 2..=deg {
        let lead = &e[i - 1][0];
        if lead.is_zero() {
            return Err(Error::DegenerateRouthTable { row: i - 1 });
        }
        let row: Vec<RatFn> = (0..row_len(i))
            .map(|j| {
                let a = lead.mul(&get(&e, i - 2, j + 1));
                let b = e[i - 2][0].mul(&get(&e, i - 1, j + 1));
                a.sub(&b).div(lead)
            })
            .collect();
        e.push(row);
    }

    let mut ebar: Vec<TrigPoly> = Vec::with_capacity(deg + 1);
    let mut ehat: Vec<TrigPoly> = Vec::with_capacity(deg + 1);
    for i in 0..=deg {
        let hat = (0..i)
            .rev()
            .step_by(2)
            .fold(TrigPoly::one(dim), |acc, k| &acc * &ebar[k]);
        let lead = &e[i][0];
        let num = &lead.num * &hat;
        let den = product(dim, &lead.den);
        ebar.push(exact_div(&num, &den)?);
        ehat.push(hat);
    }

    let mut nonconstant_rows = Vec::new();
    let mut nonconstant_polys = Vec::new();
    let mut nonpositive_set = Vec::new();
    for (i, p) in ebar.iter().enumerate() {
        if p.is_nonpositive_constant() {
            nonpositive_set.push(i);
        } else if !p.is_constant() {
            nonconstant_rows.push(i);
            nonconstant_polys.push(p.clone());
        }
    }
    debug_assert_eq!(ebar.len(), 2 * n0 + 1);
    Ok(RouthTable {
        ebar,
        ehat,
        nonconstant_rows,
        nonconstant_polys,
        nonpositive_set,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::Cq;

    fn consts(c: &[i64]) -> Vec<TrigPoly> {
        c.iter().map(|&v| TrigPoly::constant(1, Cq::from_int(v))).collect()
    }

    /// Scalar Routh array on floats, the textbook recursion.
    fn scalar_routh(asc: &[f64]) -> Vec<f64> {
        let deg = asc.len() - 1;
        let mut rows: Vec<Vec<f64>> = vec![
            (0..=deg / 2).map(|j| asc[deg - 2 * j]).collect(),
            (0..=(deg - 1) / 2).map(|j| asc[deg - 2 * j - 1]).collect(),
        ];
        for i in 2..=deg {
            let g = |r: &Vec<f64>, j: usize| r.get(j).copied().unwrap_or(0.0);
            let (p, q) = (&rows[i - 2], &rows[i - 1]);
            let row: Vec<f64> = (0..=(deg - i) / 2)
                .map(|j| (q[0] * g(p, j + 1) - p[0] * g(q, j + 1)) / q[0])
                .collect();
            rows.push(row);
        }
        rows.iter().map(|r| r[0]).collect()
    }

    #[test]
    fn stable_quartic() {
        // (λ+1)⁴
        let t = routh_table(&consts(&[1, 4, 6, 4, 1])).unwrap();
        assert!(t.nonpositive_set.is_empty());
        assert_eq!(t.n_f(), 0);
        assert!(t.ebar.iter().all(|p| p.is_constant() && num_traits::Signed::is_positive(&p.constant_term().re)));
        // ē_i = e_{i,0}·ê_i with the scalar leading column
        let lead = scalar_routh(&[1.0, 4.0, 6.0, 4.0, 1.0]);
        for (i, p) in t.ebar.iter().enumerate() {
            let got = crate::rational::rat_to_f64(&p.constant_term().re);
            let hat = crate::rational::rat_to_f64(&t.ehat[i].constant_term().re);
            assert!((got - lead[i] * hat).abs() < 1e-9);
        }
    }

    #[test]
    fn unstable_quartic_has_nonpositive_row() {
        // (λ−1)²(λ+1)² = λ⁴ − 2λ² + 1
        match routh_table(&consts(&[1, 0, -2, 0, 1])) {
            Ok(t) => assert!(!t.nonpositive_set.is_empty()),
            Err(Error::DegenerateRouthTable { .. }) => {}
            Err(e) => panic!("{e}"),
        }
        // (λ−1)(λ+2)(λ+3)(λ+4) = λ⁴ + 8λ³ + 17λ² − 2λ − 24
        let t = routh_table(&consts(&[-24, -2, 17, 8, 1])).unwrap();
        assert!(!t.nonpositive_set.is_empty());
    }

    #[test]
    fn zero_leading_entry_is_degenerate() {
        // λ² + 1: row 1 is identically zero.
        assert!(matches!(
            routh_table(&consts(&[1, 0, 1])),
            Err(Error::DegenerateRouthTable { row: 1 })
        ));
    }

    #[test]
    fn non_monic_is_rejected() {
        assert!(routh_table(&consts(&[1, 2, 3])).is_err());
        assert!(routh_table(&consts(&[1, 1])).is_err());
    }
}

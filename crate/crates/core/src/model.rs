//! The spatially interconnected plant: system matrices, interconnection
//! structure per spatial direction, and the symbolic objects `Δ(z)`, `h(z)`,
//! `H(z)` derived from them.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matpoly::{MatTrigPoly, DEFAULT_DET_LIMIT};
use crate::rational::{rat_to_f64, Cq};
use crate::trigpoly::TrigPoly;

/// Dense exact-rational matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigRational>,
}

impl RatMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<BigRational>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::ShapeMismatch {
                what: "rational matrix".into(),
                expected: format!("{} entries", rows * cols),
                found: format!("{}", data.len()),
            });
        }
        Ok(RatMatrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMatrix {
            rows,
            cols,
            data: vec![BigRational::zero(); rows * cols],
        }
    }

    /// Build from rows of `(numerator, denominator)` pairs, handy in tests.
    pub fn from_ratios(rows: &[&[(i64, i64)]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let data = rows
            .iter()
            .flat_map(|row| {
                row.iter()
                    .map(|&(p, q)| BigRational::new(p.into(), q.into()))
            })
            .collect();
        RatMatrix { rows: r, cols: c, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigRational {
        &self.data[i * self.cols + j]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        RatMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * k).collect(),
        }
    }

    pub fn to_f64(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| rat_to_f64(self.get(i, j)))
    }

    pub fn to_c64(&self) -> DMatrix<Complex64> {
        self.to_f64().map(|x| Complex64::new(x, 0.0))
    }

    pub fn to_trig(&self, dim: usize) -> MatTrigPoly {
        MatTrigPoly::constant(dim, self.rows, self.cols, |i, j| Cq::real(self.get(i, j).clone()))
    }
}

/// Interconnection type of one spatial direction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DirectionKind {
    Infinite,
    /// Cyclic index set `{1, ..., N}`.
    Periodic(u32),
    /// Finite extent with a boundary-conditions matrix; carried in the data
    /// model only, the analyses reject it.
    Finite { extent: u32 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DirectionSpec {
    pub kind: DirectionKind,
    /// Width of the forward channel `v_i`.
    pub n_pos: usize,
    /// Width of the backward channel `v_{-i}`.
    pub n_neg: usize,
}

impl DirectionSpec {
    pub fn infinite(n_pos: usize, n_neg: usize) -> Self {
        DirectionSpec {
            kind: DirectionKind::Infinite,
            n_pos,
            n_neg,
        }
    }

    pub fn periodic(period: u32, n_pos: usize, n_neg: usize) -> Self {
        DirectionSpec {
            kind: DirectionKind::Periodic(period),
            n_pos,
            n_neg,
        }
    }

    pub fn width(&self) -> usize {
        self.n_pos + self.n_neg
    }

    pub fn period(&self) -> Option<u32> {
        match self.kind {
            DirectionKind::Periodic(n) => Some(n),
            _ => None,
        }
    }
}

/// Boundary-conditions matrix of a finite-extent direction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundarySpec {
    pub direction: usize,
    pub matrix: RatMatrix,
}

/// Label of one interconnection channel row, in `(v_1; v_-1; ...; v_L; v_-L)` order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ChannelLabel {
    /// 0-based spatial direction.
    pub direction: usize,
    pub forward: bool,
    /// Index within the channel block.
    pub index: usize,
}

/// The plant `Σ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SisModel {
    n0: usize,
    a_tt: RatMatrix,
    a_ts: RatMatrix,
    a_st: RatMatrix,
    a_ss: RatMatrix,
    directions: Vec<DirectionSpec>,
    boundaries: Vec<BoundarySpec>,
}

fn shape_check(name: &str, m: &RatMatrix, rows: usize, cols: usize) -> Result<()> {
    if m.rows != rows || m.cols != cols {
        return Err(Error::ShapeMismatch {
            what: name.to_string(),
            expected: format!("{rows}x{cols}"),
            found: format!("{}x{}", m.rows, m.cols),
        });
    }
    Ok(())
}

impl SisModel {
    pub fn new(
        a_tt: RatMatrix,
        a_ts: RatMatrix,
        a_st: RatMatrix,
        a_ss: RatMatrix,
        directions: Vec<DirectionSpec>,
    ) -> Result<Self> {
        Self::with_boundaries(a_tt, a_ts, a_st, a_ss, directions, Vec::new())
    }

    pub fn with_boundaries(
        a_tt: RatMatrix,
        a_ts: RatMatrix,
        a_st: RatMatrix,
        a_ss: RatMatrix,
        directions: Vec<DirectionSpec>,
        boundaries: Vec<BoundarySpec>,
    ) -> Result<Self> {
        if directions.is_empty() {
            return Err(Error::InvalidModel("at least one spatial direction is required".into()));
        }
        for (i, d) in directions.iter().enumerate() {
            if d.width() == 0 {
                return Err(Error::InvalidModel(format!(
                    "direction {} has no interconnection channels (n_pos + n_neg = 0)",
                    i + 1
                )));
            }
            match d.kind {
                DirectionKind::Periodic(0) => {
                    return Err(Error::InvalidModel(format!(
                        "direction {} is periodic with period 0",
                        i + 1
                    )))
                }
                DirectionKind::Finite { extent: 0 } => {
                    return Err(Error::InvalidModel(format!(
                        "direction {} has zero finite extent",
                        i + 1
                    )))
                }
                _ => {}
            }
        }
        let n0 = a_tt.rows;
        if n0 == 0 {
            return Err(Error::InvalidModel("A_TT must be nonempty".into()));
        }
        let n: usize = directions.iter().map(|d| d.width()).sum();
        shape_check("A_TT", &a_tt, n0, n0)?;
        shape_check("A_TS", &a_ts, n0, n)?;
        shape_check("A_ST", &a_st, n, n0)?;
        shape_check("A_SS", &a_ss, n, n)?;
        for b in &boundaries {
            let Some(dir) = directions.get(b.direction) else {
                return Err(Error::InvalidModel(format!(
                    "boundary matrix refers to missing direction {}",
                    b.direction + 1
                )));
            };
            if !matches!(dir.kind, DirectionKind::Finite { .. }) {
                return Err(Error::InvalidModel(format!(
                    "boundary matrix given for non-finite direction {}",
                    b.direction + 1
                )));
            }
            if b.matrix.rows != b.matrix.cols {
                return Err(Error::InvalidModel("boundary matrix must be square".into()));
            }
        }
        Ok(SisModel {
            n0,
            a_tt,
            a_ts,
            a_st,
            a_ss,
            directions,
            boundaries,
        })
    }

    pub fn n0(&self) -> usize {
        self.n0
    }

    /// Total interconnection width `n`.
    pub fn n(&self) -> usize {
        self.directions.iter().map(|d| d.width()).sum()
    }

    /// Number of spatial dimensions `L`.
    pub fn dim(&self) -> usize {
        self.directions.len()
    }

    pub fn directions(&self) -> &[DirectionSpec] {
        &self.directions
    }

    pub fn boundaries(&self) -> &[BoundarySpec] {
        &self.boundaries
    }

    pub fn a_tt(&self) -> &RatMatrix {
        &self.a_tt
    }
    pub fn a_ts(&self) -> &RatMatrix {
        &self.a_ts
    }
    pub fn a_st(&self) -> &RatMatrix {
        &self.a_st
    }
    pub fn a_ss(&self) -> &RatMatrix {
        &self.a_ss
    }

    /// Copy with `A_TT` replaced (used to build variants in tests and tools).
    pub fn with_a_tt(&self, a_tt: RatMatrix) -> Result<Self> {
        Self::with_boundaries(
            a_tt,
            self.a_ts.clone(),
            self.a_st.clone(),
            self.a_ss.clone(),
            self.directions.clone(),
            self.boundaries.clone(),
        )
    }

    /// Copy with replaced direction specs (same channel widths required).
    pub fn with_directions(&self, directions: Vec<DirectionSpec>) -> Result<Self> {
        Self::new(
            self.a_tt.clone(),
            self.a_ts.clone(),
            self.a_st.clone(),
            self.a_ss.clone(),
            directions,
        )
    }

    pub fn has_finite_directions(&self) -> bool {
        self.directions
            .iter()
            .any(|d| matches!(d.kind, DirectionKind::Finite { .. }))
    }

    pub fn all_infinite(&self) -> bool {
        self.directions
            .iter()
            .all(|d| d.kind == DirectionKind::Infinite)
    }

    pub fn all_periodic(&self) -> bool {
        self.directions.iter().all(|d| d.period().is_some())
    }

    /// Channel labels in row order of `A_SS`.
    pub fn channel_labels(&self) -> Vec<ChannelLabel> {
        let mut out = Vec::with_capacity(self.n());
        for (i, d) in self.directions.iter().enumerate() {
            out.extend((0..d.n_pos).map(|k| ChannelLabel {
                direction: i,
                forward: true,
                index: k,
            }));
            out.extend((0..d.n_neg).map(|k| ChannelLabel {
                direction: i,
                forward: false,
                index: k,
            }));
        }
        out
    }

    /// Exponent of `z_i` carried by each channel row: `+1` forward, `-1` backward.
    pub fn channel_shifts(&self) -> Vec<(usize, i32)> {
        self.channel_labels()
            .into_iter()
            .map(|c| (c.direction, if c.forward { 1 } else { -1 }))
            .collect()
    }

    /// `Δ(z) = diag(z_i I_{n_i}, z_i^{-1} I_{n_-i})_{i=1..L}`.
    pub fn build_delta(&self) -> MatTrigPoly {
        let dim = self.dim();
        let shifts = self.channel_shifts();
        let n = shifts.len();
        crate::matpoly::Mat::from_fn(n, n, |i, j| {
            if i == j {
                TrigPoly::var(dim, shifts[i].0, shifts[i].1)
            } else {
                TrigPoly::zero(dim)
            }
        })
    }

    /// `h(z) = det(Δ(z) - A_SS)` and `H(z) = A_TT h + A_TS adj(Δ - A_SS) A_ST`.
    pub fn build_h_big_h(&self) -> Result<(TrigPoly, MatTrigPoly)> {
        let dim = self.dim();
        let m = self.build_delta().sub(&self.a_ss.to_trig(dim))?;
        let h = m.det_with_limit(DEFAULT_DET_LIMIT)?;
        let adj = m.adjugate_with_limit(DEFAULT_DET_LIMIT)?;
        let coupling = self
            .a_ts
            .to_trig(dim)
            .matmul(&adj)?
            .matmul(&self.a_st.to_trig(dim))?;
        let big_h = self.a_tt.to_trig(dim).scale(&h).add(&coupling)?;
        Ok((h, big_h))
    }

    /// Numeric `A(z) = A_TT + A_TS (Δ(z) - A_SS)^{-1} A_ST` at any `z` with
    /// nonzero entries (not restricted to the torus).
    pub fn eval_a(&self, z: &[Complex64]) -> Result<DMatrix<Complex64>> {
        if z.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: z.len(),
            });
        }
        let shifts = self.channel_shifts();
        let n = shifts.len();
        let mut m = -self.a_ss.to_c64();
        for (i, &(dir, p)) in shifts.iter().enumerate() {
            m[(i, i)] += z[dir].powi(p);
        }
        let rhs = self.a_st.to_c64();
        let x = m
            .lu()
            .solve(&rhs)
            .filter(|x| x.iter().all(|v| v.is_finite()))
            .ok_or_else(|| Error::IllPosed { at: format_point(z) })?;
        debug_assert_eq!(x.nrows(), n);
        Ok(self.a_tt.to_c64() + self.a_ts.to_c64() * x)
    }

    /// `A(1_L)`, the constant matrix of the first Theorem-1 condition.
    pub fn eval_a_at_one(&self) -> Result<DMatrix<Complex64>> {
        let one = vec![Complex64::new(1.0, 0.0); self.dim()];
        self.eval_a(&one)
    }

    /// Sampled check of `h(z) ≠ 0` on a uniform grid of the torus. This is a
    /// necessary condition for well-posedness only.
    pub fn wellposedness_scan(&self, grid_density: usize, tolerance: f64) -> Result<WellposednessReport> {
        if grid_density == 0 {
            return Err(Error::InvalidArgument("grid density must be positive".into()));
        }
        let (h, _) = self.build_h_big_h()?;
        let dim = self.dim();
        let total = grid_density.pow(dim as u32);
        let (min_abs, argmin) = (0..total)
            .into_par_iter()
            .map(|flat| {
                let z = grid_point(flat, &vec![grid_density; dim]);
                (h.eval_unchecked(&z).norm(), flat)
            })
            .reduce(
                || (f64::INFINITY, usize::MAX),
                |a, b| if b.0 < a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a },
            );
        let argmin = grid_point(argmin, &vec![grid_density; dim]);
        Ok(WellposednessReport {
            min_abs_h: min_abs,
            argmin,
            tolerance,
            suspect: min_abs < tolerance,
            note: "necessary, not sufficient",
        })
    }
}

/// Result of [`SisModel::wellposedness_scan`].
#[derive(Clone, Debug)]
pub struct WellposednessReport {
    pub min_abs_h: f64,
    pub argmin: Vec<Complex64>,
    pub tolerance: f64,
    /// Candidate well-posedness failure (`min |h| < tolerance`).
    pub suspect: bool,
    pub note: &'static str,
}

/// Point `flat` of the product grid with `counts[i]` uniform samples on
/// circle `i` (first variable fastest).
pub fn grid_point(mut flat: usize, counts: &[usize]) -> Vec<Complex64> {
    counts
        .iter()
        .map(|&c| {
            let k = flat % c;
            flat /= c;
            Complex64::from_polar(1.0, 2.0 * PI * k as f64 / c as f64)
        })
        .collect()
}

pub(crate) fn format_point(z: &[Complex64]) -> String {
    let parts: Vec<String> = z
        .iter()
        .map(|c| format!("{:.6}{:+.6}i", c.re, c.im))
        .collect();
    format!("({})", parts.join(", "))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example1() -> SisModel {
        SisModel::new(
            RatMatrix::from_ratios(&[&[(-1, 2), (0, 1)], &[(0, 1), (-1, 1)]]),
            RatMatrix::from_ratios(&[&[(1, 1), (0, 1), (0, 1), (2, 1)], &[(0, 1), (0, 1), (1, 2), (0, 1)]]),
            RatMatrix::from_ratios(&[&[(0, 1), (1, 2)], &[(1, 1), (0, 1)], &[(-1, 2), (0, 1)], &[(0, 1), (0, 1)]]),
            RatMatrix::zeros(4, 4),
            vec![DirectionSpec::infinite(1, 1), DirectionSpec::infinite(1, 1)],
        )
        .unwrap()
    }

    #[test]
    fn delta_layout() {
        let m = example1();
        let d = m.build_delta();
        assert_eq!(*d.get(0, 0), TrigPoly::var(2, 0, 1));
        assert_eq!(*d.get(1, 1), TrigPoly::var(2, 0, -1));
        assert_eq!(*d.get(2, 2), TrigPoly::var(2, 1, 1));
        assert_eq!(*d.get(3, 3), TrigPoly::var(2, 1, -1));
        assert!(d.get(0, 1).is_zero());
    }

    #[test]
    fn single_backward_channel() {
        let m = SisModel::new(
            RatMatrix::from_ratios(&[&[(-1, 1)]]),
            RatMatrix::from_ratios(&[&[(1, 1)]]),
            RatMatrix::from_ratios(&[&[(1, 1)]]),
            RatMatrix::zeros(1, 1),
            vec![DirectionSpec::infinite(0, 1)],
        )
        .unwrap();
        let d = m.build_delta();
        assert_eq!((d.rows(), d.cols()), (1, 1));
        assert_eq!(*d.get(0, 0), TrigPoly::var(1, 0, -1));
    }

    #[test]
    fn channel_order() {
        let m = SisModel::new(
            RatMatrix::from_ratios(&[&[(-1, 1)]]),
            RatMatrix::zeros(1, 5),
            RatMatrix::zeros(5, 1),
            RatMatrix::zeros(5, 5),
            vec![DirectionSpec::infinite(2, 1), DirectionSpec::periodic(3, 1, 1)],
        )
        .unwrap();
        let labels: Vec<(usize, bool)> = m
            .channel_labels()
            .iter()
            .map(|c| (c.direction, c.forward))
            .collect();
        assert_eq!(
            labels,
            vec![(0, true), (0, true), (0, false), (1, true), (1, false)]
        );
    }

    #[test]
    fn shape_errors_name_the_block() {
        let e = SisModel::new(
            RatMatrix::zeros(2, 2),
            RatMatrix::zeros(2, 3),
            RatMatrix::zeros(4, 2),
            RatMatrix::zeros(4, 4),
            vec![DirectionSpec::infinite(1, 1), DirectionSpec::infinite(1, 1)],
        )
        .unwrap_err();
        match e {
            Error::ShapeMismatch { what, expected, .. } => {
                assert_eq!(what, "A_TS");
                assert_eq!(expected, "2x4");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn example1_h_and_a_at_one() {
        let m = example1();
        let (h, _) = m.build_h_big_h().unwrap();
        assert_eq!(h, TrigPoly::one(2));
        let a1 = m.eval_a_at_one().unwrap();
        let want = [[-0.5, 0.5], [-0.25, -1.0]];
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(a1[(i, j)], Complex64::new(want[i][j], 0.0));
            }
        }
        let rep = m.wellposedness_scan(8, 1e-8).unwrap();
        assert_eq!(rep.min_abs_h, 1.0);
        assert!(!rep.suspect);
    }

    #[test]
    fn decoupled_model() {
        let m = example1();
        let m = SisModel::new(
            m.a_tt().clone(),
            RatMatrix::zeros(2, 4),
            m.a_st().clone(),
            RatMatrix::zeros(4, 4),
            m.directions().to_vec(),
        )
        .unwrap();
        let a1 = m.eval_a_at_one().unwrap();
        assert_eq!(a1, m.a_tt().to_c64());
        let (h, big_h) = m.build_h_big_h().unwrap();
        assert_eq!(h, TrigPoly::one(2));
        assert_eq!(big_h, m.a_tt().to_trig(2));
    }

    #[test]
    fn zero_width_direction_is_invalid() {
        let e = SisModel::new(
            RatMatrix::zeros(1, 1),
            RatMatrix::zeros(1, 0),
            RatMatrix::zeros(0, 1),
            RatMatrix::zeros(0, 0),
            vec![DirectionSpec::infinite(0, 0)],
        );
        assert!(matches!(e, Err(Error::InvalidModel(_))));
    }

    #[test]
    fn singular_delta_at_one_is_reported() {
        // A_SS = 1 on a single forward channel: Δ(1) - A_SS = 0.
        let m = SisModel::new(
            RatMatrix::from_ratios(&[&[(-1, 1)]]),
            RatMatrix::from_ratios(&[&[(1, 1)]]),
            RatMatrix::from_ratios(&[&[(1, 1)]]),
            RatMatrix::from_ratios(&[&[(1, 1)]]),
            vec![DirectionSpec::infinite(1, 0)],
        )
        .unwrap();
        assert!(matches!(m.eval_a_at_one(), Err(Error::IllPosed { .. })));
        let rep = m.wellposedness_scan(16, 1e-8).unwrap();
        assert!(rep.suspect);
    }
}

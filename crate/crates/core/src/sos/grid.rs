use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::trigpoly::TrigPoly;

/// Smallest real value of a family of polynomials over a product of roots
/// of unity, with its location.
#[derive(Clone, Debug, PartialEq)]
pub struct GridMinimum {
    pub value: f64,
    pub poly: usize,
    /// Root indices `j_i`: `z_i = exp(2πi·j_i/N_i)`.
    pub indices: Vec<u32>,
    pub point: Vec<Complex64>,
}

/// Evaluate every polynomial at every point of `Z_{N_1} × ⋯ × Z_{N_L}`.
/// Roots of unity are formed directly from their angles, so each value is
/// accurate to a few ulps of the polynomial's coefficient ℓ¹ norm.
pub fn finite_grid_positivity(polys: &[TrigPoly], periods: &[u32]) -> Result<GridMinimum> {
    if polys.is_empty() {
        return Err(Error::InvalidArgument("no polynomials to evaluate".into()));
    }
    if periods.contains(&0) {
        return Err(Error::InvalidArgument("period must be positive".into()));
    }
    for f in polys {
        if f.dim() != periods.len() {
            return Err(Error::DimensionMismatch {
                expected: periods.len(),
                found: f.dim(),
            });
        }
    }
    let roots: Vec<Vec<Complex64>> = periods
        .iter()
        .map(|&n| {
            (0..n)
                .map(|j| Complex64::from_polar(1.0, std::f64::consts::TAU * j as f64 / n as f64))
                .collect()
        })
        .collect();
    let total: usize = periods.iter().map(|&n| n as usize).product();
    let mut best: Option<GridMinimum> = None;
    let mut idx = vec![0u32; periods.len()];
    for _ in 0..total {
        let z: Vec<Complex64> = idx.iter().zip(&roots).map(|(&j, r)| r[j as usize]).collect();
        for (k, f) in polys.iter().enumerate() {
            let v = f.eval_unchecked(&z).re;
            if best.as_ref().is_none_or(|b| v < b.value) {
                best = Some(GridMinimum {
                    value: v,
                    poly: k,
                    indices: idx.clone(),
                    point: z.clone(),
                });
            }
        }
        for (i, j) in idx.iter_mut().enumerate() {
            *j += 1;
            if *j < periods[i] {
                break;
            }
            *j = 0;
        }
    }
    Ok(best.expect("grid is nonempty"))
}

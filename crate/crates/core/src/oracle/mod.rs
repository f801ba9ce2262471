//! Numeric ground truth, independent of the symbolic/SOS pipeline:
//! Lyapunov-based Hurwitz tests, spectral abscissas, frequency sampling of
//! `A(z)`, and time-domain simulation of the system lifted onto a finite
//! grid of sites.

mod lift;
mod lyapunov;
mod simulate;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{format_point, DirectionKind, SisModel};

pub use lift::{lift_finite_system, lifted_dense_c64, Csr, LiftedSystem};
pub use lyapunov::{hurwitz_lyapunov, lyapunov_solution, spectral_abscissa};
pub use simulate::{fit_decay_rate, simulate, Trajectory, DEFAULT_DT, DEFAULT_SNAPSHOTS};

/// Bisection tolerance used when sampling abscissas.
pub const SAMPLE_ABSCISSA_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct SampleReport {
    pub max_abscissa: f64,
    pub argmax: Vec<Complex64>,
    /// Points per direction actually used.
    pub counts: Vec<usize>,
}

/// Largest spectral abscissa of `A(z)` over a grid of the torus: `grid[i]`
/// equispaced points for infinite directions, the exact `N`-th roots of unity
/// for periodic ones (their `grid` entry is ignored).
pub fn freq_sample_abscissa(m: &SisModel, grid: &[usize]) -> Result<SampleReport> {
    let dirs = m.directions();
    if grid.len() != dirs.len() {
        return Err(Error::DimensionMismatch {
            expected: dirs.len(),
            found: grid.len(),
        });
    }
    let mut counts = Vec::with_capacity(dirs.len());
    for (d, &g) in dirs.iter().zip(grid) {
        counts.push(match d.kind {
            DirectionKind::Periodic(n) => n as usize,
            DirectionKind::Infinite if g > 0 => g,
            DirectionKind::Infinite => return Err(Error::InvalidArgument("grid count must be positive".into())),
            DirectionKind::Finite { .. } => {
                return Err(Error::Unsupported(
                    "finite-extent directions; supply the equivalent periodic system".into(),
                ))
            }
        });
    }
    let total: usize = counts.iter().product();
    let point = |flat: usize| crate::model::grid_point(flat, &counts);
    let results: Vec<Result<(f64, usize)>> = (0..total)
        .into_par_iter()
        .map(|flat| {
            let a = m.eval_a(&point(flat))?;
            Ok((spectral_abscissa(&a, SAMPLE_ABSCISSA_TOL), flat))
        })
        .collect();
    let mut best = (f64::NEG_INFINITY, 0usize);
    for r in results {
        let (v, flat) = r?;
        if v > best.0 {
            best = (v, flat);
        }
    }
    Ok(SampleReport {
        max_abscissa: best.0,
        argmax: point(best.1),
        counts,
    })
}

/// `A(z)` and its abscissa at a single point (for witnesses).
pub fn abscissa_at(m: &SisModel, z: &[Complex64]) -> Result<(DMatrix<Complex64>, f64)> {
    let a = m.eval_a(z)?;
    let s = spectral_abscissa(&a, SAMPLE_ABSCISSA_TOL);
    Ok((a, s))
}

pub fn describe_point(z: &[Complex64]) -> String {
    format_point(z)
}

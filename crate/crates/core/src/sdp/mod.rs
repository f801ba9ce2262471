//! Small dense semidefinite programs.
//!
//! Problems are stated over real symmetric PSD blocks plus free scalar
//! variables:
//!
//! ```text
//! maximize   <objective, (X, y)>
//! subject to <a_k, (X, y)> = b_k,   X_j ⪰ 0
//! ```
//!
//! Complex Hermitian blocks are handled by callers through
//! [`hermitian_embed`]-style real embeddings.

mod admm;
mod dump;
mod embed;
mod psd;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use admm::solve;
pub use dump::write_sparse_dump;
pub use embed::{hermitian_embed, hermitian_unembed};
pub use psd::{min_eigenvalue, psd_check};

/// Coefficient on entry `(row, col)` of block `block`, `row <= col`. The
/// functional value is `Σ coef · X[row][col]`, so a symmetric off-diagonal
/// pair contributes through its single stored entry.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockEntry {
    pub block: usize,
    pub row: usize,
    pub col: usize,
    pub coef: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct LinearFunctional {
    pub entries: Vec<BlockEntry>,
    /// `(free variable index, coefficient)`.
    pub free: Vec<(usize, f64)>,
}

impl LinearFunctional {
    pub fn add_entry(&mut self, block: usize, row: usize, col: usize, coef: f64) {
        let (row, col) = if row <= col { (row, col) } else { (col, row) };
        self.entries.push(BlockEntry {
            block,
            row,
            col,
            coef,
        });
    }

    pub fn add_free(&mut self, var: usize, coef: f64) {
        self.free.push((var, coef));
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty() && self.free.is_empty()
    }

    /// Evaluate at symmetric block values and free variables.
    pub fn eval(&self, blocks: &[DMatrix<f64>], free: &[f64]) -> f64 {
        let mut acc = 0.0;
        for e in &self.entries {
            acc += e.coef * blocks[e.block][(e.row, e.col)];
        }
        for &(k, c) in &self.free {
            acc += c * free[k];
        }
        acc
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SdpConstraint {
    pub functional: LinearFunctional,
    pub rhs: f64,
}

/// Maximize `objective` subject to the equality `constraints`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SdpProblem {
    /// Dimensions of the real symmetric PSD blocks.
    pub blocks: Vec<usize>,
    pub free_vars: usize,
    pub constraints: Vec<SdpConstraint>,
    pub objective: LinearFunctional,
}

impl SdpProblem {
    pub fn validate(&self) -> Result<()> {
        let check = |f: &LinearFunctional| -> Result<()> {
            for e in &f.entries {
                let Some(&dim) = self.blocks.get(e.block) else {
                    return Err(Error::InvalidArgument(format!("block {} does not exist", e.block)));
                };
                if e.row > e.col || e.col >= dim {
                    return Err(Error::InvalidArgument(format!(
                        "entry ({}, {}) invalid for block {} of size {dim}",
                        e.row, e.col, e.block
                    )));
                }
                if !e.coef.is_finite() {
                    return Err(Error::InvalidArgument("non-finite coefficient".into()));
                }
            }
            for &(k, c) in &f.free {
                if k >= self.free_vars || !c.is_finite() {
                    return Err(Error::InvalidArgument(format!("bad free-variable term ({k}, {c})")));
                }
            }
            Ok(())
        };
        for c in &self.constraints {
            check(&c.functional)?;
            if !c.rhs.is_finite() {
                return Err(Error::InvalidArgument("non-finite right-hand side".into()));
            }
        }
        check(&self.objective)
    }

    /// Multiply every constraint row and the objective by `k > 0`.
    pub fn scaled(&self, k: f64) -> SdpProblem {
        let scale = |f: &LinearFunctional| LinearFunctional {
            entries: f
                .entries
                .iter()
                .map(|e| BlockEntry {
                    coef: e.coef * k,
                    ..e.clone()
                })
                .collect(),
            free: f.free.iter().map(|&(i, c)| (i, c * k)).collect(),
        };
        SdpProblem {
            blocks: self.blocks.clone(),
            free_vars: self.free_vars,
            constraints: self
                .constraints
                .iter()
                .map(|c| SdpConstraint {
                    functional: scale(&c.functional),
                    rhs: c.rhs * k,
                })
                .collect(),
            objective: scale(&self.objective),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SdpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    MaxIter,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolveOptions {
    pub eps_abs: f64,
    pub eps_rel: f64,
    pub max_iter: usize,
    /// `0` starts from the origin; any other value seeds a small
    /// deterministic perturbation of the starting point.
    pub seed: u64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            eps_abs: 1e-8,
            eps_rel: 1e-7,
            max_iter: 200_000,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SdpSolution {
    pub status: SdpStatus,
    pub objective: f64,
    /// Full symmetric block values (PSD up to rounding).
    pub blocks: Vec<DMatrix<f64>>,
    pub free: Vec<f64>,
    pub iterations: usize,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub gap: f64,
}

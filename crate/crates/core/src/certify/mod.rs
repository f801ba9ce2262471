//! The two stability tests.
//!
//! Fully infinite interconnections: `A(1)` Hurwitz and `det(−W(z)) > 0` on
//! the torus (global SOS program). Mixed infinite/periodic: the cleared Routh
//! table of `φ(λ, z)` has no nonpositive constant row and every nonconstant
//! leading entry is positive on `T^l × 𝔾` (domain SOS program, or direct
//! evaluation when every direction is periodic).

mod analyze;
mod polys;
mod routh;

pub use analyze::{
    analyze, certification_targets, theorem1_analyze, theorem2_analyze, AnalyzeOptions, Theorem, Verdict,
    VerdictStatus, Witness,
};
pub use polys::{build_f_thm1, build_k, build_phi, build_w, char_poly_k, LambdaPoly};
pub use routh::{routh_table, RouthTable};

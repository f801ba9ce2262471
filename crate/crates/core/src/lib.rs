//! Stability certification of spatially interconnected systems.
//!
//! The symbolic pipeline builds trigonometric polynomials from the system
//! matrices in exact rational arithmetic; their positivity on the unit
//! L-circle (or on a product of circles and roots of unity) is then
//! certified by sum-of-squares semidefinite programs. The `oracle` module
//! provides independent numeric ground truth.

pub mod certify;
pub mod error;
pub mod matpoly;
pub mod model;
pub mod oracle;
pub mod rational;
pub mod sdp;
pub mod sos;
pub mod trigpoly;

pub use certify::{analyze, AnalyzeOptions, Verdict, VerdictStatus, Witness};
pub use error::{Error, Result};
pub use matpoly::{exact_div, Mat, MatTrigPoly, Ring};
pub use model::{DirectionKind, DirectionSpec, RatMatrix, SisModel};
pub use rational::Cq;
pub use trigpoly::{DegreeTuple, TrigPoly};

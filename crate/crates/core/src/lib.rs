//! Low-weight polynomial multiples over GF(2) and their correspondence with
//! affine MAX-SAT.
//!
//! A multiple `K = P * Q` with `deg Q <= t` is the image of `Q`'s coefficient
//! vector under the Toeplitz operator `M(P, t)`, so minimizing the weight of
//! `K` is minimizing the number of violated constraints of `M(P, t) x = 0`.
//! This crate builds that reduction, exact and local-search solvers for the
//! resulting systems, the heuristic reverse direction from 0/1 matrices back
//! to polynomial instances, and a seeded experiment harness.

pub mod affine;
pub mod bits;
pub mod error;
pub mod harness;
pub mod oracle;
pub mod poly;
pub mod reductions;
pub mod search;
pub mod toeplitz;

pub use affine::{AffineSystem, EXHAUSTIVE_CAP};
pub use bits::{Assignment, BitVec};
pub use error::{Error, Result};
pub use harness::{ExperimentConfig, ExperimentReport};
pub use poly::{Gf2Poly, PolyStyle};
pub use reductions::{Engine, MinPmInstance, ReductionCertificate};
pub use search::{HcVariant, SaReturn, SolverConfig};
pub use toeplitz::{BinaryMatrix, Projection, TiePolicy, ToeplitzOperator};

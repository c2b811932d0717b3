//! Convex geometry of symmetric bistochastic matrices and self-dual
//! completely positive maps.
//!
//! The crate is organised bottom-up:
//!
//! * [`linalg`] dense complex/real matrices, Hermitian eigensolver, Haar sampling.
//! * [`lp`] phase-I simplex feasibility with independent re-verification.
//! * [`birkhoff`] doubly stochastic and symmetric bistochastic matrices, Katz extreme points.
//! * [`hull`] H-unistochastic images, outer certificates, sampled inner hulls and
//!   bracket estimation of the segment constant.
//! * [`cut`] membership in the convex hull of real rank-one correlation matrices
//!   via sign-vector distributions and Walsh-nonnegative certificates.
//! * [`cp`] Kraus maps, Choi matrices, Hermitian Kraus families, Schur maps and
//!   mixed Hermitian unitary synthesis.
//! * [`report`] claim-by-claim run reports behind the `bistoch` binary.

pub mod birkhoff;
pub mod cp;
pub mod cut;
mod error;
pub mod hull;
pub mod linalg;
pub mod lp;
pub mod report;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, RealMatrix, C64};

//! Numerics for sign-changing overdetermined eigenvalue problems on perturbed
//! cylinders `B_1 x R^m` and slabs `(-1, 1) x R^m`: Bessel functions and
//! radial spectra, the explicit bifurcation constants, first-order branch
//! profiles, a pulled-back finite-difference eigen-solver and the residual
//! checks that verify the branches.

#![allow(
    clippy::neg_cmp_op_on_partial_ord,
    clippy::needless_range_loop,
    clippy::too_many_arguments
)]

pub mod constants;
pub mod error;
pub mod profiles;
pub mod pullback;
pub mod quad;
pub mod roots;
pub mod specfun;
pub mod spectra;
pub mod verify;

pub use constants::{DirichletConstants, ModeTable, ProblemDims, SlabConstants};
pub use error::{Error, Result};
pub use profiles::{DomainProfile, ProfileKind, SolutionField};
pub use specfun::{BesselOrder, BesselZero};
pub use spectra::{RadialEigenvalue, SlabEigenvalue};
pub use verify::ResidualReport;

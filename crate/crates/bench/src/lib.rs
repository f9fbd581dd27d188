//! Fixtures shared by the benchmarks.

use odbif::constants::ProblemDims;
use odbif::profiles::{cylinder_first_order_field, SolutionField};

/// The s-sweep used by the residual benchmarks.
pub const S_SWEEP: [f64; 4] = [0.04, 0.02, 0.01, 0.005];

pub fn dims(dim: usize, n: usize) -> ProblemDims {
    ProblemDims::new(dim, 1, n).expect("valid benchmark dimensions")
}

pub fn cylinder_field(dim: usize, s: f64) -> SolutionField {
    cylinder_first_order_field(dims(dim, 1), s).expect("valid benchmark field")
}

//! Numerical verification of the first-order branches: nonlinear residuals
//! versus `s`, linearisation quotients, the transversality pairing and
//! eigenvalue solves on perturbed profiles.

mod branch;
mod eigen;
mod linearization;
mod transversality;

pub use branch::{
    branch_residual, dirichlet_branch_residual, dirichlet_control_residual,
    nonconstant_control_residual, nonconstant_neumann_residual, residual_sups,
    slab_branch_residual, slab_control_residual, NeumannMetric, ResidualReport, SampleGrid,
};
pub use eigen::{
    eigen_verification, flat_eigen_convergence, EigenCell, EigenReport, FlatConvergence,
};
pub use linearization::{dg_boundary, dg_interior, linearization_check, LinearizationReport};
pub use transversality::{
    slab_transversality_pairing, transversality_pairing, TransversalityReport,
};

use crate::error::{Error, Result};

/// Slope of the least-squares line through `(ln x, ln y)`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::InvalidInput(
            "slope fit needs matching inputs with at least 2 points".into(),
        ));
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    Ok(sxy / sxx)
}

/// `s` values must be positive and strictly decreasing, at least `min_len` of them.
pub(crate) fn check_sweep(s_values: &[f64], min_len: usize) -> Result<()> {
    if s_values.len() < min_len {
        return Err(Error::InvalidInput(format!(
            "a slope fit needs at least {min_len} s-values (got {})",
            s_values.len()
        )));
    }
    if s_values.iter().any(|s| !(*s > 0.0 && s.is_finite()))
        || s_values.windows(2).any(|w| w[1] >= w[0])
    {
        return Err(Error::InvalidInput(
            "s-values must be positive and strictly decreasing".into(),
        ));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_power_law() {
        let x = [0.04, 0.02, 0.01, 0.005];
        let y: Vec<f64> = x.iter().map(|s: &f64| 3.0 * s.powf(1.7)).collect();
        assert!((loglog_slope(&x, &y).unwrap() - 1.7).abs() < 1e-12);
    }

    #[test]
    fn sweep_validation() {
        assert!(check_sweep(&[0.04, 0.02, 0.01, 0.005], 4).is_ok());
        assert!(check_sweep(&[0.04, 0.02, 0.01], 4).is_err());
        assert!(check_sweep(&[0.04, 0.02, 0.02, 0.005], 4).is_err());
        assert!(check_sweep(&[0.04, 0.02, 0.01, -0.005], 4).is_err());
    }
}

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::constants::ProblemDims;
use crate::error::{Error, Result};
use crate::profiles::{
    cylinder_first_order_field, slab_first_order_field, ProfileKind, SolutionField,
};
use crate::pullback::{analytic_neumann, analytic_operator_with_jets};

use super::{check_sweep, loglog_slope};

/// Which Neumann condition the boundary component checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum NeumannMetric {
    /// `H sqrt(1 + lambda |grad H|^2 / H^4) U_r(1, x) = A'(1)`.
    Constant,
    /// `H sqrt(1 + |grad H|^2 / H^4) U_r(1, x) = A'(1)`.
    NonConstant,
}

/// Tensor sampling of `[0, 1] x [0, 2 pi)`. For `m > 1` the angular samples run
/// along the winding line `x_i = (i + 1) theta mod 2 pi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SampleGrid {
    pub n_r: usize,
    pub n_x: usize,
}

impl Default for SampleGrid {
    fn default() -> Self {
        Self { n_r: 201, n_x: 256 }
    }
}

impl SampleGrid {
    fn radii(&self) -> Vec<f64> {
        (0..self.n_r)
            .map(|i| i as f64 / (self.n_r - 1) as f64)
            .collect()
    }

    fn points(&self, m: usize) -> Vec<Vec<f64>> {
        (0..self.n_x)
            .map(|j| {
                let theta = 2.0 * PI * j as f64 / self.n_x as f64;
                (0..m)
                    .map(|i| (theta * (i + 1) as f64).rem_euclid(2.0 * PI))
                    .collect()
            })
            .collect()
    }

    pub fn descriptor(&self) -> String {
        format!("{}x{}", self.n_r, self.n_x)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualReport {
    pub problem: ProfileKind,
    pub dims: ProblemDims,
    pub variant: String,
    /// `k` in the probe `R(r) (cos k x_1 + ... + cos k x_m)`.
    pub angular_mode: usize,
    pub metric: NeumannMetric,
    pub lambda: f64,
    pub s_values: Vec<f64>,
    pub interior_sup: Vec<f64>,
    pub boundary_sup: Vec<f64>,
    pub interior_slope: f64,
    pub boundary_slope: f64,
    /// Slope of `interior_sup + boundary_sup`.
    pub fitted_slope: f64,
    pub grid: String,
}

impl ResidualReport {
    /// Both components decay inside `[lo, hi]`.
    pub fn kernel_pass(&self, lo: f64, hi: f64) -> bool {
        let inside = |v: f64| v >= lo && v <= hi;
        inside(self.interior_slope) && inside(self.boundary_slope)
    }

    /// The combined residual and the interior both decay no faster than `max`.
    pub fn control_pass(&self, max: f64) -> bool {
        self.fitted_slope <= max && self.interior_slope <= max
    }
}

/// Sup-norms `(interior, boundary)` of the two residual components of `field`.
pub fn residual_sups(
    field: &SolutionField,
    grid: SampleGrid,
    metric: NeumannMetric,
) -> Result<(f64, f64)> {
    if grid.n_r < 2 || grid.n_x < 1 {
        return Err(Error::InvalidInput("sample grid too small".into()));
    }
    let h_min = 1.0 - (field.s * field.trace_ratio).abs() * field.dims.m as f64;
    if h_min < 0.5 {
        return Err(Error::Domain(format!(
            "min(1 + h_u) = {h_min} < 0.5 at s = {}",
            field.s
        )));
    }
    let points = grid.points(field.dims.m);
    let mut interior: f64 = 0.0;
    for r in grid.radii() {
        let jets = field.jets(r);
        for x in &points {
            interior = interior.max(analytic_operator_with_jets(field, r, &jets, x).abs());
        }
    }
    let kappa = match metric {
        NeumannMetric::Constant => field.lambda,
        NeumannMetric::NonConstant => 1.0,
    };
    let target = field.base.jet(1.0).d1;
    let boundary = points.iter().fold(0.0f64, |m, x| {
        m.max((analytic_neumann(field, x, kappa) - target).abs())
    });
    Ok((interior, boundary))
}

/// Residual sweep of `field` over `s_values` (the field's own `s` is ignored).
pub fn branch_residual(
    field: &SolutionField,
    variant: &str,
    s_values: &[f64],
    grid: SampleGrid,
    metric: NeumannMetric,
) -> Result<ResidualReport> {
    check_sweep(s_values, 4)?;
    let sups: Vec<(f64, f64)> = s_values
        .par_iter()
        .map(|&s| residual_sups(&field.with_s(s), grid, metric))
        .collect::<Result<_>>()?;
    let interior_sup: Vec<f64> = sups.iter().map(|p| p.0).collect();
    let boundary_sup: Vec<f64> = sups.iter().map(|p| p.1).collect();
    let combined: Vec<f64> = sups.iter().map(|p| p.0 + p.1).collect();
    Ok(ResidualReport {
        problem: field.kind,
        dims: field.dims,
        variant: variant.to_string(),
        angular_mode: field.angular,
        metric,
        lambda: field.lambda,
        interior_slope: loglog_slope(s_values, &interior_sup)?,
        boundary_slope: loglog_slope(s_values, &boundary_sup)?,
        fitted_slope: loglog_slope(s_values, &combined)?,
        s_values: s_values.to_vec(),
        interior_sup,
        boundary_sup,
        grid: grid.descriptor(),
    })
}

fn control(field: &SolutionField) -> SolutionField {
    field.with_probe(field.probe, 2)
}

/// Residuals of the cylinder branch along the kernel direction.
pub fn dirichlet_branch_residual(
    dims: ProblemDims,
    s_values: &[f64],
    grid: SampleGrid,
) -> Result<ResidualReport> {
    let f = cylinder_first_order_field(dims, 0.0)?;
    branch_residual(&f, "branch", s_values, grid, NeumannMetric::Constant)
}

/// Same sweep with the probe `psi_1(r) (cos 2 x_1 + ...)`, outside the kernel.
pub fn dirichlet_control_residual(
    dims: ProblemDims,
    s_values: &[f64],
    grid: SampleGrid,
) -> Result<ResidualReport> {
    let f = control(&cylinder_first_order_field(dims, 0.0)?);
    branch_residual(&f, "control", s_values, grid, NeumannMetric::Constant)
}

pub fn slab_branch_residual(
    n: usize,
    m: usize,
    s_values: &[f64],
    grid: SampleGrid,
) -> Result<ResidualReport> {
    let f = slab_first_order_field(n, m, 0.0)?;
    branch_residual(&f, "branch", s_values, grid, NeumannMetric::Constant)
}

pub fn slab_control_residual(
    n: usize,
    m: usize,
    s_values: &[f64],
    grid: SampleGrid,
) -> Result<ResidualReport> {
    let f = control(&slab_first_order_field(n, m, 0.0)?);
    branch_residual(&f, "control", s_values, grid, NeumannMetric::Constant)
}

/// Cylinder branch checked against the `lambda`-free Neumann metric.
pub fn nonconstant_neumann_residual(
    dims: ProblemDims,
    s_values: &[f64],
    grid: SampleGrid,
) -> Result<ResidualReport> {
    let f = cylinder_first_order_field(dims, 0.0)?;
    branch_residual(
        &f,
        "nonconstant",
        s_values,
        grid,
        NeumannMetric::NonConstant,
    )
}

pub fn nonconstant_control_residual(
    dims: ProblemDims,
    s_values: &[f64],
    grid: SampleGrid,
) -> Result<ResidualReport> {
    let f = control(&cylinder_first_order_field(dims, 0.0)?);
    branch_residual(
        &f,
        "nonconstant-control",
        s_values,
        grid,
        NeumannMetric::NonConstant,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    const SWEEP: [f64; 4] = [0.04, 0.02, 0.01, 0.005];
    const SMALL: SampleGrid = SampleGrid { n_r: 41, n_x: 64 };

    #[test]
    fn zero_s_is_an_exact_solution() {
        for dim in 1..=3 {
            let f = cylinder_first_order_field(ProblemDims::new(dim, 1, 1).unwrap(), 0.0).unwrap();
            let (i, b) = residual_sups(&f, SMALL, NeumannMetric::Constant).unwrap();
            assert!(i < 1e-12 && b < 1e-12, "N={dim}: {i} {b}");
        }
        let f = slab_first_order_field(1, 1, 0.0).unwrap();
        let (i, b) = residual_sups(&f, SMALL, NeumannMetric::Constant).unwrap();
        assert!(i < 1e-12 && b < 1e-12);
    }

    #[test]
    fn kernel_direction_is_quadratic() {
        let d = ProblemDims::new(2, 1, 1).unwrap();
        let r = dirichlet_branch_residual(d, &SWEEP, SMALL).unwrap();
        assert!(r.kernel_pass(1.8, 2.2), "{r:?}");
        let r = slab_branch_residual(2, 1, &SWEEP, SMALL).unwrap();
        assert!(r.kernel_pass(1.8, 2.2), "{r:?}");
    }

    #[test]
    fn controls_are_linear_in_the_interior() {
        let d = ProblemDims::new(1, 1, 1).unwrap();
        let r = dirichlet_control_residual(d, &SWEEP, SMALL).unwrap();
        assert!(r.control_pass(1.2), "{r:?}");
        let r = slab_control_residual(1, 1, &SWEEP, SMALL).unwrap();
        assert!(r.control_pass(1.2), "{r:?}");
    }

    #[test]
    fn higher_periodic_dimension() {
        let d = ProblemDims::new(3, 2, 1).unwrap();
        let r = dirichlet_branch_residual(d, &SWEEP, SMALL).unwrap();
        assert!(r.kernel_pass(1.8, 2.2), "{r:?}");
    }

    #[test]
    fn margin_is_enforced() {
        let d = ProblemDims::new(1, 1, 1).unwrap();
        assert!(matches!(
            dirichlet_branch_residual(d, &[40.0, 20.0, 10.0, 5.0], SMALL),
            Err(Error::Domain(_))
        ));
    }
}

use rayon::prelude::*;
use serde::Serialize;

use crate::constants::ProblemDims;
use crate::error::{Error, Result};
use crate::profiles::{ProfileKind, SolutionField};
use crate::pullback::{
    assemble_cylinder_operator, assemble_slab_operator, boundary_neumann, solve_eigenpair_near,
    Eigenpair, GridField, PullbackOperator, Reduction, TensorGrid, DEFAULT_EIGEN_TOL,
};

/// One `(s, grid)` solve.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenCell {
    pub s: f64,
    pub grid: String,
    pub eigenvalue: f64,
    pub eigen_residual: f64,
    pub iterations: usize,
    /// `H sqrt(1 + lambda |H'|^2 / H^4) u_r(1, x_j)` divided by its angular mean.
    pub neumann: Vec<f64>,
    pub neumann_mean: f64,
    /// `(max - mean) / |mean|` of the Neumann data.
    pub deviation: f64,
    /// Slab only: `max_j |d_eta u(+1, x_j) + d_eta u(-1, x_j)|` for the outward
    /// derivatives of the odd extension.
    pub opposite_side_mismatch: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenReport {
    pub problem: ProfileKind,
    pub dims: ProblemDims,
    pub lambda: f64,
    pub target: f64,
    pub cells: Vec<EigenCell>,
    /// `(s, D)` with `D` computed from the Richardson-extrapolated Neumann data.
    pub extrapolated: Vec<(f64, f64)>,
    /// `D(s_i) / D(s_{i+1})` for consecutive `s` values.
    pub ratios: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlatConvergence {
    pub problem: ProfileKind,
    pub dims: ProblemDims,
    pub exact: f64,
    pub grids: Vec<String>,
    pub eigenvalues: Vec<f64>,
    pub errors: Vec<f64>,
    /// `error(coarse) / error(fine)` for consecutive grids.
    pub ratios: Vec<f64>,
}

fn operator(field: &SolutionField, grid: &TensorGrid) -> Result<PullbackOperator> {
    let profile = field.reference_profile()?;
    match field.kind {
        ProfileKind::Dirichlet => assemble_cylinder_operator(
            &profile,
            field.dims.dim,
            field.lambda,
            field.dims.n,
            grid,
            Reduction::EvenInX,
        ),
        ProfileKind::Slab => assemble_slab_operator(
            &profile,
            field.lambda,
            field.dims.n,
            grid,
            Reduction::EvenInX,
        ),
    }
}

fn solve(field: &SolutionField, grid: &TensorGrid) -> Result<Eigenpair> {
    if field.dims.m != 1 {
        return Err(Error::InvalidInput(
            "eigen verification supports m = 1 only".into(),
        ));
    }
    let op = operator(field, grid)?;
    let seed = GridField::sample(grid, |r, x| field.value(r, &[x]));
    solve_eigenpair_near(&op, field.zero_order, &seed, DEFAULT_EIGEN_TOL)
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn deviation(v: &[f64]) -> f64 {
    let m = mean(v);
    let max = v.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
    let min = v.iter().fold(f64::INFINITY, |a, &b| a.min(b));
    (max - m).max(m - min) / m.abs()
}

fn cell(field: &SolutionField, grid: &TensorGrid) -> Result<EigenCell> {
    let ep = solve(field, grid)?;
    let profile = field.reference_profile()?;
    let raw = boundary_neumann(&ep.field, &profile, field.lambda);
    let neumann_mean = mean(&raw);
    let opposite_side_mismatch = (field.kind == ProfileKind::Slab).then(|| {
        // outward derivative at t = -1 from the odd extension u(-t) = -u(t)
        let n = grid.n_r();
        let d = grid.radial_spacing;
        (0..grid.n_x)
            .map(|j| {
                let (u1, u2) = (-ep.field.get(n - 1, j), -ep.field.get(n - 2, j));
                let dt_minus = (4.0 * u1 - u2) / (2.0 * d);
                let metric =
                    crate::pullback::metric_factor(&profile.jet(&[grid.angle(j)]), field.lambda);
                (raw[j] + (-metric * dt_minus)).abs()
            })
            .fold(0.0, f64::max)
    });
    Ok(EigenCell {
        s: field.s,
        grid: grid.descriptor(),
        eigenvalue: ep.value,
        eigen_residual: ep.residual,
        iterations: ep.iterations,
        deviation: deviation(&raw),
        neumann: raw.iter().map(|v| v / neumann_mean).collect(),
        neumann_mean,
        opposite_side_mismatch,
    })
}

/// Solves on the first-order profiles for every `s` and both grids
/// `(fine, coarse)`, the fine grid having twice the angular resolution, and
/// extrapolates the normalised Neumann data at the coarse angles.
pub fn eigen_verification(
    template: &SolutionField,
    fine: (usize, usize),
    coarse: (usize, usize),
    s_values: &[f64],
) -> Result<EigenReport> {
    if fine.1 != 2 * coarse.1 {
        return Err(Error::InvalidInput(
            "fine grid needs twice the angular nodes of the coarse grid".into(),
        ));
    }
    super::check_sweep(s_values, 2)?;
    let gf = TensorGrid::for_kind(template.kind, fine.0, fine.1)?;
    let gc = TensorGrid::for_kind(template.kind, coarse.0, coarse.1)?;
    let jobs: Vec<(f64, &TensorGrid)> = s_values
        .iter()
        .flat_map(|&s| [(s, &gf), (s, &gc)])
        .collect();
    let cells: Vec<EigenCell> = jobs
        .par_iter()
        .map(|&(s, g)| cell(&template.with_s(s), g))
        .collect::<Result<_>>()?;
    let rho = (gc.radial_spacing / gf.radial_spacing).powi(2);
    let extrapolated: Vec<(f64, f64)> = s_values
        .iter()
        .enumerate()
        .map(|(k, &s)| {
            let (f, c) = (&cells[2 * k], &cells[2 * k + 1]);
            let ext: Vec<f64> = (0..gc.n_x)
                .map(|j| (rho * f.neumann[2 * j] - c.neumann[j]) / (rho - 1.0))
                .collect();
            (s, deviation(&ext))
        })
        .collect();
    let ratios = extrapolated.windows(2).map(|w| w[0].1 / w[1].1).collect();
    Ok(EigenReport {
        problem: template.kind,
        dims: template.dims,
        lambda: template.lambda,
        target: template.zero_order,
        cells,
        extrapolated,
        ratios,
    })
}

/// Eigenvalue of the unperturbed problem on a sequence of grids, compared with
/// the exact `c0` (`j^2` or `n^2 pi^2`).
pub fn flat_eigen_convergence(
    template: &SolutionField,
    grids: &[(usize, usize)],
) -> Result<FlatConvergence> {
    let flat = template.with_s(0.0);
    let solved: Vec<(String, f64)> = grids
        .par_iter()
        .map(|&(n_r, n_x)| {
            let g = TensorGrid::for_kind(flat.kind, n_r, n_x)?;
            Ok((g.descriptor(), solve(&flat, &g)?.value))
        })
        .collect::<Result<_>>()?;
    let errors: Vec<f64> = solved
        .iter()
        .map(|p| (p.1 - flat.zero_order).abs())
        .collect();
    Ok(FlatConvergence {
        problem: flat.kind,
        dims: flat.dims,
        exact: flat.zero_order,
        grids: solved.iter().map(|p| p.0.clone()).collect(),
        eigenvalues: solved.iter().map(|p| p.1).collect(),
        ratios: errors.windows(2).map(|w| w[0] / w[1]).collect(),
        errors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profiles::{cylinder_first_order_field, slab_first_order_field};

    #[test]
    fn flat_cases_converge_at_second_order() {
        let f = cylinder_first_order_field(ProblemDims::new(1, 1, 1).unwrap(), 0.0).unwrap();
        let rep = flat_eigen_convergence(&f, &[(32, 8), (64, 8)]).unwrap();
        assert!(rep.ratios[0] > 3.5 && rep.ratios[0] < 4.5, "{rep:?}");
        let f = slab_first_order_field(1, 1, 0.0).unwrap();
        let rep = flat_eigen_convergence(&f, &[(32, 8), (64, 8)]).unwrap();
        assert!(rep.ratios[0] > 3.5 && rep.ratios[0] < 4.5, "{rep:?}");
    }

    #[test]
    fn flat_neumann_data_is_constant() {
        let f = slab_first_order_field(1, 1, 0.0).unwrap();
        let g = TensorGrid::slab(32, 16).unwrap();
        let c = cell(&f, &g).unwrap();
        assert!(c.deviation < 1e-12);
        assert!(c.opposite_side_mismatch.unwrap() < 1e-12);
    }

    #[test]
    fn perturbed_deviation_is_quadratic_on_a_small_grid() {
        let f = slab_first_order_field(1, 1, 0.0).unwrap();
        let rep = eigen_verification(&f, (64, 32), (32, 16), &[0.04, 0.02]).unwrap();
        assert!(
            rep.ratios[0] > 3.0 && rep.ratios[0] < 5.0,
            "{:?}",
            rep.extrapolated
        );
    }
}

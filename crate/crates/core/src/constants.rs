//! Explicit constants of the two bifurcation problems and the mode tables
//! that certify a one-dimensional kernel.
//!
//! Mode indexing: for `N >= 2`, mode `n` uses `j_{N/2-1,n}`. For `N = 1`, mode
//! `n` uses the `n`-th sign-changing even Dirichlet mode, `j = (2n + 1) pi / 2`,
//! i.e. `j_{-1/2,n+1}` in the standard 1-based zero numbering; the ground
//! state `pi / 2` would give `lambda < 0`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::roots;
use crate::specfun::{self, inu, BesselOrder, BesselZero};
use crate::spectra::{self, robin_condition};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ProblemDims {
    #[serde(rename = "N")]
    pub dim: usize,
    pub m: usize,
    pub n: usize,
}

impl ProblemDims {
    pub fn new(dim: usize, m: usize, n: usize) -> Result<Self> {
        if dim == 0 || m == 0 || n == 0 {
            return Err(Error::InvalidInput(format!(
                "N, m, n must all be >= 1 (got {dim}, {m}, {n})"
            )));
        }
        Ok(Self { dim, m, n })
    }

    pub fn beta(&self) -> f64 {
        self.dim as f64 / 2.0 - 1.0
    }
}

/// The Dirichlet zero `j_{N/2-1, n}` attached to mode `n` (see module docs for `N = 1`).
pub fn mode_zero(dim: usize, n: usize) -> Result<BesselZero> {
    if n == 0 {
        return Err(Error::InvalidInput("mode index n must be >= 1".into()));
    }
    let index = if dim == 1 { n + 1 } else { n };
    specfun::bessel_zero(BesselOrder::radial(dim)?, index)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DirichletConstants {
    /// `j_{N/2-1,n}`.
    pub j: f64,
    pub nu1: f64,
    pub lambda_n: f64,
    pub mu_n: f64,
    pub kappa_n: f64,
    /// `I'_{N/2-1}(j)`, kept with its sign.
    pub c_n: f64,
    pub beta_n: f64,
    pub delta_n: f64,
    /// `sqrt(j_{N/2-1,1}^2 - nu_1)`, independent of `n`.
    pub r_star: f64,
    pub neumann_magnitude: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Provenance {
    pub nu1_residual: f64,
    pub zero_residuals: Vec<f64>,
}

pub fn dirichlet_constants(dims: ProblemDims) -> Result<DirichletConstants> {
    dirichlet_constants_with_provenance(dims).map(|(c, _)| c)
}

pub fn dirichlet_constants_with_provenance(
    dims: ProblemDims,
) -> Result<(DirichletConstants, Provenance)> {
    let beta = dims.beta();
    let nu = spectra::nu_eigenvalue(dims.dim, 1)?;
    let zero = mode_zero(dims.dim, dims.n)?;
    let first = mode_zero(dims.dim, 1)?;
    let j = zero.value;
    let lambda_n = j * j - nu.value;
    if lambda_n <= 0.0 {
        return Err(Error::Domain(format!(
            "lambda_n = {lambda_n} is not positive"
        )));
    }
    let c_n = -j * inu(beta + 1.0, j);
    let psi1 = inu(beta, nu.sqrt_value);
    let delta_n = -psi1 / (j * c_n);
    let beta_n = -delta_n / lambda_n.sqrt();
    let consts = DirichletConstants {
        j,
        nu1: nu.value,
        lambda_n,
        mu_n: j * j / lambda_n,
        kappa_n: 1.0 / j,
        c_n,
        beta_n,
        delta_n,
        r_star: (first.value * first.value - nu.value).sqrt(),
        neumann_magnitude: c_n.abs(),
    };
    let mut zero_residuals = vec![zero.residual];
    if dims.n != 1 {
        zero_residuals.push(first.residual);
    }
    Ok((
        consts,
        Provenance {
            nu1_residual: nu.residual,
            zero_residuals,
        },
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SlabConstants {
    pub n: usize,
    pub gamma_n: f64,
    pub d_n: f64,
    pub a_n: f64,
    pub b_n: f64,
}

pub fn slab_constants(n: usize) -> Result<SlabConstants> {
    if n == 0 {
        return Err(Error::InvalidInput("mode index n must be >= 1".into()));
    }
    let nf = n as f64;
    let gamma_n = PI * PI * (nf * nf - 0.25);
    Ok(SlabConstants {
        n,
        gamma_n,
        d_n: nf * nf / (nf * nf - 0.25),
        a_n: 1.0 / (nf * PI),
        b_n: gamma_n.sqrt().recip(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TableKind {
    Dirichlet,
    Slab,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeTable {
    pub kind: TableKind,
    pub dims: ProblemDims,
    pub lambda: f64,
    /// First `l` index of the columns (1 for the cylinder, 0 for the slab).
    pub ell_start: usize,
    /// `sigma[k][l - ell_start]` for `k = 0..=k_max`.
    #[serde(skip)]
    pub sigma: Vec<Vec<f64>>,
    pub kernel_hits: Vec<(usize, usize)>,
    pub tol: f64,
}

impl ModeTable {
    pub fn get(&self, k: usize, ell: usize) -> f64 {
        self.sigma[k][ell - self.ell_start]
    }

    /// Smallest `|sigma|` outside the hit list, with its location.
    pub fn nearest_miss(&self) -> Option<(usize, usize, f64)> {
        let mut best: Option<(usize, usize, f64)> = None;
        for (k, row) in self.sigma.iter().enumerate() {
            for (i, s) in row.iter().enumerate() {
                let ell = i + self.ell_start;
                if self.kernel_hits.contains(&(k, ell)) {
                    continue;
                }
                if best.is_none_or(|b| s.abs() < b.2) {
                    best = Some((k, ell, s.abs()));
                }
            }
        }
        best
    }
}

fn check_table_args(k_max: usize, ell_max: usize, tol: f64) -> Result<()> {
    if k_max < 2 || ell_max < 2 {
        return Err(Error::InvalidInput("k_max and ell_max must be >= 2".into()));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidInput("tol must be positive".into()));
    }
    Ok(())
}

fn build_table(
    kind: TableKind,
    dims: ProblemDims,
    lambda: f64,
    ell_start: usize,
    shift: f64,
    radial: &[f64],
    k_max: usize,
    tol: f64,
) -> ModeTable {
    let sigma: Vec<Vec<f64>> = (0..=k_max)
        .map(|k| {
            radial
                .iter()
                .map(|&v| v - shift + (k * k) as f64 * lambda)
                .collect()
        })
        .collect();
    let kernel_hits = sigma
        .iter()
        .enumerate()
        .flat_map(|(k, row)| {
            row.iter()
                .enumerate()
                .filter(|(_, s)| s.abs() < tol)
                .map(move |(i, _)| (k, i + ell_start))
        })
        .collect();
    ModeTable {
        kind,
        dims,
        lambda,
        ell_start,
        sigma,
        kernel_hits,
        tol,
    }
}

/// `sigma_{k,l} = nu_l - j^2 + k^2 lambda` for `k = 0..=k_max`, `l = 1..=ell_max`.
pub fn mode_table(
    dims: ProblemDims,
    lambda: f64,
    k_max: usize,
    ell_max: usize,
    tol: f64,
) -> Result<ModeTable> {
    check_table_args(k_max, ell_max, tol)?;
    let j = mode_zero(dims.dim, dims.n)?.value;
    let nus: Vec<f64> = spectra::nu_eigenvalues(dims.dim, ell_max)?
        .iter()
        .map(|e| e.value)
        .collect();
    Ok(build_table(
        TableKind::Dirichlet,
        dims,
        lambda,
        1,
        j * j,
        &nus,
        k_max,
        tol,
    ))
}

/// Slab analogue: `J_l^2 - n^2 pi^2 + k^2 lambda` with `J_l = (l + 1/2) pi`, `l = 0..=ell_max`.
pub fn slab_mode_table(
    n: usize,
    lambda: f64,
    k_max: usize,
    ell_max: usize,
    tol: f64,
) -> Result<ModeTable> {
    check_table_args(k_max, ell_max, tol)?;
    let dims = ProblemDims::new(1, 1, n)?;
    let js: Vec<f64> = (0..=ell_max)
        .map(|l| spectra::slab_eigenvalue(l).value.powi(2))
        .collect();
    let nf = n as f64;
    Ok(build_table(
        TableKind::Slab,
        dims,
        lambda,
        0,
        nf * nf * PI * PI,
        &js,
        k_max,
        tol,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassicalRadii {
    pub r_star: f64,
    pub rho: f64,
    pub t_star: f64,
    /// Values of the `rho` equation at the two ends of its bracket.
    pub rho_bracket_values: (f64, f64),
}

/// `R_*(N)` and the comparison period `T_*(N) = 2 pi / sqrt(j^2 - rho^2)`,
/// where `rho` is the zero of `z J_{N/2-2}(z) + J_{N/2-1}(z)` below `j = j_{N/2-1,1}`.
///
/// The recurrence `z J_{b-1} = 2b J_b - z J_{b+1}` turns the `rho` equation into
/// `(2b + 1) J_b(z) - z J_{b+1}(z) = 0`, which is solved in that form (it avoids
/// the order `-3/2` when `N = 1`). It is the Robin condition again, so `rho = sqrt(nu_1)`
/// and `T_* R_* = 2 pi`.
pub fn classical_radii(dim: usize) -> Result<ClassicalRadii> {
    let beta = BesselOrder::radial(dim)?.value();
    let j = mode_zero(dim, 1)?.value;
    let nu1 = spectra::nu_eigenvalue(dim, 1)?.value;
    let f = |z: f64| -robin_condition(beta, z);
    let lo = 1e-3;
    let hi = j * (1.0 - 1e-9);
    let brackets = roots::scan_sign_changes(f, lo, hi, 1e-2, 4);
    let &(a, b) = brackets.first().ok_or(Error::Bracket {
        what: "rho".into(),
        lo,
        hi,
    })?;
    let rho = roots::brent("rho", f, a, b, 1e-15)?;
    Ok(ClassicalRadii {
        r_star: (j * j - nu1).sqrt(),
        rho,
        t_star: 2.0 * PI / (j * j - rho * rho).sqrt(),
        rho_bracket_values: (f(a), f(b)),
    })
}

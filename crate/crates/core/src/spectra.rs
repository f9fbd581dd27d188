//! Radial Robin eigenvalues `nu_l` of the cylinder problem, slab eigenvalues
//! `J_l = (l + 1/2) pi`, and a finite-volume oracle for the radial problem.
//!
//! The Robin problem is
//! `-w'' - (N-1)/r w' = nu w` on `(0, 1)`, `w'(1) + (N-1) w(1) = 0`,
//! whose bounded solutions are `I_beta(r sqrt(nu))`, `beta = N/2 - 1`, with
//! `sqrt(nu)` a root of `z J_{beta+1}(z) = (2 beta + 1) J_beta(z)`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::roots;
use crate::specfun::{self, inu, jv, BesselOrder};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RadialEigenvalue {
    pub ell: usize,
    pub beta: f64,
    pub value: f64,
    pub sqrt_value: f64,
    /// Interval of `sqrt(nu)` used for the root solve.
    pub bracket: (f64, f64),
    /// `|z J_{beta+1}(z) - (2 beta + 1) J_beta(z)|` at `z = sqrt(nu)`.
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SlabEigenvalue {
    pub ell: usize,
    pub value: f64,
}

pub fn slab_eigenvalue(ell: usize) -> SlabEigenvalue {
    SlabEigenvalue {
        ell,
        value: (ell as f64 + 0.5) * PI,
    }
}

/// Left-hand side of the eigenvalue condition written without poles:
/// `z^2 I_{beta+1}(z) - (2 beta + 1) I_beta(z)`, which equals
/// `z^-beta (z J_{beta+1}(z) - (2 beta + 1) J_beta(z))` and has the same positive roots.
pub fn robin_condition(beta: f64, z: f64) -> f64 {
    z * z * inu(beta + 1.0, z) - (2.0 * beta + 1.0) * inu(beta, z)
}

fn check_dim(dim: usize) -> Result<BesselOrder> {
    if dim == 0 {
        return Err(Error::InvalidInput(
            "radial dimension N must be >= 1".into(),
        ));
    }
    BesselOrder::radial(dim)
}

/// The `ell`-th radial Robin eigenvalue for dimension `dim`.
pub fn nu_eigenvalue(dim: usize, ell: usize) -> Result<RadialEigenvalue> {
    if ell == 0 {
        return Err(Error::InvalidInput(
            "radial eigenvalues are indexed from 1".into(),
        ));
    }
    nu_eigenvalues(dim, ell).map(|mut v| v.pop().expect("ell >= 1"))
}

/// The first `count` radial Robin eigenvalues.
///
/// For `N >= 2` the roots interlace as `sqrt(nu_1) < j_{beta,1}` and
/// `j_{beta+1,l-1} < sqrt(nu_l) < j_{beta,l}`. For `N = 1` the condition
/// degenerates to `z J_{1/2}(z) = 0`; the root at the origin (the constant
/// Neumann mode) is excluded and `sqrt(nu_l) = j_{1/2,l} = l pi`, which lies in
/// `(j_{-1/2,l}, j_{-1/2,l+1})`.
pub fn nu_eigenvalues(dim: usize, count: usize) -> Result<Vec<RadialEigenvalue>> {
    let order = check_dim(dim)?;
    let beta = order.value();
    let zeros: Vec<f64> = specfun::bessel_zeros(order, count + 1)?
        .iter()
        .map(|z| z.value)
        .collect();
    let upper: Vec<f64> = if dim == 1 {
        Vec::new()
    } else {
        specfun::bessel_zeros(order.raised(1), count)?
            .iter()
            .map(|z| z.value)
            .collect()
    };
    (1..=count)
        .map(|ell| {
            let bracket = if dim == 1 {
                (zeros[ell - 1], zeros[ell])
            } else if ell == 1 {
                (0.0, zeros[0])
            } else {
                (upper[ell - 2], zeros[ell - 1])
            };
            let z = roots::brent(
                &format!("radial Robin eigenvalue {ell} (N = {dim})"),
                |z| robin_condition(beta, z),
                bracket.0,
                bracket.1,
                1e-15,
            )?;
            Ok(RadialEigenvalue {
                ell,
                beta,
                value: z * z,
                sqrt_value: z,
                bracket,
                residual: (z * jv(beta + 1.0, z) - (2.0 * beta + 1.0) * jv(beta, z)).abs(),
            })
        })
        .collect()
}

/// Value and derivatives of a radial function at one point.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RadialJet {
    pub v: f64,
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
    /// `d1 / r`, finite at `r = 0` for even profiles.
    pub d1_over_r: f64,
}

/// `r -> I_beta(a r)` with closed-form derivatives obtained from
/// `d/dz I_nu(z) = -z I_{nu+1}(z)`; all of them are regular at `r = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BesselProfile {
    pub beta: f64,
    pub wavenumber: f64,
}

impl BesselProfile {
    pub fn new(beta: f64, wavenumber: f64) -> Self {
        Self { beta, wavenumber }
    }

    pub fn value(&self, r: f64) -> f64 {
        inu(self.beta, self.wavenumber * r.abs())
    }

    pub fn deriv(&self, r: f64) -> f64 {
        let a = self.wavenumber;
        -a * a * r * inu(self.beta + 1.0, a * r.abs())
    }

    pub fn jet(&self, r: f64) -> RadialJet {
        let a = self.wavenumber;
        let z = a * r.abs();
        let (i0, i1, i2, i3) = (
            inu(self.beta, z),
            inu(self.beta + 1.0, z),
            inu(self.beta + 2.0, z),
            inu(self.beta + 3.0, z),
        );
        let a2 = a * a;
        let a4 = a2 * a2;
        RadialJet {
            v: i0,
            d1: -a2 * r * i1,
            d2: -a2 * i1 + a4 * r * r * i2,
            d3: 3.0 * a4 * r * i2 - a4 * a2 * r * r * r * i3,
            d1_over_r: -a2 * i1,
        }
    }
}

/// The eigenfunction `psi_{nu_l}(r) = I_{N/2-1}(r sqrt(nu_l))`.
pub fn radial_eigenfunction(dim: usize, ell: usize) -> Result<BesselProfile> {
    let ev = nu_eigenvalue(dim, ell)?;
    Ok(BesselProfile::new(ev.beta, ev.sqrt_value))
}

/// Symmetric tridiagonal finite-volume form of the radial Robin problem on
/// `cells` cells, already scaled by the inverse square root of the cell volumes.
/// Returns `(diagonal, off_diagonal)`.
fn oracle_matrix(dim: usize, cells: usize) -> (Vec<f64>, Vec<f64>) {
    let h = 1.0 / cells as f64;
    let nf = dim as f64;
    let face = |i: usize| (i as f64 * h).powi(dim as i32 - 1);
    let volume =
        |i: usize| (((i + 1) as f64 * h).powi(dim as i32) - (i as f64 * h).powi(dim as i32)) / nf;
    let mut diag = vec![0.0; cells];
    let mut off = vec![0.0; cells.saturating_sub(1)];
    for i in 0..cells - 1 {
        let c = face(i + 1) / h;
        diag[i] += c;
        diag[i + 1] += c;
        off[i] = -c;
    }
    // Robin face at r = 1: flux w'(1) = -(N-1) w(1), with w(1) extrapolated
    // from the last centre, w(1) = w_last / (1 + (N-1) h / 2).
    diag[cells - 1] += (nf - 1.0) / (1.0 + 0.5 * (nf - 1.0) * h);
    let scale: Vec<f64> = (0..cells).map(|i| volume(i).sqrt().recip()).collect();
    for i in 0..cells {
        diag[i] *= scale[i] * scale[i];
    }
    for i in 0..cells - 1 {
        off[i] *= scale[i] * scale[i + 1];
    }
    (diag, off)
}

/// Number of eigenvalues of the symmetric tridiagonal matrix below `x` (Sturm count).
fn sturm_count(diag: &[f64], off: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut d = 1.0;
    for i in 0..diag.len() {
        let b2 = if i == 0 { 0.0 } else { off[i - 1] * off[i - 1] };
        d = diag[i] - x - if i == 0 { 0.0 } else { b2 / d };
        if d == 0.0 {
            d = f64::EPSILON * (diag[i].abs() + 1.0);
        }
        if d < 0.0 {
            count += 1;
        }
    }
    count
}

/// Independent estimate of `nu_ell` from a cell-centred finite-volume
/// discretisation (volume-weighted, symmetric), extracting the eigenvalue by
/// Sturm-sequence bisection. For `N = 1` the zero eigenvalue of the constant
/// Neumann mode is skipped so the indexing matches [`nu_eigenvalue`].
pub fn nu_eigenvalue_oracle(dim: usize, ell: usize, grid_size: usize) -> Result<f64> {
    check_dim(dim)?;
    if grid_size < 64 {
        return Err(Error::InvalidInput(format!(
            "oracle grid must have >= 64 cells, got {grid_size}"
        )));
    }
    if ell == 0 || ell >= grid_size {
        return Err(Error::InvalidInput(format!(
            "eigenvalue index {ell} out of range"
        )));
    }
    let (diag, off) = oracle_matrix(dim, grid_size);
    let target = if dim == 1 { ell + 1 } else { ell };
    let upper = diag
        .iter()
        .enumerate()
        .map(|(i, d)| {
            let l = if i > 0 { off[i - 1].abs() } else { 0.0 };
            let r = if i + 1 < diag.len() {
                off[i].abs()
            } else {
                0.0
            };
            d + l + r
        })
        .fold(0.0, f64::max);
    let (mut lo, mut hi) = (-1.0, upper + 1.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if sturm_count(&diag, &off, mid) >= target {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= 1e-14 * hi.abs().max(1.0) {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Number of oracle eigenvalues that are `<= x`.
pub fn oracle_eigenvalues_at_most(dim: usize, grid_size: usize, x: f64) -> Result<usize> {
    check_dim(dim)?;
    let (diag, off) = oracle_matrix(dim, grid_size);
    Ok(sturm_count(
        &diag,
        &off,
        x + f64::EPSILON * x.abs().max(1.0),
    ))
}

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::constants::ProblemDims;
use crate::error::{Error, Result};
use crate::profiles::{
    cylinder_first_order_field, slab_first_order_field, ProfileKind, SolutionField,
};
use crate::quad::simpson_weights;

use super::linearization::{dg_boundary, dg_interior};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransversalityReport {
    pub problem: ProfileKind,
    pub dims: ProblemDims,
    pub value: f64,
}

const RADIAL_INTERVALS: usize = 2000;
const ANGULAR_INTERVALS: usize = 256;

/// Area of the unit sphere `S^{N-1}` (2 for `N = 1`).
pub(crate) fn sphere_area(dim: usize) -> f64 {
    let half = dim as f64 / 2.0;
    2.0 * PI.powf(half) / libm::tgamma(half)
}

/// `int w v - int_boundary h v` with `(w, h) = d/dlambda DG_lambda(0) v_*`,
/// evaluated by two-dimensional Simpson quadrature (`m = 1`) or its separable
/// factorisation (`m > 1`).
fn pairing(field: &SolutionField) -> Result<f64> {
    // DG is affine in lambda, so a unit difference is the exact derivative.
    let shifted = field.with_lambda(field.lambda + 1.0);
    let dw = |r: f64, x: &[f64]| dg_interior(&shifted, r, x) - dg_interior(field, r, x);
    let dh = |x: &[f64]| dg_boundary(&shifted, x) - dg_boundary(field, x);
    let v = |r: f64, x: &[f64]| field.probe.value(r) * field.angular_value(x);

    let (r0, weight_fn): (f64, Box<dyn Fn(f64) -> f64 + Sync>) = match field.kind {
        ProfileKind::Dirichlet => {
            let dim = field.dims.dim;
            let area = sphere_area(dim);
            (0.0, Box::new(move |r: f64| area * r.powi(dim as i32 - 1)))
        }
        ProfileKind::Slab => (-1.0, Box::new(|_| 1.0)),
    };
    let hr = (1.0 - r0) / RADIAL_INTERVALS as f64;
    let wr = simpson_weights(RADIAL_INTERVALS, hr);
    let hx = 2.0 * PI / ANGULAR_INTERVALS as f64;
    let wx = simpson_weights(ANGULAR_INTERVALS, hx);
    if field.dims.m == 1 {
        let rows: Vec<f64> = wr
            .par_iter()
            .enumerate()
            .map(|(i, a)| {
                let r = r0 + i as f64 * hr;
                let row: f64 = wx
                    .iter()
                    .enumerate()
                    .map(|(j, b)| {
                        let x = [j as f64 * hx];
                        b * dw(r, &x) * v(r, &x)
                    })
                    .sum();
                a * weight_fn(r) * row
            })
            .collect();
        let interior: f64 = rows.iter().sum();
        let boundary_measure = match field.kind {
            ProfileKind::Dirichlet => sphere_area(field.dims.dim),
            ProfileKind::Slab => 2.0,
        };
        let boundary: f64 = wx
            .iter()
            .enumerate()
            .map(|(j, b)| b * dh(&[j as f64 * hx]) * v(1.0, &[j as f64 * hx]))
            .sum();
        Ok(interior - boundary_measure * boundary)
    } else {
        // Both pieces factor into radial and angular integrals.
        let zero = vec![0.0; field.dims.m];
        let c = dw(0.5, &zero) / v(0.5, &zero);
        if !c.is_finite() {
            return Err(Error::Domain(
                "probe vanishes at the reference point".into(),
            ));
        }
        let radial: f64 = wr
            .iter()
            .enumerate()
            .map(|(i, a)| {
                let r = r0 + i as f64 * hr;
                a * weight_fn(r) * field.probe.value(r).powi(2)
            })
            .sum();
        let angular = field.dims.m as f64 * PI * (2.0 * PI).powi(field.dims.m as i32 - 1);
        Ok(c * radial * angular)
    }
}

/// Pairing of `d/dlambda DG(0) v_*` against `v_*` for the cylinder; equals
/// `-||psi_1||^2 ||theta||^2`.
pub fn transversality_pairing(dims: ProblemDims) -> Result<TransversalityReport> {
    let f = cylinder_first_order_field(dims, 0.0)?;
    Ok(TransversalityReport {
        problem: ProfileKind::Dirichlet,
        dims,
        value: pairing(&f)?,
    })
}

pub fn slab_transversality_pairing(n: usize, m: usize) -> Result<TransversalityReport> {
    let f = slab_first_order_field(n, m, 0.0)?;
    Ok(TransversalityReport {
        problem: ProfileKind::Slab,
        dims: f.dims,
        value: pairing(&f)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_forms() {
        let v = transversality_pairing(ProblemDims::new(1, 1, 1).unwrap())
            .unwrap()
            .value;
        assert!((v + 2.0).abs() < 1e-10, "{v}");
        let v = slab_transversality_pairing(1, 1).unwrap().value;
        assert!((v + PI).abs() < 1e-10, "{v}");
        let v = slab_transversality_pairing(1, 2).unwrap().value;
        assert!((v + 4.0 * PI * PI).abs() < 1e-9, "{v}");
    }

    #[test]
    fn sphere_areas() {
        assert!((sphere_area(1) - 2.0).abs() < 1e-15);
        assert!((sphere_area(2) - 2.0 * PI).abs() < 1e-14);
        assert!((sphere_area(3) - 4.0 * PI).abs() < 1e-14);
    }

    #[test]
    fn strictly_negative() {
        for dim in 1..=4 {
            for n in 1..=2 {
                let v = transversality_pairing(ProblemDims::new(dim, 1, n).unwrap())
                    .unwrap()
                    .value;
                assert!(v < -1e-3, "N={dim} n={n}: {v}");
            }
        }
    }
}

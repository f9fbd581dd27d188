use serde::Serialize;

use crate::error::Result;
use crate::profiles::{ProfileKind, SolutionField};

use super::{loglog_slope, residual_sups, NeumannMetric, SampleGrid};
use crate::constants::ProblemDims;
use crate::pullback::{analytic_neumann, analytic_operator_with_jets};

/// Interior component of `DG_lambda(0) v` for `v = R(r) omega_k(x)`:
/// `omega_k (R'' + (N-1) R'/r + (c0 - lambda k^2) R)`.
pub fn dg_interior(field: &SolutionField, r: f64, x: &[f64]) -> f64 {
    let p = field.probe.jet(r);
    let k = field.angular as f64;
    let radial = if field.dims.dim > 1 {
        (field.dims.dim as f64 - 1.0) * p.d1_over_r
    } else {
        0.0
    };
    field.angular_value(x) * (p.d2 + radial + (field.zero_order - field.lambda * k * k) * p.v)
}

/// Boundary component of `DG_lambda(0) v`: `omega_k (R'(1) - c A''(1))`, which equals
/// `omega_k (R'(1) + (N-1) R(1))` on the cylinder and `omega_k R'(1)` on the slab.
pub fn dg_boundary(field: &SolutionField, x: &[f64]) -> f64 {
    let p = field.probe.jet(1.0);
    let a = field.base.jet(1.0);
    field.angular_value(x) * (p.d1 - field.trace_ratio * a.d2)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinearizationReport {
    pub problem: ProfileKind,
    pub dims: ProblemDims,
    pub lambda: f64,
    pub angular_mode: usize,
    pub eps: Vec<f64>,
    /// `sup |G(eps v) / eps - DG v|` per component.
    pub interior_deviation: Vec<f64>,
    pub boundary_deviation: Vec<f64>,
    pub dg_interior_sup: f64,
    pub dg_boundary_sup: f64,
    pub interior_rate: f64,
    pub boundary_rate: f64,
}

/// Compares difference quotients of the nonlinear map with its analytic
/// derivative along the probe carried by `field`.
pub fn linearization_check(
    field: &SolutionField,
    eps: &[f64],
    grid: SampleGrid,
) -> Result<LinearizationReport> {
    super::check_sweep(eps, 2)?;
    residual_sups(&field.with_s(eps[0]), grid, NeumannMetric::Constant)?;
    let radii: Vec<f64> = (0..grid.n_r)
        .map(|i| i as f64 / (grid.n_r - 1) as f64)
        .collect();
    let points: Vec<Vec<f64>> = (0..grid.n_x)
        .map(|j| {
            let t = 2.0 * std::f64::consts::PI * j as f64 / grid.n_x as f64;
            (0..field.dims.m)
                .map(|i| (t * (i + 1) as f64).rem_euclid(2.0 * std::f64::consts::PI))
                .collect()
        })
        .collect();
    let target = field.base.jet(1.0).d1;
    let mut dg_interior_sup: f64 = 0.0;
    let mut dg_boundary_sup: f64 = 0.0;
    let mut interior_deviation = Vec::with_capacity(eps.len());
    let mut boundary_deviation = Vec::with_capacity(eps.len());
    for &e in eps {
        let f = field.with_s(e);
        let mut dev_i: f64 = 0.0;
        for &r in &radii {
            let jets = f.jets(r);
            for x in &points {
                let dg = dg_interior(field, r, x);
                dg_interior_sup = dg_interior_sup.max(dg.abs());
                dev_i = dev_i.max((analytic_operator_with_jets(&f, r, &jets, x) / e - dg).abs());
            }
        }
        let mut dev_b: f64 = 0.0;
        for x in &points {
            let dg = dg_boundary(field, x);
            dg_boundary_sup = dg_boundary_sup.max(dg.abs());
            dev_b = dev_b.max(((analytic_neumann(&f, x, f.lambda) - target) / e - dg).abs());
        }
        interior_deviation.push(dev_i);
        boundary_deviation.push(dev_b);
    }
    Ok(LinearizationReport {
        problem: field.kind,
        dims: field.dims,
        lambda: field.lambda,
        angular_mode: field.angular,
        interior_rate: loglog_slope(eps, &interior_deviation)?,
        boundary_rate: loglog_slope(eps, &boundary_deviation)?,
        eps: eps.to_vec(),
        interior_deviation,
        boundary_deviation,
        dg_interior_sup,
        dg_boundary_sup,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::ProblemDims;
    use crate::profiles::{cylinder_first_order_field, slab_first_order_field, RadialShape};
    use crate::spectra::BesselProfile;

    const EPS: [f64; 3] = [1e-2, 1e-3, 1e-4];
    const GRID: SampleGrid = SampleGrid { n_r: 41, n_x: 32 };

    #[test]
    fn kernel_direction_has_vanishing_derivative() {
        for dim in 1..=3 {
            let f = cylinder_first_order_field(ProblemDims::new(dim, 1, 1).unwrap(), 0.0).unwrap();
            let rep = linearization_check(&f, &EPS, GRID).unwrap();
            assert!(rep.dg_interior_sup < 1e-12 && rep.dg_boundary_sup < 1e-12);
            assert!(rep.interior_rate > 0.95, "{rep:?}");
            assert!(rep.interior_deviation[2] < 1e-2);
        }
        let f = slab_first_order_field(1, 1, 0.0).unwrap();
        let rep = linearization_check(&f, &EPS, GRID).unwrap();
        assert!(rep.dg_interior_sup < 1e-12 && rep.dg_boundary_sup < 1e-12);
        assert!(rep.interior_rate > 0.95 && rep.boundary_rate > 0.95);
    }

    #[test]
    fn non_kernel_probe_converges_to_derivative() {
        let f = cylinder_first_order_field(ProblemDims::new(2, 1, 1).unwrap(), 0.0).unwrap();
        let probe = f.with_probe(RadialShape::Bessel(BesselProfile::new(0.0, 1.7)), 1);
        let rep = linearization_check(&probe, &EPS, GRID).unwrap();
        assert!(rep.dg_interior_sup > 0.1 && rep.dg_boundary_sup > 0.1);
        assert!(
            rep.interior_rate > 0.95 && rep.boundary_rate > 0.95,
            "{rep:?}"
        );
        let control = f.with_probe(f.probe, 2);
        let rep = linearization_check(&control, &EPS, GRID).unwrap();
        assert!(rep.dg_interior_sup > 0.1);
        assert!(rep.interior_rate > 0.95);
    }

    #[test]
    fn boundary_derivative_is_the_robin_form() {
        let f = cylinder_first_order_field(ProblemDims::new(3, 1, 2).unwrap(), 0.0).unwrap();
        let probe = f.with_probe(RadialShape::Bessel(BesselProfile::new(0.5, 2.3)), 1);
        let p = probe.probe.jet(1.0);
        let x = [0.4f64];
        let expect = x[0].cos() * (p.d1 + 2.0 * p.v);
        assert!((dg_boundary(&probe, &x) - expect).abs() < 1e-12);
    }
}

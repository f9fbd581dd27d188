//! Shift-invert block subspace iteration for the eigenvalue of
//! `K = -(L^H - c0)` nearest a target.

use crate::error::{Error, Result};

use super::{GridField, PullbackOperator};

pub const DEFAULT_EIGEN_TOL: f64 = 1e-9;
const MAX_ITERATIONS: usize = 200;
const DEGENERACY_GAP: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct Eigenpair {
    pub value: f64,
    /// Normalised to max-abs 1, positive at the first node.
    pub field: GridField,
    pub iterations: usize,
    /// `||K u - value u||_inf / ||u||_inf`.
    pub residual: f64,
    pub ritz_values: [f64; 2],
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalize(v: &mut [f64]) -> f64 {
    let n = dot(v, v).sqrt();
    v.iter_mut().for_each(|x| *x /= n);
    n
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Eigenpair of `K u = value u` with `value` nearest `target`; `K` is the
/// operator without its zero-order term, negated, so a flat profile gives
/// `value = c0` up to discretisation error.
pub fn solve_eigenpair_near(
    op: &PullbackOperator,
    target: f64,
    seed: &GridField,
    tol: f64,
) -> Result<Eigenpair> {
    let x0 = op.to_vector(seed);
    if inf_norm(&x0) == 0.0 {
        return Err(Error::InvalidInput("eigen seed is identically zero".into()));
    }
    let lu = op.shifted_banded(target).factor()?;
    let k_apply = |v: &[f64]| -> Vec<f64> { op.apply_stripped(v).iter().map(|a| -a).collect() };

    let n_ang = op.angular_unknowns();
    let nodes = &op.grid.radial_nodes;
    let x1: Vec<f64> = x0
        .iter()
        .enumerate()
        .map(|(k, v)| {
            let (i, j) = (k / n_ang, k % n_ang);
            v * (nodes[i] + op.grid.angle(j).cos()) + 1e-3 * nodes[i]
        })
        .collect();
    let mut block = [x0, x1];
    let mut last_ritz = [f64::NAN; 2];

    for iteration in 1..=MAX_ITERATIONS {
        for b in block.iter_mut() {
            lu.solve_in_place(b);
        }
        // modified Gram-Schmidt
        normalize(&mut block[0]);
        let p = dot(&block[0], &block[1]);
        let (q0, q1) = block.split_at_mut(1);
        q1[0].iter_mut().zip(&q0[0]).for_each(|(y, x)| *y -= p * x);
        if normalize(&mut block[1]) < 1e-300 {
            block[1] = block[0]
                .iter()
                .enumerate()
                .map(|(k, v)| v * (k as f64).sin())
                .collect();
            let p = dot(&block[0], &block[1]);
            let (q0, q1) = block.split_at_mut(1);
            q1[0].iter_mut().zip(&q0[0]).for_each(|(y, x)| *y -= p * x);
            normalize(&mut block[1]);
        }
        let kq = [k_apply(&block[0]), k_apply(&block[1])];
        let g = [
            [dot(&block[0], &kq[0]), dot(&block[0], &kq[1])],
            [dot(&block[1], &kq[0]), dot(&block[1], &kq[1])],
        ];
        let half_trace = 0.5 * (g[0][0] + g[1][1]);
        let disc = 0.25 * (g[0][0] - g[1][1]).powi(2) + g[0][1] * g[1][0];
        if disc < 0.0 {
            last_ritz = [half_trace, half_trace];
            continue;
        }
        let root = disc.sqrt();
        let ritz = [half_trace - root, half_trace + root];
        last_ritz = ritz;
        let theta = if (ritz[0] - target).abs() <= (ritz[1] - target).abs() {
            ritz[0]
        } else {
            ritz[1]
        };
        let a = [g[0][1], theta - g[0][0]];
        let b = [theta - g[1][1], g[1][0]];
        let c = if a[0].hypot(a[1]) >= b[0].hypot(b[1]) {
            a
        } else {
            b
        };
        let u: Vec<f64> = block[0]
            .iter()
            .zip(&block[1])
            .map(|(p, q)| c[0] * p + c[1] * q)
            .collect();
        let ku: Vec<f64> = kq[0]
            .iter()
            .zip(&kq[1])
            .map(|(p, q)| c[0] * p + c[1] * q)
            .collect();
        let residual = inf_norm(
            &ku.iter()
                .zip(&u)
                .map(|(k, v)| k - theta * v)
                .collect::<Vec<_>>(),
        ) / inf_norm(&u);
        if residual < tol {
            if (ritz[1] - ritz[0]).abs() < DEGENERACY_GAP {
                return Err(Error::NearlyDegenerate(ritz[0], ritz[1]));
            }
            let mut field = op.from_vector(&u);
            let scale = field.max_abs();
            let first = field
                .values
                .iter()
                .copied()
                .find(|v| v.abs() > 1e-12 * scale)
                .unwrap_or(1.0);
            let factor = first.signum() / scale;
            field.values.iter_mut().for_each(|v| *v *= factor);
            return Ok(Eigenpair {
                value: theta,
                field,
                iterations: iteration,
                residual,
                ritz_values: ritz,
            });
        }
        block = [u, block[1].clone()];
    }
    if last_ritz[0] == last_ritz[1] {
        return Err(Error::NearlyDegenerate(last_ritz[0], last_ritz[1]));
    }
    Err(Error::NoConvergence {
        what: "shift-invert eigen iteration".into(),
        iterations: MAX_ITERATIONS,
        lo: last_ritz[0],
        hi: last_ritz[1],
    })
}

#[cfg(test)]
mod tests {
    use super::super::*;
    use super::*;
    use crate::constants::ProblemDims;
    use crate::profiles::{cylinder_first_order_field, slab_first_order_field};
    use std::f64::consts::PI;

    fn flat_cylinder_error(n_r: usize) -> f64 {
        let f = cylinder_first_order_field(ProblemDims::new(1, 1, 1).unwrap(), 0.0).unwrap();
        let grid = TensorGrid::cylinder(n_r, 16).unwrap();
        let op = assemble_cylinder_operator(
            &f.reference_profile().unwrap(),
            1,
            f.lambda,
            1,
            &grid,
            Reduction::EvenInX,
        )
        .unwrap();
        let seed = GridField::sample(&grid, |r, x| f.value(r, &[x]));
        let ep = solve_eigenpair_near(&op, f.zero_order, &seed, DEFAULT_EIGEN_TOL).unwrap();
        assert!(ep.residual < DEFAULT_EIGEN_TOL);
        assert!(ep.field.get(0, 0) > 0.0 && (ep.field.max_abs() - 1.0).abs() < 1e-15);
        ep.value - f.zero_order
    }

    #[test]
    fn flat_cylinder_converges_at_second_order() {
        let (e1, e2) = (flat_cylinder_error(32), flat_cylinder_error(64));
        assert!(e1.abs() < 0.05 * 2.25 * PI * PI);
        let ratio = e1 / e2;
        assert!(ratio > 3.5 && ratio < 4.5, "{e1} {e2}");
    }

    #[test]
    fn flat_slab_matches_discrete_sine_eigenvalue() {
        let f = slab_first_order_field(1, 1, 0.0).unwrap();
        let grid = TensorGrid::slab(63, 16).unwrap();
        let op = assemble_slab_operator(
            &f.reference_profile().unwrap(),
            f.lambda,
            1,
            &grid,
            Reduction::EvenInX,
        )
        .unwrap();
        let seed = GridField::sample(&grid, |t, _| (PI * t).sin());
        let ep = solve_eigenpair_near(&op, PI * PI, &seed, DEFAULT_EIGEN_TOL).unwrap();
        let d = grid.radial_spacing;
        let exact = 4.0 / (d * d) * (PI * d / 2.0).sin().powi(2);
        assert!((ep.value - exact).abs() < 1e-9, "{} vs {exact}", ep.value);
    }

    #[test]
    fn perturbed_eigenfield_is_even_in_x() {
        let f = cylinder_first_order_field(ProblemDims::new(1, 1, 1).unwrap(), 0.05).unwrap();
        let grid = TensorGrid::cylinder(32, 32).unwrap();
        let op = assemble_cylinder_operator(
            &f.reference_profile().unwrap(),
            1,
            f.lambda,
            1,
            &grid,
            Reduction::Periodic,
        )
        .unwrap();
        let seed = GridField::sample(&grid, |r, x| f.value(r, &[x]));
        let ep = solve_eigenpair_near(&op, f.zero_order, &seed, DEFAULT_EIGEN_TOL).unwrap();
        for i in 0..32 {
            for j in 1..32 {
                assert!((ep.field.get(i, j) - ep.field.get(i, 32 - j)).abs() < 1e-8);
            }
        }
        assert!((ep.value - f.zero_order).abs() < 0.1);
    }

    #[test]
    fn zero_seed_is_rejected() {
        let grid = TensorGrid::slab(8, 8).unwrap();
        let f = slab_first_order_field(1, 1, 0.0).unwrap();
        let op = assemble_slab_operator(
            &f.reference_profile().unwrap(),
            f.lambda,
            1,
            &grid,
            Reduction::EvenInX,
        )
        .unwrap();
        let seed = GridField::sample(&grid, |_, _| 0.0);
        assert!(solve_eigenpair_near(&op, 1.0, &seed, 1e-9).is_err());
    }
}

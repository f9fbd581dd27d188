//! Pulled-back operators on the fixed domains `B_1 x T^m` and `(-1, 1) x T^m`,
//! in closed form and as second-order finite differences for `m = 1`.
//!
//! For a profile `H` (boundary at `|t| = 1 / H(x)` before scaling) and a
//! function `u(r, x)` radial in the first block,
//! `L^H u = c0 u + lambda Lap_x u + (H^2 + lambda r^2 |grad H|^2 / H^2) u_rr
//!        + H^2 (N - 1) u_r / r + lambda r (Lap H / H) u_r + (2 lambda r / H) grad H . grad_x u_r`,
//! with `c0 = j^2` (cylinder) or `n^2 pi^2` (slab, `N = 1`, `r` the signed coordinate).

mod banded;
mod eigen;

use std::f64::consts::PI;

use serde::Serialize;

pub use banded::{BandedLu, BandedMatrix};
pub use eigen::{solve_eigenpair_near, Eigenpair, DEFAULT_EIGEN_TOL};

use crate::error::{Error, Result};
use crate::profiles::{
    BranchJets, DomainProfile, ProfileJet, ProfileKind, SolutionField, Symmetry,
};

/// Derivatives of `u` at one point, as consumed by [`PullbackCoefficients::apply`].
#[derive(Debug, Clone, PartialEq)]
pub struct LocalDerivatives {
    pub u: f64,
    pub u_r: f64,
    pub u_rr: f64,
    pub u_r_over_r: f64,
    pub lap_x: f64,
    pub grad_x_u_r: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PullbackCoefficients {
    pub zero_order: f64,
    pub lambda: f64,
    /// Multiplies `u_rr`.
    pub rr: f64,
    /// `H^2 (N - 1)`, multiplies `u_r / r`.
    pub radial: f64,
    /// `lambda r Lap H / H`, multiplies `u_r`.
    pub first: f64,
    /// `2 lambda r partial_i H / H`, multiplies `partial_i u_r`.
    pub mixed: Vec<f64>,
}

impl PullbackCoefficients {
    pub fn new(dim: usize, lambda: f64, zero_order: f64, r: f64, jet: &ProfileJet) -> Self {
        let h = jet.h;
        let h2 = h * h;
        Self {
            zero_order,
            lambda,
            rr: h2 + lambda * r * r * jet.grad_norm_sq() / h2,
            radial: h2 * (dim as f64 - 1.0),
            first: lambda * r * jet.lap / h,
            mixed: jet.grad.iter().map(|g| 2.0 * lambda * r * g / h).collect(),
        }
    }

    pub fn apply(&self, d: &LocalDerivatives) -> f64 {
        let mut acc =
            self.zero_order * d.u + self.lambda * d.lap_x + self.rr * d.u_rr + self.first * d.u_r;
        if self.radial != 0.0 {
            acc += self.radial * d.u_r_over_r;
        }
        acc + self
            .mixed
            .iter()
            .zip(&d.grad_x_u_r)
            .map(|(c, g)| c * g)
            .sum::<f64>()
    }
}

/// `L^H U` for a closed-form branch field, using its own `H`, `lambda` and `c0`.
pub fn analytic_operator(field: &SolutionField, r: f64, x: &[f64]) -> f64 {
    analytic_operator_with_jets(field, r, &field.jets(r), x)
}

/// [`analytic_operator`] with the radial jets at `r` supplied by the caller.
pub fn analytic_operator_with_jets(
    field: &SolutionField,
    r: f64,
    jets: &BranchJets,
    x: &[f64],
) -> f64 {
    let (a, b) = (jets.base, jets.correction);
    let s = field.s;
    let w = field.angular_value(x);
    let k = field.angular as f64;
    let grad_w = field.angular_grad(x);
    let d = LocalDerivatives {
        u: a.v + s * b.v * w,
        u_r: a.d1 + s * b.d1 * w,
        u_rr: a.d2 + s * b.d2 * w,
        u_r_over_r: if field.dims.dim > 1 {
            a.d1_over_r + s * b.d1_over_r * w
        } else {
            0.0
        },
        lap_x: -s * k * k * b.v * w,
        grad_x_u_r: grad_w.iter().map(|g| s * b.d1 * g).collect(),
    };
    PullbackCoefficients::new(
        field.dims.dim,
        field.lambda,
        field.zero_order,
        r,
        &field.profile_jet(x),
    )
    .apply(&d)
}

/// `H sqrt(1 + kappa |grad H|^2 / H^4) partial_r U(1, x)`; `kappa = lambda` for the
/// bifurcation problems, `kappa = 1` for the non-constant Neumann variant.
pub fn analytic_neumann(field: &SolutionField, x: &[f64], kappa: f64) -> f64 {
    let jet = field.profile_jet(x);
    metric_factor(&jet, kappa) * field.d_r(1.0, x)
}

pub fn metric_factor(jet: &ProfileJet, kappa: f64) -> f64 {
    let h2 = jet.h * jet.h;
    jet.h * (1.0 + kappa * jet.grad_norm_sq() / (h2 * h2)).sqrt()
}

/// Radial-by-angular node set for `m = 1`.
///
/// Cylinder: `r_i = (i + 1/2) dr`, `dr = 1 / (n_r + 1/2)`, so the Dirichlet
/// boundary `r = 1` is the ghost node `i = n_r` and the even reflection
/// `r_{-1} = -r_0` closes the stencil at the axis.
/// Slab: `t_i = (i + 1) dt`, `dt = 1 / (n_r + 1)`, on `(0, 1)` with `u(0) = 0` (odd fields).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TensorGrid {
    pub kind: ProfileKind,
    pub radial_nodes: Vec<f64>,
    pub radial_spacing: f64,
    pub n_x: usize,
}

impl TensorGrid {
    fn check(n_r: usize, n_x: usize) -> Result<()> {
        if n_r < 4 || n_x < 8 || !n_x.is_multiple_of(2) {
            return Err(Error::InvalidInput(format!(
                "grid needs n_r >= 4 and an even n_x >= 8 (got {n_r} x {n_x})"
            )));
        }
        Ok(())
    }

    pub fn cylinder(n_r: usize, n_x: usize) -> Result<Self> {
        Self::check(n_r, n_x)?;
        let dr = 1.0 / (n_r as f64 + 0.5);
        Ok(Self {
            kind: ProfileKind::Dirichlet,
            radial_nodes: (0..n_r).map(|i| (i as f64 + 0.5) * dr).collect(),
            radial_spacing: dr,
            n_x,
        })
    }

    pub fn slab(n_r: usize, n_x: usize) -> Result<Self> {
        Self::check(n_r, n_x)?;
        let dt = 1.0 / (n_r as f64 + 1.0);
        Ok(Self {
            kind: ProfileKind::Slab,
            radial_nodes: (0..n_r).map(|i| (i as f64 + 1.0) * dt).collect(),
            radial_spacing: dt,
            n_x,
        })
    }

    pub fn for_kind(kind: ProfileKind, n_r: usize, n_x: usize) -> Result<Self> {
        match kind {
            ProfileKind::Dirichlet => Self::cylinder(n_r, n_x),
            ProfileKind::Slab => Self::slab(n_r, n_x),
        }
    }

    pub fn n_r(&self) -> usize {
        self.radial_nodes.len()
    }

    pub fn angular_spacing(&self) -> f64 {
        2.0 * PI / self.n_x as f64
    }

    pub fn angle(&self, j: usize) -> f64 {
        2.0 * PI * j as f64 / self.n_x as f64
    }

    pub fn descriptor(&self) -> String {
        format!("{}x{}", self.n_r(), self.n_x)
    }

    pub fn symmetry(&self) -> Symmetry {
        match self.kind {
            ProfileKind::Dirichlet => Symmetry::RadialEven,
            ProfileKind::Slab => Symmetry::OddInT,
        }
    }
}

/// Values on a [`TensorGrid`], row-major in `(radial i, angular j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    pub grid: TensorGrid,
    pub symmetry: Symmetry,
    pub values: Vec<f64>,
}

impl GridField {
    pub fn sample(grid: &TensorGrid, f: impl Fn(f64, f64) -> f64) -> Self {
        let values = grid
            .radial_nodes
            .iter()
            .flat_map(|&r| (0..grid.n_x).map(move |j| (r, j)))
            .map(|(r, j)| f(r, grid.angle(j)))
            .collect();
        Self {
            grid: grid.clone(),
            symmetry: grid.symmetry(),
            values,
        }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.grid.n_x + j]
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// CSV rows `r,x,value` (or `t,x,value` for the slab).
    pub fn to_csv(&self) -> String {
        let head = match self.symmetry {
            Symmetry::RadialEven => "r,x,value\n",
            Symmetry::OddInT => "t,x,value\n",
        };
        let mut out = String::from(head);
        for (i, r) in self.grid.radial_nodes.iter().enumerate() {
            for j in 0..self.grid.n_x {
                out.push_str(&format!(
                    "{},{},{}\n",
                    r,
                    self.grid.angle(j),
                    self.get(i, j)
                ));
            }
        }
        out
    }
}

/// How the angular direction is represented in the unknown vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Reduction {
    /// All `n_x` periodic nodes.
    Periodic,
    /// Fields even in `x`: nodes `0 ..= n_x / 2` with reflections at `0` and `pi`.
    EvenInX,
}

/// Finite-difference pulled-back operator. The rows hold the operator without
/// its zero-order term `c0 u`, which is added back by [`PullbackOperator::apply`].
#[derive(Debug, Clone)]
pub struct PullbackOperator {
    pub grid: TensorGrid,
    pub reduction: Reduction,
    pub dim: usize,
    pub lambda: f64,
    pub zero_order: f64,
    n_ang: usize,
    rows: Vec<Vec<(usize, f64)>>,
}

impl PullbackOperator {
    pub fn unknowns(&self) -> usize {
        self.rows.len()
    }

    pub fn angular_unknowns(&self) -> usize {
        self.n_ang
    }

    pub fn to_vector(&self, field: &GridField) -> Vec<f64> {
        let n_x = self.grid.n_x;
        (0..self.grid.n_r())
            .flat_map(|i| (0..self.n_ang).map(move |j| i * n_x + j))
            .map(|k| field.values[k])
            .collect()
    }

    pub fn from_vector(&self, v: &[f64]) -> GridField {
        let n_x = self.grid.n_x;
        let values = (0..self.grid.n_r())
            .flat_map(|i| (0..n_x).map(move |j| (i, j)))
            .map(|(i, j)| {
                let jj = match self.reduction {
                    Reduction::Periodic => j,
                    Reduction::EvenInX => j.min(n_x - j),
                };
                v[i * self.n_ang + jj]
            })
            .collect();
        GridField {
            grid: self.grid.clone(),
            symmetry: self.grid.symmetry(),
            values,
        }
    }

    /// Stripped operator applied to an unknown vector.
    pub fn apply_stripped(&self, v: &[f64]) -> Vec<f64> {
        self.rows
            .iter()
            .map(|row| row.iter().map(|&(c, a)| a * v[c]).sum())
            .collect()
    }

    /// Full operator `L^H u` at the grid nodes.
    pub fn apply(&self, field: &GridField) -> Result<GridField> {
        if field.grid != self.grid {
            return Err(Error::InvalidInput(
                "field and operator live on different grids".into(),
            ));
        }
        let v = self.to_vector(field);
        let out: Vec<f64> = self
            .apply_stripped(&v)
            .iter()
            .zip(&v)
            .map(|(a, u)| a + self.zero_order * u)
            .collect();
        Ok(self.from_vector(&out))
    }

    /// `K - sigma I` with `K = -(stripped operator)`, in band storage.
    pub fn shifted_banded(&self, sigma: f64) -> BandedMatrix {
        let mut kl = 0;
        let mut ku = 0;
        for (i, row) in self.rows.iter().enumerate() {
            for &(c, _) in row {
                if c < i {
                    kl = kl.max(i - c);
                } else {
                    ku = ku.max(c - i);
                }
            }
        }
        let mut m = BandedMatrix::zeros(self.unknowns(), kl, ku);
        for (i, row) in self.rows.iter().enumerate() {
            for &(c, a) in row {
                m.add(i, c, -a);
            }
            m.add(i, i, -sigma);
        }
        m
    }
}

fn assemble(
    profile: &DomainProfile,
    dim: usize,
    lambda: f64,
    zero_order: f64,
    grid: &TensorGrid,
    reduction: Reduction,
) -> Result<PullbackOperator> {
    if profile.m != 1 {
        return Err(Error::InvalidInput(format!(
            "the grid solver supports m = 1 only (got m = {})",
            profile.m
        )));
    }
    if profile.kind != grid.kind {
        return Err(Error::InvalidInput(
            "profile and grid describe different problems".into(),
        ));
    }
    if !(lambda > 0.0) {
        return Err(Error::InvalidInput(format!(
            "lambda must be positive (got {lambda})"
        )));
    }
    let n_r = grid.n_r();
    let n_x = grid.n_x;
    let n_ang = match reduction {
        Reduction::Periodic => n_x,
        Reduction::EvenInX => n_x / 2 + 1,
    };
    let dr = grid.radial_spacing;
    let dx = grid.angular_spacing();
    let cylinder = grid.kind == ProfileKind::Dirichlet;
    let radial = |i: isize| -> Option<usize> {
        if i < 0 {
            cylinder.then_some(0)
        } else if i as usize >= n_r {
            None
        } else {
            Some(i as usize)
        }
    };
    let angular = |j: isize| -> usize {
        let j = j.rem_euclid(n_x as isize) as usize;
        match reduction {
            Reduction::Periodic => j,
            Reduction::EvenInX => j.min(n_x - j),
        }
    };
    let mut rows = Vec::with_capacity(n_r * n_ang);
    for i in 0..n_r {
        let r = grid.radial_nodes[i];
        for j in 0..n_ang {
            let x = grid.angle(j);
            let c = PullbackCoefficients::new(dim, lambda, zero_order, r, &profile.jet(&[x]));
            let c_r = c.radial / r + c.first;
            let mixed = c.mixed[0] / (4.0 * dr * dx);
            let mut row: Vec<(usize, f64)> = Vec::with_capacity(9);
            let mut push = |di: isize, dj: isize, a: f64| {
                if a == 0.0 {
                    return;
                }
                if let Some(ii) = radial(i as isize + di) {
                    let col = ii * n_ang + angular(j as isize + dj);
                    match row.iter_mut().find(|(c, _)| *c == col) {
                        Some(e) => e.1 += a,
                        None => row.push((col, a)),
                    }
                }
            };
            push(0, 0, -2.0 * c.rr / (dr * dr) - 2.0 * lambda / (dx * dx));
            push(1, 0, c.rr / (dr * dr) + c_r / (2.0 * dr));
            push(-1, 0, c.rr / (dr * dr) - c_r / (2.0 * dr));
            push(0, 1, lambda / (dx * dx));
            push(0, -1, lambda / (dx * dx));
            push(1, 1, mixed);
            push(1, -1, -mixed);
            push(-1, 1, -mixed);
            push(-1, -1, mixed);
            row.sort_by_key(|e| e.0);
            rows.push(row);
        }
    }
    Ok(PullbackOperator {
        grid: grid.clone(),
        reduction,
        dim,
        lambda,
        zero_order,
        n_ang,
        rows,
    })
}

/// Cylinder operator for a reference-frame profile `H`; `c0 = j_{N/2-1,n}^2`.
pub fn assemble_cylinder_operator(
    profile: &DomainProfile,
    dim: usize,
    lambda: f64,
    n_mode: usize,
    grid: &TensorGrid,
    reduction: Reduction,
) -> Result<PullbackOperator> {
    let j = crate::constants::mode_zero(dim, n_mode)?.value;
    assemble(profile, dim, lambda, j * j, grid, reduction)
}

/// Slab operator for a reference-frame profile `H`; `c0 = n^2 pi^2`.
pub fn assemble_slab_operator(
    profile: &DomainProfile,
    lambda: f64,
    n_mode: usize,
    grid: &TensorGrid,
    reduction: Reduction,
) -> Result<PullbackOperator> {
    if n_mode == 0 {
        return Err(Error::InvalidInput("mode index n must be >= 1".into()));
    }
    let c0 = (n_mode as f64 * PI).powi(2);
    assemble(profile, 1, lambda, c0, grid, reduction)
}

/// `H sqrt(1 + lambda |H'|^2 / H^4) partial_r u(1, x_j)` for every angular node,
/// with a one-sided second-order difference using `u(1, x) = 0`.
/// For the slab this is the `t = +1` side; the `t = -1` side is its negative.
pub fn boundary_neumann(field: &GridField, profile: &DomainProfile, lambda: f64) -> Vec<f64> {
    let grid = &field.grid;
    let n = grid.n_r();
    let d = grid.radial_spacing;
    (0..grid.n_x)
        .map(|j| {
            let du = (-4.0 * field.get(n - 1, j) + field.get(n - 2, j)) / (2.0 * d);
            metric_factor(&profile.jet(&[grid.angle(j)]), lambda) * du
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::ProblemDims;
    use crate::profiles::{cylinder_first_order_field, slab_first_order_field};

    fn discrete_vs_analytic(field: &SolutionField, n_r: usize, n_x: usize) -> f64 {
        let grid = TensorGrid::for_kind(field.kind, n_r, n_x).unwrap();
        let profile = field.reference_profile().unwrap();
        let op = match field.kind {
            ProfileKind::Dirichlet => assemble_cylinder_operator(
                &profile,
                field.dims.dim,
                field.lambda,
                field.dims.n,
                &grid,
                Reduction::Periodic,
            ),
            ProfileKind::Slab => assemble_slab_operator(
                &profile,
                field.lambda,
                field.dims.n,
                &grid,
                Reduction::Periodic,
            ),
        }
        .unwrap();
        let u = GridField::sample(&grid, |r, x| field.value(r, &[x]));
        let lu = op.apply(&u).unwrap();
        let exact = GridField::sample(&grid, |r, x| analytic_operator(field, r, &[x]));
        lu.values
            .iter()
            .zip(&exact.values)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    #[test]
    fn analytic_operator_annihilates_trivial_solutions() {
        for dim in 1..=3 {
            let f = cylinder_first_order_field(ProblemDims::new(dim, 1, 1).unwrap(), 0.0).unwrap();
            for r in [0.0, 0.3, 0.99] {
                assert!(analytic_operator(&f, r, &[0.5]).abs() < 1e-12);
            }
        }
        let f = slab_first_order_field(2, 1, 0.0).unwrap();
        assert!(analytic_operator(&f, 0.4, &[1.0]).abs() < 1e-12);
    }

    #[test]
    fn discrete_operator_is_second_order_consistent() {
        let cases = [
            cylinder_first_order_field(ProblemDims::new(1, 1, 1).unwrap(), 0.05).unwrap(),
            cylinder_first_order_field(ProblemDims::new(3, 1, 1).unwrap(), 0.05).unwrap(),
            slab_first_order_field(1, 1, 0.05).unwrap(),
        ];
        for f in &cases {
            let e1 = discrete_vs_analytic(f, 32, 32);
            let e2 = discrete_vs_analytic(f, 64, 64);
            let ratio = e1 / e2;
            assert!(
                ratio > 3.0 && ratio < 5.0,
                "{:?} N={}: {e1} {e2}",
                f.kind,
                f.dims.dim
            );
        }
    }

    #[test]
    fn lambda_enters_linearly_through_the_angular_block() {
        let f = cylinder_first_order_field(ProblemDims::new(2, 1, 1).unwrap(), 0.0).unwrap();
        let grid = TensorGrid::cylinder(24, 16).unwrap();
        let flat = f.reference_profile().unwrap();
        let a = assemble_cylinder_operator(&flat, 2, 3.0, 1, &grid, Reduction::Periodic).unwrap();
        let b = assemble_cylinder_operator(&flat, 2, 4.0, 1, &grid, Reduction::Periodic).unwrap();
        let psi = crate::spectra::radial_eigenfunction(2, 1).unwrap();
        let u = GridField::sample(&grid, |r, x| psi.value(r) * x.cos());
        let (la, lb) = (a.apply(&u).unwrap(), b.apply(&u).unwrap());
        let dx = grid.angular_spacing();
        let lap_factor = -(2.0 - 2.0 * dx.cos()) / (dx * dx);
        for (k, (p, q)) in la.values.iter().zip(&lb.values).enumerate() {
            assert!((q - p - lap_factor * u.values[k]).abs() < 1e-10);
        }
    }

    #[test]
    fn even_and_odd_symmetries_are_preserved() {
        let f = cylinder_first_order_field(ProblemDims::new(1, 1, 1).unwrap(), 0.1).unwrap();
        let grid = TensorGrid::cylinder(16, 16).unwrap();
        let op = assemble_cylinder_operator(
            &f.reference_profile().unwrap(),
            1,
            f.lambda,
            1,
            &grid,
            Reduction::Periodic,
        )
        .unwrap();
        let u = GridField::sample(&grid, |r, x| {
            (r * 2.0).cos() * (1.0 + x.cos() + 0.3 * (2.0 * x).cos())
        });
        let lu = op.apply(&u).unwrap();
        for i in 0..16 {
            for j in 1..16 {
                assert!((lu.get(i, j) - lu.get(i, 16 - j)).abs() < 1e-9);
            }
        }
        let even = assemble_cylinder_operator(
            &f.reference_profile().unwrap(),
            1,
            f.lambda,
            1,
            &grid,
            Reduction::EvenInX,
        )
        .unwrap();
        let le = even.apply(&u).unwrap();
        for (a, b) in lu.values.iter().zip(&le.values) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn boundary_neumann_flat_cylinder() {
        let f = cylinder_first_order_field(ProblemDims::new(1, 1, 1).unwrap(), 0.0).unwrap();
        let exact = f.d_r(1.0, &[0.0]);
        let mut errs = Vec::new();
        for n in [64, 128] {
            let grid = TensorGrid::cylinder(n, 16).unwrap();
            let u = GridField::sample(&grid, |r, x| f.value(r, &[x]));
            let nm = boundary_neumann(&u, &f.reference_profile().unwrap(), f.lambda);
            assert!(nm.iter().all(|v| (v - nm[0]).abs() < 1e-14));
            errs.push((nm[0] - exact).abs());
        }
        assert!(errs[0] / errs[1] > 3.5 && errs[0] / errs[1] < 4.5);
    }
}

//! Domain profiles `h` (the boundary sits at `|t| = 1 / h(x)`) and the
//! closed-form first-order branch fields on the fixed reference domain.

use std::f64::consts::PI;

use serde::Serialize;

use crate::constants::{dirichlet_constants, mode_zero, slab_constants, ProblemDims};
use crate::error::{Error, Result};
use crate::spectra::{self, BesselProfile, RadialJet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ProfileKind {
    Dirichlet,
    Slab,
}

impl ProfileKind {
    pub fn name(self) -> &'static str {
        match self {
            ProfileKind::Dirichlet => "dirichlet",
            ProfileKind::Slab => "slab",
        }
    }
}

/// `cos(k x_1) + ... + cos(k x_m)`, summed with Neumaier compensation.
pub fn omega(k: usize, x: &[f64]) -> f64 {
    let kf = k as f64;
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for &xi in x {
        let term = (kf * xi).cos();
        let t = sum + term;
        comp += if sum.abs() >= term.abs() {
            (sum - t) + term
        } else {
            (term - t) + sum
        };
        sum = t;
    }
    sum + comp
}

/// `theta(x) = cos x_1 + ... + cos x_m`.
pub fn theta(x: &[f64]) -> f64 {
    omega(1, x)
}

/// Value, gradient and Laplacian of a profile at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileJet {
    pub h: f64,
    pub grad: Vec<f64>,
    pub lap: f64,
}

impl ProfileJet {
    pub fn grad_norm_sq(&self) -> f64 {
        self.grad.iter().map(|g| g * g).sum()
    }
}

/// `h(x) = const_term + s * amplitude * omega_k(x)` on `[0, 2 pi)^m`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DomainProfile {
    pub kind: ProfileKind,
    pub m: usize,
    pub const_term: f64,
    pub amplitude: f64,
    pub s: f64,
    /// Angular frequency `k`; 1 for the bifurcating profiles.
    pub frequency: usize,
    /// `h` at `x = (2 pi i / n, 0, ..., 0)`.
    pub samples: Vec<f64>,
}

pub const DEFAULT_PROFILE_SAMPLES: usize = 256;

impl DomainProfile {
    pub fn new(
        kind: ProfileKind,
        m: usize,
        const_term: f64,
        amplitude: f64,
        s: f64,
    ) -> Result<Self> {
        Self::with_frequency(kind, m, const_term, amplitude, s, 1)
    }

    pub fn with_frequency(
        kind: ProfileKind,
        m: usize,
        const_term: f64,
        amplitude: f64,
        s: f64,
        frequency: usize,
    ) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidInput("m must be >= 1".into()));
        }
        if !(const_term.is_finite() && amplitude.is_finite() && s.is_finite()) {
            return Err(Error::InvalidInput(
                "profile parameters must be finite".into(),
            ));
        }
        let min = const_term - (s * amplitude).abs() * m as f64;
        if !(min > 0.0) {
            return Err(Error::Domain(format!(
                "profile minimum {min} is not positive (s = {s})"
            )));
        }
        let mut p = Self {
            kind,
            m,
            const_term,
            amplitude,
            s,
            frequency,
            samples: Vec::new(),
        };
        let mut x = vec![0.0; m];
        p.samples = (0..DEFAULT_PROFILE_SAMPLES)
            .map(|i| {
                x[0] = 2.0 * PI * i as f64 / DEFAULT_PROFILE_SAMPLES as f64;
                p.eval(&x)
            })
            .collect();
        Ok(p)
    }

    pub fn min_value(&self) -> f64 {
        self.const_term - (self.s * self.amplitude).abs() * self.m as f64
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.const_term + self.s * self.amplitude * omega(self.frequency, x)
    }

    pub fn jet(&self, x: &[f64]) -> ProfileJet {
        let k = self.frequency as f64;
        let c = self.s * self.amplitude;
        ProfileJet {
            h: self.eval(x),
            grad: x.iter().map(|&xi| -c * k * (k * xi).sin()).collect(),
            lap: -c * k * k * omega(self.frequency, x),
        }
    }

    /// The same profile multiplied by `factor`; `factor = 1 / sqrt(lambda)` maps
    /// the reference frame to the physical one.
    pub fn rescaled(&self, factor: f64) -> Result<Self> {
        Self::with_frequency(
            self.kind,
            self.m,
            self.const_term * factor,
            self.amplitude * factor,
            self.s,
            self.frequency,
        )
    }

    /// Points `(x, h(x))` over one period along `x_1`.
    pub fn polyline(&self, points: usize) -> Vec<(f64, f64)> {
        let mut x = vec![0.0; self.m];
        (0..points)
            .map(|i| {
                x[0] = 2.0 * PI * i as f64 / (points - 1) as f64;
                (x[0], self.eval(&x))
            })
            .collect()
    }
}

/// Physical profile of the cylinder branch to first order, with `mu` frozen at `mu_n`.
pub fn cylinder_profile(dims: ProblemDims, s: f64) -> Result<DomainProfile> {
    let c = dirichlet_constants(dims)?;
    DomainProfile::new(
        ProfileKind::Dirichlet,
        dims.m,
        c.kappa_n * c.mu_n.sqrt(),
        c.beta_n,
        s,
    )
}

/// Physical profile of the slab branch to first order.
pub fn slab_profile(n: usize, m: usize, s: f64) -> Result<DomainProfile> {
    let c = slab_constants(n)?;
    DomainProfile::new(ProfileKind::Slab, m, c.a_n * c.d_n.sqrt(), c.b_n, s)
}

/// Unit outer normal of `|t| = 1 / h(x)` at `(side e_1 / h(x), x)`, `side = +1` or `-1`.
/// Returned as `(t_1, x_1, ..., x_m)`.
pub fn normal_vector(profile: &DomainProfile, x: &[f64], side: f64) -> Vec<f64> {
    let jet = profile.jet(x);
    let h2 = jet.h * jet.h;
    let mut v = Vec::with_capacity(1 + x.len());
    v.push(side.signum());
    v.extend(jet.grad.iter().map(|g| g / h2));
    let norm = v.iter().map(|c| c * c).sum::<f64>().sqrt();
    v.iter().map(|c| c / norm).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Symmetry {
    RadialEven,
    OddInT,
}

/// A radial factor with closed-form derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum RadialShape {
    Bessel(BesselProfile),
    Sine { amplitude: f64, frequency: f64 },
}

impl RadialShape {
    pub fn jet(&self, r: f64) -> RadialJet {
        match *self {
            RadialShape::Bessel(p) => p.jet(r),
            RadialShape::Sine {
                amplitude: a,
                frequency: w,
            } => {
                let (s, c) = (w * r).sin_cos();
                RadialJet {
                    v: a * s,
                    d1: a * w * c,
                    d2: -a * w * w * s,
                    d3: -a * w * w * w * c,
                    // odd profiles have no finite d1 / r at the origin; only used when N > 1
                    d1_over_r: if r != 0.0 { a * w * c / r } else { f64::NAN },
                }
            }
        }
    }

    pub fn value(&self, r: f64) -> f64 {
        self.jet(r).v
    }
}

/// First-order branch field `U = A(r) + s B(r) omega_k(x)` on the reference
/// domain, with `B = R - c r A'` and `c = R(1) / A'(1)`, paired with the
/// reference-frame profile `H = 1 + s c omega_k(x)`.
///
/// `A` is the trivial solution (`I_{N/2-1}(j r)` or `(-1)^n sin(n pi t) / (n pi)`)
/// and `R` the radial factor of the probe `s R(r) omega_k(x)`; the `-c r A'`
/// term is the first-order pullback of `A` to the perturbed domain.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolutionField {
    pub kind: ProfileKind,
    pub dims: ProblemDims,
    pub s: f64,
    /// Frozen parameter `lambda` (`lambda_n` or `gamma_n`).
    pub lambda: f64,
    /// Zero-order coefficient `j^2` or `n^2 pi^2`.
    pub zero_order: f64,
    pub angular: usize,
    pub base: RadialShape,
    pub probe: RadialShape,
    /// `c = R(1) / A'(1)`, so that `h_u = s c omega_k`.
    pub trace_ratio: f64,
}

/// `(A, B)` jets of a branch field at one radius.
#[derive(Debug, Clone, Copy)]
pub struct BranchJets {
    pub base: RadialJet,
    pub correction: RadialJet,
}

impl SolutionField {
    pub fn new(
        kind: ProfileKind,
        dims: ProblemDims,
        s: f64,
        lambda: f64,
        zero_order: f64,
        angular: usize,
        base: RadialShape,
        probe: RadialShape,
    ) -> Self {
        let trace_ratio = probe.value(1.0) / base.jet(1.0).d1;
        Self {
            kind,
            dims,
            s,
            lambda,
            zero_order,
            angular,
            base,
            probe,
            trace_ratio,
        }
    }

    pub fn symmetry(&self) -> Symmetry {
        match self.kind {
            ProfileKind::Dirichlet => Symmetry::RadialEven,
            ProfileKind::Slab => Symmetry::OddInT,
        }
    }

    /// Same trivial solution and parameters, different probe `R(r) omega_k(x)`.
    pub fn with_probe(&self, probe: RadialShape, angular: usize) -> Self {
        Self::new(
            self.kind,
            self.dims,
            self.s,
            self.lambda,
            self.zero_order,
            angular,
            self.base,
            probe,
        )
    }

    pub fn with_s(&self, s: f64) -> Self {
        Self { s, ..self.clone() }
    }

    pub fn with_lambda(&self, lambda: f64) -> Self {
        Self {
            lambda,
            ..self.clone()
        }
    }

    pub fn jets(&self, r: f64) -> BranchJets {
        let a = self.base.jet(r);
        let p = self.probe.jet(r);
        let c = self.trace_ratio;
        BranchJets {
            base: a,
            correction: RadialJet {
                v: p.v - c * r * a.d1,
                d1: p.d1 - c * (a.d1 + r * a.d2),
                d2: p.d2 - c * (2.0 * a.d2 + r * a.d3),
                d3: f64::NAN,
                d1_over_r: p.d1_over_r - c * (a.d1_over_r + a.d2),
            },
        }
    }

    pub fn angular_value(&self, x: &[f64]) -> f64 {
        omega(self.angular, x)
    }

    /// `partial_i omega_k(x)`.
    pub fn angular_grad(&self, x: &[f64]) -> Vec<f64> {
        let k = self.angular as f64;
        x.iter().map(|&xi| -k * (k * xi).sin()).collect()
    }

    pub fn value(&self, r: f64, x: &[f64]) -> f64 {
        let j = self.jets(r);
        j.base.v + self.s * j.correction.v * self.angular_value(x)
    }

    pub fn d_r(&self, r: f64, x: &[f64]) -> f64 {
        let j = self.jets(r);
        j.base.d1 + self.s * j.correction.d1 * self.angular_value(x)
    }

    pub fn d_rr(&self, r: f64, x: &[f64]) -> f64 {
        let j = self.jets(r);
        j.base.d2 + self.s * j.correction.d2 * self.angular_value(x)
    }

    pub fn d_x(&self, r: f64, x: &[f64], i: usize) -> f64 {
        self.s * self.jets(r).correction.v * self.angular_grad(x)[i]
    }

    pub fn d_xx(&self, r: f64, x: &[f64], i: usize) -> f64 {
        let k = self.angular as f64;
        -self.s * self.jets(r).correction.v * k * k * (k * x[i]).cos()
    }

    pub fn d_xr(&self, r: f64, x: &[f64], i: usize) -> f64 {
        self.s * self.jets(r).correction.d1 * self.angular_grad(x)[i]
    }

    /// Value at a point `t` of the radial block (`|t|` for the cylinder, `t_1` for the slab).
    pub fn value_at(&self, t: &[f64], x: &[f64]) -> f64 {
        match self.symmetry() {
            Symmetry::RadialEven => self.value(t.iter().map(|v| v * v).sum::<f64>().sqrt(), x),
            Symmetry::OddInT => self.value(t[0], x),
        }
    }

    /// Jet of the reference-frame profile `H = 1 + s c omega_k(x)`.
    pub fn profile_jet(&self, x: &[f64]) -> ProfileJet {
        let c = self.s * self.trace_ratio;
        let k = self.angular as f64;
        ProfileJet {
            h: 1.0 + c * self.angular_value(x),
            grad: self.angular_grad(x).iter().map(|g| c * g).collect(),
            lap: -c * k * k * self.angular_value(x),
        }
    }

    /// Reference-frame profile `H = 1 + h_u`.
    pub fn reference_profile(&self) -> Result<DomainProfile> {
        DomainProfile::with_frequency(
            self.kind,
            self.dims.m,
            1.0,
            self.trace_ratio,
            self.s,
            self.angular,
        )
    }

    /// Physical profile `H / sqrt(lambda)`.
    pub fn physical_profile(&self) -> Result<DomainProfile> {
        self.reference_profile()?
            .rescaled(self.lambda.sqrt().recip())
    }
}

/// `U_n(r) + s [psi_1(r) + delta_n r U_n'(r)] theta(x)` with `lambda = lambda_n`.
pub fn cylinder_first_order_field(dims: ProblemDims, s: f64) -> Result<SolutionField> {
    let c = dirichlet_constants(dims)?;
    let beta = dims.beta();
    let j = mode_zero(dims.dim, dims.n)?.value;
    let psi = spectra::radial_eigenfunction(dims.dim, 1)?;
    Ok(SolutionField::new(
        ProfileKind::Dirichlet,
        dims,
        s,
        c.lambda_n,
        j * j,
        1,
        RadialShape::Bessel(BesselProfile::new(beta, j)),
        RadialShape::Bessel(psi),
    ))
}

/// `v_n(t) + s [sin(pi t / 2) - (-1)^n t cos(n pi t)] theta(x)` with `lambda = gamma_n`.
pub fn slab_first_order_field(n: usize, m: usize, s: f64) -> Result<SolutionField> {
    let c = slab_constants(n)?;
    let dims = ProblemDims::new(1, m, n)?;
    let nf = n as f64;
    let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    Ok(SolutionField::new(
        ProfileKind::Slab,
        dims,
        s,
        c.gamma_n,
        nf * nf * PI * PI,
        1,
        RadialShape::Sine {
            amplitude: sign / (nf * PI),
            frequency: nf * PI,
        },
        RadialShape::Sine {
            amplitude: 1.0,
            frequency: PI / 2.0,
        },
    ))
}

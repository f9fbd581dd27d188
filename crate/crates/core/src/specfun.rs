//! Bessel functions of the first kind for real order, the rescaled function
//! `I_nu(r) = r^-nu J_nu(r)`, and positive zeros of `J_nu`.
//!
//! Evaluation switches between three regimes:
//! - ascending power series for small arguments,
//! - Miller's downward recurrence normalised by the Neumann sum
//!   `(x/2)^nu = sum_k (nu + 2k) Gamma(nu + k) / k! J_{nu+2k}(x)` for moderate arguments,
//! - the Hankel asymptotic expansion for large arguments.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::roots;

const SERIES_MAX_X: f64 = 4.0;
const HANKEL_MIN_X: f64 = 25.0;

/// Order `nu > -1` of a Bessel function.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
pub struct BesselOrder(f64);

impl BesselOrder {
    pub fn new(nu: f64) -> Result<Self> {
        if nu.is_finite() && nu > -1.0 {
            Ok(Self(nu))
        } else {
            Err(Error::Domain(format!(
                "Bessel order must satisfy nu > -1, got {nu}"
            )))
        }
    }

    /// The order `N/2 - 1` attached to a radial block of dimension `N`.
    pub fn radial(dim: usize) -> Result<Self> {
        Self::new(dim as f64 / 2.0 - 1.0)
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// `nu + k`; always valid since `k >= 0`.
    pub fn raised(self, k: u32) -> Self {
        Self(self.0 + k as f64)
    }
}

/// The `index`-th positive zero `j_{nu,index}` of `J_nu` (1-based).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BesselZero {
    pub order: BesselOrder,
    pub index: usize,
    pub value: f64,
    /// `|J_nu(value)|`
    pub residual: f64,
}

/// `J_nu(x)` for `x >= 0`.
pub fn bessel_j(nu: BesselOrder, x: f64) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(Error::Domain(format!("bessel_j needs x >= 0, got {x}")));
    }
    Ok(jv(nu.0, x))
}

/// `dJ_nu/dx`, via `J'_nu = (nu/x) J_nu - J_{nu+1}`.
pub fn bessel_j_deriv(nu: BesselOrder, x: f64) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(Error::Domain(format!(
            "bessel_j_deriv needs x >= 0, got {x}"
        )));
    }
    if x == 0.0 {
        return match nu.0 {
            1.0 => Ok(0.5),
            v if v > 1.0 => Ok(0.0),
            v => Err(Error::Domain(format!(
                "J'_nu(0) is not available for nu = {v} < 1"
            ))),
        };
    }
    Ok(jv_deriv(nu.0, x))
}

/// `I_nu(r) = r^-nu J_nu(r)` for `r > 0`.
pub fn i_nu(nu: BesselOrder, r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::Domain(format!("i_nu needs r > 0, got {r}")));
    }
    Ok(inu(nu.0, r))
}

/// `I_nu` extended continuously to `r = 0`, where it equals `1 / (2^nu Gamma(nu + 1))`.
pub fn i_nu_total(nu: BesselOrder, r: f64) -> Result<f64> {
    if !(r >= 0.0) {
        return Err(Error::Domain(format!("i_nu_total needs r >= 0, got {r}")));
    }
    Ok(inu(nu.0, r))
}

/// `I'_nu(r) = -r^-nu J_{nu+1}(r) = -r I_{nu+1}(r)` for `r > 0`.
pub fn i_nu_deriv(nu: BesselOrder, r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::Domain(format!("i_nu_deriv needs r > 0, got {r}")));
    }
    Ok(-r * inu(nu.0 + 1.0, r))
}

/// The `index`-th positive zero of `J_nu`.
pub fn bessel_zero(nu: BesselOrder, index: usize) -> Result<BesselZero> {
    if index == 0 {
        return Err(Error::InvalidInput(
            "Bessel zeros are indexed from 1".into(),
        ));
    }
    bessel_zeros(nu, index).map(|mut z| z.pop().expect("index >= 1"))
}

/// The first `count` positive zeros of `J_nu`, in increasing order.
///
/// Zeros are bracketed by a sign scan from the origin, so no index can be
/// skipped; each bracket is then polished by Newton steps started from the
/// McMahon estimate.
pub fn bessel_zeros(nu: BesselOrder, count: usize) -> Result<Vec<BesselZero>> {
    let v = nu.0;
    if count == 0 {
        return Ok(Vec::new());
    }
    // J_nu has no zero in (0, nu] for nu >= 0; zeros are at least ~2.4 apart.
    let start = v.max(1e-6);
    let end = mcmahon(v, count) + 4.0 * PI;
    let step = 0.1;
    let brackets = roots::scan_sign_changes(|x| jv(v, x), start, end, step, count);
    if brackets.len() < count {
        return Err(Error::Bracket {
            what: format!("zero {} of J_{v}", brackets.len() + 1),
            lo: brackets.last().map_or(start, |b| b.1),
            hi: end,
        });
    }
    brackets
        .into_iter()
        .enumerate()
        .map(|(i, (lo, hi))| {
            let guess = mcmahon(v, i + 1);
            let value = roots::newton_bisect(
                &format!("zero {} of J_{v}", i + 1),
                |x| (jv(v, x), jv_deriv(v, x)),
                lo,
                hi,
                guess,
                1e-15,
            )?;
            Ok(BesselZero {
                order: nu,
                index: i + 1,
                value,
                residual: jv(v, value).abs(),
            })
        })
        .collect()
}

/// McMahon's large-zero expansion of `j_{nu,n}`.
pub fn mcmahon(nu: f64, n: usize) -> f64 {
    let mu = 4.0 * nu * nu;
    let b = (n as f64 + 0.5 * nu - 0.25) * PI;
    let e = 8.0 * b;
    b - (mu - 1.0) / e - 4.0 * (mu - 1.0) * (7.0 * mu - 31.0) / (3.0 * e * e * e)
}

pub(crate) fn jv(nu: f64, x: f64) -> f64 {
    if x == 0.0 {
        return if nu == 0.0 {
            1.0
        } else if nu > 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
    }
    if x <= SERIES_MAX_X || x * x <= 4.0 * (nu + 1.0) {
        (0.5 * x).powf(nu) * series_scaled(nu, x)
    } else if x >= HANKEL_MIN_X + 0.5 * nu * nu {
        hankel(nu, x)
    } else {
        miller(nu, x)
    }
}

pub(crate) fn jv_deriv(nu: f64, x: f64) -> f64 {
    nu / x * jv(nu, x) - jv(nu + 1.0, x)
}

/// Total `I_nu(r)`, `r >= 0`.
pub(crate) fn inu(nu: f64, r: f64) -> f64 {
    if r <= SERIES_MAX_X || r * r <= 4.0 * (nu + 1.0) {
        0.5f64.powf(nu) * series_scaled(nu, r)
    } else {
        jv(nu, r) / r.powf(nu)
    }
}

/// `sum_k (-x^2/4)^k / (k! Gamma(nu + k + 1))`, i.e. `J_nu(x) / (x/2)^nu`.
fn series_scaled(nu: f64, x: f64) -> f64 {
    let q = -0.25 * x * x;
    let mut term = 1.0 / libm::tgamma(nu + 1.0);
    let mut sum = term;
    for k in 1..400 {
        let kf = k as f64;
        term *= q / (kf * (nu + kf));
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

fn miller(nu: f64, x: f64) -> f64 {
    let kmax = {
        let k = (x + 30.0 + (40.0 * x).sqrt()).ceil() as usize;
        k + k % 2
    };
    let jmax = kmax / 2;
    let g1 = libm::tgamma(nu + 1.0);
    let mut weights = Vec::with_capacity(jmax + 1);
    weights.push(g1);
    let mut c = g1;
    for j in 1..=jmax {
        if j > 1 {
            c *= (nu + (j - 1) as f64) / j as f64;
        }
        weights.push((nu + 2.0 * j as f64) * c);
    }

    let mut above = 0.0;
    let mut f = 1e-30;
    let mut sum = 0.0;
    let mut k = kmax;
    loop {
        if k % 2 == 0 {
            sum += weights[k / 2] * f;
        }
        if k == 0 {
            break;
        }
        let below = 2.0 * (nu + k as f64) / x * f - above;
        above = f;
        f = below;
        if f.abs() > 1e250 {
            f *= 1e-250;
            above *= 1e-250;
            sum *= 1e-250;
        }
        k -= 1;
    }
    f * (0.5 * x).powf(nu) / sum
}

fn hankel(nu: f64, x: f64) -> f64 {
    let mu = 4.0 * nu * nu;
    let (mut p, mut q) = (1.0, 0.0);
    let mut t: f64 = 1.0;
    for k in 1..80usize {
        let odd = (2 * k - 1) as f64;
        let next = t * (mu - odd * odd) / (k as f64 * 8.0 * x);
        if next.abs() > t.abs() {
            break;
        }
        t = next;
        match k % 4 {
            1 => q += t,
            2 => p -= t,
            3 => q -= t,
            _ => p += t,
        }
        if t.abs() < 1e-17 {
            break;
        }
    }
    let phase = (0.5 * nu + 0.25) * PI;
    let (sx, cx) = x.sin_cos();
    let (sp, cp) = phase.sin_cos();
    let cos_chi = cx * cp + sx * sp;
    let sin_chi = sx * cp - cx * sp;
    (2.0 / (PI * x)).sqrt() * (p * cos_chi - q * sin_chi)
}

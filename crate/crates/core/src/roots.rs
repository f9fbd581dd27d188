//! Bracketed scalar root finding.

use crate::error::{Error, Result};

const MAX_ITER: usize = 200;

/// Brent's method on a bracket `[a, b]` with `f(a)` and `f(b)` of opposite sign.
pub fn brent<F: FnMut(f64) -> f64>(what: &str, mut f: F, a: f64, b: f64, xtol: f64) -> Result<f64> {
    let (mut a, mut b) = (a, b);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() || !fa.is_finite() || !fb.is_finite() {
        return Err(Error::Bracket {
            what: what.to_string(),
            lo: a,
            hi: b,
        });
    }
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..MAX_ITER {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * xtol;
        let m = 0.5 * (c - b);
        if m.abs() <= tol || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = f(b);
    }
    Err(Error::NoConvergence {
        what: what.to_string(),
        iterations: MAX_ITER,
        lo: b.min(c),
        hi: b.max(c),
    })
}

/// Newton iteration kept inside a sign-change bracket; falls back to bisection
/// whenever a Newton step leaves the bracket or stalls.
pub fn newton_bisect<F>(what: &str, mut fdf: F, lo: f64, hi: f64, x0: f64, xtol: f64) -> Result<f64>
where
    F: FnMut(f64) -> (f64, f64),
{
    let (mut lo, mut hi) = (lo, hi);
    let (flo, _) = fdf(lo);
    let (fhi, _) = fdf(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::Bracket {
            what: what.to_string(),
            lo,
            hi,
        });
    }
    // orient so that f(lo) < 0
    let flip = flo > 0.0;
    let mut x = if x0 > lo && x0 < hi {
        x0
    } else {
        0.5 * (lo + hi)
    };
    let mut dx_old = hi - lo;
    let mut dx = dx_old;
    let (mut fx, mut dfx) = fdf(x);
    for _ in 0..MAX_ITER {
        let g = if flip { -fx } else { fx };
        if g < 0.0 {
            lo = x;
        } else if g > 0.0 {
            hi = x;
        } else {
            return Ok(x);
        }
        let newton_ok = dfx != 0.0 && {
            let xn = x - fx / dfx;
            xn > lo && xn < hi && (2.0 * fx).abs() <= (dx_old * dfx).abs()
        };
        dx_old = dx;
        if newton_ok {
            dx = fx / dfx;
            x -= dx;
        } else {
            dx = 0.5 * (hi - lo);
            x = lo + dx;
        }
        if dx.abs() <= xtol + 4.0 * f64::EPSILON * x.abs() {
            return Ok(x);
        }
        (fx, dfx) = fdf(x);
    }
    Err(Error::NoConvergence {
        what: what.to_string(),
        iterations: MAX_ITER,
        lo,
        hi,
    })
}

/// Scans `[start, end]` with a fixed step and returns every interval on which
/// `f` changes sign, in increasing order, stopping after `limit` intervals.
pub fn scan_sign_changes<F: FnMut(f64) -> f64>(
    mut f: F,
    start: f64,
    end: f64,
    step: f64,
    limit: usize,
) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    let mut x0 = start;
    let mut f0 = f(x0);
    let mut i = 1usize;
    while out.len() < limit {
        let x1 = (start + i as f64 * step).min(end);
        let f1 = f(x1);
        if f0 == 0.0 || f0.signum() != f1.signum() {
            out.push((x0, x1));
        }
        if x1 >= end {
            break;
        }
        x0 = x1;
        f0 = f1;
        i += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn brent_finds_sqrt2() {
        let r = brent("sqrt2", |x| x * x - 2.0, 0.0, 2.0, 1e-15).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn brent_rejects_missing_sign_change() {
        let err = brent("pos", |x| x * x + 1.0, -1.0, 1.0, 1e-12).unwrap_err();
        assert!(matches!(err, Error::Bracket { .. }));
    }

    #[test]
    fn newton_bisect_cos() {
        let r = newton_bisect("cos", |x| (x.cos(), -x.sin()), 1.0, 2.0, 1.2, 1e-15).unwrap();
        assert!((r - std::f64::consts::FRAC_PI_2).abs() < 4e-15);
        // a starting point outside the bracket falls back to bisection
        let r = newton_bisect("cos", |x| (x.cos(), -x.sin()), 1.0, 2.0, 7.0, 1e-15).unwrap();
        assert!((r - std::f64::consts::FRAC_PI_2).abs() < 4e-15);
    }

    #[test]
    fn scan_reports_each_sign_change_once() {
        let hits = scan_sign_changes(f64::sin, 0.5, 20.0, 0.1, 100);
        assert_eq!(hits.len(), 6);
        for (k, (a, b)) in hits.iter().enumerate() {
            let z = (k + 1) as f64 * std::f64::consts::PI;
            assert!(*a < z && z <= *b);
        }
    }
}

//! Bracketed inversion of nondecreasing functions.

use crate::error::{Error, Result};

/// Iteration cap shared by every inversion.
pub const MAX_ITER: usize = 200;

/// Absolute tolerance on `|F(z) - p|`.
pub const F_TOL: f64 = 1e-10;

/// Solves `cdf(z) = p` for a nondecreasing `cdf` on `[lo, hi]`.
///
/// Illinois-modified regula falsi with a bisection fallback whenever the
/// interpolated point fails to halve the bracket. Convergence is declared on
/// `|cdf(z) - p| < F_TOL`. When `cdf` is flat at level `p`, the left end of
/// the flat stretch (the generalized inverse `inf {z : F(z) >= p}`) is
/// returned.
///
/// The bracket must satisfy `cdf(lo) <= p <= cdf(hi)` up to `F_TOL`.
pub fn invert_monotone<F>(cdf: F, p: f64, lo: f64, hi: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let fail = |lo: f64, hi: f64, iterations: usize| Error::NoConvergence {
        p,
        lo,
        hi,
        iterations,
    };
    if !(lo.is_finite() && hi.is_finite()) || lo > hi {
        return Err(fail(lo, hi, 0));
    }
    let mut a = lo;
    let mut b = hi;
    let mut fa = cdf(a) - p;
    let mut fb = cdf(b) - p;
    if fa > F_TOL || fb < -F_TOL {
        return Err(fail(lo, hi, 0));
    }
    if fa.abs() < F_TOL {
        return Ok(a);
    }
    if fb.abs() < F_TOL {
        if is_flat_left(&cdf, p, a, b, fb) {
            return settle_left(&cdf, p, a, b, 0).ok_or_else(|| fail(lo, hi, MAX_ITER));
        }
        return Ok(b);
    }

    let mut side = 0i8;
    let mut iter = 0;
    while iter < MAX_ITER {
        iter += 1;
        let width = b - a;
        let mut z = if fb != fa {
            b - fb * (b - a) / (fb - fa)
        } else {
            f64::NAN
        };
        if !(z > a && z < b) {
            z = split(a, b);
        }
        let fz = cdf(z) - p;
        if fz.abs() < F_TOL {
            if is_flat_left(&cdf, p, a, z, fz) {
                return settle_left(&cdf, p, a, z, iter).ok_or_else(|| fail(a, z, MAX_ITER));
            }
            return Ok(z);
        }
        if fz < 0.0 {
            a = z;
            fa = fz;
            if side == -1 {
                fb *= 0.5;
            }
            side = -1;
        } else {
            b = z;
            fb = fz;
            if side == 1 {
                fa *= 0.5;
            }
            side = 1;
        }
        // Guard against slow one-sided convergence.
        if b - a > 0.5 * width {
            let m = split(a, b);
            let fm = cdf(m) - p;
            if fm.abs() < F_TOL {
                if is_flat_left(&cdf, p, a, m, fm) {
                    return settle_left(&cdf, p, a, m, iter).ok_or_else(|| fail(a, m, MAX_ITER));
                }
                return Ok(m);
            }
            if fm < 0.0 {
                a = m;
                fa = fm;
            } else {
                b = m;
                fb = fm;
            }
            side = 0;
        }
        if b - a <= f64::EPSILON * a.abs().max(b.abs()).max(1.0) {
            return Ok(b);
        }
    }
    Err(fail(a, b, iter))
}

/// Midpoint of `[a, b]`, taken in `asinh` space when the bracket spans
/// several orders of magnitude.
fn split(a: f64, b: f64) -> f64 {
    let mid = a + 0.5 * (b - a);
    if b - a <= 1e3 * a.abs().min(b.abs()).max(1.0) {
        return mid;
    }
    let z = (0.5 * (a.asinh() + b.asinh())).sinh();
    if z > a && z < b {
        z
    } else {
        mid
    }
}

fn is_flat_left<F: Fn(f64) -> f64>(cdf: &F, p: f64, a: f64, z: f64, fz: f64) -> bool {
    let h = 1e-9 * z.abs().max(1.0);
    let probe = (z - h).max(a);
    probe < z && ((cdf(probe) - p) - fz).abs() == 0.0
}

/// Bisects for the left end of `{z in [a, z_hi] : F(z) >= p - F_TOL}`.
fn settle_left<F: Fn(f64) -> f64>(
    cdf: &F,
    p: f64,
    mut a: f64,
    mut b: f64,
    used: usize,
) -> Option<f64> {
    for _ in used..MAX_ITER {
        if b - a <= f64::EPSILON * a.abs().max(b.abs()).max(1.0) {
            return Some(b);
        }
        let m = split(a, b);
        if m <= a || m >= b {
            return Some(b);
        }
        if cdf(m) - p >= -F_TOL {
            b = m;
        } else {
            a = m;
        }
    }
    None
}

//! Domain-extended GEV distribution.
//!
//! The distribution function is `exp(-t(z))` with
//! `t(z) = (1 + ξ(z - μ)/σ)^(-1/ξ)` on the support and is extended by 0 below
//! and 1 above it. Everything is evaluated through `t` in log space so that
//! the same code path serves the CDF, the density and interval masses.

use rand::Rng;
use rand_distr::{Distribution, Open01};

use crate::error::{Error, Result};

/// Below this `|ξ|` the Gumbel limit is evaluated instead of the power form.
pub const GUMBEL_SWITCH: f64 = 1e-8;

/// Smallest admissible shape (exclusive).
pub const SHAPE_LOWER: f64 = -0.5;

/// Location, scale and shape of one GEV component.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GevParams {
    mu: f64,
    sigma: f64,
    xi: f64,
}

impl GevParams {
    /// Builds a parameter triple with `σ > 0` and `ξ > -1/2`.
    pub fn new(mu: f64, sigma: f64, xi: f64) -> Result<Self> {
        if !mu.is_finite() {
            return Err(Error::InvalidParams(format!(
                "location must be finite, got {mu}"
            )));
        }
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(Error::InvalidParams(format!(
                "scale must be finite and positive, got {sigma}"
            )));
        }
        if !(xi.is_finite() && xi > SHAPE_LOWER) {
            return Err(Error::InvalidParams(format!(
                "shape must exceed -1/2, got {xi}"
            )));
        }
        Ok(Self { mu, sigma, xi })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }

    fn is_gumbel(&self) -> bool {
        self.xi.abs() < GUMBEL_SWITCH
    }

    #[inline]
    fn log_t(&self, z: f64) -> f64 {
        Kernel::new(self).log_t(z)
    }
}

/// Per-component constants hoisted out of likelihood loops.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Kernel {
    mu: f64,
    sigma: f64,
    ln_sigma: f64,
    xi: f64,
    gumbel: bool,
}

impl Kernel {
    #[inline]
    pub(crate) fn new(params: &GevParams) -> Self {
        Self {
            mu: params.mu,
            sigma: params.sigma,
            ln_sigma: params.sigma.ln(),
            xi: params.xi,
            gumbel: params.is_gumbel(),
        }
    }

    /// `log t(z)`, with `+inf` below the support and `-inf` above it.
    #[inline]
    pub(crate) fn log_t(&self, z: f64) -> f64 {
        let w = (z - self.mu) / self.sigma;
        if self.gumbel {
            return -w;
        }
        let s = self.xi * w;
        if s <= -1.0 {
            return if self.xi > 0.0 {
                f64::INFINITY
            } else {
                f64::NEG_INFINITY
            };
        }
        -s.ln_1p() / self.xi
    }

    #[inline]
    pub(crate) fn logpdf(&self, z: f64) -> f64 {
        let log_t = self.log_t(z);
        if !log_t.is_finite() {
            return f64::NEG_INFINITY;
        }
        // log g = -log σ + (1 + ξ) log t - t
        -self.ln_sigma + (1.0 + self.xi) * log_t - log_t.exp()
    }

    #[inline]
    pub(crate) fn interval_logprob(&self, zl: f64, zr: f64) -> f64 {
        let t_left = self.log_t_ext(zl).exp();
        let t_right = self.log_t_ext(zr).exp();
        if t_left <= t_right || t_right == f64::INFINITY {
            return f64::NEG_INFINITY;
        }
        // exp(-t_r) - exp(-t_l) = exp(-t_r) * (1 - exp(t_r - t_l))
        -t_right + (-(t_right - t_left).exp_m1()).ln()
    }

    #[inline]
    fn log_t_ext(&self, z: f64) -> f64 {
        if z == f64::NEG_INFINITY {
            f64::INFINITY
        } else if z == f64::INFINITY {
            f64::NEG_INFINITY
        } else {
            self.log_t(z)
        }
    }
}

/// Lower and upper end of the support; either may be infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupportBounds {
    pub lower: f64,
    pub upper: f64,
}

impl SupportBounds {
    /// True when `z` lies strictly inside the support.
    pub fn contains(&self, z: f64) -> bool {
        z > self.lower && z < self.upper
    }
}

pub fn support_bounds(params: &GevParams) -> SupportBounds {
    if params.is_gumbel() {
        return SupportBounds {
            lower: f64::NEG_INFINITY,
            upper: f64::INFINITY,
        };
    }
    let end = params.mu - params.sigma / params.xi;
    if params.xi > 0.0 {
        SupportBounds {
            lower: end,
            upper: f64::INFINITY,
        }
    } else {
        SupportBounds {
            lower: f64::NEG_INFINITY,
            upper: end,
        }
    }
}

fn check_finite(z: f64) -> Result<()> {
    if z.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("expected a finite value, got {z}")))
    }
}

/// Distribution function, extended by 0 and 1 outside the support.
pub fn gev_cdf(z: f64, params: &GevParams) -> Result<f64> {
    check_finite(z)?;
    Ok(cdf_unchecked(z, params))
}

#[inline]
pub(crate) fn cdf_unchecked(z: f64, params: &GevParams) -> f64 {
    (-params.log_t(z).exp()).exp()
}

/// Log density; `-inf` outside the open support.
pub fn gev_logpdf(z: f64, params: &GevParams) -> Result<f64> {
    check_finite(z)?;
    Ok(logpdf_unchecked(z, params))
}

#[inline]
pub(crate) fn logpdf_unchecked(z: f64, params: &GevParams) -> f64 {
    Kernel::new(params).logpdf(z)
}

/// `μ + σ[(-log p)^(-ξ) - 1]/ξ`, or `μ - σ log(-log p)` in the Gumbel case.
pub fn gev_quantile(p: f64, params: &GevParams) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!(
            "quantile needs p in (0, 1), got {p}"
        )));
    }
    Ok(quantile_unchecked(p, params))
}

#[inline]
pub(crate) fn quantile_unchecked(p: f64, params: &GevParams) -> f64 {
    let log_y = (-p.ln()).ln();
    if params.is_gumbel() {
        params.mu - params.sigma * log_y
    } else {
        params.mu + params.sigma * (-params.xi * log_y).exp_m1() / params.xi
    }
}

/// Inverse-transform draw.
pub fn gev_sample<R: Rng + ?Sized>(rng: &mut R, params: &GevParams) -> f64 {
    let u: f64 = Open01.sample(rng);
    quantile_unchecked(u, params)
}

/// `log[G(zr) - G(zl)]` for the interval `(zl, zr]`.
pub fn gev_interval_logprob(zl: f64, zr: f64, params: &GevParams) -> Result<f64> {
    if zl.is_nan() || zr.is_nan() {
        return Err(Error::Domain("interval endpoints must not be NaN".into()));
    }
    if zl >= zr {
        return Err(Error::Domain(format!(
            "interval needs zl < zr, got ({zl}, {zr}]"
        )));
    }
    Ok(interval_logprob_unchecked(zl, zr, params))
}

#[inline]
pub(crate) fn interval_logprob_unchecked(zl: f64, zr: f64, params: &GevParams) -> f64 {
    Kernel::new(params).interval_logprob(zl, zr)
}

/// Sum of log densities (or interval log masses when `delta` is set).
pub fn log_likelihood(values: &[f64], params: &GevParams, delta: Option<f64>) -> f64 {
    let kernel = Kernel::new(params);
    let mut acc = 0.0;
    for &z in values {
        acc += match delta {
            None => kernel.logpdf(z),
            Some(d) => kernel.interval_logprob(z - d, z + d),
        };
        if acc == f64::NEG_INFINITY {
            break;
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::E;

    fn p(mu: f64, sigma: f64, xi: f64) -> GevParams {
        GevParams::new(mu, sigma, xi).unwrap()
    }

    #[test]
    fn construction_guards() {
        assert!(GevParams::new(0.0, 0.0, 0.1).is_err());
        assert!(GevParams::new(0.0, -1.0, 0.1).is_err());
        assert!(GevParams::new(0.0, 1.0, -0.5).is_err());
        assert!(GevParams::new(0.0, 1.0, -0.6).is_err());
        assert!(GevParams::new(f64::NAN, 1.0, 0.0).is_err());
        assert!(GevParams::new(0.0, 1.0, -0.49).is_ok());
    }

    #[test]
    fn cdf_reference_values() {
        let v = gev_cdf(3.0, &p(3.0, 2.0, 0.0)).unwrap();
        assert!((v - (-1.0f64).exp()).abs() < 1e-15);
        assert_eq!(gev_cdf(-10.0, &p(0.0, 1.0, 0.2)).unwrap(), 0.0);
        assert_eq!(gev_cdf(-5.0, &p(0.0, 1.0, 0.2)).unwrap(), 0.0);
        assert_eq!(gev_cdf(5.0, &p(0.0, 1.0, -0.2)).unwrap(), 1.0);
        assert_eq!(gev_cdf(7.0, &p(0.0, 1.0, -0.2)).unwrap(), 1.0);
        // exp(-1.2^-5), 40-digit reference
        let v = gev_cdf(1.0, &p(0.0, 1.0, 0.2)).unwrap();
        assert!((v - 0.669_062_652_667_818_8).abs() < 1e-14, "{v}");
    }

    #[test]
    fn non_finite_input_is_a_domain_error() {
        let th = p(0.0, 1.0, 0.1);
        assert!(gev_cdf(f64::NAN, &th).is_err());
        assert!(gev_cdf(f64::INFINITY, &th).is_err());
        assert!(gev_logpdf(f64::NEG_INFINITY, &th).is_err());
    }

    #[test]
    fn logpdf_reference_values() {
        let v = gev_logpdf(2.0, &p(2.0, 3.0, 0.0)).unwrap();
        assert!((v - (-1.0 - 3f64.ln())).abs() < 1e-14);
        assert_eq!(
            gev_logpdf(-10.0, &p(0.0, 1.0, 0.2)).unwrap(),
            f64::NEG_INFINITY
        );
        // boundary points carry zero density
        assert_eq!(
            gev_logpdf(-5.0, &p(0.0, 1.0, 0.2)).unwrap(),
            f64::NEG_INFINITY
        );
        assert_eq!(
            gev_logpdf(5.0, &p(0.0, 1.0, -0.2)).unwrap(),
            f64::NEG_INFINITY
        );
    }

    #[test]
    fn logpdf_matches_cdf_finite_difference() {
        let th = p(0.0, 1.0, 0.2);
        let h = 1e-5;
        let fd = (gev_cdf(1.0 + h, &th).unwrap() - gev_cdf(1.0 - h, &th).unwrap()) / (2.0 * h);
        let dens = gev_logpdf(1.0, &th).unwrap().exp();
        assert!((fd - dens).abs() < 1e-6, "{fd} vs {dens}");
    }

    #[test]
    fn quantile_reference_values() {
        for xi in [-0.4, -0.1, 0.0, 0.3, 1.5] {
            let th = p(4.0, 2.0, xi);
            let q = gev_quantile(1.0 / E, &th).unwrap();
            assert!((q - 4.0).abs() < 1e-12, "xi={xi}: {q}");
        }
        let q = gev_quantile(0.5, &p(0.0, 1.0, 0.0)).unwrap();
        assert!((q - 0.366_512_920_581_664_3).abs() < 1e-15);
        assert!(gev_quantile(0.0, &p(0.0, 1.0, 0.0)).is_err());
        assert!(gev_quantile(1.0, &p(0.0, 1.0, 0.0)).is_err());
    }

    #[test]
    fn quantile_matches_bisection_oracle() {
        let th = p(10.0, 1.5, 0.2);
        // independent bisection on the CDF
        let (mut lo, mut hi) = (-100.0f64, 1000.0f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if gev_cdf(mid, &th).unwrap() < 0.99 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let q = gev_quantile(0.99, &th).unwrap();
        assert!((q - 0.5 * (lo + hi)).abs() < 1e-10, "{q} vs {lo}");
    }

    #[test]
    fn support_bounds_cases() {
        let b = support_bounds(&p(0.0, 1.0, 0.2));
        assert!((b.lower + 5.0).abs() < 1e-15 && b.upper == f64::INFINITY);
        let b = support_bounds(&p(0.0, 1.0, -0.2));
        assert!(b.lower == f64::NEG_INFINITY && (b.upper - 5.0).abs() < 1e-15);
        let b = support_bounds(&p(0.0, 1.0, 0.0));
        assert!(b.lower == f64::NEG_INFINITY && b.upper == f64::INFINITY);
    }

    #[test]
    fn interval_mass_edge_cases() {
        let th = p(0.0, 1.0, 0.2);
        let all = gev_interval_logprob(-6.0, f64::INFINITY, &th).unwrap();
        assert_eq!(all, 0.0);
        let below = gev_interval_logprob(-9.0, -7.0, &th).unwrap();
        assert_eq!(below, f64::NEG_INFINITY);
        let th = p(0.0, 1.0, -0.2);
        let above = gev_interval_logprob(6.0, 7.0, &th).unwrap();
        assert_eq!(above, f64::NEG_INFINITY);
        let whole = gev_interval_logprob(f64::NEG_INFINITY, 5.0, &th).unwrap();
        assert_eq!(whole, 0.0);
        assert!(gev_interval_logprob(1.0, 1.0, &th).is_err());
        assert!(gev_interval_logprob(2.0, 1.0, &th).is_err());
    }

    #[test]
    fn interval_mass_ratio_tends_to_density() {
        let th = p(10.0, 1.5, 0.2);
        let d = 1e-6;
        let mass = gev_interval_logprob(10.0 - d, 10.0 + d, &th).unwrap().exp();
        let dens = gev_logpdf(10.0, &th).unwrap().exp();
        assert!(((mass / (2.0 * d)) / dens - 1.0).abs() < 1e-4);
    }

    #[test]
    fn sampling_is_seed_deterministic() {
        let th = p(10.0, 1.5, 0.2);
        let a: Vec<f64> = {
            let mut rng = ChaCha8Rng::seed_from_u64(11);
            (0..50).map(|_| gev_sample(&mut rng, &th)).collect()
        };
        let b: Vec<f64> = {
            let mut rng = ChaCha8Rng::seed_from_u64(11);
            (0..50).map(|_| gev_sample(&mut rng, &th)).collect()
        };
        assert_eq!(a, b);
        let bounds = support_bounds(&th);
        assert!(a.iter().all(|&z| bounds.contains(z)));
    }
}

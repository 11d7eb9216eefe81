//! Truncated stick-breaking mixtures of GEV components.

use rand::Rng;
use rand_distr::{Distribution, Open01};

use crate::error::{Error, Result};
use crate::gev::{self, GevParams};
use crate::roots;
use crate::special::log_sum_exp;

/// Components whose weight does not exceed this are ignored when bracketing
/// a mixture quantile.
pub const WEIGHT_FLOOR: f64 = 1e-12;

/// Stick proportions and the weights they induce.
#[derive(Debug, Clone, PartialEq)]
pub struct StickWeights {
    v: Vec<f64>,
    pi: Vec<f64>,
}

impl StickWeights {
    pub fn sticks(&self) -> &[f64] {
        &self.v
    }

    pub fn weights(&self) -> &[f64] {
        &self.pi
    }

    pub fn len(&self) -> usize {
        self.pi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pi.is_empty()
    }

    /// `log π_k`, accumulated as `log V_k + Σ_{j<k} log1p(-V_j)` so that
    /// long products do not underflow.
    pub fn log_weights(&self) -> Vec<f64> {
        let mut rest = 0.0;
        self.v
            .iter()
            .map(|&v| {
                let lw = v.ln() + rest;
                rest += (-v).ln_1p();
                lw
            })
            .collect()
    }
}

/// `π_k = V_k Π_{j<k} (1 - V_j)`. The last stick is forced to 1 so the
/// weights sum to one.
pub fn stick_to_weights(v: &[f64]) -> Result<StickWeights> {
    if v.is_empty() {
        return Err(Error::Domain("at least one stick is required".into()));
    }
    if let Some(bad) = v.iter().find(|x| !(0.0..=1.0).contains(*x)) {
        return Err(Error::Domain(format!("stick {bad} outside [0, 1]")));
    }
    let mut v = v.to_vec();
    *v.last_mut().unwrap() = 1.0;
    let mut rest = 1.0;
    let pi = v
        .iter()
        .map(|&vk| {
            let w = vk * rest;
            rest *= 1.0 - vk;
            w
        })
        .collect();
    Ok(StickWeights { v, pi })
}

/// A finite GEV mixture `Σ π_k g(z | θ_k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GevMixture {
    components: Vec<GevParams>,
    weights: StickWeights,
}

impl GevMixture {
    pub fn new(components: Vec<GevParams>, weights: StickWeights) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidParams(
                "mixture needs at least one component".into(),
            ));
        }
        if components.len() != weights.len() {
            return Err(Error::InvalidParams(format!(
                "{} components but {} weights",
                components.len(),
                weights.len()
            )));
        }
        Ok(Self {
            components,
            weights,
        })
    }

    /// Builds a mixture from explicit weights, keeping them verbatim and
    /// recovering the sticks.
    pub fn from_weights(components: Vec<GevParams>, weights: &[f64]) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if weights.iter().any(|w| w.is_nan() || *w < 0.0) || (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParams(format!(
                "weights must be nonnegative and sum to 1 (sum = {total})"
            )));
        }
        let mut rest = 1.0;
        let v: Vec<f64> = weights
            .iter()
            .map(|&w| {
                let vk = if rest > 0.0 {
                    (w / rest).clamp(0.0, 1.0)
                } else {
                    1.0
                };
                rest -= w;
                vk
            })
            .collect();
        let mut sticks = stick_to_weights(&v)?;
        sticks.pi = weights.to_vec();
        Self::new(components, sticks)
    }

    pub fn single(params: GevParams) -> Self {
        Self {
            components: vec![params],
            weights: StickWeights {
                v: vec![1.0],
                pi: vec![1.0],
            },
        }
    }

    pub fn components(&self) -> &[GevParams] {
        &self.components
    }

    pub fn weights(&self) -> &[f64] {
        self.weights.weights()
    }

    pub fn sticks(&self) -> &StickWeights {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    fn active(&self) -> impl Iterator<Item = (f64, &GevParams)> {
        self.weights
            .weights()
            .iter()
            .copied()
            .zip(self.components.iter())
            .filter(|(w, _)| *w > 0.0)
    }
}

pub fn mixture_pdf(z: f64, mix: &GevMixture) -> f64 {
    mix.active()
        .map(|(w, th)| w * gev::logpdf_unchecked(z, th).exp())
        .sum()
}

pub fn mixture_logpdf(z: f64, mix: &GevMixture) -> f64 {
    let terms: Vec<f64> = mix
        .active()
        .map(|(w, th)| w.ln() + gev::logpdf_unchecked(z, th))
        .collect();
    log_sum_exp(&terms)
}

pub fn mixture_cdf(z: f64, mix: &GevMixture) -> f64 {
    if z == f64::INFINITY {
        return 1.0;
    }
    if z == f64::NEG_INFINITY {
        return 0.0;
    }
    let f: f64 = mix
        .active()
        .map(|(w, th)| w * gev::cdf_unchecked(z, th))
        .sum();
    f.min(1.0)
}

/// Initial quantile bracket: extreme component quantiles over components
/// with weight above [`WEIGHT_FLOOR`].
pub fn quantile_bracket(p: f64, mix: &GevMixture) -> Result<(f64, f64)> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!(
            "quantile needs p in (0, 1), got {p}"
        )));
    }
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for (w, th) in mix.active() {
        if w > WEIGHT_FLOOR {
            let q = gev::quantile_unchecked(p, th);
            lo = lo.min(q);
            hi = hi.max(q);
        }
    }
    if lo > hi {
        return Err(Error::InvalidParams(
            "mixture has no component above the weight floor".into(),
        ));
    }
    Ok((lo, hi))
}

/// Solves `F(z) = p` by bracketed root finding, to `|F(z) - p| < 1e-10`.
pub fn mixture_quantile(p: f64, mix: &GevMixture) -> Result<f64> {
    let (lo, hi) = quantile_bracket(p, mix)?;
    if lo == hi {
        return Ok(lo);
    }
    roots::invert_monotone(|z| mixture_cdf(z, mix), p, lo, hi)
}

/// Draws a component index from the weights, then a value from it.
pub fn mixture_sample<R: Rng + ?Sized>(rng: &mut R, mix: &GevMixture) -> (f64, usize) {
    let k = sample_index(rng, mix.weights());
    (gev::gev_sample(rng, &mix.components[k]), k)
}

/// Inverse-CDF categorical draw over nonnegative weights.
pub(crate) fn sample_index<R: Rng + ?Sized>(rng: &mut R, weights: &[f64]) -> usize {
    let total: f64 = weights.iter().sum();
    let u: f64 = Open01.sample(rng);
    let target = u * total;
    let mut acc = 0.0;
    let mut last = 0;
    for (k, &w) in weights.iter().enumerate() {
        if w <= 0.0 {
            continue;
        }
        acc += w;
        last = k;
        if target < acc {
            return k;
        }
    }
    last
}

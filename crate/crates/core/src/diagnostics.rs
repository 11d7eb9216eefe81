//! Posterior functionals and model checks.
//!
//! Curves are summarised pointwise: the median and an equal-tailed band of
//! the per-draw values at each grid point. Draw subsampling is deterministic
//! (evenly spaced over the retained draws) so summaries never consume
//! randomness.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::mixture::{mixture_cdf, mixture_pdf, mixture_quantile};
use crate::sampler::{MixtureState, Snapshot};

pub use crate::special::std_normal_quantile;

/// Draws used for return levels unless told otherwise.
pub const DEFAULT_RETURN_SUBSAMPLE: usize = 100;

pub const DEFAULT_LEVEL: f64 = 0.95;

/// Points on the default density/CDF grid.
pub const DEFAULT_GRID_POINTS: usize = 512;

/// Clamp applied to fitted CDF values before normal inversion.
const RESIDUAL_CLAMP: f64 = 1e-12;

/// Pointwise posterior summary of a curve.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveSummary {
    pub grid: Vec<f64>,
    pub median: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub level: f64,
}

/// Return levels `r_p` with `F(r_p) = 1 - p`, against `log(-log(1 - p))`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReturnLevelCurve {
    pub p: Vec<f64>,
    pub x_axis: Vec<f64>,
    pub median: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub level: f64,
}

pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..n)
            .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
            .collect(),
    }
}

/// `DEFAULT_GRID_POINTS` points over `[min - 0.1 R, max + 0.5 R]`, `R` the
/// data range.
pub fn default_grid(data: &[f64]) -> Vec<f64> {
    let lo = data.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = data.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let range = if hi > lo { hi - lo } else { 1.0 };
    linspace(lo - 0.1 * range, hi + 0.5 * range, DEFAULT_GRID_POINTS)
}

/// Evenly spaced indices of at most `subsample` out of `n` draws.
pub fn subsample_indices(n: usize, subsample: usize) -> Vec<usize> {
    if subsample == 0 || subsample >= n {
        return (0..n).collect();
    }
    (0..subsample)
        .map(|i| ((i as f64 + 0.5) * n as f64 / subsample as f64) as usize)
        .collect()
}

fn check_level(level: f64) -> Result<()> {
    if level > 0.0 && level < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "credible level must lie in (0, 1), got {level}"
        )))
    }
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::Domain("grid is empty".into()));
    }
    if grid.iter().any(|g| !g.is_finite()) || grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Domain(
            "grid must be finite and strictly increasing".into(),
        ));
    }
    Ok(())
}

/// Linear-interpolation quantile of sorted values.
fn sorted_quantile(sorted: &[f64], q: f64) -> f64 {
    crate::sampler::quantile_sorted(sorted, q)
}

/// Median and equal-tailed band across rows at each column.
pub fn pointwise_summary(rows: &[Vec<f64>], level: f64) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let width = rows.first().map_or(0, Vec::len);
    let tail = 0.5 * (1.0 - level);
    let mut median = Vec::with_capacity(width);
    let mut lower = Vec::with_capacity(width);
    let mut upper = Vec::with_capacity(width);
    let mut column = Vec::with_capacity(rows.len());
    for j in 0..width {
        column.clear();
        column.extend(rows.iter().map(|r| r[j]));
        column.sort_by(f64::total_cmp);
        median.push(sorted_quantile(&column, 0.5));
        lower.push(sorted_quantile(&column, tail));
        upper.push(sorted_quantile(&column, 1.0 - tail));
    }
    (median, lower, upper)
}

fn selected(draws: &[Snapshot], subsample: usize) -> Result<Vec<&Snapshot>> {
    if draws.is_empty() {
        return Err(Error::EmptyDraws);
    }
    Ok(subsample_indices(draws.len(), subsample)
        .into_iter()
        .map(|i| &draws[i])
        .collect())
}

/// Pointwise posterior density and CDF summaries on `grid`.
pub fn posterior_curves(
    draws: &[Snapshot],
    grid: &[f64],
    level: f64,
    subsample: usize,
) -> Result<(CurveSummary, CurveSummary)> {
    check_level(level)?;
    check_grid(grid)?;
    let picked = selected(draws, subsample)?;
    let evaluated: Vec<(Vec<f64>, Vec<f64>)> = picked
        .par_iter()
        .map(|d| {
            let pdf = grid.iter().map(|&z| mixture_pdf(z, &d.mixture)).collect();
            let cdf = grid.iter().map(|&z| mixture_cdf(z, &d.mixture)).collect();
            (pdf, cdf)
        })
        .collect();
    let (pdfs, cdfs): (Vec<_>, Vec<_>) = evaluated.into_iter().unzip();
    let summary = |rows: &[Vec<f64>]| {
        let (median, lower, upper) = pointwise_summary(rows, level);
        CurveSummary {
            grid: grid.to_vec(),
            median,
            lower,
            upper,
            level,
        }
    };
    Ok((summary(&pdfs), summary(&cdfs)))
}

/// Posterior median CDF evaluated at arbitrary points.
pub fn posterior_median_cdf(
    draws: &[Snapshot],
    points: &[f64],
    subsample: usize,
) -> Result<Vec<f64>> {
    let picked = selected(draws, subsample)?;
    let rows: Vec<Vec<f64>> = picked
        .par_iter()
        .map(|d| points.iter().map(|&z| mixture_cdf(z, &d.mixture)).collect())
        .collect();
    Ok(pointwise_summary(&rows, 0.5).0)
}

/// Posterior return levels: per draw `r_p` solves `F(r_p) = 1 - p`.
pub fn return_levels(
    draws: &[Snapshot],
    p_grid: &[f64],
    level: f64,
    subsample: usize,
) -> Result<ReturnLevelCurve> {
    check_level(level)?;
    if let Some(p) = p_grid.iter().find(|p| !(**p > 0.0 && **p < 1.0)) {
        return Err(Error::Domain(format!(
            "exceedance probability {p} outside (0, 1)"
        )));
    }
    let indices = subsample_indices(draws.len(), subsample);
    if draws.is_empty() {
        return Err(Error::EmptyDraws);
    }
    let rows: Vec<Vec<f64>> = indices
        .par_iter()
        .map(|&i| {
            p_grid
                .iter()
                .map(|&p| {
                    mixture_quantile(1.0 - p, &draws[i].mixture).map_err(|e| Error::ReturnLevel {
                        draw: i,
                        p,
                        source: Box::new(e),
                    })
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<_>>()?;
    let (median, lower, upper) = pointwise_summary(&rows, level);
    Ok(ReturnLevelCurve {
        p: p_grid.to_vec(),
        x_axis: p_grid.iter().map(|p| (-(-p).ln_1p()).ln()).collect(),
        median,
        lower,
        upper,
        level,
    })
}

/// One Dunn-Smyth residual.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Residual {
    pub index: usize,
    pub observation: f64,
    pub fitted_cdf: f64,
    pub residual: f64,
}

/// `e_i = Φ^{-1}(F̂(z_i))` with `F̂` clamped to `[1e-12, 1 - 1e-12]`.
pub fn dunn_smyth_residuals<F>(fitted_cdf: F, data: &[f64]) -> Vec<Residual>
where
    F: Fn(f64) -> f64,
{
    let fitted: Vec<f64> = data.iter().map(|&z| fitted_cdf(z)).collect();
    residuals_from_values(data, &fitted)
}

/// Residuals from precomputed fitted CDF values, one per observation.
pub fn residuals_from_values(data: &[f64], fitted: &[f64]) -> Vec<Residual> {
    data.iter()
        .zip(fitted)
        .enumerate()
        .map(|(index, (&z, &f))| {
            let clamped = if f.is_nan() {
                0.5
            } else {
                f.clamp(RESIDUAL_CLAMP, 1.0 - RESIDUAL_CLAMP)
            };
            Residual {
                index,
                observation: z,
                fitted_cdf: f,
                residual: std_normal_quantile(clamped).expect("clamped into (0, 1)"),
            }
        })
        .collect()
}

/// `(normal plotting position, ordered residual)` pairs for QQ plots, with
/// plotting positions `Φ^{-1}((i - 0.5)/m)`.
pub fn qq_pairs(residuals: &[Residual]) -> Vec<(f64, f64)> {
    let mut sorted: Vec<f64> = residuals.iter().map(|r| r.residual).collect();
    sorted.sort_by(f64::total_cmp);
    let m = sorted.len() as f64;
    sorted
        .into_iter()
        .enumerate()
        .map(|(i, e)| {
            let pp = (i as f64 + 0.5) / m;
            (
                std_normal_quantile(pp).expect("plotting position in (0, 1)"),
                e,
            )
        })
        .collect()
}

/// Number of distinct allocated slots.
pub fn occupied_components(state: &MixtureState) -> usize {
    state.occupied()
}

/// Fraction of draws with each occupied-component count, ordered by count.
pub fn occupancy_distribution(draws: &[Snapshot]) -> Vec<(usize, f64)> {
    let mut tally = std::collections::BTreeMap::new();
    for d in draws {
        *tally.entry(d.occupied()).or_insert(0usize) += 1;
    }
    let total = draws.len() as f64;
    tally
        .into_iter()
        .map(|(k, n)| (k, n as f64 / total))
        .collect()
}

/// Most frequent occupied-component count (smallest on ties).
pub fn modal_occupied(draws: &[Snapshot]) -> Option<usize> {
    occupancy_distribution(draws)
        .into_iter()
        .fold(None, |best: Option<(usize, f64)>, (k, f)| match best {
            Some((_, bf)) if bf >= f => best,
            _ => Some((k, f)),
        })
        .map(|(k, _)| k)
}

/// Trapezoidal `∫ (f - f̂)²` from values on a common grid.
pub fn integrated_squared_error(truth: &[f64], estimate: &[f64], grid: &[f64]) -> Result<f64> {
    if grid.len() < 2 {
        return Err(Error::Domain(
            "integration grid needs at least two points".into(),
        ));
    }
    if truth.len() != grid.len() || estimate.len() != grid.len() {
        return Err(Error::Domain("curves and grid differ in length".into()));
    }
    check_grid(grid)?;
    let sq: Vec<f64> = truth
        .iter()
        .zip(estimate)
        .map(|(a, b)| (a - b) * (a - b))
        .collect();
    Ok(grid
        .windows(2)
        .zip(sq.windows(2))
        .map(|(g, s)| 0.5 * (g[1] - g[0]) * (s[0] + s[1]))
        .sum())
}

/// Integrated squared error between two densities evaluated on `grid`.
pub fn mise<F, G>(truth: F, estimate: G, grid: &[f64]) -> Result<f64>
where
    F: Fn(f64) -> f64,
    G: Fn(f64) -> f64,
{
    let t: Vec<f64> = grid.iter().map(|&z| truth(z)).collect();
    let e: Vec<f64> = grid.iter().map(|&z| estimate(z)).collect();
    integrated_squared_error(&t, &e, grid)
}

/// Kolmogorov-Smirnov distance between the empirical CDF of `sample` and
/// `cdf`.
pub fn ks_distance<F>(sample: &[f64], cdf: F) -> f64
where
    F: Fn(f64) -> f64,
{
    let mut sorted = sample.to_vec();
    sorted.sort_by(f64::total_cmp);
    let m = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            let above = (i + 1) as f64 / m - f;
            let below = f - i as f64 / m;
            above.max(below)
        })
        .fold(0.0, f64::max)
}

//! Synthetic block-maxima generators and the Monte Carlo study driver.

use rand::Rng;
use rand_distr::{Distribution, Exp, Normal, StudentT};
use rayon::prelude::*;

use crate::data::BlockMaximaSeries;
use crate::diagnostics::{
    integrated_squared_error, linspace, occupancy_distribution, pointwise_summary,
    subsample_indices,
};
use crate::error::{Error, Result};
use crate::gev::{cdf_unchecked, logpdf_unchecked, quantile_unchecked, GevParams};
use crate::mixture::{mixture_quantile, GevMixture};
use crate::rng::{chain_rng, derive_seed};
use crate::roots::invert_monotone;
use crate::sampler::{run_chain, ChainConfig, PriorSpec};
use crate::special::{normal_cdf, normal_pdf, student_t_cdf, student_t_pdf};

pub const DEFAULT_SAMPLE_SIZE: usize = 1000;

/// One mixture ingredient of a synthetic scenario.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScenarioComponent {
    Gev(GevParams),
    Normal { mean: f64, sd: f64 },
    StudentT { df: f64 },
}

impl ScenarioComponent {
    fn pdf(&self, z: f64) -> f64 {
        match *self {
            Self::Gev(p) => logpdf_unchecked(z, &p).exp(),
            Self::Normal { mean, sd } => normal_pdf((z - mean) / sd) / sd,
            Self::StudentT { df } => student_t_pdf(z, df),
        }
    }

    fn cdf(&self, z: f64) -> f64 {
        match *self {
            Self::Gev(p) => cdf_unchecked(z, &p),
            Self::Normal { mean, sd } => normal_cdf((z - mean) / sd),
            Self::StudentT { df } => student_t_cdf(z, df),
        }
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            Self::Gev(p) => crate::gev::gev_sample(rng, &p),
            Self::Normal { mean, sd } => Normal::new(mean, sd).expect("validated sd").sample(rng),
            Self::StudentT { df } => StudentT::new(df).expect("validated df").sample(rng),
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            Self::Gev(_) => Ok(()),
            Self::Normal { mean, sd } if mean.is_finite() && sd.is_finite() && sd > 0.0 => Ok(()),
            Self::StudentT { df } if df.is_finite() && df > 0.0 => Ok(()),
            other => Err(Error::InvalidParams(format!(
                "bad scenario component {other:?}"
            ))),
        }
    }
}

/// Named synthetic scenarios.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScenarioTag {
    /// Single GEV(10, 1.5, 0.2).
    A,
    /// 0.7 GEV(1, 1.5, -0.2) + 0.3 GEV(18, 1, 0.4).
    B,
    /// 0.25 N(4, 1) + 0.15 N(7, 1) + 0.6 t(10).
    C,
}

impl std::str::FromStr for ScenarioTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "A" => Ok(Self::A),
            "B" => Ok(Self::B),
            "C" => Ok(Self::C),
            other => Err(Error::InvalidConfig(format!("unknown scenario '{other}'"))),
        }
    }
}

impl std::fmt::Display for ScenarioTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Self::A => "A",
            Self::B => "B",
            Self::C => "C",
        };
        f.write_str(s)
    }
}

/// A weighted mixture of scenario components plus a sample size.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSpec {
    pub tag: Option<ScenarioTag>,
    pub components: Vec<(f64, ScenarioComponent)>,
    pub sample_size: usize,
}

fn gev(mu: f64, sigma: f64, xi: f64) -> ScenarioComponent {
    ScenarioComponent::Gev(GevParams::new(mu, sigma, xi).expect("constant parameters are valid"))
}

impl ScenarioSpec {
    pub fn new(components: Vec<(f64, ScenarioComponent)>, sample_size: usize) -> Result<Self> {
        let spec = Self {
            tag: None,
            components,
            sample_size,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn from_tag(tag: ScenarioTag, sample_size: usize) -> Self {
        let components = match tag {
            ScenarioTag::A => vec![(1.0, gev(10.0, 1.5, 0.2))],
            ScenarioTag::B => vec![(0.7, gev(1.0, 1.5, -0.2)), (0.3, gev(18.0, 1.0, 0.4))],
            ScenarioTag::C => vec![
                (0.25, ScenarioComponent::Normal { mean: 4.0, sd: 1.0 }),
                (0.15, ScenarioComponent::Normal { mean: 7.0, sd: 1.0 }),
                (0.6, ScenarioComponent::StudentT { df: 10.0 }),
            ],
        };
        Self {
            tag: Some(tag),
            components,
            sample_size,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.components.is_empty() {
            return Err(Error::InvalidParams("scenario has no components".into()));
        }
        if self.sample_size == 0 {
            return Err(Error::InvalidParams("sample size must be positive".into()));
        }
        for (w, c) in &self.components {
            if !(w.is_finite() && *w > 0.0) {
                return Err(Error::InvalidParams(format!("bad scenario weight {w}")));
            }
            c.validate()?;
        }
        let total: f64 = self.components.iter().map(|(w, _)| w).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParams(format!(
                "scenario weights sum to {total}"
            )));
        }
        Ok(())
    }

    pub fn density(&self, z: f64) -> f64 {
        self.components.iter().map(|(w, c)| w * c.pdf(z)).sum()
    }

    pub fn cdf(&self, z: f64) -> f64 {
        self.components
            .iter()
            .map(|(w, c)| w * c.cdf(z))
            .sum::<f64>()
            .min(1.0)
    }

    /// Infimum of `{z : F(z) >= p}`.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::Domain(format!("quantile level {p} outside (0, 1)")));
        }
        if let [(_, ScenarioComponent::Gev(g))] = self.components.as_slice() {
            return Ok(quantile_unchecked(p, g));
        }
        let (mut lo, mut hi) = (-1.0_f64, 1.0_f64);
        while self.cdf(lo) > p {
            lo *= 2.0;
            if !lo.is_finite() {
                return Err(Error::Domain(format!("no lower bracket for p = {p}")));
            }
        }
        while self.cdf(hi) < p {
            hi *= 2.0;
            if !hi.is_finite() {
                return Err(Error::Domain(format!("no upper bracket for p = {p}")));
            }
        }
        invert_monotone(|z| self.cdf(z), p, lo, hi)
    }
}

/// Truth queries answered by [`scenario_truth`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TruthQuery {
    Density(f64),
    Cdf(f64),
    Quantile(f64),
}

pub fn scenario_truth(spec: &ScenarioSpec, query: TruthQuery) -> Result<f64> {
    match query {
        TruthQuery::Density(z) => Ok(spec.density(z)),
        TruthQuery::Cdf(z) => Ok(spec.cdf(z)),
        TruthQuery::Quantile(p) => spec.quantile(p),
    }
}

/// `spec.sample_size` draws; labels hold the 1-based generating component.
pub fn gen_scenario<R: Rng + ?Sized>(
    spec: &ScenarioSpec,
    rng: &mut R,
) -> Result<BlockMaximaSeries> {
    spec.validate()?;
    let weights: Vec<f64> = spec.components.iter().map(|(w, _)| *w).collect();
    let mut values = Vec::with_capacity(spec.sample_size);
    let mut labels = Vec::with_capacity(spec.sample_size);
    for _ in 0..spec.sample_size {
        let k = crate::mixture::sample_index(rng, &weights);
        values.push(spec.components[k].1.sample(rng));
        labels.push((k + 1).to_string());
    }
    BlockMaximaSeries::new(values)?.with_labels(labels)
}

/// Maxima of `block_size` exponential variates for each of `m` blocks. The
/// rate of each block is drawn from `rates` with probabilities `weights`;
/// labels hold the 1-based rate index.
pub fn gen_exponential_block_maxima<R: Rng + ?Sized>(
    m: usize,
    block_size: usize,
    rates: &[f64],
    weights: &[f64],
    rng: &mut R,
) -> Result<BlockMaximaSeries> {
    if m == 0 || block_size == 0 {
        return Err(Error::InvalidParams(
            "need at least one block of one variate".into(),
        ));
    }
    if rates.is_empty() || rates.len() != weights.len() {
        return Err(Error::InvalidParams("rates and weights must align".into()));
    }
    let total: f64 = weights.iter().sum();
    if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) || (total - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidParams(
            "group weights must be a probability vector".into(),
        ));
    }
    let exps = rates
        .iter()
        .map(|&r| Exp::new(r).map_err(|_| Error::InvalidParams(format!("bad rate {r}"))))
        .collect::<Result<Vec<_>>>()?;
    let mut values = Vec::with_capacity(m);
    let mut labels = Vec::with_capacity(m);
    for _ in 0..m {
        let g = crate::mixture::sample_index(rng, weights);
        let max = (0..block_size)
            .map(|_| exps[g].sample(rng))
            .fold(f64::NEG_INFINITY, f64::max);
        values.push(max);
        labels.push((g + 1).to_string());
    }
    BlockMaximaSeries::new(values)?.with_labels(labels)
}

/// Large-block limit of an equal mixture of rate-1 and rate-2 exponential
/// block maxima: `½ Gumbel(ln n, 1) + ½ Gumbel(½ ln n, ½)`.
pub fn exponential_limit_mixture(block_size: usize) -> Result<GevMixture> {
    if block_size < 2 {
        return Err(Error::InvalidParams("block size must be at least 2".into()));
    }
    let ln_n = (block_size as f64).ln();
    GevMixture::from_weights(
        vec![
            GevParams::new(ln_n, 1.0, 0.0)?,
            GevParams::new(0.5 * ln_n, 0.5, 0.0)?,
        ],
        &[0.5, 0.5],
    )
}

/// Settings of a replicated simulation study.
#[derive(Debug, Clone, PartialEq)]
pub struct StudyConfig {
    pub replicates: usize,
    pub chain: ChainConfig,
    pub priors: PriorSpec,
    pub master_seed: u64,
    pub workers: usize,
    pub grid_points: usize,
    /// Draws used for density and return-level summaries.
    pub subsample: usize,
    pub level: f64,
}

impl Default for StudyConfig {
    fn default() -> Self {
        Self {
            replicates: 20,
            chain: ChainConfig::default(),
            priors: PriorSpec::default(),
            master_seed: 0,
            workers: 1,
            grid_points: 512,
            subsample: 250,
            level: 0.95,
        }
    }
}

/// Posterior median and equal-tailed band of a scalar.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Band {
    pub median: f64,
    pub lower: f64,
    pub upper: f64,
}

impl Band {
    pub fn covers(&self, x: f64) -> bool {
        self.lower <= x && x <= self.upper
    }
}

/// Per-replicate study output.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplicateResult {
    pub replicate: usize,
    pub seed: u64,
    pub ise: f64,
    pub q95: Band,
    pub q99: Band,
    pub occupancy: Vec<(usize, f64)>,
    pub acceptance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudyResult {
    pub truth_q95: f64,
    pub truth_q99: f64,
    pub grid: Vec<f64>,
    pub replicates: Vec<ReplicateResult>,
}

impl StudyResult {
    pub fn mean_ise(&self) -> f64 {
        self.replicates.iter().map(|r| r.ise).sum::<f64>() / self.replicates.len() as f64
    }

    pub fn coverage_q95(&self) -> f64 {
        let hit = self
            .replicates
            .iter()
            .filter(|r| r.q95.covers(self.truth_q95))
            .count();
        hit as f64 / self.replicates.len() as f64
    }

    pub fn coverage_q99(&self) -> f64 {
        let hit = self
            .replicates
            .iter()
            .filter(|r| r.q99.covers(self.truth_q99))
            .count();
        hit as f64 / self.replicates.len() as f64
    }
}

/// Grid spanning the central `1 - 2e-4` truth mass, padded by a tenth of
/// its width on each side.
pub fn truth_grid(spec: &ScenarioSpec, points: usize) -> Result<Vec<f64>> {
    let lo = spec.quantile(1e-4)?;
    let hi = spec.quantile(1.0 - 1e-4)?;
    let pad = 0.1 * (hi - lo);
    Ok(linspace(lo - pad, hi + pad, points))
}

/// Runs one replicate: fresh data and a chain, both from `seed`.
pub fn run_replicate(
    spec: &ScenarioSpec,
    config: &StudyConfig,
    replicate: usize,
    grid: &[f64],
) -> Result<ReplicateResult> {
    let seed = derive_seed(config.master_seed, replicate as u64);
    let mut rng = chain_rng(seed);
    let series = gen_scenario(spec, &mut rng)?;
    let mut chain = config.chain.clone();
    chain.seed = seed;
    let draws = run_chain(&series, &config.priors, &chain, &mut rng)?;
    if draws.is_empty() {
        return Err(Error::EmptyDraws);
    }
    let picked = subsample_indices(draws.len(), config.subsample);
    let mut densities = Vec::with_capacity(picked.len());
    let mut levels = Vec::with_capacity(picked.len());
    for &i in &picked {
        let mix = &draws.draws[i].mixture;
        densities.push(
            grid.iter()
                .map(|&z| crate::mixture::mixture_pdf(z, mix))
                .collect(),
        );
        let q = |p: f64| {
            mixture_quantile(p, mix).map_err(|e| Error::ReturnLevel {
                draw: i,
                p: 1.0 - p,
                source: Box::new(e),
            })
        };
        levels.push(vec![q(0.95)?, q(0.99)?]);
    }
    let (dens_median, _, _) = pointwise_summary(&densities, config.level);
    let truth: Vec<f64> = grid.iter().map(|&z| spec.density(z)).collect();
    let ise = integrated_squared_error(&truth, &dens_median, grid)?;
    let (med, lower, upper) = pointwise_summary(&levels, config.level);
    let band = |j: usize| Band {
        median: med[j],
        lower: lower[j],
        upper: upper[j],
    };
    Ok(ReplicateResult {
        replicate,
        seed,
        ise,
        q95: band(0),
        q99: band(1),
        occupancy: occupancy_distribution(&draws.draws),
        acceptance: draws.acceptance.sampling.rate(),
    })
}

/// Replicated fits of `spec` on `config.workers` threads. Replicate `r` is
/// seeded with `derive_seed(master_seed, r)`, so results do not depend on
/// the worker count.
pub fn monte_carlo_study(spec: &ScenarioSpec, config: &StudyConfig) -> Result<StudyResult> {
    spec.validate()?;
    config.chain.validate()?;
    if config.replicates == 0 {
        return Err(Error::InvalidConfig(
            "study needs at least one replicate".into(),
        ));
    }
    let grid = truth_grid(spec, config.grid_points.max(2))?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers.max(1))
        .build()
        .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;
    let replicates = pool.install(|| {
        (0..config.replicates)
            .into_par_iter()
            .map(|r| {
                run_replicate(spec, config, r, &grid).map_err(|e| Error::Replicate {
                    replicate: r,
                    source: Box::new(e),
                })
            })
            .collect::<Result<Vec<_>>>()
    })?;
    Ok(StudyResult {
        truth_q95: spec.quantile(0.95)?,
        truth_q99: spec.quantile(0.99)?,
        grid,
        replicates,
    })
}

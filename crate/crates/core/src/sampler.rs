//! Blocked Gibbs sampler with fixed truncation for the DP mixture of GEV
//! kernels.
//!
//! One sweep updates, in order: allocations, sticks, component parameters
//! (random-walk Metropolis on `(μ, log σ, ξ)` for occupied slots, fresh
//! prior draws for empty ones) and the precision `α`. With a censoring
//! half-width `δ`, every density term `g(z | θ)` is replaced by the interval
//! mass `G(z + δ | θ) - G(z - δ | θ)`.

use rand::Rng;
use rand_distr::{Beta, Distribution, Gamma, Open01, StandardNormal};

use crate::data::BlockMaximaSeries;
use crate::error::{Error, Result};
use crate::gev::{GevParams, Kernel, SHAPE_LOWER};
use crate::mixture::{stick_to_weights, GevMixture, StickWeights};
use crate::rng::chain_rng;
use crate::special::{normal_sf, std_normal_quantile};

/// Largest stick value used inside `log(1 - V_k)` for the `α` update.
const STICK_CLAMP: f64 = 1.0 - 1e-15;

/// Prior draws tried when repairing an unsupported observation.
const REPAIR_TRIES: usize = 100;

const LN_2PI: f64 = 1.837_877_066_409_345_3;

/// Hyperparameters of the base measure and of the `α` hyperprior.
///
/// `μ ~ N(mu_mean, mu_var)`, `log σ ~ N(logscale_mean, logscale_var)`,
/// `ξ ~ N(shape_mean, shape_var)` truncated to `(-1/2, ∞)`, and
/// `α ~ Gamma(alpha_shape, alpha_rate)` (rate parameterisation).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PriorSpec {
    pub mu_mean: f64,
    pub mu_var: f64,
    pub logscale_mean: f64,
    pub logscale_var: f64,
    pub shape_mean: f64,
    pub shape_var: f64,
    pub alpha_shape: f64,
    pub alpha_rate: f64,
}

impl Default for PriorSpec {
    fn default() -> Self {
        Self {
            mu_mean: 0.0,
            mu_var: 1e4,
            logscale_mean: 0.0,
            logscale_var: 1e4,
            shape_mean: 0.0,
            shape_var: 100.0,
            alpha_shape: 1.0,
            alpha_rate: 1.0,
        }
    }
}

impl PriorSpec {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("mu_var", self.mu_var),
            ("logscale_var", self.logscale_var),
            ("shape_var", self.shape_var),
            ("alpha_shape", self.alpha_shape),
            ("alpha_rate", self.alpha_rate),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidConfig(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        for (name, v) in [
            ("mu_mean", self.mu_mean),
            ("logscale_mean", self.logscale_mean),
            ("shape_mean", self.shape_mean),
        ] {
            if !v.is_finite() {
                return Err(Error::InvalidConfig(format!(
                    "{name} must be finite, got {v}"
                )));
            }
        }
        if self.shape_tail_mass() <= 0.0 {
            return Err(Error::InvalidConfig(
                "shape prior puts no mass above -1/2".into(),
            ));
        }
        Ok(())
    }

    /// `P(ξ > -1/2)` under the untruncated shape prior.
    fn shape_tail_mass(&self) -> f64 {
        normal_sf((SHAPE_LOWER - self.shape_mean) / self.shape_var.sqrt())
    }

    /// Draws one component from the base measure.
    pub fn sample_component<R: Rng + ?Sized>(&self, rng: &mut R) -> GevParams {
        let tail = self.shape_tail_mass();
        let shape_sd = self.shape_var.sqrt();
        loop {
            let z0: f64 = rng.sample(StandardNormal);
            let z1: f64 = rng.sample(StandardNormal);
            let u: f64 = Open01.sample(rng);
            let mu = self.mu_mean + self.mu_var.sqrt() * z0;
            let sigma = (self.logscale_mean + self.logscale_var.sqrt() * z1).exp();
            // upper-tail inversion: P(X > x) = u * tail
            let xi = match std_normal_quantile(u * tail) {
                Ok(q) => self.shape_mean - shape_sd * q,
                Err(_) => continue,
            };
            if let Ok(th) = GevParams::new(mu, sigma, xi) {
                return th;
            }
        }
    }
}

fn normal_logpdf(x: f64, mean: f64, var: f64) -> f64 {
    let d = x - mean;
    -0.5 * (LN_2PI + var.ln()) - 0.5 * d * d / var
}

/// Log prior density of `θ` expressed in `(μ, log σ, ξ)` coordinates.
pub fn log_prior(theta: &GevParams, priors: &PriorSpec) -> f64 {
    if theta.xi() <= SHAPE_LOWER {
        return f64::NEG_INFINITY;
    }
    normal_logpdf(theta.mu(), priors.mu_mean, priors.mu_var)
        + normal_logpdf(
            theta.sigma().ln(),
            priors.logscale_mean,
            priors.logscale_var,
        )
        + normal_logpdf(theta.xi(), priors.shape_mean, priors.shape_var)
        - priors.shape_tail_mass().ln()
}

/// Random-walk standard deviations for `(μ, log σ, ξ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProposalScales {
    pub mu: f64,
    pub log_sigma: f64,
    pub xi: f64,
}

impl ProposalScales {
    /// `(0.05 * IQR, 0.2, 0.1)`, with the location step floored at 1e-3.
    pub fn from_data(values: &[f64]) -> Self {
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let iqr = quantile_sorted(&sorted, 0.75) - quantile_sorted(&sorted, 0.25);
        Self {
            mu: (0.5 * iqr * 0.1).max(1e-3),
            log_sigma: 0.2,
            xi: 0.1,
        }
    }

    fn as_array(&self) -> [f64; 3] {
        [self.mu, self.log_sigma, self.xi]
    }
}

/// Linear-interpolation sample quantile of sorted data.
pub(crate) fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Sampler settings.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainConfig {
    pub truncation: usize,
    pub n_iter: usize,
    pub burn_in: usize,
    pub thin: usize,
    /// `None` derives the scales from the data via
    /// [`ProposalScales::from_data`].
    pub proposal: Option<ProposalScales>,
    /// Robbins-Monro adaptation of the proposal scales during burn-in.
    pub adapt: bool,
    pub adapt_target: f64,
    pub seed: u64,
    pub censor_delta: Option<f64>,
}

impl Default for ChainConfig {
    fn default() -> Self {
        Self {
            truncation: 50,
            n_iter: 30_000,
            burn_in: 15_000,
            thin: 1,
            proposal: None,
            adapt: true,
            adapt_target: 0.25,
            seed: 0,
            censor_delta: None,
        }
    }
}

impl ChainConfig {
    /// Defaults with `n_iter` iterations, the first half discarded.
    pub fn with_iterations(n_iter: usize) -> Self {
        Self {
            n_iter,
            burn_in: n_iter / 2,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.truncation < 2 {
            return Err(Error::InvalidConfig(format!(
                "truncation must be at least 2, got {}",
                self.truncation
            )));
        }
        if self.truncation > u16::MAX as usize {
            return Err(Error::InvalidConfig("truncation is too large".into()));
        }
        if self.n_iter == 0 {
            return Err(Error::InvalidConfig("n_iter must be positive".into()));
        }
        if self.burn_in >= self.n_iter {
            return Err(Error::InvalidConfig(format!(
                "burn_in ({}) must be smaller than n_iter ({})",
                self.burn_in, self.n_iter
            )));
        }
        if self.thin == 0 {
            return Err(Error::InvalidConfig("thin must be positive".into()));
        }
        if !(self.adapt_target > 0.0 && self.adapt_target < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "adapt_target must lie in (0, 1), got {}",
                self.adapt_target
            )));
        }
        if let Some(s) = self.proposal {
            if s.as_array().iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
                return Err(Error::InvalidConfig(format!(
                    "proposal scales must be nonnegative, got {s:?}"
                )));
            }
        }
        if let Some(d) = self.censor_delta {
            if !(d.is_finite() && d > 0.0) {
                return Err(Error::InvalidConfig(format!(
                    "censor_delta must be positive, got {d}"
                )));
            }
        }
        Ok(())
    }

    /// Number of retained draws, `(n_iter - burn_in) / thin`.
    pub fn retained(&self) -> usize {
        (self.n_iter - self.burn_in) / self.thin
    }
}

/// Per-observation likelihood: exact density or interval mass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Likelihood {
    Exact,
    Censored { delta: f64 },
}

impl Likelihood {
    pub fn from_delta(delta: Option<f64>) -> Self {
        match delta {
            Some(delta) => Likelihood::Censored { delta },
            None => Likelihood::Exact,
        }
    }

    #[inline]
    fn term(&self, kernel: &Kernel, z: f64) -> f64 {
        match *self {
            Likelihood::Exact => kernel.logpdf(z),
            Likelihood::Censored { delta } => kernel.interval_logprob(z - delta, z + delta),
        }
    }

    fn log_likelihood(&self, theta: &GevParams, values: &[f64]) -> f64 {
        let kernel = Kernel::new(theta);
        let mut acc = 0.0;
        for &z in values {
            acc += self.term(&kernel, z);
            if acc == f64::NEG_INFINITY {
                break;
            }
        }
        acc
    }
}

/// Full sampler state. Allocations are zero-based slot indices.
#[derive(Debug, Clone, PartialEq)]
pub struct MixtureState {
    pub sticks: StickWeights,
    pub components: Vec<GevParams>,
    pub allocations: Vec<usize>,
    pub alpha: f64,
}

impl MixtureState {
    pub fn new(
        sticks: StickWeights,
        components: Vec<GevParams>,
        allocations: Vec<usize>,
        alpha: f64,
    ) -> Result<Self> {
        if sticks.len() != components.len() {
            return Err(Error::InvalidParams(format!(
                "{} sticks for {} components",
                sticks.len(),
                components.len()
            )));
        }
        if let Some(c) = allocations.iter().find(|&&c| c >= components.len()) {
            return Err(Error::InvalidParams(format!("allocation {c} out of range")));
        }
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::InvalidParams(format!(
                "alpha must be positive, got {alpha}"
            )));
        }
        Ok(Self {
            sticks,
            components,
            allocations,
            alpha,
        })
    }

    pub fn truncation(&self) -> usize {
        self.components.len()
    }

    /// `n_k`, the number of observations allocated to each slot.
    pub fn counts(&self) -> Vec<usize> {
        let mut n = vec![0; self.truncation()];
        for &c in &self.allocations {
            n[c] += 1;
        }
        n
    }

    pub fn occupied(&self) -> usize {
        self.counts().iter().filter(|&&n| n > 0).count()
    }

    pub fn mixture(&self) -> GevMixture {
        GevMixture::new(self.components.clone(), self.sticks.clone())
            .expect("state keeps components and sticks aligned")
    }
}

/// Unnormalized `log π_k + log g(z | θ_k)` (or the interval mass in censored
/// mode) for every slot.
pub fn allocation_log_terms(state: &MixtureState, z: f64, lik: Likelihood) -> Vec<f64> {
    state
        .sticks
        .log_weights()
        .iter()
        .zip(&state.components)
        .map(|(lw, th)| {
            if *lw == f64::NEG_INFINITY {
                f64::NEG_INFINITY
            } else {
                lw + lik.term(&Kernel::new(th), z)
            }
        })
        .collect()
}

/// Normalized allocation probabilities for one observation; `None` when no
/// slot supports it.
pub fn allocation_probabilities(state: &MixtureState, z: f64, lik: Likelihood) -> Option<Vec<f64>> {
    let terms = allocation_log_terms(state, z, lik);
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return None;
    }
    let w: Vec<f64> = terms.iter().map(|t| (t - max).exp()).collect();
    let total: f64 = w.iter().sum();
    Some(w.into_iter().map(|x| x / total).collect())
}

/// Resamples every allocation from its full conditional. Consumes exactly one
/// uniform per observation.
pub fn sample_allocations<R: Rng + ?Sized>(
    state: &mut MixtureState,
    data: &[f64],
    lik: Likelihood,
    rng: &mut R,
) -> Result<()> {
    let log_w = state.sticks.log_weights();
    let slots: Vec<(usize, f64, Kernel)> = log_w
        .iter()
        .zip(&state.components)
        .enumerate()
        .filter(|(_, (lw, _))| **lw > f64::NEG_INFINITY)
        .map(|(k, (lw, th))| (k, *lw, Kernel::new(th)))
        .collect();
    let mut terms = vec![0.0; slots.len()];
    for (i, &z) in data.iter().enumerate() {
        let mut max = f64::NEG_INFINITY;
        for (t, (_, lw, kernel)) in terms.iter_mut().zip(&slots) {
            *t = lw + lik.term(kernel, z);
            max = max.max(*t);
        }
        if max == f64::NEG_INFINITY {
            return Err(Error::UnsupportedObservation { index: i, value: z });
        }
        let mut total = 0.0;
        for t in terms.iter_mut() {
            *t = (*t - max).exp();
            total += *t;
        }
        let u: f64 = Open01.sample(rng);
        let target = u * total;
        let mut acc = 0.0;
        let mut pick = None;
        for (t, (k, _, _)) in terms.iter().zip(&slots) {
            if *t > 0.0 {
                acc += t;
                pick = Some(*k);
                if target < acc {
                    break;
                }
            }
        }
        state.allocations[i] = pick.expect("at least one term is positive");
    }
    Ok(())
}

/// `V_k ~ Beta(1 + n_k, α + Σ_{l>k} n_l)` for all but the last stick, which
/// stays at 1.
pub fn sample_sticks<R: Rng + ?Sized>(state: &mut MixtureState, rng: &mut R) {
    let counts = state.counts();
    let k_max = counts.len();
    let mut tail: usize = counts.iter().sum();
    let mut v = Vec::with_capacity(k_max);
    for &n_k in counts.iter().take(k_max - 1) {
        tail -= n_k;
        let beta = Beta::new(1.0 + n_k as f64, state.alpha + tail as f64)
            .expect("stick conditional parameters are positive");
        let draw: f64 = beta.sample(rng);
        v.push(draw.clamp(0.0, 1.0));
    }
    v.push(1.0);
    state.sticks = stick_to_weights(&v).expect("sticks lie in [0, 1]");
}

/// `α ~ Gamma(a + K - 1, b - Σ_{k<K} log(1 - V_k))`.
pub fn sample_alpha<R: Rng + ?Sized>(state: &mut MixtureState, priors: &PriorSpec, rng: &mut R) {
    let (shape, rate) = alpha_conditional(&state.sticks, priors);
    let gamma = Gamma::new(shape, 1.0 / rate).expect("alpha conditional parameters are positive");
    let draw: f64 = gamma.sample(rng);
    state.alpha = draw.max(f64::MIN_POSITIVE);
}

/// Shape and rate of the conditional of `α` given the sticks.
pub fn alpha_conditional(sticks: &StickWeights, priors: &PriorSpec) -> (f64, f64) {
    let v = sticks.sticks();
    let k_max = v.len();
    let log_rest: f64 = v[..k_max - 1]
        .iter()
        .map(|&vk| (-vk.min(STICK_CLAMP)).ln_1p())
        .sum();
    (
        priors.alpha_shape + (k_max - 1) as f64,
        priors.alpha_rate - log_rest,
    )
}

/// Metropolis bookkeeping.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct MhStats {
    pub proposed: u64,
    pub accepted: u64,
}

impl MhStats {
    pub fn rate(&self) -> f64 {
        if self.proposed == 0 {
            f64::NAN
        } else {
            self.accepted as f64 / self.proposed as f64
        }
    }

    fn add(&mut self, other: MhStats) {
        self.proposed += other.proposed;
        self.accepted += other.accepted;
    }
}

/// Samples needed before a slot switches to trace-based scales.
const TRACE_MIN: u64 = 200;
const OPTIMAL_RW: f64 = 1.374; // 2.38 / sqrt(3)

#[derive(Debug, Clone, Default)]
struct SlotAdaptation {
    log_mult: f64,
    steps: u64,
    n: u64,
    mean: [f64; 3],
    m2: [f64; 3],
    use_trace: bool,
}

/// Per-slot random-walk scales.
///
/// Each slot starts from the base scales. While adapting, a slot's running
/// variance of `(μ, log σ, ξ)` is tracked; after [`TRACE_MIN`] occupied
/// updates the scales switch to `2.38/√3` times the trace standard
/// deviations. A Robbins-Monro multiplier on top steers the acceptance rate
/// toward the target. Slots that empty out are reset.
#[derive(Debug, Clone)]
pub struct ComponentProposals {
    base: ProposalScales,
    target: f64,
    slots: Vec<SlotAdaptation>,
}

impl ComponentProposals {
    pub fn new(truncation: usize, base: ProposalScales, target: f64) -> Self {
        Self {
            base,
            target,
            slots: vec![SlotAdaptation::default(); truncation],
        }
    }

    /// Current proposal standard deviations for slot `k`.
    pub fn scales(&self, k: usize) -> [f64; 3] {
        let slot = &self.slots[k];
        let mult = slot.log_mult.exp();
        let base = self.base.as_array();
        let mut out = [0.0; 3];
        for j in 0..3 {
            let s = if slot.use_trace {
                let sd = (slot.m2[j] / (slot.n - 1) as f64).sqrt();
                OPTIMAL_RW * sd.max(0.01 * base[j])
            } else {
                base[j]
            };
            out[j] = s * mult;
        }
        out
    }

    fn reset(&mut self, k: usize) {
        self.slots[k] = SlotAdaptation::default();
    }

    fn record(&mut self, k: usize, accepted: bool, theta: &GevParams) {
        let target = self.target;
        let slot = &mut self.slots[k];
        slot.steps += 1;
        let gain = (slot.steps as f64).powf(-0.6);
        let hit = if accepted { 1.0 } else { 0.0 };
        slot.log_mult = (slot.log_mult + gain * (hit - target)).clamp(-12.0, 4.0);

        let x = [theta.mu(), theta.sigma().ln(), theta.xi()];
        slot.n += 1;
        for ((xj, mean), m2) in x.iter().zip(&mut slot.mean).zip(&mut slot.m2) {
            let d = xj - *mean;
            *mean += d / slot.n as f64;
            *m2 += d * (xj - *mean);
        }
        if !slot.use_trace && slot.n >= TRACE_MIN {
            slot.use_trace = true;
            slot.log_mult = 0.0;
            slot.steps = 0;
        }
    }
}

/// Updates every slot: one joint random-walk Metropolis step on
/// `(μ, log σ, ξ)` for occupied slots, a fresh base-measure draw for empty
/// ones.
pub fn sample_components<R: Rng + ?Sized>(
    state: &mut MixtureState,
    data: &[f64],
    lik: Likelihood,
    priors: &PriorSpec,
    proposals: &mut ComponentProposals,
    adapt: bool,
    rng: &mut R,
) -> MhStats {
    let k_max = state.truncation();
    let mut members: Vec<Vec<f64>> = vec![Vec::new(); k_max];
    for (&c, &z) in state.allocations.iter().zip(data) {
        members[c].push(z);
    }
    let mut stats = MhStats::default();
    for (k, values) in members.iter().enumerate() {
        if values.is_empty() {
            state.components[k] = priors.sample_component(rng);
            if adapt {
                proposals.reset(k);
            }
            continue;
        }
        let current = state.components[k];
        let scales = proposals.scales(k);
        let e0: f64 = rng.sample(StandardNormal);
        let e1: f64 = rng.sample(StandardNormal);
        let e2: f64 = rng.sample(StandardNormal);
        let u: f64 = Open01.sample(rng);
        let step_sigma = scales[1] * e1;
        let sigma = if step_sigma == 0.0 {
            current.sigma()
        } else {
            (current.sigma().ln() + step_sigma).exp()
        };
        let candidate = GevParams::new(
            current.mu() + scales[0] * e0,
            sigma,
            current.xi() + scales[2] * e2,
        );
        stats.proposed += 1;
        let accepted = match candidate {
            Ok(prop) => {
                let lp_prop = log_prior(&prop, priors);
                let prop_post = if lp_prop == f64::NEG_INFINITY {
                    f64::NEG_INFINITY
                } else {
                    lp_prop + lik.log_likelihood(&prop, values)
                };
                let cur_post = log_prior(&current, priors) + lik.log_likelihood(&current, values);
                let accept = prop_post > f64::NEG_INFINITY
                    && (cur_post == f64::NEG_INFINITY || u.ln() < prop_post - cur_post);
                if accept {
                    state.components[k] = prop;
                }
                accept
            }
            Err(_) => false,
        };
        if accepted {
            stats.accepted += 1;
        }
        if adapt {
            proposals.record(k, accepted, &state.components[k]);
        }
    }
    stats
}

/// Redraws the heaviest empty slot from the prior until it supports `z`.
fn repair_support<R: Rng + ?Sized>(
    state: &mut MixtureState,
    index: usize,
    z: f64,
    lik: Likelihood,
    priors: &PriorSpec,
    rng: &mut R,
) -> Result<()> {
    let counts = state.counts();
    let log_w = state.sticks.log_weights();
    let slot = (0..state.truncation())
        .filter(|&k| counts[k] == 0 && log_w[k] > f64::NEG_INFINITY)
        .max_by(|&a, &b| log_w[a].total_cmp(&log_w[b]));
    let Some(slot) = slot else {
        return Err(Error::UnsupportedObservation { index, value: z });
    };
    for _ in 0..REPAIR_TRIES {
        let th = priors.sample_component(rng);
        if lik.term(&Kernel::new(&th), z) > f64::NEG_INFINITY {
            state.components[slot] = th;
            return Ok(());
        }
    }
    Err(Error::UnsupportedObservation { index, value: z })
}

/// One blocked Gibbs sweep: allocations, sticks, components, `α`.
pub fn gibbs_sweep<R: Rng + ?Sized>(
    state: &mut MixtureState,
    data: &[f64],
    lik: Likelihood,
    priors: &PriorSpec,
    proposals: &mut ComponentProposals,
    adapt: bool,
    rng: &mut R,
) -> Result<MhStats> {
    let mut repairs = 0;
    loop {
        match sample_allocations(state, data, lik, rng) {
            Ok(()) => break,
            Err(Error::UnsupportedObservation { index, value }) if repairs < data.len() => {
                repair_support(state, index, value, lik, priors, rng)?;
                repairs += 1;
            }
            Err(e) => return Err(e),
        }
    }
    sample_sticks(state, rng);
    let stats = sample_components(state, data, lik, priors, proposals, adapt, rng);
    sample_alpha(state, priors, rng);
    Ok(stats)
}

/// Starting state: the data are split by rank into `min(K, 5)` bins, each
/// seeding one component (median, half the IQR, `ξ = 0.1`); the remaining
/// slots are prior draws; sticks and `α` sit at their prior means.
pub fn initial_state<R: Rng + ?Sized>(
    data: &[f64],
    lik: Likelihood,
    priors: &PriorSpec,
    truncation: usize,
    rng: &mut R,
) -> Result<MixtureState> {
    let m = data.len();
    if m == 0 {
        return Err(Error::InvalidData("no observations".into()));
    }
    let clusters = truncation.min(5).min(m);
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| data[a].total_cmp(&data[b]).then(a.cmp(&b)));
    let mut allocations = vec![0; m];
    let mut bins: Vec<Vec<f64>> = vec![Vec::new(); clusters];
    for (rank, &i) in order.iter().enumerate() {
        let c = rank * clusters / m;
        allocations[i] = c;
        bins[c].push(data[i]);
    }
    let slack = match lik {
        Likelihood::Exact => 0.0,
        Likelihood::Censored { delta } => delta,
    };
    let mut components = Vec::with_capacity(truncation);
    for bin in &bins {
        let mu = quantile_sorted(bin, 0.5);
        let iqr = quantile_sorted(bin, 0.75) - quantile_sorted(bin, 0.25);
        let xi = 0.1;
        // keep the lower support end below the bin minimum
        let spread = mu - bin[0] + slack;
        let sigma = (0.5 * iqr).max(1e-3).max(0.2 * spread + 1e-3);
        components.push(GevParams::new(mu, sigma, xi)?);
    }
    while components.len() < truncation {
        components.push(priors.sample_component(rng));
    }
    let alpha = priors.alpha_shape / priors.alpha_rate;
    let v = vec![1.0 / (1.0 + alpha); truncation];
    let sticks = stick_to_weights(&v)?;
    MixtureState::new(sticks, components, allocations, alpha)
}

/// One retained draw: the mixture, the slot counts and `α`.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub iteration: usize,
    pub mixture: GevMixture,
    pub counts: Vec<usize>,
    pub alpha: f64,
}

impl Snapshot {
    pub fn from_state(iteration: usize, state: &MixtureState) -> Self {
        Self {
            iteration,
            mixture: state.mixture(),
            counts: state.counts(),
            alpha: state.alpha,
        }
    }

    pub fn occupied(&self) -> usize {
        self.counts.iter().filter(|&&n| n > 0).count()
    }
}

/// Acceptance of the component Metropolis block, split by phase.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct AcceptanceStats {
    pub burn_in: MhStats,
    pub sampling: MhStats,
}

/// Retained post-burn-in draws of a chain.
#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorDraws {
    pub draws: Vec<Snapshot>,
    pub acceptance: AcceptanceStats,
    pub n_iter: usize,
    pub burn_in: usize,
    pub thin: usize,
}

impl PosteriorDraws {
    pub fn len(&self) -> usize {
        self.draws.len()
    }

    pub fn is_empty(&self) -> bool {
        self.draws.is_empty()
    }
}

/// Runs a chain of `config.n_iter` sweeps on `series`, keeping every
/// `thin`-th post-burn-in state.
pub fn run_chain<R: Rng + ?Sized>(
    series: &BlockMaximaSeries,
    priors: &PriorSpec,
    config: &ChainConfig,
    rng: &mut R,
) -> Result<PosteriorDraws> {
    config.validate()?;
    priors.validate()?;
    let data = series.values();
    if let Some((i, v)) = data.iter().enumerate().find(|(_, v)| !v.is_finite()) {
        return Err(Error::InvalidData(format!("value {i} is not finite ({v})")));
    }
    let lik = Likelihood::from_delta(config.censor_delta.or(series.censor_delta()));
    let base = config
        .proposal
        .unwrap_or_else(|| ProposalScales::from_data(data));
    let mut proposals = ComponentProposals::new(config.truncation, base, config.adapt_target);
    let mut state = initial_state(data, lik, priors, config.truncation, rng)?;

    let mut draws = Vec::with_capacity(config.retained());
    let mut acceptance = AcceptanceStats::default();
    for it in 0..config.n_iter {
        let burning = it < config.burn_in;
        let stats = gibbs_sweep(
            &mut state,
            data,
            lik,
            priors,
            &mut proposals,
            config.adapt && burning,
            rng,
        )?;
        if burning {
            acceptance.burn_in.add(stats);
        } else {
            acceptance.sampling.add(stats);
            if (it + 1 - config.burn_in).is_multiple_of(config.thin) {
                draws.push(Snapshot::from_state(it + 1, &state));
            }
        }
    }
    Ok(PosteriorDraws {
        draws,
        acceptance,
        n_iter: config.n_iter,
        burn_in: config.burn_in,
        thin: config.thin,
    })
}

/// [`run_chain`] on a fresh stream seeded from `config.seed`.
pub fn fit(
    series: &BlockMaximaSeries,
    priors: &PriorSpec,
    config: &ChainConfig,
) -> Result<PosteriorDraws> {
    let mut rng = chain_rng(config.seed);
    run_chain(series, priors, config, &mut rng)
}

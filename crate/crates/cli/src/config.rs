//! Chain and prior settings from a flat `key = value` file.
//!
//! Every key is optional; unset keys keep the library defaults. Command-line
//! flags and `--set key=value` pairs are applied on top of the file.

use std::path::Path;

use hetgev::sampler::ProposalScales;
use hetgev::{ChainConfig, PriorSpec};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub truncation: Option<usize>,
    pub n_iter: Option<usize>,
    pub burn_in: Option<usize>,
    pub thin: Option<usize>,
    pub adapt: Option<bool>,
    pub adapt_target: Option<f64>,
    pub seed: Option<u64>,
    pub censor_delta: Option<f64>,
    pub proposal_mu: Option<f64>,
    pub proposal_log_sigma: Option<f64>,
    pub proposal_xi: Option<f64>,
    pub mu_mean: Option<f64>,
    pub mu_var: Option<f64>,
    pub logscale_mean: Option<f64>,
    pub logscale_var: Option<f64>,
    pub shape_mean: Option<f64>,
    pub shape_var: Option<f64>,
    pub alpha_shape: Option<f64>,
    pub alpha_rate: Option<f64>,
}

fn parse(text: &str, origin: &str) -> CliResult<FileConfig> {
    toml::from_str(text).map_err(|e| CliError::Usage(format!("{origin}: {}", e.message())))
}

impl FileConfig {
    pub fn parse_str(text: &str) -> CliResult<Self> {
        parse(text, "config")
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        parse(&text, &path.display().to_string())
    }

    /// Later values win.
    pub fn merge(self, over: FileConfig) -> FileConfig {
        macro_rules! pick {
            ($($f:ident),*) => { FileConfig { $($f: over.$f.or(self.$f)),* } };
        }
        pick!(
            truncation,
            n_iter,
            burn_in,
            thin,
            adapt,
            adapt_target,
            seed,
            censor_delta,
            proposal_mu,
            proposal_log_sigma,
            proposal_xi,
            mu_mean,
            mu_var,
            logscale_mean,
            logscale_var,
            shape_mean,
            shape_var,
            alpha_shape,
            alpha_rate
        )
    }

    /// Applies `key=value` overrides.
    pub fn with_overrides(self, pairs: &[String]) -> CliResult<FileConfig> {
        let mut text = String::new();
        for pair in pairs {
            let Some((k, v)) = pair.split_once('=') else {
                return Err(CliError::Usage(format!(
                    "--set expects key=value, got '{pair}'"
                )));
            };
            text.push_str(&format!("{} = {}\n", k.trim(), v.trim()));
        }
        Ok(self.merge(parse(&text, "--set")?))
    }

    /// Chain settings. With `n_iter` but no `burn_in`, half the run is
    /// burn-in.
    pub fn chain_config(&self) -> CliResult<ChainConfig> {
        let base = match self.n_iter {
            Some(n) => ChainConfig::with_iterations(n),
            None => ChainConfig::default(),
        };
        let proposal = match (self.proposal_mu, self.proposal_log_sigma, self.proposal_xi) {
            (None, None, None) => None,
            (Some(mu), Some(log_sigma), Some(xi)) => Some(ProposalScales { mu, log_sigma, xi }),
            _ => {
                return Err(CliError::Usage(
                    "proposal_mu, proposal_log_sigma and proposal_xi must be set together".into(),
                ))
            }
        };
        let config = ChainConfig {
            truncation: self.truncation.unwrap_or(base.truncation),
            n_iter: base.n_iter,
            burn_in: self.burn_in.unwrap_or(base.burn_in),
            thin: self.thin.unwrap_or(base.thin),
            proposal,
            adapt: self.adapt.unwrap_or(base.adapt),
            adapt_target: self.adapt_target.unwrap_or(base.adapt_target),
            seed: self.seed.unwrap_or(base.seed),
            censor_delta: self.censor_delta,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn priors(&self) -> CliResult<PriorSpec> {
        let d = PriorSpec::default();
        let p = PriorSpec {
            mu_mean: self.mu_mean.unwrap_or(d.mu_mean),
            mu_var: self.mu_var.unwrap_or(d.mu_var),
            logscale_mean: self.logscale_mean.unwrap_or(d.logscale_mean),
            logscale_var: self.logscale_var.unwrap_or(d.logscale_var),
            shape_mean: self.shape_mean.unwrap_or(d.shape_mean),
            shape_var: self.shape_var.unwrap_or(d.shape_var),
            alpha_shape: self.alpha_shape.unwrap_or(d.alpha_shape),
            alpha_rate: self.alpha_rate.unwrap_or(d.alpha_rate),
        };
        p.validate()?;
        Ok(p)
    }

    /// Fully specified record of `config` and `priors`.
    pub fn resolved(config: &ChainConfig, priors: &PriorSpec) -> FileConfig {
        FileConfig {
            truncation: Some(config.truncation),
            n_iter: Some(config.n_iter),
            burn_in: Some(config.burn_in),
            thin: Some(config.thin),
            adapt: Some(config.adapt),
            adapt_target: Some(config.adapt_target),
            seed: Some(config.seed),
            censor_delta: config.censor_delta,
            proposal_mu: config.proposal.map(|p| p.mu),
            proposal_log_sigma: config.proposal.map(|p| p.log_sigma),
            proposal_xi: config.proposal.map(|p| p.xi),
            mu_mean: Some(priors.mu_mean),
            mu_var: Some(priors.mu_var),
            logscale_mean: Some(priors.logscale_mean),
            logscale_var: Some(priors.logscale_var),
            shape_mean: Some(priors.shape_mean),
            shape_var: Some(priors.shape_var),
            alpha_shape: Some(priors.alpha_shape),
            alpha_rate: Some(priors.alpha_rate),
        }
    }
}

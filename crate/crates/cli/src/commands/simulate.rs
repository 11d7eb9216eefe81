use std::path::{Path, PathBuf};

use clap::Args;
use hetgev::mixture::mixture_quantile;
use hetgev::rng::chain_rng;
use hetgev::simdata::{
    gen_exponential_block_maxima, gen_scenario, ScenarioComponent, ScenarioSpec, ScenarioTag,
    DEFAULT_SAMPLE_SIZE,
};
use hetgev::{BlockMaximaSeries, GevMixture, GevParams};
use serde::Serialize;

use crate::error::{CliError, CliResult};
use crate::manifest::{TOOL, VERSION};
use crate::output::{num, write_json, Table};

/// Truth quantile levels recorded alongside every dataset.
const TRUTH_LEVELS: [f64; 4] = [0.5, 0.9, 0.95, 0.99];

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    /// A, B, C or exp-blocks.
    #[arg(long)]
    pub scenario: String,
    /// Number of block maxima.
    #[arg(long, default_value_t = DEFAULT_SAMPLE_SIZE)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output CSV with columns `value,group`.
    #[arg(long)]
    pub out: PathBuf,
    /// Truth record; defaults to `<out>.truth.json`.
    #[arg(long)]
    pub truth: Option<PathBuf>,
    /// Block size for exp-blocks.
    #[arg(long, default_value_t = 1000)]
    pub block_size: usize,
    /// Exponential rates for exp-blocks.
    #[arg(long, value_delimiter = ',', default_values_t = [1.0, 2.0])]
    pub rates: Vec<f64>,
    /// Group weights for exp-blocks.
    #[arg(long, value_delimiter = ',', default_values_t = [0.5, 0.5])]
    pub weights: Vec<f64>,
}

#[derive(Debug, Serialize)]
#[serde(tag = "family", rename_all = "snake_case")]
enum ComponentRecord {
    Gev {
        weight: f64,
        mu: f64,
        sigma: f64,
        xi: f64,
    },
    Normal {
        weight: f64,
        mean: f64,
        sd: f64,
    },
    StudentT {
        weight: f64,
        df: f64,
    },
}

fn gev_record(weight: f64, p: &GevParams) -> ComponentRecord {
    ComponentRecord::Gev {
        weight,
        mu: p.mu(),
        sigma: p.sigma(),
        xi: p.xi(),
    }
}

#[derive(Debug, Serialize)]
struct TruthQuantile {
    p: f64,
    quantile: f64,
}

#[derive(Debug, Serialize)]
struct TruthRecord {
    tool: &'static str,
    version: &'static str,
    command: &'static str,
    scenario: String,
    n: usize,
    seed: u64,
    /// Exact for A, B and C; the large-block limit for exp-blocks.
    truth: &'static str,
    components: Vec<ComponentRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    block_size: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    rates: Option<Vec<f64>>,
    quantiles: Vec<TruthQuantile>,
}

/// Gumbel limits `Gumbel(ln n / λ, 1 / λ)` of exponential block maxima.
fn exponential_limit(block_size: usize, rates: &[f64], weights: &[f64]) -> CliResult<GevMixture> {
    let ln_n = (block_size as f64).ln();
    let comps = rates
        .iter()
        .map(|&r| GevParams::new(ln_n / r, 1.0 / r, 0.0))
        .collect::<hetgev::Result<Vec<_>>>()?;
    Ok(GevMixture::from_weights(comps, weights)?)
}

fn write_dataset(path: &Path, series: &BlockMaximaSeries) -> CliResult<()> {
    let mut table = Table::new(&["value", "group"])?;
    let labels = series.labels();
    for (i, v) in series.values().iter().enumerate() {
        let group = labels.map_or("", |l| l[i].as_str());
        table.row([num(*v), group.to_string()])?;
    }
    table.write_to(path)
}

fn default_truth_path(out: &Path) -> PathBuf {
    let mut name = out
        .file_name()
        .map(|n| n.to_os_string())
        .unwrap_or_default();
    name.push(".truth.json");
    out.with_file_name(name)
}

pub fn run(args: &SimulateArgs) -> CliResult<()> {
    if args.n == 0 {
        return Err(CliError::Usage("--n must be positive".into()));
    }
    let mut rng = chain_rng(args.seed);
    let (series, components, quantiles, truth_kind, exp_info) = if args.scenario == "exp-blocks" {
        if args.rates.len() != args.weights.len() {
            return Err(CliError::Usage(format!(
                "{} rates but {} weights",
                args.rates.len(),
                args.weights.len()
            )));
        }
        let series = gen_exponential_block_maxima(
            args.n,
            args.block_size,
            &args.rates,
            &args.weights,
            &mut rng,
        )?;
        let limit = exponential_limit(args.block_size, &args.rates, &args.weights)?;
        let components = limit
            .components()
            .iter()
            .zip(limit.weights())
            .map(|(p, &w)| gev_record(w, p))
            .collect();
        let quantiles = TRUTH_LEVELS
            .iter()
            .map(|&p| {
                Ok(TruthQuantile {
                    p,
                    quantile: mixture_quantile(p, &limit)?,
                })
            })
            .collect::<CliResult<Vec<_>>>()?;
        (
            series,
            components,
            quantiles,
            "limit",
            Some((args.block_size, args.rates.clone())),
        )
    } else {
        let tag: ScenarioTag = args.scenario.parse().map_err(|_| {
            CliError::Usage(format!(
                "scenario must be A, B, C or exp-blocks, got '{}'",
                args.scenario
            ))
        })?;
        let spec = ScenarioSpec::from_tag(tag, args.n);
        let series = gen_scenario(&spec, &mut rng)?;
        let components = spec
            .components
            .iter()
            .map(|(w, c)| match *c {
                ScenarioComponent::Gev(p) => gev_record(*w, &p),
                ScenarioComponent::Normal { mean, sd } => ComponentRecord::Normal {
                    weight: *w,
                    mean,
                    sd,
                },
                ScenarioComponent::StudentT { df } => ComponentRecord::StudentT { weight: *w, df },
            })
            .collect();
        let quantiles = TRUTH_LEVELS
            .iter()
            .map(|&p| {
                Ok(TruthQuantile {
                    p,
                    quantile: spec.quantile(p)?,
                })
            })
            .collect::<CliResult<Vec<_>>>()?;
        (series, components, quantiles, "exact", None)
    };

    write_dataset(&args.out, &series)?;
    let truth_path = args
        .truth
        .clone()
        .unwrap_or_else(|| default_truth_path(&args.out));
    let (block_size, rates) = exp_info.unzip();
    let record = TruthRecord {
        tool: TOOL,
        version: VERSION,
        command: "simulate",
        scenario: args.scenario.clone(),
        n: args.n,
        seed: args.seed,
        truth: truth_kind,
        components,
        block_size,
        rates,
        quantiles,
    };
    write_json(&truth_path, &record)?;
    println!(
        "wrote {} maxima to {} (truth: {})",
        series.len(),
        args.out.display(),
        truth_path.display()
    );
    Ok(())
}

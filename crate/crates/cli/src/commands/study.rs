use std::path::PathBuf;

use clap::Args;
use hetgev::rng::derive_seed;
use hetgev::simdata::{monte_carlo_study, ScenarioSpec, ScenarioTag, StudyConfig, StudyResult};
use serde::Serialize;

use super::probability;
use crate::cli::ChainFlags;
use crate::config::FileConfig;
use crate::error::{CliError, CliResult};
use crate::manifest::{TOOL, VERSION};
use crate::output::{ensure_dir, num, write_json, Table, MANIFEST_FILE};

#[derive(Debug, Clone, Args)]
pub struct StudyArgs {
    /// A, B or C.
    #[arg(long)]
    pub scenario: ScenarioTag,
    #[arg(long, default_value_t = 20)]
    pub replicates: usize,
    /// Sample sizes; one study per size.
    #[arg(long, value_delimiter = ',', default_values_t = [250, 500, 1000])]
    pub sample_size: Vec<usize>,
    /// Master seed; replicate `r` uses a seed derived from it.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads; results do not depend on this.
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
    #[command(flatten)]
    pub chain: ChainFlags,
    /// Points of the density grid used for the integrated squared error.
    #[arg(long, default_value_t = 512)]
    pub grid_points: usize,
    /// Draws per replicate used for density and quantile summaries; 0 uses all.
    #[arg(long, default_value_t = 250)]
    pub subsample: usize,
    #[arg(long, default_value_t = 0.95)]
    pub level: f64,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Serialize)]
struct SizeSummary {
    sample_size: usize,
    replicates: usize,
    truth_q95: f64,
    truth_q99: f64,
    mise: f64,
    median_ise: f64,
    coverage_q95: f64,
    coverage_q99: f64,
    /// Replicates whose bands contain both truth quantiles.
    coverage_both: f64,
}

#[derive(Debug, Serialize)]
struct ReplicateSeed {
    replicate: usize,
    seed: u64,
}

#[derive(Debug, Serialize)]
struct StudyManifest {
    tool: &'static str,
    version: &'static str,
    command: &'static str,
    scenario: String,
    master_seed: u64,
    replicates: usize,
    sample_sizes: Vec<usize>,
    grid_points: usize,
    subsample: usize,
    level: f64,
    /// The per-replicate seeds override `config.seed`.
    config: FileConfig,
    replicate_seeds: Vec<ReplicateSeed>,
}

fn summarize(size: usize, r: &StudyResult) -> SizeSummary {
    let mut ise: Vec<f64> = r.replicates.iter().map(|x| x.ise).collect();
    ise.sort_by(f64::total_cmp);
    let mid = ise.len() / 2;
    let median_ise = if ise.len() % 2 == 1 {
        ise[mid]
    } else {
        0.5 * (ise[mid - 1] + ise[mid])
    };
    let both = r
        .replicates
        .iter()
        .filter(|x| x.q95.covers(r.truth_q95) && x.q99.covers(r.truth_q99))
        .count();
    SizeSummary {
        sample_size: size,
        replicates: r.replicates.len(),
        truth_q95: r.truth_q95,
        truth_q99: r.truth_q99,
        mise: r.mean_ise(),
        median_ise,
        coverage_q95: r.coverage_q95(),
        coverage_q99: r.coverage_q99(),
        coverage_both: both as f64 / r.replicates.len() as f64,
    }
}

pub fn run(args: &StudyArgs) -> CliResult<()> {
    probability("--level", args.level)?;
    if args.replicates == 0 {
        return Err(CliError::Usage("--replicates must be positive".into()));
    }
    if args.sample_size.contains(&0) {
        return Err(CliError::Usage("sample sizes must be positive".into()));
    }
    let file_config = args.chain.file_config(None, None)?;
    let chain = file_config.chain_config()?;
    let priors = file_config.priors()?;

    let mut replicate_rows = Table::new(&[
        "sample_size",
        "replicate",
        "seed",
        "ise",
        "q95_median",
        "q95_lower",
        "q95_upper",
        "q99_median",
        "q99_lower",
        "q99_upper",
        "acceptance",
    ])?;
    let mut occupancy_rows = Table::new(&["sample_size", "replicate", "occupied", "fraction"])?;
    let mut summaries = Vec::new();
    for &size in &args.sample_size {
        let spec = ScenarioSpec::from_tag(args.scenario, size);
        let config = StudyConfig {
            replicates: args.replicates,
            chain: chain.clone(),
            priors,
            master_seed: args.seed,
            workers: args.workers,
            grid_points: args.grid_points,
            subsample: args.subsample,
            level: args.level,
        };
        let result = monte_carlo_study(&spec, &config)?;
        for r in &result.replicates {
            replicate_rows.row([
                size.to_string(),
                r.replicate.to_string(),
                r.seed.to_string(),
                num(r.ise),
                num(r.q95.median),
                num(r.q95.lower),
                num(r.q95.upper),
                num(r.q99.median),
                num(r.q99.lower),
                num(r.q99.upper),
                num(r.acceptance),
            ])?;
            for (k, f) in &r.occupancy {
                occupancy_rows.row([
                    size.to_string(),
                    r.replicate.to_string(),
                    k.to_string(),
                    num(*f),
                ])?;
            }
        }
        let s = summarize(size, &result);
        println!(
            "scenario {} n={}: MISE {:.4e}, coverage q95 {:.2}, q99 {:.2}",
            args.scenario, size, s.mise, s.coverage_q95, s.coverage_q99
        );
        summaries.push(s);
    }

    ensure_dir(&args.out_dir)?;
    replicate_rows.write_to(&args.out_dir.join("replicates.csv"))?;
    occupancy_rows.write_to(&args.out_dir.join("occupancy.csv"))?;
    write_json(&args.out_dir.join("summary.json"), &summaries)?;
    let manifest = StudyManifest {
        tool: TOOL,
        version: VERSION,
        command: "study",
        scenario: args.scenario.to_string(),
        master_seed: args.seed,
        replicates: args.replicates,
        sample_sizes: args.sample_size.clone(),
        grid_points: args.grid_points,
        subsample: args.subsample,
        level: args.level,
        config: FileConfig::resolved(&chain, &priors),
        replicate_seeds: (0..args.replicates)
            .map(|r| ReplicateSeed {
                replicate: r,
                seed: derive_seed(args.seed, r as u64),
            })
            .collect(),
    };
    write_json(&args.out_dir.join(MANIFEST_FILE), &manifest)
}

use std::path::{Path, PathBuf};

use clap::Args;
use hetgev::diagnostics::modal_occupied;
use hetgev::{fit as run_fit, BlockMaximaSeries};

use crate::cli::ChainFlags;
use crate::config::FileConfig;
use crate::error::{CliError, CliResult};
use crate::ingest::{
    ingest_csv, maxima_to_series, read_maxima_file, CsvSchema, IngestMode, DEFAULT_MISSING,
};
use crate::manifest::{Acceptance, DataInfo, DrawsInfo, FitManifest, SeasonalInfo, TOOL, VERSION};
use crate::output::{
    atomic_write, draw_log_bytes, ensure_dir, num, read_json, Table, BLOCKS_FILE, DATA_FILE,
    DRAWS_FILE, MANIFEST_FILE,
};
use crate::seasons::{blocks_to_series, seasonal_block_maxima, SeasonBlock, WinterGrouping};

#[derive(Debug, Clone, Args)]
pub struct FitArgs {
    /// Input CSV: `value[,group]` maxima, or a daily series with --seasonal.
    #[arg(long, required_unless_present = "replay")]
    pub data: Option<PathBuf>,
    /// Treat the input as a daily series and fit its seasonal maxima.
    #[arg(long)]
    pub seasonal: bool,
    #[arg(long, default_value = "date")]
    pub date_column: String,
    #[arg(long, default_value = "value")]
    pub value_column: String,
    #[arg(long, default_value = DEFAULT_MISSING)]
    pub missing_token: String,
    /// Skip malformed rows instead of failing.
    #[arg(long)]
    pub permissive: bool,
    /// Drop seasonal blocks with fewer non-missing days.
    #[arg(long, requires = "seasonal")]
    pub min_days: Option<u32>,
    /// Winter grouping: `december` (December opens the next winter) or
    /// `calendar`.
    #[arg(long, default_value_t = WinterGrouping::December, requires = "seasonal")]
    pub winter: WinterGrouping,
    /// Rounding half-width: each value stands for `(z - δ, z + δ]`.
    #[arg(long)]
    pub censor_delta: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub chain: ChainFlags,
    /// Run directory for the draw log, data copy and manifest.
    #[arg(long)]
    pub out_dir: PathBuf,
    /// Re-run a previous fit from its manifest.
    #[arg(
        long,
        value_name = "MANIFEST",
        conflicts_with_all = [
            "data", "seasonal", "censor_delta", "seed", "config", "set",
            "iterations", "burn_in", "thin", "truncation", "no_adapt",
        ]
    )]
    pub replay: Option<PathBuf>,
}

struct Prepared {
    series: BlockMaximaSeries,
    info: DataInfo,
    blocks: Option<Vec<SeasonBlock>>,
}

fn mode(permissive: bool) -> IngestMode {
    if permissive {
        IngestMode::Permissive
    } else {
        IngestMode::Strict
    }
}

fn load_data(args: &FitArgs, path: &Path) -> CliResult<Prepared> {
    let ingest_mode = mode(args.permissive);
    if args.seasonal {
        let schema = CsvSchema {
            date_column: args.date_column.clone(),
            value_column: args.value_column.clone(),
            missing_token: args.missing_token.clone(),
        };
        let daily = ingest_csv(path, &schema, ingest_mode)?;
        let blocks = seasonal_block_maxima(&daily.records, args.winter, args.min_days)?;
        if blocks.is_empty() {
            return Err(CliError::Data(
                "no seasonal block has enough non-missing days".into(),
            ));
        }
        let series = blocks_to_series(&blocks)?;
        let info = DataInfo {
            source: path.display().to_string(),
            mode: "seasonal".into(),
            file: DATA_FILE.into(),
            observations: series.len(),
            malformed_rows: daily.malformed.len(),
            seasonal: Some(SeasonalInfo {
                winter: args.winter.to_string(),
                min_days: args.min_days,
                daily_records: daily.records.len(),
                missing_days: daily.records.iter().filter(|r| r.value.is_none()).count(),
                partial_blocks: blocks.iter().filter(|b| b.partial()).count(),
                blocks_file: BLOCKS_FILE.into(),
            }),
        };
        Ok(Prepared {
            series,
            info,
            blocks: Some(blocks),
        })
    } else {
        let rows = read_maxima_file(path, &args.missing_token, ingest_mode)?;
        let series = maxima_to_series(&rows.records)?;
        let info = DataInfo {
            source: path.display().to_string(),
            mode: "maxima".into(),
            file: DATA_FILE.into(),
            observations: series.len(),
            malformed_rows: rows.malformed.len(),
            seasonal: None,
        };
        Ok(Prepared {
            series,
            info,
            blocks: None,
        })
    }
}

fn series_bytes(series: &BlockMaximaSeries) -> CliResult<Vec<u8>> {
    let labels = series.labels();
    let mut table = Table::new(if labels.is_some() {
        &["value", "group"][..]
    } else {
        &["value"][..]
    })?;
    for (i, v) in series.values().iter().enumerate() {
        match labels {
            Some(l) => table.row([num(*v), l[i].clone()])?,
            None => table.row([num(*v)])?,
        }
    }
    table.into_bytes()
}

fn blocks_bytes(blocks: &[SeasonBlock]) -> CliResult<Vec<u8>> {
    let mut table = Table::new(&[
        "year",
        "season",
        "maximum",
        "count",
        "calendar_days",
        "partial",
    ])?;
    for b in blocks {
        table.row([
            b.year_key.to_string(),
            b.season.to_string(),
            num(b.maximum),
            b.count.to_string(),
            b.calendar_days.to_string(),
            b.partial().to_string(),
        ])?;
    }
    table.into_bytes()
}

fn replay_inputs(manifest_path: &Path) -> CliResult<(Prepared, FileConfig)> {
    let manifest: FitManifest = read_json(manifest_path)?;
    let run_dir = manifest_path.parent().unwrap_or(Path::new("."));
    let data_path = run_dir.join(&manifest.data.file);
    let rows = read_maxima_file(&data_path, DEFAULT_MISSING, IngestMode::Strict)?;
    let series = maxima_to_series(&rows.records)?;
    if series.len() != manifest.data.observations {
        return Err(CliError::Data(format!(
            "{} holds {} maxima, manifest records {}",
            data_path.display(),
            series.len(),
            manifest.data.observations
        )));
    }
    let info = DataInfo {
        source: data_path.display().to_string(),
        ..manifest.data
    };
    Ok((
        Prepared {
            series,
            info,
            blocks: None,
        },
        manifest.config,
    ))
}

pub fn run(args: &FitArgs) -> CliResult<()> {
    let (prepared, file_config) = match &args.replay {
        Some(manifest) => replay_inputs(manifest)?,
        None => {
            let path = args
                .data
                .as_deref()
                .expect("clap requires --data without --replay");
            let config = args.chain.file_config(args.seed, args.censor_delta)?;
            (load_data(args, path)?, config)
        }
    };
    let chain = file_config.chain_config()?;
    let priors = file_config.priors()?;
    let draws = run_fit(&prepared.series, &priors, &chain)?;

    ensure_dir(&args.out_dir)?;
    atomic_write(
        &args.out_dir.join(DRAWS_FILE),
        &draw_log_bytes(&draws.draws)?,
    )?;
    atomic_write(
        &args.out_dir.join(DATA_FILE),
        &series_bytes(&prepared.series)?,
    )?;
    if let Some(blocks) = &prepared.blocks {
        atomic_write(&args.out_dir.join(BLOCKS_FILE), &blocks_bytes(blocks)?)?;
    }
    let manifest = FitManifest {
        tool: TOOL.into(),
        version: VERSION.into(),
        command: "fit".into(),
        seed: chain.seed,
        data: prepared.info,
        config: FileConfig::resolved(&chain, &priors),
        acceptance: Acceptance {
            burn_in: draws.acceptance.burn_in.into(),
            sampling: draws.acceptance.sampling.into(),
        },
        draws: DrawsInfo {
            file: DRAWS_FILE.into(),
            retained: draws.len(),
            n_iter: draws.n_iter,
            burn_in: draws.burn_in,
            thin: draws.thin,
        },
    };
    crate::output::write_json(&args.out_dir.join(MANIFEST_FILE), &manifest)?;
    let modal = modal_occupied(&draws.draws).map_or("-".to_string(), |k| k.to_string());
    println!(
        "fitted {} maxima: {} draws retained, acceptance {:.3}, modal occupied components {}",
        prepared.series.len(),
        draws.len(),
        draws.acceptance.sampling.rate(),
        modal
    );
    Ok(())
}

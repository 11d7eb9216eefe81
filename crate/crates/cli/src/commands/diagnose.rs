use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::Args;
use hetgev::diagnostics::{
    default_grid, ks_distance, linspace, modal_occupied, occupancy_distribution, posterior_curves,
    posterior_median_cdf, qq_pairs, residuals_from_values, return_levels, DEFAULT_GRID_POINTS,
    DEFAULT_LEVEL, DEFAULT_RETURN_SUBSAMPLE,
};
use hetgev::special::normal_cdf;
use serde::Serialize;

use super::probability;
use crate::error::{CliError, CliResult};
use crate::ingest::{maxima_to_series, read_maxima_file, IngestMode, DEFAULT_MISSING};
use crate::manifest::{Acceptance, FitManifest, TOOL, VERSION};
use crate::output::{
    ensure_dir, num, read_draw_file, read_json, write_columns, write_json, Table, MANIFEST_FILE,
};

/// Exceedance probabilities used when `--p-grid` is not given.
const DEFAULT_P_GRID: [f64; 11] = [
    0.5, 0.4, 0.3, 0.2, 0.1, 0.05, 0.02, 0.01, 0.005, 0.002, 0.001,
];

/// Draws used for curves and residuals when `--subsample` is not given.
const DEFAULT_CURVE_SUBSAMPLE: usize = 500;

#[derive(Debug, Clone, Args)]
pub struct DiagnoseArgs {
    /// Run directory written by `fit`.
    #[arg(long)]
    pub run: PathBuf,
    /// Output directory; defaults to the run directory.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_GRID_POINTS)]
    pub grid_points: usize,
    #[arg(long)]
    pub grid_min: Option<f64>,
    #[arg(long)]
    pub grid_max: Option<f64>,
    /// Exceedance probabilities for return levels.
    #[arg(long, value_delimiter = ',')]
    pub p_grid: Vec<f64>,
    /// Credible level of the pointwise bands.
    #[arg(long, default_value_t = DEFAULT_LEVEL)]
    pub level: f64,
    /// Draws used for curves and residuals; 0 uses all.
    #[arg(long, default_value_t = DEFAULT_CURVE_SUBSAMPLE)]
    pub subsample: usize,
    /// Draws used for return levels; 0 uses all.
    #[arg(long, default_value_t = DEFAULT_RETURN_SUBSAMPLE)]
    pub return_subsample: usize,
}

#[derive(Debug, Serialize)]
struct OccupancyEntry {
    occupied: usize,
    fraction: f64,
}

#[derive(Debug, Serialize)]
struct Summary {
    tool: &'static str,
    version: &'static str,
    command: &'static str,
    draws: usize,
    observations: usize,
    level: f64,
    curve_draws: usize,
    return_level_draws: usize,
    grid: [f64; 2],
    grid_points: usize,
    modal_occupied: Option<usize>,
    occupancy: Vec<OccupancyEntry>,
    /// KS distance of the residuals from N(0, 1).
    residual_ks: f64,
    acceptance: Acceptance,
    files: BTreeMap<&'static str, &'static str>,
}

fn used(n: usize, subsample: usize) -> usize {
    if subsample == 0 {
        n
    } else {
        n.min(subsample)
    }
}

pub fn run(args: &DiagnoseArgs) -> CliResult<()> {
    probability("--level", args.level)?;
    if args.grid_points < 2 {
        return Err(CliError::Usage("--grid-points must be at least 2".into()));
    }
    let p_grid: Vec<f64> = if args.p_grid.is_empty() {
        DEFAULT_P_GRID.to_vec()
    } else {
        args.p_grid.clone()
    };
    for &p in &p_grid {
        probability("--p-grid entries", p)?;
    }

    let manifest: FitManifest = read_json(&args.run.join(MANIFEST_FILE))?;
    let draws = read_draw_file(&args.run.join(&manifest.draws.file))?;
    if draws.is_empty() {
        return Err(CliError::Data(format!(
            "{} holds no draws",
            manifest.draws.file
        )));
    }
    let rows = read_maxima_file(
        &args.run.join(&manifest.data.file),
        DEFAULT_MISSING,
        IngestMode::Strict,
    )?;
    let series = maxima_to_series(&rows.records)?;
    let data = series.values();

    let default = default_grid(data);
    let lo = args.grid_min.unwrap_or(default[0]);
    let hi = args.grid_max.unwrap_or(default[default.len() - 1]);
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(CliError::Usage(format!(
            "grid bounds must satisfy min < max, got [{lo}, {hi}]"
        )));
    }
    let grid = linspace(lo, hi, args.grid_points);

    let (density, cdf) = posterior_curves(&draws, &grid, args.level, args.subsample)?;
    let levels = return_levels(&draws, &p_grid, args.level, args.return_subsample)?;
    let fitted = posterior_median_cdf(&draws, data, args.subsample)?;
    let residuals = residuals_from_values(data, &fitted);
    let qq = qq_pairs(&residuals);
    let occupancy = occupancy_distribution(&draws);
    let e: Vec<f64> = residuals.iter().map(|r| r.residual).collect();
    let residual_ks = ks_distance(&e, normal_cdf);

    let out = args.out_dir.clone().unwrap_or_else(|| args.run.clone());
    ensure_dir(&out)?;
    let curve_header = ["grid", "median", "lower", "upper"];
    write_columns(
        &out.join("density.csv"),
        &curve_header,
        &[
            &density.grid,
            &density.median,
            &density.lower,
            &density.upper,
        ],
    )?;
    write_columns(
        &out.join("cdf.csv"),
        &curve_header,
        &[&cdf.grid, &cdf.median, &cdf.lower, &cdf.upper],
    )?;
    write_columns(
        &out.join("return_levels.csv"),
        &["p", "x_axis", "median", "lower", "upper"],
        &[
            &levels.p,
            &levels.x_axis,
            &levels.median,
            &levels.lower,
            &levels.upper,
        ],
    )?;
    let mut table = Table::new(&["index", "observation", "fitted_cdf", "residual"])?;
    for r in &residuals {
        table.row([
            r.index.to_string(),
            num(r.observation),
            num(r.fitted_cdf),
            num(r.residual),
        ])?;
    }
    table.write_to(&out.join("residuals.csv"))?;
    let mut table = Table::new(&["theoretical", "sample"])?;
    for (t, s) in &qq {
        table.row([num(*t), num(*s)])?;
    }
    table.write_to(&out.join("qq.csv"))?;
    let mut table = Table::new(&["occupied", "fraction"])?;
    for (k, f) in &occupancy {
        table.row([k.to_string(), num(*f)])?;
    }
    table.write_to(&out.join("occupancy.csv"))?;
    let mut table = Table::new(&["iteration", "alpha", "occupied"])?;
    for d in &draws {
        table.row([
            d.iteration.to_string(),
            num(d.alpha),
            d.occupied().to_string(),
        ])?;
    }
    table.write_to(&out.join("trace.csv"))?;

    let files = BTreeMap::from([
        ("density", "density.csv"),
        ("cdf", "cdf.csv"),
        ("return_levels", "return_levels.csv"),
        ("residuals", "residuals.csv"),
        ("qq", "qq.csv"),
        ("occupancy", "occupancy.csv"),
        ("trace", "trace.csv"),
    ]);
    let modal = modal_occupied(&draws);
    let summary = Summary {
        tool: TOOL,
        version: VERSION,
        command: "diagnose",
        draws: draws.len(),
        observations: data.len(),
        level: args.level,
        curve_draws: used(draws.len(), args.subsample),
        return_level_draws: used(draws.len(), args.return_subsample),
        grid: [lo, hi],
        grid_points: args.grid_points,
        modal_occupied: modal,
        occupancy: occupancy
            .iter()
            .map(|&(occupied, fraction)| OccupancyEntry { occupied, fraction })
            .collect(),
        residual_ks,
        acceptance: manifest.acceptance,
        files,
    };
    write_json(&out.join("summary.json"), &summary)?;
    let share = occupancy
        .iter()
        .find(|(k, _)| Some(*k) == modal)
        .map_or(0.0, |(_, f)| *f);
    println!(
        "{} draws: modal occupied components {} ({:.1}% of draws), residual KS {:.4}",
        draws.len(),
        modal.map_or("-".to_string(), |k| k.to_string()),
        100.0 * share,
        residual_ks
    );
    Ok(())
}

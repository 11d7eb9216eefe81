//! File emission: atomic writes, the draw log and tabular outputs.
//!
//! Every file is written to a temporary sibling and renamed into place.
//! Floats use Rust's shortest round-trip formatting, so a value read back
//! from any output is bit-identical to the one written.

use std::collections::BTreeMap;
use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};

use hetgev::sampler::Snapshot;
use hetgev::{GevMixture, GevParams};

use crate::error::{CliError, CliResult};

pub const DRAWS_FILE: &str = "draws.csv";
pub const DATA_FILE: &str = "data.csv";
pub const BLOCKS_FILE: &str = "blocks.csv";
pub const MANIFEST_FILE: &str = "manifest.json";

pub const DRAW_HEADER: [&str; 8] = [
    "iteration",
    "k",
    "mu",
    "sigma",
    "xi",
    "pi_k",
    "alpha",
    "n_k",
];

fn temp_sibling(path: &Path) -> PathBuf {
    let name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    path.with_file_name(format!(".{name}.{}.tmp", std::process::id()))
}

/// Writes `bytes` to a temporary sibling of `path`, then renames it.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> CliResult<()> {
    let tmp = temp_sibling(path);
    fs::write(&tmp, bytes).map_err(|e| CliError::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        CliError::io(path, e)
    })
}

/// Shortest round-trip text of `x`; scientific notation outside
/// `[1e-4, 1e15)`.
pub fn num(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || !a.is_finite() || (1e-4..1e15).contains(&a) {
        x.to_string()
    } else {
        format!("{x:e}")
    }
}

pub fn ensure_dir(dir: &Path) -> CliResult<()> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

/// Accumulates CSV rows in memory for a single atomic write.
pub struct Table {
    writer: csv::Writer<Vec<u8>>,
}

impl Table {
    pub fn new(header: &[&str]) -> CliResult<Self> {
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer.write_record(header)?;
        Ok(Self { writer })
    }

    pub fn row<I, S>(&mut self, fields: I) -> CliResult<()>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.writer.write_record(fields)?;
        Ok(())
    }

    pub fn into_bytes(self) -> CliResult<Vec<u8>> {
        self.writer
            .into_inner()
            .map_err(|e| CliError::Data(format!("csv buffer: {}", e.error())))
    }

    pub fn write_to(self, path: &Path) -> CliResult<()> {
        atomic_write(path, &self.into_bytes()?)
    }
}

/// Writes a curve table: the grid column followed by one column per series.
pub fn write_columns(path: &Path, header: &[&str], columns: &[&[f64]]) -> CliResult<()> {
    let rows = columns.first().map_or(0, |c| c.len());
    if columns.iter().any(|c| c.len() != rows) || header.len() != columns.len() {
        return Err(CliError::Data("ragged output columns".into()));
    }
    let mut table = Table::new(header)?;
    for i in 0..rows {
        table.row(columns.iter().map(|c| num(c[i])))?;
    }
    table.write_to(path)
}

pub fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Data(format!("json encoding: {e}")))?;
    text.push('\n');
    atomic_write(path, text.as_bytes())
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

/// Draw log bytes: one row per retained draw and slot, `k` 1-based.
pub fn draw_log_bytes(draws: &[Snapshot]) -> CliResult<Vec<u8>> {
    let mut table = Table::new(&DRAW_HEADER)?;
    for d in draws {
        let comps = d.mixture.components();
        let weights = d.mixture.weights();
        for (k, theta) in comps.iter().enumerate() {
            table.row([
                d.iteration.to_string(),
                (k + 1).to_string(),
                num(theta.mu()),
                num(theta.sigma()),
                num(theta.xi()),
                num(weights[k]),
                num(d.alpha),
                d.counts[k].to_string(),
            ])?;
        }
    }
    table.into_bytes()
}

fn field<T: std::str::FromStr>(rec: &csv::StringRecord, i: usize, line: u64) -> CliResult<T> {
    rec.get(i).and_then(|s| s.parse().ok()).ok_or_else(|| {
        CliError::Data(format!(
            "draw log line {line}: bad '{}' field",
            DRAW_HEADER[i]
        ))
    })
}

/// Parses a draw log back into snapshots.
pub fn read_draw_log<R: Read>(input: R) -> CliResult<Vec<Snapshot>> {
    let mut rdr = csv::Reader::from_reader(input);
    let headers = rdr.headers()?.clone();
    if headers.iter().ne(DRAW_HEADER.iter().copied()) {
        return Err(CliError::Data(format!(
            "unexpected draw log header: {:?}",
            headers
        )));
    }
    struct Pending {
        components: Vec<GevParams>,
        weights: Vec<f64>,
        counts: Vec<usize>,
        alpha: f64,
    }
    let mut by_iter: BTreeMap<usize, Pending> = BTreeMap::new();
    for (row, rec) in rdr.records().enumerate() {
        let line = row as u64 + 2;
        let rec = rec?;
        let iteration: usize = field(&rec, 0, line)?;
        let k: usize = field(&rec, 1, line)?;
        let theta = GevParams::new(
            field(&rec, 2, line)?,
            field(&rec, 3, line)?,
            field(&rec, 4, line)?,
        )?;
        let entry = by_iter.entry(iteration).or_insert_with(|| Pending {
            components: Vec::new(),
            weights: Vec::new(),
            counts: Vec::new(),
            alpha: 0.0,
        });
        if k != entry.components.len() + 1 {
            return Err(CliError::Data(format!(
                "draw log line {line}: slot {k} out of order"
            )));
        }
        entry.components.push(theta);
        entry.weights.push(field(&rec, 5, line)?);
        entry.alpha = field(&rec, 6, line)?;
        entry.counts.push(field(&rec, 7, line)?);
    }
    by_iter
        .into_iter()
        .map(|(iteration, p)| {
            Ok(Snapshot {
                iteration,
                mixture: GevMixture::from_weights(p.components, &p.weights)?,
                counts: p.counts,
                alpha: p.alpha,
            })
        })
        .collect()
}

pub fn read_draw_file(path: &Path) -> CliResult<Vec<Snapshot>> {
    let file = fs::File::open(path).map_err(|e| CliError::io(path, e))?;
    read_draw_log(file)
}

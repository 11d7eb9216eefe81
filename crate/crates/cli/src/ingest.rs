//! CSV ingestion: daily `date,value` series and pre-blocked `value[,group]`
//! maxima.

use std::fs::File;
use std::io::Read;
use std::path::Path;

use chrono::NaiveDate;
use hetgev::BlockMaximaSeries;

use crate::error::{CliError, CliResult};

pub const DEFAULT_MISSING: &str = "NA";

/// Malformed rows listed in a strict-mode error message.
const REPORTED_ROWS: usize = 5;

#[derive(Debug, Clone, PartialEq)]
pub struct DailyRecord {
    pub date: NaiveDate,
    /// `None` for the missing token.
    pub value: Option<f64>,
}

/// Column names and missing-value token of a daily CSV.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CsvSchema {
    pub date_column: String,
    pub value_column: String,
    pub missing_token: String,
}

impl Default for CsvSchema {
    fn default() -> Self {
        Self {
            date_column: "date".into(),
            value_column: "value".into(),
            missing_token: DEFAULT_MISSING.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum IngestMode {
    /// Any malformed row fails the whole file.
    #[default]
    Strict,
    /// Malformed rows are skipped and reported.
    Permissive,
}

/// A rejected row; `line` is 1-based and counts the header.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowIssue {
    pub line: u64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ingested<T> {
    pub records: Vec<T>,
    pub malformed: Vec<RowIssue>,
}

fn open(path: &Path) -> CliResult<File> {
    File::open(path).map_err(|e| CliError::io(path, e))
}

fn reader<R: Read>(input: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(input)
}

fn column(headers: &csv::StringRecord, name: &str) -> CliResult<usize> {
    headers
        .iter()
        .position(|h| h == name)
        .ok_or_else(|| CliError::Data(format!("header has no '{name}' column")))
}

fn finish<T>(
    records: Vec<T>,
    malformed: Vec<RowIssue>,
    mode: IngestMode,
) -> CliResult<Ingested<T>> {
    if mode == IngestMode::Strict && !malformed.is_empty() {
        let listed: Vec<String> = malformed
            .iter()
            .take(REPORTED_ROWS)
            .map(|r| format!("line {}: {}", r.line, r.reason))
            .collect();
        return Err(CliError::Data(format!(
            "{} malformed row(s): {}",
            malformed.len(),
            listed.join("; ")
        )));
    }
    Ok(Ingested { records, malformed })
}

fn parse_value(raw: &str, missing: &str) -> Result<Option<f64>, String> {
    if raw == missing {
        return Ok(None);
    }
    match raw.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(Some(v)),
        Ok(v) => Err(format!("non-finite value {v}")),
        Err(_) => Err(format!("unparseable value '{raw}'")),
    }
}

/// Reads a daily series from any reader.
pub fn ingest_daily<R: Read>(
    input: R,
    schema: &CsvSchema,
    mode: IngestMode,
) -> CliResult<Ingested<DailyRecord>> {
    let mut rdr = reader(input);
    let headers = rdr
        .headers()
        .map_err(|e| CliError::Data(format!("unreadable header: {e}")))?
        .clone();
    let di = column(&headers, &schema.date_column)?;
    let vi = column(&headers, &schema.value_column)?;
    let mut records = Vec::new();
    let mut malformed = Vec::new();
    for (row, result) in rdr.records().enumerate() {
        let line = row as u64 + 2;
        let rec = match result {
            Ok(r) => r,
            Err(e) => {
                malformed.push(RowIssue {
                    line,
                    reason: e.to_string(),
                });
                continue;
            }
        };
        let (Some(d), Some(v)) = (rec.get(di), rec.get(vi)) else {
            malformed.push(RowIssue {
                line,
                reason: format!(
                    "expected at least {} fields, found {}",
                    di.max(vi) + 1,
                    rec.len()
                ),
            });
            continue;
        };
        let date = match NaiveDate::parse_from_str(d, "%Y-%m-%d") {
            Ok(date) => date,
            Err(_) => {
                malformed.push(RowIssue {
                    line,
                    reason: format!("unparseable date '{d}'"),
                });
                continue;
            }
        };
        match parse_value(v, &schema.missing_token) {
            Ok(value) => records.push(DailyRecord { date, value }),
            Err(reason) => malformed.push(RowIssue { line, reason }),
        }
    }
    finish(records, malformed, mode)
}

/// Reads a daily series from a file.
pub fn ingest_csv(
    path: &Path,
    schema: &CsvSchema,
    mode: IngestMode,
) -> CliResult<Ingested<DailyRecord>> {
    ingest_daily(open(path)?, schema, mode)
}

/// One pre-blocked maximum with its optional group label.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelledValue {
    pub value: f64,
    pub group: Option<String>,
}

/// Reads `value[,group]` rows. Missing-token values are malformed here.
pub fn ingest_maxima<R: Read>(
    input: R,
    missing: &str,
    mode: IngestMode,
) -> CliResult<Ingested<LabelledValue>> {
    let mut rdr = reader(input);
    let headers = rdr
        .headers()
        .map_err(|e| CliError::Data(format!("unreadable header: {e}")))?
        .clone();
    let vi = column(&headers, "value")?;
    let gi = headers.iter().position(|h| h == "group");
    let mut records = Vec::new();
    let mut malformed = Vec::new();
    for (row, result) in rdr.records().enumerate() {
        let line = row as u64 + 2;
        let rec = match result {
            Ok(r) => r,
            Err(e) => {
                malformed.push(RowIssue {
                    line,
                    reason: e.to_string(),
                });
                continue;
            }
        };
        let parsed = rec
            .get(vi)
            .ok_or_else(|| "missing value field".to_string())
            .and_then(|v| parse_value(v, missing));
        match parsed {
            Ok(Some(value)) => records.push(LabelledValue {
                value,
                group: gi.and_then(|g| rec.get(g)).map(str::to_string),
            }),
            Ok(None) => malformed.push(RowIssue {
                line,
                reason: "missing maximum".into(),
            }),
            Err(reason) => malformed.push(RowIssue { line, reason }),
        }
    }
    finish(records, malformed, mode)
}

pub fn read_maxima_file(
    path: &Path,
    missing: &str,
    mode: IngestMode,
) -> CliResult<Ingested<LabelledValue>> {
    ingest_maxima(open(path)?, missing, mode)
}

/// Builds the series; labels are kept only when every row has one.
pub fn maxima_to_series(rows: &[LabelledValue]) -> CliResult<BlockMaximaSeries> {
    let values = rows.iter().map(|r| r.value).collect();
    let series = BlockMaximaSeries::new(values)?;
    let labels: Option<Vec<String>> = rows.iter().map(|r| r.group.clone()).collect();
    Ok(match labels {
        Some(l) => series.with_labels(l)?,
        None => series,
    })
}

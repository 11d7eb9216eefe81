//! Meteorological seasonal blocking of daily series.
//!
//! Seasons are DJF, MAM, JJA and SON. By default December opens the
//! following winter, so a DJF block is anchored to the year of its
//! December. The calendar grouping instead puts December with January and
//! February of the same year.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use chrono::{Datelike, NaiveDate};
use hetgev::BlockMaximaSeries;

use crate::error::{CliError, CliResult};
use crate::ingest::DailyRecord;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Season {
    Mam,
    Jja,
    Son,
    Djf,
}

impl Season {
    pub fn label(self) -> &'static str {
        match self {
            Self::Djf => "DJF",
            Self::Mam => "MAM",
            Self::Jja => "JJA",
            Self::Son => "SON",
        }
    }
}

impl fmt::Display for Season {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WinterGrouping {
    /// December joins the following January and February.
    #[default]
    December,
    /// December joins January and February of its own year.
    Calendar,
}

impl FromStr for WinterGrouping {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        match s {
            "december" => Ok(Self::December),
            "calendar" => Ok(Self::Calendar),
            other => Err(CliError::Usage(format!(
                "winter grouping must be 'december' or 'calendar', got '{other}'"
            ))),
        }
    }
}

impl fmt::Display for WinterGrouping {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::December => "december",
            Self::Calendar => "calendar",
        })
    }
}

/// Season and anchor year of a date.
pub fn season_of(date: NaiveDate, winter: WinterGrouping) -> (i32, Season) {
    let y = date.year();
    match date.month() {
        3..=5 => (y, Season::Mam),
        6..=8 => (y, Season::Jja),
        9..=11 => (y, Season::Son),
        12 => (y, Season::Djf),
        _ => match winter {
            WinterGrouping::December => (y - 1, Season::Djf),
            WinterGrouping::Calendar => (y, Season::Djf),
        },
    }
}

fn days_in_month(year: i32, month: u32) -> u32 {
    let (ny, nm) = if month == 12 {
        (year + 1, 1)
    } else {
        (year, month + 1)
    };
    let first = NaiveDate::from_ymd_opt(year, month, 1).expect("valid month");
    let next = NaiveDate::from_ymd_opt(ny, nm, 1).expect("valid month");
    (next - first).num_days() as u32
}

/// Calendar days in a block.
pub fn season_length(year: i32, season: Season, winter: WinterGrouping) -> u32 {
    match season {
        Season::Mam => (3..=5).map(|m| days_in_month(year, m)).sum(),
        Season::Jja => (6..=8).map(|m| days_in_month(year, m)).sum(),
        Season::Son => (9..=11).map(|m| days_in_month(year, m)).sum(),
        Season::Djf => {
            let jan_feb_year = match winter {
                WinterGrouping::December => year + 1,
                WinterGrouping::Calendar => year,
            };
            31 + days_in_month(jan_feb_year, 1) + days_in_month(jan_feb_year, 2)
        }
    }
}

/// Maximum of one season block.
#[derive(Debug, Clone, PartialEq)]
pub struct SeasonBlock {
    pub season: Season,
    pub year_key: i32,
    pub maximum: f64,
    /// Non-missing days contributing to the maximum.
    pub count: u32,
    /// Calendar days in the block.
    pub calendar_days: u32,
}

impl SeasonBlock {
    /// Fewer non-missing days than calendar days.
    pub fn partial(&self) -> bool {
        self.count < self.calendar_days
    }
}

/// Seasonal maxima in chronological order. Blocks with no non-missing day
/// are dropped; with `min_days`, so are blocks with fewer days.
pub fn seasonal_block_maxima(
    records: &[DailyRecord],
    winter: WinterGrouping,
    min_days: Option<u32>,
) -> CliResult<Vec<SeasonBlock>> {
    if records.is_empty() {
        return Err(CliError::Data("no daily records".into()));
    }
    let mut blocks: BTreeMap<(i32, Season), (f64, u32)> = BTreeMap::new();
    for r in records {
        let Some(v) = r.value else { continue };
        let entry = blocks
            .entry(season_of(r.date, winter))
            .or_insert((f64::NEG_INFINITY, 0));
        entry.0 = entry.0.max(v);
        entry.1 += 1;
    }
    let threshold = min_days.unwrap_or(1).max(1);
    Ok(blocks
        .into_iter()
        .filter(|(_, (_, n))| *n >= threshold)
        .map(|((year_key, season), (maximum, count))| SeasonBlock {
            season,
            year_key,
            maximum,
            count,
            calendar_days: season_length(year_key, season, winter),
        })
        .collect())
}

/// Series of block maxima labelled by season.
pub fn blocks_to_series(blocks: &[SeasonBlock]) -> CliResult<BlockMaximaSeries> {
    let values = blocks.iter().map(|b| b.maximum).collect();
    let labels = blocks
        .iter()
        .map(|b| b.season.label().to_string())
        .collect();
    Ok(BlockMaximaSeries::new(values)?.with_labels(labels)?)
}

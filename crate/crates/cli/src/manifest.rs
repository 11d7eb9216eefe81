//! Run manifests. A fit manifest holds everything needed to re-run the
//! chain: the resolved settings and a copy of the data in the run
//! directory.

use serde::{Deserialize, Serialize};

use crate::config::FileConfig;

pub const TOOL: &str = "hetgev";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DataInfo {
    /// Path given on the command line.
    pub source: String,
    /// `maxima` or `seasonal`.
    pub mode: String,
    /// Copy of the fitted maxima, relative to the run directory.
    pub file: String,
    pub observations: usize,
    pub malformed_rows: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub seasonal: Option<SeasonalInfo>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeasonalInfo {
    pub winter: String,
    pub min_days: Option<u32>,
    pub daily_records: usize,
    pub missing_days: usize,
    pub partial_blocks: usize,
    pub blocks_file: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseAcceptance {
    pub proposed: u64,
    pub accepted: u64,
    /// `null` when nothing was proposed.
    pub rate: Option<f64>,
}

impl From<hetgev::sampler::MhStats> for PhaseAcceptance {
    fn from(s: hetgev::sampler::MhStats) -> Self {
        let rate = s.rate();
        Self {
            proposed: s.proposed,
            accepted: s.accepted,
            rate: rate.is_finite().then_some(rate),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Acceptance {
    pub burn_in: PhaseAcceptance,
    pub sampling: PhaseAcceptance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DrawsInfo {
    pub file: String,
    pub retained: usize,
    pub n_iter: usize,
    pub burn_in: usize,
    pub thin: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub seed: u64,
    pub data: DataInfo,
    pub config: FileConfig,
    pub acceptance: Acceptance,
    pub draws: DrawsInfo,
}

pub mod diagnose;
pub mod fit;
pub mod simulate;
pub mod study;

use crate::error::{CliError, CliResult};

/// Rejects values outside `(0, 1)`.
pub(crate) fn probability(name: &str, p: f64) -> CliResult<f64> {
    if p > 0.0 && p < 1.0 {
        Ok(p)
    } else {
        Err(CliError::Usage(format!(
            "{name} must lie in (0, 1), got {p}"
        )))
    }
}

//! Observed block maxima.

use crate::error::{Error, Result};

/// Block maxima `z_1..z_m` with optional per-value group labels (season,
/// generating component) and an optional rounding half-width.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockMaximaSeries {
    values: Vec<f64>,
    labels: Option<Vec<String>>,
    censor_delta: Option<f64>,
}

impl BlockMaximaSeries {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidData(
                "series must contain at least one value".into(),
            ));
        }
        if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::InvalidData(format!("value {i} is not finite ({v})")));
        }
        Ok(Self {
            values,
            labels: None,
            censor_delta: None,
        })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.values.len() {
            return Err(Error::InvalidData(format!(
                "{} labels for {} values",
                labels.len(),
                self.values.len()
            )));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn with_censor_delta(mut self, delta: f64) -> Result<Self> {
        if !(delta.is_finite() && delta > 0.0) {
            return Err(Error::InvalidData(format!(
                "censoring half-width must be positive, got {delta}"
            )));
        }
        self.censor_delta = Some(delta);
        Ok(self)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn censor_delta(&self) -> Option<f64> {
        self.censor_delta
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

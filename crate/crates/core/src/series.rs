use crate::error::{Error, Result};

/// An identified, ordered vector of finite observations.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    id: String,
    values: Vec<f64>,
}

impl TimeSeries {
    pub fn new(id: impl Into<String>, values: Vec<f64>) -> Result<Self> {
        let id = id.into();
        if values.len() < 2 {
            return Err(Error::InvalidSeries {
                id,
                reason: format!("needs at least 2 observations, got {}", values.len()),
            });
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidSeries {
                id,
                reason: format!("non-finite value at position {pos}"),
            });
        }
        Ok(Self { id, values })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// The series `0, 1, ..., n-1`.
    pub fn index(id: impl Into<String>, n: usize) -> Result<Self> {
        Self::new(id, (0..n).map(|i| i as f64).collect())
    }
}

pub(crate) fn check_same_length(a: &TimeSeries, b: &TimeSeries) -> Result<usize> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            id_a: a.id.clone(),
            len_a: a.len(),
            id_b: b.id.clone(),
            len_b: b.len(),
        });
    }
    Ok(a.len())
}

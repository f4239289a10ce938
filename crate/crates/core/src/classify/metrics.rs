use crate::error::{Error, Result};

/// Mean of the per-class recalls.
pub fn balanced_accuracy(y_true: &[u8], y_pred: &[u8]) -> Result<f64> {
    if y_true.len() != y_pred.len() {
        return Err(Error::DimensionMismatch {
            expected: y_true.len(),
            found: y_pred.len(),
        });
    }
    let mut hits = [0usize; 2];
    let mut totals = [0usize; 2];
    for (&t, &p) in y_true.iter().zip(y_pred) {
        if t > 1 || p > 1 {
            return Err(Error::InvalidParameter("labels must be 0 or 1".into()));
        }
        totals[t as usize] += 1;
        if t == p {
            hits[t as usize] += 1;
        }
    }
    if totals[0] == 0 || totals[1] == 0 {
        return Err(Error::InvalidParameter(
            "balanced accuracy needs both classes in y_true".into(),
        ));
    }
    let recall_1 = hits[1] as f64 / totals[1] as f64;
    let recall_0 = hits[0] as f64 / totals[0] as f64;
    Ok((recall_1 + recall_0) / 2.0)
}

/// Mean, min, max, median and sample standard deviation (n - 1 denominator).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub mean: f64,
    pub min: f64,
    pub max: f64,
    pub median: f64,
    pub std: f64,
}

impl Summary {
    /// Returns `None` for an empty slice. A single value has `std == 0`.
    pub fn from_values(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let mid = sorted.len() / 2;
        let median = if sorted.len().is_multiple_of(2) {
            (sorted[mid - 1] + sorted[mid]) / 2.0
        } else {
            sorted[mid]
        };
        let std = if values.len() > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        Some(Self {
            mean,
            min: sorted[0],
            max: sorted[sorted.len() - 1],
            median,
            std,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn balanced_accuracy_examples() {
        assert_eq!(balanced_accuracy(&[0, 1, 1], &[0, 1, 1]).unwrap(), 1.0);
        assert_eq!(
            balanced_accuracy(&[0, 1, 1, 0], &[1, 1, 1, 1]).unwrap(),
            0.5
        );
        let ba = balanced_accuracy(&[1, 1, 1, 0, 0], &[1, 1, 0, 0, 1]).unwrap();
        assert!((ba - 7.0 / 12.0).abs() < 1e-15);
    }

    #[test]
    fn balanced_accuracy_errors() {
        assert!(balanced_accuracy(&[1, 1], &[1, 0]).is_err());
        assert!(balanced_accuracy(&[1, 0], &[1]).is_err());
    }

    #[test]
    fn summary_of_two_folds() {
        let s = Summary::from_values(&[0.8, 1.0]).unwrap();
        assert!((s.mean - 0.9).abs() < 1e-15);
        assert_eq!(s.min, 0.8);
        assert_eq!(s.max, 1.0);
        assert!((s.median - 0.9).abs() < 1e-15);
        // sqrt(((0.1)^2 + (0.1)^2) / 1)
        assert!((s.std - 0.02f64.sqrt()).abs() < 1e-12);
        assert!(Summary::from_values(&[]).is_none());
        assert_eq!(Summary::from_values(&[0.7]).unwrap().std, 0.0);
    }
}

//! Result plumbing: a serializable experiment report plus CSV writers for
//! cost trajectories and histograms.

use std::collections::BTreeMap;
use std::path::Path;

use ndarray::{Array1, Array2};
use serde::Serialize;

use crate::fock::FockTensorJson;
use crate::opt::TrajectoryPoint;
use crate::{Error, Result};

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentReport {
    pub name: String,
    pub config: serde_json::Value,
    pub metrics: BTreeMap<String, f64>,
    pub trajectory: Vec<TrajectoryPoint>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub solution_s: Option<Vec<Vec<f64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub solution_d: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output_amplitudes: Option<FockTensorJson>,
    pub notes: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub extra: Option<serde_json::Value>,
    pub wall_time_s: f64,
}

impl ExperimentReport {
    pub fn new(name: &str, config: serde_json::Value) -> Self {
        ExperimentReport {
            name: name.to_string(),
            config,
            metrics: BTreeMap::new(),
            trajectory: Vec::new(),
            solution_s: None,
            solution_d: None,
            output_amplitudes: None,
            notes: Vec::new(),
            extra: None,
            wall_time_s: 0.0,
        }
    }

    pub fn set_metric(&mut self, key: &str, value: f64) {
        self.metrics.insert(key.to_string(), value);
    }

    pub fn validate(&self) -> Result<()> {
        for (k, v) in &self.metrics {
            if !v.is_finite() {
                return Err(Error::Numerical(format!(
                    "metric '{}' is non-finite ({})",
                    k, v
                )));
            }
        }
        Ok(())
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        self.validate()?;
        let text = serde_json::to_string_pretty(self)
            .map_err(|e| Error::Numerical(format!("serialization failed: {}", e)))?;
        std::fs::write(path, text)
            .map_err(|e| Error::InvalidArgument(format!("cannot write {}: {}", path.display(), e)))
    }

    /// Writes the cost trajectory to `path` as `step,cost,wall_ms` rows.
    pub fn write_trajectory_csv(&self, path: &Path) -> Result<()> {
        let mut out = String::from("step,cost,wall_ms\n");
        for p in &self.trajectory {
            out.push_str(&format!("{},{:.17e},{:.3}\n", p.step, p.cost, p.wall_ms));
        }
        std::fs::write(path, out)
            .map_err(|e| Error::InvalidArgument(format!("cannot write {}: {}", path.display(), e)))
    }
}

pub fn matrix_rows(m: &Array2<f64>) -> Vec<Vec<f64>> {
    m.outer_iter().map(|r| r.to_vec()).collect()
}

pub fn vector_values(v: &Array1<f64>) -> Vec<f64> {
    v.to_vec()
}

/// Fixed-width histogram of `values` with `bins` bins over [0, max(values)].
pub fn histogram(values: &[f64], bins: usize) -> (Vec<f64>, Vec<usize>) {
    let max = values.iter().cloned().fold(0.0_f64, f64::max).max(1e-300);
    let width = max / bins as f64;
    let mut counts = vec![0usize; bins];
    for &v in values {
        let idx = ((v / width) as usize).min(bins - 1);
        counts[idx] += 1;
    }
    let edges = (0..=bins).map(|i| i as f64 * width).collect();
    (edges, counts)
}

/// Writes labeled histogram series sharing common bin edges:
/// `bin_left,bin_right,<label1>,<label2>,...`
pub fn write_histogram_csv(
    path: &Path,
    edges: &[f64],
    series: &[(String, Vec<usize>)],
) -> Result<()> {
    let bins = edges.len() - 1;
    for (label, counts) in series {
        if counts.len() != bins {
            return Err(Error::DimensionMismatch(format!(
                "histogram series '{}' has {} bins, expected {}",
                label,
                counts.len(),
                bins
            )));
        }
    }
    let mut out = String::from("bin_left,bin_right");
    for (label, _) in series {
        out.push(',');
        out.push_str(label);
    }
    out.push('\n');
    for i in 0..bins {
        out.push_str(&format!("{:.9e},{:.9e}", edges[i], edges[i + 1]));
        for (_, counts) in series {
            out.push_str(&format!(",{}", counts[i]));
        }
        out.push('\n');
    }
    std::fs::write(path, out)
        .map_err(|e| Error::InvalidArgument(format!("cannot write {}: {}", path.display(), e)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn histogram_counts_everything() {
        let values = vec![0.0, 0.1, 0.5, 0.99, 1.0];
        let (edges, counts) = histogram(&values, 4);
        assert_eq!(edges.len(), 5);
        assert_eq!(counts.iter().sum::<usize>(), values.len());
        assert!((edges[4] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn non_finite_metric_rejected() {
        let mut r = ExperimentReport::new("t", serde_json::json!({}));
        r.set_metric("fidelity", f64::NAN);
        assert!(r.validate().is_err());
    }
}

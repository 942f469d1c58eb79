//! Classical-cost modeling and quantum-versus-classical comparison.

use std::num::NonZeroU64;
use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum UtilityError {
    #[error("{name} = {value} is out of range ({constraint})")]
    OutOfRange {
        name: &'static str,
        value: f64,
        constraint: &'static str,
    },
    #[error("failed to read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Csv {
        path: String,
        line: usize,
        message: String,
    },
}

/// Pricing assumptions for the classical-replacement comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostModel {
    /// Price per CPU-hour, USD.
    pub cpu_hour_rate_usd: f64,
    /// Estimated value per reaction study, USD (min, max).
    pub utility_value_usd: (f64, f64),
}

impl Default for CostModel {
    fn default() -> Self {
        CostModel {
            cpu_hour_rate_usd: 0.04,
            utility_value_usd: (1e5, 2e5),
        }
    }
}

impl CostModel {
    pub fn validate(&self) -> Result<(), UtilityError> {
        if !self.cpu_hour_rate_usd.is_finite() || self.cpu_hour_rate_usd <= 0.0 {
            return Err(UtilityError::OutOfRange {
                name: "cpu_hour_rate_usd",
                value: self.cpu_hour_rate_usd,
                constraint: "> 0",
            });
        }
        let (lo, hi) = self.utility_value_usd;
        if !(lo > 0.0 && hi >= lo) {
            return Err(UtilityError::OutOfRange {
                name: "utility_value_usd",
                value: lo,
                constraint: "positive with min <= max",
            });
        }
        Ok(())
    }
}

/// Price of a classical computation: CPU-hours times the hourly rate.
pub fn classical_cost(cpu_hours: f64, model: &CostModel) -> f64 {
    cpu_hours * model.cpu_hour_rate_usd
}

/// Quantum share of compute at classical parallelization P, in percent.
///
/// With perfect parallelization the classical wall time is cpu_hours / P;
/// the share is 100 · classical_wall / (classical_wall + quantum_hours), the
/// fraction of total wall time for which the quantum machine is the faster
/// resource. It declines monotonically toward 0 as P grows. The metric is
/// defined here; outputs label it accordingly.
pub fn quantum_share(
    quantum_hours: f64,
    classical_cpu_hours: f64,
    parallel_cpus: NonZeroU64,
) -> f64 {
    let classical_wall = classical_cpu_hours / parallel_cpus.get() as f64;
    let total = classical_wall + quantum_hours;
    if total == 0.0 {
        return 0.0;
    }
    100.0 * classical_wall / total
}

/// One row of the quantum-versus-classical comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub molecule_id: String,
    pub n_orbitals: u32,
    pub classical_cpu_hours: f64,
    pub classical_cost_usd: f64,
    pub quantum_runtime_hours: f64,
    pub parallel_cpus: u64,
    pub quantum_share_percent: f64,
}

/// Published DMRG summary for one instance: the largest-bond-dimension
/// calculation (with its normalized CPU time) and the extrapolated energy
/// and bond-dimension interval.
#[derive(Debug, Clone, PartialEq)]
pub struct DmrgSummaryRow {
    pub molecule_id: String,
    pub n_orbitals: u32,
    pub bond_dimension: u32,
    pub energy: f64,
    pub cpu_hours: Option<f64>,
    pub e_est: f64,
    pub e_est_ci95: f64,
    pub d_est: u32,
    pub d_est_min: u32,
    pub d_est_max: u32,
}

impl DmrgSummaryRow {
    /// Cubic forecast of the CPU-hours needed to reach the extrapolated bond
    /// dimension, when timing data is present.
    pub fn forecast_cpu_hours(&self) -> Option<f64> {
        let hours = self.cpu_hours?;
        let ratio = f64::from(self.d_est) / f64::from(self.bond_dimension);
        Some(hours * ratio * ratio * ratio)
    }
}

const SUMMARY_HEADER: &str =
    "molecule_id,n_orbitals,bond_dimension,energy,cpu_hours,e_est,e_est_ci95,d_est,d_est_min,d_est_max";

/// Parses a DMRG summary CSV (header [`SUMMARY_HEADER`]).
pub fn parse_summary_csv(text: &str, source: &str) -> Result<Vec<DmrgSummaryRow>, UtilityError> {
    let err = |line: usize, message: String| UtilityError::Csv {
        path: source.to_string(),
        line,
        message,
    };
    let mut lines = text.lines().enumerate();
    let Some((_, header)) = lines.next() else {
        return Err(err(1, "empty file".into()));
    };
    if header.trim() != SUMMARY_HEADER {
        return Err(err(1, format!("expected header `{SUMMARY_HEADER}`")));
    }
    let mut rows = Vec::new();
    for (idx, line) in lines {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 10 {
            return Err(err(line_no, format!("expected 10 fields, found {}", fields.len())));
        }
        fn num<T: std::str::FromStr>(
            s: &str,
            line_no: usize,
            source: &str,
            what: &str,
        ) -> Result<T, UtilityError>
        where
            T::Err: std::fmt::Display,
        {
            s.parse::<T>().map_err(|e| UtilityError::Csv {
                path: source.to_string(),
                line: line_no,
                message: format!("invalid {what} {s:?}: {e}"),
            })
        }
        let cpu_hours = if fields[4].is_empty() {
            None
        } else {
            Some(num::<f64>(fields[4], line_no, source, "cpu_hours")?)
        };
        rows.push(DmrgSummaryRow {
            molecule_id: fields[0].to_string(),
            n_orbitals: num(fields[1], line_no, source, "n_orbitals")?,
            bond_dimension: num(fields[2], line_no, source, "bond_dimension")?,
            energy: num(fields[3], line_no, source, "energy")?,
            cpu_hours,
            e_est: num(fields[5], line_no, source, "e_est")?,
            e_est_ci95: num(fields[6], line_no, source, "e_est_ci95")?,
            d_est: num(fields[7], line_no, source, "d_est")?,
            d_est_min: num(fields[8], line_no, source, "d_est_min")?,
            d_est_max: num(fields[9], line_no, source, "d_est_max")?,
        });
    }
    Ok(rows)
}

/// Reads a DMRG summary CSV file.
pub fn load_summary_csv<P: AsRef<Path>>(path: P) -> Result<Vec<DmrgSummaryRow>, UtilityError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| UtilityError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_summary_csv(&text, &path.display().to_string())
}

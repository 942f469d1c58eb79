//! DMRG convergence-series extrapolation.
//!
//! Two fits run in sequence. First, energy is regressed linearly on the
//! truncated weight; the intercept estimates the converged energy and its
//! 95% interval is 1.96 times the intercept standard error. Second, the log
//! residuals ln(E − E_est) are regressed on (ln D)², which yields the bond
//! dimension required to converge within a target accuracy δ via
//! D_est = exp(sqrt((ln δ − a)/b)). Shifting (a, b) by ±1.96σ gives four
//! corner values whose min/max bracket the fitting uncertainty.

use std::path::Path;

use thiserror::Error;

/// Default target accuracy for the bond-dimension extrapolation, Hartree.
pub const DEFAULT_BOND_ACCURACY_HA: f64 = 1e-3;

#[derive(Debug, Error)]
pub enum FitError {
    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("zero variance in {0}: the fit is degenerate")]
    ZeroVariance(&'static str),
    #[error(
        "point (D = {bond_dimension}, E = {energy}) is not above the extrapolated energy {e_est}; \
         its log residual is undefined"
    )]
    NonPositiveResidual {
        bond_dimension: u32,
        energy: f64,
        e_est: f64,
    },
    #[error("fitted b = {0} is not negative: residuals do not decay with bond dimension")]
    Divergent(f64),
    #[error("no point carries cpu_hours; nothing to forecast from")]
    NoTimingData,
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

/// One DMRG calculation: bond dimension, energy, truncated weight, and an
/// optional CPU time normalized to a fixed sweep count.
#[derive(Debug, Clone, PartialEq)]
pub struct DmrgPoint {
    pub bond_dimension: u32,
    pub energy: f64,
    pub truncated_weight: f64,
    pub cpu_hours: Option<f64>,
}

/// Intercept and slope of the energy-versus-truncated-weight line, with the
/// 95% half-width of the intercept.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyExtrapolation {
    /// Extrapolated energy E_est (the intercept), Hartree.
    pub e_est: f64,
    /// Slope m of energy against truncated weight.
    pub slope: f64,
    /// 1.96 × standard error of the intercept, Hartree.
    pub e_est_ci95: f64,
    pub intercept_se: f64,
    pub slope_se: f64,
}

/// Bond-dimension fit ln(E − E_est) = a + b(ln D)² and the extrapolated
/// bond dimension with its four-corner interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BondDimensionFit {
    pub a: f64,
    pub b: f64,
    pub sigma_a: f64,
    pub sigma_b: f64,
    /// Bond dimension at which the energy reaches the target accuracy.
    pub d_est: f64,
    /// (min, max) over the real-valued corner values D_est^±±.
    pub d_est_interval: (f64, f64),
    /// Corners whose radicand was negative and were left out of the interval.
    pub excluded_corners: usize,
}

/// Both fits of one series, as exported in reports.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtrapolationResult {
    pub energy: EnergyExtrapolation,
    pub bond: Option<BondDimensionFit>,
}

struct OlsFit {
    intercept: f64,
    slope: f64,
    intercept_se: f64,
    slope_se: f64,
}

/// Ordinary least squares of y on x with n − 2 degrees of freedom for the
/// residual variance.
fn ols(x: &[f64], y: &[f64]) -> Result<OlsFit, FitError> {
    let n = x.len();
    if n < 3 {
        return Err(FitError::TooFewPoints { needed: 3, got: n });
    }
    let nf = n as f64;
    let x_mean = x.iter().sum::<f64>() / nf;
    let y_mean = y.iter().sum::<f64>() / nf;
    let sxx: f64 = x.iter().map(|&xi| (xi - x_mean) * (xi - x_mean)).sum();
    if sxx == 0.0 {
        return Err(FitError::ZeroVariance("the regressor"));
    }
    let sxy: f64 = x
        .iter()
        .zip(y)
        .map(|(&xi, &yi)| (xi - x_mean) * (yi - y_mean))
        .sum();
    let slope = sxy / sxx;
    let intercept = y_mean - slope * x_mean;
    let ssr: f64 = x
        .iter()
        .zip(y)
        .map(|(&xi, &yi)| {
            let r = yi - intercept - slope * xi;
            r * r
        })
        .sum();
    let sigma2 = ssr / (nf - 2.0);
    let slope_se = (sigma2 / sxx).sqrt();
    let intercept_se = (sigma2 * (1.0 / nf + x_mean * x_mean / sxx)).sqrt();
    Ok(OlsFit {
        intercept,
        slope,
        intercept_se,
        slope_se,
    })
}

/// Fits energy against truncated weight and reports the intercept with its
/// 95% confidence half-width.
pub fn fit_energy_extrapolation(points: &[DmrgPoint]) -> Result<EnergyExtrapolation, FitError> {
    if points.len() < 3 {
        return Err(FitError::TooFewPoints {
            needed: 3,
            got: points.len(),
        });
    }
    let x: Vec<f64> = points.iter().map(|p| p.truncated_weight).collect();
    let y: Vec<f64> = points.iter().map(|p| p.energy).collect();
    let fit = ols(&x, &y).map_err(|e| match e {
        FitError::ZeroVariance(_) => FitError::ZeroVariance("truncated_weight"),
        other => other,
    })?;
    Ok(EnergyExtrapolation {
        e_est: fit.intercept,
        slope: fit.slope,
        e_est_ci95: 1.96 * fit.intercept_se,
        intercept_se: fit.intercept_se,
        slope_se: fit.slope_se,
    })
}

/// Fits ln(E − e_est) on (ln D)² and extrapolates the bond dimension needed
/// to bring the energy within `delta` of `e_est`.
///
/// Every energy must lie strictly above `e_est` and the fitted b must be
/// negative, otherwise the closed form has no finite solution. Corners with
/// a negative radicand are excluded from the interval and counted.
pub fn fit_bond_dimension(
    points: &[DmrgPoint],
    e_est: f64,
    delta: f64,
) -> Result<BondDimensionFit, FitError> {
    if delta <= 0.0 || !delta.is_finite() {
        return Err(FitError::OutOfRange {
            name: "delta",
            value: delta,
            constraint: "> 0",
        });
    }
    if points.len() < 3 {
        return Err(FitError::TooFewPoints {
            needed: 3,
            got: points.len(),
        });
    }
    let mut x = Vec::with_capacity(points.len());
    let mut y = Vec::with_capacity(points.len());
    for p in points {
        let residual = p.energy - e_est;
        if residual <= 0.0 {
            return Err(FitError::NonPositiveResidual {
                bond_dimension: p.bond_dimension,
                energy: p.energy,
                e_est,
            });
        }
        let ln_d = f64::from(p.bond_dimension).ln();
        x.push(ln_d * ln_d);
        y.push(residual.ln());
    }
    let fit = ols(&x, &y).map_err(|e| match e {
        FitError::ZeroVariance(_) => FitError::ZeroVariance("(ln D)^2"),
        other => other,
    })?;
    let (a, b) = (fit.intercept, fit.slope);
    if b >= 0.0 {
        return Err(FitError::Divergent(b));
    }
    let closed_form = |a: f64, b: f64| -> Option<f64> {
        let radicand = (delta.ln() - a) / b;
        if radicand >= 0.0 && b < 0.0 {
            Some(radicand.sqrt().exp())
        } else {
            None
        }
    };
    let d_est = closed_form(a, b).ok_or(FitError::Divergent(b))?;

    let mut corners = Vec::with_capacity(4);
    let mut excluded = 0usize;
    for da in [-1.96, 1.96] {
        for db in [-1.96, 1.96] {
            match closed_form(a + da * fit.intercept_se, b + db * fit.slope_se) {
                Some(v) => corners.push(v),
                None => excluded += 1,
            }
        }
    }
    let interval = if corners.is_empty() {
        (d_est, d_est)
    } else {
        (
            corners.iter().copied().fold(f64::INFINITY, f64::min),
            corners.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        )
    };
    Ok(BondDimensionFit {
        a,
        b,
        sigma_a: fit.intercept_se,
        sigma_b: fit.slope_se,
        d_est,
        d_est_interval: interval,
        excluded_corners: excluded,
    })
}

/// Cubic CPU-time forecast T(target) = T(D_ref)·(target/D_ref)³, anchored on
/// the largest-D point that carries timing data.
pub fn cpu_time_forecast(points: &[DmrgPoint], target_d: u32) -> Result<f64, FitError> {
    if target_d == 0 {
        return Err(FitError::OutOfRange {
            name: "target_d",
            value: 0.0,
            constraint: ">= 1",
        });
    }
    let reference = points
        .iter()
        .filter(|p| p.cpu_hours.is_some())
        .max_by_key(|p| p.bond_dimension)
        .ok_or(FitError::NoTimingData)?;
    let hours = reference.cpu_hours.expect("filtered on presence");
    let ratio = f64::from(target_d) / f64::from(reference.bond_dimension);
    Ok(hours * ratio * ratio * ratio)
}

/// Parses a DMRG series CSV with header
/// `bond_dimension,energy,truncated_weight,cpu_hours`; the last column may be
/// empty or absent.
pub fn parse_series_csv(text: &str, source: &str) -> Result<Vec<DmrgPoint>, FitError> {
    let err = |line: usize, message: String| FitError::Csv {
        path: source.to_string(),
        line,
        message,
    };
    let mut lines = text.lines().enumerate();
    let Some((_, header)) = lines.next() else {
        return Err(err(1, "empty file".into()));
    };
    let header_fields: Vec<&str> = header.split(',').map(str::trim).collect();
    let expected = ["bond_dimension", "energy", "truncated_weight"];
    if header_fields.len() < 3
        || header_fields[..3] != expected
        || (header_fields.len() == 4 && header_fields[3] != "cpu_hours")
        || header_fields.len() > 4
    {
        return Err(err(
            1,
            format!(
                "expected header `bond_dimension,energy,truncated_weight[,cpu_hours]`, found {header:?}"
            ),
        ));
    }
    let mut points = Vec::new();
    for (idx, line) in lines {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() < 3 || fields.len() > 4 {
            return Err(err(line_no, format!("expected 3 or 4 fields, found {}", fields.len())));
        }
        let bond_dimension = fields[0]
            .parse::<u32>()
            .map_err(|e| err(line_no, format!("invalid bond_dimension {:?}: {e}", fields[0])))?;
        if bond_dimension == 0 {
            return Err(err(line_no, "bond_dimension must be >= 1".into()));
        }
        let energy = fields[1]
            .parse::<f64>()
            .map_err(|e| err(line_no, format!("invalid energy {:?}: {e}", fields[1])))?;
        let truncated_weight = fields[2].parse::<f64>().map_err(|e| {
            err(line_no, format!("invalid truncated_weight {:?}: {e}", fields[2]))
        })?;
        if !truncated_weight.is_finite() || truncated_weight < 0.0 {
            return Err(err(line_no, "truncated_weight must be >= 0".into()));
        }
        let cpu_hours = match fields.get(3) {
            None => None,
            Some(&"") => None,
            Some(s) => {
                let v = s
                    .parse::<f64>()
                    .map_err(|e| err(line_no, format!("invalid cpu_hours {s:?}: {e}")))?;
                if !v.is_finite() || v < 0.0 {
                    return Err(err(line_no, "cpu_hours must be >= 0".into()));
                }
                Some(v)
            }
        };
        points.push(DmrgPoint {
            bond_dimension,
            energy,
            truncated_weight,
            cpu_hours,
        });
    }
    Ok(points)
}

/// Reads a DMRG series CSV file.
pub fn load_series_csv<P: AsRef<Path>>(path: P) -> Result<Vec<DmrgPoint>, FitError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| FitError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_series_csv(&text, &path.display().to_string())
}

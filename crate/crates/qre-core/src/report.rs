//! Deterministic report assembly: CSV tables, plot-data series, and a
//! human-readable summary.
//!
//! Output files are built fully in memory so identical inputs produce
//! byte-identical bytes; ordering follows the catalog everywhere. Sections
//! without data are omitted with a notice rather than failing, and
//! molecule-id sets that disagree between sections are flagged the same way.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::num::NonZeroU64;
use std::path::Path;

use thiserror::Error;

use crate::catalog::HamiltonianInstance;
use crate::logical::{LogicalResourceEstimate, LpblissReduction};
use crate::physical::PhysicalResourceEstimate;
use crate::utility::{classical_cost, quantum_share, ComparisonRow, CostModel, DmrgSummaryRow};

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("nothing to report: every section is empty")]
    Empty,
    #[error("failed to write {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// Everything a report can draw from. Empty slices are allowed; at least one
/// section must be populated.
#[derive(Debug, Clone, Copy, Default)]
pub struct ReportInputs<'a> {
    pub catalog: &'a [HamiltonianInstance],
    pub logical: &'a [LogicalResourceEstimate],
    pub logical_lpbliss: &'a [LogicalResourceEstimate],
    pub reductions: &'a [LpblissReduction],
    pub physical: &'a [PhysicalResourceEstimate],
    /// (molecule_id, n_orbitals, δ̄, runtime hours) sweep points.
    pub sweep: &'a [(String, u32, f64, f64)],
    pub dmrg: &'a [DmrgSummaryRow],
    pub cost: CostModel,
    /// Parallelization grid for the quantum-share series.
    pub cpus: &'a [u64],
}

/// A rendered report: named files plus assembly notices.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub files: Vec<(String, String)>,
    pub notices: Vec<String>,
}

impl Report {
    pub fn file(&self, name: &str) -> Option<&str> {
        self.files
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, body)| body.as_str())
    }
}

/// Note attached to priced outputs: the rate arithmetic is computed exactly,
/// and a commonly quoted rounded figure differs from the product.
pub const COST_FOOTNOTE: &str = "costs are cpu_hours x rate computed exactly; note that \
65,000 CPU-hours at $0.04/CPU-hour is $2,600, not the sometimes-quoted $2,800";

/// Assembles the full report deterministically.
pub fn emit_report(inputs: &ReportInputs<'_>) -> Result<Report, ReportError> {
    let any = !inputs.catalog.is_empty()
        || !inputs.logical.is_empty()
        || !inputs.logical_lpbliss.is_empty()
        || !inputs.reductions.is_empty()
        || !inputs.physical.is_empty()
        || !inputs.sweep.is_empty()
        || !inputs.dmrg.is_empty();
    if !any {
        return Err(ReportError::Empty);
    }

    let mut files: Vec<(String, String)> = Vec::new();
    let mut notices: Vec<String> = Vec::new();
    let skipped = |name: &str, notices: &mut Vec<String>| {
        notices.push(format!("section {name} omitted: no data"));
    };

    // Catalog overview.
    if inputs.catalog.is_empty() {
        skipped("catalog_overview", &mut notices);
    } else {
        let mut csv = String::from(
            "molecule_id,reaction,n_orbitals,n_electrons,charge,multiplicity,hilbert_log10,overlap_gamma\n",
        );
        for inst in inputs.catalog {
            let hilbert = inst
                .hilbert_space_log10()
                .map(|v| v.to_string())
                .unwrap_or_default();
            writeln!(
                csv,
                "{},{},{},{},{},{},{},{}",
                inst.molecule_id,
                inst.reaction.as_deref().unwrap_or(""),
                inst.n_orbitals,
                inst.n_electrons,
                inst.charge,
                inst.multiplicity,
                hilbert,
                inst.overlap_gamma
            )
            .expect("writing to String cannot fail");
        }
        files.push(("catalog_overview.csv".into(), csv));

        let mut csv = String::from(
            "molecule_id,n_orbitals,pauli_l1,df_l1,pauli_l1_lpbliss,df_l1_lpbliss,half_width_fs_hf,half_width_ens_hf,a_over_c,b_over_c\n",
        );
        for inst in inputs.catalog {
            let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
            let ratios = crate::catalog::norm_reduction_ratios(&inst.norms).ok();
            writeln!(
                csv,
                "{},{},{},{},{},{},{},{},{},{}",
                inst.molecule_id,
                inst.n_orbitals,
                opt(inst.norms.pauli_l1),
                inst.norms.df_l1,
                opt(inst.norms.pauli_l1_lpbliss),
                opt(inst.norms.df_l1_lpbliss),
                opt(inst.norms.half_width_fs_hf),
                opt(inst.norms.half_width_ens_hf),
                opt(ratios.map(|r| r.0)),
                opt(ratios.map(|r| r.1)),
            )
            .expect("writing to String cannot fail");
        }
        files.push(("norm_ratios.csv".into(), csv));
    }

    // Logical estimates, original and treated.
    for (name, rows) in [
        ("logical_estimates.csv", inputs.logical),
        ("logical_estimates_lpbliss.csv", inputs.logical_lpbliss),
    ] {
        if rows.is_empty() {
            skipped(name.trim_end_matches(".csv"), &mut notices);
            continue;
        }
        files.push((name.into(), logical_csv(rows)));
    }

    if inputs.reductions.is_empty() {
        skipped("lpbliss_reduction", &mut notices);
    } else {
        let mut csv = String::from("molecule_id,n_orbitals,toffoli_ratio,qubit_ratio,shots_equal\n");
        for r in inputs.reductions {
            writeln!(
                csv,
                "{},{},{},{},{}",
                r.molecule_id, r.n_orbitals, r.toffoli_ratio, r.qubit_ratio, r.shots_equal
            )
            .expect("writing to String cannot fail");
        }
        files.push(("lpbliss_reduction.csv".into(), csv));
    }

    if inputs.physical.is_empty() {
        skipped("physical_estimates", &mut notices);
    } else {
        files.push(("physical_estimates.csv".into(), physical_csv(inputs.physical)));

        // Runtime-versus-qubits plot data, aggregated per reaction.
        let mut groups: Vec<(String, f64, u64)> = Vec::new();
        for est in inputs.physical {
            let reaction = inputs
                .catalog
                .iter()
                .find(|i| i.molecule_id == est.molecule_id && i.n_orbitals == est.n_orbitals)
                .and_then(|i| i.reaction.clone())
                .unwrap_or_else(|| "all".into());
            match groups.iter_mut().find(|(r, _, _)| *r == reaction) {
                Some((_, hours, qubits)) => {
                    *hours += est.runtime_hours;
                    *qubits = (*qubits).max(est.physical_qubits);
                }
                None => groups.push((reaction, est.runtime_hours, est.physical_qubits)),
            }
        }
        let mut csv = String::from("reaction,total_runtime_hours,max_physical_qubits\n");
        for (reaction, hours, qubits) in &groups {
            writeln!(csv, "{reaction},{hours},{qubits}").expect("writing to String cannot fail");
        }
        files.push(("runtime_vs_qubits.csv".into(), csv));
    }

    if inputs.sweep.is_empty() {
        skipped("runtime_vs_failure", &mut notices);
    } else {
        files.push(("runtime_vs_failure.csv".into(), sweep_csv(inputs.sweep)));
    }

    if inputs.dmrg.is_empty() {
        skipped("dmrg_extrapolation", &mut notices);
    } else {
        let mut csv = String::from(
            "molecule_id,n_orbitals,bond_dimension,energy,cpu_hours,e_est,e_est_ci95,d_est,d_est_min,d_est_max\n",
        );
        for row in inputs.dmrg {
            writeln!(
                csv,
                "{},{},{},{},{},{},{},{},{},{}",
                row.molecule_id,
                row.n_orbitals,
                row.bond_dimension,
                row.energy,
                row.cpu_hours.map(|v| v.to_string()).unwrap_or_default(),
                row.e_est,
                row.e_est_ci95,
                row.d_est,
                row.d_est_min,
                row.d_est_max
            )
            .expect("writing to String cannot fail");
        }
        files.push(("dmrg_extrapolation.csv".into(), csv));

        let mut csv = String::from("molecule_id,n_orbitals,cpu_hours_forecast,cost_usd\n");
        for row in inputs.dmrg {
            let Some(forecast) = row.forecast_cpu_hours() else {
                notices.push(format!(
                    "classical cost: {} ({} orbitals) has no timing data",
                    row.molecule_id, row.n_orbitals
                ));
                continue;
            };
            writeln!(
                csv,
                "{},{},{},{}",
                row.molecule_id,
                row.n_orbitals,
                forecast,
                classical_cost(forecast, &inputs.cost)
            )
            .expect("writing to String cannot fail");
        }
        csv.push_str(&format!("# {COST_FOOTNOTE}\n"));
        files.push(("classical_cost.csv".into(), csv));
    }

    // Quantum-share series needs both sides of the comparison.
    let comparison = comparison_rows(inputs);
    if comparison.is_empty() {
        skipped("quantum_share", &mut notices);
    } else {
        let mut csv = String::from(
            "molecule_id,n_orbitals,parallel_cpus,classical_cpu_hours,quantum_runtime_hours,quantum_share_percent\n",
        );
        for row in &comparison {
            writeln!(
                csv,
                "{},{},{},{},{},{}",
                row.molecule_id,
                row.n_orbitals,
                row.parallel_cpus,
                row.classical_cpu_hours,
                row.quantum_runtime_hours,
                row.quantum_share_percent
            )
            .expect("writing to String cannot fail");
        }
        files.push(("quantum_share.csv".into(), csv));
    }

    // Cross-section id consistency: flagged, never fatal.
    let id_set = |ids: Vec<(String, u32)>| ids.into_iter().collect::<BTreeSet<_>>();
    let logical_ids = id_set(
        inputs
            .logical
            .iter()
            .map(|e| (e.molecule_id.clone(), e.n_orbitals))
            .collect(),
    );
    let physical_ids = id_set(
        inputs
            .physical
            .iter()
            .map(|e| (e.molecule_id.clone(), e.n_orbitals))
            .collect(),
    );
    if !inputs.physical.is_empty() && logical_ids != physical_ids {
        for (id, n) in logical_ids.symmetric_difference(&physical_ids) {
            notices.push(format!(
                "molecule sets disagree between logical and physical sections: {id} ({n} orbitals)"
            ));
        }
    }

    notices.sort();
    files.push(("report.txt".into(), summary_text(inputs, &comparison, &notices)));
    Ok(Report { files, notices })
}

/// CSV of logical estimates in the published column order.
pub fn logical_csv(rows: &[LogicalResourceEstimate]) -> String {
    let mut csv = String::from(
        "molecule_id,n_orbitals,shots,shot_hw_tolerance,toffoli_per_shot,logical_qubits,overlap_gamma\n",
    );
    for est in rows {
        writeln!(
            csv,
            "{},{},{},{},{},{},{}",
            est.molecule_id,
            est.n_orbitals,
            est.shots,
            est.shot_hw_tolerance,
            est.toffoli_per_shot,
            est.logical_qubits,
            est.overlap_gamma
        )
        .expect("writing to String cannot fail");
    }
    csv
}

/// CSV of physical estimates in the published column order, plus the chosen
/// configuration.
pub fn physical_csv(rows: &[PhysicalResourceEstimate]) -> String {
    let mut csv = String::from(
        "molecule_id,n_orbitals,shots,runtime_hours,physical_qubits,code_distance,factory,spacetime_volume\n",
    );
    for est in rows {
        writeln!(
            csv,
            "{},{},{},{},{},{},{},{}",
            est.molecule_id,
            est.n_orbitals,
            est.shots,
            est.runtime_hours,
            est.physical_qubits,
            est.code_distance,
            est.factory,
            est.spacetime_volume
        )
        .expect("writing to String cannot fail");
    }
    csv
}

/// CSV of (δ̄, runtime) sweep points.
pub fn sweep_csv(points: &[(String, u32, f64, f64)]) -> String {
    let mut csv = String::from("molecule_id,n_orbitals,delta_bar,runtime_hours\n");
    for (id, n_orbitals, delta_bar, hours) in points {
        writeln!(csv, "{id},{n_orbitals},{delta_bar},{hours}")
            .expect("writing to String cannot fail");
    }
    csv
}

/// Pairs physical runtimes with forecast classical hours on the CPU grid.
fn comparison_rows(inputs: &ReportInputs<'_>) -> Vec<ComparisonRow> {
    let mut rows = Vec::new();
    if inputs.cpus.is_empty() {
        return rows;
    }
    for est in inputs.physical {
        let Some(summary) = inputs
            .dmrg
            .iter()
            .find(|r| r.molecule_id == est.molecule_id && r.n_orbitals == est.n_orbitals)
        else {
            continue;
        };
        let Some(classical_hours) = summary.forecast_cpu_hours() else {
            continue;
        };
        for &p in inputs.cpus {
            let Some(cpus) = NonZeroU64::new(p) else {
                continue;
            };
            rows.push(ComparisonRow {
                molecule_id: est.molecule_id.clone(),
                n_orbitals: est.n_orbitals,
                classical_cpu_hours: classical_hours,
                classical_cost_usd: classical_cost(classical_hours, &inputs.cost),
                quantum_runtime_hours: est.runtime_hours,
                parallel_cpus: p,
                quantum_share_percent: quantum_share(est.runtime_hours, classical_hours, cpus),
            });
        }
    }
    rows
}

fn summary_text(
    inputs: &ReportInputs<'_>,
    comparison: &[ComparisonRow],
    notices: &[String],
) -> String {
    let mut out = String::new();
    out.push_str("resource estimation report\n");
    out.push_str("==========================\n\n");

    if !inputs.catalog.is_empty() {
        writeln!(out, "catalog: {} instances", inputs.catalog.len()).unwrap();
        writeln!(
            out,
            "{:<14} {:>4} {:>4} {:>7} {:>5} {:>8} {:>8}",
            "molecule", "N_o", "N_e", "charge", "mult", "log10(H)", "|gamma|"
        )
        .unwrap();
        for inst in inputs.catalog {
            writeln!(
                out,
                "{:<14} {:>4} {:>4} {:>7} {:>5} {:>8} {:>8}",
                inst.molecule_id,
                inst.n_orbitals,
                inst.n_electrons,
                inst.charge,
                inst.multiplicity,
                inst.hilbert_space_log10()
                    .map(|v| v.to_string())
                    .unwrap_or_else(|_| "-".into()),
                inst.overlap_gamma
            )
            .unwrap();
        }
        out.push('\n');
    }

    if !inputs.logical.is_empty() {
        writeln!(out, "logical estimates: {} instances", inputs.logical.len()).unwrap();
        writeln!(
            out,
            "{:<14} {:>4} {:>3} {:>10} {:>14} {:>7}",
            "molecule", "N_o", "M", "tol/shot", "toffoli/shot", "qubits"
        )
        .unwrap();
        for est in inputs.logical {
            writeln!(
                out,
                "{:<14} {:>4} {:>3} {:>10.3e} {:>14.3e} {:>7}",
                est.molecule_id,
                est.n_orbitals,
                est.shots,
                est.shot_hw_tolerance,
                est.toffoli_per_shot as f64,
                est.logical_qubits
            )
            .unwrap();
        }
        out.push('\n');
    }

    if !inputs.physical.is_empty() {
        writeln!(out, "physical estimates: {} instances", inputs.physical.len()).unwrap();
        writeln!(
            out,
            "{:<14} {:>4} {:>3} {:>12} {:>12} {:>4} {:<14}",
            "molecule", "N_o", "M", "T_hr", "N_phys", "d", "factory"
        )
        .unwrap();
        for est in inputs.physical {
            writeln!(
                out,
                "{:<14} {:>4} {:>3} {:>12.3e} {:>12.3e} {:>4} {:<14}",
                est.molecule_id,
                est.n_orbitals,
                est.shots,
                est.runtime_hours,
                est.physical_qubits as f64,
                est.code_distance,
                est.factory
            )
            .unwrap();
        }
        out.push('\n');
    }

    if !comparison.is_empty() {
        writeln!(out, "quantum share of compute (artifact-defined metric)").unwrap();
        writeln!(
            out,
            "{:<14} {:>4} {:>6} {:>14} {:>12} {:>8}",
            "molecule", "N_o", "CPUs", "classical_hrs", "quantum_hrs", "share_%"
        )
        .unwrap();
        for row in comparison {
            writeln!(
                out,
                "{:<14} {:>4} {:>6} {:>14.3e} {:>12.3e} {:>8.3}",
                row.molecule_id,
                row.n_orbitals,
                row.parallel_cpus,
                row.classical_cpu_hours,
                row.quantum_runtime_hours,
                row.quantum_share_percent
            )
            .unwrap();
        }
        out.push('\n');
    }

    if !inputs.dmrg.is_empty() {
        writeln!(out, "note: {COST_FOOTNOTE}").unwrap();
        out.push('\n');
    }

    if !notices.is_empty() {
        out.push_str("notices:\n");
        for notice in notices {
            writeln!(out, "  - {notice}").unwrap();
        }
    }
    out
}

/// Writes every report file under `dir`, creating it if needed.
pub fn write_report<P: AsRef<Path>>(report: &Report, dir: P) -> Result<(), ReportError> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir).map_err(|source| ReportError::Io {
        path: dir.display().to_string(),
        source,
    })?;
    for (name, body) in &report.files {
        let path = dir.join(name);
        std::fs::write(&path, body).map_err(|source| ReportError::Io {
            path: path.display().to_string(),
            source,
        })?;
    }
    Ok(())
}

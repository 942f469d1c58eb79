//! `qre` — resource estimation for electronic-structure Hamiltonian catalogs.
//!
//! Exit codes: 0 success, 1 validation error, 2 infeasibility, 3 I/O error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use qre_core::catalog::{self, Catalog, HamiltonianInstance, NormVariant};
use qre_core::dmrg;
use qre_core::logical::{self, BlockEncodingCostModel, LogicalError, LogicalResourceEstimate};
use qre_core::physical::{self, FactorySpec, PhysicalArchitecture, PhysicalError};
use qre_core::qpe::{self, ErrorBudget, ParameterError};
use qre_core::report::{self, emit_report, ReportInputs};
use qre_core::utility::{self, CostModel, UtilityError};

#[derive(Parser)]
#[command(
    name = "qre",
    version,
    about = "Fault-tolerant quantum resource estimation for electronic-structure Hamiltonians"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Inspect and validate instance catalogs.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
    /// Logical and physical resource estimation.
    Estimate {
        #[command(subcommand)]
        action: EstimateAction,
    },
    /// DMRG convergence-series analysis.
    Dmrg {
        #[command(subcommand)]
        action: DmrgAction,
    },
    /// Quantum-versus-classical utility reporting.
    Utility {
        #[command(subcommand)]
        action: UtilityAction,
    },
}

#[derive(Subcommand)]
enum CatalogAction {
    /// Parse a catalog file and check every instance invariant.
    Validate { file: PathBuf },
}

#[derive(Copy, Clone, ValueEnum)]
enum OutputFormat {
    Csv,
    Table,
}

#[derive(Args)]
struct BudgetArgs {
    /// Total allowed energy error, Hartree.
    #[arg(long, default_value_t = 1.6e-3)]
    epsilon: f64,
    /// Total allowed failure probability.
    #[arg(long, default_value_t = 0.01)]
    delta: f64,
}

#[derive(Subcommand)]
enum EstimateAction {
    /// Per-shot Toffoli and logical-qubit estimates.
    Logical {
        catalog: PathBuf,
        #[command(flatten)]
        budget: BudgetArgs,
        /// Use the symmetry-shift-treated norms and anchors.
        #[arg(long)]
        lpbliss: bool,
        /// Directory to write the CSV into, in addition to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
        format: OutputFormat,
    },
    /// Physical-qubit and runtime estimates on the surface-code architecture.
    Physical {
        catalog: PathBuf,
        #[command(flatten)]
        budget: BudgetArgs,
        /// Architecture and factory-catalog configuration file.
        #[arg(long)]
        arch: Option<PathBuf>,
        /// Sweep these failure budgets instead of a single estimate.
        #[arg(long, value_delimiter = ',')]
        sweep: Option<Vec<f64>>,
        /// Use the symmetry-shift-treated norms and anchors.
        #[arg(long)]
        lpbliss: bool,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
        format: OutputFormat,
    },
}

#[derive(Subcommand)]
enum DmrgAction {
    /// Extrapolate a convergence series to zero truncated weight.
    Extrapolate {
        series: PathBuf,
        /// Target accuracy for the bond-dimension extrapolation, Hartree.
        #[arg(long, default_value_t = dmrg::DEFAULT_BOND_ACCURACY_HA)]
        delta: f64,
        #[arg(long, value_enum, default_value_t = OutputFormat::Table)]
        format: OutputFormat,
    },
}

#[derive(Subcommand)]
enum UtilityAction {
    /// Assemble the full comparison report.
    Report {
        catalog: PathBuf,
        /// Classical parallelization grid.
        #[arg(long, value_delimiter = ',', default_value = "1,2,4,8,16,32,64,128,256,512")]
        cpus: Vec<u64>,
        #[arg(long)]
        arch: Option<PathBuf>,
        /// Published DMRG summary CSV for the classical side.
        #[arg(long)]
        dmrg_summary: Option<PathBuf>,
        /// Failure budgets for the runtime-versus-failure sweep.
        #[arg(long, value_delimiter = ',', default_value = "0.01,0.33")]
        sweep: Vec<f64>,
        #[command(flatten)]
        budget: BudgetArgs,
        /// Output directory for the report files.
        #[arg(long, default_value = "report")]
        out: PathBuf,
    },
}

enum CliError {
    Validation(String),
    Infeasible(String),
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Infeasible(_) => 2,
            CliError::Io(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Validation(m) | CliError::Infeasible(m) | CliError::Io(m) => m,
        }
    }
}

impl From<catalog::CatalogError> for CliError {
    fn from(e: catalog::CatalogError) -> Self {
        match e {
            catalog::CatalogError::Io { .. } => CliError::Io(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<ParameterError> for CliError {
    fn from(e: ParameterError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<LogicalError> for CliError {
    fn from(e: LogicalError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<PhysicalError> for CliError {
    fn from(e: PhysicalError) -> Self {
        match e {
            PhysicalError::Io { .. } => CliError::Io(e.to_string()),
            PhysicalError::Infeasible { .. } => CliError::Infeasible(e.to_string()),
            PhysicalError::Logical(inner) => CliError::Validation(inner.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<dmrg::FitError> for CliError {
    fn from(e: dmrg::FitError) -> Self {
        match e {
            dmrg::FitError::Io { .. } => CliError::Io(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<UtilityError> for CliError {
    fn from(e: UtilityError) -> Self {
        match e {
            UtilityError::Io { .. } => CliError::Io(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<report::ReportError> for CliError {
    fn from(e: report::ReportError) -> Self {
        match e {
            report::ReportError::Io { .. } => CliError::Io(e.to_string()),
            report::ReportError::Empty => CliError::Validation(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Catalog {
            action: CatalogAction::Validate { file },
        } => {
            let cat = catalog::load_catalog(&file)?;
            for warning in &cat.warnings {
                eprintln!("warning: {warning}");
            }
            println!(
                "catalog OK: {} instances, {} warnings",
                cat.instances.len(),
                cat.warnings.len()
            );
            Ok(())
        }
        Command::Estimate { action } => run_estimate(action),
        Command::Dmrg { action } => run_dmrg(action),
        Command::Utility { action } => run_utility(action),
    }
}

fn budget_of(args: &BudgetArgs) -> Result<ErrorBudget, CliError> {
    Ok(qpe::split_budget(args.epsilon, args.delta)?)
}

fn variant_of(lpbliss: bool) -> NormVariant {
    if lpbliss {
        NormVariant::Lpbliss
    } else {
        NormVariant::Original
    }
}

/// Instances that can be estimated under `variant`; skipped ones are
/// reported on stderr.
fn anchored_instances(cat: &Catalog, variant: NormVariant) -> Vec<HamiltonianInstance> {
    let mut usable = Vec::new();
    for inst in &cat.instances {
        let has_lambda = inst.norms.lambda(variant).is_some();
        let has_anchor = inst.anchor(variant).is_some();
        if has_lambda && has_anchor {
            usable.push(inst.clone());
        } else {
            eprintln!(
                "notice: skipping {} (missing {} {})",
                inst.key(),
                variant,
                if has_lambda { "anchor" } else { "norm" }
            );
        }
    }
    usable
}

fn load_arch(
    path: &Option<PathBuf>,
) -> Result<(PhysicalArchitecture, Vec<FactorySpec>), CliError> {
    Ok(match path {
        Some(p) => physical::load_architecture_config(p)?,
        None => physical::parse_architecture_config(
            physical::builtin_architecture_config(),
            "<builtin architecture.cfg>",
        )?,
    })
}

fn estimate_all_logical(
    instances: &[HamiltonianInstance],
    budget: &ErrorBudget,
    model: &BlockEncodingCostModel,
    variant: NormVariant,
) -> Result<Vec<LogicalResourceEstimate>, CliError> {
    instances
        .iter()
        .map(|inst| Ok(logical::estimate_logical_variant(inst, budget, model, variant)?))
        .collect()
}

fn write_out(out: &Option<PathBuf>, name: &str, body: &str) -> Result<(), CliError> {
    if let Some(dir) = out {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join(name), body)?;
    }
    Ok(())
}

fn run_estimate(action: EstimateAction) -> Result<(), CliError> {
    match action {
        EstimateAction::Logical {
            catalog: catalog_path,
            budget,
            lpbliss,
            out,
            format,
        } => {
            let cat = catalog::load_catalog(&catalog_path)?;
            let budget = budget_of(&budget)?;
            let variant = variant_of(lpbliss);
            let instances = anchored_instances(&cat, variant);
            let model = logical::calibrate_cost_model(&instances, &budget, variant)?;
            for warning in model.warnings() {
                eprintln!("warning: {warning}");
            }
            let estimates = estimate_all_logical(&instances, &budget, &model, variant)?;
            let csv = report::logical_csv(&estimates);
            match format {
                OutputFormat::Csv => print!("{csv}"),
                OutputFormat::Table => print_logical_table(&estimates),
            }
            write_out(&out, "logical_estimates.csv", &csv)
        }
        EstimateAction::Physical {
            catalog: catalog_path,
            budget,
            arch,
            sweep,
            lpbliss,
            out,
            format,
        } => {
            let cat = catalog::load_catalog(&catalog_path)?;
            let budget = budget_of(&budget)?;
            let variant = variant_of(lpbliss);
            let (arch, factories) = load_arch(&arch)?;
            let instances = anchored_instances(&cat, variant);
            let model = logical::calibrate_cost_model(&instances, &budget, variant)?;
            for warning in model.warnings() {
                eprintln!("warning: {warning}");
            }
            if let Some(delta_bars) = sweep {
                let mut points = Vec::new();
                for inst in &instances {
                    let series = physical::runtime_vs_failure_sweep(
                        inst,
                        budget.epsilon,
                        &delta_bars,
                        &arch,
                        &factories,
                        &model,
                        variant,
                    )?;
                    for (delta_bar, hours) in series {
                        points.push((inst.molecule_id.clone(), inst.n_orbitals, delta_bar, hours));
                    }
                }
                let csv = report::sweep_csv(&points);
                print!("{csv}");
                return write_out(&out, "runtime_vs_failure.csv", &csv);
            }
            let mut estimates = Vec::new();
            for inst in &instances {
                let logical_est =
                    logical::estimate_logical_variant(inst, &budget, &model, variant)?;
                estimates.push(physical::search_configuration(
                    &logical_est,
                    &arch,
                    &factories,
                )?);
            }
            let csv = report::physical_csv(&estimates);
            match format {
                OutputFormat::Csv => print!("{csv}"),
                OutputFormat::Table => print_physical_table(&estimates),
            }
            write_out(&out, "physical_estimates.csv", &csv)
        }
    }
}

fn run_dmrg(action: DmrgAction) -> Result<(), CliError> {
    let DmrgAction::Extrapolate {
        series,
        delta,
        format,
    } = action;
    let points = dmrg::load_series_csv(&series)?;
    let energy = dmrg::fit_energy_extrapolation(&points)?;
    let bond = match dmrg::fit_bond_dimension(&points, energy.e_est, delta) {
        Ok(fit) => {
            if fit.excluded_corners > 0 {
                eprintln!(
                    "warning: {} of 4 interval corners were complex-valued and excluded",
                    fit.excluded_corners
                );
            }
            Some(fit)
        }
        Err(e) => {
            eprintln!("notice: bond-dimension extrapolation unavailable: {e}");
            None
        }
    };
    match format {
        OutputFormat::Csv => {
            println!("e_est,slope,e_est_ci95,a,b,sigma_a,sigma_b,d_est,d_est_min,d_est_max");
            let bond_cols = bond
                .map(|b| {
                    format!(
                        "{},{},{},{},{},{},{}",
                        b.a,
                        b.b,
                        b.sigma_a,
                        b.sigma_b,
                        b.d_est,
                        b.d_est_interval.0,
                        b.d_est_interval.1
                    )
                })
                .unwrap_or_else(|| ",,,,,,".into());
            println!(
                "{},{},{},{}",
                energy.e_est, energy.slope, energy.e_est_ci95, bond_cols
            );
        }
        OutputFormat::Table => {
            println!("energy extrapolation over {} points", points.len());
            println!(
                "  E_est   = {:.6} +/- {:.6} (95% CI)",
                energy.e_est, energy.e_est_ci95
            );
            println!("  slope m = {:.6e}", energy.slope);
            match bond {
                Some(b) => {
                    println!("bond-dimension extrapolation to within {delta} Ha");
                    println!("  a = {:.6} (sigma {:.3e})", b.a, b.sigma_a);
                    println!("  b = {:.6} (sigma {:.3e})", b.b, b.sigma_b);
                    println!(
                        "  D_est = {:.0} [{:.0}, {:.0}]",
                        b.d_est, b.d_est_interval.0, b.d_est_interval.1
                    );
                }
                None => println!("bond-dimension extrapolation unavailable"),
            }
        }
    }
    Ok(())
}

fn run_utility(action: UtilityAction) -> Result<(), CliError> {
    let UtilityAction::Report {
        catalog: catalog_path,
        cpus,
        arch,
        dmrg_summary,
        sweep,
        budget,
        out,
    } = action;
    let cat = catalog::load_catalog(&catalog_path)?;
    let budget = budget_of(&budget)?;
    let (arch, factories) = load_arch(&arch)?;

    let original_instances = anchored_instances(&cat, NormVariant::Original);
    let model =
        logical::calibrate_cost_model(&original_instances, &budget, NormVariant::Original)?;
    let logical_estimates =
        estimate_all_logical(&original_instances, &budget, &model, NormVariant::Original)?;

    let treated_instances = anchored_instances(&cat, NormVariant::Lpbliss);
    let (logical_lpbliss, reductions) = if treated_instances.is_empty() {
        (Vec::new(), Vec::new())
    } else {
        let treated_model =
            logical::calibrate_cost_model(&treated_instances, &budget, NormVariant::Lpbliss)?;
        let treated = estimate_all_logical(
            &treated_instances,
            &budget,
            &treated_model,
            NormVariant::Lpbliss,
        )?;
        let mut reductions = Vec::new();
        for est in &treated {
            if let Some(original) = logical_estimates
                .iter()
                .find(|o| o.molecule_id == est.molecule_id && o.n_orbitals == est.n_orbitals)
            {
                reductions.push(logical::compare_lpbliss(original, est)?);
            }
        }
        (treated, reductions)
    };

    let mut physical_estimates = Vec::new();
    for est in &logical_estimates {
        physical_estimates.push(physical::search_configuration(est, &arch, &factories)?);
    }

    let mut sweep_points = Vec::new();
    for inst in &original_instances {
        let series = physical::runtime_vs_failure_sweep(
            inst,
            budget.epsilon,
            &sweep,
            &arch,
            &factories,
            &model,
            NormVariant::Original,
        )?;
        for (delta_bar, hours) in series {
            sweep_points.push((inst.molecule_id.clone(), inst.n_orbitals, delta_bar, hours));
        }
    }

    let summary = match &dmrg_summary {
        Some(path) => utility::load_summary_csv(path)?,
        None => Vec::new(),
    };

    let report = emit_report(&ReportInputs {
        catalog: &cat.instances,
        logical: &logical_estimates,
        logical_lpbliss: &logical_lpbliss,
        reductions: &reductions,
        physical: &physical_estimates,
        sweep: &sweep_points,
        dmrg: &summary,
        cost: CostModel::default(),
        cpus: &cpus,
    })?;
    report::write_report(&report, &out)?;
    for notice in &report.notices {
        eprintln!("notice: {notice}");
    }
    if let Some(text) = report.file("report.txt") {
        print!("{text}");
    }
    println!("report written to {}", out.display());
    Ok(())
}

fn print_logical_table(estimates: &[LogicalResourceEstimate]) {
    println!(
        "{:<14} {:>4} {:>3} {:>10} {:>14} {:>7} {:>8}",
        "molecule", "N_o", "M", "tol/shot", "toffoli/shot", "qubits", "|gamma|"
    );
    for est in estimates {
        println!(
            "{:<14} {:>4} {:>3} {:>10.3e} {:>14.3e} {:>7} {:>8}",
            est.molecule_id,
            est.n_orbitals,
            est.shots,
            est.shot_hw_tolerance,
            est.toffoli_per_shot as f64,
            est.logical_qubits,
            est.overlap_gamma
        );
    }
}

fn print_physical_table(estimates: &[physical::PhysicalResourceEstimate]) {
    println!(
        "{:<14} {:>4} {:>3} {:>12} {:>12} {:>4} {:<14}",
        "molecule", "N_o", "M", "T_hr", "N_phys", "d", "factory"
    );
    for est in estimates {
        println!(
            "{:<14} {:>4} {:>3} {:>12.3e} {:>12.3e} {:>4} {:<14}",
            est.molecule_id,
            est.n_orbitals,
            est.shots,
            est.runtime_hours,
            est.physical_qubits as f64,
            est.code_distance,
            est.factory
        );
    }
}

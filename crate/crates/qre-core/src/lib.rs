//! Resource-estimation toolkit for electronic-structure Hamiltonian instances.
//!
//! Given metadata describing a molecular Hamiltonian (orbital counts, block-encoding
//! L1 norms, initial-state overlap), the crate assigns quantum phase estimation
//! algorithm parameters under a total failure-probability budget, converts them into
//! logical and physical fault-tolerant resource estimates, extrapolates DMRG
//! convergence series, and compares quantum against classical compute costs.
//!
//! The crate is organised around six modules:
//!
//! * [`catalog`] — instance data model, file ingestion, and validation,
//! * [`qpe`] — error-budget splitting and phase-estimation parameter assignment,
//! * [`logical`] — Toffoli/qubit estimates through a pluggable block-encoding cost model,
//! * [`physical`] — surface-code distance and magic-state factory search,
//! * [`dmrg`] — convergence-series extrapolation with confidence intervals,
//! * [`utility`] and [`report`] — classical-cost comparison and report emission.
//!
//! All types are immutable after construction and all operations are pure
//! functions, so values can be shared freely across threads.

pub mod catalog;
pub mod dmrg;
pub mod logical;
pub mod physical;
pub mod qpe;
pub mod report;
pub mod utility;

pub use catalog::{
    hilbert_space_log10, load_catalog, norm_reduction_ratios, Catalog, CatalogError,
    HamiltonianInstance, NormRecord, NormVariant, ReferenceLogical, TruncationCurve,
};
pub use dmrg::{
    cpu_time_forecast, fit_bond_dimension, fit_energy_extrapolation, BondDimensionFit, DmrgPoint,
    EnergyExtrapolation, ExtrapolationResult, FitError,
};
pub use logical::{
    calibrate_cost_model, compare_lpbliss, estimate_logical, BlockEncodingCostModel, LogicalError,
    LogicalResourceEstimate, LpblissReduction,
};
pub use physical::{
    layout_footprint, logical_failure_per_timestep, runtime_vs_failure_sweep,
    search_configuration, shot_runtime, FactorySpec, PhysicalArchitecture, PhysicalError,
    PhysicalResourceEstimate,
};
pub use qpe::{
    assign_parameters, assign_parameters_variant, compute_angle_bits, compute_coeff_bits,
    compute_iterations, compute_shot_hw_tolerance, compute_shots, select_truncation_threshold,
    split_budget, total_rate_from_barrier, AlgorithmParameters, ErrorBudget, ParameterError,
};
pub use utility::{classical_cost, quantum_share, ComparisonRow, CostModel, DmrgSummaryRow};

//! Surface-code architecture model: code-distance and factory search
//! minimizing space-time volume subject to the per-shot failure budget.
//!
//! The layout stores logical patches on a 2-D grid of physical qubits with a
//! routing work area, and draws T states from parallel magic-state factories.
//! T production is rate limiting, so a shot's runtime is the T count divided
//! by the factory bandwidth. The per-shot failure budget δ′_HW is charged
//! with the logical Clifford volume error plus the distillation error, and
//! the search scans every odd code distance and every factory tier for the
//! feasible configuration of minimal physical-qubits × runtime volume.

use std::path::Path;

use thiserror::Error;

use crate::catalog::{HamiltonianInstance, NormVariant};
use crate::logical::{estimate_logical_variant, BlockEncodingCostModel, LogicalError,
    LogicalResourceEstimate};

#[derive(Debug, Error)]
pub enum PhysicalError {
    #[error("{name} = {value} is out of range ({constraint})")]
    OutOfRange {
        name: &'static str,
        value: f64,
        constraint: &'static str,
    },
    #[error("no feasible configuration for {instance}: {binding}")]
    Infeasible { instance: String, binding: String },
    #[error("failed to read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Config {
        path: String,
        line: usize,
        message: String,
    },
    #[error(transparent)]
    Logical(#[from] LogicalError),
}

/// Hardware and error-model parameters of the physical architecture.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalArchitecture {
    /// Seconds per surface-code cycle.
    pub cycle_time_s: f64,
    /// Physical gate error rate.
    pub phys_error_rate: f64,
    /// Parallel magic-state factories.
    pub n_factories: u64,
    /// T states consumed per Toffoli gate.
    pub t_per_toffoli: u64,
    /// Routing work-area patches as a fraction of storage patches.
    pub routing_overhead_factor: f64,
    /// Prefactor of the logical error model.
    pub error_model_prefactor: f64,
    /// Threshold of the logical error model.
    pub error_model_threshold: f64,
    /// Largest code distance scanned by the search.
    pub d_max: u32,
}

impl Default for PhysicalArchitecture {
    fn default() -> Self {
        PhysicalArchitecture {
            cycle_time_s: 1e-7,
            phys_error_rate: 1e-3,
            n_factories: 4,
            t_per_toffoli: 4,
            routing_overhead_factor: 0.5,
            error_model_prefactor: 0.1,
            error_model_threshold: 1e-2,
            d_max: 51,
        }
    }
}

impl PhysicalArchitecture {
    pub fn validate(&self) -> Result<(), PhysicalError> {
        let check = |name: &'static str, value: f64, ok: bool, constraint: &'static str| {
            if ok && value.is_finite() {
                Ok(())
            } else {
                Err(PhysicalError::OutOfRange {
                    name,
                    value,
                    constraint,
                })
            }
        };
        check("cycle_time_s", self.cycle_time_s, self.cycle_time_s > 0.0, "> 0")?;
        check(
            "phys_error_rate",
            self.phys_error_rate,
            self.phys_error_rate > 0.0 && self.phys_error_rate < 1.0,
            "in (0, 1)",
        )?;
        check("n_factories", self.n_factories as f64, self.n_factories >= 1, ">= 1")?;
        check("t_per_toffoli", self.t_per_toffoli as f64, self.t_per_toffoli >= 1, ">= 1")?;
        check(
            "routing_overhead_factor",
            self.routing_overhead_factor,
            self.routing_overhead_factor >= 0.0,
            ">= 0",
        )?;
        check(
            "error_model_prefactor",
            self.error_model_prefactor,
            self.error_model_prefactor > 0.0,
            "> 0",
        )?;
        check(
            "error_model_threshold",
            self.error_model_threshold,
            self.error_model_threshold > 0.0 && self.error_model_threshold < 1.0,
            "in (0, 1)",
        )?;
        check(
            "d_max",
            f64::from(self.d_max),
            self.d_max >= 3 && self.d_max % 2 == 1,
            "odd, >= 3",
        )?;
        Ok(())
    }
}

/// One magic-state factory tier: footprint, bandwidth, and output quality.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorySpec {
    pub name: String,
    pub physical_qubits: u64,
    /// Surface-code cycles per distilled T state.
    pub cycles_per_output: u64,
    /// Residual error probability per T state.
    pub output_error: f64,
}

impl FactorySpec {
    pub fn validate(&self) -> Result<(), PhysicalError> {
        if self.name.is_empty() || self.physical_qubits == 0 || self.cycles_per_output == 0 {
            return Err(PhysicalError::OutOfRange {
                name: "factory",
                value: 0.0,
                constraint: "name, physical_qubits, cycles_per_output must be non-empty/positive",
            });
        }
        if !self.output_error.is_finite() || self.output_error <= 0.0 || self.output_error >= 1.0 {
            return Err(PhysicalError::OutOfRange {
                name: "output_error",
                value: self.output_error,
                constraint: "in (0, 1)",
            });
        }
        Ok(())
    }
}

/// Physical resources for all shots of one instance.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalResourceEstimate {
    pub molecule_id: String,
    pub n_orbitals: u32,
    pub shots: u64,
    /// Total physical qubits, N_phys.
    pub physical_qubits: u64,
    /// Wall-clock hours for all shots run sequentially, T_hr.
    pub runtime_hours: f64,
    pub code_distance: u32,
    pub factory: String,
    /// physical_qubits × runtime_hours.
    pub spacetime_volume: f64,
}

/// Logical failure probability per logical patch per logical timestep
/// (one timestep = `distance` cycles):
/// prefactor · (phys_error_rate / threshold)^((distance + 1)/2).
pub fn logical_failure_per_timestep(
    distance: u32,
    arch: &PhysicalArchitecture,
) -> Result<f64, PhysicalError> {
    if distance < 3 || distance.is_multiple_of(2) {
        return Err(PhysicalError::OutOfRange {
            name: "distance",
            value: f64::from(distance),
            constraint: "odd, >= 3",
        });
    }
    let base = arch.phys_error_rate / arch.error_model_threshold;
    Ok(arch.error_model_prefactor * base.powf(f64::from(distance + 1) / 2.0))
}

/// Number of logical patches including the routing work area.
fn logical_patches(logical_qubits: u64, arch: &PhysicalArchitecture) -> u64 {
    ((1.0 + arch.routing_overhead_factor) * logical_qubits as f64).ceil() as u64
}

/// Total physical qubits: factories plus data-and-work patches of 2d²
/// physical qubits each.
pub fn layout_footprint(
    logical_qubits: u64,
    distance: u32,
    arch: &PhysicalArchitecture,
    factory: &FactorySpec,
) -> u64 {
    let patch = 2 * u64::from(distance) * u64::from(distance);
    arch.n_factories * factory.physical_qubits + logical_patches(logical_qubits, arch) * patch
}

/// Seconds to run one shot: T production is rate limiting, so the shot takes
/// (T count / factories) · cycles-per-T · cycle time.
pub fn shot_runtime(
    toffoli_per_shot: u64,
    _distance: u32,
    arch: &PhysicalArchitecture,
    factory: &FactorySpec,
) -> f64 {
    let t_count = toffoli_per_shot as f64 * arch.t_per_toffoli as f64;
    (t_count / arch.n_factories as f64) * factory.cycles_per_output as f64 * arch.cycle_time_s
}

/// Per-shot failure probability charged against δ′_HW: logical Clifford
/// volume error plus distillation error.
pub fn per_shot_failure(
    logical: &LogicalResourceEstimate,
    distance: u32,
    arch: &PhysicalArchitecture,
    factory: &FactorySpec,
) -> Result<f64, PhysicalError> {
    let t_count = logical.toffoli_per_shot as f64 * arch.t_per_toffoli as f64;
    let shot_cycles = (t_count / arch.n_factories as f64) * factory.cycles_per_output as f64;
    let timesteps = shot_cycles / f64::from(distance);
    let patches = logical_patches(logical.logical_qubits, arch) as f64;
    let clifford = timesteps * patches * logical_failure_per_timestep(distance, arch)?;
    let distillation = t_count * factory.output_error;
    Ok(clifford + distillation)
}

/// Exhaustive search over odd code distances in [3, d_max] and factory tiers
/// for the feasible configuration of minimal space-time volume.
///
/// Feasible means the per-shot failure stays at or below the estimate's
/// δ′_HW. Ties break toward the smaller distance, then the lexicographically
/// smaller factory name. Runtime aggregates all shots sequentially.
pub fn search_configuration(
    logical: &LogicalResourceEstimate,
    arch: &PhysicalArchitecture,
    factories: &[FactorySpec],
) -> Result<PhysicalResourceEstimate, PhysicalError> {
    arch.validate()?;
    if factories.is_empty() {
        return Err(PhysicalError::Infeasible {
            instance: logical.key().to_string(),
            binding: "factory catalog is empty".into(),
        });
    }
    for factory in factories {
        factory.validate()?;
    }

    let tolerance = logical.shot_hw_tolerance;
    let t_count = logical.toffoli_per_shot as f64 * arch.t_per_toffoli as f64;

    let mut best: Option<(f64, u32, &FactorySpec, u64, f64)> = None;
    let mut min_distillation = f64::INFINITY;
    let mut min_total = f64::INFINITY;
    for factory in factories {
        min_distillation = min_distillation.min(t_count * factory.output_error);
        let mut distance = 3u32;
        while distance <= arch.d_max {
            let failure = per_shot_failure(logical, distance, arch, factory)?;
            min_total = min_total.min(failure);
            if failure <= tolerance {
                let physical_qubits =
                    layout_footprint(logical.logical_qubits, distance, arch, factory);
                let seconds = shot_runtime(logical.toffoli_per_shot, distance, arch, factory);
                let runtime_hours = seconds * logical.shots as f64 / 3600.0;
                let volume = physical_qubits as f64 * runtime_hours;
                let better = match &best {
                    None => true,
                    Some((best_volume, best_distance, best_factory, _, _)) => {
                        (volume, distance, factory.name.as_str())
                            < (*best_volume, *best_distance, best_factory.name.as_str())
                    }
                };
                if better {
                    best = Some((volume, distance, factory, physical_qubits, runtime_hours));
                }
            }
            distance += 2;
        }
    }

    match best {
        Some((_, distance, factory, physical_qubits, runtime_hours)) => {
            Ok(PhysicalResourceEstimate {
                molecule_id: logical.molecule_id.clone(),
                n_orbitals: logical.n_orbitals,
                shots: logical.shots,
                physical_qubits,
                runtime_hours,
                code_distance: distance,
                factory: factory.name.clone(),
                spacetime_volume: physical_qubits as f64 * runtime_hours,
            })
        }
        None => {
            let binding = if min_distillation > tolerance {
                format!(
                    "distillation error alone ({min_distillation:.3e} per shot at best) exceeds \
                     the per-shot tolerance {tolerance:.3e} for every factory"
                )
            } else {
                format!(
                    "total per-shot failure ({min_total:.3e} at best) exceeds the tolerance \
                     {tolerance:.3e} up to d_max = {}",
                    arch.d_max
                )
            };
            Err(PhysicalError::Infeasible {
                instance: logical.key().to_string(),
                binding,
            })
        }
    }
}

/// Full pipeline (assign → logical → physical) at each failure budget δ̄,
/// returning (δ̄, total runtime hours) pairs.
///
/// The cost model stays fixed across the sweep: the per-iteration walk-step
/// cost is a property of the block encoding, not of the failure budget.
pub fn runtime_vs_failure_sweep(
    instance: &HamiltonianInstance,
    epsilon: f64,
    delta_bars: &[f64],
    arch: &PhysicalArchitecture,
    factories: &[FactorySpec],
    model: &BlockEncodingCostModel,
    variant: NormVariant,
) -> Result<Vec<(f64, f64)>, PhysicalError> {
    let mut points = Vec::with_capacity(delta_bars.len());
    for &delta_bar in delta_bars {
        let budget = crate::qpe::split_budget(epsilon, delta_bar).map_err(LogicalError::from)?;
        let logical = estimate_logical_variant(instance, &budget, model, variant)?;
        let physical = search_configuration(&logical, arch, factories)?;
        points.push((delta_bar, physical.runtime_hours));
    }
    Ok(points)
}

/// Parses an architecture configuration: an `[architecture]` block with the
/// fields of [`PhysicalArchitecture`] followed by one `[factory]` block per
/// tier. Omitted architecture fields keep their defaults.
pub fn parse_architecture_config(
    text: &str,
    source: &str,
) -> Result<(PhysicalArchitecture, Vec<FactorySpec>), PhysicalError> {
    let err = |line: usize, message: String| PhysicalError::Config {
        path: source.to_string(),
        line,
        message,
    };

    #[derive(PartialEq)]
    enum Section {
        None,
        Architecture,
        Factory,
    }

    // name, physical_qubits, cycles_per_output, output_error, starting line.
    type RawFactory = (Option<String>, Option<u64>, Option<u64>, Option<f64>, usize);

    let mut arch = PhysicalArchitecture::default();
    let mut factories: Vec<FactorySpec> = Vec::new();
    let mut section = Section::None;
    let mut current: Option<RawFactory> = None;

    let finish_factory = |current: &mut Option<RawFactory>,
                          factories: &mut Vec<FactorySpec>|
     -> Result<(), PhysicalError> {
        if let Some((name, qubits, cycles, error, start)) = current.take() {
            let missing = |field: &str| {
                PhysicalError::Config {
                    path: source.to_string(),
                    line: start,
                    message: format!("factory block is missing required field {field:?}"),
                }
            };
            let factory = FactorySpec {
                name: name.ok_or_else(|| missing("name"))?,
                physical_qubits: qubits.ok_or_else(|| missing("physical_qubits"))?,
                cycles_per_output: cycles.ok_or_else(|| missing("cycles_per_output"))?,
                output_error: error.ok_or_else(|| missing("output_error"))?,
            };
            factory.validate()?;
            factories.push(factory);
        }
        Ok(())
    };

    let mut saw_header = false;
    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw_line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if !saw_header {
            match line.strip_prefix("schema_version:").map(str::trim) {
                Some("1") => {
                    saw_header = true;
                    continue;
                }
                _ => {
                    return Err(err(
                        line_no,
                        "missing required `schema_version: 1` header".into(),
                    ))
                }
            }
        }
        match line {
            "[architecture]" => {
                finish_factory(&mut current, &mut factories)?;
                section = Section::Architecture;
                continue;
            }
            "[factory]" => {
                finish_factory(&mut current, &mut factories)?;
                section = Section::Factory;
                current = Some((None, None, None, None, line_no));
                continue;
            }
            _ => {}
        }
        let Some((key, value)) = line.split_once(':') else {
            return Err(err(line_no, format!("expected `key: value`, found {line:?}")));
        };
        let key = key.trim();
        let value = value.trim();
        let parse_f64 = || {
            value
                .parse::<f64>()
                .map_err(|e| err(line_no, format!("invalid number {value:?}: {e}")))
        };
        let parse_u64 = || -> Result<u64, PhysicalError> {
            let v = value
                .parse::<f64>()
                .map_err(|e| err(line_no, format!("invalid number {value:?}: {e}")))?;
            if !v.is_finite() || v < 0.0 || v.fract() != 0.0 || v > u64::MAX as f64 {
                return Err(err(line_no, format!("{value:?} is not a non-negative integer")));
            }
            Ok(v as u64)
        };
        match section {
            Section::Architecture => match key {
                "cycle_time_s" => arch.cycle_time_s = parse_f64()?,
                "phys_error_rate" => arch.phys_error_rate = parse_f64()?,
                "n_factories" => arch.n_factories = parse_u64()?,
                "t_per_toffoli" => arch.t_per_toffoli = parse_u64()?,
                "routing_overhead_factor" => arch.routing_overhead_factor = parse_f64()?,
                "error_model_prefactor" => arch.error_model_prefactor = parse_f64()?,
                "error_model_threshold" => arch.error_model_threshold = parse_f64()?,
                "d_max" => arch.d_max = parse_u64()? as u32,
                other => return Err(err(line_no, format!("unknown architecture field {other:?}"))),
            },
            Section::Factory => {
                let block = current.as_mut().expect("factory section has a block");
                match key {
                    "name" => block.0 = Some(value.to_string()),
                    "physical_qubits" => block.1 = Some(parse_u64()?),
                    "cycles_per_output" => block.2 = Some(parse_u64()?),
                    "output_error" => block.3 = Some(parse_f64()?),
                    other => return Err(err(line_no, format!("unknown factory field {other:?}"))),
                }
            }
            Section::None => {
                return Err(err(
                    line_no,
                    format!("field {key:?} appears outside a section"),
                ))
            }
        }
    }
    finish_factory(&mut current, &mut factories)?;
    arch.validate()?;
    Ok((arch, factories))
}

/// Reads an architecture configuration file.
pub fn load_architecture_config<P: AsRef<Path>>(
    path: P,
) -> Result<(PhysicalArchitecture, Vec<FactorySpec>), PhysicalError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| PhysicalError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_architecture_config(&text, &path.display().to_string())
}

/// The architecture configuration shipped with the repository.
pub fn builtin_architecture_config() -> &'static str {
    include_str!("../../../data/architecture.cfg")
}

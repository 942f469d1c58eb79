//! Hamiltonian instance metadata: data model, file ingestion, and validation.
//!
//! An instance catalog is a UTF-8 line-oriented text file. It starts with a
//! `schema_version: 1` header, followed by one `[instance]` block per record.
//! Each block holds `key: value` lines whose keys match the field names of
//! [`HamiltonianInstance`] and [`NormRecord`]; energies are in Hartree.
//! Unknown keys are rejected so typos cannot silently drop data.

use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;

use thiserror::Error;

/// Errors raised while loading or validating an instance catalog.
#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("failed to read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },
    #[error("instance {instance}: {field}: {message}")]
    Invalid {
        instance: String,
        field: &'static str,
        message: String,
    },
    #[error("instance {instance} is missing norm {field}")]
    MissingNorm {
        instance: String,
        field: &'static str,
    },
    #[error("inconsistent spin inputs: {0}")]
    SpinInconsistent(String),
}

/// Which L1 norm an estimator should draw from a [`NormRecord`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormVariant {
    /// The double-factorized norm of the untreated Hamiltonian.
    Original,
    /// The double-factorized norm after the symmetry-shift treatment.
    Lpbliss,
}

impl fmt::Display for NormVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormVariant::Original => write!(f, "original"),
            NormVariant::Lpbliss => write!(f, "lpbliss"),
        }
    }
}

/// L1 norms and spectral half-widths of one Hamiltonian, in Hartree.
///
/// `pauli_l1` and `df_l1` describe the untreated Hamiltonian; the `_lpbliss`
/// fields describe the symmetry-shifted variant. `half_width_fs_hf` and
/// `half_width_ens_hf` are Hartree-Fock approximations to half the spectral
/// width over the full Fock space and the electron-number subspace.
#[derive(Debug, Clone, PartialEq)]
pub struct NormRecord {
    pub pauli_l1: Option<f64>,
    pub df_l1: f64,
    pub pauli_l1_lpbliss: Option<f64>,
    pub df_l1_lpbliss: Option<f64>,
    pub half_width_fs_hf: Option<f64>,
    pub half_width_ens_hf: Option<f64>,
}

impl NormRecord {
    /// The L1 norm an estimator should use for `variant`, if present.
    pub fn lambda(&self, variant: NormVariant) -> Option<f64> {
        match variant {
            NormVariant::Original => Some(self.df_l1),
            NormVariant::Lpbliss => self.df_l1_lpbliss,
        }
    }
}

/// Calibration anchor: a published per-shot Toffoli count and logical qubit
/// count for one instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReferenceLogical {
    pub toffoli_count: u64,
    pub logical_qubits: u64,
}

/// Tabulated (threshold, energy) pairs from a Hamiltonian truncation scan.
///
/// The untruncated point `t = 0` must be present; it is the reference against
/// which truncation error is measured.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncationCurve {
    points: Vec<(f64, f64)>,
}

impl TruncationCurve {
    pub fn new(points: Vec<(f64, f64)>) -> Self {
        TruncationCurve { points }
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    /// Energy at `t = 0`, if the curve carries the untruncated point.
    pub fn untruncated_energy(&self) -> Option<f64> {
        self.points.iter().find(|(t, _)| *t == 0.0).map(|(_, e)| *e)
    }
}

/// One molecule/active-space record of the catalog.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianInstance {
    /// Short identifier, e.g. `MoN2-` or `1-Lut_Re`. Together with
    /// `n_orbitals` it identifies the instance uniquely.
    pub molecule_id: String,
    /// Optional reaction label used for report grouping.
    pub reaction: Option<String>,
    /// Spatial active-space orbitals.
    pub n_orbitals: u32,
    pub n_electrons: u32,
    pub charge: i32,
    /// Spin multiplicity 2S+1.
    pub multiplicity: u32,
    /// Absolute overlap between the prepared initial state and the ground state.
    pub overlap_gamma: f64,
    pub norms: NormRecord,
    pub truncation_curve: Option<TruncationCurve>,
    pub reference_logical: Option<ReferenceLogical>,
    pub reference_logical_lpbliss: Option<ReferenceLogical>,
}

impl HamiltonianInstance {
    /// `molecule_id (N_o orbitals)`, the unique label used in messages and maps.
    pub fn key(&self) -> InstanceKey {
        InstanceKey {
            molecule_id: self.molecule_id.clone(),
            n_orbitals: self.n_orbitals,
        }
    }

    /// Spin-orbital count 2·N_o.
    pub fn n_spin_orbitals(&self) -> u32 {
        2 * self.n_orbitals
    }

    /// The calibration anchor for `variant`, if present.
    pub fn anchor(&self, variant: NormVariant) -> Option<ReferenceLogical> {
        match variant {
            NormVariant::Original => self.reference_logical,
            NormVariant::Lpbliss => self.reference_logical_lpbliss,
        }
    }

    /// Floor of log10 of the determinant-space dimension of this instance.
    pub fn hilbert_space_log10(&self) -> Result<u32, CatalogError> {
        hilbert_space_log10(self.n_orbitals, self.n_electrons, self.multiplicity)
    }

    /// Checks every structural invariant, returning non-fatal observations.
    pub fn validate(&self) -> Result<Vec<String>, CatalogError> {
        let invalid = |field: &'static str, message: String| CatalogError::Invalid {
            instance: self.key().to_string(),
            field,
            message,
        };
        if self.molecule_id.is_empty() {
            return Err(invalid("molecule_id", "must not be empty".into()));
        }
        if self.n_orbitals == 0 {
            return Err(invalid("n_orbitals", "must be positive".into()));
        }
        if self.n_electrons == 0 {
            return Err(invalid("n_electrons", "must be positive".into()));
        }
        if self.multiplicity == 0 {
            return Err(invalid("multiplicity", "must be positive".into()));
        }
        if !(0.0..=1.0).contains(&self.overlap_gamma) {
            return Err(invalid(
                "overlap_gamma",
                format!("{} is outside [0, 1]", self.overlap_gamma),
            ));
        }
        if self.n_electrons > 2 * self.n_orbitals {
            return Err(invalid(
                "n_electrons",
                format!(
                    "{} electrons do not fit in {} orbitals",
                    self.n_electrons, self.n_orbitals
                ),
            ));
        }
        if !(self.n_electrons + self.multiplicity - 1).is_multiple_of(2) {
            return Err(invalid(
                "multiplicity",
                format!(
                    "n_electrons + multiplicity - 1 = {} must be even",
                    self.n_electrons + self.multiplicity - 1
                ),
            ));
        }
        if self.multiplicity - 1 > self.n_electrons {
            return Err(invalid(
                "multiplicity",
                format!(
                    "multiplicity - 1 = {} exceeds the electron count {}",
                    self.multiplicity - 1,
                    self.n_electrons
                ),
            ));
        }

        for (field, value) in [
            ("pauli_l1", self.norms.pauli_l1),
            ("df_l1", Some(self.norms.df_l1)),
            ("pauli_l1_lpbliss", self.norms.pauli_l1_lpbliss),
            ("df_l1_lpbliss", self.norms.df_l1_lpbliss),
            ("half_width_fs_hf", self.norms.half_width_fs_hf),
            ("half_width_ens_hf", self.norms.half_width_ens_hf),
        ] {
            if let Some(v) = value {
                if !v.is_finite() || v <= 0.0 {
                    return Err(invalid(field, format!("{v} must be strictly positive")));
                }
            }
        }

        if let Some(curve) = &self.truncation_curve {
            if curve.untruncated_energy().is_none() {
                return Err(invalid(
                    "truncation_curve",
                    "must contain a point with t = 0".into(),
                ));
            }
            for &(t, e) in curve.points() {
                if !t.is_finite() || t < 0.0 || !e.is_finite() {
                    return Err(invalid(
                        "truncation_curve",
                        format!("invalid point ({t}, {e})"),
                    ));
                }
            }
        }

        for (field, anchor) in [
            ("reference_logical", self.reference_logical),
            ("reference_logical_lpbliss", self.reference_logical_lpbliss),
        ] {
            if let Some(a) = anchor {
                if a.toffoli_count == 0 || a.logical_qubits == 0 {
                    return Err(invalid(field, "counts must be positive".into()));
                }
            }
        }

        // Observed data can place the treated DF norm below the naive
        // electron-number-subspace half-width; this is reported, not rejected.
        let mut warnings = Vec::new();
        if let (Some(c), Some(half)) = (self.norms.df_l1_lpbliss, self.norms.half_width_ens_hf) {
            if c < half {
                warnings.push(format!(
                    "{}: df_l1_lpbliss = {c} is below half_width_ens_hf = {half}",
                    self.key()
                ));
            }
        }
        Ok(warnings)
    }
}

/// Unique instance label: molecule id plus active-space size.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct InstanceKey {
    pub molecule_id: String,
    pub n_orbitals: u32,
}

impl fmt::Display for InstanceKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({} orbitals)", self.molecule_id, self.n_orbitals)
    }
}

/// A validated catalog plus any non-fatal validation observations.
#[derive(Debug, Clone, PartialEq)]
pub struct Catalog {
    pub instances: Vec<HamiltonianInstance>,
    pub warnings: Vec<String>,
}

impl Catalog {
    pub fn find(&self, molecule_id: &str, n_orbitals: u32) -> Option<&HamiltonianInstance> {
        self.instances
            .iter()
            .find(|i| i.molecule_id == molecule_id && i.n_orbitals == n_orbitals)
    }
}

/// Floor of log10 of C(N_o, N_α)·C(N_o, N_β), the dimension of the
/// determinant space at fixed S_z = (multiplicity − 1)/2.
///
/// N_α = (N_e + multiplicity − 1)/2 and N_β = N_e − N_α. Binomials are
/// evaluated through log-gamma so large active spaces cannot overflow.
pub fn hilbert_space_log10(
    n_orbitals: u32,
    n_electrons: u32,
    multiplicity: u32,
) -> Result<u32, CatalogError> {
    let err = |msg: String| CatalogError::SpinInconsistent(msg);
    if n_orbitals == 0 || n_electrons == 0 || multiplicity == 0 {
        return Err(err(format!(
            "n_orbitals = {n_orbitals}, n_electrons = {n_electrons}, multiplicity = {multiplicity} must all be positive"
        )));
    }
    if multiplicity - 1 > n_electrons {
        return Err(err(format!(
            "multiplicity - 1 = {} exceeds the electron count {n_electrons}",
            multiplicity - 1
        )));
    }
    let twice_n_alpha = n_electrons + multiplicity - 1;
    if !twice_n_alpha.is_multiple_of(2) {
        return Err(err(format!(
            "n_electrons + multiplicity - 1 = {twice_n_alpha} must be even"
        )));
    }
    let n_alpha = twice_n_alpha / 2;
    let n_beta = n_electrons - n_alpha;
    if n_alpha > n_orbitals || n_beta > n_orbitals {
        return Err(err(format!(
            "{n_alpha} alpha / {n_beta} beta electrons do not fit in {n_orbitals} orbitals"
        )));
    }
    let log10_dim = (ln_binomial(n_orbitals, n_alpha) + ln_binomial(n_orbitals, n_beta))
        / std::f64::consts::LN_10;
    // The dimension is an integer, so log-gamma rounding can only miss an
    // integer log10 from below (e.g. dimension exactly 10); snap before
    // flooring. Validated exhaustively against exact binomials for N_o <= 40.
    Ok((log10_dim + 1e-9).floor() as u32)
}

fn ln_binomial(n: u32, k: u32) -> f64 {
    libm::lgamma(f64::from(n) + 1.0)
        - libm::lgamma(f64::from(k) + 1.0)
        - libm::lgamma(f64::from(n - k) + 1.0)
}

/// Norm-reduction ratios (A/C, B/C): raw Pauli and double-factorized L1 norms
/// of the untreated Hamiltonian over the treated double-factorized norm.
pub fn norm_reduction_ratios(record: &NormRecord) -> Result<(f64, f64), CatalogError> {
    let missing = |field: &'static str| CatalogError::MissingNorm {
        instance: "<record>".into(),
        field,
    };
    let a = record.pauli_l1.ok_or_else(|| missing("pauli_l1"))?;
    let b = record.df_l1;
    let c = record
        .df_l1_lpbliss
        .ok_or_else(|| missing("df_l1_lpbliss"))?;
    Ok((a / c, b / c))
}

/// Reads and validates an instance catalog file.
pub fn load_catalog<P: AsRef<Path>>(path: P) -> Result<Catalog, CatalogError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| CatalogError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_catalog(&text, &path.display().to_string())
}

const KNOWN_FIELDS: &[&str] = &[
    "molecule_id",
    "reaction",
    "n_orbitals",
    "n_electrons",
    "charge",
    "multiplicity",
    "overlap_gamma",
    "pauli_l1",
    "df_l1",
    "pauli_l1_lpbliss",
    "df_l1_lpbliss",
    "half_width_fs_hf",
    "half_width_ens_hf",
    "truncation_curve",
    "reference_logical",
    "reference_logical_lpbliss",
];

/// Parses catalog text; `source` names the input in error messages.
pub fn parse_catalog(text: &str, source: &str) -> Result<Catalog, CatalogError> {
    let parse_err = |line: usize, message: String| CatalogError::Parse {
        path: source.to_string(),
        line,
        message,
    };

    let mut instances = Vec::new();
    let mut warnings = Vec::new();
    let mut block: Option<RawBlock> = None;
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
                Some(other) => {
                    return Err(parse_err(
                        line_no,
                        format!("unsupported schema_version {other:?} (expected 1)"),
                    ))
                }
                None => {
                    return Err(parse_err(
                        line_no,
                        "missing required `schema_version: 1` header".into(),
                    ))
                }
            }
        }
        if line == "[instance]" {
            if let Some(b) = block.take() {
                instances.push(b.finish(source, &mut warnings)?);
            }
            block = Some(RawBlock::new(line_no));
            continue;
        }
        let Some((key, value)) = line.split_once(':') else {
            return Err(parse_err(
                line_no,
                format!("expected `key: value`, found {line:?}"),
            ));
        };
        let key = key.trim();
        let value = value.trim();
        let Some(b) = block.as_mut() else {
            return Err(parse_err(
                line_no,
                format!("field {key:?} appears outside an [instance] block"),
            ));
        };
        if !KNOWN_FIELDS.contains(&key) {
            return Err(parse_err(line_no, format!("unknown field {key:?}")));
        }
        if b.fields.iter().any(|(k, _, _)| k == key) {
            return Err(parse_err(line_no, format!("duplicate field {key:?}")));
        }
        b.fields.push((key.to_string(), value.to_string(), line_no));
    }
    if !saw_header {
        return Err(parse_err(
            text.lines().count() + 1,
            "missing required `schema_version: 1` header".into(),
        ));
    }
    if let Some(b) = block.take() {
        instances.push(b.finish(source, &mut warnings)?);
    }

    let mut seen = BTreeSet::new();
    for instance in &instances {
        if !seen.insert(instance.key()) {
            return Err(CatalogError::Invalid {
                instance: instance.key().to_string(),
                field: "molecule_id",
                message: "duplicate instance key".into(),
            });
        }
    }
    Ok(Catalog {
        instances,
        warnings,
    })
}

struct RawBlock {
    start_line: usize,
    fields: Vec<(String, String, usize)>,
}

impl RawBlock {
    fn new(start_line: usize) -> Self {
        RawBlock {
            start_line,
            fields: Vec::new(),
        }
    }

    fn take(&mut self, key: &str) -> Option<(String, usize)> {
        let pos = self.fields.iter().position(|(k, _, _)| k == key)?;
        let (_, value, line) = self.fields.remove(pos);
        Some((value, line))
    }

    fn finish(
        mut self,
        source: &str,
        warnings: &mut Vec<String>,
    ) -> Result<HamiltonianInstance, CatalogError> {
        let parse_err = |line: usize, message: String| CatalogError::Parse {
            path: source.to_string(),
            line,
            message,
        };
        let mut required = |key: &'static str| -> Result<(String, usize), CatalogError> {
            self.take(key).ok_or_else(|| {
                parse_err(
                    self.start_line,
                    format!("instance block is missing required field {key:?}"),
                )
            })
        };

        let (molecule_id, _) = required("molecule_id")?;
        let n_orbitals = parse_num::<u32>(required("n_orbitals")?, source)?;
        let n_electrons = parse_num::<u32>(required("n_electrons")?, source)?;
        let charge = parse_num::<i32>(required("charge")?, source)?;
        let multiplicity = parse_num::<u32>(required("multiplicity")?, source)?;
        let overlap_gamma = parse_num::<f64>(required("overlap_gamma")?, source)?;
        let df_l1 = parse_num::<f64>(required("df_l1")?, source)?;

        let reaction = self.take("reaction").map(|(v, _)| v);
        let mut optional_norm = |key: &str| -> Result<Option<f64>, CatalogError> {
            self.take(key)
                .map(|pair| parse_num::<f64>(pair, source))
                .transpose()
        };
        let norms = NormRecord {
            pauli_l1: optional_norm("pauli_l1")?,
            df_l1,
            pauli_l1_lpbliss: optional_norm("pauli_l1_lpbliss")?,
            df_l1_lpbliss: optional_norm("df_l1_lpbliss")?,
            half_width_fs_hf: optional_norm("half_width_fs_hf")?,
            half_width_ens_hf: optional_norm("half_width_ens_hf")?,
        };

        let truncation_curve = self
            .take("truncation_curve")
            .map(|(v, line)| parse_truncation_curve(&v, line, source))
            .transpose()?;
        let reference_logical = self
            .take("reference_logical")
            .map(|(v, line)| parse_reference(&v, line, source))
            .transpose()?;
        let reference_logical_lpbliss = self
            .take("reference_logical_lpbliss")
            .map(|(v, line)| parse_reference(&v, line, source))
            .transpose()?;

        let instance = HamiltonianInstance {
            molecule_id,
            reaction,
            n_orbitals,
            n_electrons,
            charge,
            multiplicity,
            overlap_gamma,
            norms,
            truncation_curve,
            reference_logical,
            reference_logical_lpbliss,
        };
        warnings.extend(instance.validate()?);
        Ok(instance)
    }
}

fn parse_num<T: std::str::FromStr>(
    (value, line): (String, usize),
    source: &str,
) -> Result<T, CatalogError>
where
    T::Err: fmt::Display,
{
    value.parse::<T>().map_err(|e| CatalogError::Parse {
        path: source.to_string(),
        line,
        message: format!("invalid number {value:?}: {e}"),
    })
}

fn parse_truncation_curve(
    value: &str,
    line: usize,
    source: &str,
) -> Result<TruncationCurve, CatalogError> {
    let err = |message: String| CatalogError::Parse {
        path: source.to_string(),
        line,
        message,
    };
    let mut points = Vec::new();
    for token in value.split_whitespace() {
        let (t, e) = token
            .split_once(':')
            .ok_or_else(|| err(format!("expected `threshold:energy`, found {token:?}")))?;
        let t = t
            .parse::<f64>()
            .map_err(|e| err(format!("invalid threshold {t:?}: {e}")))?;
        let e = e
            .parse::<f64>()
            .map_err(|err_| err(format!("invalid energy {e:?}: {err_}")))?;
        points.push((t, e));
    }
    if points.is_empty() {
        return Err(err("truncation_curve must not be empty".into()));
    }
    Ok(TruncationCurve::new(points))
}

fn parse_reference(value: &str, line: usize, source: &str) -> Result<ReferenceLogical, CatalogError> {
    let err = |message: String| CatalogError::Parse {
        path: source.to_string(),
        line,
        message,
    };
    let mut parts = value.split_whitespace();
    let (Some(toffoli), Some(qubits), None) = (parts.next(), parts.next(), parts.next()) else {
        return Err(err(format!(
            "expected `toffoli_count logical_qubits`, found {value:?}"
        )));
    };
    // Toffoli counts are written in scientific notation (e.g. 7.7e10); accept
    // any float that is a non-negative integer.
    let toffoli_f = toffoli
        .parse::<f64>()
        .map_err(|e| err(format!("invalid toffoli_count {toffoli:?}: {e}")))?;
    if !toffoli_f.is_finite() || toffoli_f < 0.0 || toffoli_f.fract() != 0.0 || toffoli_f > u64::MAX as f64 {
        return Err(err(format!(
            "toffoli_count {toffoli:?} is not a non-negative integer"
        )));
    }
    let logical_qubits = qubits
        .parse::<u64>()
        .map_err(|e| err(format!("invalid logical_qubits {qubits:?}: {e}")))?;
    Ok(ReferenceLogical {
        toffoli_count: toffoli_f as u64,
        logical_qubits,
    })
}

/// Serializes a catalog back into the file format. `parse_catalog` on the
/// output reproduces every field bit-identically.
pub fn write_catalog(instances: &[HamiltonianInstance]) -> String {
    let mut out = String::from("schema_version: 1\n");
    for instance in instances {
        out.push_str("\n[instance]\n");
        let mut field = |key: &str, value: String| {
            out.push_str(key);
            out.push_str(": ");
            out.push_str(&value);
            out.push('\n');
        };
        field("molecule_id", instance.molecule_id.clone());
        if let Some(reaction) = &instance.reaction {
            field("reaction", reaction.clone());
        }
        field("n_orbitals", instance.n_orbitals.to_string());
        field("n_electrons", instance.n_electrons.to_string());
        field("charge", instance.charge.to_string());
        field("multiplicity", instance.multiplicity.to_string());
        field("overlap_gamma", instance.overlap_gamma.to_string());
        let norms = &instance.norms;
        if let Some(v) = norms.pauli_l1 {
            field("pauli_l1", v.to_string());
        }
        field("df_l1", norms.df_l1.to_string());
        if let Some(v) = norms.pauli_l1_lpbliss {
            field("pauli_l1_lpbliss", v.to_string());
        }
        if let Some(v) = norms.df_l1_lpbliss {
            field("df_l1_lpbliss", v.to_string());
        }
        if let Some(v) = norms.half_width_fs_hf {
            field("half_width_fs_hf", v.to_string());
        }
        if let Some(v) = norms.half_width_ens_hf {
            field("half_width_ens_hf", v.to_string());
        }
        if let Some(curve) = &instance.truncation_curve {
            let body = curve
                .points()
                .iter()
                .map(|(t, e)| format!("{t}:{e}"))
                .collect::<Vec<_>>()
                .join(" ");
            field("truncation_curve", body);
        }
        if let Some(anchor) = instance.reference_logical {
            field(
                "reference_logical",
                format!("{} {}", anchor.toffoli_count, anchor.logical_qubits),
            );
        }
        if let Some(anchor) = instance.reference_logical_lpbliss {
            field(
                "reference_logical_lpbliss",
                format!("{} {}", anchor.toffoli_count, anchor.logical_qubits),
            );
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal_block(extra: &str) -> String {
        format!(
            "schema_version: 1\n\n[instance]\nmolecule_id: MoN2\nn_orbitals: 33\n\
             n_electrons: 45\ncharge: 0\nmultiplicity: 2\noverlap_gamma: 0.96\n\
             df_l1: 260.07\n{extra}"
        )
    }

    #[test]
    fn loads_single_record() {
        let catalog = parse_catalog(&minimal_block(""), "test").unwrap();
        assert_eq!(catalog.instances.len(), 1);
        let inst = &catalog.instances[0];
        assert_eq!(inst.molecule_id, "MoN2");
        assert_eq!(inst.n_orbitals, 33);
        assert_eq!(inst.n_electrons, 45);
        assert_eq!(inst.multiplicity, 2);
        assert_eq!(inst.overlap_gamma, 0.96);
        assert_eq!(inst.norms.df_l1, 260.07);
    }

    #[test]
    fn empty_catalog_is_not_an_error() {
        let catalog = parse_catalog("schema_version: 1\n", "test").unwrap();
        assert!(catalog.instances.is_empty());
        assert!(catalog.warnings.is_empty());
    }

    #[test]
    fn out_of_range_gamma_names_the_field() {
        let text = minimal_block("").replace("overlap_gamma: 0.96", "overlap_gamma: 1.2");
        let err = parse_catalog(&text, "test").unwrap_err();
        match err {
            CatalogError::Invalid { field, .. } => assert_eq!(field, "overlap_gamma"),
            other => panic!("expected Invalid, got {other:?}"),
        }
    }

    #[test]
    fn unknown_fields_are_rejected_with_line_context() {
        let text = minimal_block("mystery_field: 3\n");
        let err = parse_catalog(&text, "test").unwrap_err();
        match err {
            CatalogError::Parse { line, message, .. } => {
                assert_eq!(line, 11);
                assert!(message.contains("mystery_field"), "{message}");
            }
            other => panic!("expected Parse, got {other:?}"),
        }
    }

    #[test]
    fn missing_header_is_rejected() {
        let err = parse_catalog("[instance]\n", "test").unwrap_err();
        assert!(err.to_string().contains("schema_version"));
    }

    #[test]
    fn spin_parity_violation_is_rejected() {
        let text = minimal_block("").replace("multiplicity: 2", "multiplicity: 3");
        let err = parse_catalog(&text, "test").unwrap_err();
        assert!(err.to_string().contains("even"), "{err}");
    }

    #[test]
    fn hilbert_space_matches_published_examples() {
        assert_eq!(hilbert_space_log10(33, 45, 2).unwrap(), 16);
        assert_eq!(hilbert_space_log10(46, 58, 1).unwrap(), 24);
        assert_eq!(hilbert_space_log10(69, 90, 1).unwrap(), 36);
        assert_eq!(hilbert_space_log10(1, 2, 1).unwrap(), 0);
    }

    #[test]
    fn hilbert_space_rejects_inconsistent_spin() {
        assert!(hilbert_space_log10(33, 45, 1).is_err()); // parity
        assert!(hilbert_space_log10(4, 3, 5).is_err()); // 2S > N_e
        assert!(hilbert_space_log10(2, 4, 3).is_err()); // N_alpha > N_o
    }

    /// Exact big-integer oracle: floor(log10) equals digit count minus one.
    #[test]
    fn hilbert_space_agrees_with_exact_binomials_up_to_40_orbitals() {
        fn binomial_u128(n: u32, k: u32) -> u128 {
            let k = k.min(n - k);
            let mut acc: u128 = 1;
            for i in 1..=u128::from(k) {
                acc = acc * (u128::from(n - k) + i) / i;
            }
            acc
        }
        for n_orbitals in 1..=40u32 {
            for n_electrons in 1..=(2 * n_orbitals) {
                for multiplicity in 1..=(n_electrons + 1) {
                    let Ok(got) = hilbert_space_log10(n_orbitals, n_electrons, multiplicity)
                    else {
                        continue;
                    };
                    let n_alpha = (n_electrons + multiplicity - 1) / 2;
                    let n_beta = n_electrons - n_alpha;
                    let dim = binomial_u128(n_orbitals, n_alpha)
                        .checked_mul(binomial_u128(n_orbitals, n_beta))
                        .expect("fits in u128 for N_o <= 40");
                    let digits = dim.to_string().len() as u32;
                    assert_eq!(got, digits - 1, "N_o={n_orbitals} N_e={n_electrons} m={multiplicity}");
                }
            }
        }
    }

    #[test]
    fn norm_ratios_match_published_rows() {
        let record = NormRecord {
            pauli_l1: Some(816.52),
            df_l1: 260.93,
            pauli_l1_lpbliss: None,
            df_l1_lpbliss: Some(98.52),
            half_width_fs_hf: None,
            half_width_ens_hf: None,
        };
        let (a, b) = norm_reduction_ratios(&record).unwrap();
        assert!((a - 8.3).abs() < 0.05, "{a}");
        assert!((b - 2.6).abs() < 0.05, "{b}");

        let record = NormRecord {
            pauli_l1: Some(4539.04),
            df_l1: 1119.83,
            pauli_l1_lpbliss: None,
            df_l1_lpbliss: Some(594.33),
            half_width_fs_hf: None,
            half_width_ens_hf: None,
        };
        let (a, b) = norm_reduction_ratios(&record).unwrap();
        assert!((a - 7.6).abs() < 0.05, "{a}");
        assert!((b - 1.9).abs() < 0.05, "{b}");
    }

    #[test]
    fn identical_norms_give_unit_ratios() {
        let record = NormRecord {
            pauli_l1: Some(123.4),
            df_l1: 123.4,
            pauli_l1_lpbliss: None,
            df_l1_lpbliss: Some(123.4),
            half_width_fs_hf: None,
            half_width_ens_hf: None,
        };
        assert_eq!(norm_reduction_ratios(&record).unwrap(), (1.0, 1.0));
    }

    #[test]
    fn norm_ratios_are_scale_invariant() {
        use proptest::prelude::*;
        proptest!(|(a in 1e-3f64..1e4, b in 1e-3f64..1e4, c in 1e-3f64..1e4,
                    scale in 1e-6f64..1e6)| {
            let record = NormRecord {
                pauli_l1: Some(a),
                df_l1: b,
                pauli_l1_lpbliss: None,
                df_l1_lpbliss: Some(c),
                half_width_fs_hf: None,
                half_width_ens_hf: None,
            };
            let scaled = NormRecord {
                pauli_l1: Some(a * scale),
                df_l1: b * scale,
                pauli_l1_lpbliss: None,
                df_l1_lpbliss: Some(c * scale),
                half_width_fs_hf: None,
                half_width_ens_hf: None,
            };
            let (r1, r2) = norm_reduction_ratios(&record).unwrap();
            let (s1, s2) = norm_reduction_ratios(&scaled).unwrap();
            prop_assert!((r1 - s1).abs() <= 1e-12 * r1.abs());
            prop_assert!((r2 - s2).abs() <= 1e-12 * r2.abs());
        });
    }

    #[test]
    fn missing_norm_is_reported() {
        let record = NormRecord {
            pauli_l1: None,
            df_l1: 1.0,
            pauli_l1_lpbliss: None,
            df_l1_lpbliss: Some(1.0),
            half_width_fs_hf: None,
            half_width_ens_hf: None,
        };
        let err = norm_reduction_ratios(&record).unwrap_err();
        assert!(err.to_string().contains("pauli_l1"), "{err}");
    }

    #[test]
    fn round_trips_bit_identically() {
        let text = minimal_block(
            "pauli_l1: 839.72\npauli_l1_lpbliss: 619.46\ndf_l1_lpbliss: 103.29\n\
             half_width_fs_hf: 20.77\nhalf_width_ens_hf: 20.18\n\
             truncation_curve: 0:-5412.032 1e-05:-5412.03205\n\
             reference_logical: 77000000000 1921\nreference_logical_lpbliss: 32000000000 1849\n",
        );
        let catalog = parse_catalog(&text, "test").unwrap();
        let rewritten = write_catalog(&catalog.instances);
        let reparsed = parse_catalog(&rewritten, "round-trip").unwrap();
        assert_eq!(catalog.instances, reparsed.instances);
        // And writing again is byte-stable.
        assert_eq!(rewritten, write_catalog(&reparsed.instances));
    }
}

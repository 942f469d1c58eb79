//! Phase-estimation performance model: error-budget splitting and parameter
//! assignment under a total failure-probability bound.
//!
//! The total failure probability of repeated phase estimation decomposes into
//! hardware failure, ground-state projection failure, and spectral-leakage
//! failure. Splitting an overall budget (ε, δ̄) across these mechanisms fixes
//! every algorithm parameter in closed form: the shot count M, the per-shot
//! hardware tolerance δ′_HW, the coefficient and angle bit widths ℵ and ℶ,
//! the Hamiltonian truncation threshold t, and the iteration count 𝓘. The
//! assignments guarantee δ_HW + δ_GS + δ_QPE ≤ δ̄.

use thiserror::Error;

use crate::catalog::{HamiltonianInstance, NormVariant, TruncationCurve};

/// Default fraction of δ̄ budgeted to spectral-leakage failure.
pub const DEFAULT_P_QPE_FRACTION: f64 = 0.8;
/// Default fraction of δ̄ budgeted to projection failure.
pub const DEFAULT_P_GS_FRACTION: f64 = 0.1;
/// Default fraction of δ̄ budgeted to hardware failure.
pub const DEFAULT_P_HW_FRACTION: f64 = 0.1;
/// Default fraction of ε budgeted to spectral leakage.
pub const DEFAULT_EPS_SL_FRACTION: f64 = 0.8;
/// Default fraction of ε budgeted to each block-encoding error source
/// (rotation angles, coefficients, truncation).
pub const DEFAULT_EPS_ENCODING_FRACTION: f64 = 0.066;

/// Relative slack used when checking budget sums, covering the rounding of
/// fraction-of-budget products.
const BUDGET_SUM_SLACK: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum ParameterError {
    #[error("{name} = {value} is out of range ({constraint})")]
    OutOfRange {
        name: &'static str,
        value: f64,
        constraint: &'static str,
    },
    #[error("overlap gamma is 0: no number of shots can project onto the ground state")]
    ZeroOverlap,
    #[error("budget invariant violated: {0}")]
    BudgetInvariant(String),
    #[error("truncation curve has no t = 0 reference point")]
    MissingUntruncatedPoint,
    #[error("instance {instance} is missing the {variant} df_l1 norm")]
    MissingLambda {
        instance: String,
        variant: NormVariant,
    },
}

fn check_range(
    name: &'static str,
    value: f64,
    ok: bool,
    constraint: &'static str,
) -> Result<(), ParameterError> {
    if ok && value.is_finite() {
        Ok(())
    } else {
        Err(ParameterError::OutOfRange {
            name,
            value,
            constraint,
        })
    }
}

/// The split of a total error/failure budget (ε, δ̄) across failure mechanisms.
///
/// Probabilities are fractions of δ̄; energy budgets are in Hartree and sum to
/// at most ε. All fields are plain data so callers may build custom splits;
/// [`ErrorBudget::validate`] enforces the two sum invariants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorBudget {
    /// Total allowed energy error ε, Hartree.
    pub epsilon: f64,
    /// Total allowed failure probability δ̄.
    pub delta_bar: f64,
    /// Spectral-leakage failure budget.
    pub p_qpe: f64,
    /// Projection-failure budget.
    pub p_gs: f64,
    /// Hardware-failure budget.
    pub p_hw: f64,
    /// Spectral-leakage error budget, Hartree.
    pub eps_sl: f64,
    /// Rotation-angle encoding budget, Hartree.
    pub eps_ang: f64,
    /// Coefficient encoding budget, Hartree.
    pub eps_coef: f64,
    /// Truncation budget, Hartree.
    pub eps_trunc: f64,
}

impl ErrorBudget {
    /// Checks both budget-sum invariants.
    pub fn validate(&self) -> Result<(), ParameterError> {
        check_range("epsilon", self.epsilon, self.epsilon > 0.0, "> 0")?;
        check_range(
            "delta_bar",
            self.delta_bar,
            self.delta_bar > 0.0 && self.delta_bar < 1.0,
            "in (0, 1)",
        )?;
        for (name, v) in [
            ("p_qpe", self.p_qpe),
            ("p_gs", self.p_gs),
            ("p_hw", self.p_hw),
            ("eps_sl", self.eps_sl),
            ("eps_ang", self.eps_ang),
            ("eps_coef", self.eps_coef),
            ("eps_trunc", self.eps_trunc),
        ] {
            check_range(name, v, v > 0.0, "> 0")?;
        }
        let p_sum = self.p_qpe + self.p_gs + self.p_hw;
        if p_sum > self.delta_bar * (1.0 + BUDGET_SUM_SLACK) {
            return Err(ParameterError::BudgetInvariant(format!(
                "p_qpe + p_gs + p_hw = {p_sum} exceeds delta_bar = {}",
                self.delta_bar
            )));
        }
        let eps_sum = self.eps_sl + self.eps_ang + self.eps_coef + self.eps_trunc;
        if eps_sum > self.epsilon * (1.0 + BUDGET_SUM_SLACK) {
            return Err(ParameterError::BudgetInvariant(format!(
                "eps_sl + eps_ang + eps_coef + eps_trunc = {eps_sum} exceeds epsilon = {}",
                self.epsilon
            )));
        }
        Ok(())
    }

    /// Builds a budget from explicit fractions of δ̄ and ε.
    pub fn from_fractions(
        epsilon: f64,
        delta_bar: f64,
        p_fractions: (f64, f64, f64),
        eps_fractions: (f64, f64, f64, f64),
    ) -> Result<Self, ParameterError> {
        let (fq, fg, fh) = p_fractions;
        let (fsl, fang, fcoef, ftrunc) = eps_fractions;
        let budget = ErrorBudget {
            epsilon,
            delta_bar,
            p_qpe: fq * delta_bar,
            p_gs: fg * delta_bar,
            p_hw: fh * delta_bar,
            eps_sl: fsl * epsilon,
            eps_ang: fang * epsilon,
            eps_coef: fcoef * epsilon,
            eps_trunc: ftrunc * epsilon,
        };
        budget.validate()?;
        Ok(budget)
    }
}

/// Splits (ε, δ̄) using the default fractions 0.8/0.1/0.1 for probabilities
/// and 0.8/0.066/0.066/0.066 for energies.
pub fn split_budget(epsilon: f64, delta_bar: f64) -> Result<ErrorBudget, ParameterError> {
    ErrorBudget::from_fractions(
        epsilon,
        delta_bar,
        (
            DEFAULT_P_QPE_FRACTION,
            DEFAULT_P_GS_FRACTION,
            DEFAULT_P_HW_FRACTION,
        ),
        (
            DEFAULT_EPS_SL_FRACTION,
            DEFAULT_EPS_ENCODING_FRACTION,
            DEFAULT_EPS_ENCODING_FRACTION,
            DEFAULT_EPS_ENCODING_FRACTION,
        ),
    )
}

/// The fully assigned phase-estimation parameters for one instance.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgorithmParameters {
    /// Number of circuit repetitions M.
    pub shots: u64,
    /// Acceptable hardware failure rate per shot δ′_HW.
    pub shot_hw_tolerance: f64,
    /// Bits of precision for Hamiltonian coefficients, ℵ.
    pub coeff_bits: u32,
    /// Bits of precision for rotation angles, ℶ.
    pub angle_bits: u32,
    /// Hamiltonian truncation threshold t (0 when no curve is supplied).
    pub truncation_threshold: f64,
    /// Phase-estimation iterations per shot, 𝓘.
    pub iterations: u64,
}

/// Assembled per-mechanism failure probabilities of an assignment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FailureBreakdown {
    /// 1 − (1 − δ′_HW)^M: probability any shot fails in hardware.
    pub hardware: f64,
    /// (1 − γ²)^M: probability no shot projects onto the ground state.
    pub ground_state: f64,
    /// 1 − (1 − p′_QPE)^M with the per-shot Chebyshev leakage bound p′_QPE.
    pub spectral_leakage: f64,
}

impl FailureBreakdown {
    pub fn total(&self) -> f64 {
        self.hardware + self.ground_state + self.spectral_leakage
    }
}

impl AlgorithmParameters {
    /// Evaluates the three assembled failure probabilities for overlap `gamma`,
    /// L1 norm `lambda`, and the spectral-leakage budget the parameters were
    /// assigned under.
    pub fn failure_breakdown(&self, gamma: f64, lambda: f64, eps_sl: f64) -> FailureBreakdown {
        let m = self.shots as f64;
        let hardware = 1.0 - (1.0 - self.shot_hw_tolerance).powf(m);
        let ground_state = (1.0 - gamma * gamma).powf(m);
        let per_shot_leakage = per_shot_leakage_bound(lambda, self.iterations, eps_sl).min(1.0);
        let spectral_leakage = 1.0 - (1.0 - per_shot_leakage).powf(m);
        FailureBreakdown {
            hardware,
            ground_state,
            spectral_leakage,
        }
    }
}

/// Chebyshev bound on the probability that one shot's spectral-leakage error
/// exceeds `eps_sl`: (πλ / (2𝓘ε_SL))².
pub fn per_shot_leakage_bound(lambda: f64, iterations: u64, eps_sl: f64) -> f64 {
    let x = std::f64::consts::PI * lambda / (2.0 * iterations as f64 * eps_sl);
    x * x
}

/// Minimal number of shots M with (1 − γ²)^M ≤ p_gs, clamped to ≥ 1.
///
/// M = ⌈ln p_gs / ln(1 − γ²)⌉; the result is nudged so that both the
/// guarantee and its minimality hold exactly in floating-point arithmetic.
pub fn compute_shots(gamma: f64, p_gs: f64) -> Result<u64, ParameterError> {
    if gamma == 0.0 {
        return Err(ParameterError::ZeroOverlap);
    }
    check_range("gamma", gamma, gamma > 0.0 && gamma <= 1.0, "in (0, 1]")?;
    check_range("p_gs", p_gs, p_gs > 0.0 && p_gs < 1.0, "in (0, 1)")?;
    let miss = 1.0 - gamma * gamma;
    let satisfies = |m: u64| miss.powf(m as f64) <= p_gs;
    let mut shots = if miss == 0.0 {
        1
    } else {
        (p_gs.ln() / miss.ln()).ceil().max(1.0) as u64
    };
    while !satisfies(shots) {
        shots += 1;
    }
    while shots > 1 && satisfies(shots - 1) {
        shots -= 1;
    }
    Ok(shots)
}

/// Per-shot hardware tolerance δ′_HW = 1 − (1 − p_hw)^(1/M), which keeps the
/// M-shot hardware failure probability at or below p_hw.
pub fn compute_shot_hw_tolerance(shots: u64, p_hw: f64) -> Result<f64, ParameterError> {
    check_range("shots", shots as f64, shots >= 1, ">= 1")?;
    check_range("p_hw", p_hw, p_hw > 0.0 && p_hw < 1.0, "in (0, 1)")?;
    Ok(1.0 - (1.0 - p_hw).powf(1.0 / shots as f64))
}

/// Coefficient bit width ℵ = ⌈2.5 + log2(λ / ε_coef)⌉.
pub fn compute_coeff_bits(lambda: f64, eps_coef: f64) -> Result<u32, ParameterError> {
    check_range("lambda", lambda, lambda > 0.0, "> 0")?;
    check_range("eps_coef", eps_coef, eps_coef > 0.0, "> 0")?;
    Ok((2.5 + (lambda / eps_coef).log2()).ceil().max(1.0) as u32)
}

/// Rotation-angle bit width ℶ = ⌈5.625 + log2(λ·N / ε_ang)⌉ with N the
/// spin-orbital count.
pub fn compute_angle_bits(
    lambda: f64,
    n_spin_orbitals: u32,
    eps_ang: f64,
) -> Result<u32, ParameterError> {
    check_range("lambda", lambda, lambda > 0.0, "> 0")?;
    check_range(
        "n_spin_orbitals",
        f64::from(n_spin_orbitals),
        n_spin_orbitals > 0,
        "> 0",
    )?;
    check_range("eps_ang", eps_ang, eps_ang > 0.0, "> 0")?;
    let n = f64::from(n_spin_orbitals);
    Ok((5.625 + (lambda * n / eps_ang).log2()).ceil().max(1.0) as u32)
}

/// Largest tabulated threshold whose energy deviates from the untruncated
/// energy by at most `eps_trunc`; 0 when only t = 0 qualifies.
pub fn select_truncation_threshold(
    curve: &TruncationCurve,
    eps_trunc: f64,
) -> Result<f64, ParameterError> {
    check_range("eps_trunc", eps_trunc, eps_trunc > 0.0, "> 0")?;
    let reference = curve
        .untruncated_energy()
        .ok_or(ParameterError::MissingUntruncatedPoint)?;
    let best = curve
        .points()
        .iter()
        .filter(|(_, e)| (e - reference).abs() <= eps_trunc)
        .map(|(t, _)| *t)
        .fold(0.0f64, f64::max);
    Ok(best)
}

/// Iteration count 𝓘 = ⌈πλ / (2·sqrt(1 − (1 − p_qpe)^(1/M))·ε_SL)⌉.
///
/// The choice makes the per-shot Chebyshev leakage bound small enough that
/// the M-shot spectral-leakage failure stays at or below p_qpe. As with
/// [`compute_shots`], the ceiling is nudged so feasibility and minimality
/// hold exactly in floating-point arithmetic.
pub fn compute_iterations(
    lambda: f64,
    shots: u64,
    p_qpe: f64,
    eps_sl: f64,
) -> Result<u64, ParameterError> {
    check_range("lambda", lambda, lambda > 0.0, "> 0")?;
    check_range("shots", shots as f64, shots >= 1, ">= 1")?;
    check_range("p_qpe", p_qpe, p_qpe > 0.0 && p_qpe < 1.0, "in (0, 1)")?;
    check_range("eps_sl", eps_sl, eps_sl > 0.0, "> 0")?;
    let per_shot_budget = 1.0 - (1.0 - p_qpe).powf(1.0 / shots as f64);
    let feasible = |i: u64| per_shot_leakage_bound(lambda, i, eps_sl) <= per_shot_budget;
    let raw = std::f64::consts::PI * lambda / (2.0 * per_shot_budget.sqrt() * eps_sl);
    let mut iterations = raw.ceil().max(1.0) as u64;
    while !feasible(iterations) {
        iterations += 1;
    }
    while iterations > 1 && feasible(iterations - 1) {
        iterations -= 1;
    }
    Ok(iterations)
}

/// Assigns all six parameters for an instance using its original df_l1 norm.
pub fn assign_parameters(
    instance: &HamiltonianInstance,
    budget: &ErrorBudget,
) -> Result<AlgorithmParameters, ParameterError> {
    assign_parameters_variant(instance, budget, NormVariant::Original)
}

/// Assigns all six parameters, drawing λ from the requested norm variant.
///
/// Composes the closed-form assignments and then re-checks that the assembled
/// failure probabilities respect δ_HW + δ_GS + δ_QPE ≤ δ̄.
pub fn assign_parameters_variant(
    instance: &HamiltonianInstance,
    budget: &ErrorBudget,
    variant: NormVariant,
) -> Result<AlgorithmParameters, ParameterError> {
    budget.validate()?;
    let lambda =
        instance
            .norms
            .lambda(variant)
            .ok_or_else(|| ParameterError::MissingLambda {
                instance: instance.key().to_string(),
                variant,
            })?;
    if instance.overlap_gamma == 0.0 {
        return Err(ParameterError::ZeroOverlap);
    }

    let shots = compute_shots(instance.overlap_gamma, budget.p_gs)?;
    let shot_hw_tolerance = compute_shot_hw_tolerance(shots, budget.p_hw)?;
    let coeff_bits = compute_coeff_bits(lambda, budget.eps_coef)?;
    let angle_bits = compute_angle_bits(lambda, instance.n_spin_orbitals(), budget.eps_ang)?;
    let truncation_threshold = match &instance.truncation_curve {
        Some(curve) => select_truncation_threshold(curve, budget.eps_trunc)?,
        None => 0.0,
    };
    let iterations = compute_iterations(lambda, shots, budget.p_qpe, budget.eps_sl)?;

    let params = AlgorithmParameters {
        shots,
        shot_hw_tolerance,
        coeff_bits,
        angle_bits,
        truncation_threshold,
        iterations,
    };
    let breakdown = params.failure_breakdown(instance.overlap_gamma, lambda, budget.eps_sl);
    let total = breakdown.total();
    if total > budget.delta_bar * (1.0 + BUDGET_SUM_SLACK) {
        return Err(ParameterError::BudgetInvariant(format!(
            "assembled failure {total} exceeds delta_bar {} for {}",
            budget.delta_bar,
            instance.key()
        )));
    }
    Ok(params)
}

/// Physical constants (CODATA 2018).
pub mod constants {
    /// Boltzmann constant, J/K.
    pub const BOLTZMANN_J_PER_K: f64 = 1.380_649e-23;
    /// Planck constant, J·s.
    pub const PLANCK_J_S: f64 = 6.626_070_15e-34;
    /// Molar gas constant, J/(mol·K).
    pub const MOLAR_GAS_J_PER_MOL_K: f64 = 8.314_462_618;
    /// Thermochemical calorie.
    pub const JOULES_PER_KCAL: f64 = 4184.0;
}

/// Transition-state-theory rate k = (k_B·T/h)·exp(−ΔG/(R·T)) in s⁻¹,
/// with the barrier ΔG given per mole in kcal/mol.
pub fn total_rate_from_barrier(
    delta_g_kcal_per_mol: f64,
    temperature_k: f64,
) -> Result<f64, ParameterError> {
    check_range("temperature", temperature_k, temperature_k > 0.0, "> 0")?;
    let attempt = constants::BOLTZMANN_J_PER_K * temperature_k / constants::PLANCK_J_S;
    let delta_g_j_per_mol = delta_g_kcal_per_mol * constants::JOULES_PER_KCAL;
    let rt = constants::MOLAR_GAS_J_PER_MOL_K * temperature_k;
    Ok(attempt * (-delta_g_j_per_mol / rt).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn instance(gamma: f64, df_l1: f64) -> HamiltonianInstance {
        HamiltonianInstance {
            molecule_id: "test".into(),
            reaction: None,
            n_orbitals: 33,
            n_electrons: 46,
            charge: -1,
            multiplicity: 1,
            overlap_gamma: gamma,
            norms: crate::catalog::NormRecord {
                pauli_l1: None,
                df_l1,
                pauli_l1_lpbliss: None,
                df_l1_lpbliss: None,
                half_width_fs_hf: None,
                half_width_ens_hf: None,
            },
            truncation_curve: None,
            reference_logical: None,
            reference_logical_lpbliss: None,
        }
    }

    #[test]
    fn default_split_matches_published_fractions() {
        let b = split_budget(1.6e-3, 0.01).unwrap();
        assert_relative_eq!(b.eps_sl, 1.28e-3, max_relative = 1e-12);
        assert_relative_eq!(b.eps_coef, 1.056e-4, max_relative = 1e-12);
        assert_relative_eq!(b.p_gs, 1e-3, max_relative = 1e-12);

        let b = split_budget(1.0, 0.5).unwrap();
        assert_relative_eq!(b.eps_sl, 0.8, max_relative = 1e-12);
        assert_relative_eq!(b.p_qpe, 0.4, max_relative = 1e-12);
    }

    #[test]
    fn oversubscribed_split_is_rejected() {
        let err = ErrorBudget::from_fractions(1.0, 0.5, (0.8, 0.2, 0.2), (0.8, 0.05, 0.05, 0.05))
            .unwrap_err();
        assert!(matches!(err, ParameterError::BudgetInvariant(_)), "{err}");
    }

    #[test]
    fn shot_counts_match_published_rows() {
        assert_eq!(compute_shots(0.97, 1e-3).unwrap(), 3);
        assert_eq!(compute_shots(0.74, 1e-3).unwrap(), 9);
        assert_eq!(compute_shots(1.0, 1e-3).unwrap(), 1);
    }

    #[test]
    fn zero_overlap_is_infeasible() {
        let err = compute_shots(0.0, 1e-3).unwrap_err();
        assert!(matches!(err, ParameterError::ZeroOverlap));
        let err = assign_parameters(&instance(0.0, 1.0), &split_budget(1.6e-3, 0.01).unwrap())
            .unwrap_err();
        assert!(matches!(err, ParameterError::ZeroOverlap));
    }

    fn round_3_sig_figs(x: f64) -> f64 {
        format!("{x:.2e}").parse().unwrap()
    }

    #[test]
    fn hw_tolerance_matches_published_rows() {
        assert_eq!(
            round_3_sig_figs(compute_shot_hw_tolerance(3, 1e-3).unwrap()),
            3.33e-4
        );
        assert_eq!(
            round_3_sig_figs(compute_shot_hw_tolerance(9, 1e-3).unwrap()),
            1.11e-4
        );
        assert_relative_eq!(
            compute_shot_hw_tolerance(1, 1e-3).unwrap(),
            1e-3,
            max_relative = 1e-12
        );
    }

    #[test]
    fn coeff_bits_examples() {
        assert_eq!(compute_coeff_bits(260.93, 1.056e-4).unwrap(), 24);
        assert_eq!(compute_coeff_bits(1.0, 1.0).unwrap(), 3);
        assert_eq!(compute_coeff_bits(2.0, 1.0).unwrap(), 4);
    }

    #[test]
    fn angle_bits_examples() {
        assert_eq!(compute_angle_bits(260.93, 66, 1.056e-4).unwrap(), 33);
        assert_eq!(compute_angle_bits(1.0, 1, 1.0).unwrap(), 6);
        assert_eq!(compute_angle_bits(1.0, 2, 1.0).unwrap(), 7);
    }

    #[test]
    fn truncation_selects_largest_qualifying_threshold() {
        let curve = TruncationCurve::new(vec![
            (0.0, -5412.0),
            (1e-5, -5412.00005),
            (1e-3, -5411.9),
        ]);
        assert_eq!(select_truncation_threshold(&curve, 1.056e-4).unwrap(), 1e-5);

        let only_zero = TruncationCurve::new(vec![(0.0, -1.0)]);
        assert_eq!(select_truncation_threshold(&only_zero, 1e-4).unwrap(), 0.0);

        let too_coarse = TruncationCurve::new(vec![(0.0, -1.0), (1e-4, -0.5), (1e-2, 0.0)]);
        assert_eq!(select_truncation_threshold(&too_coarse, 1e-4).unwrap(), 0.0);

        let no_reference = TruncationCurve::new(vec![(1e-5, -1.0)]);
        assert!(matches!(
            select_truncation_threshold(&no_reference, 1e-4),
            Err(ParameterError::MissingUntruncatedPoint)
        ));
    }

    #[test]
    fn iteration_count_matches_frozen_evaluation() {
        // Direct high-precision evaluation of the closed form, frozen:
        // pi*260.93 / (2*sqrt(1 - 0.992^(1/3)) * 1.28e-3) = 6192538.09,
        // independently cross-checked against extended-precision arithmetic.
        assert_eq!(compute_iterations(260.93, 3, 0.008, 1.28e-3).unwrap(), 6_192_539);
    }

    #[test]
    fn single_shot_iterations_reduce_to_closed_form() {
        let lambda = 41.7;
        let p: f64 = 0.031;
        let eps = 2.5e-4;
        let expected = (std::f64::consts::PI * lambda / (2.0 * p.sqrt() * eps)).ceil() as u64;
        assert_eq!(compute_iterations(lambda, 1, p, eps).unwrap(), expected);
    }

    #[test]
    fn doubling_lambda_roughly_doubles_iterations() {
        let base = compute_iterations(260.93, 3, 0.008, 1.28e-3).unwrap();
        let doubled = compute_iterations(2.0 * 260.93, 3, 0.008, 1.28e-3).unwrap();
        assert!((doubled as i64 - 2 * base as i64).unsigned_abs() <= 1);
    }

    #[test]
    fn assignment_reproduces_published_shot_rows() {
        let budget = split_budget(1.6e-3, 0.01).unwrap();

        let params = assign_parameters(&instance(0.97, 260.93), &budget).unwrap();
        assert_eq!(params.shots, 3);
        assert_eq!(round_3_sig_figs(params.shot_hw_tolerance), 3.33e-4);
        assert_eq!(params.truncation_threshold, 0.0);

        let params = assign_parameters(&instance(0.78, 487.97), &budget).unwrap();
        assert_eq!(params.shots, 8);
        assert_eq!(round_3_sig_figs(params.shot_hw_tolerance), 1.25e-4);

        let params = assign_parameters(&instance(1.0, 260.93), &budget).unwrap();
        assert_eq!(params.shots, 1);
        assert_eq!(round_3_sig_figs(params.shot_hw_tolerance), 1.00e-3);
    }

    #[test]
    fn assembled_failure_stays_within_budget() {
        let budget = split_budget(1.6e-3, 0.01).unwrap();
        let inst = instance(0.97, 260.93);
        let params = assign_parameters(&inst, &budget).unwrap();
        let breakdown = params.failure_breakdown(0.97, 260.93, budget.eps_sl);
        assert!(breakdown.total() <= budget.delta_bar * (1.0 + 1e-9));
        assert!(breakdown.hardware <= budget.p_hw * (1.0 + 1e-9));
        assert!(breakdown.ground_state <= budget.p_gs);
        assert!(breakdown.spectral_leakage <= budget.p_qpe);
    }

    #[test]
    fn rate_at_zero_barrier_is_the_attempt_frequency() {
        let k = total_rate_from_barrier(0.0, 298.15).unwrap();
        assert_relative_eq!(k, 6.2124e12, max_relative = 1e-4);
    }

    #[test]
    fn one_kcal_per_mol_costs_a_factor_of_about_5_4() {
        let k0 = total_rate_from_barrier(10.0, 298.15).unwrap();
        let k1 = total_rate_from_barrier(11.0, 298.15).unwrap();
        assert_relative_eq!(k0 / k1, 5.4076, max_relative = 1e-4);
    }

    #[test]
    fn rate_is_monotone_decreasing_in_barrier() {
        let mut last = f64::INFINITY;
        for dg in [0.0, 0.5, 1.0, 5.0, 20.0, 50.0] {
            let k = total_rate_from_barrier(dg, 298.15).unwrap();
            assert!(k < last);
            last = k;
        }
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn shots_are_minimal(gamma in 0.05f64..0.999, p_gs in 1e-6f64..0.5) {
                let m = compute_shots(gamma, p_gs).unwrap();
                let miss = 1.0 - gamma * gamma;
                prop_assert!(miss.powf(m as f64) <= p_gs);
                if m >= 2 {
                    prop_assert!(miss.powf((m - 1) as f64) > p_gs);
                }
            }

            #[test]
            fn hw_tolerance_respects_the_budget(m in 1u64..10_000, p_hw in 1e-6f64..0.5) {
                let tol = compute_shot_hw_tolerance(m, p_hw).unwrap();
                let assembled = 1.0 - (1.0 - tol).powf(m as f64);
                prop_assert!(assembled <= p_hw * (1.0 + 1e-9));
            }

            #[test]
            fn iterations_are_feasible_and_minimal(
                lambda in 1.0f64..5000.0,
                shots in 1u64..50,
                p_qpe in 1e-4f64..0.9,
                eps_sl in 1e-6f64..1e-1,
            ) {
                let i = compute_iterations(lambda, shots, p_qpe, eps_sl).unwrap();
                let per_shot = 1.0 - (1.0 - p_qpe).powf(1.0 / shots as f64);
                prop_assert!(per_shot_leakage_bound(lambda, i, eps_sl) <= per_shot);
                if i >= 2 {
                    prop_assert!(per_shot_leakage_bound(lambda, i - 1, eps_sl) > per_shot);
                }
            }

            #[test]
            fn bit_widths_are_monotone(
                lambda in 1e-3f64..1e6,
                factor in 1.0f64..64.0,
                eps in 1e-9f64..1.0,
            ) {
                let base = compute_coeff_bits(lambda, eps).unwrap();
                prop_assert!(compute_coeff_bits(lambda * factor, eps).unwrap() >= base);
                prop_assert!(compute_coeff_bits(lambda, eps * factor).unwrap() <= base);

                let base = compute_angle_bits(lambda, 64, eps).unwrap();
                prop_assert!(compute_angle_bits(lambda * factor, 64, eps).unwrap() >= base);
                prop_assert!(compute_angle_bits(lambda, 64, eps * factor).unwrap() <= base);
            }

            #[test]
            fn truncation_pick_is_the_brute_force_maximum(
                energies in prop::collection::vec(-10.0f64..10.0, 1..12),
                eps in 1e-3f64..1.0,
            ) {
                let mut points = vec![(0.0, 0.0)];
                for (i, e) in energies.iter().enumerate() {
                    points.push(((i + 1) as f64 * 1e-4, *e));
                }
                let curve = TruncationCurve::new(points.clone());
                let picked = select_truncation_threshold(&curve, eps).unwrap();
                let brute = points
                    .iter()
                    .filter(|(_, e)| (*e - 0.0).abs() <= eps)
                    .map(|(t, _)| *t)
                    .fold(0.0f64, f64::max);
                prop_assert_eq!(picked, brute);
            }
        }
    }
}

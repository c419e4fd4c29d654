//! Arm and instance types for restless bandits with fairness floors.
//!
//! States are `0..S`, actions are `0` (passive) and `1` (active). Every
//! arm of an instance shares the same state count. Types are immutable
//! once built; [`RmabInstance::validate`] reports every violated invariant
//! instead of failing on the first one.

use serde::{Deserialize, Serialize};
use std::fmt;

use crate::error::ModelError;

/// Number of actions per arm.
pub const NUM_ACTIONS: usize = 2;
pub const PASSIVE: usize = 0;
pub const ACTIVE: usize = 1;

const ROW_SUM_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RewardDist {
    Bernoulli,
    Deterministic,
}

/// One arm: a two-action MDP over `num_states` states.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArmModel {
    num_states: usize,
    /// Indexed `[action][state][next_state]`.
    transition: Vec<Vec<Vec<f64>>>,
    /// Indexed `[state][action]`.
    reward_mean: Vec<[f64; 2]>,
    reward_dist: RewardDist,
}

impl ArmModel {
    /// Builds an arm after checking that all shapes agree. Stochasticity
    /// and reward ranges are checked by validation, not here.
    pub fn new(
        transition: Vec<Vec<Vec<f64>>>,
        reward_mean: Vec<[f64; 2]>,
        reward_dist: RewardDist,
    ) -> Result<Self, ModelError> {
        let num_states = reward_mean.len();
        if num_states == 0 {
            return Err(ModelError::Shape("arm has no states".into()));
        }
        if transition.len() != NUM_ACTIONS {
            return Err(ModelError::Shape(format!(
                "expected {NUM_ACTIONS} transition kernels, got {}",
                transition.len()
            )));
        }
        for (a, kernel) in transition.iter().enumerate() {
            if kernel.len() != num_states || kernel.iter().any(|row| row.len() != num_states) {
                return Err(ModelError::Shape(format!(
                    "kernel for action {a} is not {num_states}x{num_states}"
                )));
            }
        }
        Ok(Self {
            num_states,
            transition,
            reward_mean,
            reward_dist,
        })
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn reward_dist(&self) -> RewardDist {
        self.reward_dist
    }

    /// Transition row `P(· | state, action)`.
    pub fn row(&self, action: usize, state: usize) -> &[f64] {
        &self.transition[action][state]
    }

    pub fn prob(&self, action: usize, state: usize, next: usize) -> f64 {
        self.transition[action][state][next]
    }

    pub fn kernel(&self, action: usize) -> &[Vec<f64>] {
        &self.transition[action]
    }

    pub fn reward_mean(&self, state: usize, action: usize) -> f64 {
        self.reward_mean[state][action]
    }

    /// Kernel of the stationary randomized policy that activates in state
    /// `s` with probability `activation[s]`.
    pub fn mixed_kernel(&self, activation: &[f64]) -> Vec<Vec<f64>> {
        (0..self.num_states)
            .map(|s| {
                let q = activation[s];
                (0..self.num_states)
                    .map(|t| (1.0 - q) * self.prob(PASSIVE, s, t) + q * self.prob(ACTIVE, s, t))
                    .collect()
            })
            .collect()
    }

    fn collect_violations(&self, arm: usize, out: &mut Vec<Violation>) {
        for (a, kernel) in self.transition.iter().enumerate() {
            for (s, row) in kernel.iter().enumerate() {
                if let Some(p) = row.iter().find(|p| !(0.0..=1.0).contains(*p)) {
                    out.push(Violation::new(
                        ViolationCode::ProbabilityOutOfRange,
                        format!("arm {arm}: P(.|s={s},a={a}) has entry {p} outside [0,1]"),
                    ));
                }
                let sum: f64 = row.iter().sum();
                if (sum - 1.0).abs() > ROW_SUM_TOL {
                    out.push(Violation::new(
                        ViolationCode::NonStochasticRow,
                        format!("arm {arm}: non-stochastic row P(.|s={s},a={a}) sums to {sum}"),
                    ));
                }
            }
        }
        for (s, r) in self.reward_mean.iter().enumerate() {
            if r[PASSIVE] != 0.0 {
                out.push(Violation::new(
                    ViolationCode::PassiveReward,
                    format!("arm {arm}: passive reward at state {s} is {} (must be 0)", r[PASSIVE]),
                ));
            }
            if !(0.0..=1.0).contains(&r[ACTIVE]) {
                out.push(Violation::new(
                    ViolationCode::RewardOutOfRange,
                    format!("arm {arm}: active reward mean {} at state {s} outside [0,1]", r[ACTIVE]),
                ));
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationCode {
    NonStochasticRow,
    ProbabilityOutOfRange,
    PassiveReward,
    RewardOutOfRange,
    StateCountMismatch,
    BudgetExceedsArms,
    ZeroBudget,
    FloorOutOfRange,
    FloorsExceedBudget,
    InitialStateOutOfRange,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub code: ViolationCode,
    pub message: String,
}

impl Violation {
    fn new(code: ViolationCode, message: String) -> Self {
        Self { code, message }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ValidationReport {
    pub ok: bool,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    fn from_violations(violations: Vec<Violation>) -> Self {
        Self {
            ok: violations.is_empty(),
            violations,
        }
    }

    pub fn has(&self, code: ViolationCode) -> bool {
        self.violations.iter().any(|v| v.code == code)
    }

    /// Turns a failed report into an error carrying every message.
    pub fn into_result(self) -> Result<(), ModelError> {
        if self.ok {
            Ok(())
        } else {
            Err(ModelError::Invalid(
                self.violations.into_iter().map(|v| v.message).collect(),
            ))
        }
    }
}

/// `N` arms, an activation budget and per-arm fairness floors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RmabInstance {
    arms: Vec<ArmModel>,
    budget: usize,
    eta: Vec<f64>,
    initial_states: Vec<usize>,
}

impl RmabInstance {
    pub fn new(
        arms: Vec<ArmModel>,
        budget: usize,
        eta: Vec<f64>,
        initial_states: Vec<usize>,
    ) -> Result<Self, ModelError> {
        if arms.is_empty() {
            return Err(ModelError::Shape("instance has no arms".into()));
        }
        if eta.len() != arms.len() {
            return Err(ModelError::Shape(format!(
                "eta/arms length mismatch: {} floors for {} arms",
                eta.len(),
                arms.len()
            )));
        }
        if initial_states.len() != arms.len() {
            return Err(ModelError::Shape(format!(
                "initial_states/arms length mismatch: {} states for {} arms",
                initial_states.len(),
                arms.len()
            )));
        }
        Ok(Self {
            arms,
            budget,
            eta,
            initial_states,
        })
    }

    pub fn arms(&self) -> &[ArmModel] {
        &self.arms
    }

    pub fn arm(&self, n: usize) -> &ArmModel {
        &self.arms[n]
    }

    pub fn num_arms(&self) -> usize {
        self.arms.len()
    }

    /// Shared state count (taken from the first arm).
    pub fn num_states(&self) -> usize {
        self.arms[0].num_states()
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    pub fn eta(&self) -> &[f64] {
        &self.eta
    }

    pub fn initial_states(&self) -> &[usize] {
        &self.initial_states
    }

    /// Same arms with a different budget and floors.
    pub fn with_constraints(&self, budget: usize, eta: Vec<f64>) -> Result<Self, ModelError> {
        Self::new(self.arms.clone(), budget, eta, self.initial_states.clone())
    }

    /// `copies` replicas of every arm, budget scaled by `copies`. Replicas
    /// of arm `n` occupy indices `n * copies .. (n + 1) * copies`.
    pub fn replicate(&self, copies: usize) -> Result<Self, ModelError> {
        let mut arms = Vec::with_capacity(self.arms.len() * copies);
        let mut eta = Vec::with_capacity(arms.capacity());
        let mut init = Vec::with_capacity(arms.capacity());
        for n in 0..self.arms.len() {
            for _ in 0..copies {
                arms.push(self.arms[n].clone());
                eta.push(self.eta[n]);
                init.push(self.initial_states[n]);
            }
        }
        Self::new(arms, self.budget * copies, eta, init)
    }

    pub fn validate(&self) -> ValidationReport {
        validate_instance(self)
    }
}

/// Checks every arm and instance invariant, plus the structural
/// feasibility condition `sum(eta) <= B <= N`.
pub fn validate_instance(instance: &RmabInstance) -> ValidationReport {
    let mut v = Vec::new();
    let s = instance.num_states();
    for (n, arm) in instance.arms.iter().enumerate() {
        if arm.num_states() != s {
            v.push(Violation::new(
                ViolationCode::StateCountMismatch,
                format!("arm {n} has {} states, expected {s}", arm.num_states()),
            ));
        }
        arm.collect_violations(n, &mut v);
    }
    if instance.budget == 0 {
        v.push(Violation::new(ViolationCode::ZeroBudget, "budget must be positive".into()));
    }
    if instance.budget > instance.num_arms() {
        v.push(Violation::new(
            ViolationCode::BudgetExceedsArms,
            format!("budget {} exceeds arm count {}", instance.budget, instance.num_arms()),
        ));
    }
    for (n, &e) in instance.eta.iter().enumerate() {
        if !(0.0..=1.0).contains(&e) {
            v.push(Violation::new(
                ViolationCode::FloorOutOfRange,
                format!("arm {n}: fairness floor {e} outside [0,1]"),
            ));
        }
    }
    let total: f64 = instance.eta.iter().sum();
    if total > instance.budget as f64 + 1e-12 {
        v.push(Violation::new(
            ViolationCode::FloorsExceedBudget,
            format!("fairness floors exceed budget: sum(eta) = {total} > B = {}", instance.budget),
        ));
    }
    for (n, (&st, arm)) in instance.initial_states.iter().zip(&instance.arms).enumerate() {
        if st >= arm.num_states() {
            v.push(Violation::new(
                ViolationCode::InitialStateOutOfRange,
                format!("arm {n}: initial state {st} out of range"),
            ));
        }
    }
    ValidationReport::from_violations(v)
}

/// Unique stationary distribution of a row-stochastic kernel, by solving
/// `pi (P - I) = 0` with one balance equation replaced by `sum(pi) = 1`.
///
/// Fails when the system is singular, which happens exactly when the chain
/// has more than one closed class.
pub fn stationary_distribution(kernel: &[Vec<f64>]) -> Result<Vec<f64>, ModelError> {
    let s = kernel.len();
    if s == 0 || kernel.iter().any(|r| r.len() != s) {
        return Err(ModelError::Shape("kernel must be square and non-empty".into()));
    }
    // Unknowns pi_0..pi_{s-1}; equation j (j < s-1): sum_i pi_i (P_ij - [i==j]) = 0.
    let mut m = vec![vec![0.0; s + 1]; s];
    for (j, eq) in m.iter_mut().enumerate().take(s - 1) {
        for i in 0..s {
            eq[i] = kernel[i][j] - if i == j { 1.0 } else { 0.0 };
        }
    }
    for i in 0..s {
        m[s - 1][i] = 1.0;
    }
    m[s - 1][s] = 1.0;
    let pi = crate::linalg::solve_augmented(m).ok_or(ModelError::NotUnichain)?;
    let residual = (0..s)
        .map(|j| {
            let flow: f64 = (0..s).map(|i| pi[i] * kernel[i][j]).sum();
            (flow - pi[j]).abs()
        })
        .fold(0.0, f64::max);
    if residual > 1e-8 || pi.iter().any(|&p| p < -1e-10) {
        return Err(ModelError::NotUnichain);
    }
    Ok(pi.into_iter().map(|p| p.max(0.0)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn swap_arm() -> ArmModel {
        let k = vec![vec![0.0, 1.0], vec![1.0, 0.0]];
        ArmModel::new(vec![k.clone(), k], vec![[0.0, 0.0], [0.0, 1.0]], RewardDist::Deterministic)
            .unwrap()
    }

    #[test]
    fn floors_at_budget_boundary_are_valid() {
        let inst = RmabInstance::new(vec![swap_arm(), swap_arm()], 1, vec![0.5, 0.5], vec![0, 0])
            .unwrap();
        let report = validate_instance(&inst);
        assert!(report.ok, "{:?}", report.violations);
    }

    #[test]
    fn floors_over_budget_are_reported() {
        let inst = RmabInstance::new(vec![swap_arm(), swap_arm()], 1, vec![0.6, 0.6], vec![0, 0])
            .unwrap();
        let report = validate_instance(&inst);
        assert!(!report.ok);
        assert!(report.has(ViolationCode::FloorsExceedBudget));
        assert!(report.violations[0].message.contains("fairness floors exceed budget"));
    }

    #[test]
    fn short_row_is_reported() {
        let k = vec![vec![0.5, 0.4], vec![0.5, 0.5]];
        let ok = vec![vec![0.5, 0.5], vec![0.5, 0.5]];
        let arm = ArmModel::new(vec![ok, k], vec![[0.0, 0.1], [0.0, 0.2]], RewardDist::Bernoulli)
            .unwrap();
        let inst = RmabInstance::new(vec![arm], 1, vec![0.0], vec![0]).unwrap();
        let report = validate_instance(&inst);
        assert_eq!(report.violations.len(), 1);
        assert!(report.has(ViolationCode::NonStochasticRow));
        assert!(report.violations[0].message.contains("non-stochastic row"));
    }

    #[test]
    fn every_violation_is_listed() {
        let bad = vec![vec![1.2, -0.2], vec![0.5, 0.5]];
        let arm = ArmModel::new(
            vec![bad.clone(), bad],
            vec![[0.3, 1.5], [0.0, 0.5]],
            RewardDist::Bernoulli,
        )
        .unwrap();
        let inst = RmabInstance::new(vec![arm], 2, vec![1.5], vec![4]).unwrap();
        let r = validate_instance(&inst);
        for code in [
            ViolationCode::ProbabilityOutOfRange,
            ViolationCode::PassiveReward,
            ViolationCode::RewardOutOfRange,
            ViolationCode::BudgetExceedsArms,
            ViolationCode::FloorOutOfRange,
            ViolationCode::InitialStateOutOfRange,
        ] {
            assert!(r.has(code), "missing {code:?}");
        }
        assert!(r.into_result().is_err());
    }

    #[test]
    fn mismatched_lengths_fail_construction() {
        let err = RmabInstance::new(vec![swap_arm()], 1, vec![0.1, 0.1], vec![0]).unwrap_err();
        assert!(err.to_string().contains("eta/arms length mismatch"));
    }

    #[test]
    fn swap_chain_is_uniform() {
        let pi = stationary_distribution(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert!((pi[0] - 0.5).abs() < 1e-12 && (pi[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn identity_is_reducible() {
        let err = stationary_distribution(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap_err();
        assert!(err.to_string().contains("periodic or reducible chain suspected"));
    }

    #[test]
    fn two_state_chain_matches_hand_solution() {
        // pi_0 * 0.1 = pi_1 * 0.2  =>  pi = (2/3, 1/3)
        let pi = stationary_distribution(&[vec![0.9, 0.1], vec![0.2, 0.8]]).unwrap();
        assert!((pi[0] - 2.0 / 3.0).abs() < 1e-12);
        assert!((pi[1] - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn replicate_scales_budget_and_groups_copies() {
        let inst = RmabInstance::new(vec![swap_arm()], 1, vec![0.25], vec![1]).unwrap();
        let big = inst.replicate(3).unwrap();
        assert_eq!(big.num_arms(), 3);
        assert_eq!(big.budget(), 3);
        assert_eq!(big.eta(), &[0.25, 0.25, 0.25]);
        assert_eq!(big.initial_states(), &[1, 1, 1]);
    }
}

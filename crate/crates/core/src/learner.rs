//! Online learners: Fair-UCRL and G-Fair-UCRL, plus the two reference
//! policies (offline index with the true model, uniform random).
//!
//! Time is split into `K` episodes of `H` epochs. At the start of an
//! episode Fair-UCRL builds confidence balls from the visit counts, solves
//! the extended LP with fairness rows and runs the resulting index policy
//! for the whole episode; counts are folded in at the episode end.
//! G-Fair-UCRL first runs a forced schedule that gives every arm its
//! `ceil(H eta_n)` activations, folds those samples in, then plans without
//! fairness rows for the rest of the episode.
//!
//! Each trial draws from two ChaCha8 streams derived from one seed: stream
//! 0 drives the environment, stream 1 the policy (tie-breaks, shuffles).

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::env::step_arm;
use crate::error::{LearnerError, LpError};
use crate::index::{fair_indices, select_top_b, ActionVector, IndexTable};
use crate::lp::{
    elp_program, occupancy_from_solution, offline_program, ConfidenceModel, LpStatus, OccupancyForm, OccupancyLayout,
};
use crate::model::{RmabInstance, NUM_ACTIONS};

/// One observed step of one arm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Transition {
    pub arm: usize,
    pub state: usize,
    pub action: usize,
    pub reward: f64,
    pub next: usize,
}

/// Visit, transition and reward tallies per arm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Counts {
    num_arms: usize,
    num_states: usize,
    visit: Vec<u64>,
    trans: Vec<u64>,
    reward_sum: Vec<f64>,
}

impl Counts {
    pub fn new(num_arms: usize, num_states: usize) -> Self {
        let sa = num_arms * num_states * NUM_ACTIONS;
        Self {
            num_arms,
            num_states,
            visit: vec![0; sa],
            trans: vec![0; sa * num_states],
            reward_sum: vec![0.0; sa],
        }
    }

    pub fn num_arms(&self) -> usize {
        self.num_arms
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    fn sa(&self, arm: usize, state: usize, action: usize) -> usize {
        (arm * self.num_states + state) * NUM_ACTIONS + action
    }

    pub fn visit(&self, arm: usize, state: usize, action: usize) -> u64 {
        self.visit[self.sa(arm, state, action)]
    }

    pub fn trans(&self, arm: usize, state: usize, action: usize, next: usize) -> u64 {
        self.trans[self.sa(arm, state, action) * self.num_states + next]
    }

    pub fn reward_sum(&self, arm: usize, state: usize, action: usize) -> f64 {
        self.reward_sum[self.sa(arm, state, action)]
    }

    pub fn record(&mut self, t: &Transition) {
        self.record_repeated(t, 1);
    }

    /// Records `times` copies of the same transition.
    pub fn record_repeated(&mut self, t: &Transition, times: u64) {
        let i = self.sa(t.arm, t.state, t.action);
        self.visit[i] += times;
        self.trans[i * self.num_states + t.next] += times;
        self.reward_sum[i] += t.reward * times as f64;
    }

    pub fn update(&mut self, batch: &[Transition]) {
        batch.iter().for_each(|t| self.record(t));
    }

    /// Total visits of one arm over all state-action pairs.
    pub fn arm_total(&self, arm: usize) -> u64 {
        let w = self.num_states * NUM_ACTIONS;
        self.visit[arm * w..(arm + 1) * w].iter().sum()
    }

    /// Transition tallies add up to visits and reward sums never exceed
    /// visits.
    pub fn is_consistent(&self) -> bool {
        let s = self.num_states;
        self.visit.iter().enumerate().all(|(i, &v)| {
            let t: u64 = self.trans[i * s..(i + 1) * s].iter().sum();
            t == v && self.reward_sum[i] >= 0.0 && self.reward_sum[i] <= v as f64 + 1e-9
        })
    }
}

/// Empirical kernels (uniform where unvisited) and mean rewards, indexed
/// `[n][s][a]`.
pub type Estimates = (Vec<Vec<[Vec<f64>; NUM_ACTIONS]>>, Vec<Vec<[f64; NUM_ACTIONS]>>);

pub fn empirical_estimates(counts: &Counts) -> Estimates {
    let s_count = counts.num_states;
    let mut p_hat = Vec::with_capacity(counts.num_arms);
    let mut r_hat = Vec::with_capacity(counts.num_arms);
    for n in 0..counts.num_arms {
        let mut p_arm = Vec::with_capacity(s_count);
        let mut r_arm = Vec::with_capacity(s_count);
        for s in 0..s_count {
            let row = |a: usize| {
                let v = counts.visit(n, s, a);
                if v == 0 {
                    vec![1.0 / s_count as f64; s_count]
                } else {
                    (0..s_count).map(|t| counts.trans(n, s, a, t) as f64 / v as f64).collect()
                }
            };
            let mean = |a: usize| counts.reward_sum(n, s, a) / counts.visit(n, s, a).max(1) as f64;
            p_arm.push([row(0), row(1)]);
            r_arm.push([mean(0), mean(1)]);
        }
        p_hat.push(p_arm);
        r_hat.push(r_arm);
    }
    (p_hat, r_hat)
}

/// `sqrt(ln(S A N max(k-1, 1) H / eps) / (2 max(C, 1)))`.
pub fn confidence_radius(
    count: u64,
    episode: usize,
    horizon: usize,
    epsilon: f64,
    num_states: usize,
    num_actions: usize,
    num_arms: usize,
) -> f64 {
    let k = episode.saturating_sub(1).max(1) as f64;
    let arg = (num_states * num_actions * num_arms) as f64 * k * horizon as f64 / epsilon;
    (arg.ln().max(0.0) / (2.0 * count.max(1) as f64)).sqrt()
}

/// Plausible-model ball for episode `episode` (1-based).
pub fn confidence_model(counts: &Counts, episode: usize, horizon: usize, epsilon: f64) -> ConfidenceModel {
    let (p_hat, r_hat) = empirical_estimates(counts);
    let (n_arms, s_count) = (counts.num_arms, counts.num_states);
    let delta = (0..n_arms)
        .map(|n| {
            (0..s_count)
                .map(|s| {
                    let d = |a| confidence_radius(counts.visit(n, s, a), episode, horizon, epsilon, s_count, NUM_ACTIONS, n_arms);
                    [d(0), d(1)]
                })
                .collect()
        })
        .collect();
    ConfidenceModel::new(p_hat, r_hat, delta).expect("estimates from counts are well formed")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    FairUcrl,
    GFairUcrl,
    OracleIndex,
    Random,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [Self::FairUcrl, Self::GFairUcrl, Self::OracleIndex, Self::Random];

    pub fn name(self) -> &'static str {
        match self {
            Self::FairUcrl => "fair-ucrl",
            Self::GFairUcrl => "g-fair-ucrl",
            Self::OracleIndex => "oracle-index",
            Self::Random => "random",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = LearnerError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL.into_iter().find(|a| a.name() == s).ok_or_else(|| {
            let valid: Vec<_> = Self::ALL.iter().map(|a| a.name()).collect();
            LearnerError::Config(format!("unknown algorithm `{s}` (valid: {})", valid.join(", ")))
        })
    }
}

fn default_epsilon() -> f64 {
    0.1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LearnerConfig {
    pub episodes: usize,
    pub horizon: usize,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    pub seed: u64,
    pub algorithm: Algorithm,
}

impl LearnerConfig {
    pub fn new(episodes: usize, horizon: usize, seed: u64, algorithm: Algorithm) -> Self {
        Self {
            episodes,
            horizon,
            epsilon: default_epsilon(),
            seed,
            algorithm,
        }
    }

    pub fn total_epochs(&self) -> usize {
        self.episodes * self.horizon
    }

    pub fn validate(&self) -> Result<(), LearnerError> {
        if self.episodes == 0 || self.horizon == 0 {
            return Err(LearnerError::Config("episodes and horizon must be at least 1".into()));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(LearnerError::Config(format!("epsilon {} outside (0, 1)", self.epsilon)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub states: Vec<usize>,
    pub actions: ActionVector,
    pub rewards: Vec<f64>,
}

impl EpochRecord {
    pub fn total_reward(&self) -> f64 {
        self.rewards.iter().sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeRecord {
    /// Index table executed after any forced epochs; `None` if the whole
    /// episode was forced or random.
    pub index: Option<IndexTable>,
    pub lp_objective: Option<f64>,
    pub forced_epochs: usize,
    /// Activations per arm within this episode.
    pub activations: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialLog {
    pub algorithm: Algorithm,
    pub budget: usize,
    pub horizon: usize,
    pub epochs: Vec<EpochRecord>,
    pub episodes: Vec<EpisodeRecord>,
    /// Cumulative activations per arm over the whole trial.
    pub activation_counts: Vec<u64>,
    /// Counts after the last episode (learners only).
    pub counts: Option<Counts>,
}

impl TrialLog {
    pub fn len(&self) -> usize {
        self.epochs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.epochs.is_empty()
    }

    pub fn num_arms(&self) -> usize {
        self.activation_counts.len()
    }

    /// Every epoch activates exactly `min(B, N)` arms.
    pub fn budget_exact(&self) -> bool {
        let want = self.budget.min(self.num_arms());
        self.epochs.iter().all(|e| e.actions.num_active() == want)
    }
}

/// Per-arm quota `ceil(H eta_n)`. The tiny slack keeps products such as
/// `60 * 0.3` from rounding up past an integer.
pub fn activation_quota(eta: f64, horizon: usize) -> usize {
    (horizon as f64 * eta - 1e-9).ceil().max(0.0) as usize
}

/// Forced activation schedule: arm `n` appears in at least `ceil(H eta_n)`
/// epochs and every epoch activates `min(B, N)` arms. Quotas are laid out
/// wrap-around over the epochs in a shuffled arm order; leftover slots are
/// filled round-robin.
pub fn greedy_exploration_schedule<R: Rng + ?Sized>(
    eta: &[f64],
    horizon: usize,
    budget: usize,
    rng: &mut R,
) -> Result<Vec<ActionVector>, LearnerError> {
    let n = eta.len();
    let width = budget.min(n);
    let quota: Vec<usize> = eta.iter().map(|&e| activation_quota(e, horizon)).collect();
    let needed: usize = quota.iter().sum();
    let available = horizon * width;
    if needed > available {
        return Err(LearnerError::QuotaExceedsBudget { needed, available });
    }
    if needed == 0 {
        return Ok(Vec::new());
    }
    let length = needed.div_ceil(width).max(quota.iter().copied().max().unwrap_or(0));
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut schedule = vec![ActionVector::passive(n); length];
    let mut slot = 0;
    for &arm in &order {
        for _ in 0..quota[arm] {
            schedule[slot % length].0[arm] = 1;
            slot += 1;
        }
    }
    let mut cursor = 0;
    for epoch in &mut schedule {
        while epoch.num_active() < width {
            let arm = order[cursor % n];
            cursor += 1;
            epoch.0[arm] = 1;
        }
    }
    Ok(schedule)
}

/// Solves the extended LP for episode `episode` and returns the fair
/// index table and the LP value.
pub fn plan_episode(
    counts: &Counts,
    episode: usize,
    config: &LearnerConfig,
    instance: &RmabInstance,
) -> Result<(IndexTable, f64), LearnerError> {
    let conf = confidence_model(counts, episode, config.horizon, config.epsilon);
    let with_fairness = config.algorithm != Algorithm::GFairUcrl;
    let sol = elp_program(&conf, instance.budget(), instance.eta(), with_fairness).solve()?;
    if sol.status != LpStatus::Optimal {
        return Err(LearnerError::InfeasiblePlan { episode });
    }
    let layout = OccupancyLayout {
        form: OccupancyForm::Transition,
        num_arms: counts.num_arms(),
        num_states: counts.num_states(),
    };
    let occ = occupancy_from_solution(&sol, layout)?;
    Ok((fair_indices(&occ), sol.objective_value))
}

/// Index table of the offline relaxation with the true model.
pub fn offline_index(instance: &RmabInstance) -> Result<(IndexTable, f64), LpError> {
    let sol = offline_program(instance).solve()?;
    let layout = OccupancyLayout {
        form: OccupancyForm::StateAction,
        num_arms: instance.num_arms(),
        num_states: instance.num_states(),
    };
    let occ = occupancy_from_solution(&sol, layout)?;
    Ok((fair_indices(&occ), sol.objective_value))
}

/// Mutable state of one simulated trial.
struct Sim<'a> {
    instance: &'a RmabInstance,
    env_rng: ChaCha8Rng,
    policy_rng: ChaCha8Rng,
    states: Vec<usize>,
    log: TrialLog,
}

impl<'a> Sim<'a> {
    fn new(instance: &'a RmabInstance, config: &LearnerConfig) -> Self {
        let mut env_rng = ChaCha8Rng::seed_from_u64(config.seed);
        env_rng.set_stream(0);
        let mut policy_rng = ChaCha8Rng::seed_from_u64(config.seed);
        policy_rng.set_stream(1);
        let n = instance.num_arms();
        Self {
            instance,
            env_rng,
            policy_rng,
            states: instance.initial_states().to_vec(),
            log: TrialLog {
                algorithm: config.algorithm,
                budget: instance.budget(),
                horizon: config.horizon,
                epochs: Vec::with_capacity(config.total_epochs()),
                episodes: Vec::with_capacity(config.episodes),
                activation_counts: vec![0; n],
                counts: None,
            },
        }
    }

    /// Plays one epoch, appending the arm transitions to `batch`.
    fn step(&mut self, actions: ActionVector, episode: &mut EpisodeRecord, batch: &mut Vec<Transition>) {
        let n = self.instance.num_arms();
        let mut rewards = Vec::with_capacity(n);
        let before = self.states.clone();
        for arm in 0..n {
            let a = actions.action(arm);
            let out = step_arm(self.instance.arm(arm), before[arm], a, &mut self.env_rng);
            batch.push(Transition {
                arm,
                state: before[arm],
                action: a,
                reward: out.reward,
                next: out.next_state,
            });
            self.states[arm] = out.next_state;
            rewards.push(out.reward);
            if a == 1 {
                episode.activations[arm] += 1;
                self.log.activation_counts[arm] += 1;
            }
        }
        self.log.epochs.push(EpochRecord {
            states: before,
            actions,
            rewards,
        });
    }

    fn run_index(&mut self, table: &IndexTable, epochs: usize, episode: &mut EpisodeRecord, batch: &mut Vec<Transition>) {
        for _ in 0..epochs {
            let a = select_top_b(table, &self.states, self.instance.budget(), &mut self.policy_rng);
            self.step(a, episode, batch);
        }
    }

    fn new_episode(&self) -> EpisodeRecord {
        EpisodeRecord {
            index: None,
            lp_objective: None,
            forced_epochs: 0,
            activations: vec![0; self.instance.num_arms()],
        }
    }
}

fn check_algorithm(config: &LearnerConfig, want: Algorithm) -> Result<(), LearnerError> {
    config.validate()?;
    if config.algorithm != want {
        return Err(LearnerError::Config(format!(
            "config asks for {} but the {want} runner was called",
            config.algorithm
        )));
    }
    Ok(())
}

pub fn run_fair_ucrl(instance: &RmabInstance, config: &LearnerConfig) -> Result<TrialLog, LearnerError> {
    check_algorithm(config, Algorithm::FairUcrl)?;
    instance.validate().into_result()?;
    let mut sim = Sim::new(instance, config);
    let mut counts = Counts::new(instance.num_arms(), instance.num_states());
    let mut batch = Vec::with_capacity(config.horizon * instance.num_arms());
    for k in 1..=config.episodes {
        let (table, value) = plan_episode(&counts, k, config, instance)?;
        let mut ep = sim.new_episode();
        sim.run_index(&table, config.horizon, &mut ep, &mut batch);
        counts.update(&batch);
        batch.clear();
        ep.index = Some(table);
        ep.lp_objective = Some(value);
        sim.log.episodes.push(ep);
    }
    sim.log.counts = Some(counts);
    Ok(sim.log)
}

pub fn run_g_fair_ucrl(instance: &RmabInstance, config: &LearnerConfig) -> Result<TrialLog, LearnerError> {
    check_algorithm(config, Algorithm::GFairUcrl)?;
    instance.validate().into_result()?;
    let mut sim = Sim::new(instance, config);
    let mut counts = Counts::new(instance.num_arms(), instance.num_states());
    let mut batch = Vec::with_capacity(config.horizon * instance.num_arms());
    for k in 1..=config.episodes {
        let schedule = greedy_exploration_schedule(instance.eta(), config.horizon, instance.budget(), &mut sim.policy_rng)?;
        let mut ep = sim.new_episode();
        ep.forced_epochs = schedule.len();
        for a in schedule {
            sim.step(a, &mut ep, &mut batch);
        }
        counts.update(&batch);
        batch.clear();
        let rest = config.horizon - ep.forced_epochs;
        if rest > 0 {
            let (table, value) = plan_episode(&counts, k, config, instance)?;
            sim.run_index(&table, rest, &mut ep, &mut batch);
            counts.update(&batch);
            batch.clear();
            ep.index = Some(table);
            ep.lp_objective = Some(value);
        }
        sim.log.episodes.push(ep);
    }
    sim.log.counts = Some(counts);
    Ok(sim.log)
}

/// Offline fair index policy with the true model. `table` may be passed
/// in to avoid re-solving the offline LP per trial.
pub fn run_oracle_index(
    instance: &RmabInstance,
    config: &LearnerConfig,
    table: Option<&IndexTable>,
) -> Result<TrialLog, LearnerError> {
    check_algorithm(config, Algorithm::OracleIndex)?;
    let owned;
    let (table, value) = match table {
        Some(t) => (t, None),
        None => {
            let (t, v) = offline_index(instance)?;
            owned = t;
            (&owned, Some(v))
        }
    };
    let mut sim = Sim::new(instance, config);
    let mut scratch = Vec::new();
    for _ in 0..config.episodes {
        let mut ep = sim.new_episode();
        sim.run_index(table, config.horizon, &mut ep, &mut scratch);
        scratch.clear();
        ep.lp_objective = value;
        sim.log.episodes.push(ep);
    }
    if let Some(first) = sim.log.episodes.first_mut() {
        first.index = Some(table.clone());
    }
    Ok(sim.log)
}

/// Uniformly random `min(B, N)`-subset every epoch.
pub fn run_random(instance: &RmabInstance, config: &LearnerConfig) -> Result<TrialLog, LearnerError> {
    check_algorithm(config, Algorithm::Random)?;
    let mut sim = Sim::new(instance, config);
    let n = instance.num_arms();
    let mut scratch = Vec::new();
    let mut order: Vec<usize> = (0..n).collect();
    for _ in 0..config.episodes {
        let mut ep = sim.new_episode();
        for _ in 0..config.horizon {
            order.shuffle(&mut sim.policy_rng);
            let a = ActionVector::from_active(n, order[..instance.budget().min(n)].iter().copied());
            sim.step(a, &mut ep, &mut scratch);
        }
        scratch.clear();
        sim.log.episodes.push(ep);
    }
    Ok(sim.log)
}

/// Dispatches on `config.algorithm`.
pub fn run_trial(
    instance: &RmabInstance,
    config: &LearnerConfig,
    oracle_table: Option<&IndexTable>,
) -> Result<TrialLog, LearnerError> {
    match config.algorithm {
        Algorithm::FairUcrl => run_fair_ucrl(instance, config),
        Algorithm::GFairUcrl => run_g_fair_ucrl(instance, config),
        Algorithm::OracleIndex => run_oracle_index(instance, config, oracle_table),
        Algorithm::Random => run_random(instance, config),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fresh_counts_give_uniform_rows() {
        let c = Counts::new(1, 2);
        let (p, r) = empirical_estimates(&c);
        assert_eq!(p[0][1][1], vec![0.5, 0.5]);
        assert_eq!(r[0][0][1], 0.0);
        assert!(c.is_consistent());
    }

    #[test]
    fn ratios_of_counts() {
        let mut c = Counts::new(1, 3);
        let t = |next, reward| Transition { arm: 0, state: 0, action: 1, reward, next };
        c.update(&[t(1, 1.0), t(1, 0.0), t(2, 0.0)]);
        assert_eq!(c.visit(0, 0, 1), 3);
        assert_eq!(c.trans(0, 0, 1, 1), 2);
        let (p, r) = empirical_estimates(&c);
        assert!((p[0][0][1][1] - 2.0 / 3.0).abs() < 1e-15);
        assert!((r[0][0][1] - 1.0 / 3.0).abs() < 1e-15);
        let before = c.clone();
        c.update(&[]);
        assert_eq!(c, before);
    }

    #[test]
    fn quarter_three_quarter_row() {
        let mut c = Counts::new(1, 2);
        let t = |next, reward| Transition { arm: 0, state: 1, action: 1, reward, next };
        c.update(&[t(0, 1.0), t(1, 1.0), t(1, 0.0), t(1, 0.0)]);
        let (p, r) = empirical_estimates(&c);
        assert_eq!(p[0][1][1], vec![0.25, 0.75]);
        assert_eq!(r[0][1][1], 0.5);
    }

    #[test]
    fn radius_reference_value() {
        let d = confidence_radius(8, 2, 160, 0.1, 6, 2, 3);
        // S A N (k - 1) H / eps = 6 * 2 * 3 * 1 * 160 / 0.1
        let want = (57600.0f64.ln() / 16.0).sqrt();
        assert!((d - want).abs() < 1e-12);
        assert!((d - 0.8277).abs() < 5e-5);
        assert_eq!(confidence_radius(0, 2, 160, 0.1, 6, 2, 3), confidence_radius(1, 2, 160, 0.1, 6, 2, 3));
        let ratio = confidence_radius(32, 2, 160, 0.1, 6, 2, 3) / d;
        assert!((ratio - 0.5).abs() < 1e-12);
    }

    #[test]
    fn paper_schedule_length() {
        let eta: Vec<f64> = [0.1, 0.2, 0.3].iter().flat_map(|&e| std::iter::repeat_n(e, 100)).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let s = greedy_exploration_schedule(&eta, 160, 100, &mut rng).unwrap();
        assert_eq!(s.len(), 96);
        assert!(s.iter().all(|a| a.num_active() == 100));
    }

    #[test]
    fn zero_floors_give_empty_schedule() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(greedy_exploration_schedule(&[0.0; 4], 10, 2, &mut rng).unwrap().is_empty());
    }

    #[test]
    fn oversized_quota_is_an_error() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let err = greedy_exploration_schedule(&[0.9, 0.9, 0.9], 10, 1, &mut rng).unwrap_err();
        assert!(err.to_string().contains("fairness quota exceeds episode budget"));
    }

    #[test]
    fn unknown_algorithm_lists_valid_names() {
        let err = "ucrl2".parse::<Algorithm>().unwrap_err().to_string();
        assert!(err.contains("fair-ucrl") && err.contains("random"));
        assert_eq!("g-fair-ucrl".parse::<Algorithm>().unwrap(), Algorithm::GFairUcrl);
    }
}

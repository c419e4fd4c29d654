//! Environment builders and the stochastic arm step.
//!
//! Four families are provided: a birth-death queue, the two CPAP adherence
//! clusters, crowdsourced annotation workers (RTE) and land-mobile
//! satellite channels (LMSS). Each builder returns a plain [`ArmModel`];
//! the `*_instance` presets assemble the experiment configurations.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::EnvError;
use crate::model::{ArmModel, RewardDist, RmabInstance, ACTIVE, PASSIVE};

/// CPAP cluster 1 ("Adherence") passive kernel, states low/intermediate/acceptable.
pub const CPAP_CLUSTER1_DIAGRAM: [[f64; 3]; 3] = [
    [0.0385, 0.0, 0.9615],
    [0.0, 0.0, 1.0],
    [0.0257, 0.0245, 0.9498],
];

/// CPAP cluster 2 ("Non-Adherence") passive kernel as published. Row 0
/// sums to 1.0003 because of rounding; see [`cpap_passive_kernel`].
pub const CPAP_CLUSTER2_DIAGRAM: [[f64; 3]; 3] = [
    [0.7427, 0.0741, 0.1835],
    [0.3399, 0.1634, 0.4967],
    [0.2323, 0.1020, 0.6657],
];

/// LMSS two-state channel rows `(p11, p12, p21, p22)` per elevation angle.
pub const LMSS_TABLE: [(u32, [f64; 4]); 4] = [
    (40, [0.9155, 0.0845, 0.0811, 0.9189]),
    (60, [0.9043, 0.0957, 0.2, 0.8]),
    (70, [0.9155, 0.0845, 0.2069, 0.7931]),
    (80, [0.9268, 0.0732, 0.2667, 0.7333]),
];

/// Per-worker successful-annotation probabilities for the RTE task.
pub const RTE_SUCCESS_PROBS: [f64; 10] = [0.495, 0.45, 0.4, 0.3, 0.6, 0.55, 0.65, 0.5, 0.54, 0.37];

pub const LMSS_GOOD_REWARD: f64 = 1.0;
pub const LMSS_BAD_REWARD: f64 = 0.2;

fn default_one() -> f64 {
    1.0
}
fn default_good() -> f64 {
    LMSS_GOOD_REWARD
}
fn default_bad() -> f64 {
    LMSS_BAD_REWARD
}

/// Serializable description of one arm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EnvSpec {
    BirthDeath {
        lambda: f64,
        mu: f64,
        num_states: usize,
        reward_slope: f64,
    },
    Cpap {
        cluster: u8,
        boost: f64,
        #[serde(default)]
        noise_scale: f64,
        #[serde(default)]
        seed: u64,
    },
    Rte {
        success_prob: f64,
        /// `P(0 | s, passive)`; 1 means an idle worker's answer goes stale.
        #[serde(default = "default_one")]
        passive_reset: f64,
    },
    Lmss {
        elevation: u32,
        #[serde(default = "default_good")]
        good_reward: f64,
        #[serde(default = "default_bad")]
        bad_reward: f64,
    },
}

impl EnvSpec {
    pub fn build(&self) -> Result<ArmModel, EnvError> {
        match *self {
            EnvSpec::BirthDeath {
                lambda,
                mu,
                num_states,
                reward_slope,
            } => make_birth_death_arm(lambda, mu, num_states, reward_slope),
            EnvSpec::Cpap {
                cluster,
                boost,
                noise_scale,
                seed,
            } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                make_cpap_arm(cluster, boost, noise_scale, &mut rng)
            }
            EnvSpec::Rte {
                success_prob,
                passive_reset,
            } => make_rte_arm_with_reset(success_prob, passive_reset),
            EnvSpec::Lmss {
                elevation,
                good_reward,
                bad_reward,
            } => make_lmss_arm_with_rewards(elevation, good_reward, bad_reward),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOutcome {
    pub next_state: usize,
    pub reward: f64,
}

fn check_prob(name: &str, p: f64) -> Result<(), EnvError> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(EnvError::OutOfRange(format!("{name} = {p} not in [0,1]")))
    }
}

/// Birth-death arm: up with probability `lambda / (lambda + mu)`, down
/// otherwise, boundary mass kept as a self-loop. Both actions share the
/// kernel; activation only collects the Bernoulli(`s * slope`) reward.
pub fn make_birth_death_arm(
    lambda: f64,
    mu: f64,
    num_states: usize,
    reward_slope: f64,
) -> Result<ArmModel, EnvError> {
    if !(lambda > 0.0 && mu > 0.0) {
        return Err(EnvError::OutOfRange(format!(
            "rates must be positive (lambda = {lambda}, mu = {mu})"
        )));
    }
    if num_states < 2 {
        return Err(EnvError::OutOfRange(format!("need at least 2 states, got {num_states}")));
    }
    if reward_slope <= 0.0 {
        return Err(EnvError::OutOfRange(format!("reward slope {reward_slope} must be positive")));
    }
    if reward_slope * (num_states - 1) as f64 > 1.0 + 1e-12 {
        return Err(EnvError::RewardMeanExceedsOne {
            slope: reward_slope,
            states: num_states,
        });
    }
    let up = lambda / (lambda + mu);
    let down = mu / (lambda + mu);
    let kernel: Vec<Vec<f64>> = (0..num_states)
        .map(|s| {
            let mut row = vec![0.0; num_states];
            if s + 1 < num_states {
                row[s + 1] += up;
            } else {
                row[s] += up;
            }
            if s > 0 {
                row[s - 1] += down;
            } else {
                row[s] += down;
            }
            row
        })
        .collect();
    let rewards = (0..num_states).map(|s| [0.0, s as f64 * reward_slope]).collect();
    Ok(ArmModel::new(vec![kernel.clone(), kernel], rewards, RewardDist::Bernoulli)?)
}

/// Row-stochastic passive kernel for a CPAP cluster. Cluster 1 is the
/// published diagram verbatim; cluster 2 takes the 0.0003 rounding
/// surplus of its first row off the low-to-intermediate edge.
pub fn cpap_passive_kernel(cluster: u8) -> Result<[[f64; 3]; 3], EnvError> {
    match cluster {
        1 => Ok(CPAP_CLUSTER1_DIAGRAM),
        2 => {
            let mut k = CPAP_CLUSTER2_DIAGRAM;
            k[0][1] = 0.0738;
            Ok(k)
        }
        c => Err(EnvError::OutOfRange(format!("CPAP cluster {c} (expected 1 or 2)"))),
    }
}

/// CPAP patient arm. The passive kernel gets zero-mean uniform noise of
/// magnitude at most `noise_scale` on its non-zero entries; intervention
/// moves a `boost` fraction of every lower-adherence target's mass onto the
/// acceptable-adherence state. Reward is the adherence level scaled to
/// `1/3, 2/3, 1`.
pub fn make_cpap_arm<R: Rng + ?Sized>(
    cluster: u8,
    boost: f64,
    noise_scale: f64,
    rng: &mut R,
) -> Result<ArmModel, EnvError> {
    if !(0.0..=0.5).contains(&boost) {
        return Err(EnvError::OutOfRange(format!("boost {boost} not in [0, 0.5]")));
    }
    if noise_scale.is_nan() || noise_scale < 0.0 {
        return Err(EnvError::OutOfRange(format!("noise scale {noise_scale} must be >= 0")));
    }
    let base = cpap_passive_kernel(cluster)?;
    let mut passive: Vec<Vec<f64>> = base.iter().map(|r| r.to_vec()).collect();
    if noise_scale > 0.0 {
        for (i, row) in passive.iter_mut().enumerate() {
            for p in row.iter_mut() {
                if *p > 0.0 {
                    *p = (*p + noise_scale * rng.gen_range(-1.0..=1.0)).max(0.0);
                }
            }
            let sum: f64 = row.iter().sum();
            if sum.is_nan() || sum <= 0.0 {
                return Err(EnvError::NonNormalizable { row: i });
            }
            row.iter_mut().for_each(|p| *p /= sum);
        }
    }
    let top = 2;
    let active: Vec<Vec<f64>> = passive
        .iter()
        .map(|row| {
            let mut r = row.clone();
            for j in 0..top {
                let moved = boost * r[j];
                r[j] -= moved;
                r[top] += moved;
            }
            r
        })
        .collect();
    let rewards = (0..3).map(|s| [0.0, (s + 1) as f64 / 3.0]).collect();
    Ok(ArmModel::new(vec![passive, active], rewards, RewardDist::Deterministic)?)
}

/// Annotation worker with stale-on-idle passive dynamics.
pub fn make_rte_arm(success_prob: f64) -> Result<ArmModel, EnvError> {
    make_rte_arm_with_reset(success_prob, 1.0)
}

/// Annotation worker: when assigned, the next state is 1 (correct) with
/// probability `success_prob` regardless of the current state; when idle
/// it falls back to state 0 with probability `passive_reset`.
pub fn make_rte_arm_with_reset(success_prob: f64, passive_reset: f64) -> Result<ArmModel, EnvError> {
    check_prob("success_prob", success_prob)?;
    check_prob("passive_reset", passive_reset)?;
    let active = vec![
        vec![1.0 - success_prob, success_prob],
        vec![1.0 - success_prob, success_prob],
    ];
    let passive = vec![
        vec![1.0, 0.0],
        vec![passive_reset, 1.0 - passive_reset],
    ];
    let rewards = vec![[0.0, 0.0], [0.0, 1.0]];
    Ok(ArmModel::new(vec![passive, active], rewards, RewardDist::Deterministic)?)
}

pub fn make_lmss_arm(elevation: u32) -> Result<ArmModel, EnvError> {
    make_lmss_arm_with_rewards(elevation, LMSS_GOOD_REWARD, LMSS_BAD_REWARD)
}

/// Two-state (good = 0, bad = 1) satellite channel. The channel evolves
/// the same whether or not it is selected.
pub fn make_lmss_arm_with_rewards(
    elevation: u32,
    good_reward: f64,
    bad_reward: f64,
) -> Result<ArmModel, EnvError> {
    check_prob("good_reward", good_reward)?;
    check_prob("bad_reward", bad_reward)?;
    let [p11, p12, p21, p22] = LMSS_TABLE
        .iter()
        .find(|(e, _)| *e == elevation)
        .map(|(_, row)| *row)
        .ok_or(EnvError::UnknownElevation(elevation))?;
    let kernel = vec![vec![p11, p12], vec![p21, p22]];
    let rewards = vec![[0.0, good_reward], [0.0, bad_reward]];
    Ok(ArmModel::new(vec![kernel.clone(), kernel], rewards, RewardDist::Deterministic)?)
}

#[inline]
fn sample_row(row: &[f64], u: f64) -> usize {
    let mut acc = 0.0;
    let mut last = 0;
    for (j, &p) in row.iter().enumerate() {
        if p > 0.0 {
            acc += p;
            last = j;
            if u < acc {
                return j;
            }
        }
    }
    last
}

/// Advances one arm by one epoch. Always consumes exactly two uniforms
/// from `rng` (transition, reward) so that the environment stream does not
/// depend on the actions taken.
pub fn step_arm<R: Rng + ?Sized>(arm: &ArmModel, state: usize, action: usize, rng: &mut R) -> StepOutcome {
    let u_next: f64 = rng.gen();
    let u_reward: f64 = rng.gen();
    let next_state = sample_row(arm.row(action, state), u_next);
    let reward = if action == PASSIVE {
        0.0
    } else {
        let mean = arm.reward_mean(state, ACTIVE);
        match arm.reward_dist() {
            RewardDist::Deterministic => mean,
            RewardDist::Bernoulli => {
                if u_reward < mean {
                    1.0
                } else {
                    0.0
                }
            }
        }
    };
    StepOutcome { next_state, reward }
}

/// Fairness floors for the synthetic classes.
pub const SYNTHETIC_ETA: [f64; 3] = [0.1, 0.2, 0.3];

/// Birth-death classes `n = 1, 2, 3` with arrival rate `3n`, departure
/// rate 5 and six states; each class draws its reward slope uniformly from
/// `[0.01, 0.1]`. Copies of class `c` sit at indices `c * copies ..`.
pub fn synthetic_instance(copies_per_class: usize, budget: usize, seed: u64) -> Result<RmabInstance, EnvError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut arms = Vec::new();
    let mut eta = Vec::new();
    for class in 1..=3u32 {
        let slope = rng.gen_range(0.01..=0.1);
        let arm = make_birth_death_arm(3.0 * class as f64, 5.0, 6, slope)?;
        for _ in 0..copies_per_class {
            arms.push(arm.clone());
            eta.push(SYNTHETIC_ETA[class as usize - 1]);
        }
    }
    let n = arms.len();
    Ok(RmabInstance::new(arms, budget, eta, vec![0; n])?)
}

/// Twenty CPAP patients (ten per cluster), budget 5. Each patient draws a
/// boost in `[0.05, 0.5]` and a fairness floor equal to a uniform
/// `[0.1, 0.7]` fraction of the fair share `B / N`.
pub fn cpap_instance(noise_scale: f64, seed: u64) -> Result<RmabInstance, EnvError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (n, budget) = (20, 5);
    let share = budget as f64 / n as f64;
    let mut arms = Vec::with_capacity(n);
    let mut eta = Vec::with_capacity(n);
    for i in 0..n {
        let cluster = if i < n / 2 { 1 } else { 2 };
        let boost = rng.gen_range(0.05..=0.5);
        arms.push(make_cpap_arm(cluster, boost, noise_scale, &mut rng)?);
        eta.push(rng.gen_range(0.1..=0.7) * share);
    }
    Ok(RmabInstance::new(arms, budget, eta, vec![0; n])?)
}

/// Ten annotation workers, three tasks per epoch, floor 0.05 each.
pub fn rte_instance() -> Result<RmabInstance, EnvError> {
    let arms = RTE_SUCCESS_PROBS
        .iter()
        .map(|&q| make_rte_arm(q))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(RmabInstance::new(arms, 3, vec![0.05; 10], vec![0; 10])?)
}

/// Four elevation angles, budget 2, floor 0.03 each.
pub fn lmss_instance() -> Result<RmabInstance, EnvError> {
    let arms = LMSS_TABLE
        .iter()
        .map(|(e, _)| make_lmss_arm(*e))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(RmabInstance::new(arms, 2, vec![0.03; 4], vec![0; 4])?)
}

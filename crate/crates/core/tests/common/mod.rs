#![allow(dead_code)]

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rmabf_core::model::{stationary_distribution, ArmModel, RewardDist, RmabInstance, ACTIVE};

/// Two states that swap every epoch whatever the action; reward 1 for
/// activating in state 1.
pub fn swap_arm() -> ArmModel {
    let k = vec![vec![0.0, 1.0], vec![1.0, 0.0]];
    ArmModel::new(vec![k.clone(), k], vec![[0.0, 0.0], [0.0, 1.0]], RewardDist::Deterministic).unwrap()
}

pub fn swap_instance() -> RmabInstance {
    RmabInstance::new(vec![swap_arm()], 1, vec![0.0], vec![0]).unwrap()
}

fn random_row<R: Rng>(rng: &mut R, s: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..s).map(|_| rng.gen_range(0.05..1.0)).collect();
    let total: f64 = w.iter().sum();
    w.into_iter().map(|x| x / total).collect()
}

/// Arm with strictly positive kernels (hence unichain) and random active
/// rewards.
pub fn random_arm<R: Rng>(rng: &mut R, s: usize) -> ArmModel {
    let kernels = (0..2).map(|_| (0..s).map(|_| random_row(rng, s)).collect()).collect();
    let rewards = (0..s).map(|_| [0.0, rng.gen_range(0.0..1.0)]).collect();
    ArmModel::new(kernels, rewards, RewardDist::Bernoulli).unwrap()
}

/// Valid instance: `B` in `1..=N` and floors summing to at most `0.9 B`.
pub fn random_instance<R: Rng>(rng: &mut R, n: usize, s: usize) -> RmabInstance {
    let arms = (0..n).map(|_| random_arm(rng, s)).collect();
    let budget = rng.gen_range(1..=n);
    let eta = (0..n).map(|_| rng.gen_range(0.0..0.9) * budget as f64 / n as f64).collect();
    let init = (0..n).map(|_| rng.gen_range(0..s)).collect();
    let inst = RmabInstance::new(arms, budget, eta, init).unwrap();
    assert!(inst.validate().ok);
    inst
}

pub fn seeded_instance(seed: u64, n: usize, s: usize) -> RmabInstance {
    random_instance(&mut ChaCha8Rng::seed_from_u64(seed), n, s)
}

/// Long-run reward of always taking `action`, from the stationary law of
/// that action's kernel.
pub fn stationary_reward(arm: &ArmModel, action: usize) -> f64 {
    let pi = stationary_distribution(arm.kernel(action)).unwrap();
    pi.iter().enumerate().map(|(s, p)| p * arm.reward_mean(s, action)).sum()
}

pub fn always_active_reward(arm: &ArmModel) -> f64 {
    stationary_reward(arm, ACTIVE)
}
pub mod invariants;

//! Regret bookkeeping, Monte-Carlo aggregation and independent oracles.
//!
//! Reward regret is measured against two per-epoch benchmarks: the offline
//! LP value (an upper bound on any feasible policy) and the simulated long
//! run average of the offline fair index policy. Fairness violation is the
//! signed shortfall `t eta_n - activations_n(t)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::env::step_arm;
use crate::error::{HarnessError, LearnerError};
use crate::index::{select_top_b, IndexTable};
use crate::learner::{offline_index, run_trial, LearnerConfig, TrialLog};
use crate::lp::{offline_program, LpStatus};
use crate::model::{stationary_distribution, ArmModel, RmabInstance, ACTIVE, PASSIVE};

/// `t v* - cumulative reward` for `t = 1..=T`.
pub fn reward_regret(log: &TrialLog, v_star: f64) -> Vec<f64> {
    cumulative_reward(log)
        .into_iter()
        .enumerate()
        .map(|(i, c)| (i + 1) as f64 * v_star - c)
        .collect()
}

pub fn cumulative_reward(log: &TrialLog) -> Vec<f64> {
    log.epochs
        .iter()
        .scan(0.0, |acc, e| {
            *acc += e.total_reward();
            Some(*acc)
        })
        .collect()
}

/// Per arm, `t eta_n - activations_n(t)` for `t = 1..=T` (signed).
pub fn fairness_violation(log: &TrialLog, eta: &[f64]) -> Vec<Vec<f64>> {
    activation_totals(log)
        .into_iter()
        .zip(eta)
        .map(|(acts, &e)| acts.into_iter().enumerate().map(|(i, a)| (i + 1) as f64 * e - a).collect())
        .collect()
}

/// Per arm, activations up to and including epoch `t`.
fn activation_totals(log: &TrialLog) -> Vec<Vec<f64>> {
    (0..log.num_arms())
        .map(|n| {
            log.epochs
                .iter()
                .scan(0.0, |acc, e| {
                    *acc += f64::from(u8::from(e.actions.is_active(n)));
                    Some(*acc)
                })
                .collect()
        })
        .collect()
}

/// Per-arm activation fractions `activations_n(t) / t`.
pub fn activation_fractions(log: &TrialLog) -> Vec<Vec<f64>> {
    activation_totals(log)
        .into_iter()
        .map(|acts| acts.into_iter().enumerate().map(|(i, a)| a / (i + 1) as f64).collect())
        .collect()
}

/// Per-epoch benchmark values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Benchmark {
    /// Offline LP optimum (upper bound for any feasible policy).
    pub lp_bound: f64,
    /// Simulated long-run average reward of the offline index policy.
    pub index_average: f64,
    pub index_stderr: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimulationConfig {
    /// Epochs averaged per trial, after `burn_in`.
    pub epochs: usize,
    pub burn_in: usize,
    pub trials: usize,
    pub seed: u64,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        Self {
            epochs: 20_000,
            burn_in: 1_000,
            trials: 16,
            seed: 0x5eed,
        }
    }
}

/// Result of running a fixed index policy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexRun {
    /// Mean reward per epoch after burn-in.
    pub average: f64,
    /// Mean over post-burn-in epochs of the L1 distance between the
    /// empirical state distribution of each arm class and `target`, summed
    /// over classes and divided by the class count. Empty target, 0.
    pub attractor_distance: f64,
}

/// Runs the index policy for `burn_in + epochs` epochs. `classes[n]`
/// groups arms whose empirical state distribution is compared with
/// `target[class]`.
pub fn simulate_index_policy(
    instance: &RmabInstance,
    table: &IndexTable,
    sim: &SimulationConfig,
    seed: u64,
    classes: Option<(&[usize], &[Vec<f64>])>,
) -> IndexRun {
    let mut env_rng = ChaCha8Rng::seed_from_u64(seed);
    env_rng.set_stream(0);
    let mut policy_rng = ChaCha8Rng::seed_from_u64(seed);
    policy_rng.set_stream(1);
    let n = instance.num_arms();
    let s_count = instance.num_states();
    let mut states = instance.initial_states().to_vec();
    let mut total = 0.0;
    let mut distance = 0.0;
    let class_sizes: Vec<f64> = classes.map_or(Vec::new(), |(c, target)| {
        (0..target.len()).map(|k| c.iter().filter(|&&x| x == k).count() as f64).collect()
    });
    let mut hist = vec![0.0; class_sizes.len() * s_count];
    for t in 0..sim.burn_in + sim.epochs {
        let actions = select_top_b(table, &states, instance.budget(), &mut policy_rng);
        let mut reward = 0.0;
        for (arm, s) in states.iter_mut().enumerate() {
            let out = step_arm(instance.arm(arm), *s, actions.action(arm), &mut env_rng);
            reward += out.reward;
            *s = out.next_state;
        }
        if t >= sim.burn_in {
            total += reward;
            if let Some((c, target)) = classes {
                hist.iter_mut().for_each(|h| *h = 0.0);
                for arm in 0..n {
                    hist[c[arm] * s_count + states[arm]] += 1.0;
                }
                let d: f64 = (0..target.len())
                    .map(|k| {
                        (0..s_count)
                            .map(|s| (hist[k * s_count + s] / class_sizes[k] - target[k][s]).abs())
                            .sum::<f64>()
                    })
                    .sum();
                distance += d / target.len() as f64;
            }
        }
    }
    let epochs = sim.epochs.max(1) as f64;
    IndexRun {
        average: total / epochs,
        attractor_distance: distance / epochs,
    }
}

fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

fn trial_seeds(master: u64, trials: usize) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    (0..trials).map(|_| rng.gen()).collect()
}

/// LP bound and the simulated average of the offline index policy.
pub fn offline_benchmark(instance: &RmabInstance, sim: &SimulationConfig) -> Result<Benchmark, HarnessError> {
    let (table, lp_bound) = offline_index(instance)?;
    let runs: Vec<f64> = trial_seeds(sim.seed, sim.trials.max(1))
        .into_par_iter()
        .map(|seed| simulate_index_policy(instance, &table, sim, seed, None).average)
        .collect();
    let (index_average, index_stderr) = mean_stderr(&runs);
    Ok(Benchmark {
        lp_bound,
        index_average,
        index_stderr,
    })
}

/// Best stationary randomized policy found by the grid oracle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleValue {
    pub value: f64,
    /// Per-state activation probabilities of the best grid point.
    pub policy: Vec<f64>,
    /// Change of the optimum in the last refinement round.
    pub grid_error: f64,
}

const REFINE_ROUNDS: usize = 4;
const REFINE_SPLIT: usize = 10;
const GRID_TOL: f64 = 1e-3;

/// Long-run reward and activation fraction of the policy activating with
/// probability `q[s]` in state `s`; `None` if the chain has no unique
/// stationary distribution.
fn policy_value(arm: &ArmModel, q: &[f64]) -> Option<(f64, f64)> {
    let pi = stationary_distribution(&arm.mixed_kernel(q)).ok()?;
    let (mut value, mut active) = (0.0, 0.0);
    for (s, (&p, &a)) in pi.iter().zip(q).enumerate() {
        value += p * ((1.0 - a) * arm.reward_mean(s, PASSIVE) + a * arm.reward_mean(s, ACTIVE));
        active += p * a;
    }
    Some((value, active))
}

/// Grid search over per-state activation probabilities of one arm with
/// `floor <= activation fraction <= cap`. Each refinement round searches a
/// box of one old step around the incumbent with a tenth of the step.
pub fn brute_force_constrained(arm: &ArmModel, floor: f64, cap: f64, resolution: f64) -> Result<OracleValue, HarnessError> {
    let s_count = arm.num_states();
    if s_count > 3 {
        return Err(HarnessError::OracleShape);
    }
    if !(resolution > 0.0 && resolution <= 0.5) {
        return Err(HarnessError::Input(format!("grid resolution {resolution} outside (0, 0.5]")));
    }
    let feasible_tol = 1e-12;
    let search = |center: Option<&[f64]>, step: f64, half_width: usize| -> Option<(f64, Vec<f64>)> {
        let axis = |s: usize| -> Vec<f64> {
            match center {
                None => {
                    let m = (1.0 / step).round() as usize;
                    (0..=m).map(|i| (i as f64 * step).min(1.0)).collect()
                }
                Some(c) => (0..=2 * half_width)
                    .map(|i| c[s] + (i as f64 - half_width as f64) * step)
                    .filter(|q| (0.0..=1.0).contains(q))
                    .collect(),
            }
        };
        let axes: Vec<Vec<f64>> = (0..s_count).map(axis).collect();
        let mut best: Option<(f64, Vec<f64>)> = None;
        let mut idx = vec![0usize; s_count];
        let mut q = vec![0.0; s_count];
        loop {
            for s in 0..s_count {
                q[s] = axes[s][idx[s]];
            }
            if let Some((value, active)) = policy_value(arm, &q) {
                if active >= floor - feasible_tol && active <= cap + feasible_tol && best.as_ref().is_none_or(|b| value > b.0) {
                    best = Some((value, q.clone()));
                }
            }
            let mut d = 0;
            loop {
                if d == s_count {
                    return best;
                }
                idx[d] += 1;
                if idx[d] < axes[d].len() {
                    break;
                }
                idx[d] = 0;
                d += 1;
            }
        }
    };
    let (mut value, mut policy) = search(None, resolution, 0).ok_or(HarnessError::OracleInfeasible)?;
    let mut step = resolution;
    let mut grid_error = f64::INFINITY;
    for _ in 0..REFINE_ROUNDS {
        let fine = step / REFINE_SPLIT as f64;
        let (v, p) = search(Some(&policy), fine, REFINE_SPLIT).expect("incumbent stays feasible");
        grid_error = (v - value).abs();
        value = v;
        policy = p;
        step = fine;
    }
    if grid_error > GRID_TOL {
        return Err(HarnessError::GridTooCoarse(grid_error));
    }
    Ok(OracleValue {
        value,
        policy,
        grid_error,
    })
}

/// Brute-force optimum of a single-arm instance (budget and floor apply to
/// the activation fraction).
pub fn brute_force_value(instance: &RmabInstance, resolution: f64) -> Result<OracleValue, HarnessError> {
    if instance.num_arms() != 1 || instance.num_states() > 3 {
        return Err(HarnessError::OracleShape);
    }
    brute_force_constrained(instance.arm(0), instance.eta()[0], instance.budget().min(1) as f64, resolution)
}

/// Per-trial metric columns, one value per epoch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegretSeries {
    pub cum_reward: Vec<f64>,
    pub regret_lp: Vec<f64>,
    pub regret_index: Vec<f64>,
    /// `[arm][t]`
    pub act_frac: Vec<Vec<f64>>,
    /// `[arm][t]`
    pub fair_viol: Vec<Vec<f64>>,
}

impl RegretSeries {
    pub fn from_log(log: &TrialLog, eta: &[f64], bench: &Benchmark) -> Self {
        let cum_reward = cumulative_reward(log);
        let at = |v: f64| cum_reward.iter().enumerate().map(|(i, c)| (i + 1) as f64 * v - c).collect();
        Self {
            regret_lp: at(bench.lp_bound),
            regret_index: at(bench.index_average),
            act_frac: activation_fractions(log),
            fair_viol: fairness_violation(log, eta),
            cum_reward,
        }
    }

    pub fn len(&self) -> usize {
        self.cum_reward.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cum_reward.is_empty()
    }
}

/// Running sums of one column over trials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnStats {
    sum: Vec<f64>,
    sumsq: Vec<f64>,
}

impl ColumnStats {
    fn new(len: usize) -> Self {
        Self {
            sum: vec![0.0; len],
            sumsq: vec![0.0; len],
        }
    }

    fn add(&mut self, xs: &[f64]) {
        for ((s, q), &x) in self.sum.iter_mut().zip(&mut self.sumsq).zip(xs) {
            *s += x;
            *q += x * x;
        }
    }

    fn merge(&mut self, other: &Self) {
        self.add_sums(&other.sum, &other.sumsq);
    }

    fn add_sums(&mut self, sum: &[f64], sumsq: &[f64]) {
        self.sum.iter_mut().zip(sum).for_each(|(a, b)| *a += b);
        self.sumsq.iter_mut().zip(sumsq).for_each(|(a, b)| *a += b);
    }

    pub fn mean(&self, trials: usize) -> Vec<f64> {
        self.sum.iter().map(|s| s / trials as f64).collect()
    }

    /// Standard error of the mean (sample variance, `n - 1`).
    pub fn stderr(&self, trials: usize) -> Vec<f64> {
        let n = trials as f64;
        self.sum
            .iter()
            .zip(&self.sumsq)
            .map(|(&s, &q)| {
                if trials < 2 {
                    return 0.0;
                }
                let var = ((q - s * s / n) / (n - 1.0)).max(0.0);
                (var / n).sqrt()
            })
            .collect()
    }
}

/// Mean and standard error over trials of every [`RegretSeries`] column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateMetrics {
    pub trials: usize,
    pub epochs: usize,
    pub cum_reward: ColumnStats,
    pub regret_lp: ColumnStats,
    pub regret_index: ColumnStats,
    pub act_frac: Vec<ColumnStats>,
    pub fair_viol: Vec<ColumnStats>,
}

impl AggregateMetrics {
    pub fn empty(num_arms: usize, epochs: usize) -> Self {
        Self {
            trials: 0,
            epochs,
            cum_reward: ColumnStats::new(epochs),
            regret_lp: ColumnStats::new(epochs),
            regret_index: ColumnStats::new(epochs),
            act_frac: vec![ColumnStats::new(epochs); num_arms],
            fair_viol: vec![ColumnStats::new(epochs); num_arms],
        }
    }

    pub fn num_arms(&self) -> usize {
        self.act_frac.len()
    }

    pub fn add(&mut self, s: &RegretSeries) {
        self.trials += 1;
        self.cum_reward.add(&s.cum_reward);
        self.regret_lp.add(&s.regret_lp);
        self.regret_index.add(&s.regret_index);
        self.act_frac.iter_mut().zip(&s.act_frac).for_each(|(c, x)| c.add(x));
        self.fair_viol.iter_mut().zip(&s.fair_viol).for_each(|(c, x)| c.add(x));
    }

    /// Appends the trials of `other` (same shape).
    pub fn merge(&mut self, other: &Self) -> Result<(), HarnessError> {
        if other.epochs != self.epochs || other.num_arms() != self.num_arms() {
            return Err(HarnessError::Input("aggregates have different shapes".into()));
        }
        self.trials += other.trials;
        self.cum_reward.merge(&other.cum_reward);
        self.regret_lp.merge(&other.regret_lp);
        self.regret_index.merge(&other.regret_index);
        self.act_frac.iter_mut().zip(&other.act_frac).for_each(|(c, o)| c.merge(o));
        self.fair_viol.iter_mut().zip(&other.fair_viol).for_each(|(c, o)| c.merge(o));
        Ok(())
    }

    pub fn mean(&self, col: &ColumnStats) -> Vec<f64> {
        col.mean(self.trials)
    }

    pub fn stderr(&self, col: &ColumnStats) -> Vec<f64> {
        col.stderr(self.trials)
    }
}

/// Trials whose logs are turned into series in parallel per batch; batches
/// are folded in trial order so results do not depend on the thread count.
const TRIAL_BATCH: usize = 16;

/// Runs `trials` seeded trials of `config.algorithm`, aggregates their
/// regret series and returns `inspect(log)` for each trial in order.
pub fn run_monte_carlo_inspect<T, F>(
    instance: &RmabInstance,
    config: &LearnerConfig,
    trials: usize,
    bench: &Benchmark,
    inspect: F,
) -> Result<(AggregateMetrics, Vec<T>), HarnessError>
where
    T: Send,
    F: Fn(&TrialLog) -> T + Sync,
{
    if trials == 0 {
        return Err(HarnessError::Input("at least one trial is required".into()));
    }
    config.validate()?;
    let oracle = match config.algorithm {
        crate::learner::Algorithm::OracleIndex => Some(offline_index(instance)?.0),
        _ => None,
    };
    let seeds = trial_seeds(config.seed, trials);
    let mut agg = AggregateMetrics::empty(instance.num_arms(), config.total_epochs());
    let mut extras = Vec::with_capacity(trials);
    for chunk in seeds.chunks(TRIAL_BATCH) {
        let done: Vec<Result<(RegretSeries, T), LearnerError>> = chunk
            .par_iter()
            .map(|&seed| {
                let cfg = LearnerConfig { seed, ..config.clone() };
                let log = run_trial(instance, &cfg, oracle.as_ref())?;
                Ok((RegretSeries::from_log(&log, instance.eta(), bench), inspect(&log)))
            })
            .collect();
        for r in done {
            let (series, extra) = r?;
            agg.add(&series);
            extras.push(extra);
        }
    }
    Ok((agg, extras))
}

pub fn run_monte_carlo(
    instance: &RmabInstance,
    config: &LearnerConfig,
    trials: usize,
    bench: &Benchmark,
) -> Result<AggregateMetrics, HarnessError> {
    Ok(run_monte_carlo_inspect(instance, config, trials, bench, |_| ())?.0)
}

/// One replica count of the optimality-gap sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapPoint {
    pub replicas: usize,
    pub arms: usize,
    pub budget: usize,
    pub lp_bound: f64,
    pub index_average: f64,
    pub index_stderr: f64,
    /// `(LP bound - index average) / arms`.
    pub gap_per_arm: f64,
    pub gap_stderr: f64,
    /// Mean L1 distance between empirical per-class state distributions
    /// and the LP's stationary state distribution.
    pub attractor_distance: f64,
}

/// For each replica count `rho`: copies every base arm `rho` times with
/// budget `rho B`, solves the offline LP and simulates its index policy.
pub fn optimality_gap_sweep(
    base: &RmabInstance,
    replicas: &[usize],
    sim: &SimulationConfig,
) -> Result<Vec<GapPoint>, HarnessError> {
    let base_lp = offline_program(base).solve()?;
    if base_lp.status != LpStatus::Optimal {
        return Err(LearnerError::Lp(crate::error::LpError::NotOptimal(base_lp.status)).into());
    }
    let s_count = base.num_states();
    let width = s_count * crate::model::NUM_ACTIONS;
    let target: Vec<Vec<f64>> = base_lp
        .x
        .chunks(width)
        .map(|z| (0..s_count).map(|s| z[2 * s] + z[2 * s + 1]).collect())
        .collect();
    let mut points = Vec::with_capacity(replicas.len());
    for &rho in replicas {
        if rho == 0 {
            return Err(HarnessError::Input("replica counts must be positive".into()));
        }
        let inst = base.replicate(rho)?;
        let (table, lp_bound) = offline_index(&inst)?;
        let classes: Vec<usize> = (0..inst.num_arms()).map(|n| n / rho).collect();
        let runs: Vec<IndexRun> = trial_seeds(sim.seed ^ rho as u64, sim.trials.max(1))
            .into_par_iter()
            .map(|seed| simulate_index_policy(&inst, &table, sim, seed, Some((&classes, &target))))
            .collect();
        let (index_average, index_stderr) = mean_stderr(&runs.iter().map(|r| r.average).collect::<Vec<_>>());
        let arms = inst.num_arms();
        points.push(GapPoint {
            replicas: rho,
            arms,
            budget: inst.budget(),
            lp_bound,
            index_average,
            index_stderr,
            gap_per_arm: (lp_bound - index_average) / arms as f64,
            gap_stderr: index_stderr / arms as f64,
            attractor_distance: runs.iter().map(|r| r.attractor_distance).sum::<f64>() / runs.len() as f64,
        });
    }
    Ok(points)
}

//! Invariant checks shared by the property suite and the acceptance runner.

use proptest::prelude::*;
use proptest::test_runner::TestCaseError;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rmabf_core::index::fair_indices;
use rmabf_core::learner::{
    activation_quota, confidence_radius, empirical_estimates, run_trial, Algorithm, Counts, LearnerConfig, Transition,
};
use rmabf_core::lp::{
    elp_program, occupancy_from_solution, offline_program, ConfidenceModel, LpStatus, OccupancyForm, OccupancyLayout,
    OccupancyMeasure,
};
use rmabf_core::model::{RmabInstance, NUM_ACTIONS};

use super::random_instance;

pub const CASES: u32 = 1000;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn layout(inst: &RmabInstance, form: OccupancyForm) -> OccupancyLayout {
    OccupancyLayout {
        form,
        num_arms: inst.num_arms(),
        num_states: inst.num_states(),
    }
}

/// Empirical model around an instance: rows with some zero entries (so
/// that clamping happens), random rewards and radii.
pub fn random_confidence(inst: &RmabInstance, r: &mut ChaCha8Rng) -> ConfidenceModel {
    let s = inst.num_states();
    let row = |r: &mut ChaCha8Rng| {
        let mut w: Vec<f64> = (0..s).map(|_| if r.gen_bool(0.3) { 0.0 } else { r.gen_range(0.0..1.0) }).collect();
        if w.iter().all(|&x| x == 0.0) {
            w[r.gen_range(0..s)] = 1.0;
        }
        let total: f64 = w.iter().sum();
        w.into_iter().map(|x| x / total).collect::<Vec<f64>>()
    };
    let n = inst.num_arms();
    let p_hat = (0..n).map(|_| (0..s).map(|_| [row(r), row(r)]).collect()).collect();
    let r_hat = (0..n).map(|_| (0..s).map(|_| [0.0, r.gen_range(0.0..1.0)]).collect()).collect();
    let delta = (0..n)
        .map(|_| (0..s).map(|_| [r.gen_range(0.0..0.6), r.gen_range(0.0..0.6)]).collect())
        .collect();
    ConfidenceModel::new(p_hat, r_hat, delta).unwrap()
}

/// `(seed, arms, states, episodes, horizon, algorithm index)`
pub fn budget_case() -> impl Strategy<Value = (u64, usize, usize, usize, usize, usize)> {
    (any::<u64>(), 1usize..5, 2usize..4, 1usize..4, 1usize..7, 0usize..4)
}

/// Every epoch of every algorithm activates exactly `min(B, N)` arms;
/// learner counts add up to the horizon.
pub fn check_budget_exact((seed, n, s, k, h, alg): (u64, usize, usize, usize, usize, usize)) -> Result<(), TestCaseError> {
    let inst = random_instance(&mut rng(seed), n, s);
    let cfg = LearnerConfig::new(k, h, seed, Algorithm::ALL[alg]);
    let capacity = h * inst.budget().min(n);
    let needed: usize = inst.eta().iter().map(|&e| activation_quota(e, h)).sum();
    match run_trial(&inst, &cfg, None) {
        Ok(log) => {
            prop_assert_eq!(log.len(), k * h);
            prop_assert!(log.budget_exact());
            if let Some(c) = &log.counts {
                prop_assert!(c.is_consistent());
                for arm in 0..n {
                    prop_assert_eq!(c.arm_total(arm), (k * h) as u64);
                }
            }
        }
        Err(e) => {
            // only the greedy learner may refuse, and only for an oversized quota
            prop_assert_eq!(cfg.algorithm, Algorithm::GFairUcrl);
            prop_assert!(needed > capacity, "{}", e);
        }
    }
    Ok(())
}

/// `(seed, arms, states, batch length)`
pub fn counts_case() -> impl Strategy<Value = (u64, usize, usize, usize)> {
    (any::<u64>(), 1usize..4, 1usize..5, 0usize..200)
}

pub fn check_counts((seed, n, s, len): (u64, usize, usize, usize)) -> Result<(), TestCaseError> {
    let mut r = rng(seed);
    let batch: Vec<Transition> = (0..len)
        .map(|_| Transition {
            arm: r.gen_range(0..n),
            state: r.gen_range(0..s),
            action: r.gen_range(0..NUM_ACTIONS),
            reward: r.gen_range(0.0..=1.0),
            next: r.gen_range(0..s),
        })
        .collect();
    let mut c = Counts::new(n, s);
    c.update(&batch);
    prop_assert!(c.is_consistent());
    for arm in 0..n {
        prop_assert_eq!(c.arm_total(arm) as usize, batch.iter().filter(|t| t.arm == arm).count());
        for st in 0..s {
            for a in 0..NUM_ACTIONS {
                let t: u64 = (0..s).map(|x| c.trans(arm, st, a, x)).sum();
                prop_assert_eq!(t, c.visit(arm, st, a));
                prop_assert!(c.reward_sum(arm, st, a) <= c.visit(arm, st, a) as f64 + 1e-9);
            }
        }
    }
    let (p, _) = empirical_estimates(&c);
    for row in p.iter().flatten().flatten() {
        prop_assert!((row.iter().sum::<f64>() - 1.0).abs() <= 1e-9);
    }
    Ok(())
}

/// `(seed, arms, states, extended program, fairness rows)`
pub fn occupancy_case() -> impl Strategy<Value = (u64, usize, usize, bool, bool)> {
    (any::<u64>(), 1usize..4, 2usize..4, any::<bool>(), any::<bool>())
}

/// Solutions of both programs are probability measures with balanced
/// flow; extended solutions imply kernels inside the ball.
pub fn check_occupancy((seed, n, s, extended, fair): (u64, usize, usize, bool, bool)) -> Result<(), TestCaseError> {
    let mut r = rng(seed);
    let inst = random_instance(&mut r, n, s);
    if !extended {
        let sol = offline_program(&inst).solve().unwrap();
        prop_assert_eq!(sol.status, LpStatus::Optimal);
        let occ = occupancy_from_solution(&sol, layout(&inst, OccupancyForm::StateAction)).unwrap();
        for arm in 0..n {
            prop_assert!((occ.arm_mass(arm) - 1.0).abs() <= 1e-7);
            prop_assert!(occ.flow_residual(arm, Some(inst.arm(arm))).unwrap() <= 1e-7);
            prop_assert!(occ.active_mass(arm) >= inst.eta()[arm] - 1e-7);
            prop_assert!(occ.block(arm).iter().all(|&v| v >= 0.0));
        }
        let total: f64 = (0..n).map(|arm| occ.active_mass(arm)).sum();
        prop_assert!(total <= inst.budget() as f64 + 1e-7);
        return Ok(());
    }
    let conf = random_confidence(&inst, &mut r);
    let sol = elp_program(&conf, inst.budget(), inst.eta(), fair).solve().unwrap();
    prop_assert_eq!(sol.status, LpStatus::Optimal);
    let occ = occupancy_from_solution(&sol, layout(&inst, OccupancyForm::Transition)).unwrap();
    for arm in 0..n {
        prop_assert!((occ.arm_mass(arm) - 1.0).abs() <= 1e-7);
        prop_assert!(occ.flow_residual(arm, None).unwrap() <= 1e-7);
        for st in 0..s {
            for a in 0..NUM_ACTIONS {
                let mass = occ.state_action(arm, st, a);
                if mass <= 1e-9 {
                    continue;
                }
                for t in 0..s {
                    let z = occ.transition(arm, st, a, t).unwrap();
                    let (lo, hi) = conf.kernel_bounds(arm, st, a, t);
                    let tol = 1e-7 / mass;
                    prop_assert!(
                        z / mass >= lo - tol && z / mass <= hi + tol,
                        "implied kernel {} outside [{lo}, {hi}]",
                        z / mass
                    );
                }
            }
        }
    }
    Ok(())
}

/// `(seed, arms, states, factor)`
pub fn scale_case() -> impl Strategy<Value = (u64, usize, usize, f64)> {
    (any::<u64>(), 1usize..4, 1usize..5, 1e-3f64..1e3)
}

/// Rescaling one arm's occupancy leaves its indices unchanged.
pub fn check_scale_invariance((seed, n, s, factor): (u64, usize, usize, f64)) -> Result<(), TestCaseError> {
    let mut r = rng(seed);
    let l = OccupancyLayout {
        form: OccupancyForm::StateAction,
        num_arms: n,
        num_states: s,
    };
    let values: Vec<Vec<f64>> = (0..n)
        .map(|_| {
            (0..s * NUM_ACTIONS)
                .map(|_| if r.gen_bool(0.2) { 0.0 } else { r.gen_range(0.0..1.0) })
                .collect()
        })
        .collect();
    let occ = OccupancyMeasure::new(l, values).unwrap();
    let arm = r.gen_range(0..n);
    let mut scaled = occ.clone();
    scaled.scale_arm(arm, factor);
    let (w, v) = (fair_indices(&occ), fair_indices(&scaled));
    for st in 0..s {
        let (x, y) = (w.get(arm, st), v.get(arm, st));
        // a state may cross the unvisited threshold when shrunk
        if occ.state_mass(arm, st) * factor.min(1.0) > 1e-9 {
            prop_assert!((x - y).abs() <= 1e-12, "state {st}: {x} vs {y}");
        }
    }
    for other in (0..n).filter(|&o| o != arm) {
        prop_assert_eq!(w.arm(other), v.arm(other));
    }
    Ok(())
}

/// `(count, extra count, episode, extra episodes, horizon, epsilon, states, arms)`
#[allow(clippy::type_complexity)]
pub fn radius_case() -> impl Strategy<Value = (u64, u64, usize, usize, usize, f64, usize, usize)> {
    (0u64..100_000, 0u64..100_000, 1usize..1000, 0usize..1000, 1usize..500, 0.001f64..0.999, 1usize..10, 1usize..50)
}

/// The radius never grows with the count and never shrinks with the
/// episode index.
pub fn check_radius_monotone(
    (c, dc, k, dk, h, eps, s, n): (u64, u64, usize, usize, usize, f64, usize, usize),
) -> Result<(), TestCaseError> {
    let d = |c, k| confidence_radius(c, k, h, eps, s, NUM_ACTIONS, n);
    prop_assert!(d(c + dc, k) <= d(c, k));
    prop_assert!(d(c, k + dk) >= d(c, k));
    prop_assert!(d(c, k) >= 0.0);
    Ok(())
}

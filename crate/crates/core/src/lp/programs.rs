//! Builders for the offline relaxation and the extended (optimistic) LP.

use serde::{Deserialize, Serialize};

use super::{ArmBlock, CoupledLp, Row, StandardFormLp, VarKey};
use crate::error::ModelError;
use crate::model::{RmabInstance, ACTIVE, NUM_ACTIONS};

/// Empirical model plus a radius for every (arm, state, action).
///
/// The plausible models are those whose kernel entries lie within `delta`
/// of `p_hat` and whose mean reward lies within `delta` of `r_hat`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfidenceModel {
    num_states: usize,
    /// `[n][s][a][s']`
    p_hat: Vec<Vec<[Vec<f64>; NUM_ACTIONS]>>,
    /// `[n][s][a]`
    r_hat: Vec<Vec<[f64; NUM_ACTIONS]>>,
    /// `[n][s][a]`
    delta: Vec<Vec<[f64; NUM_ACTIONS]>>,
}

impl ConfidenceModel {
    pub fn new(
        p_hat: Vec<Vec<[Vec<f64>; NUM_ACTIONS]>>,
        r_hat: Vec<Vec<[f64; NUM_ACTIONS]>>,
        delta: Vec<Vec<[f64; NUM_ACTIONS]>>,
    ) -> Result<Self, ModelError> {
        let n = p_hat.len();
        if n == 0 || r_hat.len() != n || delta.len() != n {
            return Err(ModelError::Shape("confidence model needs matching, nonempty arm lists".into()));
        }
        let s = p_hat[0].len();
        for arm in 0..n {
            if p_hat[arm].len() != s || r_hat[arm].len() != s || delta[arm].len() != s {
                return Err(ModelError::Shape(format!("arm {arm} has the wrong number of states")));
            }
            for st in 0..s {
                for a in 0..NUM_ACTIONS {
                    let row = &p_hat[arm][st][a];
                    if row.len() != s {
                        return Err(ModelError::Shape(format!("p_hat row ({arm},{st},{a}) has length {}", row.len())));
                    }
                    let sum: f64 = row.iter().sum();
                    if (sum - 1.0).abs() > 1e-9 || row.iter().any(|p| *p < 0.0) {
                        return Err(ModelError::Invalid(vec![format!("non-stochastic row p_hat({arm},{st},{a})")]));
                    }
                    let d = delta[arm][st][a];
                    if d.is_nan() || d < 0.0 {
                        return Err(ModelError::Invalid(vec![format!("negative radius at ({arm},{st},{a})")]));
                    }
                }
            }
        }
        Ok(Self {
            num_states: s,
            p_hat,
            r_hat,
            delta,
        })
    }

    /// The true model with zero radius.
    pub fn exact(instance: &RmabInstance) -> Self {
        let s = instance.num_states();
        let p_hat = instance
            .arms()
            .iter()
            .map(|arm| (0..s).map(|st| [arm.row(0, st).to_vec(), arm.row(1, st).to_vec()]).collect())
            .collect();
        let r_hat = instance
            .arms()
            .iter()
            .map(|arm| (0..s).map(|st| [arm.reward_mean(st, 0), arm.reward_mean(st, 1)]).collect())
            .collect();
        let delta = vec![vec![[0.0; NUM_ACTIONS]; s]; instance.num_arms()];
        Self {
            num_states: s,
            p_hat,
            r_hat,
            delta,
        }
    }

    pub fn num_arms(&self) -> usize {
        self.p_hat.len()
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn p_hat(&self, arm: usize, state: usize, action: usize) -> &[f64] {
        &self.p_hat[arm][state][action]
    }

    pub fn r_hat(&self, arm: usize, state: usize, action: usize) -> f64 {
        self.r_hat[arm][state][action]
    }

    pub fn delta(&self, arm: usize, state: usize, action: usize) -> f64 {
        self.delta[arm][state][action]
    }

    /// Optimistic reward `r_hat + delta` (not clipped).
    pub fn r_tilde(&self, arm: usize, state: usize, action: usize) -> f64 {
        self.r_hat[arm][state][action] + self.delta[arm][state][action]
    }

    /// Entrywise kernel interval `[max(0, p - delta), min(1, p + delta)]`.
    pub fn kernel_bounds(&self, arm: usize, state: usize, action: usize, next: usize) -> (f64, f64) {
        let p = self.p_hat[arm][state][action][next];
        let d = self.delta[arm][state][action];
        ((p - d).max(0.0), (p + d).min(1.0))
    }
}

/// Local column of `zeta(s, a)` within an arm block.
pub(crate) fn sa_index(state: usize, action: usize) -> usize {
    state * NUM_ACTIONS + action
}

/// Local column of `z(s, a, s')` within an arm block.
pub(crate) fn sas_index(num_states: usize, state: usize, action: usize, next: usize) -> usize {
    sa_index(state, action) * num_states + next
}

fn fairness_row(active_cols: impl Iterator<Item = usize>, eta: f64) -> Row {
    Row::new(active_cols.map(|j| (j, -1.0)).collect(), -eta)
}

/// Offline relaxation over `zeta_n(s, a)` with the true kernels.
pub fn offline_program(instance: &RmabInstance) -> CoupledLp {
    let s_count = instance.num_states();
    let blocks = instance
        .arms()
        .iter()
        .enumerate()
        .map(|(n, arm)| {
            let m = s_count * NUM_ACTIONS;
            let mut objective = vec![0.0; m];
            let mut linking = vec![0.0; m];
            let mut vars = Vec::with_capacity(m);
            for s in 0..s_count {
                for a in 0..NUM_ACTIONS {
                    objective[sa_index(s, a)] = arm.reward_mean(s, a);
                    vars.push(VarKey::StateAction { arm: n, state: s, action: a });
                }
                linking[sa_index(s, ACTIVE)] = 1.0;
            }
            let ineq = vec![fairness_row((0..s_count).map(|s| sa_index(s, ACTIVE)), instance.eta()[n])];
            let mut eq: Vec<Row> = (0..s_count)
                .map(|target| {
                    let coeffs = (0..s_count)
                        .flat_map(|s| (0..NUM_ACTIONS).map(move |a| (s, a)))
                        .filter_map(|(s, a)| {
                            let c = f64::from(u8::from(s == target)) - arm.prob(a, s, target);
                            (c != 0.0).then_some((sa_index(s, a), c))
                        })
                        .collect();
                    Row::new(coeffs, 0.0)
                })
                .collect();
            eq.push(Row::new((0..m).map(|j| (j, 1.0)).collect(), 1.0));
            ArmBlock {
                objective,
                linking,
                ineq,
                eq,
                vars,
            }
        })
        .collect();
    CoupledLp {
        blocks,
        budget: instance.budget() as f64,
    }
}

pub fn build_offline_lp(instance: &RmabInstance) -> StandardFormLp {
    offline_program(instance).to_standard_form()
}

/// Extended LP over `z_n(s, a, s')`: optimistic rewards, kernels anywhere in
/// the confidence ball (ratio rows multiplied through by `sum_y z(s,a,y)`).
/// Passive rewards are zero by construction of the model, so only active
/// pairs receive the optimism bonus.
/// Without fairness rows this is the variant used after forced
/// exploration.
pub fn elp_program(conf: &ConfidenceModel, budget: usize, eta: &[f64], include_fairness: bool) -> CoupledLp {
    let s_count = conf.num_states();
    let idx = |s, a, t| sas_index(s_count, s, a, t);
    let blocks = (0..conf.num_arms())
        .map(|n| {
            let m = s_count * NUM_ACTIONS * s_count;
            let mut objective = vec![0.0; m];
            let mut linking = vec![0.0; m];
            let mut vars = Vec::with_capacity(m);
            for s in 0..s_count {
                for a in 0..NUM_ACTIONS {
                    let r = if a == ACTIVE { conf.r_tilde(n, s, a) } else { 0.0 };
                    for t in 0..s_count {
                        objective[idx(s, a, t)] = r;
                        vars.push(VarKey::Transition { arm: n, state: s, action: a, next: t });
                    }
                }
                for t in 0..s_count {
                    linking[idx(s, ACTIVE, t)] = 1.0;
                }
            }
            let mut ineq = Vec::with_capacity(1 + 2 * m);
            if include_fairness {
                let active = (0..s_count).flat_map(|s| (0..s_count).map(move |t| idx(s, ACTIVE, t)));
                ineq.push(fairness_row(active, eta[n]));
            }
            for s in 0..s_count {
                for a in 0..NUM_ACTIONS {
                    for t in 0..s_count {
                        let (lo, hi) = conf.kernel_bounds(n, s, a, t);
                        let group = |w: f64, own: f64| {
                            let coeffs = (0..s_count)
                                .map(|y| (idx(s, a, y), if y == t { own + w } else { w }))
                                .filter(|(_, c)| *c != 0.0)
                                .collect();
                            Row::new(coeffs, 0.0)
                        };
                        // a clamped bound is implied by nonnegativity
                        if hi < 1.0 {
                            ineq.push(group(-hi, 1.0));
                        }
                        if lo > 0.0 {
                            ineq.push(group(lo, -1.0));
                        }
                    }
                }
            }
            let mut eq: Vec<Row> = (0..s_count)
                .map(|target| {
                    let mut coeffs = Vec::with_capacity(2 * NUM_ACTIONS * s_count);
                    for a in 0..NUM_ACTIONS {
                        for t in 0..s_count {
                            if t != target {
                                coeffs.push((idx(target, a, t), 1.0));
                            }
                        }
                    }
                    for s in (0..s_count).filter(|&s| s != target) {
                        for a in 0..NUM_ACTIONS {
                            coeffs.push((idx(s, a, target), -1.0));
                        }
                    }
                    Row::new(coeffs, 0.0)
                })
                .collect();
            eq.push(Row::new((0..m).map(|j| (j, 1.0)).collect(), 1.0));
            ArmBlock {
                objective,
                linking,
                ineq,
                eq,
                vars,
            }
        })
        .collect();
    CoupledLp {
        blocks,
        budget: budget as f64,
    }
}

pub fn build_elp(conf: &ConfidenceModel, budget: usize, eta: &[f64], include_fairness: bool) -> StandardFormLp {
    elp_program(conf, budget, eta, include_fairness).to_standard_form()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::synthetic_instance;

    #[test]
    fn offline_dimensions() {
        let inst = synthetic_instance(1, 1, 3).unwrap();
        let lp = build_offline_lp(&inst);
        assert_eq!(lp.num_vars(), 36);
        assert_eq!(lp.ineq.len(), 4);
        assert_eq!(lp.eq.len(), 21);
        lp.check().unwrap();
    }

    #[test]
    fn elp_dimensions_count_ball_rows() {
        let inst = synthetic_instance(1, 1, 3).unwrap();
        let conf = ConfidenceModel::exact(&inst);
        let lp = build_elp(&conf, 1, inst.eta(), true);
        assert_eq!(lp.num_vars(), 3 * 6 * 2 * 6);
        // with zero radius: an upper row unless p = 1, a lower row when p > 0
        let ball: usize = inst
            .arms()
            .iter()
            .flat_map(|arm| (0..2).flat_map(move |a| (0..6).flat_map(move |s| arm.row(a, s).to_vec())))
            .map(|p| usize::from(p < 1.0) + usize::from(p > 0.0))
            .sum();
        // budget + fairness + ball rows
        assert_eq!(lp.ineq.len(), 1 + 3 + ball);
        assert_eq!(lp.eq.len(), 3 * 6 + 3);
        let lp1 = build_elp(&conf, 1, inst.eta(), false);
        assert_eq!(lp1.ineq.len(), 1 + ball);
        lp.check().unwrap();
    }

    #[test]
    fn kernel_bounds_clamp() {
        let inst = synthetic_instance(1, 1, 3).unwrap();
        let mut conf = ConfidenceModel::exact(&inst);
        conf.delta[0][0][1] = 0.5;
        assert_eq!(conf.kernel_bounds(0, 0, 1, 0), (0.125, 1.0));
        assert_eq!(conf.kernel_bounds(0, 0, 1, 3), (0.0, 0.5));
    }
}

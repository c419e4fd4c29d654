//! Per-arm visitation frequencies recovered from LP solutions.

use serde::{Deserialize, Serialize};

use super::programs::{sa_index, sas_index};
use super::{LpSolution, LpStatus, ROW_TOL};
use crate::error::LpError;
use crate::model::{ArmModel, ACTIVE, NUM_ACTIONS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OccupancyForm {
    /// `zeta_n(s, a)`
    StateAction,
    /// `z_n(s, a, s')`
    Transition,
}

/// Shape of the LP variable vector: arm-major, then the block layout.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OccupancyLayout {
    pub form: OccupancyForm,
    pub num_arms: usize,
    pub num_states: usize,
}

impl OccupancyLayout {
    pub fn block_len(&self) -> usize {
        match self.form {
            OccupancyForm::StateAction => self.num_states * NUM_ACTIONS,
            OccupancyForm::Transition => self.num_states * NUM_ACTIONS * self.num_states,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OccupancyMeasure {
    layout: OccupancyLayout,
    /// One block per arm in the layout's local order.
    values: Vec<Vec<f64>>,
}

impl OccupancyMeasure {
    pub fn new(layout: OccupancyLayout, values: Vec<Vec<f64>>) -> Result<Self, LpError> {
        if values.len() != layout.num_arms || values.iter().any(|b| b.len() != layout.block_len()) {
            return Err(LpError::Malformed("occupancy values do not match layout".into()));
        }
        Ok(Self { layout, values })
    }

    pub fn layout(&self) -> OccupancyLayout {
        self.layout
    }

    pub fn form(&self) -> OccupancyForm {
        self.layout.form
    }

    pub fn num_arms(&self) -> usize {
        self.layout.num_arms
    }

    pub fn num_states(&self) -> usize {
        self.layout.num_states
    }

    pub fn block(&self, arm: usize) -> &[f64] {
        &self.values[arm]
    }

    /// `zeta_n(s, a)`, marginalizing over `s'` in the extended form.
    pub fn state_action(&self, arm: usize, state: usize, action: usize) -> f64 {
        let s = self.layout.num_states;
        match self.layout.form {
            OccupancyForm::StateAction => self.values[arm][sa_index(state, action)],
            OccupancyForm::Transition => {
                let start = sas_index(s, state, action, 0);
                self.values[arm][start..start + s].iter().sum()
            }
        }
    }

    /// `z_n(s, a, s')`; `None` for the state-action form.
    pub fn transition(&self, arm: usize, state: usize, action: usize, next: usize) -> Option<f64> {
        match self.layout.form {
            OccupancyForm::StateAction => None,
            OccupancyForm::Transition => Some(self.values[arm][sas_index(self.layout.num_states, state, action, next)]),
        }
    }

    pub fn state_mass(&self, arm: usize, state: usize) -> f64 {
        (0..NUM_ACTIONS).map(|a| self.state_action(arm, state, a)).sum()
    }

    pub fn arm_mass(&self, arm: usize) -> f64 {
        self.values[arm].iter().sum()
    }

    /// Long-run fraction of time arm `arm` is active.
    pub fn active_mass(&self, arm: usize) -> f64 {
        (0..self.layout.num_states).map(|s| self.state_action(arm, s, ACTIVE)).sum()
    }

    /// Largest flow-balance residual of arm `arm`. The state-action form
    /// needs the kernel to say where mass flows.
    pub fn flow_residual(&self, arm: usize, model: Option<&ArmModel>) -> Option<f64> {
        let s_count = self.layout.num_states;
        let inflow: Vec<f64> = match (self.layout.form, model) {
            (OccupancyForm::Transition, _) => (0..s_count)
                .map(|t| {
                    (0..s_count)
                        .flat_map(|s| (0..NUM_ACTIONS).map(move |a| (s, a)))
                        .map(|(s, a)| self.values[arm][sas_index(s_count, s, a, t)])
                        .sum()
                })
                .collect(),
            (OccupancyForm::StateAction, Some(m)) => (0..s_count)
                .map(|t| {
                    (0..s_count)
                        .flat_map(|s| (0..NUM_ACTIONS).map(move |a| (s, a)))
                        .map(|(s, a)| self.state_action(arm, s, a) * m.prob(a, s, t))
                        .sum()
                })
                .collect(),
            (OccupancyForm::StateAction, None) => return None,
        };
        Some(
            (0..s_count)
                .map(|s| (self.state_mass(arm, s) - inflow[s]).abs())
                .fold(0.0, f64::max),
        )
    }

    /// Marginalizes the extended form down to `zeta_n(s, a)`.
    pub fn to_state_action(&self) -> Self {
        let layout = OccupancyLayout {
            form: OccupancyForm::StateAction,
            ..self.layout
        };
        let s_count = self.layout.num_states;
        let values = (0..self.layout.num_arms)
            .map(|n| {
                (0..s_count)
                    .flat_map(|s| (0..NUM_ACTIONS).map(move |a| (s, a)))
                    .map(|(s, a)| self.state_action(n, s, a))
                    .collect()
            })
            .collect();
        Self { layout, values }
    }

    /// Expands `zeta_n(s, a)` to `z_n(s, a, s') = zeta_n(s, a) P_n(s'|s, a)`.
    pub fn expand_with_kernels(&self, arms: &[ArmModel]) -> Result<Self, LpError> {
        if self.layout.form != OccupancyForm::StateAction || arms.len() != self.layout.num_arms {
            return Err(LpError::Malformed("expansion needs a state-action measure and one model per arm".into()));
        }
        let s_count = self.layout.num_states;
        let layout = OccupancyLayout {
            form: OccupancyForm::Transition,
            ..self.layout
        };
        let values = arms
            .iter()
            .enumerate()
            .map(|(n, m)| {
                let mut block = vec![0.0; layout.block_len()];
                for s in 0..s_count {
                    for a in 0..NUM_ACTIONS {
                        let zeta = self.state_action(n, s, a);
                        for t in 0..s_count {
                            block[sas_index(s_count, s, a, t)] = zeta * m.prob(a, s, t);
                        }
                    }
                }
                block
            })
            .collect();
        Ok(Self { layout, values })
    }

    /// Scales arm `arm`'s block by `factor` (not a valid measure afterwards
    /// unless `factor == 1`; used to probe index invariances).
    pub fn scale_arm(&mut self, arm: usize, factor: f64) {
        self.values[arm].iter_mut().for_each(|v| *v *= factor);
    }
}

/// Reshapes an optimal LP solution into per-arm occupancies and re-checks
/// nonnegativity, normalization and (for the extended form) flow balance.
pub fn occupancy_from_solution(sol: &LpSolution, layout: OccupancyLayout) -> Result<OccupancyMeasure, LpError> {
    if sol.status != LpStatus::Optimal {
        return Err(LpError::NotOptimal(sol.status));
    }
    let len = layout.block_len();
    if sol.x.len() != len * layout.num_arms {
        return Err(LpError::Malformed(format!(
            "solution has {} values, layout expects {}",
            sol.x.len(),
            len * layout.num_arms
        )));
    }
    let mut values = Vec::with_capacity(layout.num_arms);
    for chunk in sol.x.chunks(len) {
        let mut block = Vec::with_capacity(len);
        for &v in chunk {
            if v < -1e-9 {
                return Err(LpError::SolverInconsistency(format!("negative occupancy {v:e}")));
            }
            block.push(v.max(0.0));
        }
        values.push(block);
    }
    let occ = OccupancyMeasure { layout, values };
    for n in 0..layout.num_arms {
        let mass = occ.arm_mass(n);
        if (mass - 1.0).abs() > ROW_TOL {
            return Err(LpError::SolverInconsistency(format!("arm {n} mass {mass} is not 1")));
        }
        if let Some(r) = occ.flow_residual(n, None) {
            if r > ROW_TOL {
                return Err(LpError::SolverInconsistency(format!("arm {n} flow residual {r:e}")));
            }
        }
    }
    Ok(occ)
}

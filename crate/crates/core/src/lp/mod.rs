//! Occupancy-measure linear programs.
//!
//! Two programs are built here: the offline relaxation over state-action
//! frequencies `zeta_n(s, a)` with the true kernels, and the extended
//! program over state-action-next-state frequencies `z_n(s, a, s')` whose
//! kernels are only known to lie in a confidence ball. Both couple the
//! arms through a single budget row, so they are assembled as a
//! [`CoupledLp`]: [`CoupledLp::to_standard_form`] gives the monolithic
//! program for [`solve_lp`], and [`CoupledLp::solve`] exploits the block
//! structure.

mod coupled;
mod occupancy;
mod programs;
mod simplex;

use serde::{Deserialize, Serialize};

use crate::error::LpError;
use simplex::{Phase2, Tableau};

pub use coupled::{ArmBlock, CoupledLp};
pub use occupancy::{occupancy_from_solution, OccupancyForm, OccupancyLayout, OccupancyMeasure};
pub use programs::{build_elp, build_offline_lp, elp_program, offline_program, ConfidenceModel};

/// Feasibility tolerance for reported solutions.
pub const ROW_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sense {
    Maximize,
    Minimize,
}

/// What an LP column stands for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum VarKey {
    /// `zeta_n(s, a)`.
    StateAction { arm: usize, state: usize, action: usize },
    /// `z_n(s, a, s')`.
    Transition { arm: usize, state: usize, action: usize, next: usize },
}

/// Sparse row `sum coeffs . x (op) rhs`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub coeffs: Vec<(usize, f64)>,
    pub rhs: f64,
}

impl Row {
    pub fn new(coeffs: Vec<(usize, f64)>, rhs: f64) -> Self {
        Self { coeffs, rhs }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.coeffs.iter().map(|&(j, a)| a * x[j]).sum()
    }
}

/// `opt c.x` subject to `ineq` rows (`a.x <= b`), `eq` rows (`a.x = b`)
/// and `x >= 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StandardFormLp {
    pub sense: Sense,
    pub objective: Vec<f64>,
    pub ineq: Vec<Row>,
    pub eq: Vec<Row>,
    pub vars: Vec<VarKey>,
}

impl StandardFormLp {
    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    /// Row references in range and a one-to-one variable map.
    pub fn check(&self) -> Result<(), LpError> {
        let n = self.num_vars();
        if self.vars.len() != n {
            return Err(LpError::Malformed(format!(
                "{} variable keys for {n} columns",
                self.vars.len()
            )));
        }
        let mut seen = std::collections::HashSet::with_capacity(n);
        if let Some(dup) = self.vars.iter().find(|k| !seen.insert(**k)) {
            return Err(LpError::Malformed(format!("duplicate variable key {dup:?}")));
        }
        for row in self.ineq.iter().chain(&self.eq) {
            if let Some(&(j, _)) = row.coeffs.iter().find(|(j, _)| *j >= n) {
                return Err(LpError::Malformed(format!("row references variable {j} of {n}")));
            }
        }
        Ok(())
    }

    /// Largest constraint violation of `x` (negativity included).
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let ineq = self.ineq.iter().map(|r| (r.eval(x) - r.rhs).max(0.0));
        let eq = self.eq.iter().map(|r| (r.eval(x) - r.rhs).abs());
        let neg = x.iter().map(|&v| (-v).max(0.0));
        ineq.chain(eq).chain(neg).fold(0.0, f64::max)
    }

    pub fn objective_at(&self, x: &[f64]) -> f64 {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpSolution {
    pub status: LpStatus,
    pub x: Vec<f64>,
    pub objective_value: f64,
}

impl LpSolution {
    pub(crate) fn without_point(status: LpStatus, n: usize) -> Self {
        Self {
            status,
            x: vec![0.0; n],
            objective_value: match status {
                LpStatus::Unbounded => f64::INFINITY,
                _ => f64::NAN,
            },
        }
    }
}

/// Solves any standard-form LP with the dense two-phase simplex.
pub fn solve_lp(lp: &StandardFormLp) -> Result<LpSolution, LpError> {
    lp.check()?;
    let n = lp.num_vars();
    let flip = lp.sense == Sense::Minimize;
    let objective: Vec<f64> = if flip {
        lp.objective.iter().map(|c| -c).collect()
    } else {
        lp.objective.clone()
    };
    let Some(mut tableau) = Tableau::new(n, &objective, &lp.ineq, &lp.eq)? else {
        return Ok(LpSolution::without_point(LpStatus::Infeasible, n));
    };
    let status = match tableau.solve()? {
        Phase2::Optimal => LpStatus::Optimal,
        Phase2::Infeasible => LpStatus::Infeasible,
        Phase2::Unbounded => {
            let mut s = LpSolution::without_point(LpStatus::Unbounded, n);
            if flip {
                s.objective_value = f64::NEG_INFINITY;
            }
            return Ok(s);
        }
    };
    if status != LpStatus::Optimal {
        return Ok(LpSolution::without_point(status, n));
    }
    let x: Vec<f64> = tableau
        .primal()
        .into_iter()
        .map(|v| if v < 0.0 && v > -1e-9 { 0.0 } else { v })
        .collect();
    let objective_value = lp.objective_at(&x);
    Ok(LpSolution {
        status,
        x,
        objective_value,
    })
}

//! Programs whose arms interact only through one budget row.
//!
//! `max sum_n c_n . x_n` s.t. `sum_n d_n . x_n <= B` and per-arm polytopes.
//! Pricing the budget row at `lambda` splits the program into independent
//! arm problems `max (c_n - lambda d_n) . x_n`. Each arm's optimal vertex is
//! traced as `lambda` grows (one parametric simplex run per arm), and the
//! master picks the smallest `lambda` whose total activation fits in the
//! budget, mixing the two optimal vertices of every arm that switches at
//! that price so the budget row is met with equality.

use serde::{Deserialize, Serialize};

use super::simplex::{ParametricPath, Phase2, PathVertex, Tableau};
use super::{solve_lp, LpSolution, LpStatus, Row, Sense, StandardFormLp, VarKey, ROW_TOL};
use crate::error::LpError;

const MASTER_TOL: f64 = 1e-9;

/// One arm's share of a [`CoupledLp`]; row indices are local to the block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArmBlock {
    pub objective: Vec<f64>,
    /// Coefficients of this block in the shared budget row.
    pub linking: Vec<f64>,
    pub ineq: Vec<Row>,
    pub eq: Vec<Row>,
    pub vars: Vec<VarKey>,
}

impl ArmBlock {
    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoupledLp {
    pub blocks: Vec<ArmBlock>,
    pub budget: f64,
}

struct ArmPath {
    vertices: Vec<PathVertex>,
    /// The vertices are trusted for prices below this.
    limit: f64,
    checked: bool,
}

enum Pricing {
    Points(Vec<Vec<f64>>),
    Infeasible,
    /// The price lies past the limit of some path.
    BeyondLimit,
}

impl ArmPath {
    fn new(run: ParametricPath) -> Self {
        Self {
            vertices: run.vertices,
            limit: run.limit,
            checked: false,
        }
    }

    /// Cuts the path at its first vertex that drifted off the arm polytope.
    fn check(&mut self, block: &ArmBlock) {
        self.checked = true;
        if let Some(bad) = self.vertices.iter().position(|v| block_violation(block, &v.x) > ROW_TOL) {
            log::debug!("budget-pricing path drifted at lambda {}", self.vertices[bad].lambda);
            self.limit = self.limit.min(self.vertices[bad].lambda);
            self.vertices.truncate(bad);
        }
    }

    /// Last vertex reached with breakpoint `<= lambda`.
    fn right(&self, lambda: f64) -> &PathVertex {
        self.vertices
            .iter()
            .rev()
            .find(|v| v.lambda <= lambda)
            .unwrap_or(&self.vertices[0])
    }

    /// Last vertex reached with breakpoint `< lambda`.
    fn left(&self, lambda: f64) -> &PathVertex {
        self.vertices
            .iter()
            .rev()
            .find(|v| v.lambda < lambda)
            .unwrap_or(&self.vertices[0])
    }
}

fn block_violation(b: &ArmBlock, x: &[f64]) -> f64 {
    let ineq = b.ineq.iter().map(|r| (r.eval(x) - r.rhs).max(0.0));
    let eq = b.eq.iter().map(|r| (r.eval(x) - r.rhs).abs());
    let neg = x.iter().map(|&v| (-v).max(0.0));
    ineq.chain(eq).chain(neg).fold(0.0, f64::max)
}

impl CoupledLp {
    pub fn num_vars(&self) -> usize {
        self.blocks.iter().map(ArmBlock::num_vars).sum()
    }

    fn offsets(&self) -> Vec<usize> {
        self.blocks
            .iter()
            .scan(0, |acc, b| {
                let o = *acc;
                *acc += b.num_vars();
                Some(o)
            })
            .collect()
    }

    /// Monolithic form: the budget row first, then each block's rows in
    /// block order.
    pub fn to_standard_form(&self) -> StandardFormLp {
        let offsets = self.offsets();
        let shift = |row: &Row, o: usize| Row::new(row.coeffs.iter().map(|&(j, a)| (j + o, a)).collect(), row.rhs);
        let mut budget = Vec::new();
        let mut ineq = Vec::new();
        let mut eq = Vec::new();
        let mut objective = Vec::with_capacity(self.num_vars());
        let mut vars = Vec::with_capacity(self.num_vars());
        for (b, &o) in self.blocks.iter().zip(&offsets) {
            objective.extend_from_slice(&b.objective);
            vars.extend_from_slice(&b.vars);
            budget.extend(b.linking.iter().enumerate().filter(|(_, a)| **a != 0.0).map(|(j, &a)| (j + o, a)));
            ineq.extend(b.ineq.iter().map(|r| shift(r, o)));
            eq.extend(b.eq.iter().map(|r| shift(r, o)));
        }
        ineq.insert(0, Row::new(budget, self.budget));
        StandardFormLp {
            sense: Sense::Maximize,
            objective,
            ineq,
            eq,
            vars,
        }
    }

    fn verified(&self, points: &[Vec<f64>]) -> bool {
        self.blocks.iter().zip(points).all(|(b, x)| block_violation(b, x) <= ROW_TOL)
    }

    /// Master step: the smallest budget price whose total activation fits,
    /// with the switching arms mixed so the budget row is tight.
    fn price(&self, paths: &[ArmPath]) -> Pricing {
        let tol = MASTER_TOL * (1.0 + self.budget.abs());
        let limit = paths.iter().map(|p| p.limit).fold(f64::INFINITY, f64::min);
        let total_at = |pick: &dyn Fn(&ArmPath) -> f64| paths.iter().map(pick).sum::<f64>();
        if total_at(&|p| p.vertices[0].activation) <= self.budget + tol {
            return Pricing::Points(paths.iter().map(|p| p.vertices[0].x.clone()).collect());
        }
        let mut lambdas: Vec<f64> = paths
            .iter()
            .flat_map(|p| p.vertices[1..].iter().map(|v| v.lambda))
            .collect();
        lambdas.sort_by(f64::total_cmp);
        lambdas.dedup();
        let price = lambdas
            .iter()
            .copied()
            .find(|&l| total_at(&|p| p.right(l).activation) <= self.budget + tol);
        let lambda = match price {
            Some(l) if l < limit => l,
            _ if limit.is_finite() => return Pricing::BeyondLimit,
            _ => return Pricing::Infeasible,
        };
        let fixed: f64 = total_at(&|p| p.right(lambda).activation);
        let swing: f64 = total_at(&|p| p.left(lambda).activation - p.right(lambda).activation);
        let theta = if swing > 0.0 {
            ((self.budget - fixed) / swing).clamp(0.0, 1.0)
        } else {
            0.0
        };
        Pricing::Points(
            paths
                .iter()
                .map(|p| {
                    let (hi, lo) = (p.left(lambda), p.right(lambda));
                    if std::ptr::eq(hi, lo) {
                        lo.x.clone()
                    } else {
                        lo.x.iter().zip(&hi.x).map(|(l, h)| l + theta * (h - l)).collect()
                    }
                })
                .collect(),
        )
    }

    /// Solves by budget pricing. Falls back to the monolithic simplex if an
    /// arm problem is unbounded on its own, or if the budget price lies past
    /// the point where some arm's path could no longer be traced reliably.
    pub fn solve(&self) -> Result<LpSolution, LpError> {
        let n = self.num_vars();
        for b in &self.blocks {
            let m = b.num_vars();
            if b.linking.len() != m || b.vars.len() != m {
                return Err(LpError::Malformed("block vectors disagree in length".into()));
            }
        }
        let mut paths = Vec::with_capacity(self.blocks.len());
        for b in &self.blocks {
            let Some(mut t) = Tableau::new(b.num_vars(), &b.objective, &b.ineq, &b.eq)? else {
                return Ok(LpSolution::without_point(LpStatus::Infeasible, n));
            };
            match t.solve()? {
                Phase2::Optimal => {}
                Phase2::Infeasible => return Ok(LpSolution::without_point(LpStatus::Infeasible, n)),
                Phase2::Unbounded => return solve_lp(&self.to_standard_form()),
            }
            paths.push(ArmPath::new(t.parametric_path(&b.linking)?));
        }

        // Drift accumulates along a path, so paths are only scanned vertex
        // by vertex when the points they supply fail verification.
        let points = loop {
            let pricing = self.price(&paths);
            let suspects: Vec<usize> = match &pricing {
                Pricing::Points(points) => self
                    .blocks
                    .iter()
                    .zip(points)
                    .enumerate()
                    .filter(|(_, (b, x))| block_violation(b, x) > ROW_TOL)
                    .map(|(n, _)| n)
                    .collect(),
                Pricing::Infeasible | Pricing::BeyondLimit => (0..paths.len()).collect(),
            };
            let unchecked: Vec<usize> = suspects.into_iter().filter(|&n| !paths[n].checked).collect();
            if unchecked.is_empty() {
                match pricing {
                    Pricing::Points(points) if self.verified(&points) => break points,
                    Pricing::Infeasible => return Ok(LpSolution::without_point(LpStatus::Infeasible, n)),
                    _ => {
                        log::warn!("decomposed solve drifted; re-solving monolithically");
                        return solve_lp(&self.to_standard_form());
                    }
                }
            }
            for n in unchecked {
                paths[n].check(&self.blocks[n]);
                if paths[n].vertices.is_empty() {
                    log::warn!("arm solve drifted off its polytope; re-solving monolithically");
                    return solve_lp(&self.to_standard_form());
                }
            }
        };
        let x: Vec<f64> = points
            .into_iter()
            .flatten()
            .map(|v| if v < 0.0 && v > -1e-9 { 0.0 } else { v })
            .collect();
        let objective_value = self
            .blocks
            .iter()
            .flat_map(|b| b.objective.iter())
            .zip(&x)
            .map(|(c, v)| c * v)
            .sum();
        Ok(LpSolution {
            status: LpStatus::Optimal,
            x,
            objective_value,
        })
    }
}

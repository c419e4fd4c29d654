//! Dense two-phase primal simplex on a full tableau.
//!
//! Entering columns follow Dantzig's largest-reduced-cost rule; after a run
//! of degenerate pivots the solver switches to Bland's smallest-index rule
//! until the objective moves again, which rules out cycling. The same
//! tableau also supports tracing the optimal vertex of `c - lambda * d` for
//! `lambda` from 0 upward (parametric objective), used by the coupled
//! solver in [`super::coupled`].

use super::Row;
use crate::error::LpError;

const ENTER_TOL: f64 = 1e-9;
const PIVOT_TOL: f64 = 1e-9;
const HARRIS_TOL: f64 = 1e-9;
const ZERO_FLUSH: f64 = 1e-13;
const DEGENERATE_LIMIT: usize = 50;
/// Bland-mode leaving rows need at least this share of the largest pivot.
const BLAND_PIVOT_SHARE: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Phase2 {
    Optimal,
    Unbounded,
    Infeasible,
}

pub(crate) struct Tableau {
    rows: usize,
    width: usize,
    n_struct: usize,
    art_start: usize,
    data: Vec<f64>,
    basis: Vec<usize>,
    in_basis: Vec<bool>,
    barred: Vec<bool>,
    /// Reduced-cost rows; the last entry holds minus the objective value.
    objs: Vec<Vec<f64>>,
    bland: bool,
    degenerate_run: usize,
    iterations: usize,
    cap: usize,
    scratch_idx: Vec<usize>,
    scratch_val: Vec<f64>,
}

/// Vertex visited while tracing the parametric objective.
#[derive(Debug, Clone)]
pub(crate) struct PathVertex {
    pub lambda: f64,
    pub x: Vec<f64>,
    pub activation: f64,
}

/// Vertices of a parametric run. The run is exact for prices below
/// `limit`; a finite limit means it stalled there.
pub(crate) struct ParametricPath {
    pub vertices: Vec<PathVertex>,
    pub limit: f64,
}

fn is_redundant_le(row: &Row) -> bool {
    row.rhs >= 0.0 && row.coeffs.iter().all(|&(_, a)| a <= 0.0)
}

impl Tableau {
    /// Builds the phase-1 tableau for `max c.x` s.t. `ineq` (`<=`), `eq`,
    /// `x >= 0`. `<=` rows implied by nonnegativity are dropped.
    pub(crate) fn new(n: usize, objective: &[f64], ineq: &[Row], eq: &[Row]) -> Result<Option<Self>, LpError> {
        struct Prepared<'a> {
            row: &'a Row,
            sign: f64,
            slack: Option<f64>,
            artificial: bool,
        }
        let mut prepared = Vec::with_capacity(ineq.len() + eq.len());
        for row in ineq {
            if let Some(&(j, _)) = row.coeffs.iter().find(|(j, _)| *j >= n) {
                return Err(LpError::Malformed(format!("row references variable {j} of {n}")));
            }
            if is_redundant_le(row) {
                continue;
            }
            if row.rhs >= 0.0 {
                prepared.push(Prepared { row, sign: 1.0, slack: Some(1.0), artificial: false });
            } else {
                prepared.push(Prepared { row, sign: -1.0, slack: Some(-1.0), artificial: true });
            }
        }
        for row in eq {
            if let Some(&(j, _)) = row.coeffs.iter().find(|(j, _)| *j >= n) {
                return Err(LpError::Malformed(format!("row references variable {j} of {n}")));
            }
            if row.coeffs.iter().all(|&(_, a)| a == 0.0) {
                if row.rhs.abs() > 1e-12 {
                    return Ok(None);
                }
                continue;
            }
            let sign = if row.rhs < 0.0 { -1.0 } else { 1.0 };
            prepared.push(Prepared { row, sign, slack: None, artificial: true });
        }

        let rows = prepared.len();
        let n_slack = prepared.iter().filter(|p| p.slack.is_some()).count();
        let n_art = prepared.iter().filter(|p| p.artificial).count();
        let art_start = n + n_slack;
        let cols = art_start + n_art;
        let width = cols + 1;
        let mut data = vec![0.0; rows * width];
        let mut basis = vec![0; rows];
        let mut phase1 = vec![0.0; width];
        let (mut next_slack, mut next_art) = (n, art_start);
        for (i, p) in prepared.iter().enumerate() {
            let line = &mut data[i * width..(i + 1) * width];
            for &(j, a) in &p.row.coeffs {
                line[j] += p.sign * a;
            }
            line[cols] = p.sign * p.row.rhs;
            if let Some(s) = p.slack {
                line[next_slack] = s;
                if !p.artificial {
                    basis[i] = next_slack;
                }
                next_slack += 1;
            }
            if p.artificial {
                line[next_art] = 1.0;
                basis[i] = next_art;
                next_art += 1;
                for j in 0..art_start {
                    phase1[j] += line[j];
                }
                phase1[cols] += line[cols];
            }
        }
        let mut phase2 = vec![0.0; width];
        phase2[..n].copy_from_slice(objective);
        let mut in_basis = vec![false; cols];
        for &b in &basis {
            in_basis[b] = true;
        }
        Ok(Some(Self {
            rows,
            width,
            n_struct: n,
            art_start,
            data,
            basis,
            in_basis,
            barred: vec![false; cols],
            objs: vec![phase1, phase2],
            bland: false,
            degenerate_run: 0,
            iterations: 0,
            cap: 20_000 + 50 * (rows + width),
            scratch_idx: Vec::with_capacity(width),
            scratch_val: Vec::with_capacity(width),
        }))
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.width + j]
    }

    #[inline]
    fn rhs(&self, i: usize) -> f64 {
        self.data[i * self.width + self.width - 1]
    }

    fn cols(&self) -> usize {
        self.width - 1
    }

    fn choose_entering(&self, obj: usize) -> Option<usize> {
        let rc = &self.objs[obj];
        let eligible = |j: &usize| !self.barred[*j] && !self.in_basis[*j] && rc[*j] > ENTER_TOL;
        if self.bland {
            (0..self.cols()).find(eligible)
        } else {
            (0..self.cols())
                .filter(eligible)
                .fold(None, |best: Option<usize>, j| match best {
                    Some(b) if rc[b] >= rc[j] => Some(b),
                    _ => Some(j),
                })
        }
    }

    /// Harris two-pass ratio test: the step bound is relaxed by a small
    /// feasibility tolerance, then the largest pivot element among rows
    /// within that bound leaves. Large pivots keep the dense tableau
    /// numerically stable through long degenerate runs. With `smallest_index`
    /// the leaving row is instead the smallest basic index among candidates
    /// whose pivot is not much below the largest (Bland's rule, guarded).
    fn ratio_test(&self, q: usize, smallest_index: bool) -> Option<usize> {
        let mut bound = f64::INFINITY;
        for i in 0..self.rows {
            let a = self.at(i, q);
            if a > PIVOT_TOL {
                bound = bound.min((self.rhs(i).max(0.0) + HARRIS_TOL) / a);
            }
        }
        if bound == f64::INFINITY {
            return None;
        }
        let candidates = (0..self.rows).filter(|&i| {
            let a = self.at(i, q);
            a > PIVOT_TOL && self.rhs(i).max(0.0) / a <= bound
        });
        let largest = candidates.clone().max_by(|&x, &y| self.at(x, q).total_cmp(&self.at(y, q)))?;
        if !smallest_index {
            return Some(largest);
        }
        let floor = BLAND_PIVOT_SHARE * self.at(largest, q);
        candidates.filter(|&i| self.at(i, q) >= floor).min_by_key(|&i| self.basis[i])
    }

    fn pivot(&mut self, r: usize, q: usize) {
        let w = self.width;
        let inv = 1.0 / self.data[r * w + q];
        self.scratch_idx.clear();
        self.scratch_val.clear();
        {
            let prow = &mut self.data[r * w..(r + 1) * w];
            for (j, v) in prow.iter_mut().enumerate() {
                if *v != 0.0 {
                    *v *= inv;
                    if v.abs() < ZERO_FLUSH && j != w - 1 {
                        *v = 0.0;
                    } else {
                        self.scratch_idx.push(j);
                        self.scratch_val.push(*v);
                    }
                }
            }
            prow[q] = 1.0;
        }
        let (idx, val) = (&self.scratch_idx, &self.scratch_val);
        for i in 0..self.rows {
            if i == r {
                continue;
            }
            let line = &mut self.data[i * w..(i + 1) * w];
            let f = line[q];
            if f == 0.0 {
                continue;
            }
            for (&j, &v) in idx.iter().zip(val) {
                let x = line[j] - f * v;
                line[j] = if x.abs() < ZERO_FLUSH { 0.0 } else { x };
            }
            line[q] = 0.0;
            let rhs = &mut line[w - 1];
            if *rhs < 0.0 && *rhs > -1e-9 {
                *rhs = 0.0;
            }
        }
        for obj in &mut self.objs {
            let f = obj[q];
            if f == 0.0 {
                continue;
            }
            for (&j, &v) in idx.iter().zip(val) {
                obj[j] -= f * v;
            }
            obj[q] = 0.0;
        }
        self.in_basis[self.basis[r]] = false;
        self.basis[r] = q;
        self.in_basis[q] = true;
    }

    fn tick(&mut self) -> Result<(), LpError> {
        self.iterations += 1;
        if self.iterations > self.cap {
            Err(LpError::CyclingSuspected(self.cap))
        } else {
            Ok(())
        }
    }

    /// Runs simplex iterations on objective row `obj`. Returns false when
    /// the objective is unbounded.
    fn optimize(&mut self, obj: usize) -> Result<bool, LpError> {
        loop {
            self.tick()?;
            let Some(q) = self.choose_entering(obj) else {
                return Ok(true);
            };
            let Some(r) = self.ratio_test(q, self.bland) else {
                return Ok(false);
            };
            let step = self.rhs(r).max(0.0) / self.at(r, q);
            if step <= 1e-12 {
                self.degenerate_run += 1;
                if self.degenerate_run > DEGENERATE_LIMIT {
                    self.bland = true;
                }
            } else {
                self.degenerate_run = 0;
                self.bland = false;
            }
            self.pivot(r, q);
        }
    }

    /// Phase 1, artificial clean-up and phase 2 on the original objective.
    pub(crate) fn solve(&mut self) -> Result<Phase2, LpError> {
        let has_artificials = self.art_start < self.cols();
        if has_artificials {
            self.optimize(0)?;
            let scale: f64 = 1.0
                + (0..self.rows)
                    .filter(|&i| self.basis[i] >= self.art_start)
                    .map(|i| self.rhs(i).abs())
                    .fold(0.0, f64::max);
            let infeasibility = self.objs[0][self.width - 1];
            if infeasibility > 1e-8 * scale {
                return Ok(Phase2::Infeasible);
            }
            for r in 0..self.rows {
                if self.basis[r] < self.art_start {
                    continue;
                }
                let q = (0..self.art_start)
                    .filter(|&j| !self.in_basis[j])
                    .max_by(|&a, &b| self.at(r, a).abs().total_cmp(&self.at(r, b).abs()));
                if let Some(q) = q {
                    if self.at(r, q).abs() > PIVOT_TOL {
                        self.pivot(r, q);
                    }
                }
            }
            for j in self.art_start..self.cols() {
                self.barred[j] = true;
            }
        }
        self.bland = false;
        self.degenerate_run = 0;
        if self.optimize(1)? {
            Ok(Phase2::Optimal)
        } else {
            Ok(Phase2::Unbounded)
        }
    }

    pub(crate) fn primal(&self) -> Vec<f64> {
        let mut x = vec![0.0; self.n_struct];
        for (i, &b) in self.basis.iter().enumerate() {
            if b < self.n_struct {
                x[b] = self.rhs(i);
            }
        }
        x
    }

    /// From an optimal basis for `c`, walks the optimal vertices of
    /// `c - lambda * direction` as `lambda` grows from 0 until no pivot can
    /// lower `direction . x` further. The first vertex is the current one.
    pub(crate) fn parametric_path(&mut self, direction: &[f64]) -> Result<ParametricPath, LpError> {
        let w = self.width;
        let mut drow = vec![0.0; w];
        drow[..self.n_struct].copy_from_slice(direction);
        for i in 0..self.rows {
            let b = self.basis[i];
            let db = if b < self.n_struct { direction[b] } else { 0.0 };
            if db != 0.0 {
                for j in 0..w {
                    drow[j] -= db * self.at(i, j);
                }
            }
        }
        for &b in &self.basis {
            drow[b] = 0.0;
        }
        self.objs.push(drow);
        let (c_idx, d_idx) = (1, self.objs.len() - 1);

        let vertex = |t: &Self, lambda: f64| {
            let x = t.primal();
            let activation = x.iter().zip(direction).map(|(a, b)| a * b).sum();
            PathVertex { lambda, x, activation }
        };
        let mut lambda = 0.0f64;
        let mut path = vec![vertex(self, lambda)];
        let mut stalled = 0;
        loop {
            self.tick()?;
            let (alpha, beta) = (&self.objs[c_idx], &self.objs[d_idx]);
            let mut best: Option<(usize, f64)> = None;
            for j in 0..self.cols() {
                if self.barred[j] || self.in_basis[j] || beta[j] >= -ENTER_TOL {
                    continue;
                }
                let l = (alpha[j] / beta[j]).max(lambda);
                match best {
                    Some((_, bl)) if l >= bl - 1e-12 * (1.0 + bl.abs()) => {}
                    _ => best = Some((j, l)),
                }
            }
            let Some((q, l)) = best else { break };
            // pivots that leave lambda in place are dual degenerate and can
            // cycle; they follow Bland's rule (the first tied column already
            // enters) and a long stall is reported rather than walked
            let stationary = l <= lambda;
            stalled = if stationary { stalled + 1 } else { 0 };
            if stalled > self.rows + self.width {
                log::debug!("parametric path stalled at lambda {lambda}");
                return Ok(ParametricPath { vertices: path, limit: lambda });
            }
            let Some(r) = self.ratio_test(q, stationary) else { break };
            self.pivot(r, q);
            lambda = l;
            path.push(vertex(self, lambda));
        }
        Ok(ParametricPath {
            vertices: path,
            limit: f64::INFINITY,
        })
    }
}

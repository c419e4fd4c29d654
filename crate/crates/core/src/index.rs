//! The fair index policy.
//!
//! An occupancy measure is turned into per-state activation probabilities
//! `omega_n(s) = zeta_n(s, 1) / zeta_n(s, .)`. Each epoch the arms are ranked
//! by `omega` at their current states and the top `min(B, N)` are activated,
//! with equal indices ordered by a seeded shuffle.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::lp::OccupancyMeasure;
use crate::model::ACTIVE;

/// State mass at or below this is treated as unvisited.
pub const MASS_EPS: f64 = 1e-9;
/// Index ties are judged on this grid.
const TIE_GRID: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexTable {
    omega: Vec<Vec<f64>>,
}

impl IndexTable {
    /// Entries are clamped to `[0, 1]`.
    pub fn new(mut omega: Vec<Vec<f64>>) -> Self {
        omega.iter_mut().flatten().for_each(|w| *w = w.clamp(0.0, 1.0));
        Self { omega }
    }

    pub fn num_arms(&self) -> usize {
        self.omega.len()
    }

    pub fn num_states(&self) -> usize {
        self.omega.first().map_or(0, Vec::len)
    }

    pub fn get(&self, arm: usize, state: usize) -> f64 {
        self.omega[arm][state]
    }

    pub fn arm(&self, arm: usize) -> &[f64] {
        &self.omega[arm]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.omega
    }
}

/// `omega_n(s)`; 0 where the state carries no mass.
pub fn fair_indices(occupancy: &OccupancyMeasure) -> IndexTable {
    let omega = (0..occupancy.num_arms())
        .map(|n| {
            (0..occupancy.num_states())
                .map(|s| {
                    let total = occupancy.state_mass(n, s);
                    if total <= MASS_EPS {
                        0.0
                    } else {
                        occupancy.state_action(n, s, ACTIVE) / total
                    }
                })
                .collect()
        })
        .collect();
    IndexTable::new(omega)
}

/// Activation decision for one epoch.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionVector(pub Vec<u8>);

impl ActionVector {
    pub fn passive(num_arms: usize) -> Self {
        Self(vec![0; num_arms])
    }

    pub fn from_active(num_arms: usize, active: impl IntoIterator<Item = usize>) -> Self {
        let mut a = Self::passive(num_arms);
        for n in active {
            a.0[n] = 1;
        }
        a
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn action(&self, arm: usize) -> usize {
        usize::from(self.0[arm])
    }

    pub fn is_active(&self, arm: usize) -> bool {
        self.0[arm] == 1
    }

    pub fn num_active(&self) -> usize {
        self.0.iter().filter(|&&a| a == 1).count()
    }

    pub fn active_arms(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().filter(|(_, &a)| a == 1).map(|(n, _)| n)
    }
}

/// Activates the `min(B, N)` arms with the highest index at their current
/// states; equal indices are ordered by a shuffle drawn from `rng`.
pub fn select_top_b<R: Rng + ?Sized>(indices: &IndexTable, states: &[usize], budget: usize, rng: &mut R) -> ActionVector {
    let n = states.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    order.sort_by_cached_key(|&arm| std::cmp::Reverse((indices.get(arm, states[arm]) / TIE_GRID).round() as i64));
    ActionVector::from_active(n, order.into_iter().take(budget.min(n)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::{OccupancyForm, OccupancyLayout};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn index_is_the_active_share() {
        let layout = OccupancyLayout {
            form: OccupancyForm::StateAction,
            num_arms: 1,
            num_states: 3,
        };
        // state 0: passive 0.1, active 0.3; state 1: passive 0.6; state 2 unvisited
        let occ = OccupancyMeasure::new(layout, vec![vec![0.1, 0.3, 0.6, 0.0, 0.0, 0.0]]).unwrap();
        let w = fair_indices(&occ);
        assert!((w.get(0, 0) - 0.75).abs() < 1e-15);
        assert_eq!(w.get(0, 1), 0.0);
        assert_eq!(w.get(0, 2), 0.0);
    }

    #[test]
    fn top_b_picks_highest() {
        let table = IndexTable::new(vec![vec![0.9], vec![0.5], vec![0.7]]);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let a = select_top_b(&table, &[0, 0, 0], 2, &mut rng);
        assert_eq!(a.0, vec![1, 0, 1]);
    }

    #[test]
    fn ties_are_seeded() {
        let table = IndexTable::new(vec![vec![0.5]; 6]);
        let pick = |seed| select_top_b(&table, &[0; 6], 1, &mut ChaCha8Rng::seed_from_u64(seed));
        assert_eq!(pick(3), pick(3));
        assert_eq!(pick(3).num_active(), 1);
        let winners: std::collections::HashSet<_> = (0..40).map(|s| pick(s).active_arms().next().unwrap()).collect();
        assert!(winners.len() > 1);
    }

    #[test]
    fn budget_above_arm_count_activates_all() {
        let table = IndexTable::new(vec![vec![0.0]; 3]);
        let a = select_top_b(&table, &[0; 3], 7, &mut ChaCha8Rng::seed_from_u64(1));
        assert_eq!(a.num_active(), 3);
    }
}

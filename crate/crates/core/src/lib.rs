//! Restless multi-armed bandits with long-term fairness floors.
//!
//! The crate covers the whole pipeline: arm models and the four benchmark
//! environments ([`model`], [`env`]), occupancy-measure LPs with an in-crate
//! simplex solver ([`lp`]), the fair index policy ([`index`]), the optimistic
//! learners Fair-UCRL and G-Fair-UCRL ([`learner`]), and regret bookkeeping
//! with Monte-Carlo aggregation and brute-force oracles ([`harness`]).

pub mod env;
pub mod error;
pub mod harness;
pub mod index;
pub mod learner;
pub mod lp;
pub mod model;

mod linalg;

pub use error::{EnvError, HarnessError, LearnerError, LpError, ModelError};
pub use model::{stationary_distribution, validate_instance, ArmModel, RewardDist, RmabInstance, ValidationReport};
pub use index::{fair_indices, select_top_b, ActionVector, IndexTable};
pub use learner::{Algorithm, Counts, LearnerConfig, TrialLog};
pub use lp::{solve_lp, ConfidenceModel, LpSolution, LpStatus, OccupancyMeasure, StandardFormLp};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("shape error: {0}")]
    Shape(String),

    #[error("invalid instance: {}", .0.join("; "))]
    Invalid(Vec<String>),

    #[error("periodic or reducible chain suspected (no unique stationary distribution)")]
    NotUnichain,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EnvError {
    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("reward mean exceeds 1: slope {slope} over {states} states")]
    RewardMeanExceedsOne { slope: f64, states: usize },

    #[error("unknown LMSS elevation {0} (expected 40, 60, 70 or 80)")]
    UnknownElevation(u32),

    #[error("row {row} of the CPAP kernel cannot be normalized")]
    NonNormalizable { row: usize },

    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LpError {
    #[error("cycling suspected: simplex exceeded {0} iterations")]
    CyclingSuspected(usize),

    #[error("malformed LP: {0}")]
    Malformed(String),

    #[error("solver inconsistency: {0}")]
    SolverInconsistency(String),

    #[error("LP is {0:?}, no occupancy measure available")]
    NotOptimal(crate::lp::LpStatus),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LearnerError {
    #[error("infeasible plan in episode {episode}")]
    InfeasiblePlan { episode: usize },

    #[error("fairness quota exceeds episode budget: {needed} activation slots needed, {available} available")]
    QuotaExceedsBudget { needed: usize, available: usize },

    #[error("invalid learner config: {0}")]
    Config(String),

    #[error(transparent)]
    Lp(#[from] LpError),

    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HarnessError {
    #[error("grid too coarse: refinement still moved the optimum by {0:.3e}")]
    GridTooCoarse(f64),

    #[error("brute force oracle needs a single arm with at most 3 states")]
    OracleShape,

    #[error("no feasible grid policy")]
    OracleInfeasible,

    #[error("invalid harness input: {0}")]
    Input(String),

    #[error(transparent)]
    Learner(#[from] LearnerError),

    #[error(transparent)]
    Lp(#[from] LpError),

    #[error(transparent)]
    Model(#[from] ModelError),
}

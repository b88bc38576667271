//! Affective decision dynamics of interacting agent groups.
//!
//! Each group `j` chooses among a shared set of alternatives with
//! probabilities `p_j = f_j + q_j`: a utility factor plus an attraction that
//! fades as the group accumulates information from the others. Herding mixes
//! the groups' choices. The crate provides a discrete-time map, its
//! continuous-time limit and tools to analyse the resulting trajectories.

pub mod analysis;
pub mod continuous;
pub mod discrete;
pub mod error;
pub mod kv;
pub mod memory;
pub mod scenario;
pub mod trajectory;

pub use analysis::{
    classify, classify_series, compare_runs, lyapunov_estimate, solve_fixed_point, solve_fixed_point_with,
    Approach, AttractorClassification, ChannelClassification, ClassifierTolerances, DivergenceReport, FixedPointOptions,
    FixedPointReport, Verdict,
};
pub use continuous::{run_continuous, ContinuousRunConfig};
pub use discrete::{run_discrete, step_discrete, DiscreteRunConfig};
pub use error::{Error, Result};
pub use kv::{KvDocument, ParseError};
pub use memory::{attraction, kl_gain, MemoryModel};
pub use scenario::{
    initial_state, luce_utility_factors, validate_scenario, MemoryKind, Scenario, StateVector, UtilitySpec,
    ValidationReport, Violation,
};
pub use trajectory::{Engine, Trajectory};

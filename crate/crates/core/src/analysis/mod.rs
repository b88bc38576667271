//! Post-processing of runs: fixed points, attractor verdicts, Lyapunov
//! estimates and engine comparison.

pub mod classify;
pub mod compare;
pub mod fixed_point;
pub mod lyapunov;

pub use classify::{
    classify, classify_series, direction_reversals, Approach, AttractorClassification, ChannelClassification, ClassifierTolerances, Verdict,
};
pub use compare::{compare_runs, ChannelDivergence, DivergenceReport};
pub use fixed_point::{
    solve_fixed_point, solve_fixed_point_with, stationarity_residual, FixedPointOptions, FixedPointReport,
};
pub use lyapunov::{lyapunov_estimate, DEFAULT_PERTURBATION, LYAPUNOV_FLOOR};

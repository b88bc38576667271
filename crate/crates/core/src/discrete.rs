//! The discrete-time map: one decision per unit of time.
//!
//! Within a step `t -> t + 1` the engine
//! 1. reads the memories `M_j(t)` (zero while `t < 1`),
//! 2. decays the attractions `q_j(t) = q_j(0) exp(-M_j(t))` and mixes the
//!    groups through herding,
//! 3. evaluates the information gains at the new state; long-term groups add
//!    them to their accumulator, short-term groups read them fresh next step.

use crate::error::{Error, Result};
use crate::memory::{attraction, gain_sum, MemoryModel, DEFAULT_CLAMP_EPSILON};
use crate::scenario::{initial_state, MemoryKind, Scenario, StateVector};
use crate::trajectory::{Engine, Trajectory};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DiscreteRunConfig {
    /// Number of steps.
    pub horizon: usize,
    /// Record every `record_stride`-th state (the last one is always kept).
    pub record_stride: usize,
}

impl DiscreteRunConfig {
    pub fn new(horizon: usize) -> Self {
        Self { horizon, record_stride: 1 }
    }

    pub fn validate(&self) -> Result<()> {
        if self.horizon == 0 {
            return Err(Error::InvalidConfig("discrete horizon must be at least 1".into()));
        }
        if self.record_stride == 0 || self.record_stride > self.horizon {
            return Err(Error::InvalidConfig(format!(
                "record_stride = {} must lie in 1..={}",
                self.record_stride, self.horizon
            )));
        }
        Ok(())
    }
}

impl Default for DiscreteRunConfig {
    fn default() -> Self {
        Self::new(2000)
    }
}

pub(crate) fn memory_model(s: &Scenario, j: usize) -> MemoryModel {
    MemoryModel::new(s.memory_kinds[j], s.coupling)
}

/// Memories `M_j(t)` available for the step leaving `state`.
pub fn memory_at(state: &StateVector, scenario: &Scenario) -> Vec<f64> {
    if state.time < 1.0 {
        return vec![0.0; scenario.n_groups];
    }
    (0..scenario.n_groups)
        .map(|j| match scenario.memory_kinds[j] {
            MemoryKind::LongTerm => state.long_memory_acc[j],
            MemoryKind::ShortTerm => {
                memory_model(scenario, j).pair_weight(scenario.n_groups)
                    * gain_sum(j, &state.probabilities, DEFAULT_CLAMP_EPSILON)
            }
        })
        .collect()
}

/// Herding mix of the attraction-shifted utilities:
/// `(1-ε_j) a_j + ε_j/(N-1) Σ_{i≠j} a_i` with `a_i = f_i + q_i`.
pub(crate) fn herding_mix(scenario: &Scenario, memory: &[f64]) -> Vec<Vec<f64>> {
    let n = scenario.n_groups;
    let shifted: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            scenario.utility_factors[i]
                .iter()
                .zip(&scenario.initial_attractions[i])
                .map(|(&f, &q0)| f + attraction(q0, memory[i]))
                .collect()
        })
        .collect();
    let others = (n - 1) as f64;
    (0..n)
        .map(|j| {
            let eps = scenario.herding[j];
            (0..scenario.n_alternatives)
                .map(|a| {
                    let rest: f64 = (0..n).filter(|&i| i != j).map(|i| shifted[i][a]).sum();
                    (1.0 - eps) * shifted[j][a] + eps / others * rest
                })
                .collect()
        })
        .collect()
}

/// One application of the map with the given memories `M_j(t)`.
pub fn step_discrete(state: &StateVector, scenario: &Scenario, memory: &[f64]) -> StateVector {
    let probabilities = herding_mix(scenario, memory);
    let long_memory_acc = (0..scenario.n_groups)
        .map(|j| match scenario.memory_kinds[j] {
            MemoryKind::LongTerm => {
                state.long_memory_acc[j]
                    + memory_model(scenario, j).pair_weight(scenario.n_groups)
                        * gain_sum(j, &probabilities, DEFAULT_CLAMP_EPSILON)
            }
            MemoryKind::ShortTerm => 0.0,
        })
        .collect();
    StateVector {
        probabilities,
        long_memory_acc,
        time: state.time + 1.0,
    }
}

pub fn run_discrete(scenario: &Scenario, config: &DiscreteRunConfig) -> Result<Trajectory> {
    config.validate()?;
    let mut state = initial_state(scenario)?;
    let mut states = Vec::with_capacity(config.horizon / config.record_stride + 2);
    states.push(state.clone());
    for k in 1..=config.horizon {
        let memory = memory_at(&state, scenario);
        state = step_discrete(&state, scenario, &memory);
        if !state.is_finite() {
            return Err(Error::NumericalBreakdown {
                engine: "discrete",
                time: state.time,
                detail: format!("non-finite state {:?}", state.probabilities),
            });
        }
        if k % config.record_stride == 0 || k == config.horizon {
            states.push(state.clone());
        }
    }
    Ok(Trajectory {
        engine: Engine::Discrete,
        step: 1.0,
        states,
    })
}

//! The continuous-time limit, integrated with fixed-step classical RK4.
//!
//! The integrated state holds every probability plus one memory accumulator
//! per group (only long-term groups ever move theirs). Short-term memory is
//! an explicit function of the current state and time, so it is evaluated
//! inside the right-hand side rather than integrated.

use crate::discrete::{herding_mix, memory_model};
use crate::error::{Error, Result};
use crate::memory::{gain_sum, short_gate, DEFAULT_CLAMP_EPSILON};
use crate::scenario::{initial_state, MemoryKind, Scenario, StateVector};
use crate::trajectory::{Engine, Trajectory};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContinuousRunConfig {
    /// Final time.
    pub horizon: f64,
    /// Integrator step.
    pub step: f64,
    pub record_stride: usize,
}

impl ContinuousRunConfig {
    /// Horizon `horizon` with the step set to the scenario's decision delay.
    pub fn for_scenario(scenario: &Scenario, horizon: f64) -> Self {
        Self {
            horizon,
            step: scenario.tau,
            record_stride: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.step > 0.0 && self.step.is_finite() && self.horizon.is_finite() && self.step <= self.horizon) {
            return Err(Error::InvalidConfig(format!(
                "need 0 < step <= horizon, got step = {} and horizon = {}",
                self.step, self.horizon
            )));
        }
        if self.record_stride == 0 {
            return Err(Error::InvalidConfig("record_stride must be at least 1".into()));
        }
        Ok(())
    }

    pub fn n_steps(&self) -> usize {
        (self.horizon / self.step - 1e-9).ceil() as usize
    }
}

impl Default for ContinuousRunConfig {
    fn default() -> Self {
        Self {
            horizon: 200.0,
            step: 0.1,
            record_stride: 1,
        }
    }
}

/// Time derivative of the integrated state.
#[derive(Debug, Clone, PartialEq)]
pub struct Derivative {
    pub probabilities: Vec<Vec<f64>>,
    /// `dM_j/dt`; zero for short-term groups.
    pub long_memory: Vec<f64>,
}

struct Layout {
    groups: usize,
    alternatives: usize,
}

impl Layout {
    fn of(s: &Scenario) -> Self {
        Self {
            groups: s.n_groups,
            alternatives: s.n_alternatives,
        }
    }

    fn len(&self) -> usize {
        self.groups * (self.alternatives + 1)
    }

    fn pack(&self, s: &StateVector) -> Vec<f64> {
        let mut y = Vec::with_capacity(self.len());
        s.probabilities.iter().for_each(|r| y.extend_from_slice(r));
        y.extend_from_slice(&s.long_memory_acc);
        y
    }

    fn unpack(&self, y: &[f64], time: f64) -> StateVector {
        let split = self.groups * self.alternatives;
        StateVector {
            probabilities: y[..split].chunks(self.alternatives).map(<[f64]>::to_vec).collect(),
            long_memory_acc: y[split..].to_vec(),
            time,
        }
    }
}

fn memories(state: &StateVector, s: &Scenario, t: f64) -> Vec<f64> {
    (0..s.n_groups)
        .map(|j| match s.memory_kinds[j] {
            MemoryKind::LongTerm => state.long_memory_acc[j],
            MemoryKind::ShortTerm => {
                short_gate(t, s.tau)
                    * memory_model(s, j).pair_weight(s.n_groups)
                    * gain_sum(j, &state.probabilities, DEFAULT_CLAMP_EPSILON)
            }
        })
        .collect()
}

/// `dp_j/dt = (1-ε_j)[f_j + q_j] + ε_j/(N-1) Σ_{i≠j}[f_i + q_i] - p_j` and
/// `dM_j/dt = J/(N-1) Σ_{i≠j} μ_ji` for long-term groups.
pub fn rhs(state: &StateVector, scenario: &Scenario, t: f64) -> Derivative {
    let target = herding_mix(scenario, &memories(state, scenario, t));
    let probabilities = target
        .iter()
        .zip(&state.probabilities)
        .map(|(tr, pr)| tr.iter().zip(pr).map(|(a, b)| a - b).collect())
        .collect();
    let long_memory = (0..scenario.n_groups)
        .map(|j| match scenario.memory_kinds[j] {
            MemoryKind::LongTerm => {
                memory_model(scenario, j).pair_weight(scenario.n_groups)
                    * gain_sum(j, &state.probabilities, DEFAULT_CLAMP_EPSILON)
            }
            MemoryKind::ShortTerm => 0.0,
        })
        .collect();
    Derivative {
        probabilities,
        long_memory,
    }
}

fn rhs_flat(layout: &Layout, scenario: &Scenario, y: &[f64], t: f64) -> Vec<f64> {
    let d = rhs(&layout.unpack(y, t), scenario, t);
    let mut out = Vec::with_capacity(layout.len());
    d.probabilities.iter().for_each(|r| out.extend_from_slice(r));
    out.extend_from_slice(&d.long_memory);
    out
}

fn rk4_step(layout: &Layout, scenario: &Scenario, y: &[f64], t: f64, h: f64) -> Vec<f64> {
    let shifted = |k: &[f64], c: f64| -> Vec<f64> { y.iter().zip(k).map(|(a, b)| a + c * b).collect() };
    let k1 = rhs_flat(layout, scenario, y, t);
    let k2 = rhs_flat(layout, scenario, &shifted(&k1, 0.5 * h), t + 0.5 * h);
    let k3 = rhs_flat(layout, scenario, &shifted(&k2, 0.5 * h), t + 0.5 * h);
    let k4 = rhs_flat(layout, scenario, &shifted(&k3, h), t + h);
    (0..y.len())
        .map(|i| y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        .collect()
}

pub fn run_continuous(scenario: &Scenario, config: &ContinuousRunConfig) -> Result<Trajectory> {
    config.validate()?;
    let start = initial_state(scenario)?;
    let layout = Layout::of(scenario);
    let n = config.n_steps();
    let mut y = layout.pack(&start);
    let mut states = Vec::with_capacity(n / config.record_stride + 2);
    states.push(start);
    let mut t = 0.0;
    for k in 1..=n {
        let t_next = if k == n { config.horizon } else { k as f64 * config.step };
        y = rk4_step(&layout, scenario, &y, t, t_next - t);
        t = t_next;
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::NumericalBreakdown {
                engine: "continuous",
                time: t,
                detail: format!("non-finite state {y:?}"),
            });
        }
        if k % config.record_stride == 0 || k == n {
            states.push(layout.unpack(&y, t));
        }
    }
    Ok(Trajectory {
        engine: Engine::Continuous,
        step: config.step,
        states,
    })
}

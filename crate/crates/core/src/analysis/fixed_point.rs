//! Self-consistent stationary points shared by both engines:
//! `p_j* = (1-ε_j)(f_j + q_j*) + ε_j/(N-1) Σ_{i≠j}(f_i + q_i*)`.
//!
//! The limiting attractions are not determined by these equations alone:
//! a long-term group keeps accumulating gain for as long as it differs from
//! the others, so whether its attraction dies out depends on the path. A
//! probe run settles that question; the remaining unknowns are then found
//! by damped fixed-point iteration.

use crate::continuous::{run_continuous, ContinuousRunConfig};
use crate::discrete::{herding_mix, memory_model, run_discrete, DiscreteRunConfig};
use crate::error::Result;
use crate::memory::{attraction, gain_sum, DEFAULT_CLAMP_EPSILON};
use crate::scenario::{initial_state, MemoryKind, Scenario};
use crate::trajectory::Engine;

#[derive(Debug, Clone, PartialEq)]
pub struct FixedPointOptions {
    /// Engine whose run decides which long-term attractions decay fully.
    pub probe: Engine,
    pub probe_discrete: DiscreteRunConfig,
    pub probe_continuous: ContinuousRunConfig,
    /// Accumulated memory beyond which a long-term attraction counts as gone
    /// (`exp(-30) < 1e-13`).
    pub decay_threshold: f64,
    pub damping: f64,
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for FixedPointOptions {
    fn default() -> Self {
        Self {
            probe: Engine::Discrete,
            probe_discrete: DiscreteRunConfig::default(),
            probe_continuous: ContinuousRunConfig::default(),
            decay_threshold: 30.0,
            damping: 0.5,
            tolerance: 1e-10,
            max_iterations: 1_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FixedPointReport {
    pub p_star: Vec<Vec<f64>>,
    pub q_star: Vec<Vec<f64>>,
    /// Limiting memory of each group (`+inf` for fully decayed long-term
    /// groups).
    pub memory_star: Vec<f64>,
    /// Max violation of the stationarity equations and of the short-term
    /// memory relation at `p_star`.
    pub residual: f64,
    pub converged: bool,
    pub iterations: usize,
    /// False when a long-term group kept a finite memory although it still
    /// gains information at `p_star` (its memory would keep growing).
    pub memory_consistent: bool,
}

/// Max over groups and alternatives of
/// `|p* - (1-ε)(f + q*) - ε/(N-1) Σ_{i≠j}(f_i + q_i*)|`.
pub fn stationarity_residual(s: &Scenario, p_star: &[Vec<f64>], q_star: &[Vec<f64>]) -> f64 {
    let n = s.n_groups;
    let mut worst: f64 = 0.0;
    for j in 0..n {
        for a in 0..s.n_alternatives {
            let own = s.utility_factors[j][a] + q_star[j][a];
            let rest: f64 = (0..n)
                .filter(|&i| i != j)
                .map(|i| s.utility_factors[i][a] + q_star[i][a])
                .sum();
            let rhs = (1.0 - s.herding[j]) * own + s.herding[j] / (n - 1) as f64 * rest;
            worst = worst.max((p_star[j][a] - rhs).abs());
        }
    }
    worst
}

fn limiting_memory(s: &Scenario, p: &[Vec<f64>], long_limit: &[Option<f64>]) -> Vec<f64> {
    (0..s.n_groups)
        .map(|j| match s.memory_kinds[j] {
            MemoryKind::ShortTerm => {
                memory_model(s, j).pair_weight(s.n_groups) * gain_sum(j, p, DEFAULT_CLAMP_EPSILON)
            }
            MemoryKind::LongTerm => long_limit[j].unwrap_or(f64::INFINITY),
        })
        .collect()
}

fn attractions(s: &Scenario, memory: &[f64]) -> Vec<Vec<f64>> {
    s.initial_attractions
        .iter()
        .zip(memory)
        .map(|(row, &m)| row.iter().map(|&q0| attraction(q0, m)).collect())
        .collect()
}

fn max_gap(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    a.iter()
        .flatten()
        .zip(b.iter().flatten())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

pub fn solve_fixed_point(scenario: &Scenario) -> Result<FixedPointReport> {
    solve_fixed_point_with(scenario, &FixedPointOptions::default())
}

pub fn solve_fixed_point_with(scenario: &Scenario, opts: &FixedPointOptions) -> Result<FixedPointReport> {
    let s = scenario;
    let start = initial_state(s)?;
    let probe_end = match opts.probe {
        Engine::Discrete => run_discrete(s, &opts.probe_discrete)?,
        Engine::Continuous => run_continuous(s, &opts.probe_continuous)?,
    }
    .states
    .pop()
    .expect("runs record at least the initial state");

    // None: fully decayed; Some(m): frozen at the probe's accumulated value.
    let long_limit: Vec<Option<f64>> = (0..s.n_groups)
        .map(|j| {
            let m = probe_end.long_memory_acc[j];
            (s.memory_kinds[j] == MemoryKind::LongTerm && m <= opts.decay_threshold).then_some(m)
        })
        .collect();

    let map = |p: &[Vec<f64>]| herding_mix(s, &limiting_memory(s, p, &long_limit));

    let mut p = start.probabilities;
    let mut iterations = 0;
    let mut residual = max_gap(&map(&p), &p);
    while residual > opts.tolerance && iterations < opts.max_iterations {
        let g = map(&p);
        for (row, grow) in p.iter_mut().zip(&g) {
            for (x, y) in row.iter_mut().zip(grow) {
                *x += opts.damping * (y - *x);
            }
        }
        iterations += 1;
        residual = max_gap(&map(&p), &p);
    }

    let memory_star = limiting_memory(s, &p, &long_limit);
    let q_star = attractions(s, &memory_star);
    let residual = residual.max(stationarity_residual(s, &p, &q_star));
    let memory_consistent = (0..s.n_groups).all(|j| {
        long_limit[j].is_none() || gain_sum(j, &p, DEFAULT_CLAMP_EPSILON) <= 1e-8
    });
    Ok(FixedPointReport {
        converged: residual <= opts.tolerance,
        p_star: p,
        q_star,
        memory_star,
        residual,
        iterations,
        memory_consistent,
    })
}

//! Kullback-Leibler information gains, the four memory functions and the
//! attraction decay they drive.

use crate::error::{Error, Result};
use crate::scenario::{MemoryKind, StateVector};

/// Floor (and `1 - ceiling`) applied to probabilities entering a logarithm.
pub const DEFAULT_CLAMP_EPSILON: f64 = 1e-12;

/// Largest clamp a [`MemoryModel`] accepts.
pub const MAX_CLAMP_EPSILON: f64 = 1e-6;

const DISTRIBUTION_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MemoryModel {
    pub kind: MemoryKind,
    /// Interaction transfer amplitude `J`.
    pub coupling: f64,
    pub clamp_epsilon: f64,
}

impl MemoryModel {
    pub fn new(kind: MemoryKind, coupling: f64) -> Self {
        Self {
            kind,
            coupling,
            clamp_epsilon: DEFAULT_CLAMP_EPSILON,
        }
    }

    pub fn with_clamp(mut self, clamp_epsilon: f64) -> Result<Self> {
        self.clamp_epsilon = clamp_epsilon;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.clamp_epsilon > 0.0 && self.clamp_epsilon <= MAX_CLAMP_EPSILON) {
            return Err(Error::InvalidMemoryModel(format!(
                "clamp_epsilon = {} outside (0, {MAX_CLAMP_EPSILON}]",
                self.clamp_epsilon
            )));
        }
        if !(self.coupling.is_finite() && self.coupling >= 0.0) {
            return Err(Error::InvalidMemoryModel(format!(
                "coupling = {} must be finite and non-negative",
                self.coupling
            )));
        }
        Ok(())
    }

    /// Long-range weight `J / (N - 1)` applied to every pairwise gain.
    pub fn pair_weight(&self, n_groups: usize) -> f64 {
        if n_groups < 2 {
            0.0
        } else {
            self.coupling / (n_groups - 1) as f64
        }
    }
}

fn check_distribution(row: &[f64]) -> Result<()> {
    if row.iter().any(|v| !v.is_finite() || *v < -DISTRIBUTION_TOLERANCE || *v > 1.0 + DISTRIBUTION_TOLERANCE) {
        return Err(Error::NotADistribution(format!("{row:?} has entries outside [0, 1]")));
    }
    let sum: f64 = row.iter().sum();
    if (sum - 1.0).abs() > DISTRIBUTION_TOLERANCE {
        return Err(Error::NotADistribution(format!("{row:?} sums to {sum}")));
    }
    Ok(())
}

/// Information gain of `p_i` relative to `p_j`:
/// `Σ_n p_i(n) ln(p_i(n) / p_j(n))`, evaluated on rows clamped into
/// `[clamp_epsilon, 1 - clamp_epsilon]` and renormalized.
pub fn kl_gain(p_i: &[f64], p_j: &[f64], clamp_epsilon: f64) -> Result<f64> {
    if p_i.len() != p_j.len() || p_i.len() < 2 {
        return Err(Error::LengthMismatch {
            left: p_i.len(),
            right: p_j.len(),
        });
    }
    if !(clamp_epsilon > 0.0 && clamp_epsilon <= MAX_CLAMP_EPSILON) {
        return Err(Error::InvalidMemoryModel(format!(
            "clamp_epsilon = {clamp_epsilon} outside (0, {MAX_CLAMP_EPSILON}]"
        )));
    }
    check_distribution(p_i)?;
    check_distribution(p_j)?;
    Ok(kl_unchecked(p_i, p_j, clamp_epsilon))
}

/// [`kl_gain`] without input checks; the engines call this on rows they
/// already keep normalized.
pub(crate) fn kl_unchecked(p_i: &[f64], p_j: &[f64], eps: f64) -> f64 {
    let clamp = |v: f64| v.clamp(eps, 1.0 - eps);
    let si: f64 = p_i.iter().map(|&v| clamp(v)).sum();
    let sj: f64 = p_j.iter().map(|&v| clamp(v)).sum();
    // Each term a ln(a/b) - a + b is non-negative; the linear parts cancel
    // in the sum because both clamped rows are normalized.
    let total: f64 = p_i
        .iter()
        .zip(p_j)
        .map(|(&a, &b)| {
            kl_term(clamp(a) / si, clamp(b) / sj)
        })
        .sum();
    total.max(0.0)
}

/// `a ln(a/b) - a + b` for positive `a`, `b`, without cancellation when
/// `a ≈ b`. With `z = (a-b)/(a+b)` we have `ln(a/b) = 2 atanh z`, so the
/// term equals `z² (a+b) + 2a (atanh z - z)`.
fn kl_term(a: f64, b: f64) -> f64 {
    let s = a + b;
    let z = (a - b) / s;
    let odd_tail = if z.abs() < 0.5 {
        // z³/3 + z⁵/5 + ...
        let z2 = z * z;
        let mut power = z * z2;
        let mut sum = 0.0f64;
        let mut k = 3.0;
        while power.abs() > f64::EPSILON * 1e-3 * sum.abs() && k < 200.0 {
            sum += power / k;
            power *= z2;
            k += 2.0;
        }
        sum
    } else {
        z.atanh() - z
    };
    (z * z * s + 2.0 * a * odd_tail).max(0.0)
}

/// `Σ_{i≠j} μ_ji`: total gain of group `j` against every other group.
pub(crate) fn gain_sum(j: usize, rows: &[Vec<f64>], eps: f64) -> f64 {
    rows.iter()
        .enumerate()
        .filter(|&(i, _)| i != j)
        .map(|(_, r)| kl_unchecked(&rows[j], r, eps))
        .sum()
}

/// Discrete memory of group `j` from the states at times `1..=t`
/// (`history[k]` must carry time `k + 1`). Long-term memory sums the gains
/// of every state, short-term memory uses the latest state only. An empty
/// history means `t < 1` and yields zero.
pub fn memory_discrete(
    j: usize,
    history: &[StateVector],
    model: &MemoryModel,
    n_groups: usize,
) -> Result<f64> {
    model.validate()?;
    if j >= n_groups {
        return Err(Error::GroupOutOfRange { index: j, n_groups });
    }
    for (k, s) in history.iter().enumerate() {
        if s.time != (k + 1) as f64 {
            return Err(Error::NonConsecutiveHistory { index: k, time: s.time });
        }
        if s.n_groups() != n_groups {
            return Err(Error::LengthMismatch { left: s.n_groups(), right: n_groups });
        }
        for row in &s.probabilities {
            check_distribution(row)?;
        }
    }
    let w = model.pair_weight(n_groups);
    let eps = model.clamp_epsilon;
    let gains = match model.kind {
        MemoryKind::LongTerm => history.iter().map(|s| gain_sum(j, &s.probabilities, eps)).sum(),
        MemoryKind::ShortTerm => history
            .last()
            .map_or(0.0, |s| gain_sum(j, &s.probabilities, eps)),
    };
    Ok(w * gains)
}

/// Continuous long-term memory: trapezoidal quadrature of the gain sums
/// `samples = [(t_k, Σ_{i≠j} μ_ji(t_k))]` over `[0, t]`, scaled by
/// `J / (N - 1)`. Samples must start at time 0 and increase; `t` may fall
/// between samples, in which case the last panel is linearly interpolated.
pub fn memory_continuous_long(
    samples: &[(f64, f64)],
    t: f64,
    model: &MemoryModel,
    n_groups: usize,
) -> Result<f64> {
    model.validate()?;
    if t < 0.0 || !t.is_finite() {
        return Err(Error::NegativeTime(t));
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    let Some(&(t0, _)) = samples.first() else {
        return Err(Error::InvalidConfig("no integrand samples".into()));
    };
    if t0 != 0.0 {
        return Err(Error::InvalidConfig(format!("integrand must start at t = 0, starts at {t0}")));
    }
    let last = samples[samples.len() - 1].0;
    if t > last * (1.0 + 1e-12) + 1e-12 {
        return Err(Error::InvalidConfig(format!("integrand sampled up to {last}, requested {t}")));
    }
    let mut integral = 0.0;
    for w in samples.windows(2) {
        let ((ta, ga), (tb, gb)) = (w[0], w[1]);
        if tb <= ta {
            return Err(Error::InvalidConfig(format!("sample times must increase ({ta} then {tb})")));
        }
        if tb <= t {
            integral += 0.5 * (ga + gb) * (tb - ta);
        } else {
            if ta < t {
                let gt = ga + (gb - ga) * (t - ta) / (tb - ta);
                integral += 0.5 * (ga + gt) * (t - ta);
            }
            break;
        }
    }
    Ok(model.pair_weight(n_groups) * integral)
}

/// Continuous short-term memory `tanh(t/τ) · (J/(N-1)) Σ_{i≠j} μ_ji(t)` at
/// the given state.
pub fn memory_continuous_short(
    j: usize,
    state: &StateVector,
    t: f64,
    tau: f64,
    model: &MemoryModel,
) -> Result<f64> {
    model.validate()?;
    if t < 0.0 || !t.is_finite() {
        return Err(Error::NegativeTime(t));
    }
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(Error::InvalidConfig(format!("tau = {tau} must be positive")));
    }
    let n = state.n_groups();
    if j >= n {
        return Err(Error::GroupOutOfRange { index: j, n_groups: n });
    }
    for row in &state.probabilities {
        check_distribution(row)?;
    }
    Ok(short_gate(t, tau) * model.pair_weight(n) * gain_sum(j, &state.probabilities, model.clamp_epsilon))
}

/// Smooth stand-in for the unit step that switches memory on after one
/// decision delay.
pub(crate) fn short_gate(t: f64, tau: f64) -> f64 {
    (t / tau).tanh()
}

/// Attraction factor after memory `m` has accumulated: `q0 · exp(-m)`.
pub fn attraction(q0: f64, m: f64) -> f64 {
    q0 * (-m).exp()
}

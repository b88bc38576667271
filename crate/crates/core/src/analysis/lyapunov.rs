//! Largest Lyapunov exponent of the discrete map by the two-trajectory
//! method with renormalization after every step.
//!
//! Separations are measured on the probabilities together with
//! `u_j = exp(-M_j)` for long-term groups, which is the quantity the
//! dynamics actually see. The raw accumulator is unbounded and its
//! direction is neutral, so it would mask contraction elsewhere.

use crate::discrete::{memory_at, step_discrete, DiscreteRunConfig};
use crate::error::{Error, Result};
use crate::scenario::{initial_state, MemoryKind, Scenario, StateVector};

/// `ln(f64::EPSILON)`: the per-step value reported when the separation
/// collapses completely.
pub const LYAPUNOV_FLOOR: f64 = -36.04365338911715;

pub const DEFAULT_PERTURBATION: f64 = 1e-8;

fn coordinates(s: &Scenario, state: &StateVector) -> Vec<f64> {
    let mut y: Vec<f64> = state.probabilities.iter().flatten().copied().collect();
    for j in 0..s.n_groups {
        if s.memory_kinds[j] == MemoryKind::LongTerm {
            y.push((-state.long_memory_acc[j]).exp());
        }
    }
    y
}

fn distance(s: &Scenario, a: &StateVector, b: &StateVector) -> f64 {
    coordinates(s, a)
        .iter()
        .zip(coordinates(s, b))
        .map(|(x, y)| (x - y).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Base state with `+δ` on the first and `-δ` on the last alternative of
/// every group, `δ` chosen so the whole displacement has norm `d0`.
fn perturbed(s: &Scenario, base: &StateVector, d0: f64) -> StateVector {
    let delta = d0 / (2.0 * s.n_groups as f64).sqrt();
    let last = s.n_alternatives - 1;
    let mut out = base.clone();
    for row in &mut out.probabilities {
        let sign = if row[0] + delta <= 1.0 && row[last] - delta >= 0.0 { 1.0 } else { -1.0 };
        row[0] += sign * delta;
        row[last] -= sign * delta;
    }
    out
}

/// Pulls `pert` back toward `base` so their separation is `d0 / d` times the
/// current one.
fn rescale(s: &Scenario, base: &StateVector, pert: &mut StateVector, factor: f64) {
    for (pr, br) in pert.probabilities.iter_mut().zip(&base.probabilities) {
        for (x, b) in pr.iter_mut().zip(br) {
            *x = b + factor * (*x - b);
        }
    }
    for j in 0..s.n_groups {
        if s.memory_kinds[j] != MemoryKind::LongTerm {
            continue;
        }
        let mb = base.long_memory_acc[j];
        let ub = (-mb).exp();
        let up = (-pert.long_memory_acc[j]).exp();
        pert.long_memory_acc[j] = if up == ub {
            mb
        } else {
            -(ub + factor * (up - ub)).max(f64::MIN_POSITIVE).ln()
        };
    }
}

/// Mean per-step log growth of an infinitesimal separation over the last
/// `4/5` of `config.horizon` steps. `perturbation` is the initial separation
/// `d0` and must lie in `(0, 1e-6]`.
pub fn lyapunov_estimate(scenario: &Scenario, config: &DiscreteRunConfig, perturbation: f64) -> Result<f64> {
    config.validate()?;
    if !(perturbation > 0.0 && perturbation <= 1e-6) {
        return Err(Error::InvalidConfig(format!(
            "perturbation = {perturbation} must lie in (0, 1e-6]"
        )));
    }
    let s = scenario;
    let transient = config.horizon / 5;
    let measured = config.horizon - transient;
    if measured == 0 {
        return Err(Error::InvalidConfig("horizon too short for a Lyapunov estimate".into()));
    }

    let mut base = initial_state(s)?;
    for _ in 0..transient {
        base = step_discrete(&base, s, &memory_at(&base, s));
    }
    let mut pert = perturbed(s, &base, perturbation);
    let mut total = 0.0;
    for _ in 0..measured {
        let next = step_discrete(&base, s, &memory_at(&base, s));
        pert = step_discrete(&pert, s, &memory_at(&pert, s));
        base = next;
        let d = distance(s, &base, &pert);
        if !d.is_finite() || !base.is_finite() {
            return Err(Error::NumericalBreakdown {
                engine: "discrete",
                time: base.time,
                detail: "non-finite separation".into(),
            });
        }
        total += (d / perturbation).max(f64::EPSILON).ln();
        if d == 0.0 {
            pert = perturbed(s, &base, perturbation);
        } else {
            rescale(s, &base, &mut pert, perturbation / d);
        }
    }
    Ok(total / measured as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floor_is_log_epsilon() {
        assert_eq!(LYAPUNOV_FLOOR, f64::EPSILON.ln());
    }

    #[test]
    fn memoryless_decoupled_map_collapses() {
        // With J = 0 and no herding the map is constant after one step.
        let s = Scenario::binary([0.3, 0.6], [0.2, -0.35], [0.0, 0.0]).with_coupling(0.0);
        let l = lyapunov_estimate(&s, &DiscreteRunConfig::new(500), 1e-8).unwrap();
        assert!((l - LYAPUNOV_FLOOR).abs() < 1e-10, "{l}");
    }

    #[test]
    fn contracting_run_is_negative() {
        let s = Scenario::binary([0.4, 0.1], [0.59, 0.6], [0.0, 0.0]);
        let l = lyapunov_estimate(&s, &DiscreteRunConfig::default(), DEFAULT_PERTURBATION).unwrap();
        assert!(l < 0.0, "{l}");
    }

    #[test]
    fn rejects_bad_perturbation() {
        let s = Scenario::binary([0.4, 0.1], [0.59, 0.6], [0.0, 0.0]);
        for d in [0.0, -1e-9, 1e-3, f64::NAN] {
            assert!(lyapunov_estimate(&s, &DiscreteRunConfig::default(), d).is_err());
        }
    }

    #[test]
    fn perturbation_has_requested_norm_and_keeps_rows_normalized() {
        let s = Scenario::binary([0.4, 0.1], [0.59, 0.6], [0.0, 0.0]);
        let base = initial_state(&s).unwrap();
        let p = perturbed(&s, &base, 1e-7);
        assert!((distance(&s, &base, &p) - 1e-7).abs() < 1e-15);
        for row in &p.probabilities {
            assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        }
    }
}

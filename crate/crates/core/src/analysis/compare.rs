//! Side-by-side comparison of a discrete and a continuous run.

use crate::analysis::classify::{classify_series, ClassifierTolerances, Verdict};
use crate::error::{Error, Result};
use crate::trajectory::Trajectory;

const GRID_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelDivergence {
    pub group: usize,
    pub alternative: usize,
    /// Largest `|p_dis(t) - p_con(t)|` over the common times.
    pub sup_gap: f64,
    /// `|p_dis - p_con|` between the final states of the two runs.
    pub terminal_gap: f64,
    pub discrete: Option<Verdict>,
    pub continuous: Option<Verdict>,
    /// `None` when either run is too short to classify.
    pub verdicts_match: Option<bool>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DivergenceReport {
    pub common_times: Vec<f64>,
    pub channels: Vec<ChannelDivergence>,
}

impl DivergenceReport {
    pub fn max_sup_gap(&self) -> f64 {
        self.channels.iter().map(|c| c.sup_gap).fold(0.0, f64::max)
    }
}

/// Indices into `con` of the states recorded at the discrete times.
fn matching_indices(dis: &Trajectory, con: &Trajectory) -> Vec<(usize, usize)> {
    let con_times = con.times();
    let mut out = Vec::new();
    let mut k = 0;
    for (i, t) in dis.times().into_iter().enumerate() {
        while k < con_times.len() && con_times[k] < t - GRID_TOLERANCE {
            k += 1;
        }
        if k < con_times.len() && (con_times[k] - t).abs() <= GRID_TOLERANCE {
            out.push((i, k));
        }
    }
    out
}

fn verdict(traj: &Trajectory, g: usize, a: usize, tol: &ClassifierTolerances, lyap: Option<f64>) -> Option<Verdict> {
    classify_series(&traj.times(), &traj.channel(g, a), tol, lyap)
        .ok()
        .map(|c| c.verdict)
}

/// Compares the two runs on the times they share. Fails with
/// [`Error::GridMismatch`] when the shapes differ or no time is shared.
pub fn compare_runs(
    dis: &Trajectory,
    con: &Trajectory,
    tol: &ClassifierTolerances,
    dis_lyapunov: Option<f64>,
) -> Result<DivergenceReport> {
    if dis.n_groups() != con.n_groups() || dis.n_alternatives() != con.n_alternatives() {
        return Err(Error::GridMismatch(format!(
            "shapes {}x{} and {}x{}",
            dis.n_groups(),
            dis.n_alternatives(),
            con.n_groups(),
            con.n_alternatives()
        )));
    }
    let pairs = matching_indices(dis, con);
    if pairs.is_empty() {
        return Err(Error::GridMismatch("the runs share no recorded time".into()));
    }
    let common_times = pairs.iter().map(|&(i, _)| dis.states[i].time).collect();
    let (dl, cl) = (dis.last().expect("non-empty"), con.last().expect("non-empty"));
    let mut channels = Vec::new();
    for g in 0..dis.n_groups() {
        for a in 0..dis.n_alternatives() {
            let sup_gap = pairs
                .iter()
                .map(|&(i, k)| (dis.states[i].probabilities[g][a] - con.states[k].probabilities[g][a]).abs())
                .fold(0.0, f64::max);
            let discrete = verdict(dis, g, a, tol, dis_lyapunov);
            let continuous = verdict(con, g, a, tol, None);
            channels.push(ChannelDivergence {
                group: g,
                alternative: a,
                sup_gap,
                terminal_gap: (dl.probabilities[g][a] - cl.probabilities[g][a]).abs(),
                discrete,
                continuous,
                verdicts_match: discrete.zip(continuous).map(|(x, y)| x == y),
            });
        }
    }
    Ok(DivergenceReport { common_times, channels })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::continuous::{run_continuous, ContinuousRunConfig};
    use crate::discrete::{run_discrete, DiscreteRunConfig};
    use crate::scenario::Scenario;

    #[test]
    fn shared_times_are_integers() {
        let s = Scenario::binary([0.4, 0.1], [0.59, 0.6], [0.0, 0.0]);
        let dis = run_discrete(&s, &DiscreteRunConfig::new(200)).unwrap();
        let con = run_continuous(&s, &ContinuousRunConfig::default()).unwrap();
        let r = compare_runs(&dis, &con, &ClassifierTolerances::default(), None).unwrap();
        assert_eq!(r.common_times.len(), 201);
        assert_eq!(r.channels.len(), 4);
        for c in &r.channels {
            assert!(c.terminal_gap < 1e-3, "{c:?}");
            assert_eq!(c.verdicts_match, Some(true));
        }
    }

    #[test]
    fn disjoint_grids_are_rejected() {
        let s = Scenario::binary([0.4, 0.1], [0.59, 0.6], [0.0, 0.0]);
        let dis = run_discrete(&s, &DiscreteRunConfig::new(10)).unwrap();
        let mut con = run_continuous(&s, &ContinuousRunConfig { horizon: 10.0, step: 0.1, record_stride: 1 }).unwrap();
        for st in &mut con.states {
            st.time += 0.05;
        }
        assert!(matches!(
            compare_runs(&dis, &con, &ClassifierTolerances::default(), None),
            Err(Error::GridMismatch(_))
        ));
    }
}

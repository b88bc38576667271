//! Running a manifest and checking its expectations.

use std::fmt::Write as _;
use std::path::Path;

use affdyn_core::analysis::classify::channel;
use affdyn_core::{
    classify, lyapunov_estimate, run_continuous, run_discrete, ChannelClassification, ClassifierTolerances, Engine,
    Error as CoreError, Trajectory,
};

use crate::error::Result;
use crate::manifest::{ExperimentManifest, LyapunovSign};

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub label: String,
    pub passed: bool,
    pub detail: String,
}

/// One engine's run and its per-channel classification.
#[derive(Debug, Clone, PartialEq)]
pub struct EngineRun {
    pub trajectory: Trajectory,
    /// `None` when the run recorded too few points to classify.
    pub classes: Option<Vec<ChannelClassification>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub manifest: ExperimentManifest,
    pub discrete: Option<EngineRun>,
    pub continuous: Option<EngineRun>,
    /// Largest Lyapunov exponent of the discrete run.
    pub lyapunov: Option<f64>,
    pub checks: Vec<Check>,
}

impl ExperimentResult {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn run(&self, engine: Engine) -> Option<&EngineRun> {
        match engine {
            Engine::Discrete => self.discrete.as_ref(),
            Engine::Continuous => self.continuous.as_ref(),
        }
    }

    pub fn trajectories(&self) -> impl Iterator<Item = &Trajectory> {
        self.discrete.iter().chain(&self.continuous).map(|r| &r.trajectory)
    }

    /// Human-readable summary: final values, verdicts and checks.
    pub fn report(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "experiment {}", self.manifest.name);
        for engine in [Engine::Discrete, Engine::Continuous] {
            let Some(run) = self.run(engine) else { continue };
            let last = run.trajectory.last().expect("runs are never empty");
            let _ = writeln!(out, "  {engine} (t = {}):", last.time);
            for (j, row) in last.probabilities.iter().enumerate() {
                for (n, p) in row.iter().enumerate() {
                    let verdict = run
                        .classes
                        .as_deref()
                        .and_then(|c| channel(c, j, n))
                        .map_or("unclassified".to_owned(), |c| c.verdict.to_string());
                    let _ = writeln!(out, "    p{}(A{}) = {p:.6}  {verdict}", j + 1, n + 1);
                }
            }
        }
        if let Some(l) = self.lyapunov {
            let _ = writeln!(out, "  lyapunov exponent (discrete) = {l:.6}");
        }
        for c in &self.checks {
            let tag = if c.passed { "PASS" } else { "FAIL" };
            let _ = writeln!(out, "  [{tag}] {}: {}", c.label, c.detail);
        }
        out
    }
}

fn engine_run(trajectory: Trajectory, lyapunov: Option<f64>) -> Result<EngineRun> {
    let classes = match classify(&trajectory, &ClassifierTolerances::default(), lyapunov) {
        Ok(c) => Some(c),
        Err(CoreError::TrajectoryTooShort { .. }) => None,
        Err(e) => return Err(e.into()),
    };
    Ok(EngineRun { trajectory, classes })
}

fn channel_label(engine: Engine, group: usize, alternative: usize) -> String {
    format!("{} p{}(A{})", engine.short_name(), group + 1, alternative + 1)
}

fn engine_checks(m: &ExperimentManifest, engine: Engine, run: &EngineRun, out: &mut Vec<Check>) {
    let exp = m.expected.for_engine(engine);
    let last = run.trajectory.last().expect("runs are never empty");
    for e in &exp.limits {
        let got = last.probabilities[e.group][e.alternative];
        let tol = m.expected.tolerance;
        out.push(Check {
            label: format!("{} limit", channel_label(engine, e.group, e.alternative)),
            passed: (got - e.value).abs() <= tol,
            detail: format!("final {got:.6}, expected {} ± {tol}", e.value),
        });
    }
    let class = |g, a| run.classes.as_deref().and_then(|c| channel(c, g, a));
    for e in &exp.centers {
        let tol = m.expected.center_tolerance;
        let label = format!("{} center", channel_label(engine, e.group, e.alternative));
        out.push(match class(e.group, e.alternative) {
            Some(c) => Check {
                label,
                passed: (c.center - e.value).abs() <= tol,
                detail: format!("tail mean {:.6}, expected {} ± {tol}", c.center, e.value),
            },
            None => Check { label, passed: false, detail: "run too short to classify".into() },
        });
    }
    for e in &exp.verdicts {
        let label = format!("{} verdict", channel_label(engine, e.group, e.alternative));
        out.push(match class(e.group, e.alternative) {
            Some(c) => Check {
                label,
                passed: e.value.matches(c.verdict),
                detail: format!("{}, expected {}", c.verdict, e.value),
            },
            None => Check { label, passed: false, detail: "run too short to classify".into() },
        });
    }
    for e in &exp.approaches {
        let label = format!("{} approach", channel_label(engine, e.group, e.alternative));
        out.push(match class(e.group, e.alternative) {
            Some(c) => Check {
                label,
                passed: c.approach == e.value,
                detail: format!("{} ({} reversals), expected {}", c.approach, c.direction_reversals, e.value),
            },
            None => Check { label, passed: false, detail: "run too short to classify".into() },
        });
    }
}

/// Runs the engines listed in `engines` (all of the manifest's engines when
/// `None`) and evaluates the expectations that apply to them.
pub fn run_experiment(manifest: &ExperimentManifest, engines: Option<&[Engine]>) -> Result<ExperimentResult> {
    let m = manifest;
    let selected = |e: Engine| engines.map_or(m.runs(e), |list| list.contains(&e));

    let mut lyapunov = None;
    let discrete = if selected(Engine::Discrete) {
        let traj = run_discrete(&m.scenario, &m.discrete)?;
        let lyap = lyapunov_estimate(&m.scenario, &m.discrete, m.perturbation)?;
        lyapunov = Some(lyap);
        Some(engine_run(traj, Some(lyap))?)
    } else {
        None
    };
    let continuous = if selected(Engine::Continuous) {
        Some(engine_run(run_continuous(&m.scenario, &m.continuous)?, None)?)
    } else {
        None
    };

    let mut checks = Vec::new();
    if let Some(run) = &discrete {
        engine_checks(m, Engine::Discrete, run, &mut checks);
        if let (Some(sign), Some(l)) = (m.expected.lyapunov, lyapunov) {
            let (passed, want) = match sign {
                LyapunovSign::Positive => (l > 0.0, "positive"),
                LyapunovSign::Negative => (l < 0.0, "negative"),
            };
            checks.push(Check {
                label: "dis lyapunov".into(),
                passed,
                detail: format!("{l:.6}, expected {want}"),
            });
        }
    }
    if let Some(run) = &continuous {
        engine_checks(m, Engine::Continuous, run, &mut checks);
    }
    Ok(ExperimentResult {
        manifest: m.clone(),
        discrete,
        continuous,
        lyapunov,
        checks,
    })
}

/// Loads and runs a manifest file.
pub fn run_manifest(path: &Path) -> Result<ExperimentResult> {
    run_experiment(&ExperimentManifest::load(path)?, None)
}

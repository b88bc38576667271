//! Attractor verdicts from the tail of a recorded time series.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::trajectory::Trajectory;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    /// Point attractor approached without oscillation.
    StableNode,
    /// Point attractor approached through damped oscillation.
    StableFocus,
    /// Sustained periodic oscillation.
    LimitCycle,
    /// Sustained aperiodic oscillation with a positive Lyapunov exponent.
    Chaotic,
    NonConvergent,
}

impl Verdict {
    pub const ALL: [Verdict; 5] = [
        Verdict::StableNode,
        Verdict::StableFocus,
        Verdict::LimitCycle,
        Verdict::Chaotic,
        Verdict::NonConvergent,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::StableNode => "stable_node",
            Verdict::StableFocus => "stable_focus",
            Verdict::LimitCycle => "limit_cycle",
            Verdict::Chaotic => "chaotic",
            Verdict::NonConvergent => "non_convergent",
        }
    }

    /// Focus, cycle or chaos: the tail crosses its center repeatedly.
    pub fn is_oscillatory(self) -> bool {
        matches!(self, Verdict::StableFocus | Verdict::LimitCycle | Verdict::Chaotic)
    }

    /// Cycle or chaos: oscillation that does not die out.
    pub fn is_sustained(self) -> bool {
        matches!(self, Verdict::LimitCycle | Verdict::Chaotic)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Verdict {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Verdict::ALL
            .into_iter()
            .find(|v| v.as_str() == s)
            .ok_or_else(|| format!("unknown verdict `{s}`"))
    }
}

/// Shape of the whole recorded path, as opposed to its tail.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Approach {
    Monotone,
    /// The path changes direction repeatedly.
    Oscillatory,
}

impl Approach {
    pub fn as_str(self) -> &'static str {
        match self {
            Approach::Monotone => "monotone",
            Approach::Oscillatory => "oscillatory",
        }
    }
}

impl fmt::Display for Approach {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Approach {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "monotone" => Ok(Approach::Monotone),
            "oscillatory" => Ok(Approach::Oscillatory),
            _ => Err(format!("unknown approach `{s}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassifierTolerances {
    /// Fraction of the recorded points, counted from the end, that forms the
    /// tail window.
    pub tail_fraction: f64,
    /// Largest tail amplitude that still counts as converged.
    pub convergence: f64,
    /// Deviations from the center at or below this size carry no sign.
    pub noise_floor: f64,
    pub max_node_sign_changes: usize,
    /// Most direction reversals over the whole path that still count as a
    /// monotone approach.
    pub max_monotone_reversals: usize,
    /// A tail whose fitted oscillation envelope shrinks below this factor
    /// across the window is decaying.
    pub focus_decay_ratio: f64,
    /// Autocorrelation a lag must reach to count as the dominant period.
    pub period_correlation: f64,
    pub max_period_lag: usize,
    /// Lyapunov exponent (per step) above which sustained aperiodic
    /// oscillation counts as chaos.
    pub lyapunov: f64,
    pub min_points: usize,
}

impl Default for ClassifierTolerances {
    fn default() -> Self {
        Self {
            tail_fraction: 0.5,
            convergence: 1e-4,
            noise_floor: 1e-12,
            max_node_sign_changes: 2,
            max_monotone_reversals: 2,
            focus_decay_ratio: 0.5,
            period_correlation: 0.99,
            max_period_lag: 100,
            lyapunov: 0.01,
            min_points: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AttractorClassification {
    pub verdict: Verdict,
    /// Mean of the tail window.
    pub center: f64,
    /// Largest deviation from `center` inside the tail.
    pub tail_amplitude: f64,
    /// Sign changes of `value - center` inside the tail.
    pub sign_changes: usize,
    pub lyapunov: Option<f64>,
    /// Period in time units, present for limit cycles.
    pub dominant_period: Option<f64>,
    /// Sign changes of the increments over the whole series.
    pub direction_reversals: usize,
    pub approach: Approach,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelClassification {
    pub group: usize,
    pub alternative: usize,
    pub classification: AttractorClassification,
}

/// Peak `|deviation|` and its index for each run of same-signed deviations.
fn envelope(dev: &[f64], floor: f64) -> Vec<(usize, f64)> {
    let mut peaks: Vec<(usize, f64)> = Vec::new();
    let mut sign = 0.0;
    for (i, &d) in dev.iter().enumerate() {
        if d.abs() <= floor {
            continue;
        }
        if d.signum() != sign {
            sign = d.signum();
            peaks.push((i, d.abs()));
        } else if let Some(last) = peaks.last_mut() {
            if d.abs() > last.1 {
                *last = (i, d.abs());
            }
        }
    }
    peaks
}

/// Least-squares slope of `ln(peak)` against sample index.
fn log_envelope_slope(peaks: &[(usize, f64)]) -> f64 {
    let n = peaks.len() as f64;
    let xm = peaks.iter().map(|p| p.0 as f64).sum::<f64>() / n;
    let ym = peaks.iter().map(|p| p.1.ln()).sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for &(x, y) in peaks {
        let dx = x as f64 - xm;
        sxy += dx * (y.ln() - ym);
        sxx += dx * dx;
    }
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}

/// Sign changes between successive increments larger than `floor`.
pub fn direction_reversals(values: &[f64], floor: f64) -> usize {
    let mut last = 0.0;
    let mut count = 0;
    for w in values.windows(2) {
        let d = w[1] - w[0];
        if d.abs() <= floor {
            continue;
        }
        if last != 0.0 && d.signum() != last {
            count += 1;
        }
        last = d.signum();
    }
    count
}

/// Lag (in samples) and value of the highest autocorrelation.
fn dominant_lag(dev: &[f64], max_lag: usize) -> Option<(usize, f64)> {
    let n = dev.len();
    let var = dev.iter().map(|d| d * d).sum::<f64>() / n as f64;
    if var == 0.0 {
        return None;
    }
    let mut best: Option<(usize, f64)> = None;
    for lag in 1..=max_lag.min(n / 4) {
        let c = dev[..n - lag]
            .iter()
            .zip(&dev[lag..])
            .map(|(a, b)| a * b)
            .sum::<f64>()
            / (n - lag) as f64;
        let r = c / var;
        if best.is_none_or(|(_, b)| r > b) {
            best = Some((lag, r));
        }
    }
    best
}

/// Classifies one series sampled at `times`.
pub fn classify_series(
    times: &[f64],
    values: &[f64],
    tol: &ClassifierTolerances,
    lyapunov: Option<f64>,
) -> Result<AttractorClassification> {
    if values.len() < tol.min_points.max(2) {
        return Err(Error::TrajectoryTooShort {
            len: values.len(),
            min: tol.min_points.max(2),
        });
    }
    if times.len() != values.len() {
        return Err(Error::GridMismatch(format!(
            "{} times for {} values",
            times.len(),
            values.len()
        )));
    }
    if !(tol.tail_fraction > 0.0 && tol.tail_fraction < 1.0) {
        return Err(Error::InvalidConfig(format!("tail_fraction = {} outside (0, 1)", tol.tail_fraction)));
    }
    let n = values.len();
    let tail_len = ((n as f64 * tol.tail_fraction).ceil() as usize).clamp(2, n);
    let tail = &values[n - tail_len..];
    let tail_times = &times[n - tail_len..];

    let center = tail.iter().sum::<f64>() / tail_len as f64;
    let dev: Vec<f64> = tail.iter().map(|v| v - center).collect();
    let tail_amplitude = dev.iter().fold(0.0f64, |m, d| m.max(d.abs()));
    let peaks = envelope(&dev, tol.noise_floor);
    let sign_changes = peaks.len().saturating_sub(1);

    let direction_reversals = direction_reversals(values, tol.noise_floor);
    let approach = if direction_reversals > tol.max_monotone_reversals {
        Approach::Oscillatory
    } else {
        Approach::Monotone
    };
    let mut out = AttractorClassification {
        verdict: Verdict::NonConvergent,
        center,
        tail_amplitude,
        sign_changes,
        lyapunov,
        dominant_period: None,
        direction_reversals,
        approach,
    };

    if sign_changes <= tol.max_node_sign_changes {
        if tail_amplitude < tol.convergence {
            out.verdict = Verdict::StableNode;
        }
        return Ok(out);
    }

    let decay = (log_envelope_slope(&peaks) * tail_len as f64).exp();
    if decay < tol.focus_decay_ratio {
        out.verdict = Verdict::StableFocus;
        return Ok(out);
    }

    if let Some((lag, r)) = dominant_lag(&dev, tol.max_period_lag) {
        if r >= tol.period_correlation {
            let spacing = (tail_times[tail_len - 1] - tail_times[0]) / (tail_len - 1) as f64;
            out.verdict = Verdict::LimitCycle;
            out.dominant_period = Some(lag as f64 * spacing);
            return Ok(out);
        }
    }

    if lyapunov.is_some_and(|l| l > tol.lyapunov) {
        out.verdict = Verdict::Chaotic;
    }
    Ok(out)
}

/// Classifies every `(group, alternative)` channel of a trajectory. The
/// Lyapunov estimate, when given, is attached to every channel.
pub fn classify(
    trajectory: &Trajectory,
    tol: &ClassifierTolerances,
    lyapunov: Option<f64>,
) -> Result<Vec<ChannelClassification>> {
    if trajectory.len() < tol.min_points {
        return Err(Error::TrajectoryTooShort {
            len: trajectory.len(),
            min: tol.min_points,
        });
    }
    let times = trajectory.times();
    let mut out = Vec::new();
    for group in 0..trajectory.n_groups() {
        for alternative in 0..trajectory.n_alternatives() {
            let values = trajectory.channel(group, alternative);
            out.push(ChannelClassification {
                group,
                alternative,
                classification: classify_series(&times, &values, tol, lyapunov)?,
            });
        }
    }
    Ok(out)
}

/// Looks up the classification of one channel.
pub fn channel(
    classes: &[ChannelClassification],
    group: usize,
    alternative: usize,
) -> Option<&AttractorClassification> {
    classes
        .iter()
        .find(|c| c.group == group && c.alternative == alternative)
        .map(|c| &c.classification)
}

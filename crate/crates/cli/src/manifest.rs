//! Experiment manifests: a scenario plus run settings and expectations, in
//! the same flat `key = value` format as scenario files.
//!
//! | key | meaning |
//! |-----|---------|
//! | `name` | label used in reports and output file names |
//! | `engines` | `dis`, `con`, `both` or a comma list (default `both`) |
//! | `dis.horizon`, `dis.record_stride` | discrete run (default 2000 steps, stride 1) |
//! | `con.horizon`, `con.step`, `con.record_stride` | continuous run (default 200, `tau`, 1) |
//! | `lyapunov.perturbation` | initial separation for the exponent estimate |
//! | `expect.tolerance` | absolute tolerance on limits (default 0.005) |
//! | `expect.center_tolerance` | tolerance on oscillation centers (default 0.01) |
//! | `expect.<e>.limit[j][n]` | final `p_j(A_n)` of engine `e` |
//! | `expect.<e>.center[j][n]` | tail mean of `p_j(A_n)` |
//! | `expect.<e>.verdict[j][n]` | verdict name, `a\|b`, `oscillatory` or `sustained` |
//! | `expect.<e>.approach[j][n]` | `monotone` or `oscillatory` path to the limit |
//! | `expect.dis.lyapunov` | `positive` or `negative` |
//!
//! Every scenario key is accepted as well, so a bare scenario file is a
//! valid manifest.

use std::fmt;
use std::path::Path;

use affdyn_core::analysis::lyapunov::DEFAULT_PERTURBATION;
use affdyn_core::kv::KvEntry;
use affdyn_core::{Approach, ContinuousRunConfig, DiscreteRunConfig, Engine, KvDocument, ParseError, Scenario, Verdict};

use crate::error::{CliError, Result};

pub const DEFAULT_TOLERANCE: f64 = 0.005;
pub const DEFAULT_CENTER_TOLERANCE: f64 = 0.01;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VerdictPattern {
    AnyOf(Vec<Verdict>),
    /// Focus, limit cycle or chaos.
    Oscillatory,
    /// Limit cycle or chaos.
    Sustained,
}

impl VerdictPattern {
    pub fn matches(&self, v: Verdict) -> bool {
        match self {
            VerdictPattern::AnyOf(vs) => vs.contains(&v),
            VerdictPattern::Oscillatory => v.is_oscillatory(),
            VerdictPattern::Sustained => v.is_sustained(),
        }
    }
}

impl fmt::Display for VerdictPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VerdictPattern::AnyOf(vs) => {
                let names: Vec<_> = vs.iter().map(|v| v.as_str()).collect();
                f.write_str(&names.join("|"))
            }
            VerdictPattern::Oscillatory => f.write_str("oscillatory"),
            VerdictPattern::Sustained => f.write_str("sustained"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LyapunovSign {
    Positive,
    Negative,
}

/// Expectation on one `(group, alternative)` channel; indices are 0-based.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelExpectation<T> {
    pub group: usize,
    pub alternative: usize,
    pub value: T,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct EngineExpectations {
    pub limits: Vec<ChannelExpectation<f64>>,
    pub centers: Vec<ChannelExpectation<f64>>,
    pub verdicts: Vec<ChannelExpectation<VerdictPattern>>,
    pub approaches: Vec<ChannelExpectation<Approach>>,
}

impl EngineExpectations {
    pub fn is_empty(&self) -> bool {
        self.limits.is_empty() && self.centers.is_empty() && self.verdicts.is_empty() && self.approaches.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Expectations {
    pub tolerance: f64,
    pub center_tolerance: f64,
    pub discrete: EngineExpectations,
    pub continuous: EngineExpectations,
    pub lyapunov: Option<LyapunovSign>,
}

impl Default for Expectations {
    fn default() -> Self {
        Self {
            tolerance: DEFAULT_TOLERANCE,
            center_tolerance: DEFAULT_CENTER_TOLERANCE,
            discrete: EngineExpectations::default(),
            continuous: EngineExpectations::default(),
            lyapunov: None,
        }
    }
}

impl Expectations {
    pub fn for_engine(&self, engine: Engine) -> &EngineExpectations {
        match engine {
            Engine::Discrete => &self.discrete,
            Engine::Continuous => &self.continuous,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentManifest {
    pub name: String,
    pub scenario: Scenario,
    /// Engines to run, discrete first.
    pub engines: Vec<Engine>,
    pub discrete: DiscreteRunConfig,
    pub continuous: ContinuousRunConfig,
    pub perturbation: f64,
    pub expected: Expectations,
}

fn parse_engines(e: &KvEntry) -> std::result::Result<Vec<Engine>, ParseError> {
    let mut out = Vec::new();
    for part in e.value.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        match part {
            "dis" | "discrete" => out.push(Engine::Discrete),
            "con" | "continuous" => out.push(Engine::Continuous),
            "both" => out.extend([Engine::Discrete, Engine::Continuous]),
            other => return Err(e.error(format!("unknown engine `{other}`"))),
        }
    }
    out.sort_by_key(|e| *e == Engine::Continuous);
    out.dedup();
    Ok(out)
}

fn parse_pattern(e: &KvEntry) -> std::result::Result<VerdictPattern, ParseError> {
    match e.value.as_str() {
        "oscillatory" => Ok(VerdictPattern::Oscillatory),
        "sustained" => Ok(VerdictPattern::Sustained),
        v => v
            .split('|')
            .map(|s| s.trim().parse::<Verdict>().map_err(|m| e.error(m)))
            .collect::<std::result::Result<Vec<_>, _>>()
            .map(VerdictPattern::AnyOf),
    }
}

fn channel_index(
    e: &KvEntry,
    idx: &[usize],
    s: &Scenario,
) -> std::result::Result<(usize, usize), ParseError> {
    match *idx {
        [j, n] if (1..=s.n_groups).contains(&j) && (1..=s.n_alternatives).contains(&n) => Ok((j - 1, n - 1)),
        [_, _] => Err(e.error(format!(
            "index out of range for {} groups and {} alternatives",
            s.n_groups, s.n_alternatives
        ))),
        _ => Err(e.error("expected two indices [group][alternative]")),
    }
}

fn probabilities(
    doc: &mut KvDocument,
    key: &str,
    s: &Scenario,
) -> std::result::Result<Vec<ChannelExpectation<f64>>, ParseError> {
    let mut out = Vec::new();
    for (idx, e) in doc.take_indexed(key) {
        let (group, alternative) = channel_index(&e, &idx, s)?;
        let value = e.parse_f64()?;
        if !(0.0..=1.0).contains(&value) {
            return Err(e.error("expected probability must lie in [0, 1]"));
        }
        out.push(ChannelExpectation { group, alternative, value });
    }
    Ok(out)
}

fn engine_expectations(
    doc: &mut KvDocument,
    prefix: &str,
    s: &Scenario,
) -> std::result::Result<EngineExpectations, ParseError> {
    let limits = probabilities(doc, &format!("{prefix}.limit"), s)?;
    let centers = probabilities(doc, &format!("{prefix}.center"), s)?;
    let mut verdicts = Vec::new();
    for (idx, e) in doc.take_indexed(&format!("{prefix}.verdict")) {
        let (group, alternative) = channel_index(&e, &idx, s)?;
        verdicts.push(ChannelExpectation { group, alternative, value: parse_pattern(&e)? });
    }
    let mut approaches = Vec::new();
    for (idx, e) in doc.take_indexed(&format!("{prefix}.approach")) {
        let (group, alternative) = channel_index(&e, &idx, s)?;
        let value = e.value.parse::<Approach>().map_err(|m| e.error(m))?;
        approaches.push(ChannelExpectation { group, alternative, value });
    }
    Ok(EngineExpectations { limits, centers, verdicts, approaches })
}

fn positive_tolerance(e: KvEntry) -> std::result::Result<f64, ParseError> {
    let v = e.parse_f64()?;
    if v <= 0.0 {
        return Err(e.error("tolerance must be positive"));
    }
    Ok(v)
}

fn parse_document(doc: &mut KvDocument, default_name: &str) -> std::result::Result<ExperimentManifest, ParseError> {
    let name = doc.take("name").map_or_else(|| default_name.to_owned(), |e| e.value);
    let engines = match doc.take("engines") {
        Some(e) => parse_engines(&e)?,
        None => vec![Engine::Discrete, Engine::Continuous],
    };
    let scenario = Scenario::from_document(doc)?;

    let mut discrete = DiscreteRunConfig::default();
    if let Some(e) = doc.take("dis.horizon") {
        discrete.horizon = e.parse_usize()?;
    }
    if let Some(e) = doc.take("dis.record_stride") {
        discrete.record_stride = e.parse_usize()?;
    }
    let mut continuous = ContinuousRunConfig::for_scenario(&scenario, ContinuousRunConfig::default().horizon);
    if let Some(e) = doc.take("con.horizon") {
        continuous.horizon = e.parse_f64()?;
    }
    if let Some(e) = doc.take("con.step") {
        continuous.step = e.parse_f64()?;
    }
    if let Some(e) = doc.take("con.record_stride") {
        continuous.record_stride = e.parse_usize()?;
    }
    let perturbation = match doc.take("lyapunov.perturbation") {
        Some(e) => e.parse_f64()?,
        None => DEFAULT_PERTURBATION,
    };

    let mut expected = Expectations::default();
    if let Some(e) = doc.take("expect.tolerance") {
        expected.tolerance = positive_tolerance(e)?;
    }
    if let Some(e) = doc.take("expect.center_tolerance") {
        expected.center_tolerance = positive_tolerance(e)?;
    }
    expected.discrete = engine_expectations(doc, "expect.dis", &scenario)?;
    expected.continuous = engine_expectations(doc, "expect.con", &scenario)?;
    if let Some(e) = doc.take("expect.dis.lyapunov") {
        expected.lyapunov = Some(match e.value.as_str() {
            "positive" => LyapunovSign::Positive,
            "negative" => LyapunovSign::Negative,
            other => return Err(e.error(format!("expected `positive` or `negative`, found `{other}`"))),
        });
    }
    doc.finish()?;

    for (engine, exp) in [
        (Engine::Discrete, !expected.discrete.is_empty() || expected.lyapunov.is_some()),
        (Engine::Continuous, !expected.continuous.is_empty()),
    ] {
        if exp && !engines.is_empty() && !engines.contains(&engine) {
            return Err(ParseError::new(
                None,
                Some("engines"),
                format!("expectations given for the {engine} engine, which is not run"),
            ));
        }
    }
    Ok(ExperimentManifest {
        name,
        scenario,
        engines,
        discrete,
        continuous,
        perturbation,
        expected,
    })
}

impl ExperimentManifest {
    /// Parses manifest text. `origin` names the source in error messages and
    /// doubles as the default experiment name.
    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        Self::parse_named(text, origin, origin)
    }

    /// Like [`ExperimentManifest::parse`] with a separate fallback for a
    /// missing `name` key.
    pub fn parse_named(text: &str, origin: &str, default_name: &str) -> Result<Self> {
        let wrap = |source| CliError::Manifest { origin: origin.to_owned(), source };
        let mut doc = KvDocument::parse(text).map_err(wrap)?;
        let manifest = parse_document(&mut doc, default_name).map_err(wrap)?;
        if manifest.engines.is_empty() {
            return Err(CliError::NothingToRun { origin: origin.to_owned() });
        }
        let scenario_error = |source| CliError::Scenario { origin: origin.to_owned(), source };
        manifest.scenario.ensure_valid().map_err(scenario_error)?;
        manifest.discrete.validate().map_err(scenario_error)?;
        manifest.continuous.validate().map_err(scenario_error)?;
        if !(manifest.perturbation > 0.0 && manifest.perturbation <= 1e-6) {
            return Err(wrap(ParseError::new(
                None,
                Some("lyapunov.perturbation"),
                "must lie in (0, 1e-6]",
            )));
        }
        Ok(manifest)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Read {
            path: path.to_owned(),
            source,
        })?;
        let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("experiment");
        Self::parse_named(&text, &path.display().to_string(), stem)
    }

    pub fn runs(&self, engine: Engine) -> bool {
        self.engines.contains(&engine)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SCENARIO: &str = "\
n_groups = 2
n_alternatives = 2
f[1][1] = 0.4
f[1][2] = 0.6
f[2][1] = 0.1
f[2][2] = 0.9
q0[1][1] = 0.59
q0[1][2] = -0.59
q0[2][1] = 0.6
q0[2][2] = -0.6
eps[1] = 0
eps[2] = 0
memory[1] = long
memory[2] = short
";

    #[test]
    fn bare_scenario_is_a_manifest() {
        let m = ExperimentManifest::parse(SCENARIO, "bare").unwrap();
        assert_eq!(m.name, "bare");
        assert_eq!(m.engines, vec![Engine::Discrete, Engine::Continuous]);
        assert_eq!(m.discrete.horizon, 2000);
        assert_eq!(m.continuous.step, 0.1);
        assert_eq!(m.expected, Expectations::default());
    }

    #[test]
    fn expectations() {
        let text = format!(
            "{SCENARIO}name = x\nengines = con, dis\nexpect.dis.limit[2][1] = 0.636\n\
             expect.con.verdict[1][1] = stable_node|stable_focus\nexpect.dis.verdict[2][1] = sustained\n\
             expect.dis.lyapunov = negative\nexpect.tolerance = 0.001\nexpect.con.approach[2][1] = monotone\n"
        );
        let m = ExperimentManifest::parse(&text, "t").unwrap();
        assert_eq!(m.name, "x");
        assert_eq!(m.engines, vec![Engine::Discrete, Engine::Continuous]);
        assert_eq!(m.expected.tolerance, 0.001);
        assert_eq!(m.expected.discrete.limits[0], ChannelExpectation { group: 1, alternative: 0, value: 0.636 });
        assert_eq!(
            m.expected.continuous.verdicts[0].value,
            VerdictPattern::AnyOf(vec![Verdict::StableNode, Verdict::StableFocus])
        );
        assert!(m.expected.discrete.verdicts[0].value.matches(Verdict::Chaotic));
        assert_eq!(m.expected.lyapunov, Some(LyapunovSign::Negative));
        assert_eq!(m.expected.continuous.approaches[0].value, Approach::Monotone);
    }

    #[test]
    fn empty_engine_list_is_rejected() {
        let err = ExperimentManifest::parse(&format!("{SCENARIO}engines =\n"), "t").unwrap_err();
        assert!(matches!(err, CliError::NothingToRun { .. }));
    }

    #[test]
    fn schema_errors_carry_line_and_key() {
        let err = ExperimentManifest::parse(&format!("{SCENARIO}colour = red\n"), "t").unwrap_err();
        match err {
            CliError::Manifest { source, .. } => {
                assert_eq!(source.line, Some(15));
                assert_eq!(source.key.as_deref(), Some("colour"));
            }
            other => panic!("{other:?}"),
        }
        let err = ExperimentManifest::parse(&format!("{SCENARIO}expect.dis.limit[3][1] = 0.5\n"), "t").unwrap_err();
        assert!(matches!(err, CliError::Manifest { .. }));
        let err = ExperimentManifest::parse(&format!("{SCENARIO}expect.dis.limit[1][1] = 1.5\n"), "t").unwrap_err();
        assert!(matches!(err, CliError::Manifest { .. }));
        let err =
            ExperimentManifest::parse(&format!("{SCENARIO}engines = dis\nexpect.con.limit[1][1] = 0.5\n"), "t")
                .unwrap_err();
        assert!(matches!(err, CliError::Manifest { .. }));
    }

    #[test]
    fn invalid_scenario_is_distinct() {
        let text = SCENARIO.replace("eps[1] = 0", "eps[1] = 1.5");
        assert!(matches!(ExperimentManifest::parse(&text, "t"), Err(CliError::Scenario { .. })));
    }
}

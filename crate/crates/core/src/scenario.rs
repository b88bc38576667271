//! Problem data: groups, alternatives, utility and attraction factors,
//! herding and memory settings.

use std::fmt;
use std::hash::{Hash, Hasher};

use crate::error::{Error, Result};
use crate::kv::{KvDocument, ParseError};

/// Absolute tolerance for the normalization checks on scenario rows.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-9;

/// Magnitude of the non-informative prior estimate for an attraction factor.
pub const NON_INFORMATIVE_ATTRACTION: f64 = 0.25;

/// Coupling used by the two-group setups when none is given.
pub const DEFAULT_COUPLING: f64 = 1.0;

/// Decision delay used by the continuous engine when none is given.
pub const DEFAULT_TAU: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MemoryKind {
    /// Keeps every past information gain.
    LongTerm,
    /// Keeps only the current information gain.
    ShortTerm,
}

impl MemoryKind {
    pub fn as_str(self) -> &'static str {
        match self {
            MemoryKind::LongTerm => "long",
            MemoryKind::ShortTerm => "short",
        }
    }
}

impl std::str::FromStr for MemoryKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "long" => Ok(MemoryKind::LongTerm),
            "short" => Ok(MemoryKind::ShortTerm),
            other => Err(format!("expected `long` or `short`, found `{other}`")),
        }
    }
}

/// Full problem definition for `n_groups` agent groups choosing among
/// `n_alternatives` alternatives.
///
/// Fields are public so that candidate data can be assembled freely and then
/// checked with [`validate_scenario`]; the engines validate before running.
/// Equality and hashing compare floats bit for bit.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub n_groups: usize,
    pub n_alternatives: usize,
    /// `utility_factors[j][n]`: rational choice probability of alternative
    /// `n` for group `j`, constant in time.
    pub utility_factors: Vec<Vec<f64>>,
    /// `initial_attractions[j][n]`: emotional contribution at `t = 0`.
    pub initial_attractions: Vec<Vec<f64>>,
    /// Herding weight of each group.
    pub herding: Vec<f64>,
    pub memory_kinds: Vec<MemoryKind>,
    /// Interaction transfer amplitude `J`.
    pub coupling: f64,
    /// Decision delay; gates the continuous short-term memory.
    pub tau: f64,
}

impl Scenario {
    /// Two groups choosing between two alternatives. Group 1 has long-term
    /// memory and group 2 short-term memory; `utility`, `attraction` and
    /// `herding` give the values for the first alternative of each group, the
    /// second alternative being the complement.
    pub fn binary(utility: [f64; 2], attraction: [f64; 2], herding: [f64; 2]) -> Self {
        Self {
            n_groups: 2,
            n_alternatives: 2,
            utility_factors: utility.iter().map(|&f| vec![f, 1.0 - f]).collect(),
            initial_attractions: attraction.iter().map(|&q| vec![q, -q]).collect(),
            herding: herding.to_vec(),
            memory_kinds: vec![MemoryKind::LongTerm, MemoryKind::ShortTerm],
            coupling: DEFAULT_COUPLING,
            tau: DEFAULT_TAU,
        }
    }

    /// Like [`Scenario::binary`] with attraction magnitudes fixed at the
    /// non-informative estimate: `+0.25` on the first alternative where
    /// `attracted[j]` is set, `-0.25` otherwise.
    pub fn binary_with_default_attractions(
        utility: [f64; 2],
        attracted: [bool; 2],
        herding: [f64; 2],
    ) -> Self {
        let q = attracted.map(|a| {
            if a {
                NON_INFORMATIVE_ATTRACTION
            } else {
                -NON_INFORMATIVE_ATTRACTION
            }
        });
        Self::binary(utility, q, herding)
    }

    pub fn with_coupling(mut self, coupling: f64) -> Self {
        self.coupling = coupling;
        self
    }

    pub fn with_tau(mut self, tau: f64) -> Self {
        self.tau = tau;
        self
    }

    /// True when every group chooses between exactly two alternatives, so
    /// the second is the complement of the first.
    pub fn is_binary(&self) -> bool {
        self.n_alternatives == 2
    }

    pub fn validate(&self) -> ValidationReport {
        validate_scenario(self)
    }

    pub fn ensure_valid(&self) -> Result<()> {
        let report = self.validate();
        if report.is_valid() {
            Ok(())
        } else {
            Err(Error::InvalidScenario(report))
        }
    }

    /// Parses the flat scenario format. Unknown keys are rejected.
    pub fn parse(text: &str) -> std::result::Result<Self, ParseError> {
        let mut doc = KvDocument::parse(text)?;
        let s = Self::from_document(&mut doc)?;
        doc.finish()?;
        Ok(s)
    }

    /// Consumes the scenario keys of `doc`, leaving any others untouched.
    pub fn from_document(doc: &mut KvDocument) -> std::result::Result<Self, ParseError> {
        let n_groups = doc.require("n_groups")?.parse_usize()?;
        let n_alternatives = doc.require("n_alternatives")?.parse_usize()?;
        if n_groups == 0 || n_alternatives == 0 {
            return Err(ParseError::new(
                None,
                None,
                "n_groups and n_alternatives must be positive",
            ));
        }
        let utility_factors = read_matrix(doc, "f", n_groups, n_alternatives)?;
        let initial_attractions = read_matrix(doc, "q0", n_groups, n_alternatives)?;
        let herding = read_vector(doc, "eps", n_groups, |e| e.parse_f64())?;
        let memory_kinds = read_vector(doc, "memory", n_groups, |e| {
            e.value.parse::<MemoryKind>().map_err(|m| e.error(m))
        })?;
        let coupling = match doc.take("J") {
            Some(e) => e.parse_f64()?,
            None => DEFAULT_COUPLING,
        };
        let tau = match doc.take("tau") {
            Some(e) => e.parse_f64()?,
            None => DEFAULT_TAU,
        };
        Ok(Self {
            n_groups,
            n_alternatives,
            utility_factors,
            initial_attractions,
            herding,
            memory_kinds,
            coupling,
            tau,
        })
    }

    /// Serializes to the flat scenario format; `Scenario::parse` reads it back
    /// exactly.
    pub fn to_file_string(&self) -> String {
        use std::fmt::Write;
        let mut out = String::new();
        let _ = writeln!(out, "n_groups = {}", self.n_groups);
        let _ = writeln!(out, "n_alternatives = {}", self.n_alternatives);
        for (name, m) in [("f", &self.utility_factors), ("q0", &self.initial_attractions)] {
            for (j, row) in m.iter().enumerate() {
                for (n, v) in row.iter().enumerate() {
                    let _ = writeln!(out, "{name}[{}][{}] = {v:?}", j + 1, n + 1);
                }
            }
        }
        for (j, e) in self.herding.iter().enumerate() {
            let _ = writeln!(out, "eps[{}] = {e:?}", j + 1);
        }
        for (j, m) in self.memory_kinds.iter().enumerate() {
            let _ = writeln!(out, "memory[{}] = {}", j + 1, m.as_str());
        }
        let _ = writeln!(out, "J = {:?}", self.coupling);
        let _ = writeln!(out, "tau = {:?}", self.tau);
        out
    }
}

fn read_matrix(
    doc: &mut KvDocument,
    name: &str,
    rows: usize,
    cols: usize,
) -> std::result::Result<Vec<Vec<f64>>, ParseError> {
    let mut m = vec![vec![None; cols]; rows];
    for (idx, entry) in doc.take_indexed(name) {
        let [j, n] = idx[..] else {
            return Err(entry.error("expected two indices, `name[group][alternative]`"));
        };
        if j == 0 || j > rows || n == 0 || n > cols {
            return Err(entry.error(format!("index out of range (groups 1..={rows}, alternatives 1..={cols})")));
        }
        m[j - 1][n - 1] = Some(entry.parse_f64()?);
    }
    m.into_iter()
        .enumerate()
        .map(|(j, row)| {
            row.into_iter()
                .enumerate()
                .map(|(n, v)| {
                    v.ok_or_else(|| {
                        ParseError::new(None, Some(&format!("{name}[{}][{}]", j + 1, n + 1)), "missing required key")
                    })
                })
                .collect()
        })
        .collect()
}

fn read_vector<T: Clone>(
    doc: &mut KvDocument,
    name: &str,
    len: usize,
    parse: impl Fn(&crate::kv::KvEntry) -> std::result::Result<T, ParseError>,
) -> std::result::Result<Vec<T>, ParseError> {
    let mut v: Vec<Option<T>> = vec![None; len];
    for (idx, entry) in doc.take_indexed(name) {
        let [j] = idx[..] else {
            return Err(entry.error("expected one index, `name[group]`"));
        };
        if j == 0 || j > len {
            return Err(entry.error(format!("index out of range (groups 1..={len})")));
        }
        v[j - 1] = Some(parse(&entry)?);
    }
    v.into_iter()
        .enumerate()
        .map(|(j, x)| x.ok_or_else(|| ParseError::new(None, Some(&format!("{name}[{}]", j + 1)), "missing required key")))
        .collect()
}

impl PartialEq for Scenario {
    fn eq(&self, other: &Self) -> bool {
        fn bits(m: &[Vec<f64>]) -> impl Iterator<Item = u64> + '_ {
            m.iter().flat_map(|r| r.iter().map(|v| v.to_bits()))
        }
        self.n_groups == other.n_groups
            && self.n_alternatives == other.n_alternatives
            && self.utility_factors.len() == other.utility_factors.len()
            && self.initial_attractions.len() == other.initial_attractions.len()
            && self.utility_factors.iter().zip(&other.utility_factors).all(|(a, b)| a.len() == b.len())
            && self.initial_attractions.iter().zip(&other.initial_attractions).all(|(a, b)| a.len() == b.len())
            && bits(&self.utility_factors).eq(bits(&other.utility_factors))
            && bits(&self.initial_attractions).eq(bits(&other.initial_attractions))
            && self.herding.iter().map(|v| v.to_bits()).eq(other.herding.iter().map(|v| v.to_bits()))
            && self.memory_kinds == other.memory_kinds
            && self.coupling.to_bits() == other.coupling.to_bits()
            && self.tau.to_bits() == other.tau.to_bits()
    }
}

impl Eq for Scenario {}

impl Hash for Scenario {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.n_groups.hash(state);
        self.n_alternatives.hash(state);
        for m in [&self.utility_factors, &self.initial_attractions] {
            m.len().hash(state);
            for row in m {
                row.len().hash(state);
                row.iter().for_each(|v| v.to_bits().hash(state));
            }
        }
        self.herding.iter().for_each(|v| v.to_bits().hash(state));
        self.memory_kinds.hash(state);
        self.coupling.to_bits().hash(state);
        self.tau.to_bits().hash(state);
    }
}

/// Choice probabilities of every group plus the running long-term memory.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    /// `probabilities[j][n]`: probability that a member of group `j`
    /// chooses alternative `n`.
    pub probabilities: Vec<Vec<f64>>,
    /// Accumulated memory of long-term groups; zero for short-term groups.
    pub long_memory_acc: Vec<f64>,
    /// Time in units of the decision delay.
    pub time: f64,
}

impl StateVector {
    pub fn n_groups(&self) -> usize {
        self.probabilities.len()
    }

    pub fn row(&self, group: usize) -> &[f64] {
        &self.probabilities[group]
    }

    pub(crate) fn is_finite(&self) -> bool {
        self.probabilities.iter().flatten().all(|v| v.is_finite())
            && self.long_memory_acc.iter().all(|v| v.is_finite() || *v == f64::INFINITY)
    }
}

/// Inputs to the softmax (Luce rule) form of the utility factors.
#[derive(Debug, Clone, PartialEq)]
pub struct UtilitySpec {
    pub prior: Vec<f64>,
    pub utilities: Vec<f64>,
    /// Belief parameter; zero returns the prior unchanged.
    pub belief: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    TooFewGroups(usize),
    TooFewAlternatives(usize),
    Shape {
        field: &'static str,
        expected: usize,
        found: usize,
    },
    NonFinite {
        field: &'static str,
        group: usize,
    },
    UtilityOutOfRange {
        group: usize,
        alternative: usize,
        value: f64,
    },
    UtilityNotNormalized {
        group: usize,
        sum: f64,
    },
    AttractionOutOfBounds {
        group: usize,
        alternative: usize,
        value: f64,
        lower: f64,
        upper: f64,
    },
    AttractionNotZeroSum {
        group: usize,
        sum: f64,
    },
    HerdingOutOfRange {
        group: usize,
        value: f64,
    },
    InvalidCoupling(f64),
    InvalidTau(f64),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Violation::*;
        match *self {
            TooFewGroups(n) => write!(f, "n_groups = {n}, at least 2 groups are required"),
            TooFewAlternatives(n) => write!(f, "n_alternatives = {n}, at least 2 alternatives are required"),
            Shape { field, expected, found } => {
                write!(f, "{field}: expected {expected} entries, found {found}")
            }
            NonFinite { field, group } => write!(f, "{field}: group {} holds a non-finite value", group + 1),
            UtilityOutOfRange { group, alternative, value } => write!(
                f,
                "f[{}][{}] = {value} outside [0, 1]",
                group + 1,
                alternative + 1
            ),
            UtilityNotNormalized { group, sum } => {
                write!(f, "utility factors of group {} sum to {sum}, expected 1", group + 1)
            }
            AttractionOutOfBounds { group, alternative, value, lower, upper } => write!(
                f,
                "q0[{}][{}] = {value} outside [{lower}, {upper}]",
                group + 1,
                alternative + 1
            ),
            AttractionNotZeroSum { group, sum } => {
                write!(f, "attraction factors of group {} sum to {sum}, expected 0", group + 1)
            }
            HerdingOutOfRange { group, value } => {
                write!(f, "eps[{}] = {value} outside [0, 1]", group + 1)
            }
            InvalidCoupling(v) => write!(f, "J = {v}, must be finite and non-negative"),
            InvalidTau(v) => write!(f, "tau = {v}, must be finite and positive"),
        }
    }
}

/// Every invariant a candidate scenario breaks; empty when valid.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return f.write_str("valid");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "  - {v}")?;
        }
        Ok(())
    }
}

pub fn validate_scenario(s: &Scenario) -> ValidationReport {
    let tol = NORMALIZATION_TOLERANCE;
    let mut out = Vec::new();
    if s.n_groups < 2 {
        out.push(Violation::TooFewGroups(s.n_groups));
    }
    if s.n_alternatives < 2 {
        out.push(Violation::TooFewAlternatives(s.n_alternatives));
    }

    let mut shape_ok = true;
    let mut check_len = |field, found: usize, expected: usize, out: &mut Vec<Violation>| {
        if found != expected {
            shape_ok = false;
            out.push(Violation::Shape { field, expected, found });
        }
    };
    check_len("f", s.utility_factors.len(), s.n_groups, &mut out);
    check_len("q0", s.initial_attractions.len(), s.n_groups, &mut out);
    check_len("eps", s.herding.len(), s.n_groups, &mut out);
    check_len("memory", s.memory_kinds.len(), s.n_groups, &mut out);
    for row in &s.utility_factors {
        check_len("f row", row.len(), s.n_alternatives, &mut out);
    }
    for row in &s.initial_attractions {
        check_len("q0 row", row.len(), s.n_alternatives, &mut out);
    }

    if shape_ok {
        for j in 0..s.n_groups {
            let f = &s.utility_factors[j];
            let q = &s.initial_attractions[j];
            if f.iter().any(|v| !v.is_finite()) {
                out.push(Violation::NonFinite { field: "f", group: j });
                continue;
            }
            if q.iter().any(|v| !v.is_finite()) {
                out.push(Violation::NonFinite { field: "q0", group: j });
                continue;
            }
            for (n, &v) in f.iter().enumerate() {
                if !(-tol..=1.0 + tol).contains(&v) {
                    out.push(Violation::UtilityOutOfRange { group: j, alternative: n, value: v });
                }
            }
            let fsum: f64 = f.iter().sum();
            if (fsum - 1.0).abs() > tol {
                out.push(Violation::UtilityNotNormalized { group: j, sum: fsum });
            }
            for (n, (&qv, &fv)) in q.iter().zip(f).enumerate() {
                let (lower, upper) = (-fv, 1.0 - fv);
                if qv < lower - tol || qv > upper + tol {
                    out.push(Violation::AttractionOutOfBounds {
                        group: j,
                        alternative: n,
                        value: qv,
                        lower,
                        upper,
                    });
                }
            }
            let qsum: f64 = q.iter().sum();
            if qsum.abs() > tol {
                out.push(Violation::AttractionNotZeroSum { group: j, sum: qsum });
            }
        }
        for (j, &e) in s.herding.iter().enumerate() {
            if !(0.0..=1.0).contains(&e) {
                out.push(Violation::HerdingOutOfRange { group: j, value: e });
            }
        }
    }
    if !(s.coupling.is_finite() && s.coupling >= 0.0) {
        out.push(Violation::InvalidCoupling(s.coupling));
    }
    if !(s.tau.is_finite() && s.tau > 0.0) {
        out.push(Violation::InvalidTau(s.tau));
    }
    ValidationReport { violations: out }
}

/// Softmax of the utilities weighted by the prior:
/// `f(A_n) ∝ f0(A_n) exp(β U(A_n))`.
pub fn luce_utility_factors(u: &UtilitySpec) -> Result<Vec<f64>> {
    let bad = |m: &str| Err(Error::InvalidUtilitySpec(m.to_owned()));
    if u.prior.is_empty() || u.prior.len() != u.utilities.len() {
        return bad("prior and utilities must be non-empty and of equal length");
    }
    if u.prior.iter().any(|p| !p.is_finite() || *p < 0.0) {
        return bad("prior entries must be finite and non-negative");
    }
    if u.prior.iter().all(|&p| p == 0.0) {
        return bad("all prior entries are zero");
    }
    let psum: f64 = u.prior.iter().sum();
    if (psum - 1.0).abs() > NORMALIZATION_TOLERANCE {
        return bad(&format!("prior sums to {psum}, expected 1"));
    }
    if !u.belief.is_finite() || u.belief < 0.0 {
        return bad("belief must be finite and non-negative");
    }
    if u.utilities.iter().any(|v| !v.is_finite()) {
        return bad("utilities must be finite");
    }

    // Shift by the largest exponent among supported alternatives so the
    // biggest weight is exp(0) = 1.
    let exponents: Vec<Option<f64>> = u
        .prior
        .iter()
        .zip(&u.utilities)
        .map(|(&p, &v)| (p > 0.0).then_some(u.belief * v))
        .collect();
    let shift = exponents
        .iter()
        .flatten()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    let weights: Vec<f64> = exponents
        .iter()
        .zip(&u.prior)
        .map(|(e, &p)| e.map_or(0.0, |e| p * (e - shift).exp()))
        .collect();
    let total: f64 = weights.iter().sum();
    Ok(weights.into_iter().map(|w| w / total).collect())
}

/// The state at `t = 0`: `p = f + q0` and no memory yet.
pub fn initial_state(s: &Scenario) -> Result<StateVector> {
    s.ensure_valid()?;
    let probabilities = s
        .utility_factors
        .iter()
        .zip(&s.initial_attractions)
        .map(|(f, q)| f.iter().zip(q).map(|(a, b)| a + b).collect())
        .collect();
    Ok(StateVector {
        probabilities,
        long_memory_acc: vec![0.0; s.n_groups],
        time: 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig1() -> Scenario {
        Scenario::binary([0.4, 0.1], [0.59, 0.6], [0.0, 0.0])
    }

    #[test]
    fn figure_one_is_valid() {
        let s = Scenario::binary([0.4, 0.6], [0.59, -0.59], [0.0, 0.0]);
        assert!(validate_scenario(&s).is_valid());
        assert!(validate_scenario(&fig1()).is_valid());
    }

    #[test]
    fn attraction_above_bound_is_reported() {
        let mut s = fig1();
        s.utility_factors[0] = vec![0.5, 0.5];
        s.initial_attractions[0] = vec![0.7, -0.7];
        let report = validate_scenario(&s);
        assert!(report.violations.iter().any(|v| matches!(
            v,
            Violation::AttractionOutOfBounds { group: 0, alternative: 0, value, .. } if *value == 0.7
        )));
    }

    #[test]
    fn unnormalized_utility_is_reported() {
        let mut s = fig1();
        s.utility_factors[0] = vec![0.3, 0.5];
        s.initial_attractions[0] = vec![0.0, 0.0];
        let report = validate_scenario(&s);
        assert_eq!(
            report.violations,
            vec![Violation::UtilityNotNormalized { group: 0, sum: 0.8 }]
        );
    }

    #[test]
    fn structural_violations() {
        let mut s = fig1();
        s.herding = vec![1.5, -0.1];
        s.coupling = -1.0;
        s.tau = 0.0;
        let v = validate_scenario(&s).violations;
        assert!(v.contains(&Violation::HerdingOutOfRange { group: 0, value: 1.5 }));
        assert!(v.contains(&Violation::HerdingOutOfRange { group: 1, value: -0.1 }));
        assert!(v.contains(&Violation::InvalidCoupling(-1.0)));
        assert!(v.contains(&Violation::InvalidTau(0.0)));

        let mut s = fig1();
        s.n_groups = 1;
        s.utility_factors.pop();
        s.initial_attractions.pop();
        s.herding.pop();
        s.memory_kinds.pop();
        assert_eq!(validate_scenario(&s).violations, vec![Violation::TooFewGroups(1)]);

        let mut s = fig1();
        s.herding.pop();
        assert!(matches!(
            validate_scenario(&s).violations[..],
            [Violation::Shape { field: "eps", expected: 2, found: 1 }]
        ));
    }

    #[test]
    fn initial_state_examples() {
        let p = initial_state(&fig1()).unwrap();
        assert!((p.probabilities[0][0] - 0.99).abs() < 1e-12);
        assert!((p.probabilities[1][0] - 0.7).abs() < 1e-12);
        assert_eq!(p.long_memory_acc, vec![0.0, 0.0]);
        assert_eq!(p.time, 0.0);

        let s = Scenario::binary([0.3, 0.8], [0.0, 0.0], [0.2, 0.5]);
        let p = initial_state(&s).unwrap();
        assert_eq!(p.probabilities, s.utility_factors);

        let s = Scenario::binary([1.0, 0.2], [-0.9, 0.6], [1.0, 1.0]);
        let p = initial_state(&s).unwrap();
        assert!((p.probabilities[0][0] - 0.1).abs() < 1e-12);
    }

    #[test]
    fn initial_state_rejects_invalid() {
        let mut s = fig1();
        s.initial_attractions[0] = vec![0.7, -0.7];
        s.utility_factors[0] = vec![0.5, 0.5];
        assert!(matches!(initial_state(&s), Err(Error::InvalidScenario(_))));
    }

    #[test]
    fn luce_examples() {
        let u = UtilitySpec { prior: vec![0.25; 4], utilities: vec![3.0, -1.0, 7.5, 0.0], belief: 0.0 };
        assert_eq!(luce_utility_factors(&u).unwrap(), vec![0.25; 4]);

        let u = UtilitySpec { prior: vec![0.5, 0.5], utilities: vec![1.0, 0.0], belief: 1.0 };
        let f = luce_utility_factors(&u).unwrap();
        let e = std::f64::consts::E;
        assert!((f[0] - e / (e + 1.0)).abs() < 1e-15);
        assert!((f[1] - 1.0 / (e + 1.0)).abs() < 1e-15);
        assert!((f[0] - 0.7311).abs() < 5e-5);

        for c in [-40.0, 0.0, 3.3, 900.0] {
            let u = UtilitySpec { prior: vec![0.5, 0.5], utilities: vec![c, c], belief: 2.0 };
            assert_eq!(luce_utility_factors(&u).unwrap(), vec![0.5, 0.5]);
        }
    }

    #[test]
    fn luce_survives_huge_exponents() {
        let u = UtilitySpec { prior: vec![0.2, 0.8], utilities: vec![1e6, 0.0], belief: 10.0 };
        let f = luce_utility_factors(&u).unwrap();
        assert_eq!(f, vec![1.0, 0.0]);
    }

    #[test]
    fn luce_errors() {
        let u = UtilitySpec { prior: vec![0.0, 0.0], utilities: vec![1.0, 0.0], belief: 1.0 };
        assert!(luce_utility_factors(&u).is_err());
        let u = UtilitySpec { prior: vec![0.5], utilities: vec![1.0, 0.0], belief: 1.0 };
        assert!(luce_utility_factors(&u).is_err());
        let u = UtilitySpec { prior: vec![0.5, 0.5], utilities: vec![1.0, 0.0], belief: f64::NAN };
        assert!(luce_utility_factors(&u).is_err());
    }

    #[test]
    fn default_attraction_helper() {
        let s = Scenario::binary_with_default_attractions([0.5, 0.4], [true, false], [0.0, 0.3]);
        assert_eq!(s.initial_attractions, vec![vec![0.25, -0.25], vec![-0.25, 0.25]]);
        assert!(s.validate().is_valid());
    }

    #[test]
    fn scenario_file_round_trip_and_errors() {
        let s = fig1().with_tau(0.05);
        let text = s.to_file_string();
        assert_eq!(Scenario::parse(&text).unwrap(), s);

        let err = Scenario::parse(&format!("{text}bogus = 1\n")).unwrap_err();
        assert_eq!(err.key.as_deref(), Some("bogus"));

        let missing = text.replace("eps[2] = 0.0\n", "");
        let err = Scenario::parse(&missing).unwrap_err();
        assert_eq!(err.key.as_deref(), Some("eps[2]"));

        let err = Scenario::parse(&text.replace("memory[1] = long", "memory[1] = forever")).unwrap_err();
        assert!(err.line.is_some());

        let err = Scenario::parse(&format!("{text}f[3][1] = 0.5\n")).unwrap_err();
        assert!(err.message.contains("out of range"));
    }

    #[test]
    fn defaults_for_optional_keys() {
        let text = fig1().to_file_string();
        let trimmed: String = text
            .lines()
            .filter(|l| !l.starts_with("J ") && !l.starts_with("tau "))
            .map(|l| format!("{l}\n"))
            .collect();
        let s = Scenario::parse(&trimmed).unwrap();
        assert_eq!(s.coupling, DEFAULT_COUPLING);
        assert_eq!(s.tau, DEFAULT_TAU);
    }

    #[test]
    fn equality_is_bitwise() {
        let a = fig1();
        let mut b = fig1();
        assert_eq!(a, b);
        b.coupling = 1.0 + f64::EPSILON;
        assert_ne!(a, b);
    }
}

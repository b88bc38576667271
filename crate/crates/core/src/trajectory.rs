use std::fmt;

use crate::scenario::StateVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Engine {
    Discrete,
    Continuous,
}

impl Engine {
    /// Column prefix used in CSV headers and reports.
    pub fn short_name(self) -> &'static str {
        match self {
            Engine::Discrete => "dis",
            Engine::Continuous => "con",
        }
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Engine::Discrete => "discrete",
            Engine::Continuous => "continuous",
        })
    }
}

/// Recorded states of one run, in increasing time.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub engine: Engine,
    /// Time between consecutive engine steps (1 for the discrete map).
    pub step: f64,
    pub states: Vec<StateVector>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn n_groups(&self) -> usize {
        self.states.first().map_or(0, |s| s.probabilities.len())
    }

    pub fn n_alternatives(&self) -> usize {
        self.states
            .first()
            .and_then(|s| s.probabilities.first())
            .map_or(0, Vec::len)
    }

    pub fn times(&self) -> Vec<f64> {
        self.states.iter().map(|s| s.time).collect()
    }

    /// Time series of `p_group(alternative)`.
    pub fn channel(&self, group: usize, alternative: usize) -> Vec<f64> {
        self.states
            .iter()
            .map(|s| s.probabilities[group][alternative])
            .collect()
    }

    pub fn last(&self) -> Option<&StateVector> {
        self.states.last()
    }
}

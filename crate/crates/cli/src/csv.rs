//! CSV output of experiment results and CSV input for `classify`.
//!
//! Columns are `t` followed by `<engine>_p<group>_a<alternative>` for every
//! run. Binary scenarios only get alternative 1 (the other is its
//! complement). Rows follow the union of the recorded times; a run without
//! a sample at some time leaves its cells empty.

use std::path::Path;

use affdyn_core::Trajectory;

use crate::error::{CliError, Result};
use crate::experiment::ExperimentResult;

const TIME_MATCH: f64 = 1e-9;

/// `%.9g`-style formatting: nine significant digits, trailing zeros removed.
pub fn format_g9(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{x:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..9).contains(&exp) {
        let decimals = (8 - exp).max(0) as usize;
        let s = format!("{x:.decimals$}");
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_owned()
        } else {
            s
        }
    } else {
        let m = if mantissa.contains('.') {
            mantissa.trim_end_matches('0').trim_end_matches('.')
        } else {
            mantissa
        };
        format!("{m}e{}{:02}", if exp < 0 { '-' } else { '+' }, exp.abs())
    }
}

fn alternatives(t: &Trajectory, binary: bool) -> usize {
    if binary {
        1
    } else {
        t.n_alternatives()
    }
}

/// Renders `result` as CSV text.
pub fn emit_csv(result: &ExperimentResult) -> Result<String> {
    let runs: Vec<&Trajectory> = result.trajectories().collect();
    if runs.is_empty() || runs.iter().any(|t| t.is_empty()) {
        return Err(CliError::EmptyResult);
    }
    let binary = result.manifest.scenario.is_binary();

    let mut header = vec!["t".to_owned()];
    for t in &runs {
        for g in 0..t.n_groups() {
            for a in 0..alternatives(t, binary) {
                header.push(format!("{}_p{}_a{}", t.engine.short_name(), g + 1, a + 1));
            }
        }
    }

    let mut times: Vec<f64> = runs.iter().flat_map(|t| t.times()).collect();
    times.sort_by(f64::total_cmp);
    times.dedup_by(|a, b| (*a - *b).abs() <= TIME_MATCH);

    let mut cursors = vec![0usize; runs.len()];
    let mut out = header.join(",");
    out.push('\n');
    for &time in &times {
        let mut row = vec![format_g9(time)];
        for (r, t) in runs.iter().enumerate() {
            let idx = cursors[r];
            let hit = idx < t.len() && (t.states[idx].time - time).abs() <= TIME_MATCH;
            for g in 0..t.n_groups() {
                for a in 0..alternatives(t, binary) {
                    row.push(if hit { format_g9(t.states[idx].probabilities[g][a]) } else { String::new() });
                }
            }
            if hit {
                cursors[r] += 1;
            }
        }
        out.push_str(&row.join(","));
        out.push('\n');
    }
    Ok(out)
}

pub fn write_csv(result: &ExperimentResult, path: &Path) -> Result<()> {
    let text = emit_csv(result)?;
    std::fs::write(path, text).map_err(|source| CliError::Write { path: path.to_owned(), source })
}

/// A CSV column with its non-empty cells paired to their times.
#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub name: String,
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

/// Reads a CSV whose first column is time. Empty cells are skipped.
pub fn read_columns(text: &str) -> Result<Vec<Column>> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines.next().ok_or(CliError::Csv { line: 1, message: "empty file".into() })?;
    let names: Vec<&str> = header.split(',').map(str::trim).collect();
    if names.len() < 2 {
        return Err(CliError::Csv { line: 1, message: "need a time column and at least one series".into() });
    }
    let mut cols: Vec<Column> = names[1..]
        .iter()
        .map(|n| Column { name: (*n).to_owned(), times: Vec::new(), values: Vec::new() })
        .collect();
    for (i, line) in lines {
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        let err = |message: String| CliError::Csv { line: i + 1, message };
        if cells.len() != names.len() {
            return Err(err(format!("expected {} cells, found {}", names.len(), cells.len())));
        }
        let num = |s: &str| s.parse::<f64>().map_err(|_| err(format!("not a number: `{s}`")));
        let t = num(cells[0])?;
        for (col, cell) in cols.iter_mut().zip(&cells[1..]) {
            if !cell.is_empty() {
                col.times.push(t);
                col.values.push(num(cell)?);
            }
        }
    }
    Ok(cols)
}

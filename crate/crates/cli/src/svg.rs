//! Minimal deterministic SVG plots: one panel per group, probabilities over
//! time, solid lines for the discrete run and dash-dot for the continuous.

use std::fmt::Write as _;
use std::path::Path;

use affdyn_core::{Engine, Trajectory};

use crate::error::{CliError, Result};
use crate::experiment::ExperimentResult;

const WIDTH: f64 = 720.0;
const PANEL_HEIGHT: f64 = 220.0;
const MARGIN_LEFT: f64 = 56.0;
const MARGIN_RIGHT: f64 = 16.0;
const MARGIN_TOP: f64 = 28.0;
const PANEL_GAP: f64 = 36.0;
/// Upper bound on drawn vertices per polyline.
const MAX_POINTS: usize = 4000;
const COLORS: [&str; 4] = ["#1f4e9c", "#b8322a", "#2a8a3e", "#7a4ca0"];
const DASH_DOT: &str = "9,4,2,4";

fn polyline(t: &Trajectory, g: usize, a: usize, x: impl Fn(f64) -> f64, y: impl Fn(f64) -> f64) -> String {
    let stride = t.len().div_ceil(MAX_POINTS).max(1);
    let mut pts = String::new();
    for (k, s) in t.states.iter().enumerate() {
        if k % stride == 0 || k + 1 == t.len() {
            let _ = write!(pts, "{:.2},{:.2} ", x(s.time), y(s.probabilities[g][a]));
        }
    }
    pts.trim_end().to_owned()
}

/// Renders `result` as an SVG document.
pub fn emit_svg(result: &ExperimentResult) -> Result<String> {
    let runs: Vec<&Trajectory> = result.trajectories().collect();
    if runs.is_empty() || runs.iter().any(|t| t.is_empty()) {
        return Err(CliError::EmptyResult);
    }
    let s = &result.manifest.scenario;
    let n_alt = if s.is_binary() { 1 } else { s.n_alternatives };
    let t_max = runs
        .iter()
        .filter_map(|t| t.last().map(|l| l.time))
        .fold(0.0, f64::max)
        .max(1.0);
    let height = MARGIN_TOP + s.n_groups as f64 * (PANEL_HEIGHT + PANEL_GAP);
    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{height}" viewBox="0 0 {WIDTH} {height}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(out, r#"<text x="{MARGIN_LEFT}" y="18" font-size="14">{}</text>"#, escape(&result.manifest.name));

    for g in 0..s.n_groups {
        let top = MARGIN_TOP + g as f64 * (PANEL_HEIGHT + PANEL_GAP);
        let x = |t: f64| MARGIN_LEFT + plot_w * t / t_max;
        let y = |p: f64| top + PANEL_HEIGHT * (1.0 - p);
        let _ = writeln!(
            out,
            r#"<rect x="{MARGIN_LEFT}" y="{top}" width="{plot_w}" height="{PANEL_HEIGHT}" fill="none" stroke="dimgray"/>"#
        );
        for tick in [0.0, 0.5, 1.0] {
            let _ = writeln!(
                out,
                r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{tick}</text>"#,
                MARGIN_LEFT - 6.0,
                y(tick) + 4.0
            );
        }
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            WIDTH - MARGIN_RIGHT,
            top + PANEL_HEIGHT + 16.0,
            t_max
        );
        let _ = writeln!(out, r#"<text x="12" y="{:.2}">p{}</text>"#, top + PANEL_HEIGHT / 2.0, g + 1);
        for t in &runs {
            let dash = match t.engine {
                Engine::Discrete => String::new(),
                Engine::Continuous => format!(r#" stroke-dasharray="{DASH_DOT}""#),
            };
            for a in 0..n_alt {
                let _ = writeln!(
                    out,
                    r#"<polyline fill="none" stroke="{}" stroke-width="1"{dash} points="{}"/>"#,
                    COLORS[a % COLORS.len()],
                    polyline(t, g, a, x, y)
                );
            }
        }
    }
    out.push_str("</svg>\n");
    Ok(out)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

pub fn write_svg(result: &ExperimentResult, path: &Path) -> Result<()> {
    let text = emit_svg(result)?;
    std::fs::write(path, text).map_err(|source| CliError::Write { path: path.to_owned(), source })
}

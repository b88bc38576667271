use std::path::{Path, PathBuf};
use std::process::ExitCode;

use affdyn_cli::csv::{read_columns, write_csv};
use affdyn_cli::figures::reproduce_figures;
use affdyn_cli::svg::write_svg;
use affdyn_cli::{run_experiment, CliError, ExperimentManifest};
use affdyn_core::{
    classify_series, lyapunov_estimate, solve_fixed_point_with, ClassifierTolerances, Engine, FixedPointOptions,
};
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "affdyn", version, about = "Affective decision dynamics of interacting agent groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum EngineArg {
    Dis,
    Con,
    Both,
}

impl EngineArg {
    fn engines(self) -> Vec<Engine> {
        match self {
            EngineArg::Dis => vec![Engine::Discrete],
            EngineArg::Con => vec![Engine::Continuous],
            EngineArg::Both => vec![Engine::Discrete, Engine::Continuous],
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ProbeArg {
    Dis,
    Con,
}

#[derive(Subcommand)]
enum Command {
    /// Run a manifest, print a report and check its expectations.
    Run {
        manifest: PathBuf,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
        /// Override the manifest's engine selection.
        #[arg(long, value_enum)]
        engine: Option<EngineArg>,
    },
    /// Run every bundled figure manifest.
    ReproduceFigures {
        /// Directory for per-figure CSV, SVG and report files.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve for the stationary point of a manifest's scenario.
    FixedPoint {
        manifest: PathBuf,
        /// Engine whose run decides which long-term attractions die out.
        #[arg(long, value_enum, default_value = "dis")]
        probe: ProbeArg,
    },
    /// Classify every series of a CSV file whose first column is time.
    Classify {
        csv: PathBuf,
        /// Lyapunov exponent to attach to the series.
        #[arg(long, allow_negative_numbers = true)]
        lyapunov: Option<f64>,
    },
    /// Estimate the largest Lyapunov exponent of the discrete map.
    Lyapunov { manifest: PathBuf },
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Read { path: path.to_owned(), source })
}

fn fmt_row(row: &[f64]) -> String {
    row.iter().map(|v| format!("{v:.6}")).collect::<Vec<_>>().join(" ")
}

fn execute(cmd: Command) -> Result<bool, CliError> {
    match cmd {
        Command::Run { manifest, csv, svg, engine } => {
            let m = ExperimentManifest::load(&manifest)?;
            let engines = engine.map(EngineArg::engines);
            let r = run_experiment(&m, engines.as_deref())?;
            print!("{}", r.report());
            if let Some(p) = csv {
                write_csv(&r, &p)?;
            }
            if let Some(p) = svg {
                write_svg(&r, &p)?;
            }
            Ok(r.passed())
        }
        Command::ReproduceFigures { out } => {
            let results = reproduce_figures(out.as_deref())?;
            for r in &results {
                let failed = r.checks.iter().filter(|c| !c.passed).count();
                let tag = if r.passed() { "PASS" } else { "FAIL" };
                println!("[{tag}] {} ({} checks, {failed} failed)", r.manifest.name, r.checks.len());
                for c in r.checks.iter().filter(|c| !c.passed) {
                    println!("       {}: {}", c.label, c.detail);
                }
            }
            Ok(results.iter().all(|r| r.passed()))
        }
        Command::FixedPoint { manifest, probe } => {
            let m = ExperimentManifest::load(&manifest)?;
            let opts = FixedPointOptions {
                probe: match probe {
                    ProbeArg::Dis => Engine::Discrete,
                    ProbeArg::Con => Engine::Continuous,
                },
                probe_discrete: m.discrete,
                probe_continuous: m.continuous,
                ..Default::default()
            };
            let r = solve_fixed_point_with(&m.scenario, &opts)?;
            for j in 0..m.scenario.n_groups {
                println!(
                    "group {}: p* = {}  q* = {}  M* = {}",
                    j + 1,
                    fmt_row(&r.p_star[j]),
                    fmt_row(&r.q_star[j]),
                    r.memory_star[j]
                );
            }
            println!("residual = {:e}  iterations = {}  converged = {}", r.residual, r.iterations, r.converged);
            if !r.memory_consistent {
                println!("warning: a long-term group keeps a finite memory while still gaining information");
            }
            Ok(r.converged)
        }
        Command::Classify { csv, lyapunov } => {
            let cols = read_columns(&read(&csv)?)?;
            let tol = ClassifierTolerances::default();
            for c in cols {
                let a = classify_series(&c.times, &c.values, &tol, lyapunov)?;
                let period = a.dominant_period.map_or(String::new(), |p| format!("  period = {p}"));
                println!(
                    "{}: {}  center = {:.6}  amplitude = {:.3e}  sign changes = {}{period}",
                    c.name, a.verdict, a.center, a.tail_amplitude, a.sign_changes
                );
            }
            Ok(true)
        }
        Command::Lyapunov { manifest } => {
            let m = ExperimentManifest::load(&manifest)?;
            let l = lyapunov_estimate(&m.scenario, &m.discrete, m.perturbation)?;
            println!("{l}");
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse().command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

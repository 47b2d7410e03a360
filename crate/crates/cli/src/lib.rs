//! Command-line driver: configuration loading, reports and VTK export.

pub mod config;
pub mod error;
pub mod report;
pub mod vtk;

use std::path::{Path, PathBuf};

use cavity::fem::centroid_values;
use cavity::solver::{frequency_sweep, limiting_absorption, solve_maxwell, AbsorptionOptions, FieldSolution, SolveConfig};

use crate::config::{load_config, Problem};
use crate::error::CliError;

/// Absorptions used by `la` when the configuration gives none.
pub const DEFAULT_SCHEDULE: [f64; 4] = [1e-1, 1e-2, 1e-3, 1e-4];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Validate,
    Solve,
    Sweep,
    La,
    Export,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Validate => "validate",
            Command::Solve => "solve",
            Command::Sweep => "sweep",
            Command::La => "la",
            Command::Export => "export",
        }
    }
}

/// Report text (possibly partial) and the final status of a command.
#[derive(Debug)]
pub struct Outcome {
    pub report: String,
    pub status: Result<(), CliError>,
}

impl Outcome {
    fn failed(e: CliError) -> Self {
        Self {
            report: String::new(),
            status: Err(e),
        }
    }
}

/// Loads the configuration at `path` with relative paths taken from its directory.
pub fn load_problem(path: &Path) -> Result<Problem, CliError> {
    let mut config = load_config(path)?;
    let base = path.parent().map_or_else(|| PathBuf::from("."), Path::to_path_buf);
    config.resolve_paths(&base);
    config.build()
}

/// Runs `command` on the configuration at `path`. `output` is where `export` writes its VTK file.
pub fn run(command: Command, path: &Path, output: Option<&Path>) -> Outcome {
    let problem = match load_problem(path) {
        Ok(p) => p,
        Err(e) => return Outcome::failed(e),
    };
    match command {
        Command::Validate => {
            let (report, passed) = report::validation(&problem);
            let status = if passed {
                Ok(())
            } else {
                Err(CliError::Validation(report::failed_checks(&problem)))
            };
            Outcome { report, status }
        }
        Command::Solve => into_outcome(solve(&problem).map(|s| report::solution(&problem, &s))),
        Command::Sweep => into_outcome(sweep(&problem)),
        Command::La => into_outcome(absorption(&problem)),
        Command::Export => into_outcome(export(&problem, output.unwrap_or(Path::new(".")))),
    }
}

fn into_outcome(r: Result<String, CliError>) -> Outcome {
    match r {
        Ok(report) => Outcome { report, status: Ok(()) },
        Err(e) => Outcome::failed(e),
    }
}

pub fn solve(problem: &Problem) -> Result<FieldSolution, CliError> {
    let c = &problem.config;
    let config = SolveConfig {
        linear_tol: c.linear_tol,
        delta_schedule: c.delta_schedule.clone(),
        delta0_policy: c.policy(),
        ..SolveConfig::new(c.omega()?)
    }
    .with_delta(c.solve_delta())
    .with_eta(c.eta);
    Ok(solve_maxwell(&problem.mesh, &problem.materials, &problem.bcs, &problem.sources, &config)?)
}

fn sweep(problem: &Problem) -> Result<String, CliError> {
    let c = &problem.config;
    let r = frequency_sweep(
        &problem.mesh,
        &problem.materials,
        &problem.bcs,
        &problem.sources,
        &c.sweep_omegas()?,
        c.sweep_delta(),
        &c.sweep_options(),
    )?;
    Ok(report::sweep(problem, &r))
}

fn absorption(problem: &Problem) -> Result<String, CliError> {
    let c = &problem.config;
    let schedule = if c.delta_schedule.is_empty() {
        DEFAULT_SCHEDULE.to_vec()
    } else {
        c.delta_schedule.clone()
    };
    let options = AbsorptionOptions {
        eta: c.eta,
        linear_tol: c.linear_tol,
        policy: c.policy(),
        compare_direct: true,
    };
    let r = limiting_absorption(
        &problem.mesh,
        &problem.materials,
        &problem.bcs,
        &problem.sources,
        c.omega()?,
        &schedule,
        &options,
    )?;
    Ok(report::absorption(problem, &r))
}

fn export(problem: &Problem, dir: &Path) -> Result<String, CliError> {
    let s = solve(problem)?;
    std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    let path = dir.join("solution.vtk");
    let e = centroid_values(&problem.mesh, &s.e);
    vtk::write(&path, &problem.mesh, &e, &s.h)?;
    let mut report = report::solution(problem, &s);
    report.push_str(&format!("vtk: {}\n", path.display()));
    Ok(report)
}

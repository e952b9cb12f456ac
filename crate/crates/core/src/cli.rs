//! Command-line front end: config loading, overrides, dispatch and output.

use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use log::{info, warn};

use crate::analytic;
use crate::config::{self, BoundJob, Engine, RunConfig, Task, TransmissionJob};
use crate::error::{Error, Result};
use crate::output::{self, number};
use crate::scattering::SweepTable;
use crate::structure::GAAS_MASS_RATIO;
use crate::tmm::sweep_tmm;
use crate::units::infinite_well_level;
use crate::validate;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;
pub const EXIT_VALIDATION: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Transmission,
    Bound,
    Validate,
    Reproduce,
}

/// Scattering and bound states of 1D quantum heterostructures.
#[derive(Debug, Parser)]
#[command(name = "qwell1d", version)]
pub struct Cli {
    #[arg(value_enum)]
    pub mode: Mode,
    /// Preset for `reproduce`: fig4 ... fig18, or `all`.
    pub preset: Option<String>,
    /// JSON run configuration.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory (created if missing).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Mesh step in nm for bound states; finest convergence step for `validate`.
    #[arg(long)]
    pub dx: Option<f64>,
    /// Engine for transmission sweeps.
    #[arg(long, value_enum)]
    pub engine: Option<Engine>,
    /// Number of bound states per well.
    #[arg(long)]
    pub modes: Option<usize>,
    /// Only print errors and validation results.
    #[arg(long)]
    pub quiet: bool,
}

fn exit_code(e: &Error) -> i32 {
    // a sweep in which no energy has a propagating lead mode produced no
    // data at all; that is a failed computation rather than a malformed file
    if e.is_numerical() || matches!(e, Error::NoPropagatingMode { .. }) {
        EXIT_NUMERICAL
    } else {
        EXIT_CONFIG
    }
}

/// Runs the command and returns the process exit code.
pub fn run(cli: &Cli) -> i32 {
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("qwell1d: {e}");
            exit_code(&e)
        }
    }
}

fn dispatch(cli: &Cli) -> Result<i32> {
    let configs = load_configs(cli)?;
    let mut code = EXIT_OK;
    for mut cfg in configs {
        apply_overrides(&mut cfg, cli)?;
        let out_dir = cli
            .out
            .clone()
            .or_else(|| cfg.out_dir.as_ref().map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("."));
        code = code.max(execute(&cfg, &out_dir, cli.quiet)?);
    }
    Ok(code)
}

fn load_configs(cli: &Cli) -> Result<Vec<RunConfig>> {
    let from_file = match &cli.config {
        Some(path) => Some(RunConfig::from_file(path)?),
        None => None,
    };
    match cli.mode {
        Mode::Reproduce => {
            let name = match (&cli.preset, &from_file) {
                (Some(p), None) => p.clone(),
                (None, Some(RunConfig {
                    task: Task::Reproduce { preset },
                    ..
                })) => preset.clone(),
                (None, Some(cfg)) => return Ok(vec![cfg.clone()]),
                (Some(_), Some(_)) => {
                    return Err(Error::Config("give either a preset name or --config, not both".into()))
                }
                (None, None) => return Err(Error::Config("reproduce needs a preset name or --config".into())),
            };
            if name == "all" {
                config::PRESETS.iter().map(|(n, _)| config::preset(n)).collect()
            } else {
                Ok(vec![config::preset(&name)?])
            }
        }
        mode => {
            if cli.preset.is_some() {
                return Err(Error::Config("preset names are only accepted by `reproduce`".into()));
            }
            let cfg = match from_file {
                Some(cfg) => cfg,
                None if mode == Mode::Validate => RunConfig::from_json(r#"{"mode": "validate"}"#)?,
                None => return Err(Error::Config("--config is required".into())),
            };
            let matches = matches!(
                (mode, &cfg.task),
                (Mode::Transmission, Task::Transmission { .. })
                    | (Mode::Bound, Task::Bound { .. })
                    | (Mode::Validate, Task::Validate { .. })
            );
            if !matches {
                return Err(Error::Config(format!(
                    "config mode does not match the `{}` command",
                    mode.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default()
                )));
            }
            Ok(vec![cfg])
        }
    }
}

fn apply_overrides(cfg: &mut RunConfig, cli: &Cli) -> Result<()> {
    if let Some(dx) = cli.dx {
        if !(dx > 0.0 && dx.is_finite()) {
            return Err(Error::Config(format!("--dx must be positive, got {dx}")));
        }
    }
    match &mut cfg.task {
        Task::Transmission { sweeps } => {
            if let Some(engine) = cli.engine {
                sweeps.iter_mut().for_each(|s| s.engine = Some(engine));
            }
        }
        Task::Bound { wells } => {
            for w in wells.iter_mut() {
                if let Some(dx) = cli.dx {
                    w.dx = Some(dx);
                }
                if let Some(n) = cli.modes {
                    if n == 0 {
                        return Err(Error::Config("--modes must be at least 1".into()));
                    }
                    w.n_modes = n;
                    if let Some(list) = &mut w.eigenfunctions {
                        list.retain(|&k| k <= n);
                    }
                }
            }
        }
        Task::Validate { checks } => {
            if let Some(dx) = cli.dx {
                checks.convergence_dx = dx;
            }
        }
        Task::Reproduce { .. } => {}
    }
    cfg.validate()
}

/// Runs one resolved configuration and writes its files into `out_dir`.
pub fn execute(cfg: &RunConfig, out_dir: &Path, quiet: bool) -> Result<i32> {
    match &cfg.task {
        Task::Transmission { sweeps } => {
            std::fs::create_dir_all(out_dir)?;
            for job in sweeps {
                run_transmission(&cfg.name, job, out_dir, quiet)?;
            }
            Ok(EXIT_OK)
        }
        Task::Bound { wells } => {
            std::fs::create_dir_all(out_dir)?;
            run_bound(&cfg.name, wells, out_dir, quiet)?;
            Ok(EXIT_OK)
        }
        Task::Validate { checks } => {
            let report = validate::run_suite(checks);
            print!("{}", report.render());
            Ok(if report.all_passed() {
                EXIT_OK
            } else {
                EXIT_VALIDATION
            })
        }
        Task::Reproduce { preset } => execute(&config::preset(preset)?, out_dir, quiet),
    }
}

fn report_failures(label: &str, table: &SweepTable) -> Result<()> {
    let failed = table.failures();
    if failed == table.len() {
        let first = table.rows.iter().find_map(|r| r.outcome.as_ref().err().cloned());
        return Err(first.unwrap_or(Error::NumericalOverflow { energy: f64::NAN }));
    }
    if failed > 0 {
        warn!("{label}: {failed} of {} energies failed and are written as NaN", table.len());
        for row in table.rows.iter().filter(|r| r.outcome.is_err()) {
            if let Err(e) = &row.outcome {
                eprintln!("warning: {label}: E = {} eV: {e}", number(row.energy));
            }
        }
    }
    Ok(())
}

fn run_transmission(name: &str, job: &TransmissionJob, out_dir: &Path, quiet: bool) -> Result<()> {
    let path = out_dir.join(format!("{name}_{}.csv", job.label));
    let engine = job.engine();
    let primary = match engine {
        Engine::Tmm => sweep_tmm(&job.structure()?, &job.energy),
        Engine::Analytic | Engine::Both => analytic::sweep(&job.closed_form()?, &job.energy),
    };
    report_failures(&job.label, &primary)?;
    if engine == Engine::Both {
        let tmm = sweep_tmm(&job.structure()?, &job.energy);
        report_failures(&job.label, &tmm)?;
        output::paired_transmission_csv(&primary, &tmm).write(&path)?;
        // always reported: this is the quantity `both` exists for
        println!("{}: max |dT| = {}", job.label, number(primary.max_abs_diff(&tmm)));
    } else {
        output::transmission_csv(&primary).write(&path)?;
    }
    if !quiet {
        let best = primary
            .rows
            .iter()
            .filter_map(|r| r.outcome.as_ref().ok())
            .max_by(|a, b| a.transmission.total_cmp(&b.transmission));
        if let Some(s) = best {
            println!(
                "{}: max sampled T = {} at E = {} eV -> {}",
                job.label,
                number(s.transmission),
                number(s.energy),
                path.display()
            );
        }
    }
    Ok(())
}

fn run_bound(name: &str, wells: &[BoundJob], out_dir: &Path, quiet: bool) -> Result<()> {
    let mut labels = Vec::with_capacity(wells.len());
    let mut energies = Vec::with_capacity(wells.len());
    for job in wells {
        info!("solving {} ({} modes)", job.label, job.n_modes);
        let (grid, pairs) = job.solve()?;
        let values = out_dir.join(format!("{name}_{}_eigenvalues.csv", job.label));
        output::eigenvalue_csv(&pairs, &grid).write(&values)?;
        let modes: Vec<usize> = job
            .eigenfunctions
            .clone()
            .unwrap_or_else(|| (1..=job.n_modes).collect());
        if !modes.is_empty() {
            let functions = out_dir.join(format!("{name}_{}_eigenfunctions.csv", job.label));
            output::eigenfunction_csv(&pairs, &grid, &modes).write(&functions)?;
        }
        if !quiet {
            println!("{} (dx = {} nm, N = {}):", job.label, grid.dx, grid.len());
            for p in &pairs {
                println!("  E_{} = {} eV", p.index, number(p.energy));
            }
        }
        labels.push(job.label.clone());
        energies.push(pairs.iter().map(|p| p.energy).collect::<Vec<_>>());
    }
    if wells.len() > 1 {
        let first = &wells[0];
        let mass = match first.mass {
            crate::grid::MassSpec::Uniform { mass_ratio } => mass_ratio,
            _ => GAAS_MASS_RATIO,
        };
        let rows = energies.iter().map(Vec::len).max().unwrap_or(0);
        let parabola: Vec<f64> = (1..=rows).map(|n| infinite_well_level(n, first.width, mass)).collect();
        let path = out_dir.join(format!("{name}_energies.csv"));
        output::energy_summary_csv(&labels, &energies, &parabola).write(&path)?;
        if !quiet {
            println!("summary -> {}", path.display());
        }
    }
    Ok(())
}

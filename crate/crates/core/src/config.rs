//! JSON run configuration and the embedded figure presets.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::analytic::ClosedForm;
use crate::error::{ensure_positive, Error, Result};
use crate::grid::{build_grid, EnergyGrid, MassSpec, PotentialGrid, PotentialSpec};
use crate::numerov::{assemble, solve, EigenPair};
use crate::pdm::{solve_pdm, VonRoosParams};
use crate::structure::{LayeredStructure, GAAS_MASS_RATIO};

pub const DEFAULT_DX: f64 = 0.005;

/// Which engine evaluates a transmission sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Engine {
    Analytic,
    Tmm,
    Both,
}

/// A complete run: one mode plus its jobs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    /// Prefix of every output file.
    #[serde(default = "default_name")]
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    /// Output directory, relative to the working directory.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<String>,
    #[serde(flatten)]
    pub task: Task,
}

fn default_name() -> String {
    "run".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum Task {
    Transmission { sweeps: Vec<TransmissionJob> },
    Bound { wells: Vec<BoundJob> },
    Validate {
        #[serde(default)]
        checks: ValidateOptions,
    },
    Reproduce { preset: String },
}

/// One energy sweep. Exactly one of `closed_form` and `layers` is given.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransmissionJob {
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub closed_form: Option<ClosedForm>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub layers: Option<LayeredStructure>,
    pub energy: EnergyGrid,
    /// Defaults to `analytic` when a closed form is given, else `tmm`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub engine: Option<Engine>,
}

impl TransmissionJob {
    pub fn structure(&self) -> Result<LayeredStructure> {
        match (&self.closed_form, &self.layers) {
            (Some(f), None) => f.to_structure(),
            (None, Some(s)) => {
                s.validate()?;
                Ok(s.clone())
            }
            _ => Err(Error::Config(format!(
                "sweep '{}' needs exactly one of closed_form and layers",
                self.label
            ))),
        }
    }

    /// The closed form for this job, recognizing layer stacks when possible.
    pub fn closed_form(&self) -> Result<ClosedForm> {
        match (&self.closed_form, &self.layers) {
            (Some(f), None) => Ok(*f),
            (None, Some(s)) => ClosedForm::from_structure(s),
            _ => Err(Error::Config(format!(
                "sweep '{}' needs exactly one of closed_form and layers",
                self.label
            ))),
        }
    }

    pub fn engine(&self) -> Engine {
        self.engine.unwrap_or(if self.closed_form.is_some() {
            Engine::Analytic
        } else {
            Engine::Tmm
        })
    }
}

impl BoundJob {
    /// Builds the grid at the job's step (or `DEFAULT_DX`) and solves it,
    /// switching to the position-dependent-mass solver when the mass varies
    /// or an ordering is given.
    pub fn solve(&self) -> Result<(PotentialGrid, Vec<EigenPair>)> {
        let grid = build_grid(self.width, self.dx.unwrap_or(DEFAULT_DX), &self.potential, &self.mass)?;
        let pairs = if self.ordering.is_some() || grid.uniform_mass().is_none() {
            solve_pdm(&grid, &self.ordering.unwrap_or_default(), self.n_modes)?
        } else {
            solve(&assemble(&grid)?, self.n_modes)?
        };
        Ok((grid, pairs))
    }
}

fn gaas() -> MassSpec {
    MassSpec::uniform(GAAS_MASS_RATIO)
}

/// One infinite well.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundJob {
    pub label: String,
    /// Wall separation (nm).
    pub width: f64,
    /// Mesh step (nm); the run-wide step applies when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dx: Option<f64>,
    pub potential: PotentialSpec,
    #[serde(default = "gaas")]
    pub mass: MassSpec,
    pub n_modes: usize,
    /// Kinetic ordering; when present (or when the mass varies) the
    /// position-dependent-mass solver is used.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ordering: Option<VonRoosParams>,
    /// 1-based modes written to the eigenfunction file; all when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eigenfunctions: Option<Vec<usize>>,
}

/// Options of the validation suite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidateOptions {
    /// Finest step of the convergence ladder {8, 4, 2, 1}·dx (nm).
    #[serde(default = "default_convergence_dx")]
    pub convergence_dx: f64,
    /// Step of the bound-state checks (nm).
    #[serde(default = "default_dx")]
    pub dx: f64,
    /// Points of each transmission sweep.
    #[serde(default = "default_sweep_points")]
    pub sweep_points: usize,
    /// Deliberate defect used to exercise the suite.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inject_fault: Option<Fault>,
}

fn default_convergence_dx() -> f64 {
    0.01
}

fn default_dx() -> f64 {
    DEFAULT_DX
}

fn default_sweep_points() -> usize {
    2000
}

impl Default for ValidateOptions {
    fn default() -> Self {
        ValidateOptions {
            convergence_dx: default_convergence_dx(),
            dx: default_dx(),
            sweep_points: default_sweep_points(),
            inject_fault: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Fault {
    /// Flips the sign of the cosine term in the triple-barrier closed form.
    TripleBarrierCosSign,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let bad_name = |s: &str| {
            s.is_empty() || !s.chars().all(|c| c.is_ascii_alphanumeric() || "-_.".contains(c))
        };
        if bad_name(&self.name) {
            return Err(Error::Config(format!(
                "name '{}' must be non-empty ASCII letters, digits, '-', '_' or '.'",
                self.name
            )));
        }
        match &self.task {
            Task::Transmission { sweeps } => {
                if sweeps.is_empty() {
                    return Err(Error::Config("transmission mode needs at least one sweep".into()));
                }
                for s in sweeps {
                    if bad_name(&s.label) {
                        return Err(Error::Config(format!("bad sweep label '{}'", s.label)));
                    }
                    s.energy.validate()?;
                    s.structure()?;
                    if s.engine() != Engine::Tmm {
                        s.closed_form()?;
                    }
                }
            }
            Task::Bound { wells } => {
                if wells.is_empty() {
                    return Err(Error::Config("bound mode needs at least one well".into()));
                }
                for w in wells {
                    if bad_name(&w.label) {
                        return Err(Error::Config(format!("bad well label '{}'", w.label)));
                    }
                    ensure_positive("well width", w.width)?;
                    if let Some(dx) = w.dx {
                        ensure_positive("dx", dx)?;
                    }
                    if w.n_modes == 0 {
                        return Err(Error::Config(format!("well '{}' asks for 0 modes", w.label)));
                    }
                    if let Some(p) = &w.ordering {
                        p.validate()?;
                    }
                    if let Some(list) = &w.eigenfunctions {
                        if let Some(&bad) = list.iter().find(|&&n| n == 0 || n > w.n_modes) {
                            return Err(Error::Config(format!(
                                "well '{}': eigenfunction {bad} outside 1..={}",
                                w.label, w.n_modes
                            )));
                        }
                    }
                }
            }
            Task::Validate { checks } => {
                ensure_positive("convergence_dx", checks.convergence_dx)?;
                ensure_positive("dx", checks.dx)?;
                if checks.sweep_points < 2 {
                    return Err(Error::Config("sweep_points must be at least 2".into()));
                }
            }
            Task::Reproduce { preset } => {
                preset_text(preset)?;
            }
        }
        Ok(())
    }
}

/// Figure presets shipped with the binary.
pub const PRESETS: [(&str, &str); 15] = [
    ("fig4", include_str!("../presets/fig4.json")),
    ("fig5", include_str!("../presets/fig5.json")),
    ("fig6", include_str!("../presets/fig6.json")),
    ("fig7", include_str!("../presets/fig7.json")),
    ("fig8", include_str!("../presets/fig8.json")),
    ("fig9", include_str!("../presets/fig9.json")),
    ("fig10", include_str!("../presets/fig10.json")),
    ("fig11", include_str!("../presets/fig11.json")),
    ("fig12", include_str!("../presets/fig12.json")),
    ("fig13", include_str!("../presets/fig13.json")),
    ("fig14", include_str!("../presets/fig14.json")),
    ("fig15", include_str!("../presets/fig15.json")),
    ("fig16", include_str!("../presets/fig16.json")),
    ("fig17", include_str!("../presets/fig17.json")),
    ("fig18", include_str!("../presets/fig18.json")),
];

pub fn preset_text(name: &str) -> Result<&'static str> {
    PRESETS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, t)| *t)
        .ok_or_else(|| {
            let names: Vec<&str> = PRESETS.iter().map(|(n, _)| *n).collect();
            Error::Config(format!("unknown preset '{name}' (known: {})", names.join(", ")))
        })
}

pub fn preset(name: &str) -> Result<RunConfig> {
    let cfg = RunConfig::from_json(preset_text(name)?)?;
    if matches!(cfg.task, Task::Reproduce { .. }) {
        return Err(Error::Config(format!("preset '{name}' refers to another preset")));
    }
    Ok(cfg)
}

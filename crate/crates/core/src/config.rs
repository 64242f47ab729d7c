//! JSON run configuration: schema, whole-file validation (every violation
//! reported with its field path, not just the first), and builders for the
//! grid, operator, initial data, and solver settings.

use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::fft::FftEngine;
use crate::field::{inverse_transform, PhysicalField};
use crate::grid::Grid;
use crate::initial;
use crate::io::{read_snapshot, read_symbol_file};
use crate::solver::{SolverConfig, TimeStepping};
use crate::symbols::{mg_symbol, perp_riesz_symbol, MgParams, MultiplierSymbol};

pub const KNOWN_CHECKS: &[&str] = &[
    "energy",
    "levelset",
    "degiorgi",
    "linf",
    "local_energy",
    "second_energy",
    "shrink",
    "bmo",
    "oscillation",
];

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub dims: Vec<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum OperatorSection {
    Mg { omega: f64, beta2_over_eta: f64 },
    PerpRiesz { axis: usize },
    Custom { path: PathBuf },
    Zero,
}

impl OperatorSection {
    pub fn label(&self) -> &'static str {
        match self {
            OperatorSection::Mg { .. } => "mg",
            OperatorSection::PerpRiesz { .. } => "perp_riesz",
            OperatorSection::Custom { .. } => "custom",
            OperatorSection::Zero => "zero",
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    #[serde(default)]
    pub kappa: f64,
    #[serde(default)]
    pub epsilon: f64,
    #[serde(default)]
    pub dt: Option<f64>,
    #[serde(default)]
    pub cfl: Option<f64>,
    pub t_final: f64,
    #[serde(default = "default_true")]
    pub dealias: bool,
    /// Defaults to true for the mg operator, false otherwise.
    #[serde(default)]
    pub project_vertical: Option<bool>,
    /// Optional static forcing, read from a snapshot file.
    #[serde(default)]
    pub forcing: Option<PathBuf>,
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialSection {
    RandomBandlimited {
        k_min: f64,
        k_max: f64,
        amplitude: f64,
        seed: u64,
    },
    File {
        path: PathBuf,
    },
    Modes {
        modes: Vec<ModeSpec>,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeSpec {
    pub k: Vec<i64>,
    pub amplitude: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagnosticsSection {
    #[serde(default = "default_checks")]
    pub checks: Vec<String>,
    #[serde(default = "default_sample_count")]
    pub sample_count: usize,
    #[serde(default = "default_c0")]
    pub c0: f64,
    #[serde(default = "default_h_constant")]
    pub h_constant: f64,
    /// Anchor time for the iterated-truncation and oscillation checks;
    /// defaults to the final snapshot time.
    #[serde(default)]
    pub t0: Option<f64>,
    #[serde(default = "default_r_max")]
    pub oscillation_r_max: f64,
    #[serde(default = "default_levels")]
    pub oscillation_levels: usize,
    #[serde(default = "default_h_count")]
    pub levelset_h_count: usize,
    #[serde(default = "default_pair_count")]
    pub levelset_pair_count: usize,
    #[serde(default = "default_min_cells")]
    pub bmo_min_cells: usize,
    #[serde(default = "default_degiorgi_n_max")]
    pub degiorgi_n_max: usize,
    /// Outer radius for the shrink and local-energy cylinders.
    #[serde(default = "default_shrink_radius")]
    pub cylinder_radius: f64,
}

fn default_checks() -> Vec<String> {
    vec!["energy".into(), "levelset".into(), "linf".into()]
}
fn default_sample_count() -> usize {
    8
}
fn default_c0() -> f64 {
    1.0
}
fn default_h_constant() -> f64 {
    4.0
}
fn default_r_max() -> f64 {
    0.15
}
fn default_levels() -> usize {
    5
}
fn default_h_count() -> usize {
    10
}
fn default_pair_count() -> usize {
    5
}
fn default_min_cells() -> usize {
    4
}
fn default_degiorgi_n_max() -> usize {
    8
}
fn default_shrink_radius() -> f64 {
    1.0
}

impl Default for DiagnosticsSection {
    fn default() -> Self {
        serde_json::from_str("{}").unwrap()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default = "default_out_dir")]
    pub dir: PathBuf,
    pub snapshot_interval: f64,
}

fn default_out_dir() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub grid: GridSection,
    pub operator: OperatorSection,
    pub solver: SolverSection,
    pub initial: InitialSection,
    #[serde(default)]
    pub diagnostics: DiagnosticsSection,
    pub output: OutputSection,
}

impl RunConfig {
    /// Parse and validate; reports every violation found, each with its
    /// field path.
    pub fn parse(path: &Path) -> Result<RunConfig> {
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
        let cfg: RunConfig = serde_json::from_str(&text)
            .map_err(|e| Error::Config(vec![format!("{}: {e}", path.display())]))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let mut errs = Vec::new();
        let d = self.grid.dims.len();
        if d != 2 && d != 3 {
            errs.push(format!("grid.dims: must have 2 or 3 axes, got {d}"));
        }
        for (i, &n) in self.grid.dims.iter().enumerate() {
            if n < 8 || n % 2 != 0 {
                errs.push(format!(
                    "grid.dims[{i}]: mode counts must be even and >= 8, got {n}"
                ));
            }
        }

        match &self.operator {
            OperatorSection::Mg {
                omega,
                beta2_over_eta,
            } => {
                if d != 3 {
                    errs.push(format!(
                        "operator: mg requires a 3-dimensional grid, got {d} axes"
                    ));
                }
                if !(*omega > 0.0 && omega.is_finite()) {
                    errs.push(format!(
                        "operator.mg.omega: must be strictly positive, got {omega}"
                    ));
                }
                if !(*beta2_over_eta > 0.0 && beta2_over_eta.is_finite()) {
                    errs.push(format!(
                        "operator.mg.beta2_over_eta: must be strictly positive, got {beta2_over_eta}"
                    ));
                }
            }
            OperatorSection::PerpRiesz { axis } => {
                if d != 2 {
                    errs.push(format!(
                        "operator: perp_riesz requires a 2-dimensional grid, got {d} axes"
                    ));
                }
                if *axis != 1 && *axis != 2 {
                    errs.push(format!(
                        "operator.perp_riesz.axis: must be 1 or 2, got {axis}"
                    ));
                }
            }
            OperatorSection::Custom { path } => {
                if path.as_os_str().is_empty() {
                    errs.push("operator.custom.path: must not be empty".into());
                }
            }
            OperatorSection::Zero => {}
        }

        if !(self.solver.kappa >= 0.0 && self.solver.kappa.is_finite()) {
            errs.push(format!(
                "solver.kappa: must be >= 0, got {}",
                self.solver.kappa
            ));
        }
        if !(self.solver.epsilon >= 0.0 && self.solver.epsilon.is_finite()) {
            errs.push(format!(
                "solver.epsilon: must be >= 0, got {}",
                self.solver.epsilon
            ));
        }
        match (self.solver.dt, self.solver.cfl) {
            (Some(_), Some(_)) => {
                errs.push("solver: supply exactly one of dt or cfl, got both".into())
            }
            (None, None) => {
                errs.push("solver: supply exactly one of dt or cfl, got neither".into())
            }
            (Some(dt), None) => {
                if !(dt > 0.0 && dt.is_finite()) {
                    errs.push(format!("solver.dt: must be > 0, got {dt}"));
                }
            }
            (None, Some(cfl)) => {
                if !(cfl > 0.0 && cfl <= 1.0) {
                    errs.push(format!("solver.cfl: must lie in (0, 1], got {cfl}"));
                }
            }
        }
        if !(self.solver.t_final > 0.0 && self.solver.t_final.is_finite()) {
            errs.push(format!(
                "solver.t_final: must be > 0, got {}",
                self.solver.t_final
            ));
        }
        if self.solver.project_vertical == Some(true) && d != 3 {
            errs.push("solver.project_vertical: requires a 3-dimensional grid".into());
        }

        match &self.initial {
            InitialSection::RandomBandlimited {
                k_min,
                k_max,
                amplitude,
                ..
            } => {
                if !(*k_min >= 0.0 && k_max >= k_min) {
                    errs.push(format!(
                        "initial.random_bandlimited: need 0 <= k_min <= k_max, got [{k_min}, {k_max}]"
                    ));
                }
                if !(amplitude.is_finite() && *amplitude > 0.0) {
                    errs.push(format!(
                        "initial.random_bandlimited.amplitude: must be > 0, got {amplitude}"
                    ));
                }
                let band = self
                    .grid
                    .dims
                    .iter()
                    .map(|&n| n as f64 / 3.0)
                    .fold(f64::INFINITY, f64::min);
                if *k_max > band {
                    errs.push(format!(
                        "initial.random_bandlimited.k_max: {k_max} exceeds the dealiased band {band:.1}"
                    ));
                }
            }
            InitialSection::File { path } => {
                if path.as_os_str().is_empty() {
                    errs.push("initial.file.path: must not be empty".into());
                }
            }
            InitialSection::Modes { modes } => {
                if modes.is_empty() {
                    errs.push("initial.modes: must not be empty".into());
                }
                for (i, m) in modes.iter().enumerate() {
                    if m.k.len() != d {
                        errs.push(format!(
                            "initial.modes[{i}].k: has {} components for a {d}-dimensional grid",
                            m.k.len()
                        ));
                    }
                }
            }
        }

        for (i, c) in self.diagnostics.checks.iter().enumerate() {
            if !KNOWN_CHECKS.contains(&c.as_str()) {
                errs.push(format!(
                    "diagnostics.checks[{i}]: unknown check '{c}' (known: {})",
                    KNOWN_CHECKS.join(", ")
                ));
            }
        }
        if self.diagnostics.sample_count == 0 {
            errs.push("diagnostics.sample_count: must be >= 1".into());
        }
        if self.diagnostics.c0 <= 0.0 || self.diagnostics.c0.is_nan() {
            errs.push(format!(
                "diagnostics.c0: must be > 0, got {}",
                self.diagnostics.c0
            ));
        }
        if self.diagnostics.h_constant <= 0.0 || self.diagnostics.h_constant.is_nan() {
            errs.push(format!(
                "diagnostics.h_constant: must be > 0, got {}",
                self.diagnostics.h_constant
            ));
        }
        if !(self.diagnostics.oscillation_r_max > 0.0
            && self.diagnostics.oscillation_r_max <= std::f64::consts::PI)
        {
            errs.push(format!(
                "diagnostics.oscillation_r_max: must lie in (0, pi], got {}",
                self.diagnostics.oscillation_r_max
            ));
        }
        if self.diagnostics.oscillation_levels < 3 {
            errs.push(format!(
                "diagnostics.oscillation_levels: must be >= 3, got {}",
                self.diagnostics.oscillation_levels
            ));
        }
        if self.diagnostics.bmo_min_cells < 4 {
            errs.push(format!(
                "diagnostics.bmo_min_cells: must be >= 4, got {}",
                self.diagnostics.bmo_min_cells
            ));
        }
        if self.diagnostics.degiorgi_n_max > 12 {
            errs.push(format!(
                "diagnostics.degiorgi_n_max: capped at 12, got {}",
                self.diagnostics.degiorgi_n_max
            ));
        }
        if !(self.diagnostics.cylinder_radius > 0.0
            && self.diagnostics.cylinder_radius <= std::f64::consts::PI)
        {
            errs.push(format!(
                "diagnostics.cylinder_radius: must lie in (0, pi], got {}",
                self.diagnostics.cylinder_radius
            ));
        }

        if !(self.output.snapshot_interval > 0.0 && self.output.snapshot_interval.is_finite()) {
            errs.push(format!(
                "output.snapshot_interval: must be > 0, got {}",
                self.output.snapshot_interval
            ));
        }

        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(errs))
        }
    }

    pub fn build_grid(&self) -> Result<Grid> {
        Grid::new(&self.grid.dims)
    }

    pub fn build_symbol(&self, grid: &Grid) -> Result<MultiplierSymbol> {
        match &self.operator {
            OperatorSection::Mg {
                omega,
                beta2_over_eta,
            } => mg_symbol(&MgParams::new(*omega, *beta2_over_eta)?, grid.clone()),
            OperatorSection::PerpRiesz { axis } => perp_riesz_symbol(*axis, grid.clone()),
            OperatorSection::Custom { path } => read_symbol_file(path, Some(grid)),
            OperatorSection::Zero => Ok(MultiplierSymbol::zero(grid.clone())),
        }
    }

    /// Whether vertical-mean projection applies: explicit setting, else on
    /// exactly for the mg operator.
    pub fn project_vertical(&self) -> bool {
        self.solver
            .project_vertical
            .unwrap_or(matches!(self.operator, OperatorSection::Mg { .. }))
    }

    pub fn build_solver_config(&self) -> Result<SolverConfig> {
        let stepping = match (self.solver.dt, self.solver.cfl) {
            (Some(dt), None) => TimeStepping::Fixed(dt),
            (None, Some(c)) => TimeStepping::Cfl(c),
            _ => {
                return Err(Error::Config(vec![
                    "solver: supply exactly one of dt or cfl".into(),
                ]))
            }
        };
        let forcing = match &self.solver.forcing {
            Some(path) => Some(read_snapshot(path)?.0),
            None => None,
        };
        let cfg = SolverConfig {
            kappa: self.solver.kappa,
            epsilon: self.solver.epsilon,
            stepping,
            t_final: self.solver.t_final,
            dealias: self.solver.dealias,
            project_vertical: self.project_vertical(),
            forcing,
            snapshot_interval: self.output.snapshot_interval,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn build_initial(&self, grid: &Grid) -> Result<PhysicalField> {
        match &self.initial {
            InitialSection::RandomBandlimited {
                k_min,
                k_max,
                amplitude,
                seed,
            } => {
                let mut hat = initial::random_bandlimited(grid, *k_min, *k_max, *amplitude, *seed)?;
                if self.project_vertical() {
                    hat.project_zero_vertical_mean_in_place()?;
                }
                let mut engine = FftEngine::new();
                Ok(inverse_transform(&mut engine, &hat))
            }
            InitialSection::File { path } => {
                let (field, _) = read_snapshot(path)?;
                field.grid().same_as(grid)?;
                Ok(field)
            }
            InitialSection::Modes { modes } => {
                let pairs: Vec<(Vec<i64>, f64)> =
                    modes.iter().map(|m| (m.k.clone(), m.amplitude)).collect();
                let hat = initial::cosine_modes(grid, &pairs)?;
                let mut engine = FftEngine::new();
                Ok(inverse_transform(&mut engine, &hat))
            }
        }
    }
}

//! Time integration of `d(theta)/dt + (u . grad) theta = kappa * Lap theta
//! - eps * Lambda^3 theta + S` with `u = M[theta]` on the torus.

mod run;
mod stepper;

pub mod epsilon;

pub use run::{run, RunSample, RunSummary};
pub use stepper::{cfl_dt, nonlinear_term, step_once, Stepper};

use crate::error::{Error, Result};
use crate::fft::FftEngine;
use crate::field::{forward_transform, inverse_transform, PhysicalField, SpectralField};

/// Time-step selection: a fixed step, or a Courant number applied to the
/// current velocity each step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TimeStepping {
    Fixed(f64),
    Cfl(f64),
}

/// Floor on the velocity magnitude entering the CFL formula, guarding
/// quiescent states.
pub const U_FLOOR: f64 = 1e-8;

/// Relative slack allowed on the monotone-energy check of unforced runs.
pub const ENERGY_MONOTONE_TOL: f64 = 1e-8;

/// Norm-growth factor beyond which a run is declared unstable and aborted.
pub const INSTABILITY_FACTOR: f64 = 10.0;

#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub kappa: f64,
    pub epsilon: f64,
    pub stepping: TimeStepping,
    pub t_final: f64,
    pub dealias: bool,
    pub project_vertical: bool,
    pub forcing: Option<PhysicalField>,
    pub snapshot_interval: f64,
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let mut errs = Vec::new();
        if !(self.kappa >= 0.0 && self.kappa.is_finite()) {
            errs.push(format!("solver.kappa: must be >= 0, got {}", self.kappa));
        }
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            errs.push(format!(
                "solver.epsilon: must be >= 0, got {}",
                self.epsilon
            ));
        }
        match self.stepping {
            TimeStepping::Fixed(dt) => {
                if !(dt > 0.0 && dt.is_finite()) {
                    errs.push(format!("solver.dt: must be > 0, got {dt}"));
                }
            }
            TimeStepping::Cfl(c) => {
                if !(c > 0.0 && c <= 1.0) {
                    errs.push(format!("solver.cfl: must lie in (0, 1], got {c}"));
                }
            }
        }
        if !(self.t_final > 0.0 && self.t_final.is_finite()) {
            errs.push(format!("solver.t_final: must be > 0, got {}", self.t_final));
        }
        if !(self.snapshot_interval > 0.0 && self.snapshot_interval.is_finite()) {
            errs.push(format!(
                "solver.snapshot_interval: must be > 0, got {}",
                self.snapshot_interval
            ));
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(errs))
        }
    }

    /// Advection-only configuration; conservation rather than decay is the
    /// expected behavior and run summaries flag it.
    pub fn is_inviscid(&self) -> bool {
        self.kappa == 0.0 && self.epsilon == 0.0
    }
}

/// The single mutable object of a run.
#[derive(Debug, Clone)]
pub struct SolverState {
    pub time: f64,
    pub theta_hat: SpectralField,
    pub step_count: u64,
}

impl SolverState {
    pub fn new(theta_hat: SpectralField) -> Self {
        SolverState {
            time: 0.0,
            theta_hat,
            step_count: 0,
        }
    }
}

/// Mollify initial data by the spectral Gaussian `exp(-(eps |k|)^2 / 2)`.
///
/// Norm-nonincreasing for every eps, identity in the eps -> 0 limit.
pub fn mollify_initial_data(theta0: &PhysicalField, eps: f64) -> Result<PhysicalField> {
    if !(eps >= 0.0 && eps.is_finite()) {
        return Err(Error::Numerical(format!(
            "mollifier width must be nonnegative, got {eps}"
        )));
    }
    let mut engine = FftEngine::new();
    let hat = forward_transform(&mut engine, theta0)?;
    Ok(inverse_transform(&mut engine, &hat.mollify(eps)))
}

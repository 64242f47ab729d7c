//! Empirical verification of the level-set machinery on solver output:
//! global and local truncation energy inequalities, the iterated truncation
//! sequence, sup-norm decay, mean-oscillation norms of the drift potentials
//! V_ij, level-set shrinking, and oscillation decay on parabolic cylinders.
//!
//! All checks are pure functions over an immutable [`SnapshotSeries`].
//! Gradients of truncated fields use second-order central differences in
//! physical space; spectral differentiation of a kinked field rings.

mod bmo;
mod constants;
mod geometry;
mod levelset;
mod local_energy;
mod oscillation;

pub use bmo::{bmo_drift_series, bmo_norm, BmoDriftRow};
pub use constants::{degiorgi_constants, DeGiorgiConstants};
pub use geometry::{periodic_ball, torus_distance};
pub use levelset::{
    degiorgi_auto_h, degiorgi_sequence, level_set_energy_check, level_set_shrink_check,
    linf_decay_check, LevelSign, LinfDecayReport, LinfDecayRow, ShrinkReport,
};
pub use local_energy::{local_energy_check, second_energy_check};
pub use oscillation::{oscillation_trace, top_gradient_centers, OscillationTrace};

use crate::error::{Error, Result};
use crate::field::PhysicalField;
use crate::grid::Grid;

/// Run metadata a diagnostic needs to interpret a series.
#[derive(Debug, Clone, serde::Serialize)]
pub struct SeriesMetadata {
    pub kappa: f64,
    pub epsilon: f64,
    pub operator: String,
}

/// Time-ordered physical-space snapshots of one run.
#[derive(Debug, Clone)]
pub struct SnapshotSeries {
    grid: Grid,
    times: Vec<f64>,
    fields: Vec<PhysicalField>,
    metadata: SeriesMetadata,
}

impl SnapshotSeries {
    pub fn new(
        times: Vec<f64>,
        fields: Vec<PhysicalField>,
        metadata: SeriesMetadata,
    ) -> Result<Self> {
        if times.len() < 2 || times.len() != fields.len() {
            return Err(Error::Diagnostic(format!(
                "series needs >= 2 snapshots with matching times, got {} times / {} fields",
                times.len(),
                fields.len()
            )));
        }
        if !times.windows(2).all(|w| w[1] > w[0]) {
            return Err(Error::Diagnostic(
                "snapshot times must be strictly increasing".into(),
            ));
        }
        let grid = fields[0].grid().clone();
        for f in &fields {
            f.grid().same_as(&grid)?;
        }
        Ok(SnapshotSeries {
            grid,
            times,
            fields,
            metadata,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn field(&self, i: usize) -> &PhysicalField {
        &self.fields[i]
    }

    pub fn metadata(&self) -> &SeriesMetadata {
        &self.metadata
    }

    pub fn first_time(&self) -> f64 {
        self.times[0]
    }

    pub fn last_time(&self) -> f64 {
        *self.times.last().unwrap()
    }

    /// Index of the snapshot nearest to `t`; error when `t` lies outside the
    /// covered interval by more than the matching tolerance.
    pub fn nearest_index(&self, t: f64) -> Result<usize> {
        let tol = 1e-9 * self.last_time().abs().max(1.0);
        if t < self.first_time() - tol || t > self.last_time() + tol {
            return Err(Error::Diagnostic(format!(
                "time {t} outside snapshot coverage [{}, {}]",
                self.first_time(),
                self.last_time()
            )));
        }
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (i, &ti) in self.times.iter().enumerate() {
            let d = (ti - t).abs();
            if d < best_d {
                best_d = d;
                best = i;
            }
        }
        Ok(best)
    }

    /// Indices of snapshots with `lo <= t <= hi` (inclusive, small tolerance).
    pub fn window(&self, lo: f64, hi: f64) -> Vec<usize> {
        let tol = 1e-9 * self.last_time().abs().max(1.0);
        self.times
            .iter()
            .enumerate()
            .filter(|(_, &t)| t >= lo - tol && t <= hi + tol)
            .map(|(i, _)| i)
            .collect()
    }

    /// Global extrema over every snapshot.
    pub fn min_max(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for f in &self.fields {
            for &v in f.values() {
                lo = lo.min(v);
                hi = hi.max(v);
            }
        }
        (lo, hi)
    }

    /// L2 norm squared of the first snapshot, the scale entering the
    /// absolute slack of the global level-set checks.
    pub fn initial_l2_sq(&self) -> f64 {
        self.fields[0].l2_norm_sq()
    }
}

/// Space-time region `[t0 - r^2, t0] x B_r(x0)` with the periodic metric.
#[derive(Debug, Clone)]
pub struct ParabolicCylinder {
    pub t0: f64,
    /// Grid-point multi-index of the spatial center.
    pub x0: Vec<usize>,
    pub r: f64,
}

impl ParabolicCylinder {
    pub fn new(t0: f64, x0: Vec<usize>, r: f64) -> Result<Self> {
        if !(r > 0.0 && r <= std::f64::consts::PI) {
            return Err(Error::Diagnostic(format!(
                "cylinder radius must lie in (0, pi], got {r}"
            )));
        }
        Ok(ParabolicCylinder { t0, x0, r })
    }

    /// Check that the cylinder sits inside the coverage of a series;
    /// cylinders reaching before the first snapshot are rejected, not
    /// clipped.
    pub fn check_coverage(&self, series: &SnapshotSeries) -> Result<()> {
        let tol = 1e-9 * series.last_time().abs().max(1.0);
        if self.t0 - self.r * self.r < series.first_time() - tol {
            return Err(Error::Diagnostic(format!(
                "cylinder [{:.4}, {:.4}] starts before snapshot coverage",
                self.t0 - self.r * self.r,
                self.t0
            )));
        }
        if self.t0 > series.last_time() + tol {
            return Err(Error::Diagnostic(format!(
                "cylinder top {:.4} beyond snapshot coverage",
                self.t0
            )));
        }
        if self.x0.len() != series.grid().dim() {
            return Err(Error::Diagnostic(
                "cylinder center dimension mismatch".into(),
            ));
        }
        Ok(())
    }
}

/// Outcome of one inequality check. `satisfied` is
/// `lhs <= rhs * (1 + tol_rel) + slack_abs + gradient_slack`.
#[derive(Debug, Clone, serde::Serialize)]
pub struct InequalityReport {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub satisfied: bool,
    /// Smallest constant making the inequality hold with it in place of the
    /// unknown constant of the estimate (lhs/rhs for constant-free checks).
    pub empirical_constant: f64,
    pub tol_rel: f64,
    pub slack_abs: f64,
    /// Sensitivity of the dissipation term to the gradient discretization,
    /// measured as the spread between forward- and central-difference
    /// quadratures.
    pub gradient_slack: f64,
    pub degenerate: bool,
    pub context: serde_json::Value,
}

impl InequalityReport {
    #[allow(clippy::too_many_arguments)]
    pub fn evaluate(
        name: impl Into<String>,
        lhs: f64,
        rhs: f64,
        empirical_constant: f64,
        tol_rel: f64,
        slack_abs: f64,
        gradient_slack: f64,
        degenerate: bool,
        context: serde_json::Value,
    ) -> Self {
        let satisfied = lhs <= rhs * (1.0 + tol_rel) + slack_abs + gradient_slack;
        InequalityReport {
            name: name.into(),
            lhs,
            rhs,
            satisfied,
            empirical_constant,
            tol_rel,
            slack_abs,
            gradient_slack,
            degenerate,
            context,
        }
    }
}

//! Vanishing-regularization study: for a decreasing list of eps values, run
//! with mollified data and the `eps * Lambda^3` term, check the uniform
//! energy bound, and measure pairwise distances between consecutive
//! solutions in discrete `L^2([0,T] x torus)`.

use crate::error::{Error, Result};
use crate::field::PhysicalField;
use crate::symbols::MultiplierSymbol;

use super::{mollify_initial_data, run, SolverConfig};

/// Relative slack on the uniform energy bound.
pub const ENERGY_BOUND_TOL: f64 = 1e-6;

#[derive(Debug, Clone, serde::Serialize)]
pub struct EpsilonRow {
    pub epsilon: f64,
    /// `|theta^eps(T)|_2^2 + 2 kappa int_0^T |grad theta^eps|_2^2 dt`.
    pub energy_lhs: f64,
    /// Whether the row satisfies `energy_lhs <= |theta_0|_2^2 (1 + tol)`.
    pub energy_bound_ok: bool,
    /// Distance to the next (smaller-eps) run, `L^2` in space-time;
    /// absent on the last row.
    pub distance_to_next: Option<f64>,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct EpsilonStudyReport {
    pub rows: Vec<EpsilonRow>,
    pub initial_l2_sq: f64,
    pub energy_bound_tol: f64,
    /// Pairwise distances decrease monotonically down the list.
    pub distances_decreasing: bool,
    /// Every run satisfied the uniform energy bound.
    pub uniform_bound_holds: bool,
}

pub fn epsilon_study(
    theta0: &PhysicalField,
    cfg: &SolverConfig,
    symbol: &MultiplierSymbol,
    eps_list: &[f64],
) -> Result<EpsilonStudyReport> {
    if eps_list.len() < 3 {
        return Err(Error::Config(vec![format!(
            "epsilon study needs at least 3 levels, got {}",
            eps_list.len()
        )]));
    }
    for pair in eps_list.windows(2) {
        if pair[1] >= pair[0] || pair[1].is_nan() {
            return Err(Error::Config(vec![
                "epsilon list must be strictly decreasing".into(),
            ]));
        }
    }
    if eps_list.iter().any(|&e| !(e > 0.0 && e.is_finite())) {
        return Err(Error::Config(vec![
            "epsilon values must be strictly positive".into(),
        ]));
    }

    let initial_l2_sq = theta0.l2_norm_sq();
    let mut trajectories: Vec<(Vec<f64>, Vec<PhysicalField>)> = Vec::new();
    let mut energies: Vec<f64> = Vec::new();

    for &eps in eps_list {
        let data = mollify_initial_data(theta0, eps)?;
        let mut run_cfg = cfg.clone();
        run_cfg.epsilon = eps;
        let mut times = Vec::new();
        let mut fields = Vec::new();
        let (_, summary) = run(&data, &run_cfg, symbol, |t, f| {
            times.push(t);
            fields.push(f.clone());
            Ok(())
        })?;
        energies.push(summary.final_l2.powi(2) + 2.0 * run_cfg.kappa * summary.integral_grad_sq);
        trajectories.push((times, fields));
    }

    // discrete space-time L2 distance between consecutive runs
    let mut distances = Vec::new();
    for w in trajectories.windows(2) {
        let (ta, fa) = &w[0];
        let (tb, fb) = &w[1];
        if ta.len() != tb.len() {
            return Err(Error::Numerical(
                "epsilon runs produced mismatched snapshot schedules".into(),
            ));
        }
        let sq_at: Vec<f64> = fa
            .iter()
            .zip(fb)
            .map(|(a, b)| {
                let cell = a.grid().cell_volume();
                a.values()
                    .iter()
                    .zip(b.values())
                    .map(|(x, y)| (x - y) * (x - y))
                    .sum::<f64>()
                    * cell
            })
            .collect();
        let mut integral = 0.0;
        for i in 1..ta.len() {
            integral += 0.5 * (ta[i] - ta[i - 1]) * (sq_at[i] + sq_at[i - 1]);
        }
        distances.push(integral.sqrt());
    }

    let bound = initial_l2_sq * (1.0 + ENERGY_BOUND_TOL);
    let rows: Vec<EpsilonRow> = eps_list
        .iter()
        .enumerate()
        .map(|(i, &epsilon)| EpsilonRow {
            epsilon,
            energy_lhs: energies[i],
            energy_bound_ok: energies[i] <= bound,
            distance_to_next: distances.get(i).copied(),
        })
        .collect();
    let distances_decreasing = distances.windows(2).all(|w| w[1] < w[0]);
    let uniform_bound_holds = rows.iter().all(|r| r.energy_bound_ok);

    Ok(EpsilonStudyReport {
        rows,
        initial_l2_sq,
        energy_bound_tol: ENERGY_BOUND_TOL,
        distances_decreasing,
        uniform_bound_holds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use crate::solver::TimeStepping;

    #[test]
    fn linear_case_monotone_convergence() {
        // zero symbol: the dynamics are diagonal and the distances shrink
        // at the rate set by the mollifier and the eps Lambda^3 factor
        let grid = Grid::new(&[16, 16]).unwrap();
        let symbol = MultiplierSymbol::zero(grid.clone());
        let theta0 = PhysicalField::from_fn(grid, |x| {
            (2.0 * x[0]).cos() + 0.5 * (x[0] + 3.0 * x[1]).sin()
        });
        let cfg = SolverConfig {
            kappa: 1.0,
            epsilon: 0.0,
            stepping: TimeStepping::Fixed(0.005),
            t_final: 0.1,
            dealias: true,
            project_vertical: false,
            forcing: None,
            snapshot_interval: 0.02,
        };
        let report = epsilon_study(&theta0, &cfg, &symbol, &[0.2, 0.1, 0.05, 0.025]).unwrap();
        assert!(report.distances_decreasing, "{:?}", report.rows);
        assert!(report.uniform_bound_holds);
    }

    #[test]
    fn rejects_bad_eps_lists() {
        let grid = Grid::new(&[8, 8]).unwrap();
        let symbol = MultiplierSymbol::zero(grid.clone());
        let theta0 = PhysicalField::zeros(grid);
        let cfg = SolverConfig {
            kappa: 1.0,
            epsilon: 0.0,
            stepping: TimeStepping::Fixed(0.01),
            t_final: 0.05,
            dealias: true,
            project_vertical: false,
            forcing: None,
            snapshot_interval: 0.05,
        };
        assert!(epsilon_study(&theta0, &cfg, &symbol, &[0.1, 0.05]).is_err());
        assert!(epsilon_study(&theta0, &cfg, &symbol, &[0.1, 0.2, 0.3]).is_err());
        assert!(epsilon_study(&theta0, &cfg, &symbol, &[0.1, 0.05, 0.0]).is_err());
    }
}

//! Subcommand implementations behind the command-line binary: run a
//! simulation to disk, scan a symbol table, run diagnostics over stored
//! snapshots, and the vanishing-regularization study.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::config::RunConfig;
use crate::diagnostics::{
    bmo_drift_series, degiorgi_auto_h, degiorgi_sequence, level_set_energy_check,
    level_set_shrink_check, linf_decay_check, local_energy_check, oscillation_trace,
    second_energy_check, top_gradient_centers, BmoDriftRow, InequalityReport, LevelSign,
    LinfDecayReport, OscillationTrace, ParabolicCylinder, ShrinkReport, SnapshotSeries,
};
use crate::error::{Error, Result};
use crate::io::{
    load_snapshot_dir, snapshot_file_name, write_json, write_snapshot, write_timeseries_csv,
    SnapshotHeader,
};
use crate::solver::epsilon::epsilon_study;
use crate::solver::{run, RunSummary};
use crate::symbols::{curved_region_scan, tij_from_symbol, SymbolKind};

/// `run --config C --out DIR`: advance the configured initial data, writing
/// snapshots and the time-series CSV into DIR.
pub fn cmd_run(config_path: &Path, out_dir: Option<&Path>) -> Result<RunSummary> {
    let cfg = RunConfig::parse(config_path)?;
    let grid = cfg.build_grid()?;
    let symbol = cfg.build_symbol(&grid)?;
    let solver_cfg = cfg.build_solver_config()?;
    let theta0 = cfg.build_initial(&grid)?;

    let dir = out_dir.unwrap_or(&cfg.output.dir).to_path_buf();
    fs::create_dir_all(&dir).map_err(|e| Error::io(dir.display().to_string(), e))?;

    let mut index = 0usize;
    let kappa = solver_cfg.kappa;
    let epsilon = solver_cfg.epsilon;
    let (_, summary) = run(&theta0, &solver_cfg, &symbol, |t, field| {
        let path = dir.join(snapshot_file_name(index));
        index += 1;
        write_snapshot(
            &path,
            field,
            &SnapshotHeader {
                time: t,
                kappa,
                epsilon,
            },
        )
    })?;
    write_timeseries_csv(&dir.join("timeseries.csv"), &summary)?;
    Ok(summary)
}

/// `symbols --config C --out F`: divergence/reality defects, growth
/// constant, T_ij reconstruction, and (mg only) the curved-region table.
pub fn cmd_symbols(config_path: &Path, out_path: &Path) -> Result<()> {
    let cfg = RunConfig::parse(config_path)?;
    let grid = cfg.build_grid()?;
    let symbol = cfg.build_symbol(&grid)?;
    let tij = tij_from_symbol(&symbol);

    let err = |e| Error::io(out_path.display().to_string(), e);
    let mut w = fs::File::create(out_path).map_err(err)?;
    let mut inner = || -> std::io::Result<()> {
        writeln!(w, "metric,value")?;
        writeln!(w, "kind,{}", symbol.kind().label())?;
        writeln!(
            w,
            "divergence_defect_max,{:.6e}",
            symbol.divergence_defect_max()
        )?;
        writeln!(w, "reality_defect_max,{:.6e}", symbol.reality_defect_max())?;
        writeln!(w, "growth_constant,{:.12e}", symbol.growth_constant())?;
        writeln!(w, "tij_sup,{:.12e}", tij.sup_entry())?;
        writeln!(
            w,
            "tij_reconstruction_defect_max,{:.6e}",
            tij.reconstruction_defect_max(&symbol)
        )?;
        Ok(())
    };
    inner().map_err(err)?;

    if matches!(symbol.kind(), SymbolKind::Mg(_)) {
        let rows = curved_region_scan(&symbol, 0.5, &[100, 200, 400])?;
        let inner = || -> std::io::Result<()> {
            writeln!(w)?;
            writeln!(w, "k1,k2,m1_abs,m2_abs,m3_abs,m2_over_k1")?;
            for r in rows {
                writeln!(
                    w,
                    "{},{},{:.12e},{:.12e},{:.12e},{:.12e}",
                    r.k1, r.k2, r.m1_abs, r.m2_abs, r.m3_abs, r.m2_over_k1
                )?;
            }
            Ok(())
        };
        inner().map_err(err)?;
    }
    Ok(())
}

#[derive(Debug, Serialize)]
pub struct DegiorgiReport {
    pub t0: f64,
    pub big_h: f64,
    pub c: Vec<f64>,
    pub nonincreasing: bool,
    /// `c_last / c_0`; NaN when c_0 vanishes.
    pub final_over_initial: f64,
}

#[derive(Debug, Serialize)]
pub struct DiagnoseReport {
    pub operator: String,
    pub kappa: f64,
    pub epsilon: f64,
    pub snapshots: usize,
    pub t_first: f64,
    pub t_last: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub energy: Option<Vec<InequalityReport>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub levelset: Option<Vec<InequalityReport>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub degiorgi: Option<DegiorgiReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub linf: Option<LinfDecayReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub local_energy: Option<Vec<InequalityReport>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub second_energy: Option<Vec<InequalityReport>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shrink: Option<Vec<ShrinkReport>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bmo: Option<Vec<BmoDriftRow>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oscillation: Option<Vec<OscillationTrace>>,
}

impl DiagnoseReport {
    /// True when every enabled check came back satisfied (or degenerate).
    pub fn all_satisfied(&self) -> bool {
        let ineqs_ok = |v: &Option<Vec<InequalityReport>>| {
            v.as_ref()
                .map(|rs| rs.iter().all(|r| r.satisfied))
                .unwrap_or(true)
        };
        ineqs_ok(&self.energy)
            && ineqs_ok(&self.levelset)
            && ineqs_ok(&self.local_energy)
            && ineqs_ok(&self.second_energy)
            && self
                .degiorgi
                .as_ref()
                .map(|d| d.nonincreasing)
                .unwrap_or(true)
            && self
                .shrink
                .as_ref()
                .map(|rs| rs.iter().all(|r| r.satisfied))
                .unwrap_or(true)
            && self
                .oscillation
                .as_ref()
                .map(|ts| {
                    ts.iter().all(|t| {
                        t.degenerate
                            || t.gamma_ratios
                                .iter()
                                .all(|&g| g.is_nan() || g <= 1.0 + 1e-12)
                    })
                })
                .unwrap_or(true)
    }
}

/// Evenly spread `count` consecutive index pairs across a series.
fn time_pairs(series: &SnapshotSeries, count: usize) -> Vec<(f64, f64)> {
    let last = series.len() - 1;
    let anchors: Vec<usize> = (0..=count).map(|j| (j * last) / count).collect();
    anchors
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| (series.times()[w[0]], series.times()[w[1]]))
        .collect()
}

/// `diagnose --snapshots DIR --config C --out F`: run the configured checks
/// over a stored series and write the JSON report.
pub fn cmd_diagnose(
    config_path: &Path,
    snapshots_dir: &Path,
    out_path: Option<&Path>,
) -> Result<DiagnoseReport> {
    let cfg = RunConfig::parse(config_path)?;
    let series = load_snapshot_dir(snapshots_dir, cfg.operator.label())?;
    let diag = &cfg.diagnostics;
    let grid = series.grid().clone();
    if grid.dims() != cfg.grid.dims.as_slice() {
        return Err(Error::GridMismatch(format!(
            "snapshots on {:?} but config declares {:?}",
            grid.dims(),
            cfg.grid.dims
        )));
    }

    let t0 = diag.t0.unwrap_or(series.last_time());
    let (series_min, series_max) = series.min_max();

    let mut report = DiagnoseReport {
        operator: cfg.operator.label().into(),
        kappa: series.metadata().kappa,
        epsilon: series.metadata().epsilon,
        snapshots: series.len(),
        t_first: series.first_time(),
        t_last: series.last_time(),
        energy: None,
        levelset: None,
        degiorgi: None,
        linf: None,
        local_energy: None,
        second_energy: None,
        shrink: None,
        bmo: None,
        oscillation: None,
    };

    for check in &diag.checks {
        match check.as_str() {
            "energy" => {
                // global energy law: the level-set inequality below the min
                let h = series_min - 0.1 * (series_max - series_min).max(1e-12);
                let rep = level_set_energy_check(
                    &series,
                    h,
                    series.first_time(),
                    series.last_time(),
                    LevelSign::Plus,
                )?;
                report.energy = Some(vec![rep]);
            }
            "levelset" => {
                let mut reps = Vec::new();
                let pairs = time_pairs(&series, diag.levelset_pair_count);
                for i in 0..diag.levelset_h_count {
                    let frac = i as f64 / (diag.levelset_h_count - 1).max(1) as f64;
                    let h = series_min + frac * (series_max - series_min);
                    for &(t1, t2) in &pairs {
                        reps.push(level_set_energy_check(&series, h, t1, t2, LevelSign::Plus)?);
                        reps.push(level_set_energy_check(
                            &series,
                            -h,
                            t1,
                            t2,
                            LevelSign::Minus,
                        )?);
                    }
                }
                report.levelset = Some(reps);
            }
            "degiorgi" => {
                let big_h = degiorgi_auto_h(&series, t0, diag.h_constant)?;
                let c = degiorgi_sequence(&series, t0, big_h, diag.degiorgi_n_max)?;
                let nonincreasing = c.windows(2).all(|w| w[1] <= w[0] + 1e-15);
                let final_over_initial = if c[0] > 0.0 {
                    c[c.len() - 1] / c[0]
                } else {
                    f64::NAN
                };
                report.degiorgi = Some(DegiorgiReport {
                    t0,
                    big_h,
                    c,
                    nonincreasing,
                    final_over_initial,
                });
            }
            "linf" => {
                report.linf = Some(linf_decay_check(&series)?);
            }
            "local_energy" => {
                let r_fit = fit_radius(&series, t0, diag.cylinder_radius);
                let centers = top_gradient_centers(&series, t0, diag.sample_count, r_fit / 2.0)?;
                let h = quantile_at(&series, t0, 0.5);
                let mut reps = Vec::new();
                for x0 in centers {
                    let cyl = ParabolicCylinder::new(t0, x0, r_fit)?;
                    reps.push(local_energy_check(&series, &cyl, 0.5, h, diag.c0)?);
                }
                report.local_energy = Some(reps);
            }
            "second_energy" => {
                let big_r = diag.cylinder_radius.min(std::f64::consts::PI);
                let centers = top_gradient_centers(&series, t0, diag.sample_count, big_r / 2.0)?;
                let (t1, t2) = (series.first_time(), series.last_time());
                let mut reps = Vec::new();
                for (i, x0) in centers.iter().enumerate() {
                    let q = 0.2 + 0.6 * (i as f64 / centers.len().max(1) as f64);
                    let h = quantile_at(&series, t0, q);
                    reps.push(second_energy_check(
                        &series,
                        x0,
                        0.5 * big_r,
                        big_r,
                        t1,
                        t2,
                        h,
                        diag.c0,
                    )?);
                }
                report.second_energy = Some(reps);
            }
            "shrink" => {
                let big_r = diag.cylinder_radius.min(std::f64::consts::PI);
                let centers = top_gradient_centers(
                    &series,
                    series.first_time(),
                    diag.sample_count,
                    big_r / 2.0,
                )?;
                let mut reps = Vec::new();
                for x0 in centers {
                    reps.push(level_set_shrink_check(
                        &series,
                        series.first_time(),
                        &x0,
                        big_r,
                        diag.c0,
                    )?);
                }
                report.shrink = Some(reps);
            }
            "bmo" => {
                let symbol = cfg.build_symbol(&grid)?;
                let tij = tij_from_symbol(&symbol);
                report.bmo = Some(bmo_drift_series(&series, &tij, diag.bmo_min_cells)?);
            }
            "oscillation" => {
                let r_max = fit_radius(&series, t0, diag.oscillation_r_max);
                let centers = top_gradient_centers(&series, t0, diag.sample_count, r_max)?;
                let mut traces = Vec::new();
                for x0 in centers {
                    traces.push(oscillation_trace(
                        &series,
                        t0,
                        &x0,
                        r_max,
                        diag.oscillation_levels,
                    )?);
                }
                report.oscillation = Some(traces);
            }
            other => {
                return Err(Error::Config(vec![format!(
                    "diagnostics.checks: unknown check '{other}'"
                )]))
            }
        }
    }

    if let Some(path) = out_path {
        write_json(path, &report)?;
    }
    Ok(report)
}

/// Largest cylinder radius that keeps `[t0 - r^2, t0]` inside coverage,
/// capped by the requested radius.
fn fit_radius(series: &SnapshotSeries, t0: f64, requested: f64) -> f64 {
    let depth = (t0 - series.first_time()).max(0.0);
    requested
        .min((0.98 * depth).sqrt())
        .min(std::f64::consts::PI)
}

/// q-quantile of the snapshot nearest t0.
fn quantile_at(series: &SnapshotSeries, t0: f64, q: f64) -> f64 {
    let i = series.nearest_index(t0).unwrap_or(series.len() - 1);
    let mut vals: Vec<f64> = series.field(i).values().to_vec();
    vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let pos = ((vals.len() - 1) as f64 * q).round() as usize;
    vals[pos]
}

/// `epsilon-study --config C --epsilons LIST --out F`.
pub fn cmd_epsilon_study(
    config_path: &Path,
    epsilons: &[f64],
    out_path: Option<&Path>,
) -> Result<crate::solver::epsilon::EpsilonStudyReport> {
    let cfg = RunConfig::parse(config_path)?;
    let grid = cfg.build_grid()?;
    let symbol = cfg.build_symbol(&grid)?;
    let solver_cfg = cfg.build_solver_config()?;
    let theta0 = cfg.build_initial(&grid)?;
    let report = epsilon_study(&theta0, &solver_cfg, &symbol, epsilons)?;

    if let Some(path) = out_path {
        let err = |e| Error::io(path.display().to_string(), e);
        let mut w = fs::File::create(path).map_err(err)?;
        let mut inner = || -> std::io::Result<()> {
            writeln!(
                w,
                "epsilon,energy_lhs,initial_l2_sq,energy_bound_ok,distance_to_next"
            )?;
            for row in &report.rows {
                writeln!(
                    w,
                    "{:.12e},{:.12e},{:.12e},{},{}",
                    row.epsilon,
                    row.energy_lhs,
                    report.initial_l2_sq,
                    row.energy_bound_ok,
                    row.distance_to_next
                        .map(|d| format!("{d:.12e}"))
                        .unwrap_or_default()
                )?;
            }
            Ok(())
        };
        inner().map_err(err)?;
    }
    Ok(report)
}

/// Parse a comma-separated epsilon list.
pub fn parse_epsilons(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|e| Error::Config(vec![format!("--epsilons: bad value '{s}': {e}")]))
        })
        .collect()
}

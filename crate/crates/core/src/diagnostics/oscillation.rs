//! Oscillation decay over shrinking parabolic cylinders and the fitted
//! regularity exponent.

use crate::error::{Error, Result};
use crate::grid::Grid;

use super::constants::degiorgi_constants;
use super::geometry::periodic_ball;
use super::SnapshotSeries;

/// Oscillation of the scalar over nested backward cylinders
/// `Q_{r_j}(t0, x0)` with radii `r_j = r_max * kappa0^j`.
#[derive(Debug, Clone, serde::Serialize)]
pub struct OscillationTrace {
    pub t0: f64,
    pub x0: Vec<usize>,
    /// Decreasing radii.
    pub radii: Vec<f64>,
    /// Oscillation per cylinder; nonincreasing along the list.
    pub osc: Vec<f64>,
    /// `osc(r_{j+1}) / osc(r_j)`, at most 1 by nestedness.
    pub gamma_ratios: Vec<f64>,
    /// Slope of log osc against log r; absent when too few usable levels.
    pub alpha: Option<f64>,
    /// Root-mean-square residual of the log-log fit.
    pub residual: Option<f64>,
    /// Every oscillation fell below the flat-region floor.
    pub degenerate: bool,
}

/// Minimum snapshots a cylinder window must contain.
const MIN_SNAPSHOTS: usize = 3;
/// Oscillations below this floor are excluded from the fit.
const OSC_FLOOR: f64 = 1e-12;

pub fn oscillation_trace(
    series: &SnapshotSeries,
    t0: f64,
    x0: &[usize],
    r_max: f64,
    levels: usize,
) -> Result<OscillationTrace> {
    if levels < 3 {
        return Err(Error::Diagnostic(format!(
            "need at least 3 cylinder levels, got {levels}"
        )));
    }
    if !(r_max > 0.0 && r_max <= std::f64::consts::PI) {
        return Err(Error::Diagnostic(format!(
            "r_max must lie in (0, pi], got {r_max}"
        )));
    }
    let grid = series.grid();
    let tol = 1e-9 * series.last_time().abs().max(1.0);
    if t0 - r_max * r_max < series.first_time() - tol {
        return Err(Error::Diagnostic(
            "outermost cylinder starts before snapshot coverage".into(),
        ));
    }
    let kappa0 = degiorgi_constants(grid.dim(), 1.0)?.kappa0;

    let mut radii = Vec::with_capacity(levels);
    let mut osc = Vec::with_capacity(levels);
    for j in 0..levels {
        let r = r_max * kappa0.powi(j as i32);
        let ball = periodic_ball(grid, x0, r);
        let window = series.window(t0 - r * r, t0);
        if window.len() < MIN_SNAPSHOTS {
            return Err(Error::Diagnostic(format!(
                "cylinder at radius {r:.4} holds fewer than {MIN_SNAPSHOTS} snapshots"
            )));
        }
        if ball.is_empty() {
            return Err(Error::Diagnostic(format!(
                "ball of radius {r:.4} contains no grid cells"
            )));
        }
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &i in &window {
            let vals = series.field(i).values();
            for &c in &ball {
                lo = lo.min(vals[c]);
                hi = hi.max(vals[c]);
            }
        }
        radii.push(r);
        osc.push(hi - lo);
    }

    // nested sets: the sup over a subset cannot exceed the sup over the set
    for w in osc.windows(2) {
        assert!(
            w[1] <= w[0] + 1e-15,
            "oscillation must be nondecreasing in r: {osc:?}"
        );
    }

    let gamma_ratios: Vec<f64> = osc
        .windows(2)
        .map(|w| if w[0] > 0.0 { w[1] / w[0] } else { f64::NAN })
        .collect();

    let usable: Vec<(f64, f64)> = radii
        .iter()
        .zip(&osc)
        .filter(|(_, &o)| o > OSC_FLOOR)
        .map(|(&r, &o)| (r.ln(), o.ln()))
        .collect();
    let degenerate = usable.is_empty();
    let (alpha, residual) = if usable.len() >= 3 {
        let n = usable.len() as f64;
        let mx = usable.iter().map(|p| p.0).sum::<f64>() / n;
        let my = usable.iter().map(|p| p.1).sum::<f64>() / n;
        let sxx: f64 = usable.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
        let sxy: f64 = usable.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let slope = sxy / sxx;
        let intercept = my - slope * mx;
        let rss: f64 = usable
            .iter()
            .map(|p| {
                let e = p.1 - (slope * p.0 + intercept);
                e * e
            })
            .sum();
        (Some(slope), Some((rss / n).sqrt()))
    } else {
        (None, None)
    };

    Ok(OscillationTrace {
        t0,
        x0: x0.to_vec(),
        radii,
        osc,
        gamma_ratios,
        alpha,
        residual,
        degenerate,
    })
}

/// Deterministic sampling of diagnostic centers: the grid points with the
/// largest finite-difference gradient magnitude at the snapshot nearest t0,
/// thinned so that no two centers are closer than `min_separation`. Flat
/// regions make oscillation traces degenerate, so steep cells are the
/// informative probes.
pub fn top_gradient_centers(
    series: &SnapshotSeries,
    t0: f64,
    count: usize,
    min_separation: f64,
) -> Result<Vec<Vec<usize>>> {
    let grid: &Grid = series.grid();
    let i0 = series.nearest_index(t0)?;
    let gsq = series.field(i0).fd_gradient_sq();
    let mut order: Vec<usize> = (0..grid.len()).collect();
    order.sort_by(|&a, &b| {
        gsq.values()[b]
            .partial_cmp(&gsq.values()[a])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let mut chosen: Vec<Vec<usize>> = Vec::new();
    for flat in order {
        if chosen.len() >= count {
            break;
        }
        let idx = grid.multi_index(flat);
        let far_enough = chosen
            .iter()
            .all(|c| super::geometry::torus_distance(grid, c, &idx) >= min_separation);
        if far_enough {
            chosen.push(idx);
        }
    }
    if chosen.len() < count {
        return Err(Error::Diagnostic(format!(
            "could only place {} of {count} centers with separation {min_separation}",
            chosen.len()
        )));
    }
    Ok(chosen)
}

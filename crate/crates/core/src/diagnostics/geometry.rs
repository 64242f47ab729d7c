//! Periodic balls, torus distances, and quadrature helpers shared by the
//! cylinder-based checks.

use crate::field::PhysicalField;
use crate::grid::Grid;

/// Distance between two grid points under the flat torus metric.
pub fn torus_distance(grid: &Grid, a: &[usize], b: &[usize]) -> f64 {
    let period = 2.0 * std::f64::consts::PI;
    let mut sq = 0.0;
    for axis in 0..grid.dim() {
        let xa = grid.coord(axis, a[axis]);
        let xb = grid.coord(axis, b[axis]);
        let mut d = (xa - xb).abs();
        if d > period / 2.0 {
            d = period - d;
        }
        sq += d * d;
    }
    sq.sqrt()
}

/// Flat indices of all grid cells within torus distance `r` of the grid
/// point `x0`. Radii are capped at pi by the cylinder constructors so the
/// periodic ball is unambiguous.
pub fn periodic_ball(grid: &Grid, x0: &[usize], r: f64) -> Vec<usize> {
    let d = grid.dim();
    let period = 2.0 * std::f64::consts::PI;
    // per-axis offsets within |dx| <= r, then filter by the full distance
    let mut per_axis: Vec<Vec<(usize, f64)>> = Vec::with_capacity(d);
    for axis in 0..d {
        let n = grid.dims()[axis];
        let h = grid.spacing(axis);
        let reach = (r / h).floor() as i64;
        let mut list = Vec::new();
        for off in -reach..=reach {
            let mut dx = off as f64 * h;
            if dx.abs() > period / 2.0 {
                continue;
            }
            dx = dx.abs().min(period - dx.abs());
            let idx = ((x0[axis] as i64 + off).rem_euclid(n as i64)) as usize;
            list.push((idx, dx));
        }
        per_axis.push(list);
    }
    let mut cells = Vec::new();
    let mut stack_idx = vec![0usize; d];
    'outer: loop {
        let mut sq = 0.0;
        let mut idx = vec![0usize; d];
        for axis in 0..d {
            let (i, dx) = per_axis[axis][stack_idx[axis]];
            idx[axis] = i;
            sq += dx * dx;
        }
        if sq.sqrt() <= r + 1e-12 {
            cells.push(grid.flat_index(&idx));
        }
        // advance odometer
        for axis in (0..d).rev() {
            stack_idx[axis] += 1;
            if stack_idx[axis] < per_axis[axis].len() {
                continue 'outer;
            }
            stack_idx[axis] = 0;
            if axis == 0 {
                break 'outer;
            }
        }
    }
    cells.sort_unstable();
    cells.dedup();
    cells
}

/// `cell_volume * sum over cells of f` (here used on nonnegative fields).
pub fn region_integral(f: &PhysicalField, cells: &[usize]) -> f64 {
    let cell = f.grid().cell_volume();
    cells.iter().map(|&i| f.values()[i]).sum::<f64>() * cell
}

/// Maximum of f over the listed cells.
pub fn region_max(f: &PhysicalField, cells: &[usize]) -> f64 {
    cells
        .iter()
        .map(|&i| f.values()[i])
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Trapezoid rule over the snapshot times `times[idx]` of the values
/// `values[pos]` (one value per index in `idx`, in order).
pub fn trapezoid(times: &[f64], idx: &[usize], values: &[f64]) -> f64 {
    debug_assert_eq!(idx.len(), values.len());
    let mut sum = 0.0;
    for w in 0..idx.len().saturating_sub(1) {
        let dt = times[idx[w + 1]] - times[idx[w]];
        sum += 0.5 * dt * (values[w] + values[w + 1]);
    }
    sum
}

/// Forward-difference squared-gradient sum, the companion of
/// [`PhysicalField::fd_gradient_sq`] used to report discretization slack.
pub fn forward_diff_gradient_sq(f: &PhysicalField) -> PhysicalField {
    let grid = f.grid().clone();
    let d = grid.dim();
    let strides = grid.strides();
    let mut sq = vec![0.0; grid.len()];
    for axis in 0..d {
        let n = grid.dims()[axis];
        let stride = strides[axis];
        let block = stride * n;
        let inv_h = 1.0 / grid.spacing(axis);
        for base_outer in 0..grid.len() / block {
            for inner in 0..stride {
                let base = base_outer * block + inner;
                for j in 0..n {
                    let here = base + j * stride;
                    let up = base + ((j + 1) % n) * stride;
                    let g = (f.values()[up] - f.values()[here]) * inv_h;
                    sq[here] += g * g;
                }
            }
        }
    }
    PhysicalField::new(grid, sq).unwrap()
}

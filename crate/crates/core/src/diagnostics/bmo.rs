//! Mean-oscillation norm over dyadic cubes, and its application to the
//! drift potentials `V_ij = T_ij theta` along a run.

use crate::error::{Error, Result};
use crate::fft::FftEngine;
use crate::field::{forward_transform, inverse_transform, PhysicalField};
use crate::symbols::TijSymbol;

use super::SnapshotSeries;

/// Dyadic mean-oscillation norm: the maximum over all dyadic cubes Q (side
/// from the full period down to `min_cells` grid cells per axis) of
/// `(1/|Q|) int_Q |f - mean_Q f|`.
pub fn bmo_norm(f: &PhysicalField, min_cells: usize) -> Result<f64> {
    if min_cells < 4 {
        return Err(Error::Diagnostic(format!(
            "min_cells must be >= 4, got {min_cells}"
        )));
    }
    let grid = f.grid();
    let d = grid.dim();
    let values = f.values();
    let mut worst = 0.0f64;

    let mut level = 0u32;
    loop {
        let parts = 1usize << level;
        // cube side in cells per axis at this level
        let sides: Vec<usize> = grid.dims().iter().map(|&n| n / parts).collect();
        if grid.dims().iter().any(|&n| n % parts != 0) || sides.iter().any(|&s| s < min_cells) {
            break;
        }
        // iterate the parts^d cubes of this level
        let mut cube = vec![0usize; d];
        loop {
            // gather cells of this cube
            let mut sum = 0.0f64;
            let mut count = 0usize;
            let mut cursor = vec![0usize; d];
            let mut idx = vec![0usize; d];
            loop {
                for a in 0..d {
                    idx[a] = cube[a] * sides[a] + cursor[a];
                }
                sum += values[grid.flat_index(&idx)];
                count += 1;
                let mut done = true;
                for a in (0..d).rev() {
                    cursor[a] += 1;
                    if cursor[a] < sides[a] {
                        done = false;
                        break;
                    }
                    cursor[a] = 0;
                }
                if done {
                    break;
                }
            }
            let mean = sum / count as f64;
            let mut dev = 0.0f64;
            let mut cursor = vec![0usize; d];
            loop {
                for a in 0..d {
                    idx[a] = cube[a] * sides[a] + cursor[a];
                }
                dev += (values[grid.flat_index(&idx)] - mean).abs();
                let mut done = true;
                for a in (0..d).rev() {
                    cursor[a] += 1;
                    if cursor[a] < sides[a] {
                        done = false;
                        break;
                    }
                    cursor[a] = 0;
                }
                if done {
                    break;
                }
            }
            worst = worst.max(dev / count as f64);

            let mut done = true;
            for a in (0..d).rev() {
                cube[a] += 1;
                if cube[a] < parts {
                    done = false;
                    break;
                }
                cube[a] = 0;
            }
            if done {
                break;
            }
        }
        level += 1;
    }
    Ok(worst)
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct BmoDriftRow {
    pub time: f64,
    /// `max_{i,j} bmo(V_ij(t, .))`.
    pub max_bmo: f64,
    pub linf_theta: f64,
    /// `max_bmo / |theta(t)|_inf`; NaN when theta vanishes.
    pub ratio: f64,
}

/// Mean-oscillation norms of every drift potential `V_ij = T_ij theta`
/// along a snapshot series.
pub fn bmo_drift_series(
    series: &SnapshotSeries,
    tij: &TijSymbol,
    min_cells: usize,
) -> Result<Vec<BmoDriftRow>> {
    series.grid().same_as(tij.grid())?;
    let d = series.grid().dim();
    let mut engine = FftEngine::new();
    let mut rows = Vec::with_capacity(series.len());
    for s in 0..series.len() {
        let theta = series.field(s);
        let theta_hat = forward_transform(&mut engine, theta)?;
        let mut max_bmo = 0.0f64;
        for i in 0..d {
            for j in 0..d {
                let v_hat = tij.apply(i, j, &theta_hat)?;
                let v = inverse_transform(&mut engine, &v_hat);
                max_bmo = max_bmo.max(bmo_norm(&v, min_cells)?);
            }
        }
        let linf = theta.max_abs();
        rows.push(BmoDriftRow {
            time: series.times()[s],
            max_bmo,
            linf_theta: linf,
            ratio: max_bmo / linf,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;

    #[test]
    fn constant_field_has_zero_bmo() {
        let grid = Grid::new(&[32, 32]).unwrap();
        let f = PhysicalField::from_fn(grid, |_| 4.2);
        assert!(bmo_norm(&f, 4).unwrap() < 1e-12);
    }

    #[test]
    fn shift_and_scale_invariances() {
        let grid = Grid::new(&[32, 32]).unwrap();
        let f = PhysicalField::from_fn(grid.clone(), |x| x[0].sin() + 0.3 * (3.0 * x[1]).cos());
        let b = bmo_norm(&f, 4).unwrap();
        // bmo(f + c) = bmo(f)
        let shifted =
            PhysicalField::new(grid.clone(), f.values().iter().map(|v| v + 7.0).collect()).unwrap();
        assert!((bmo_norm(&shifted, 4).unwrap() - b).abs() < 1e-12);
        // bmo(lambda f) = |lambda| bmo(f)
        let scaled =
            PhysicalField::new(grid.clone(), f.values().iter().map(|v| -2.5 * v).collect())
                .unwrap();
        assert!((bmo_norm(&scaled, 4).unwrap() - 2.5 * b).abs() < 1e-12 * 2.5 * b.max(1.0));
        // bounded by 2 |f|_inf
        assert!(b <= 2.0 * f.max_abs() + 1e-14);
        // shifts by multiples of the finest cube side (4 cells here) map
        // every dyadic partition onto itself, so the value is unchanged
        let shift = 4usize;
        let shifted_vals: Vec<f64> = (0..grid.len())
            .map(|flat| {
                let idx = grid.multi_index(flat);
                let src = [(idx[0] + shift) % 32, (idx[1] + shift) % 32];
                f.values()[grid.flat_index(&src)]
            })
            .collect();
        let cyc = PhysicalField::new(grid, shifted_vals).unwrap();
        let bc = bmo_norm(&cyc, 4).unwrap();
        assert!(
            (bc - b).abs() < 1e-12,
            "lattice shift changed bmo: {b} vs {bc}"
        );
    }

    #[test]
    fn zero_scalar_gives_zero_drift_rows() {
        use crate::symbols::{perp_riesz_symbol, tij_from_symbol};
        let grid = Grid::new(&[16, 16]).unwrap();
        let tij = tij_from_symbol(&perp_riesz_symbol(1, grid.clone()).unwrap());
        let times = vec![0.0, 0.1];
        let fields = vec![PhysicalField::zeros(grid); 2];
        let series = SnapshotSeries::new(
            times,
            fields,
            crate::diagnostics::SeriesMetadata {
                kappa: 1.0,
                epsilon: 0.0,
                operator: "perp_riesz".into(),
            },
        )
        .unwrap();
        let rows = bmo_drift_series(&series, &tij, 4).unwrap();
        for row in rows {
            assert_eq!(row.max_bmo, 0.0);
            assert_eq!(row.linf_theta, 0.0);
        }
    }

    #[test]
    fn single_mode_drift_is_bounded_by_amplitude() {
        use crate::symbols::{mg_symbol, tij_from_symbol, MgParams};
        let grid = Grid::new(&[16, 16, 16]).unwrap();
        let sym = mg_symbol(&MgParams::new(0.5, 1.0).unwrap(), grid.clone()).unwrap();
        let tij = tij_from_symbol(&sym);
        let times = vec![0.0, 0.1];
        let fields: Vec<PhysicalField> = times
            .iter()
            .map(|_| PhysicalField::from_fn(grid.clone(), |x| (x[1] + x[2]).cos()))
            .collect();
        let series = SnapshotSeries::new(
            times,
            fields,
            crate::diagnostics::SeriesMetadata {
                kappa: 1.0,
                epsilon: 0.0,
                operator: "mg".into(),
            },
        )
        .unwrap();
        let rows = bmo_drift_series(&series, &tij, 4).unwrap();
        // V_ij is a single mode of amplitude |T_ij(k)|; bmo <= 2 * that.
        // largest |T_ij(0,1,1)| = |M_j|/|k| ... = (2/3)/2 = 1/3
        let bound = 2.0 * (1.0 / 3.0);
        for row in rows {
            assert!(row.max_bmo <= bound + 1e-12, "{row:?}");
            assert!(row.max_bmo > 0.0);
        }
    }
}

//! The order-zero symbols `T_ij(k) = -(i k_i / |k|^2) M_j(k)` through which
//! the velocity factors as `u_j = d_i T_ij theta`. The mean mode carries the
//! zero matrix. `V_ij = T_ij theta` is the drift potential whose mean
//! oscillation the diagnostics track.

use num_complex::Complex64;

use crate::error::Result;
use crate::field::SpectralField;
use crate::grid::{k_norm_sq, Grid};

use super::MultiplierSymbol;

/// Tabulated `d x d` matrix symbol per mode, row-major `[i][j]` per flat
/// mode index.
#[derive(Debug, Clone)]
pub struct TijSymbol {
    grid: Grid,
    /// entries[flat * d * d + i * d + j]
    entries: Vec<Complex64>,
}

impl TijSymbol {
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    #[inline]
    pub fn at(&self, flat: usize, i: usize, j: usize) -> Complex64 {
        let d = self.grid.dim();
        self.entries[flat * d * d + i * d + j]
    }

    /// Largest entry magnitude over all modes; finite by construction and
    /// reported by the symbol scan.
    pub fn sup_entry(&self) -> f64 {
        self.entries.iter().fold(0.0f64, |m, c| m.max(c.norm()))
    }

    /// Largest per-mode relative defect of `sum_i (i k_i) T_ij(k) = M_j(k)`
    /// over modes k != 0. Components with `M_j(k) = 0` must reconstruct to
    /// exactly zero and are measured against the global symbol scale.
    pub fn reconstruction_defect_max(&self, symbol: &MultiplierSymbol) -> f64 {
        let d = self.grid.dim();
        let scale = (0..d)
            .flat_map(|j| symbol.component(j).iter())
            .fold(0.0f64, |m, c| m.max(c.norm()))
            .max(1e-300);
        let mut worst = 0.0f64;
        for (flat, k) in self.grid.iter_modes() {
            if k.iter().all(|&ki| ki == 0) {
                continue;
            }
            for j in 0..d {
                let mut sum = Complex64::default();
                for i in 0..d {
                    sum += Complex64::new(0.0, k[i] as f64) * self.at(flat, i, j);
                }
                let target = symbol.component(j)[flat];
                let denom = if target.norm() > 0.0 {
                    target.norm()
                } else {
                    scale
                };
                worst = worst.max((sum - target).norm() / denom);
            }
        }
        worst
    }

    /// Largest defect of the double-divergence identity
    /// `sum_ij (i k_i)(i k_j) T_ij(k) = 0` relative to the symbol scale.
    pub fn double_divergence_defect_max(&self, symbol: &MultiplierSymbol) -> f64 {
        let d = self.grid.dim();
        let scale = (0..d)
            .flat_map(|j| symbol.component(j).iter())
            .fold(0.0f64, |m, c| m.max(c.norm()))
            .max(1e-300);
        let mut worst = 0.0f64;
        for (flat, k) in self.grid.iter_modes() {
            let mut sum = Complex64::default();
            for i in 0..d {
                for j in 0..d {
                    sum += Complex64::new(0.0, k[i] as f64)
                        * Complex64::new(0.0, k[j] as f64)
                        * self.at(flat, i, j);
                }
            }
            let envelope = (1.0 + k_norm_sq(&k)) * scale;
            worst = worst.max(sum.norm() / envelope);
        }
        worst
    }

    /// `V_ij = T_ij theta` in spectral space.
    pub fn apply(&self, i: usize, j: usize, theta_hat: &SpectralField) -> Result<SpectralField> {
        self.grid.same_as(theta_hat.grid())?;
        let mut out = theta_hat.clone();
        for flat in 0..self.grid.len() {
            let t = self.at(flat, i, j);
            let c = out.coeffs_mut();
            c[flat] *= t;
        }
        Ok(out)
    }
}

/// Build the `T_ij` table from a multiplier symbol.
pub fn tij_from_symbol(symbol: &MultiplierSymbol) -> TijSymbol {
    let grid = symbol.grid().clone();
    let d = grid.dim();
    let mut entries = vec![Complex64::default(); grid.len() * d * d];
    for (flat, k) in grid.iter_modes() {
        let kk = k_norm_sq(&k);
        if kk == 0.0 {
            continue; // zero matrix at the mean mode
        }
        for i in 0..d {
            let factor = Complex64::new(0.0, -(k[i] as f64) / kk);
            for j in 0..d {
                entries[flat * d * d + i * d + j] = factor * symbol.component(j)[flat];
            }
        }
    }
    TijSymbol { grid, entries }
}

//! Two-dimensional perp-Riesz velocity: `u = grad^perp T theta` with T a
//! Riesz transform. With `T(k) = i k_axis / |k|` the components
//! `M1 = -i k2 T(k)` and `M2 = i k1 T(k)` come out real and even, and
//! `k . M(k) = 0` by antisymmetry.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::Grid;

use super::{MultiplierSymbol, SymbolKind};

pub fn perp_riesz_symbol(axis: usize, grid: Grid) -> Result<MultiplierSymbol> {
    if grid.dim() != 2 {
        return Err(Error::Dimension(
            "the perp-riesz operator requires a 2-dimensional grid".into(),
        ));
    }
    if axis != 1 && axis != 2 {
        return Err(Error::Config(vec![format!(
            "operator.perp_riesz.axis: must be 1 or 2, got {axis}"
        )]));
    }
    let n = grid.len();
    let mut components = vec![vec![Complex64::default(); n]; 2];
    for (flat, k) in grid.iter_modes() {
        let kk = (k[0] * k[0] + k[1] * k[1]) as f64;
        if kk == 0.0 {
            continue; // T(0) = 0, mean mode carries no velocity
        }
        let k_axis = k[axis - 1] as f64;
        let knorm = kk.sqrt();
        // M1 = -i k2 * (i k_axis/|k|) = k2 k_axis / |k|
        // M2 =  i k1 * (i k_axis/|k|) = -k1 k_axis / |k|
        components[0][flat] = Complex64::new(k[1] as f64 * k_axis / knorm, 0.0);
        components[1][flat] = Complex64::new(-(k[0] as f64) * k_axis / knorm, 0.0);
    }
    MultiplierSymbol::new(grid, SymbolKind::PerpRiesz { axis }, components)
}

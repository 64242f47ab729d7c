//! The magnetogeostrophic velocity operator.
//!
//! With mean magnetic field along e2 and rotation along e3, the velocity is
//! recovered from the buoyancy scalar by the real, even Fourier multipliers
//!
//! ```text
//! M1(k) = (2 W k2 k3 |k|^2 - r k1 k2^2 k3) / (4 W^2 k3^2 |k|^2 + r^2 k2^4)
//! M2(k) = (-2 W k1 k3 |k|^2 - r k2^3 k3) / (4 W^2 k3^2 |k|^2 + r^2 k2^4)
//! M3(k) = (r k2^2 (k1^2 + k2^2))        / (4 W^2 k3^2 |k|^2 + r^2 k2^4)
//! ```
//!
//! for k3 != 0, where W is the rotation rate and r = beta^2/eta. On the
//! k3 = 0 plane the operator acts on nothing (the scalar has zero vertical
//! mean there); the table sets M1 = M2 = 0 and copies M3 from k3 = 1 so the
//! symbol is defined on the whole lattice.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::Grid;

use super::{MultiplierSymbol, SymbolKind};

/// Physical parameters entering the MG symbols. Only the combination
/// `beta^2 / eta` appears, alongside the rotation rate `omega`.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct MgParams {
    pub omega: f64,
    pub beta2_over_eta: f64,
}

impl MgParams {
    pub fn new(omega: f64, beta2_over_eta: f64) -> Result<Self> {
        let p = MgParams {
            omega,
            beta2_over_eta,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.omega.is_finite() || self.omega <= 0.0 {
            return Err(Error::Config(vec![format!(
                "operator.mg.omega: must be strictly positive and finite, got {}",
                self.omega
            )]));
        }
        if !self.beta2_over_eta.is_finite() || self.beta2_over_eta <= 0.0 {
            return Err(Error::Config(vec![format!(
                "operator.mg.beta2_over_eta: must be strictly positive and finite, got {}",
                self.beta2_over_eta
            )]));
        }
        Ok(())
    }
}

/// Closed-form MG symbol at a (not necessarily grid) wavenumber, k3 != 0
/// assumed handled by the caller for the k3 = 0 convention.
pub fn mg_symbol_at(params: &MgParams, k1: f64, k2: f64, k3: f64) -> [f64; 3] {
    let omega = params.omega;
    let r = params.beta2_over_eta;
    let kk = k1 * k1 + k2 * k2 + k3 * k3;
    let k2sq = k2 * k2;
    let denom = 4.0 * omega * omega * k3 * k3 * kk + r * r * k2sq * k2sq;
    if denom == 0.0 {
        return [0.0; 3];
    }
    let m1 = (2.0 * omega * k2 * k3 * kk - r * k1 * k2sq * k3) / denom;
    let m2 = (-2.0 * omega * k1 * k3 * kk - r * k2sq * k2 * k3) / denom;
    let m3 = (r * k2sq * (k1 * k1 + k2sq)) / denom;
    [m1, m2, m3]
}

/// Tabulate the MG multiplier on a 3-d grid, including the k3 = 0 convention.
pub fn mg_symbol(params: &MgParams, grid: Grid) -> Result<MultiplierSymbol> {
    if grid.dim() != 3 {
        return Err(Error::Dimension(
            "the mg operator requires a 3-dimensional grid".into(),
        ));
    }
    params.validate()?;
    let n = grid.len();
    let mut components = vec![vec![Complex64::default(); n]; 3];
    for (flat, k) in grid.iter_modes() {
        let values = if k[2] != 0 {
            mg_symbol_at(params, k[0] as f64, k[1] as f64, k[2] as f64)
        } else {
            // zero vertical mean: M1 = M2 = 0, M3 copied from k3 = 1
            let copy = mg_symbol_at(params, k[0] as f64, k[1] as f64, 1.0);
            [0.0, 0.0, copy[2]]
        };
        for (j, &v) in values.iter().enumerate() {
            components[j][flat] = Complex64::new(v, 0.0);
        }
    }
    MultiplierSymbol::new(grid, SymbolKind::Mg(params.clone()), components)
}

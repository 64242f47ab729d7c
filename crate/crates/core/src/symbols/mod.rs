//! Fourier multiplier operators mapping the scalar to its drift velocity:
//! the three-dimensional magnetogeostrophic operator, the two-dimensional
//! perp-Riesz operator, tables loaded from file, and the zero operator for
//! heat-only runs. Also the induced order-zero symbols `T_ij` with
//! `u_j = d_i T_ij theta`.

mod mg;
mod perp_riesz;
mod tij;

pub use mg::{mg_symbol, mg_symbol_at, MgParams};
pub use perp_riesz::perp_riesz_symbol;
pub use tij::{tij_from_symbol, TijSymbol};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::grid::{k_norm_sq, Grid};

/// Which operator a symbol table came from.
#[derive(Debug, Clone, PartialEq)]
pub enum SymbolKind {
    Mg(MgParams),
    PerpRiesz { axis: usize },
    Custom,
    Zero,
}

impl SymbolKind {
    pub fn label(&self) -> &'static str {
        match self {
            SymbolKind::Mg(_) => "mg",
            SymbolKind::PerpRiesz { .. } => "perp_riesz",
            SymbolKind::Custom => "custom",
            SymbolKind::Zero => "zero",
        }
    }
}

/// Tabulated multiplier `k -> (M_1(k), ..., M_d(k))` on a grid.
#[derive(Debug, Clone)]
pub struct MultiplierSymbol {
    grid: Grid,
    kind: SymbolKind,
    /// One table per velocity component, indexed by flat mode index.
    components: Vec<Vec<Complex64>>,
}

impl MultiplierSymbol {
    pub fn new(grid: Grid, kind: SymbolKind, components: Vec<Vec<Complex64>>) -> Result<Self> {
        if components.len() != grid.dim() {
            return Err(Error::Dimension(format!(
                "symbol has {} components for a {}-dimensional grid",
                components.len(),
                grid.dim()
            )));
        }
        for (j, table) in components.iter().enumerate() {
            if table.len() != grid.len() {
                return Err(Error::Dimension(format!(
                    "component {} table length {} does not match grid size {}",
                    j,
                    table.len(),
                    grid.len()
                )));
            }
        }
        Ok(MultiplierSymbol {
            grid,
            kind,
            components,
        })
    }

    /// All-zero symbol: the heat equation in disguise.
    pub fn zero(grid: Grid) -> Self {
        let n = grid.len();
        let d = grid.dim();
        MultiplierSymbol {
            grid,
            kind: SymbolKind::Zero,
            components: vec![vec![Complex64::default(); n]; d],
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn kind(&self) -> &SymbolKind {
        &self.kind
    }

    pub fn component(&self, j: usize) -> &[Complex64] {
        &self.components[j]
    }

    /// Multiplier vector at a flat mode index.
    pub fn at(&self, flat: usize) -> Vec<Complex64> {
        self.components.iter().map(|c| c[flat]).collect()
    }

    /// Largest divergence defect `|k . M(k)|` relative to the allowed
    /// envelope `(1 + |k|) * max_j |M_j(k)|`.
    pub fn divergence_defect_max(&self) -> f64 {
        let mut worst = 0.0f64;
        for (flat, k) in self.grid.iter_modes() {
            let mut dot = Complex64::default();
            let mut amp = 0.0f64;
            for (j, table) in self.components.iter().enumerate() {
                dot += Complex64::new(k[j] as f64, 0.0) * table[flat];
                amp = amp.max(table[flat].norm());
            }
            if amp == 0.0 {
                continue;
            }
            let envelope = (1.0 + k_norm_sq(&k).sqrt()) * amp;
            worst = worst.max(dot.norm() / envelope);
        }
        worst
    }

    /// Largest reality defect `|M_j(-k) - conj(M_j(k))|` relative to the
    /// largest table entry. Modes with a Nyquist component are excluded:
    /// the index N/2 stands for both +N/2 and -N/2, so grid mirroring
    /// cannot express -k there, and dealiasing removes that energy in
    /// every solver path anyway.
    pub fn reality_defect_max(&self) -> f64 {
        let scale = self
            .components
            .iter()
            .flat_map(|t| t.iter())
            .fold(0.0f64, |m, c| m.max(c.norm()))
            .max(1e-300);
        let d = self.grid.dim();
        let mut worst = 0.0f64;
        'modes: for flat in 0..self.grid.len() {
            let idx = self.grid.multi_index(flat);
            for a in 0..d {
                if idx[a] == self.grid.dims()[a] / 2 {
                    continue 'modes;
                }
            }
            let mirror: Vec<usize> = (0..d).map(|a| self.grid.mirror(a, idx[a])).collect();
            let mflat = self.grid.flat_index(&mirror);
            for table in &self.components {
                worst = worst.max((table[mflat] - table[flat].conj()).norm() / scale);
            }
        }
        worst
    }

    /// Check the structural invariants, as done when loading custom tables.
    pub fn validate(&self) -> Result<()> {
        let div = self.divergence_defect_max();
        if div > 1e-12 {
            return Err(Error::Format(format!(
                "symbol table violates divergence-free invariant: defect {div:.3e} > 1e-12"
            )));
        }
        let real = self.reality_defect_max();
        if real > 1e-12 {
            return Err(Error::Format(format!(
                "symbol table violates reality invariant: defect {real:.3e} > 1e-12"
            )));
        }
        Ok(())
    }

    /// `sup_{k != 0} max_j |M_j(k)| / |k|` over the grid modes.
    pub fn growth_constant(&self) -> f64 {
        let mut sup = 0.0f64;
        for (flat, k) in self.grid.iter_modes() {
            let kn = k_norm_sq(&k).sqrt();
            if kn == 0.0 {
                continue;
            }
            for table in &self.components {
                sup = sup.max(table[flat].norm() / kn);
            }
        }
        sup
    }
}

/// `u_j = M_j theta` in spectral space, one field per component.
pub fn apply_velocity(
    symbol: &MultiplierSymbol,
    theta_hat: &SpectralField,
) -> Result<Vec<SpectralField>> {
    symbol.grid().same_as(theta_hat.grid())?;
    let mut out = Vec::with_capacity(symbol.grid().dim());
    for j in 0..symbol.grid().dim() {
        let mut u = theta_hat.clone();
        let table = symbol.component(j);
        for (c, m) in u.coeffs_mut().iter_mut().zip(table) {
            *c *= m;
        }
        out.push(u);
    }
    Ok(out)
}

/// One row of the curved-region anisotropy scan.
#[derive(Debug, Clone, serde::Serialize)]
pub struct CurvedRegionRow {
    pub k1: i64,
    pub k2: i64,
    pub m1_abs: f64,
    pub m2_abs: f64,
    pub m3_abs: f64,
    /// `|M_2| / k1`, the quantity that stabilizes to a prefactor
    /// as k1 grows.
    pub m2_over_k1: f64,
}

/// Evaluate the MG symbols along the curve `k = (k1, round(k1^sigma), 1)`.
///
/// These wavenumbers are evaluated from the closed-form symbols directly and
/// need not lie on the symbol's grid.
pub fn curved_region_scan(
    symbol: &MultiplierSymbol,
    sigma: f64,
    k1_list: &[i64],
) -> Result<Vec<CurvedRegionRow>> {
    let params = match symbol.kind() {
        SymbolKind::Mg(p) => p.clone(),
        other => {
            return Err(Error::Diagnostic(format!(
                "curved-region scan requires the mg operator, got {}",
                other.label()
            )))
        }
    };
    if !(sigma > 0.0 && sigma <= 0.5) {
        return Err(Error::Diagnostic(format!(
            "sigma must lie in (0, 1/2], got {sigma}"
        )));
    }
    let mut rows = Vec::with_capacity(k1_list.len());
    for &k1 in k1_list {
        if k1 < 4 {
            return Err(Error::Diagnostic(format!(
                "curved-region scan needs k1 >= 4, got {k1}"
            )));
        }
        let k2 = (k1 as f64).powf(sigma).round() as i64;
        let m = mg_symbol_at(&params, k1 as f64, k2 as f64, 1.0);
        rows.push(CurvedRegionRow {
            k1,
            k2,
            m1_abs: m[0].abs(),
            m2_abs: m[1].abs(),
            m3_abs: m[2].abs(),
            m2_over_k1: m[1].abs() / k1 as f64,
        });
    }
    Ok(rows)
}

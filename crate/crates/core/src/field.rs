//! Scalar fields on the torus, in physical samples and Fourier coefficients,
//! together with the multiplier-side operators: spectral gradient, 2/3-rule
//! dealiasing, zero-vertical-mean projection, pointwise truncation, and the
//! Gaussian mollifier.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft::FftEngine;
use crate::grid::{k_norm_sq, Grid};

/// Real samples at grid points, row-major with the last axis fastest.
#[derive(Debug, Clone)]
pub struct PhysicalField {
    grid: Grid,
    values: Vec<f64>,
}

impl PhysicalField {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Dimension(format!(
                "value count {} does not match grid size {}",
                values.len(),
                grid.len()
            )));
        }
        Ok(PhysicalField { grid, values })
    }

    pub fn zeros(grid: Grid) -> Self {
        let n = grid.len();
        PhysicalField {
            grid,
            values: vec![0.0; n],
        }
    }

    /// Sample a function of the physical coordinates at every grid point.
    pub fn from_fn(grid: Grid, mut f: impl FnMut(&[f64]) -> f64) -> Self {
        let d = grid.dim();
        let mut values = Vec::with_capacity(grid.len());
        let mut x = vec![0.0; d];
        for flat in 0..grid.len() {
            let idx = grid.multi_index(flat);
            for a in 0..d {
                x[a] = grid.coord(a, idx[a]);
            }
            values.push(f(&x));
        }
        PhysicalField { grid, values }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Continuum L2 norm squared: cell volume times the sample sum.
    pub fn l2_norm_sq(&self) -> f64 {
        let cell = self.grid.cell_volume();
        self.values.iter().map(|v| v * v).sum::<f64>() * cell
    }

    pub fn l2_norm(&self) -> f64 {
        self.l2_norm_sq().sqrt()
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// Pointwise `max(f - h, 0)`.
    pub fn truncate_plus(&self, h: f64) -> PhysicalField {
        let values = self.values.iter().map(|&v| (v - h).max(0.0)).collect();
        PhysicalField {
            grid: self.grid.clone(),
            values,
        }
    }

    /// Pointwise negation, for running one-sided checks on -theta.
    pub fn negated(&self) -> PhysicalField {
        PhysicalField {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| -v).collect(),
        }
    }

    /// Second-order central finite-difference gradient, periodic wrap.
    ///
    /// Used by the level-set diagnostics: spectral differentiation of the
    /// truncated fields rings at the kink, central differences do not.
    pub fn fd_gradient(&self) -> Vec<PhysicalField> {
        let grid = &self.grid;
        let d = grid.dim();
        let strides = grid.strides();
        let mut out = Vec::with_capacity(d);
        for axis in 0..d {
            let n = grid.dims()[axis];
            let stride = strides[axis];
            let block = stride * n;
            let inv_2h = 1.0 / (2.0 * grid.spacing(axis));
            let mut g = vec![0.0; grid.len()];
            for base_outer in 0..grid.len() / block {
                for inner in 0..stride {
                    let base = base_outer * block + inner;
                    for j in 0..n {
                        let up = base + ((j + 1) % n) * stride;
                        let dn = base + ((j + n - 1) % n) * stride;
                        g[base + j * stride] = (self.values[up] - self.values[dn]) * inv_2h;
                    }
                }
            }
            out.push(PhysicalField {
                grid: grid.clone(),
                values: g,
            });
        }
        out
    }

    /// Sum over axes of the squared finite-difference gradient.
    pub fn fd_gradient_sq(&self) -> PhysicalField {
        let grads = self.fd_gradient();
        let mut sq = vec![0.0; self.grid.len()];
        for g in &grads {
            for (s, v) in sq.iter_mut().zip(g.values()) {
                *s += v * v;
            }
        }
        PhysicalField {
            grid: self.grid.clone(),
            values: sq,
        }
    }
}

/// Complex Fourier coefficients of a real scalar; Hermitian-symmetric.
#[derive(Debug, Clone)]
pub struct SpectralField {
    grid: Grid,
    coeffs: Vec<Complex64>,
}

impl SpectralField {
    pub fn new(grid: Grid, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::Dimension(format!(
                "coefficient count {} does not match grid size {}",
                coeffs.len(),
                grid.len()
            )));
        }
        Ok(SpectralField { grid, coeffs })
    }

    pub fn zeros(grid: Grid) -> Self {
        let n = grid.len();
        SpectralField {
            grid,
            coeffs: vec![Complex64::default(); n],
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    /// Coefficient at an integer wavenumber vector (each |k_a| within range).
    pub fn coeff_at(&self, k: &[i64]) -> Complex64 {
        let idx: Vec<usize> = k
            .iter()
            .enumerate()
            .map(|(a, &ka)| {
                let n = self.grid.dims()[a] as i64;
                (ka.rem_euclid(n)) as usize
            })
            .collect();
        self.coeffs[self.grid.flat_index(&idx)]
    }

    pub fn set_coeff(&mut self, k: &[i64], value: Complex64) {
        let idx: Vec<usize> = k
            .iter()
            .enumerate()
            .map(|(a, &ka)| {
                let n = self.grid.dims()[a] as i64;
                (ka.rem_euclid(n)) as usize
            })
            .collect();
        let flat = self.grid.flat_index(&idx);
        self.coeffs[flat] = value;
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs
            .iter()
            .all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// Parseval-weighted L2 norm squared: `(2*pi)^d * sum |coeff|^2`.
    pub fn l2_norm_sq(&self) -> f64 {
        self.grid.volume() * self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>()
    }

    pub fn l2_norm(&self) -> f64 {
        self.l2_norm_sq().sqrt()
    }

    /// Homogeneous H^1 seminorm squared: `(2*pi)^d * sum |k|^2 |coeff|^2`.
    pub fn h1_seminorm_sq(&self) -> f64 {
        let mut sum = 0.0;
        for (flat, k) in self.grid.iter_modes() {
            sum += k_norm_sq(&k) * self.coeffs[flat].norm_sqr();
        }
        self.grid.volume() * sum
    }

    /// |Lambda^{3/2}|-seminorm squared: `(2*pi)^d * sum |k|^3 |coeff|^2`.
    pub fn lambda32_seminorm_sq(&self) -> f64 {
        let mut sum = 0.0;
        for (flat, k) in self.grid.iter_modes() {
            sum += k_norm_sq(&k).powf(1.5) * self.coeffs[flat].norm_sqr();
        }
        self.grid.volume() * sum
    }

    /// Largest relative Hermitian-symmetry defect,
    /// `max_k |coeff(-k) - conj(coeff(k))| / max(1, max |coeff|)`.
    pub fn hermitian_defect(&self) -> f64 {
        let scale = self
            .coeffs
            .iter()
            .fold(0.0f64, |m, c| m.max(c.norm()))
            .max(1e-300);
        let mut worst = 0.0f64;
        let d = self.grid.dim();
        for flat in 0..self.grid.len() {
            let idx = self.grid.multi_index(flat);
            let mirror: Vec<usize> = (0..d).map(|a| self.grid.mirror(a, idx[a])).collect();
            let mflat = self.grid.flat_index(&mirror);
            let defect = (self.coeffs[mflat] - self.coeffs[flat].conj()).norm();
            worst = worst.max(defect / scale);
        }
        worst
    }

    /// Spectral partial derivative along `axis`: multiply by `i * k_axis`.
    pub fn derivative(&self, axis: usize) -> SpectralField {
        let mut out = self.clone();
        for (flat, k) in self.grid.iter_modes() {
            out.coeffs[flat] = self.coeffs[flat] * Complex64::new(0.0, k[axis] as f64);
        }
        out
    }

    /// All spectral partial derivatives.
    pub fn gradient(&self) -> Vec<SpectralField> {
        (0..self.grid.dim()).map(|a| self.derivative(a)).collect()
    }

    /// 2/3-rule dealiasing: zero every mode where any `|k_a| > N_a / 3`.
    pub fn dealias(&self) -> SpectralField {
        let mut out = self.clone();
        out.dealias_in_place();
        out
    }

    pub fn dealias_in_place(&mut self) {
        let cutoffs: Vec<f64> = self.grid.dims().iter().map(|&n| n as f64 / 3.0).collect();
        let grid = self.grid.clone();
        for (flat, k) in grid.iter_modes() {
            if k.iter()
                .zip(&cutoffs)
                .any(|(&ka, &cut)| (ka.abs() as f64) > cut)
            {
                self.coeffs[flat] = Complex64::default();
            }
        }
    }

    /// Zero the `k_3 = 0` spectral plane (three dimensions only).
    pub fn project_zero_vertical_mean(&self) -> Result<SpectralField> {
        let mut out = self.clone();
        out.project_zero_vertical_mean_in_place()?;
        Ok(out)
    }

    pub fn project_zero_vertical_mean_in_place(&mut self) -> Result<()> {
        if self.grid.dim() != 3 {
            return Err(Error::Dimension(
                "zero-vertical-mean projection requires d = 3".into(),
            ));
        }
        let n3 = self.grid.dims()[2];
        // last axis fastest: k3 = 0 entries sit at flat indices divisible by n3
        for flat in (0..self.grid.len()).step_by(n3) {
            self.coeffs[flat] = Complex64::default();
        }
        Ok(())
    }

    /// Gaussian mollification: multiply mode k by `exp(-(eps*|k|)^2 / 2)`.
    pub fn mollify(&self, eps: f64) -> SpectralField {
        let mut out = self.clone();
        for (flat, k) in self.grid.iter_modes() {
            let arg = eps * eps * k_norm_sq(&k) / 2.0;
            out.coeffs[flat] = self.coeffs[flat] * (-arg).exp();
        }
        out
    }
}

/// Forward transform: physical samples to normalized Fourier coefficients.
pub fn forward_transform(engine: &mut FftEngine, f: &PhysicalField) -> Result<SpectralField> {
    if !f.is_finite() {
        return Err(Error::Numerical(
            "forward transform input contains non-finite values".into(),
        ));
    }
    let mut data: Vec<Complex64> = f.values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    engine.forward(&f.grid, &mut data);
    Ok(SpectralField {
        grid: f.grid.clone(),
        coeffs: data,
    })
}

/// Inverse transform: Fourier coefficients to physical samples.
///
/// The imaginary residue of the synthesis is discarded; for Hermitian input
/// it is at rounding level.
pub fn inverse_transform(engine: &mut FftEngine, f: &SpectralField) -> PhysicalField {
    let mut data = f.coeffs.clone();
    engine.inverse(&f.grid, &mut data);
    PhysicalField {
        grid: f.grid.clone(),
        values: data.iter().map(|c| c.re).collect(),
    }
}

/// Largest relative imaginary residue of the synthesis of `f`, used by tests
/// to confirm that multiplier outputs stay real-valued fields.
pub fn synthesis_imag_defect(engine: &mut FftEngine, f: &SpectralField) -> f64 {
    let mut data = f.coeffs.clone();
    engine.inverse(&f.grid, &mut data);
    let scale = data.iter().fold(0.0f64, |m, c| m.max(c.norm())).max(1e-300);
    data.iter().fold(0.0f64, |m, c| m.max(c.im.abs())) / scale
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn tiny_grid() -> Grid {
        Grid::new(&[16, 16]).unwrap()
    }

    #[test]
    fn constant_field_transforms_to_zero_mode() {
        let grid = tiny_grid();
        let f = PhysicalField::from_fn(grid.clone(), |_| 3.25);
        let mut engine = FftEngine::new();
        let fh = forward_transform(&mut engine, &f).unwrap();
        assert_relative_eq!(fh.coeff_at(&[0, 0]).re, 3.25, max_relative = 1e-13);
        let rest: f64 = fh
            .coeffs()
            .iter()
            .skip(1)
            .map(|c| c.norm())
            .fold(0.0, f64::max);
        assert!(rest < 1e-13);
    }

    #[test]
    fn cos_mode_on_3d_grid() {
        let grid = Grid::new(&[16, 16, 16]).unwrap();
        let f = PhysicalField::from_fn(grid, |x| x[0].cos());
        let mut engine = FftEngine::new();
        let fh = forward_transform(&mut engine, &f).unwrap();
        assert_relative_eq!(fh.coeff_at(&[1, 0, 0]).re, 0.5, max_relative = 1e-12);
        assert_relative_eq!(fh.coeff_at(&[-1, 0, 0]).re, 0.5, max_relative = 1e-12);
        assert!(fh.hermitian_defect() < 1e-13);
    }

    #[test]
    fn parseval_on_random_field() {
        let grid = Grid::new(&[32, 32]).unwrap();
        let f = PhysicalField::from_fn(grid, |x| {
            (3.0 * x[0]).sin() * (2.0 * x[1]).cos() + 0.4 * (x[0] + 5.0 * x[1]).cos()
        });
        let mut engine = FftEngine::new();
        let fh = forward_transform(&mut engine, &f).unwrap();
        assert_relative_eq!(f.l2_norm_sq(), fh.l2_norm_sq(), max_relative = 1e-10);
    }

    #[test]
    fn parseval_on_64_cubed() {
        let grid = Grid::new(&[64, 64, 64]).unwrap();
        let f = PhysicalField::from_fn(grid, |x| {
            (5.0 * x[0] - x[2]).sin() * (3.0 * x[1]).cos() + 0.2 * (x[0] + x[1] + x[2]).cos()
        });
        let mut engine = FftEngine::new();
        let fh = forward_transform(&mut engine, &f).unwrap();
        assert_relative_eq!(f.l2_norm_sq(), fh.l2_norm_sq(), max_relative = 1e-10);
    }

    #[test]
    fn non_finite_input_rejected() {
        let grid = tiny_grid();
        let mut f = PhysicalField::zeros(grid);
        f.values_mut()[3] = f64::NAN;
        let mut engine = FftEngine::new();
        assert!(forward_transform(&mut engine, &f).is_err());
    }

    #[test]
    fn gradient_of_single_mode() {
        let grid = tiny_grid();
        let f = PhysicalField::from_fn(grid.clone(), |x| x[0].cos());
        let mut engine = FftEngine::new();
        let fh = forward_transform(&mut engine, &f).unwrap();
        let grads = fh.gradient();
        let d0 = inverse_transform(&mut engine, &grads[0]);
        let expect = PhysicalField::from_fn(grid, |x| -x[0].sin());
        for (a, b) in d0.values().iter().zip(expect.values()) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(grads[1].l2_norm() < 1e-12);
    }

    #[test]
    fn gradient_parseval_identity() {
        // f = cos(x0 + 2 x1): |grad f|_2^2 = 5 |f|_2^2
        let grid = tiny_grid();
        let f = PhysicalField::from_fn(grid, |x| (x[0] + 2.0 * x[1]).cos());
        let mut engine = FftEngine::new();
        let fh = forward_transform(&mut engine, &f).unwrap();
        assert_relative_eq!(
            fh.h1_seminorm_sq(),
            5.0 * fh.l2_norm_sq(),
            max_relative = 1e-10
        );
    }

    #[test]
    fn dealias_rule_arithmetic_n16() {
        let grid = tiny_grid();
        let mut fh = SpectralField::zeros(grid.clone());
        for k in 0..=8i64 {
            fh.set_coeff(&[k, 0], Complex64::new(1.0, 0.0));
        }
        let cut = fh.dealias();
        for k in 0..=5i64 {
            assert_eq!(cut.coeff_at(&[k, 0]), Complex64::new(1.0, 0.0), "k={k}");
        }
        for k in 6..=8i64 {
            assert_eq!(cut.coeff_at(&[k, 0]), Complex64::default(), "k={k}");
        }
    }

    #[test]
    fn projections_idempotent_commuting_nonincreasing() {
        let grid = Grid::new(&[8, 8, 8]).unwrap();
        let f = PhysicalField::from_fn(grid, |x| {
            (3.0 * x[0]).cos() + (x[1] - 2.0 * x[2]).sin() + x[2].cos() * x[0].sin()
        });
        let mut engine = FftEngine::new();
        let fh = forward_transform(&mut engine, &f).unwrap();

        let da = fh.dealias();
        assert!(da.l2_norm() <= fh.l2_norm() + 1e-14);
        let daa = da.dealias();
        for (a, b) in da.coeffs().iter().zip(daa.coeffs()) {
            assert_eq!(a, b);
        }

        let pv = fh.project_zero_vertical_mean().unwrap();
        assert!(pv.l2_norm() <= fh.l2_norm() + 1e-14);
        let pvv = pv.project_zero_vertical_mean().unwrap();
        for (a, b) in pv.coeffs().iter().zip(pvv.coeffs()) {
            assert_eq!(a, b);
        }

        let ab = fh.dealias().project_zero_vertical_mean().unwrap();
        let ba = fh.project_zero_vertical_mean().unwrap().dealias();
        for (a, b) in ab.coeffs().iter().zip(ba.coeffs()) {
            assert_eq!(a, b);
        }
    }

    #[test]
    fn vertical_projection_kills_x3_independent_fields() {
        let grid = Grid::new(&[8, 8, 8]).unwrap();
        let f = PhysicalField::from_fn(grid.clone(), |x| x[0].cos());
        let mut engine = FftEngine::new();
        let fh = forward_transform(&mut engine, &f).unwrap();
        let pv = fh.project_zero_vertical_mean().unwrap();
        assert!(pv.l2_norm() < 1e-13);

        let g = PhysicalField::from_fn(grid, |x| x[2].cos());
        let gh = forward_transform(&mut engine, &g).unwrap();
        let pg = gh.project_zero_vertical_mean().unwrap();
        assert_relative_eq!(pg.l2_norm_sq(), gh.l2_norm_sq(), max_relative = 1e-12);
    }

    #[test]
    fn vertical_projection_rejects_2d() {
        let grid = tiny_grid();
        let fh = SpectralField::zeros(grid);
        assert!(fh.project_zero_vertical_mean().is_err());
    }

    #[test]
    fn truncate_plus_pointwise() {
        let grid = tiny_grid();
        let f = PhysicalField::from_fn(grid, |x| x[0].sin());
        let t = f.truncate_plus(0.5);
        for (v, t) in f.values().iter().zip(t.values()) {
            assert_eq!(*t, (v - 0.5).max(0.0));
            assert!(*t >= 0.0);
        }
        let all = f.truncate_plus(2.0);
        assert!(all.values().iter().all(|&v| v == 0.0));
        let none = f.truncate_plus(-2.0);
        for (v, t) in f.values().iter().zip(none.values()) {
            assert_relative_eq!(v + 2.0, *t, max_relative = 1e-15);
        }
    }

    #[test]
    fn mollify_scales_single_mode() {
        let grid = tiny_grid();
        let f = PhysicalField::from_fn(grid, |x| (2.0 * x[0] + x[1]).cos());
        let mut engine = FftEngine::new();
        let fh = forward_transform(&mut engine, &f).unwrap();
        let eps = 0.3;
        let m = fh.mollify(eps);
        let factor = (-(eps * eps) * 5.0 / 2.0).exp();
        assert_relative_eq!(m.coeff_at(&[2, 1]).re, 0.5 * factor, max_relative = 1e-12);
        assert!(m.l2_norm() <= fh.l2_norm());
        // eps -> 0 recovers the field
        let near = fh.mollify(1e-9);
        assert_relative_eq!(near.l2_norm_sq(), fh.l2_norm_sq(), max_relative = 1e-12);
    }

    #[test]
    fn fd_gradient_matches_spectral_for_smooth_low_mode() {
        let grid = Grid::new(&[64, 64]).unwrap();
        let f = PhysicalField::from_fn(grid, |x| x[0].sin());
        let g = f.fd_gradient();
        // central difference of sin: cos(x) * sin(h)/h
        let h = f.grid().spacing(0);
        let damp = h.sin() / h;
        let expect = PhysicalField::from_fn(f.grid().clone(), |x| x[0].cos() * damp);
        for (a, b) in g[0].values().iter().zip(expect.values()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn roundtrip_identity_random_fields(seed in 0u64..1000) {
            let grid = Grid::new(&[16, 16]).unwrap();
            let mut state = seed.wrapping_mul(0x9e3779b97f4a7c15).wrapping_add(1);
            let mut next = move || {
                state ^= state << 13;
                state ^= state >> 7;
                state ^= state << 17;
                (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
            };
            let values: Vec<f64> = (0..grid.len()).map(|_| next()).collect();
            let f = PhysicalField::new(grid, values).unwrap();
            let mut engine = FftEngine::new();
            let fh = forward_transform(&mut engine, &f).unwrap();
            prop_assert!(fh.hermitian_defect() < 1e-13);
            let back = inverse_transform(&mut engine, &fh);
            let scale = f.max_abs().max(1e-300);
            for (a, b) in f.values().iter().zip(back.values()) {
                prop_assert!((a - b).abs() / scale < 1e-12);
            }
        }

        #[test]
        fn truncate_lipschitz_in_h(h1 in -1.5f64..1.5, h2 in -1.5f64..1.5) {
            let grid = Grid::new(&[8, 8]).unwrap();
            let f = PhysicalField::from_fn(grid, |x| x[0].sin() + 0.3 * (2.0 * x[1]).cos());
            let t1 = f.truncate_plus(h1);
            let t2 = f.truncate_plus(h2);
            let max_diff = t1
                .values()
                .iter()
                .zip(t2.values())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            prop_assert!(max_diff <= (h1 - h2).abs() + 1e-15);
        }
    }
}

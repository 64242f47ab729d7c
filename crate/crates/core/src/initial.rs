//! Initial data constructors. Band-limited random fields draw one complex
//! Gaussian amplitude per Fourier mode from a counter-based generator keyed
//! on (seed, k), so the same seed produces the same continuum field on every
//! grid resolution and platform.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::grid::Grid;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Uniform in (0, 1], derived from 53 bits of a hashed counter.
fn unit_open(bits: u64) -> f64 {
    ((bits >> 11) as f64 + 1.0) / (1u64 << 53) as f64
}

/// Two standard normals from the counter `(seed, tag)` via Box-Muller.
fn gaussian_pair(seed: u64, tag: u64) -> (f64, f64) {
    let a = splitmix64(seed ^ splitmix64(tag));
    let b = splitmix64(a ^ 0x6a09_e667_f3bc_c909);
    let u1 = unit_open(a);
    let u2 = unit_open(b);
    let r = (-2.0 * u1.ln()).sqrt();
    let phi = 2.0 * std::f64::consts::PI * u2;
    (r * phi.cos(), r * phi.sin())
}

/// Stable tag for an integer wavenumber vector.
fn mode_tag(k: &[i64]) -> u64 {
    let mut tag = 0xcbf2_9ce4_8422_2325u64;
    for &ki in k {
        tag ^= ki as u64;
        tag = tag.wrapping_mul(0x0000_0100_0000_01b3);
    }
    tag
}

/// True for the canonical representative of each (k, -k) pair: first
/// nonzero component positive.
fn is_canonical(k: &[i64]) -> bool {
    for &ki in k {
        if ki > 0 {
            return true;
        }
        if ki < 0 {
            return false;
        }
    }
    false // the zero mode has no amplitude
}

/// Random band-limited field: every integer mode with
/// `k_min <= |k| <= k_max` receives an independent complex Gaussian
/// amplitude scaled by `amplitude`, Hermitian-paired so the field is real.
pub fn random_bandlimited(
    grid: &Grid,
    k_min: f64,
    k_max: f64,
    amplitude: f64,
    seed: u64,
) -> Result<SpectralField> {
    if !(k_min >= 0.0 && k_max >= k_min) {
        return Err(Error::Config(vec![format!(
            "initial.random_bandlimited: need 0 <= k_min <= k_max, got [{k_min}, {k_max}]"
        )]));
    }
    // the band must be representable below the dealiasing cutoff
    let representable = grid
        .dims()
        .iter()
        .map(|&n| n as f64 / 3.0)
        .fold(f64::INFINITY, f64::min);
    if k_max > representable {
        return Err(Error::Config(vec![format!(
            "initial.random_bandlimited: k_max = {k_max} exceeds the dealiased band {representable:.1} of the grid"
        )]));
    }
    let mut field = SpectralField::zeros(grid.clone());
    let d = grid.dim();
    for (flat, k) in grid.iter_modes() {
        if !is_canonical(&k) {
            continue;
        }
        let kn = crate::grid::k_norm_sq(&k).sqrt();
        if kn < k_min || kn > k_max {
            continue;
        }
        let (g1, g2) = gaussian_pair(seed, mode_tag(&k));
        let half = amplitude * 0.5;
        let coeff = Complex64::new(g1 * half, g2 * half);
        field.coeffs_mut()[flat] = coeff;
        // Hermitian partner
        let idx = grid.multi_index(flat);
        let mirror: Vec<usize> = (0..d).map(|a| grid.mirror(a, idx[a])).collect();
        let mflat = grid.flat_index(&mirror);
        field.coeffs_mut()[mflat] = coeff.conj();
    }
    Ok(field)
}

/// Superpose explicit cosine modes: `sum_i amp_i cos(k_i . x)`.
pub fn cosine_modes(grid: &Grid, modes: &[(Vec<i64>, f64)]) -> Result<SpectralField> {
    let mut field = SpectralField::zeros(grid.clone());
    for (k, amp) in modes {
        if k.len() != grid.dim() {
            return Err(Error::Config(vec![format!(
                "initial.modes: wavenumber {k:?} does not match grid dimension {}",
                grid.dim()
            )]));
        }
        for (a, &ka) in k.iter().enumerate() {
            if ka.unsigned_abs() as usize > grid.dims()[a] / 2 {
                return Err(Error::Config(vec![format!(
                    "initial.modes: wavenumber {k:?} not representable on the grid"
                )]));
            }
        }
        let half = Complex64::new(amp / 2.0, 0.0);
        let prev = field.coeff_at(k);
        field.set_coeff(k, prev + half);
        let neg: Vec<i64> = k.iter().map(|&ki| -ki).collect();
        let prev = field.coeff_at(&neg);
        field.set_coeff(&neg, prev + half);
    }
    Ok(field)
}

//! The fixed constants of the level-set shrinking lemma.

use crate::error::{Error, Result};

/// `kappa0 = (4/5)^{1/d}`, `n0` the least integer >= 2 with
/// `2^n / (2^n - 2) <= sqrt(6/5)`, and `delta0 = (1 - kappa0)^2 /
/// (12 C0 kappa0^2)` where `C0` is the constant of the second energy
/// inequality (a config input here).
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct DeGiorgiConstants {
    pub kappa0: f64,
    pub n0: u32,
    pub delta0: f64,
    pub c0: f64,
}

pub fn degiorgi_constants(d: usize, c0: f64) -> Result<DeGiorgiConstants> {
    if d != 2 && d != 3 {
        return Err(Error::Dimension(format!(
            "constants defined for d = 2 or 3, got {d}"
        )));
    }
    if !(c0 > 0.0 && c0.is_finite()) {
        return Err(Error::Config(vec![format!(
            "diagnostics.c0: must be strictly positive, got {c0}"
        )]));
    }
    let kappa0 = (0.8f64).powf(1.0 / d as f64);
    let target = (6.0f64 / 5.0).sqrt();
    let mut n0 = 2u32;
    loop {
        let p = (2.0f64).powi(n0 as i32);
        if p / (p - 2.0) <= target {
            break;
        }
        n0 += 1;
        assert!(n0 < 64, "defining inequality must terminate");
    }
    let delta0 = (1.0 - kappa0) * (1.0 - kappa0) / (12.0 * c0 * kappa0 * kappa0);
    Ok(DeGiorgiConstants {
        kappa0,
        n0,
        delta0,
        c0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn exact_values_d3() {
        let c = degiorgi_constants(3, 1.0).unwrap();
        assert_relative_eq!(c.kappa0, 0.928317766722556, epsilon = 1e-12);
        assert_eq!(c.n0, 5);
        assert_relative_eq!(c.delta0, 4.969e-4, max_relative = 1e-3);
        assert_relative_eq!(c.kappa0.powi(3), 0.8, epsilon = 1e-14);
    }

    #[test]
    fn exact_values_d2() {
        let c = degiorgi_constants(2, 1.0).unwrap();
        assert_relative_eq!(c.kappa0, 0.8f64.sqrt(), epsilon = 1e-15);
        assert_eq!(c.n0, 5);
        assert_relative_eq!(c.delta0, 1.1610e-3, max_relative = 1e-3);
    }

    #[test]
    fn delta0_scales_inversely_with_c0() {
        let a = degiorgi_constants(3, 1.0).unwrap();
        let b = degiorgi_constants(3, 2.0).unwrap();
        assert_relative_eq!(a.delta0, 2.0 * b.delta0, epsilon = 1e-15);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(degiorgi_constants(4, 1.0).is_err());
        assert!(degiorgi_constants(3, 0.0).is_err());
    }
}

use crate::error::{Error, Result};

/// Uniform grid on the d-torus `[0, 2*pi)^d`, d = 2 or 3.
///
/// Mode counts are even and at least 8 per axis. Integer wavenumbers per axis
/// run over `{-N/2 + 1, ..., N/2}`; storage is row-major with the last axis
/// fastest, index `i` on an axis carrying wavenumber `i` for `i <= N/2` and
/// `i - N` above.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Grid {
    dims: Vec<usize>,
}

impl Grid {
    pub fn new(dims: &[usize]) -> Result<Self> {
        if dims.len() != 2 && dims.len() != 3 {
            return Err(Error::Dimension(format!(
                "grid must be 2- or 3-dimensional, got d = {}",
                dims.len()
            )));
        }
        for (axis, &n) in dims.iter().enumerate() {
            if n < 8 || n % 2 != 0 {
                return Err(Error::Dimension(format!(
                    "dims[{axis}] = {n}: mode counts must be even and >= 8"
                )));
            }
        }
        Ok(Grid {
            dims: dims.to_vec(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dims.len()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Total number of grid points / Fourier modes.
    pub fn len(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Grid spacing `2*pi / N` on `axis`.
    pub fn spacing(&self, axis: usize) -> f64 {
        2.0 * std::f64::consts::PI / self.dims[axis] as f64
    }

    pub fn min_spacing(&self) -> f64 {
        2.0 * std::f64::consts::PI / *self.dims.iter().max().unwrap() as f64
    }

    /// Volume of one grid cell, `prod_a h_a`.
    pub fn cell_volume(&self) -> f64 {
        self.dims
            .iter()
            .map(|&n| 2.0 * std::f64::consts::PI / n as f64)
            .product()
    }

    /// Torus volume `(2*pi)^d`.
    pub fn volume(&self) -> f64 {
        (2.0 * std::f64::consts::PI).powi(self.dim() as i32)
    }

    /// Integer wavenumber carried by storage index `i` on `axis`.
    #[inline]
    pub fn wavenumber(&self, axis: usize, i: usize) -> i64 {
        let n = self.dims[axis];
        if i <= n / 2 {
            i as i64
        } else {
            i as i64 - n as i64
        }
    }

    /// Per-axis wavenumber table (storage order).
    pub fn wavenumbers(&self, axis: usize) -> Vec<i64> {
        (0..self.dims[axis])
            .map(|i| self.wavenumber(axis, i))
            .collect()
    }

    /// Row-major strides, last axis fastest.
    pub fn strides(&self) -> Vec<usize> {
        let d = self.dim();
        let mut s = vec![1usize; d];
        for a in (0..d.saturating_sub(1)).rev() {
            s[a] = s[a + 1] * self.dims[a + 1];
        }
        s
    }

    /// Flat index of a multi-index.
    #[inline]
    pub fn flat_index(&self, idx: &[usize]) -> usize {
        let mut flat = 0usize;
        for (a, &i) in idx.iter().enumerate() {
            flat = flat * self.dims[a] + i;
        }
        flat
    }

    /// Multi-index of a flat index.
    pub fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let d = self.dim();
        let mut idx = vec![0usize; d];
        for a in (0..d).rev() {
            idx[a] = flat % self.dims[a];
            flat /= self.dims[a];
        }
        idx
    }

    /// Storage index of the mirror mode `-k` on `axis`.
    #[inline]
    pub fn mirror(&self, axis: usize, i: usize) -> usize {
        if i == 0 {
            0
        } else {
            self.dims[axis] - i
        }
    }

    /// Iterate all modes as (flat index, integer wavenumber vector).
    pub fn iter_modes(&self) -> ModeIter<'_> {
        ModeIter {
            grid: self,
            flat: 0,
            idx: vec![0; self.dim()],
            k: vec![0; self.dim()],
        }
    }

    /// Physical coordinate of grid point index `i` on `axis`.
    #[inline]
    pub fn coord(&self, axis: usize, i: usize) -> f64 {
        i as f64 * self.spacing(axis)
    }

    pub fn same_as(&self, other: &Grid) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!(
                "{:?} vs {:?}",
                self.dims, other.dims
            )))
        }
    }
}

pub struct ModeIter<'a> {
    grid: &'a Grid,
    flat: usize,
    idx: Vec<usize>,
    k: Vec<i64>,
}

impl<'a> Iterator for ModeIter<'a> {
    /// (flat storage index, integer wavenumber vector)
    type Item = (usize, Vec<i64>);

    fn next(&mut self) -> Option<Self::Item> {
        if self.flat >= self.grid.len() {
            return None;
        }
        for a in 0..self.grid.dim() {
            self.k[a] = self.grid.wavenumber(a, self.idx[a]);
        }
        let item = (self.flat, self.k.clone());
        self.flat += 1;
        // advance multi-index, last axis fastest
        for a in (0..self.grid.dim()).rev() {
            self.idx[a] += 1;
            if self.idx[a] < self.grid.dims()[a] {
                break;
            }
            self.idx[a] = 0;
        }
        Some(item)
    }
}

/// |k|^2 for an integer wavenumber vector.
#[inline]
pub fn k_norm_sq(k: &[i64]) -> f64 {
    k.iter().map(|&ki| (ki * ki) as f64).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wavenumber_layout_matches_contract() {
        let g = Grid::new(&[8, 16]).unwrap();
        assert_eq!(g.wavenumbers(0), vec![0, 1, 2, 3, 4, -3, -2, -1]);
        let k1 = g.wavenumbers(1);
        assert_eq!(k1[8], 8); // Nyquist carried as +N/2
        assert_eq!(k1[9], -7);
        assert_eq!(*k1.iter().min().unwrap(), -7);
        assert_eq!(*k1.iter().max().unwrap(), 8);
    }

    #[test]
    fn rejects_odd_or_small_dims() {
        assert!(Grid::new(&[7, 8]).is_err());
        assert!(Grid::new(&[8, 6]).is_err());
        assert!(Grid::new(&[8]).is_err());
        assert!(Grid::new(&[8, 8, 8, 8]).is_err());
    }

    #[test]
    fn flat_and_multi_index_roundtrip() {
        let g = Grid::new(&[8, 10, 12]).unwrap();
        for flat in [0usize, 1, 959, 480, 123] {
            assert_eq!(g.flat_index(&g.multi_index(flat)), flat);
        }
        // last axis fastest
        assert_eq!(g.flat_index(&[0, 0, 1]), 1);
        assert_eq!(g.flat_index(&[0, 1, 0]), 12);
        assert_eq!(g.flat_index(&[1, 0, 0]), 120);
    }

    #[test]
    fn mirror_is_involution() {
        let g = Grid::new(&[16, 16]).unwrap();
        for i in 0..16 {
            assert_eq!(g.mirror(0, g.mirror(0, i)), i);
        }
        assert_eq!(g.mirror(0, 8), 8); // Nyquist is self-mirror
    }
}

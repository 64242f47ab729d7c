//! Multi-dimensional complex FFT on row-major buffers, built on rustfft.
//!
//! Transforms are applied axis by axis; lines along each axis are gathered
//! into a contiguous scratch buffer, transformed, and scattered back. The
//! forward transform carries the 1/prod(N) normalization so that the
//! coefficient of the zero mode equals the field mean.

use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};
use std::collections::HashMap;
use std::sync::Arc;

use crate::grid::Grid;

pub struct FftEngine {
    plans: HashMap<(usize, bool), Arc<dyn Fft<f64>>>,
}

impl FftEngine {
    pub fn new() -> Self {
        FftEngine {
            plans: HashMap::new(),
        }
    }

    fn plan(&mut self, n: usize, forward: bool) -> Arc<dyn Fft<f64>> {
        self.plans
            .entry((n, forward))
            .or_insert_with(|| {
                let mut planner = FftPlanner::new();
                let dir = if forward {
                    FftDirection::Forward
                } else {
                    FftDirection::Inverse
                };
                planner.plan_fft(n, dir)
            })
            .clone()
    }

    fn transform_axis(&mut self, grid: &Grid, data: &mut [Complex64], axis: usize, forward: bool) {
        let n = grid.dims()[axis];
        let strides = grid.strides();
        let stride = strides[axis];
        let total = grid.len();
        let lines = total / n;
        let plan = self.plan(n, forward);
        let mut line = vec![Complex64::default(); n];

        // Enumerate line origins: all flat indices whose component along `axis` is 0.
        // A flat index decomposes as base = outer * (stride * n) + inner with inner < stride.
        let block = stride * n;
        for l in 0..lines {
            let outer = l / stride;
            let inner = l % stride;
            let base = outer * block + inner;
            for (j, slot) in line.iter_mut().enumerate() {
                *slot = data[base + j * stride];
            }
            plan.process(&mut line);
            for (j, value) in line.iter().enumerate() {
                data[base + j * stride] = *value;
            }
        }
    }

    /// In-place forward DFT over all axes, normalized by 1/prod(N).
    pub fn forward(&mut self, grid: &Grid, data: &mut [Complex64]) {
        debug_assert_eq!(data.len(), grid.len());
        for axis in 0..grid.dim() {
            self.transform_axis(grid, data, axis, true);
        }
        let scale = 1.0 / grid.len() as f64;
        for v in data.iter_mut() {
            *v *= scale;
        }
    }

    /// In-place inverse DFT over all axes (synthesis, no normalization).
    pub fn inverse(&mut self, grid: &Grid, data: &mut [Complex64]) {
        debug_assert_eq!(data.len(), grid.len());
        for axis in 0..grid.dim() {
            self.transform_axis(grid, data, axis, false);
        }
    }
}

impl Default for FftEngine {
    fn default() -> Self {
        Self::new()
    }
}

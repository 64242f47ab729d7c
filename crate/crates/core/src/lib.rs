//! Pseudo-spectral simulation of drift-diffusion active scalars on the
//! 2- and 3-torus, where the velocity is recovered from the scalar through
//! divergence-free Fourier multiplier operators (the magnetogeostrophic
//! operator, perp-Riesz, or user tables), plus a diagnostics suite that
//! measures level-set energy inequalities, iterated truncation energies,
//! sup-norm decay, mean-oscillation norms of the drift potentials, and
//! oscillation decay on parabolic cylinders.

// stride arithmetic over several parallel tables reads better indexed
#![allow(clippy::needless_range_loop)]

pub mod cli;
pub mod config;
pub mod diagnostics;
pub mod error;
pub mod fft;
pub mod field;
pub mod grid;
pub mod initial;
pub mod io;
pub mod solver;
pub mod symbols;

pub use error::{Error, Result};

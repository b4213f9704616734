//! Uniform periodic grids, real fields sampled on them, and spectral
//! quadrature.
//!
//! A grid of side `L` with `n` points per axis samples `x_j = -L/2 + j h`,
//! `h = L / n`, on every axis. Field values are stored row-major (the last
//! axis varies fastest).

mod dump;
mod field;
mod spectrum;

pub use dump::{read_dump, write_dump, Dump, DumpHeader, DUMP_FORMAT};
pub use field::Field;
pub use spectrum::Spectrum;

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Largest supported spatial dimension.
pub const MAX_DIM: usize = 3;

/// Smallest number of points per axis.
pub const MIN_POINTS: usize = 8;

/// Fields with more samples than this are refused.
pub const MAX_SAMPLES: usize = 1 << 28;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    dim: usize,
    n: usize,
    length: f64,
    spacing: f64,
}

impl GridSpec {
    pub fn new(dim: usize, n: usize, length: f64) -> Result<Self> {
        if !(1..=MAX_DIM).contains(&dim) {
            return Err(Error::InvalidGrid(format!(
                "dimension {dim} not in 1..={MAX_DIM}"
            )));
        }
        if n < MIN_POINTS || !n.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "points per axis must be a power of two >= {MIN_POINTS}, got {n}"
            )));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "box length must be positive and finite, got {length}"
            )));
        }
        match n.checked_pow(dim as u32) {
            Some(total) if total <= MAX_SAMPLES => {}
            _ => {
                return Err(Error::InvalidGrid(format!(
                    "{n}^{dim} samples exceed the limit of {MAX_SAMPLES}"
                )))
            }
        }
        Ok(Self {
            dim,
            n,
            length,
            spacing: length / n as f64,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Points per axis.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Box side `L`.
    pub fn length(&self) -> f64 {
        self.length
    }

    /// Node spacing `h = L / n`.
    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// Total number of samples `n^N`.
    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Quadrature weight `h^N`.
    pub fn cell_volume(&self) -> f64 {
        self.spacing.powi(self.dim as i32)
    }

    /// `L^N`.
    pub fn volume(&self) -> f64 {
        self.length.powi(self.dim as i32)
    }

    /// Coordinate of node `j` along any axis.
    pub fn coord(&self, j: usize) -> f64 {
        -0.5 * self.length + j as f64 * self.spacing
    }

    /// Splits a flat index into per-axis indices. Unused trailing axes are 0.
    pub fn unravel(&self, index: usize) -> [usize; MAX_DIM] {
        let mut out = [0; MAX_DIM];
        let mut rest = index;
        for axis in (0..self.dim).rev() {
            out[axis] = rest % self.n;
            rest /= self.n;
        }
        out
    }

    pub fn ravel(&self, idx: &[usize]) -> usize {
        idx[..self.dim].iter().fold(0, |acc, &j| acc * self.n + j)
    }

    /// Physical position of a node. Unused trailing axes are 0.
    pub fn point(&self, index: usize) -> [f64; MAX_DIM] {
        let idx = self.unravel(index);
        let mut x = [0.0; MAX_DIM];
        for axis in 0..self.dim {
            x[axis] = self.coord(idx[axis]);
        }
        x
    }

    /// Signed integer mode for FFT slot `j`: `0, 1, .., n/2 - 1, -n/2, .., -1`.
    pub fn mode(&self, j: usize) -> i64 {
        let n = self.n as i64;
        let j = j as i64;
        if j < n / 2 {
            j
        } else {
            j - n
        }
    }

    /// Angular wavenumber `2 pi m / L` of FFT slot `j`.
    pub fn wavenumber(&self, j: usize) -> f64 {
        2.0 * PI * self.mode(j) as f64 / self.length
    }

    /// `|m|^2` summed over axes for a flat spectral index.
    pub fn mode_norm_sq(&self, index: usize) -> u64 {
        let idx = self.unravel(index);
        idx[..self.dim]
            .iter()
            .map(|&j| {
                let m = self.mode(j);
                (m * m) as u64
            })
            .sum()
    }

    /// `|kappa|^2` for a flat spectral index.
    pub fn wavenumber_sq(&self, index: usize) -> f64 {
        let k0 = 2.0 * PI / self.length;
        self.mode_norm_sq(index) as f64 * k0 * k0
    }

    /// True when the flat index lies on the outer shell of the box (some
    /// axis index equal to `0` or `n - 1`).
    pub fn on_boundary(&self, index: usize) -> bool {
        let idx = self.unravel(index);
        idx[..self.dim].iter().any(|&j| j == 0 || j == self.n - 1)
    }

    pub(crate) fn check_same(&self, other: &GridSpec) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }
}

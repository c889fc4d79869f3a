//! Periodic box geometry.
//!
//! The computational domain is a square horizontal cross-section of side
//! `lx`, periodic in both horizontal directions, times a vertical period of
//! `2π·pitch`. Samples sit at `x_i = i·lx/nx` (and likewise in `y`, `z`),
//! stored with `x` varying fastest: `index = i + nx·(j + ny·k)`.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Smallest admissible sample count along any axis.
pub const MIN_POINTS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub nx: usize,
    pub ny: usize,
    pub nz: usize,
    pub lx: f64,
    pub ly: f64,
    /// Helical pitch parameter `L`; the vertical period is `2πL`.
    pub pitch: f64,
    /// Horizontal position of the vortex axis.
    pub center: [f64; 2],
}

impl GridSpec {
    /// Cubic-resolution grid centred in the box.
    pub fn new(n: usize, lx: f64, pitch: f64) -> Result<Self> {
        Self::with_shape(n, n, n, lx, pitch)
    }

    pub fn with_shape(nx: usize, ny: usize, nz: usize, lx: f64, pitch: f64) -> Result<Self> {
        let grid = GridSpec {
            nx,
            ny,
            nz,
            lx,
            ly: lx,
            pitch,
            center: [0.5 * lx, 0.5 * lx],
        };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, n) in [("nx", self.nx), ("ny", self.ny), ("nz", self.nz)] {
            if n < MIN_POINTS || n % 2 != 0 {
                return Err(Error::Config(format!(
                    "{name} = {n}: sample counts must be even and at least {MIN_POINTS}"
                )));
            }
        }
        if !(self.lx.is_finite() && self.lx > 0.0) {
            return Err(Error::Config(format!("lx = {} must be positive", self.lx)));
        }
        if self.ly != self.lx {
            return Err(Error::Config(format!(
                "cross-section must be square (lx = {}, ly = {})",
                self.lx, self.ly
            )));
        }
        if !(self.pitch.is_finite() && self.pitch > 0.0) {
            return Err(Error::Config(format!("pitch L = {} must be positive", self.pitch)));
        }
        Ok(())
    }

    /// Vertical period `2πL`.
    pub fn lz(&self) -> f64 {
        2.0 * PI * self.pitch
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny * self.nz
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn shape(&self) -> [usize; 3] {
        [self.nx, self.ny, self.nz]
    }

    pub fn dx(&self) -> f64 {
        self.lx / self.nx as f64
    }

    pub fn dy(&self) -> f64 {
        self.ly / self.ny as f64
    }

    pub fn dz(&self) -> f64 {
        self.lz() / self.nz as f64
    }

    pub fn volume(&self) -> f64 {
        self.lx * self.ly * self.lz()
    }

    pub fn cell_volume(&self) -> f64 {
        self.volume() / self.len() as f64
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        i + self.nx * (j + self.ny * k)
    }

    #[inline]
    pub fn unravel(&self, idx: usize) -> (usize, usize, usize) {
        let i = idx % self.nx;
        let j = (idx / self.nx) % self.ny;
        let k = idx / (self.nx * self.ny);
        (i, j, k)
    }

    /// Coordinates relative to the vortex axis: `(x − cx, y − cy, z)`.
    #[inline]
    pub fn centered(&self, i: usize, j: usize, k: usize) -> [f64; 3] {
        [
            i as f64 * self.dx() - self.center[0],
            j as f64 * self.dy() - self.center[1],
            k as f64 * self.dz(),
        ]
    }

    #[inline]
    pub fn centered_at(&self, idx: usize) -> [f64; 3] {
        let (i, j, k) = self.unravel(idx);
        self.centered(i, j, k)
    }

    /// Same grid with the pitch and box dilated by `factor`.
    pub fn dilated(&self, factor: f64) -> Self {
        GridSpec {
            lx: self.lx * factor,
            ly: self.ly * factor,
            pitch: self.pitch * factor,
            center: [self.center[0] * factor, self.center[1] * factor],
            ..*self
        }
    }

    /// Radius of the default comparison mask, `lx/4`.
    pub fn mask_radius(&self) -> f64 {
        0.25 * self.lx
    }
}

/// Signed integer mode number of FFT bin `i` out of `n`.
#[inline]
pub fn mode_number(i: usize, n: usize) -> i64 {
    if i <= n / 2 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

/// Wavenumber tables for one grid.
///
/// `deriv` zeroes the Nyquist bin (first derivatives of real data), `full`
/// keeps it (used for `|k|²`).
#[derive(Debug, Clone)]
pub struct Wavenumbers {
    pub deriv: [Vec<f64>; 3],
    pub full: [Vec<f64>; 3],
    pub modes: [Vec<i64>; 3],
}

impl Wavenumbers {
    pub fn new(grid: &GridSpec) -> Self {
        let lengths = [grid.lx, grid.ly, grid.lz()];
        let ns = grid.shape();
        let build = |axis: usize, nyquist_zero: bool| -> Vec<f64> {
            let n = ns[axis];
            (0..n)
                .map(|i| {
                    if nyquist_zero && i == n / 2 {
                        0.0
                    } else {
                        2.0 * PI * mode_number(i, n) as f64 / lengths[axis]
                    }
                })
                .collect()
        };
        let modes = |axis: usize| (0..ns[axis]).map(|i| mode_number(i, ns[axis])).collect();
        Wavenumbers {
            deriv: [build(0, true), build(1, true), build(2, true)],
            full: [build(0, false), build(1, false), build(2, false)],
            modes: [modes(0), modes(1), modes(2)],
        }
    }

    #[inline]
    pub fn k_deriv(&self, i: usize, j: usize, k: usize) -> [f64; 3] {
        [self.deriv[0][i], self.deriv[1][j], self.deriv[2][k]]
    }

    #[inline]
    pub fn k_squared(&self, i: usize, j: usize, k: usize) -> f64 {
        let (a, b, c) = (self.full[0][i], self.full[1][j], self.full[2][k]);
        a * a + b * b + c * c
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_odd_and_small_counts() {
        assert!(GridSpec::with_shape(16, 16, 15, 10.0, 1.0).is_err());
        assert!(GridSpec::with_shape(6, 16, 16, 10.0, 1.0).is_err());
        assert!(GridSpec::new(16, -1.0, 1.0).is_err());
        assert!(GridSpec::new(16, 10.0, 0.0).is_err());
        let mut g = GridSpec::new(16, 10.0, 1.0).unwrap();
        g.ly = 11.0;
        assert!(g.validate().is_err());
    }

    #[test]
    fn vertical_period_is_two_pi_pitch() {
        let g = GridSpec::new(8, 4.0, 0.75).unwrap();
        assert_eq!(g.lz(), 2.0 * PI * 0.75);
        assert_eq!(g.index(1, 2, 3), 1 + 8 * (2 + 8 * 3));
        assert_eq!(g.unravel(g.index(5, 6, 7)), (5, 6, 7));
        assert_eq!(g.centered(4, 4, 0), [0.0, 0.0, 0.0]);
    }

    #[test]
    fn mode_numbers_wrap() {
        let m: Vec<i64> = (0..8).map(|i| mode_number(i, 8)).collect();
        assert_eq!(m, vec![0, 1, 2, 3, 4, -3, -2, -1]);
        let g = GridSpec::new(8, 2.0 * PI, 1.0).unwrap();
        let w = Wavenumbers::new(&g);
        assert_eq!(w.deriv[0][4], 0.0);
        assert_eq!(w.full[0][4], 4.0);
        assert_eq!(w.full[2][1], 1.0);
    }
}

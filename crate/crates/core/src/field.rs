//! Sampled fields and their Fourier coefficients.
//!
//! Both representations store one flat array per component using the grid
//! ordering `i + nx·(j + ny·k)` (x fastest).

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::GridSpec;

/// Real samples of a scalar (1 component) or vector (3 components) field.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalField {
    grid: GridSpec,
    data: Vec<Vec<f64>>,
}

/// Complex Fourier coefficients, same layout as [`PhysicalField`].
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: GridSpec,
    data: Vec<Vec<Complex64>>,
}

fn check_ncomp(n: usize) -> Result<()> {
    if n == 1 || n == 3 {
        Ok(())
    } else {
        Err(Error::Shape {
            expected: "1 or 3 components".into(),
            found: format!("{n} components"),
        })
    }
}

impl PhysicalField {
    pub fn zeros(grid: &GridSpec, ncomp: usize) -> Self {
        PhysicalField {
            grid: *grid,
            data: vec![vec![0.0; grid.len()]; ncomp],
        }
    }

    /// Wraps existing sample arrays after checking count and finiteness.
    pub fn from_components(grid: &GridSpec, data: Vec<Vec<f64>>) -> Result<Self> {
        check_ncomp(data.len())?;
        for (c, comp) in data.iter().enumerate() {
            if comp.len() != grid.len() {
                return Err(Error::Shape {
                    expected: format!("{} samples ({:?})", grid.len(), grid.shape()),
                    found: format!("{} samples in component {c}", comp.len()),
                });
            }
            if comp.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite {
                    what: format!("field component {c}"),
                });
            }
        }
        Ok(PhysicalField { grid: *grid, data })
    }

    /// Samples `f(x − cx, y − cy, z)`.
    pub fn scalar_from_fn<F>(grid: &GridSpec, f: F) -> Self
    where
        F: Fn([f64; 3]) -> f64 + Sync,
    {
        let data: Vec<f64> = (0..grid.len())
            .into_par_iter()
            .map(|idx| f(grid.centered_at(idx)))
            .collect();
        PhysicalField {
            grid: *grid,
            data: vec![data],
        }
    }

    /// Samples a vector field at centred coordinates.
    pub fn vector_from_fn<F>(grid: &GridSpec, f: F) -> Self
    where
        F: Fn([f64; 3]) -> [f64; 3] + Sync,
    {
        let vals: Vec<[f64; 3]> = (0..grid.len())
            .into_par_iter()
            .map(|idx| f(grid.centered_at(idx)))
            .collect();
        let mut data = vec![Vec::with_capacity(grid.len()); 3];
        for v in &vals {
            for c in 0..3 {
                data[c].push(v[c]);
            }
        }
        PhysicalField { grid: *grid, data }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn ncomp(&self) -> usize {
        self.data.len()
    }

    pub fn component(&self, c: usize) -> &[f64] {
        &self.data[c]
    }

    pub fn component_mut(&mut self, c: usize) -> &mut [f64] {
        &mut self.data[c]
    }

    pub fn components(&self) -> &[Vec<f64>] {
        &self.data
    }

    pub fn into_components(self) -> Vec<Vec<f64>> {
        self.data
    }

    /// Single-component view of component `c`.
    pub fn extract(&self, c: usize) -> PhysicalField {
        PhysicalField {
            grid: self.grid,
            data: vec![self.data[c].clone()],
        }
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|c| c.iter().all(|v| v.is_finite()))
    }

    fn same_shape(&self, other: &Self) {
        assert_eq!(self.grid.shape(), other.grid.shape(), "grid mismatch");
        assert_eq!(self.ncomp(), other.ncomp(), "component count mismatch");
    }

    pub fn scale(&mut self, s: f64) {
        for comp in &mut self.data {
            comp.par_iter_mut().for_each(|v| *v *= s);
        }
    }

    pub fn scaled(&self, s: f64) -> Self {
        let mut out = self.clone();
        out.scale(s);
        out
    }

    /// `self += s·other`
    pub fn axpy(&mut self, s: f64, other: &Self) {
        self.same_shape(other);
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            a.par_iter_mut().zip(b.par_iter()).for_each(|(x, y)| *x += s * y);
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.axpy(-1.0, other);
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.axpy(1.0, other);
        out
    }

    /// Pointwise Euclidean magnitude.
    pub fn magnitude(&self) -> Vec<f64> {
        (0..self.grid.len())
            .into_par_iter()
            .map(|i| self.data.iter().map(|c| c[i] * c[i]).sum::<f64>().sqrt())
            .collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.magnitude().into_iter().fold(0.0, f64::max)
    }

    /// `(∫ |f|^p)^{1/p}` by the trapezoid (= rectangle) rule on the periodic box.
    pub fn lp_norm(&self, p: f64) -> f64 {
        let mag = self.magnitude();
        let sum = chunked_sum(&mag, |m| m.powf(p));
        (sum * self.grid.cell_volume()).powf(1.0 / p)
    }

    pub fn l2_norm(&self) -> f64 {
        let mag = self.magnitude();
        (chunked_sum(&mag, |m| m * m) * self.grid.cell_volume()).sqrt()
    }

    /// L² norm restricted to the disc `r ≤ radius` about the axis.
    pub fn masked_l2(&self, radius: f64) -> f64 {
        let g = self.grid;
        let r2max = radius * radius;
        let mag = self.magnitude();
        let masked: Vec<f64> = mag
            .par_iter()
            .enumerate()
            .map(|(idx, m)| {
                let [x, y, _] = g.centered_at(idx);
                if x * x + y * y <= r2max {
                    m * m
                } else {
                    0.0
                }
            })
            .collect();
        (chunked_sum(&masked, |v| *v) * g.cell_volume()).sqrt()
    }

    pub fn mean(&self, c: usize) -> f64 {
        chunked_sum(&self.data[c], |v| *v) / self.grid.len() as f64
    }

    /// Pointwise cross product of two vector fields.
    pub fn cross(a: &Self, b: &Self) -> Self {
        a.same_shape(b);
        assert_eq!(a.ncomp(), 3);
        let n = a.grid.len();
        let mut out = PhysicalField::zeros(&a.grid, 3);
        let (a0, a1, a2) = (&a.data[0], &a.data[1], &a.data[2]);
        let (b0, b1, b2) = (&b.data[0], &b.data[1], &b.data[2]);
        let [o0, o1, o2] = three_mut(&mut out.data);
        o0.par_iter_mut()
            .zip(o1.par_iter_mut())
            .zip(o2.par_iter_mut())
            .enumerate()
            .for_each(|(i, ((x, y), z))| {
                *x = a1[i] * b2[i] - a2[i] * b1[i];
                *y = a2[i] * b0[i] - a0[i] * b2[i];
                *z = a0[i] * b1[i] - a1[i] * b0[i];
            });
        debug_assert_eq!(out.data[0].len(), n);
        out
    }
}

pub(crate) fn three_mut<T>(v: &mut [Vec<T>]) -> [&mut Vec<T>; 3] {
    let (a, rest) = v.split_first_mut().expect("3 components");
    let (b, rest) = rest.split_first_mut().expect("3 components");
    [a, b, &mut rest[0]]
}

/// Deterministic sum: fixed-size chunks are reduced in parallel and the
/// partial sums combined in order, so the result does not depend on the
/// thread count.
pub fn chunked_sum<T, F>(xs: &[T], f: F) -> f64
where
    T: Sync,
    F: Fn(&T) -> f64 + Sync,
{
    const CHUNK: usize = 4096;
    let partial: Vec<f64> = xs
        .par_chunks(CHUNK)
        .map(|c| c.iter().map(&f).sum::<f64>())
        .collect();
    partial.iter().sum()
}

impl SpectralField {
    pub fn zeros(grid: &GridSpec, ncomp: usize) -> Self {
        SpectralField {
            grid: *grid,
            data: vec![vec![Complex64::new(0.0, 0.0); grid.len()]; ncomp],
        }
    }

    pub fn from_components(grid: &GridSpec, data: Vec<Vec<Complex64>>) -> Result<Self> {
        check_ncomp(data.len())?;
        for comp in &data {
            if comp.len() != grid.len() {
                return Err(Error::Shape {
                    expected: format!("{} coefficients", grid.len()),
                    found: format!("{}", comp.len()),
                });
            }
        }
        Ok(SpectralField { grid: *grid, data })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn ncomp(&self) -> usize {
        self.data.len()
    }

    pub fn component(&self, c: usize) -> &[Complex64] {
        &self.data[c]
    }

    pub fn component_mut(&mut self, c: usize) -> &mut [Complex64] {
        &mut self.data[c]
    }

    pub fn components(&self) -> &[Vec<Complex64>] {
        &self.data
    }

    pub fn components_mut(&mut self) -> &mut [Vec<Complex64>] {
        &mut self.data
    }

    pub fn into_components(self) -> Vec<Vec<Complex64>> {
        self.data
    }

    pub fn extract(&self, c: usize) -> SpectralField {
        SpectralField {
            grid: self.grid,
            data: vec![self.data[c].clone()],
        }
    }

    /// Vector field from three scalar spectra.
    pub fn stack(parts: [SpectralField; 3]) -> SpectralField {
        let grid = parts[0].grid;
        let data = parts.into_iter().map(|p| p.data.into_iter().next().unwrap()).collect();
        SpectralField { grid, data }
    }

    fn same_shape(&self, other: &Self) {
        assert_eq!(self.grid.shape(), other.grid.shape(), "grid mismatch");
        assert_eq!(self.ncomp(), other.ncomp(), "component count mismatch");
    }

    pub fn scale(&mut self, s: f64) {
        for comp in &mut self.data {
            comp.par_iter_mut().for_each(|v| *v *= s);
        }
    }

    pub fn scaled(&self, s: f64) -> Self {
        let mut out = self.clone();
        out.scale(s);
        out
    }

    pub fn axpy(&mut self, s: f64, other: &Self) {
        self.same_shape(other);
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            a.par_iter_mut().zip(b.par_iter()).for_each(|(x, y)| *x += y * s);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.axpy(1.0, other);
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.axpy(-1.0, other);
        out
    }

    /// Multiplies every coefficient by `m(i, j, k)` (bin indices).
    pub fn apply_multiplier<F>(&mut self, m: F)
    where
        F: Fn(usize, usize, usize) -> f64 + Sync,
    {
        let g = self.grid;
        for comp in &mut self.data {
            comp.par_iter_mut().enumerate().for_each(|(idx, v)| {
                let (i, j, k) = g.unravel(idx);
                *v *= m(i, j, k);
            });
        }
    }

    /// Largest deviation from Hermitian symmetry `F(−k) = conj F(k)`.
    pub fn hermitian_defect(&self) -> f64 {
        let g = self.grid;
        let neg = |i: usize, n: usize| (n - i) % n;
        self.data
            .iter()
            .map(|comp| {
                (0..g.len())
                    .into_par_iter()
                    .map(|idx| {
                        let (i, j, k) = g.unravel(idx);
                        let m = g.index(neg(i, g.nx), neg(j, g.ny), neg(k, g.nz));
                        (comp[idx] - comp[m].conj()).norm()
                    })
                    .reduce(|| 0.0, f64::max)
            })
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_wrong_shapes_and_nan() {
        let g = GridSpec::new(8, 1.0, 1.0).unwrap();
        assert!(PhysicalField::from_components(&g, vec![vec![0.0; 10]]).is_err());
        assert!(PhysicalField::from_components(&g, vec![vec![0.0; g.len()]; 2]).is_err());
        let mut bad = vec![0.0; g.len()];
        bad[3] = f64::NAN;
        assert!(matches!(
            PhysicalField::from_components(&g, vec![bad]),
            Err(Error::NonFinite { .. })
        ));
    }

    #[test]
    fn cross_product_of_unit_axes() {
        let g = GridSpec::new(8, 1.0, 1.0).unwrap();
        let ex = PhysicalField::vector_from_fn(&g, |_| [1.0, 0.0, 0.0]);
        let ey = PhysicalField::vector_from_fn(&g, |_| [0.0, 1.0, 0.0]);
        let ez = PhysicalField::cross(&ex, &ey);
        assert!(ez.component(2).iter().all(|&v| v == 1.0));
        assert!(ez.component(0).iter().all(|&v| v == 0.0));
    }

    #[test]
    fn constant_norms() {
        let g = GridSpec::new(8, 2.0, 1.0).unwrap();
        let f = PhysicalField::scalar_from_fn(&g, |_| 3.0);
        let vol = g.volume();
        assert!((f.l2_norm() - 3.0 * vol.sqrt()).abs() < 1e-12);
        assert!((f.lp_norm(4.0) - 3.0 * vol.powf(0.25)).abs() < 1e-12);
        assert_eq!(f.max_abs(), 3.0);
    }
}
